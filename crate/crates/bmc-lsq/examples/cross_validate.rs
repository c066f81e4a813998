//! Select the regularization and width parameters by K-fold
//! cross-validation on a desk-scale sample.
//!
//! Run with: `cargo run --example cross_validate`

use bmc_lsq::kernels::{simulate_tree, InitialLaw, KernelModel, NbarModel};
use bmc_lsq::selection::{cross_validate, CvCriterion, CvGrid, IseVariant};

fn main() -> bmc_lsq::Result<()> {
    let kernel = KernelModel::Nbar(NbarModel::paper_default());
    let (n, seed) = (9u32, 5u64);
    let sample = simulate_tree(&kernel, &InitialLaw::StandardNormal, n + 1, seed)?;

    // A sub-grid of the full study grids keeps this example quick.
    let grid = CvGrid {
        lambdas: vec![0.01, 0.0316, 0.1, 0.3162, 1.0],
        taus: vec![0.1778, 0.4217, 1.0, 2.3714],
        folds: 5,
        criterion: CvCriterion::Ise,
        ise_variant: IseVariant::Raw,
        d_max: 256,
    };
    let report = cross_validate(&sample, n, &grid, seed)?;

    println!("fold-averaged scores (lambda x tau):");
    for row in &report.mean_scores {
        println!("  lambda {:<7} tau {:<7} score {:.6}", row.lambda, row.tau, row.score);
    }
    println!(
        "selected (lambda, tau) = ({}, {})",
        report.best_lambda, report.best_tau
    );
    println!("log-loss floored terms: {}", report.floored_terms);
    Ok(())
}
