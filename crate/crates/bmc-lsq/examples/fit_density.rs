//! Fit the transition density on one generation sample at a fixed
//! regularization/width pair and compare the estimate against the truth.
//!
//! Run with: `cargo run --example fit_density`

use bmc_lsq::basis::{select_centers, GaussianBasis};
use bmc_lsq::estimator::fit;
use bmc_lsq::experiments::metrics::slice_squared_error;
use bmc_lsq::kernels::{simulate_tree, InitialLaw, KernelModel, NbarModel};
use bmc_lsq::quadrature::QuadratureGrid;
use bmc_lsq::rng::stream;
use bmc_lsq::tree::triangles_of_generation;

fn main() -> bmc_lsq::Result<()> {
    let model = NbarModel::paper_default();
    let kernel = KernelModel::Nbar(model.clone());
    let (n, seed) = (10u32, 11u64);
    let (lambda, tau) = (0.1, 0.4217);

    let sample = simulate_tree(&kernel, &InitialLaw::StandardNormal, n + 1, seed)?;
    let triangles = triangles_of_generation(&sample, n)?;
    let d = 1000usize.min(triangles.len());
    let centers = select_centers(&triangles, d, &mut stream(seed, "centers", 0, 0))?;
    let basis = GaussianBasis::new(tau, centers)?;
    let fitted = fit(&triangles, basis, lambda)?;

    let positive = fitted.beta().iter().filter(|&&b| b > 0.0).count();
    println!("fitted {} coefficients at (lambda, tau) = ({lambda}, {tau}); {positive} positive", d);

    let probe = (0.5, 0.5, 1.4);
    let estimate = fitted.eval_normalized(probe.0, probe.1, probe.2)?;
    let truth = model.density(probe.0, probe.1, probe.2);
    println!("P({:?}) estimate {estimate:.5} vs truth {truth:.5}", probe);

    let grid = QuadratureGrid::square(-3.0, 3.0, 96)?;
    let err = slice_squared_error(&fitted, &model, 0.5, &grid)?;
    println!("squared slice error at x = 0.5 over [-3,3]^2: {err:.6}");

    // The renormalized estimator integrates to one on every supported slice.
    let mass = grid.integrate(|y, z| fitted.eval_normalized(0.5, y, z).unwrap());
    println!("slice mass at x = 0.5 (finite box): {mass:.6}");
    Ok(())
}
