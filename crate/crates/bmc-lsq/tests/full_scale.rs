//! Full study-scale smoke runs, ignored by default because each takes tens
//! of minutes of CPU. Run explicitly with:
//! `cargo test --release --test full_scale -- --ignored --nocapture`

use bmc_lsq::basis::{select_centers, GaussianBasis};
use bmc_lsq::estimator::fit;
use bmc_lsq::kernels::{simulate_tree, InitialLaw, KernelModel, NbarModel};
use bmc_lsq::rng::stream;
use bmc_lsq::selection::{cross_validate, CvGrid};
use bmc_lsq::tree::triangles_of_generation;

#[test]
#[ignore = "full generation-16 protocol, tens of minutes"]
fn fit_g16_smoke() {
    let kernel = KernelModel::Nbar(NbarModel::paper_default());
    let seed = 20260809u64;
    let n = 16u32;
    let sample = simulate_tree(&kernel, &InitialLaw::StandardNormal, n + 1, seed).unwrap();
    let triangles = triangles_of_generation(&sample, n).unwrap();
    assert_eq!(triangles.len(), 65536);

    let report = cross_validate(&sample, n, &CvGrid::paper_default(), seed).unwrap();
    println!(
        "selected (lambda, tau) = ({}, {})",
        report.best_lambda, report.best_tau
    );

    let centers =
        select_centers(&triangles, 1000, &mut stream(seed, "g16-centers", 0, 0)).unwrap();
    let basis = GaussianBasis::new(report.best_tau, centers).unwrap();
    let fitted = fit(&triangles, basis, report.best_lambda).unwrap();
    let positive = fitted.beta().iter().filter(|&&b| b > 0.0).count();
    println!("positive coefficients: {positive}/1000");
    assert!(positive >= 1);
}
