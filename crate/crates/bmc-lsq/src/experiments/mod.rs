//! Experiment harness: error metrics, figure-data emitters, the
//! concentration lab, and the convergence-rate study.

pub mod concentration;
pub mod figures;
pub mod metrics;
pub mod rate;
pub mod stats;

use crate::basis::{select_centers, GaussianBasis};
use crate::error::Result;
use crate::estimator::{fit, DensityFit};
use crate::kernels::{simulate_tree, InitialLaw, KernelModel};
use crate::rng::{derive_seed, stream};
use crate::selection::{cross_validate, CvGrid};
use crate::tree::{triangles_of_generation, TreeSample};

/// The repeated fit pipeline shared by the figures and the rate study:
/// simulate a generation sample, select centers from its triangles, fit.
#[derive(Debug, Clone)]
pub struct FitProtocol {
    pub kernel: KernelModel,
    pub init: InitialLaw,
    /// Basis dimension rule: `d = min(d_max, 2^n)`.
    pub d_max: usize,
}

impl FitProtocol {
    /// Cross-validates on a calibration sample over generation `n` and
    /// returns the selected `(lambda, tau)`.
    pub fn select_parameters(&self, n: u32, grid: &CvGrid, master: u64) -> Result<(f64, f64)> {
        let seed = derive_seed(master, "calibration-tree", u64::from(n), 0);
        let sample = simulate_tree(&self.kernel, &self.init, n + 1, seed)?;
        let report = cross_validate(&sample, n, grid, derive_seed(master, "cv", u64::from(n), 0))?;
        Ok((report.best_lambda, report.best_tau))
    }

    /// Simulates the tree for replication `rep` of a generation-`n` study.
    pub fn replication_sample(&self, n: u32, master: u64, rep: u64) -> Result<TreeSample> {
        let tree_seed = derive_seed(master, "replication-tree", u64::from(n), rep);
        simulate_tree(&self.kernel, &self.init, n + 1, tree_seed)
    }

    /// Fits one sample at fixed `(lambda, tau)`: centers drawn from its own
    /// triangles under the replication's stream, then the ridge fit.
    pub fn fit_sample(
        &self,
        sample: &TreeSample,
        n: u32,
        lambda: f64,
        tau: f64,
        master: u64,
        rep: u64,
    ) -> Result<DensityFit> {
        let triangles = triangles_of_generation(sample, n)?;
        let d = self.d_max.min(triangles.len());
        let centers = select_centers(
            &triangles,
            d,
            &mut stream(master, "replication-centers", u64::from(n), rep),
        )?;
        let basis = GaussianBasis::new(tau, centers)?;
        fit(&triangles, basis, lambda)
    }

    /// One replication at fixed `(lambda, tau)`: fresh tree, fresh centers, fit.
    pub fn fit_replication(
        &self,
        n: u32,
        lambda: f64,
        tau: f64,
        master: u64,
        rep: u64,
    ) -> Result<DensityFit> {
        let sample = self.replication_sample(n, master, rep)?;
        self.fit_sample(&sample, n, lambda, tau, master, rep)
    }

    /// One replication with its own cross-validation pass: parameters are
    /// selected on the replication's sample, then the fit reuses that sample.
    pub fn fit_replication_with_cv(
        &self,
        n: u32,
        grid: &CvGrid,
        master: u64,
        rep: u64,
    ) -> Result<(DensityFit, (f64, f64))> {
        let sample = self.replication_sample(n, master, rep)?;
        let cv_seed = derive_seed(master, "replication-cv", u64::from(n), rep);
        let report = cross_validate(&sample, n, grid, cv_seed)?;
        let fit = self.fit_sample(&sample, n, report.best_lambda, report.best_tau, master, rep)?;
        Ok((fit, (report.best_lambda, report.best_tau)))
    }
}
