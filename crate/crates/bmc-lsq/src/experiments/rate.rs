//! Convergence-rate study on the linear bifurcating autoregression.
//!
//! The linear drift makes the tagged-chain contraction rate equal to the
//! drift slope in absolute value, so sweeping the slope sweeps the
//! ergodicity rate directly. For each `(a, n)` cell the study selects
//! `(lambda, tau)` by cross-validation once, fits independent replications,
//! and reports the median squared slice error together with the fitted
//! decay slope of its logarithm in the generation index.
//!
//! The contraction `|a|` is a proxy for the bounded-function ergodicity
//! rate and is labeled as such in outputs; no claim is made that the
//! geometric-ergodicity assumption is verified for the unbounded state
//! space here.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::experiments::metrics::slice_squared_error;
use crate::experiments::stats::{median, ols_slope};
use crate::experiments::FitProtocol;
use crate::kernels::{Drift, InitialLaw, KernelModel, NbarModel};
use crate::quadrature::QuadratureGrid;
use crate::rng::derive_seed;
use crate::selection::CvGrid;

/// Configuration of the rate study.
#[derive(Debug, Clone)]
pub struct RateStudyConfig {
    /// Drift slopes to sweep; each is the tagged-chain contraction proxy.
    pub a_values: Vec<f64>,
    pub generations: Vec<u32>,
    pub reps: usize,
    pub sigma: f64,
    pub rho: f64,
    /// Probe point of the slice error.
    pub x0: f64,
    pub box_lo: f64,
    pub box_hi: f64,
    pub quad_points: usize,
    pub cv: CvGrid,
    pub d_max: usize,
}

impl RateStudyConfig {
    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        if self.a_values.is_empty() {
            violations.push("rate study needs at least one drift slope".into());
        }
        if self.a_values.iter().any(|a| !(a.abs() < 1.0)) {
            violations.push("drift slopes must lie in (-1, 1)".into());
        }
        if self.generations.len() < 2 {
            violations.push("rate study needs at least two generations for a slope".into());
        }
        if self.generations.windows(2).any(|w| w[0] >= w[1]) {
            violations.push("generations must be strictly ascending".into());
        }
        if self.reps == 0 {
            violations.push("rate study needs at least one replication".into());
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::ConfigViolations(violations))
        }
    }
}

/// One replication's slice error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateStudyRow {
    pub a: f64,
    pub n: u32,
    pub rep: usize,
    pub error: f64,
}

/// Median error of one `(a, n)` cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateMedian {
    pub a: f64,
    pub n: u32,
    pub median_error: f64,
}

/// Fitted decay slope of `ln(median error)` versus `n` for one slope `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSlope {
    pub a: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateStudy {
    pub rows: Vec<RateStudyRow>,
    pub medians: Vec<RateMedian>,
    pub slopes: Vec<RateSlope>,
    /// Cross-validated `(a, n, lambda, tau)` per cell.
    pub selected: Vec<(f64, u32, f64, f64)>,
}

pub fn run_rate_study(cfg: &RateStudyConfig, master: u64) -> Result<RateStudy> {
    cfg.validate()?;
    let grid = QuadratureGrid::square(cfg.box_lo, cfg.box_hi, cfg.quad_points)?;
    let mut rows = Vec::new();
    let mut medians = Vec::new();
    let mut slopes = Vec::new();
    let mut selected = Vec::new();

    for (ai, &a) in cfg.a_values.iter().enumerate() {
        let model = NbarModel::new(cfg.sigma, cfg.rho, Drift::Linear { slope: a })?;
        let protocol = FitProtocol {
            kernel: KernelModel::Nbar(model.clone()),
            init: InitialLaw::StandardNormal,
            d_max: cfg.d_max,
        };
        let study_master = derive_seed(master, "rate-slope", ai as u64, 0);
        let mut log_medians = Vec::with_capacity(cfg.generations.len());
        for &n in &cfg.generations {
            let (lambda, tau) = protocol.select_parameters(n, &cfg.cv, study_master)?;
            selected.push((a, n, lambda, tau));
            let errors: Vec<Result<f64>> = (0..cfg.reps as u64)
                .into_par_iter()
                .map(|rep| {
                    let fit = protocol.fit_replication(n, lambda, tau, study_master, rep)?;
                    slice_squared_error(&fit, &model, cfg.x0, &grid)
                })
                .collect();
            let errors = errors.into_iter().collect::<Result<Vec<f64>>>()?;
            for (rep, &error) in errors.iter().enumerate() {
                rows.push(RateStudyRow { a, n, rep, error });
            }
            let med = median(&errors);
            medians.push(RateMedian { a, n, median_error: med });
            log_medians.push(med.max(1e-300).ln());
        }
        let xs: Vec<f64> = cfg.generations.iter().map(|&n| f64::from(n)).collect();
        slopes.push(RateSlope { a, slope: ols_slope(&xs, &log_medians) });
    }
    Ok(RateStudy { rows, medians, slopes, selected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selection::{CvCriterion, IseVariant};

    fn desk_config() -> RateStudyConfig {
        RateStudyConfig {
            a_values: vec![0.3],
            generations: vec![6, 7, 8],
            reps: 4,
            sigma: 1.0,
            rho: 0.3,
            x0: 0.5,
            box_lo: -3.0,
            box_hi: 3.0,
            quad_points: 48,
            cv: CvGrid {
                lambdas: vec![0.0316, 0.1],
                taus: vec![0.4217, 1.0],
                folds: 3,
                criterion: CvCriterion::Ise,
                ise_variant: IseVariant::Raw,
                d_max: 48,
            },
            d_max: 48,
        }
    }

    #[test]
    fn rate_study_outputs_are_complete_and_nonnegative() {
        let cfg = desk_config();
        let study = run_rate_study(&cfg, 77).unwrap();
        assert_eq!(study.rows.len(), 3 * 4);
        assert_eq!(study.medians.len(), 3);
        assert_eq!(study.slopes.len(), 1);
        assert_eq!(study.selected.len(), 3);
        assert!(study.rows.iter().all(|r| r.error >= 0.0 && r.error.is_finite()));
        assert!(study.medians.iter().all(|m| m.median_error > 0.0));
        assert!(study.slopes[0].slope.is_finite());
    }

    #[test]
    fn rate_study_is_deterministic() {
        let cfg = desk_config();
        let a = run_rate_study(&cfg, 99).unwrap();
        let b = run_rate_study(&cfg, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn validation_rejects_bad_sweeps() {
        let mut cfg = desk_config();
        cfg.a_values = vec![1.5];
        cfg.generations = vec![6];
        cfg.reps = 0;
        match cfg.validate() {
            Err(Error::ConfigViolations(v)) => assert_eq!(v.len(), 3, "violations {v:?}"),
            other => panic!("expected violations, got {other:?}"),
        }
    }
}
