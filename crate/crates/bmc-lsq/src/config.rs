//! Run configuration: a TOML file with sections, validated against the
//! library's preconditions before any work starts.
//!
//! Unknown keys are rejected at parse time (with the file position from the
//! TOML parser); semantic violations are collected and reported together.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::rate::RateStudyConfig;
use crate::experiments::FitProtocol;
use crate::kernels::{Drift, InitialLaw, KernelModel, NbarModel, TwoPointModel};
use crate::selection::{paper_lambda_grid, paper_tau_grid, CvCriterion, CvGrid, IseVariant};
use crate::tree::MAX_DEPTH;

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    /// "nbar" or "twopoint".
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    /// "sinc2pi", "sinc2pi_normalized", or "linear".
    #[serde(default = "default_drift")]
    pub drift: String,
    /// Slope of the linear drift, when selected.
    #[serde(default)]
    pub drift_slope: Option<f64>,
    /// Two-point child-parent correlation.
    #[serde(default = "default_twopoint_a")]
    pub a: f64,
}

fn default_sigma() -> f64 {
    1.0
}
fn default_rho() -> f64 {
    0.3
}
fn default_drift() -> String {
    "sinc2pi".to_string()
}
fn default_twopoint_a() -> f64 {
    0.4
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleSection {
    /// Generation over which triangles are taken; the simulator runs one
    /// level deeper so the children exist.
    pub generation: u32,
    /// "standard_normal", "uniform_sign", or "point".
    pub initial_law: String,
    /// Root value when `initial_law = "point"`.
    pub initial_point: f64,
}

impl Default for SampleSection {
    fn default() -> Self {
        SampleSection {
            generation: 16,
            initial_law: "standard_normal".to_string(),
            initial_point: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct BasisSection {
    /// Dimension rule `d = min(d_max, 2^n)`.
    pub d_max: usize,
    /// Width used by plain `fit`; cross-validation sweeps its own grid.
    pub tau: f64,
}

impl Default for BasisSection {
    fn default() -> Self {
        BasisSection { d_max: 1000, tau: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitSection {
    pub lambda: f64,
}

impl Default for FitSection {
    fn default() -> Self {
        FitSection { lambda: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct CvSection {
    pub folds: usize,
    /// "ise" or "kl".
    pub criterion: String,
    /// "raw" or "normalized": which estimator the ISE surrogate scores.
    pub ise_score_on: String,
    pub lambdas: Vec<f64>,
    pub taus: Vec<f64>,
}

impl Default for CvSection {
    fn default() -> Self {
        CvSection {
            folds: 5,
            criterion: "ise".to_string(),
            ise_score_on: "raw".to_string(),
            lambdas: paper_lambda_grid(),
            taus: paper_tau_grid(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub replications: usize,
    pub generations: Vec<u32>,
    /// Probe point of the point-value boxplot.
    pub point: [f64; 3],
    /// Slice abscissa for curves, surfaces, and slice errors.
    pub slice_x: f64,
    pub box_lo: f64,
    pub box_hi: f64,
    pub quad_points: usize,
    /// Grid resolution of the surface figure.
    pub surface_points: usize,
    /// Grid resolution of the curve figure.
    pub z_points: usize,
    /// Generation of the curve figure.
    pub curves_generation: u32,
    /// Generation of the surface figure.
    pub surface_generation: u32,
    /// Re-run cross-validation inside every replication instead of reusing
    /// one selected cell per generation.
    pub reselect_cv_per_replication: bool,
    pub burn_in: usize,
    pub thinning: usize,
    pub mu_samples: usize,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            replications: 500,
            generations: vec![8, 9, 10, 11, 12, 13],
            point: [0.5, 0.5, 1.4],
            slice_x: 0.5,
            box_lo: -3.0,
            box_hi: 3.0,
            quad_points: 96,
            surface_points: 61,
            z_points: 121,
            curves_generation: 13,
            surface_generation: 16,
            reselect_cv_per_replication: false,
            burn_in: 1000,
            thinning: 10,
            mu_samples: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConcentrationSection {
    pub a: f64,
    pub n: u32,
    pub replications: usize,
    pub deltas: Vec<f64>,
}

impl Default for ConcentrationSection {
    fn default() -> Self {
        ConcentrationSection {
            a: 0.4,
            n: 10,
            replications: 2000,
            deltas: vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RateSection {
    pub a_values: Vec<f64>,
    pub generations: Vec<u32>,
    pub replications: usize,
}

impl Default for RateSection {
    fn default() -> Self {
        RateSection {
            a_values: vec![0.25, 0.85],
            generations: vec![8, 9, 10, 11, 12, 13],
            replications: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub seed: u64,
    pub out_dir: String,
    /// Worker thread cap; 0 means all cores.
    pub jobs: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection { seed: 20260809, out_dir: "out".to_string(), jobs: 0 }
    }
}

/// The full run configuration. The `[kernel]` section is mandatory; all
/// other sections default to the values of the numerical study.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kernel: KernelSection,
    #[serde(default)]
    pub sample: SampleSection,
    #[serde(default)]
    pub basis: BasisSection,
    #[serde(default)]
    pub fit: FitSection,
    #[serde(default)]
    pub cv: CvSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub concentration: ConcentrationSection,
    #[serde(default)]
    pub rate: RateSection,
    #[serde(default)]
    pub run: RunSection,
}

impl RunConfig {
    /// The defaults of the numerical study: unit-noise sinc autoregression
    /// at generation 16 with the paper grids.
    pub fn paper_default() -> RunConfig {
        RunConfig {
            kernel: KernelSection {
                kind: "nbar".to_string(),
                sigma: default_sigma(),
                rho: default_rho(),
                drift: default_drift(),
                drift_slope: None,
                a: default_twopoint_a(),
            },
            sample: SampleSection::default(),
            basis: BasisSection::default(),
            fit: FitSection::default(),
            cv: CvSection::default(),
            experiment: ExperimentSection::default(),
            concentration: ConcentrationSection::default(),
            rate: RateSection::default(),
            run: RunSection::default(),
        }
    }

    /// Reads and fully validates a configuration file. Syntax errors carry
    /// the parser's position; semantic violations are aggregated.
    pub fn parse_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse_str(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Collects every semantic violation; empty means the config is usable.
    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();

        match self.kernel.kind.as_str() {
            "nbar" | "twopoint" => {}
            other => violations.push(format!("kernel.type must be nbar or twopoint, got {other:?}")),
        }
        if !(self.kernel.sigma > 0.0) {
            violations.push(format!("kernel.sigma must be positive, got {}", self.kernel.sigma));
        }
        if !(self.kernel.rho.abs() < 1.0) {
            violations.push(format!("kernel.rho must lie in (-1, 1), got {}", self.kernel.rho));
        }
        match self.kernel.drift.as_str() {
            "sinc2pi" | "sinc2pi_normalized" => {}
            "linear" => match self.kernel.drift_slope {
                Some(s) if s.abs() < 1.0 => {}
                Some(s) => {
                    violations.push(format!("kernel.drift_slope must lie in (-1, 1), got {s}"))
                }
                None => violations
                    .push("kernel.drift = \"linear\" requires kernel.drift_slope".to_string()),
            },
            other => violations.push(format!(
                "kernel.drift must be sinc2pi, sinc2pi_normalized, or linear, got {other:?}"
            )),
        }
        if self.kernel.kind == "twopoint" && !(self.kernel.a.abs() < 1.0) {
            violations.push(format!("kernel.a must lie in (-1, 1), got {}", self.kernel.a));
        }

        if self.sample.generation + 1 > MAX_DEPTH {
            violations.push(format!(
                "sample.generation {} needs tree depth {} which exceeds the cap of {MAX_DEPTH}",
                self.sample.generation,
                self.sample.generation + 1
            ));
        }
        match self.sample.initial_law.as_str() {
            "standard_normal" | "uniform_sign" | "point" => {}
            other => violations.push(format!(
                "sample.initial_law must be standard_normal, uniform_sign, or point, got {other:?}"
            )),
        }

        if self.basis.d_max == 0 {
            violations.push("basis.d_max must be positive".to_string());
        }
        if !(self.basis.tau > 0.0) {
            violations.push(format!("basis.tau must be positive, got {}", self.basis.tau));
        }
        if !(self.fit.lambda > 0.0) {
            violations.push(format!("fit.lambda must be positive, got {}", self.fit.lambda));
        }

        match self.cv.criterion.as_str() {
            "ise" | "kl" => {}
            other => violations.push(format!("cv.criterion must be ise or kl, got {other:?}")),
        }
        match self.cv.ise_score_on.as_str() {
            "raw" | "normalized" => {}
            other => violations
                .push(format!("cv.ise_score_on must be raw or normalized, got {other:?}")),
        }
        if let Err(Error::ConfigViolations(mut v)) = self.cv_grid_unchecked().validate() {
            violations.append(&mut v);
        }

        if self.experiment.replications == 0 {
            violations.push("experiment.replications must be positive".to_string());
        }
        if self.experiment.generations.is_empty() {
            violations.push("experiment.generations must be nonempty".to_string());
        } else if self.experiment.generations.windows(2).any(|w| w[0] >= w[1]) {
            violations.push("experiment.generations must be strictly ascending".to_string());
        }
        for &n in &self.experiment.generations {
            if n + 1 > MAX_DEPTH {
                violations.push(format!("experiment generation {n} exceeds the depth cap"));
            }
        }
        if !(self.experiment.box_lo < self.experiment.box_hi) {
            violations.push(format!(
                "experiment box [{}, {}] is empty",
                self.experiment.box_lo, self.experiment.box_hi
            ));
        }
        if self.experiment.quad_points < 16 {
            violations.push(format!(
                "experiment.quad_points must be at least 16, got {}",
                self.experiment.quad_points
            ));
        }
        if self.experiment.surface_points < 2 || self.experiment.z_points < 2 {
            violations.push("experiment grid resolutions must be at least 2".to_string());
        }
        if self.experiment.curves_generation + 1 > MAX_DEPTH
            || self.experiment.surface_generation + 1 > MAX_DEPTH
        {
            violations.push("figure generations exceed the depth cap".to_string());
        }
        if self.experiment.burn_in == 0 || self.experiment.thinning == 0 {
            violations.push("experiment.burn_in and experiment.thinning must be positive".into());
        }
        if self.experiment.mu_samples == 0 {
            violations.push("experiment.mu_samples must be positive".to_string());
        }

        if !(self.concentration.a.abs() > 0.0 && self.concentration.a.abs() < 1.0) {
            violations.push(format!(
                "concentration.a must satisfy 0 < |a| < 1, got {}",
                self.concentration.a
            ));
        }
        if self.concentration.n > MAX_DEPTH {
            violations.push(format!("concentration.n {} exceeds the depth cap", self.concentration.n));
        }
        if self.concentration.replications == 0 {
            violations.push("concentration.replications must be positive".to_string());
        }
        if self.concentration.deltas.is_empty()
            || self.concentration.deltas.windows(2).any(|w| w[0] >= w[1])
            || self.concentration.deltas[0] < 0.0
        {
            violations
                .push("concentration.deltas must be nonnegative and strictly ascending".into());
        }

        if let Err(Error::ConfigViolations(mut v)) = self.rate_config_unchecked().validate() {
            violations.append(&mut v);
        }

        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::ConfigViolations(violations))
        }
    }

    pub fn drift(&self) -> Result<Drift> {
        match self.kernel.drift.as_str() {
            "sinc2pi" => Ok(Drift::Sinc2Pi),
            "sinc2pi_normalized" => Ok(Drift::NormalizedSinc2Pi),
            "linear" => {
                let slope = self.kernel.drift_slope.ok_or_else(|| {
                    Error::Config("kernel.drift = \"linear\" requires kernel.drift_slope".into())
                })?;
                Ok(Drift::Linear { slope })
            }
            other => Err(Error::Config(format!("unknown drift {other:?}"))),
        }
    }

    pub fn kernel_model(&self) -> Result<KernelModel> {
        match self.kernel.kind.as_str() {
            "nbar" => Ok(KernelModel::Nbar(NbarModel::new(
                self.kernel.sigma,
                self.kernel.rho,
                self.drift()?,
            )?)),
            "twopoint" => Ok(KernelModel::TwoPoint(TwoPointModel::new(self.kernel.a)?)),
            other => Err(Error::Config(format!("unknown kernel type {other:?}"))),
        }
    }

    /// The NBAR truth model, required by error metrics and the figures.
    pub fn nbar_model(&self) -> Result<NbarModel> {
        match self.kernel_model()? {
            KernelModel::Nbar(m) => Ok(m),
            KernelModel::TwoPoint(_) => Err(Error::Config(
                "this experiment needs kernel.type = \"nbar\"".into(),
            )),
        }
    }

    pub fn initial_law(&self) -> Result<InitialLaw> {
        match self.sample.initial_law.as_str() {
            "standard_normal" => Ok(InitialLaw::StandardNormal),
            "uniform_sign" => Ok(InitialLaw::UniformSign),
            "point" => Ok(InitialLaw::Point(self.sample.initial_point)),
            other => Err(Error::Config(format!("unknown initial law {other:?}"))),
        }
    }

    fn cv_grid_unchecked(&self) -> CvGrid {
        CvGrid {
            lambdas: self.cv.lambdas.clone(),
            taus: self.cv.taus.clone(),
            folds: self.cv.folds,
            criterion: if self.cv.criterion == "kl" {
                CvCriterion::Kl
            } else {
                CvCriterion::Ise
            },
            ise_variant: if self.cv.ise_score_on == "normalized" {
                IseVariant::Normalized
            } else {
                IseVariant::Raw
            },
            d_max: self.basis.d_max,
        }
    }

    pub fn cv_grid(&self) -> Result<CvGrid> {
        let grid = self.cv_grid_unchecked();
        grid.validate()?;
        Ok(grid)
    }

    pub fn fit_protocol(&self) -> Result<FitProtocol> {
        Ok(FitProtocol {
            kernel: self.kernel_model()?,
            init: self.initial_law()?,
            d_max: self.basis.d_max,
        })
    }

    fn rate_config_unchecked(&self) -> RateStudyConfig {
        RateStudyConfig {
            a_values: self.rate.a_values.clone(),
            generations: self.rate.generations.clone(),
            reps: self.rate.replications,
            sigma: self.kernel.sigma,
            rho: self.kernel.rho,
            x0: self.experiment.slice_x,
            box_lo: self.experiment.box_lo,
            box_hi: self.experiment.box_hi,
            quad_points: self.experiment.quad_points,
            cv: self.cv_grid_unchecked(),
            d_max: self.basis.d_max,
        }
    }

    pub fn rate_config(&self) -> Result<RateStudyConfig> {
        let cfg = self.rate_config_unchecked();
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical serialized form, the input of the config hash.
    pub fn to_canonical_toml(&self) -> String {
        toml::to_string(self).expect("config serialization cannot fail")
    }
}
