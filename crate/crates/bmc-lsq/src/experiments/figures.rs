//! Data emitters behind the four figures of the numerical study: estimator
//! slice curves, point boxplots versus generation, the density surface, and
//! slice-error boxplots versus generation.
//!
//! Replications run in parallel with per-replication derived streams and are
//! collected by index, so every table is reproducible from the master seed.

use rayon::prelude::*;

use crate::error::Result;
use crate::estimator::DensityFit;
use crate::experiments::metrics::slice_squared_error;
use crate::experiments::stats::five_number_summary;
use crate::experiments::FitProtocol;
use crate::kernels::NbarModel;
use crate::quadrature::QuadratureGrid;
use crate::selection::CvGrid;

/// Inclusive evenly spaced grid.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2, "linspace needs at least two points");
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|i| lo + step * i as f64).collect()
}

/// Values of the renormalized estimator along `z ↦ P̂(x0, y0, z)`, with the
/// truth curve alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceCurve {
    pub z: Vec<f64>,
    pub estimate: Vec<f64>,
    pub truth: Vec<f64>,
}

pub fn figure_slice(
    fit: &DensityFit,
    truth: &NbarModel,
    x0: f64,
    y0: f64,
    z_grid: &[f64],
) -> Result<SliceCurve> {
    let mut estimate = Vec::with_capacity(z_grid.len());
    for &z in z_grid {
        estimate.push(fit.eval_normalized(x0, y0, z)?);
    }
    let truth_curve = z_grid.iter().map(|&z| truth.density(x0, y0, z)).collect();
    Ok(SliceCurve { z: z_grid.to_vec(), estimate, truth: truth_curve })
}

/// How each replication obtains its `(lambda, tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParameterMode {
    /// One cross-validation on a calibration sample per generation; every
    /// replication reuses the selected cell.
    ReuseSelected,
    /// A full cross-validation inside every replication.
    ReselectPerReplication,
}

fn replication_fit(
    protocol: &FitProtocol,
    cv: &CvGrid,
    mode: ParameterMode,
    selected: (f64, f64),
    n: u32,
    master: u64,
    rep: u64,
) -> Result<(DensityFit, (f64, f64))> {
    match mode {
        ParameterMode::ReuseSelected => {
            let f = protocol.fit_replication(n, selected.0, selected.1, master, rep)?;
            Ok((f, selected))
        }
        ParameterMode::ReselectPerReplication => {
            protocol.fit_replication_with_cv(n, cv, master, rep)
        }
    }
}

/// Replicated estimator curves at one generation (the first figure).
#[derive(Debug, Clone, PartialEq)]
pub struct CurvesData {
    pub z: Vec<f64>,
    pub truth: Vec<f64>,
    /// One curve per replication, indexed by replication id.
    pub curves: Vec<Vec<f64>>,
    pub selected: (f64, f64),
}

#[allow(clippy::too_many_arguments)]
pub fn figure_estimator_curves(
    protocol: &FitProtocol,
    truth: &NbarModel,
    cv: &CvGrid,
    mode: ParameterMode,
    n: u32,
    reps: usize,
    x0: f64,
    y0: f64,
    z_grid: &[f64],
    master: u64,
) -> Result<CurvesData> {
    let selected = protocol.select_parameters(n, cv, master)?;
    let curves: Vec<Result<Vec<f64>>> = (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let (fit, _) = replication_fit(protocol, cv, mode, selected, n, master, rep)?;
            let curve = figure_slice(&fit, truth, x0, y0, z_grid)?;
            Ok(curve.estimate)
        })
        .collect();
    let curves = curves.into_iter().collect::<Result<Vec<_>>>()?;
    let truth_curve = z_grid.iter().map(|&z| truth.density(x0, y0, z)).collect();
    Ok(CurvesData { z: z_grid.to_vec(), truth: truth_curve, curves, selected })
}

/// One replication's scalar outcome in a per-generation study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupRow {
    pub generation: u32,
    pub rep: usize,
    pub value: f64,
}

/// Five-number summary of one generation's replications.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupSummary {
    pub generation: u32,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

fn summarize(generation: u32, values: &[f64]) -> GroupSummary {
    let (min, q1, median, q3, max) = five_number_summary(values);
    GroupSummary { generation, min, q1, median, q3, max }
}

/// Boxplot-style data for a scalar statistic versus generation.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationStudy {
    pub rows: Vec<GroupRow>,
    pub summaries: Vec<GroupSummary>,
    /// The `(lambda, tau)` used per generation.
    pub selected: Vec<(u32, f64, f64)>,
}

fn generation_study(
    protocol: &FitProtocol,
    cv: &CvGrid,
    mode: ParameterMode,
    generations: &[u32],
    reps: usize,
    master: u64,
    statistic: impl Fn(&DensityFit) -> Result<f64> + Sync,
) -> Result<GenerationStudy> {
    let mut rows = Vec::with_capacity(generations.len() * reps);
    let mut summaries = Vec::with_capacity(generations.len());
    let mut selected = Vec::with_capacity(generations.len());
    for &n in generations {
        let cell = protocol.select_parameters(n, cv, master)?;
        selected.push((n, cell.0, cell.1));
        let values: Vec<Result<f64>> = (0..reps as u64)
            .into_par_iter()
            .map(|rep| {
                let (fit, _) = replication_fit(protocol, cv, mode, cell, n, master, rep)?;
                statistic(&fit)
            })
            .collect();
        let values = values.into_iter().collect::<Result<Vec<f64>>>()?;
        for (rep, &value) in values.iter().enumerate() {
            rows.push(GroupRow { generation: n, rep, value });
        }
        summaries.push(summarize(n, &values));
    }
    Ok(GenerationStudy { rows, summaries, selected })
}

/// Fitted value of `P̂` at one probe point across generations and
/// replications (the second figure).
#[allow(clippy::too_many_arguments)]
pub fn figure_point_boxplot(
    protocol: &FitProtocol,
    cv: &CvGrid,
    mode: ParameterMode,
    generations: &[u32],
    reps: usize,
    point: (f64, f64, f64),
    master: u64,
) -> Result<GenerationStudy> {
    generation_study(protocol, cv, mode, generations, reps, master, |fit| {
        fit.eval_normalized(point.0, point.1, point.2)
    })
}

/// Truth and estimator surfaces over a square grid at fixed `x0` (the third
/// figure). Values are stored row-major: `truth[i][j]` is at `(y[i], z[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceData {
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub truth: Vec<Vec<f64>>,
    pub estimate: Vec<Vec<f64>>,
    pub selected: (f64, f64),
}

pub fn figure_surface(
    protocol: &FitProtocol,
    truth: &NbarModel,
    cv: &CvGrid,
    n: u32,
    x0: f64,
    box_lo: f64,
    box_hi: f64,
    points: usize,
    master: u64,
) -> Result<SurfaceData> {
    let selected = protocol.select_parameters(n, cv, master)?;
    let fit = protocol.fit_replication(n, selected.0, selected.1, master, 0)?;
    let ys = linspace(box_lo, box_hi, points);
    let zs = ys.clone();
    let mut truth_rows = Vec::with_capacity(points);
    let mut est_rows = Vec::with_capacity(points);
    for &y in &ys {
        let mut t_row = Vec::with_capacity(points);
        let mut e_row = Vec::with_capacity(points);
        for &z in &zs {
            t_row.push(truth.density(x0, y, z));
            e_row.push(fit.eval_normalized(x0, y, z)?);
        }
        truth_rows.push(t_row);
        est_rows.push(e_row);
    }
    Ok(SurfaceData { y: ys, z: zs, truth: truth_rows, estimate: est_rows, selected })
}

/// Squared slice error at `x0` across generations and replications (the
/// fourth figure).
#[allow(clippy::too_many_arguments)]
pub fn figure_error_boxplot(
    protocol: &FitProtocol,
    truth: &NbarModel,
    cv: &CvGrid,
    mode: ParameterMode,
    generations: &[u32],
    reps: usize,
    x0: f64,
    grid: &QuadratureGrid,
    master: u64,
) -> Result<GenerationStudy> {
    generation_study(protocol, cv, mode, generations, reps, master, |fit| {
        slice_squared_error(fit, truth, x0, grid)
    })
}
