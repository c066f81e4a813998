//! Error metrics between the fitted and true transition densities.
//!
//! All integrals over the child coordinates use tensor Gauss–Legendre
//! rules; the `x`-average is Monte Carlo over draws from the invariant
//! law, obtained by running the tagged chain with burn-in and thinning.

use crate::error::{Error, Result};
use crate::estimator::DensityFit;
use crate::kernels::{tagged_chain, InitialLaw, KernelModel, NbarModel};
use crate::quadrature::QuadratureGrid;
use crate::selection::EPS_LOG;

/// Approximate draws from the invariant law of the tagged chain.
///
/// Runs one path of length `burn_in + count·thinning` and keeps every
/// `thinning`-th state after the burn-in.
pub fn mu_samples(
    kernel: &KernelModel,
    init: &InitialLaw,
    count: usize,
    burn_in: usize,
    thinning: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if count == 0 || thinning == 0 {
        return Err(Error::Precondition(
            "mu sampler needs positive count and thinning".into(),
        ));
    }
    let steps = burn_in + count * thinning;
    let path = tagged_chain(kernel, init, steps, seed)?;
    Ok((1..=count)
        .map(|i| path.states[burn_in + i * thinning])
        .collect())
}

/// `∫∫ (est - truth)²(x0, y, z) dy dz` for an arbitrary slice function.
pub fn slice_squared_error_of(
    est_slice: impl Fn(f64, f64) -> f64,
    truth: &NbarModel,
    x0: f64,
    grid: &QuadratureGrid,
) -> f64 {
    grid.integrate(|y, z| {
        let diff = est_slice(y, z) - truth.density(x0, y, z);
        diff * diff
    })
}

/// Squared L² error of the renormalized estimator against the truth on the
/// slice through `x0`.
pub fn slice_squared_error(
    fit: &DensityFit,
    truth: &NbarModel,
    x0: f64,
    grid: &QuadratureGrid,
) -> Result<f64> {
    let den = fit.normalizer(x0);
    if !(den > crate::estimator::EPS_DENOMINATOR) {
        return Err(Error::UnsupportedSlice { x: x0, normalizer: den });
    }
    Ok(slice_squared_error_of(
        |y, z| fit.eval_raw(x0, y, z) / den,
        truth,
        x0,
        grid,
    ))
}

/// Monte Carlo integrated squared error
/// `½ · mean_{x ~ mu} ∫∫ (P̂ - P)²(x, y, z) dy dz`, with its standard error.
pub fn mc_ise_with_se(
    fit: &DensityFit,
    truth: &NbarModel,
    mu: &[f64],
    grid: &QuadratureGrid,
) -> Result<(f64, f64)> {
    if mu.is_empty() {
        return Err(Error::Precondition("mu sample is empty".into()));
    }
    let mut inner = Vec::with_capacity(mu.len());
    for &x in mu {
        inner.push(slice_squared_error(fit, truth, x, grid)?);
    }
    let n = inner.len() as f64;
    let mean = inner.iter().sum::<f64>() / n;
    let var = inner.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok((0.5 * mean, 0.5 * (var / n).sqrt()))
}

/// Monte Carlo integrated squared error (point estimate only).
pub fn mc_ise(
    fit: &DensityFit,
    truth: &NbarModel,
    mu: &[f64],
    grid: &QuadratureGrid,
) -> Result<f64> {
    mc_ise_with_se(fit, truth, mu, grid).map(|(v, _)| v)
}

/// Monte Carlo Kullback-Leibler divergence
/// `mean_{x ~ mu} ∫∫ P(x,y,z) · log(P(x,y,z) / P̂(x,y,z)) dy dz`,
/// with the estimator floored at the log-loss epsilon inside the logarithm.
pub fn mc_kl(
    fit: &DensityFit,
    truth: &NbarModel,
    mu: &[f64],
    grid: &QuadratureGrid,
) -> Result<f64> {
    if mu.is_empty() {
        return Err(Error::Precondition("mu sample is empty".into()));
    }
    let mut acc = 0.0;
    for &x in mu {
        let den = fit.normalizer(x);
        if !(den > crate::estimator::EPS_DENOMINATOR) {
            return Err(Error::UnsupportedSlice { x, normalizer: den });
        }
        acc += grid.integrate(|y, z| {
            let p = truth.density(x, y, z);
            if p <= 0.0 {
                return 0.0;
            }
            let est = (fit.eval_raw(x, y, z) / den).max(EPS_LOG);
            p * (p.ln() - est.ln())
        });
    }
    Ok(acc / mu.len() as f64)
}
