//! Ridge-regularized least-squares fit of the transition density.
//!
//! From a generation sample the empirical system is a Gram matrix of basis
//! overlaps averaged over parent states and a moment vector of basis values
//! averaged over triangles. The coefficient vector solves the ridge system,
//! negatives are clipped to zero, and the resulting expansion is evaluated
//! either raw or renormalized so every `x`-slice is a probability density.

use std::fmt::Write as _;

use nalgebra::{Cholesky, DMatrix, DVector};
use rayon::prelude::*;

use crate::basis::GaussianBasis;
use crate::error::{Error, Result};
use crate::tree::Triangle;

/// Renormalization refuses to divide by anything at or below this floor.
pub const EPS_DENOMINATOR: f64 = 1e-300;

/// Columns of the parent-weight design matrix, `W[u, j] = w_j(x_u)`,
/// stored column-major.
fn parent_weight_matrix(basis: &GaussianBasis, parents: &[f64]) -> Vec<f64> {
    let n = parents.len();
    let d = basis.dim();
    let tau2x2 = 2.0 * basis.tau() * basis.tau();
    let centers = basis.centers();
    let mut w = vec![0.0f64; n * d];
    w.par_chunks_mut(n).enumerate().for_each(|(j, col)| {
        let cj = centers[j].parent;
        for (slot, &x) in col.iter_mut().zip(parents) {
            let dx = x - cj;
            *slot = (-(dx * dx) / tau2x2).exp();
        }
    });
    w
}

/// Rows per accumulation block of the Gram product. Keeping blocks short
/// bounds the in-block rounding accumulation; blocks combine with a
/// compensated sum, so the entrywise error stays near one ulp regardless
/// of the sample count. That keeps the assembled matrix numerically PSD
/// even at the widest grid widths, where entries reach pi*tau^2 ~ 3e3.
const GRAM_BLOCK_ROWS: usize = 64;

/// `C = WᵗW` for a column-major `n × d` matrix `W`, returned column-major
/// `d × d`. Blocked over rows with a fixed partition and a fixed-order
/// compensated reduction, so the result is schedule-independent.
fn gram_product(w: &[f64], n: usize, d: usize) -> Vec<f64> {
    let mut sum = vec![0.0f64; d * d];
    if n == 0 || d == 0 {
        return sum;
    }
    let blocks: Vec<(usize, usize)> = (0..n)
        .step_by(GRAM_BLOCK_ROWS)
        .map(|start| (start, (start + GRAM_BLOCK_ROWS).min(n)))
        .collect();
    let partials: Vec<Vec<f64>> = blocks
        .par_iter()
        .map(|&(start, end)| {
            let rows = end - start;
            let mut c = vec![0.0f64; d * d];
            unsafe {
                matrixmultiply::dgemm(
                    d,
                    rows,
                    d,
                    1.0,
                    w.as_ptr().add(start),
                    n as isize,
                    1,
                    w.as_ptr().add(start),
                    1,
                    n as isize,
                    0.0,
                    c.as_mut_ptr(),
                    1,
                    d as isize,
                );
            }
            c
        })
        .collect();
    let mut comp = vec![0.0f64; d * d];
    for block in &partials {
        for ((s, c), &term) in sum.iter_mut().zip(comp.iter_mut()).zip(block) {
            let y = term - *c;
            let t = *s + y;
            *c = (t - *s) - y;
            *s = t;
        }
    }
    sum
}

/// Empirical Gram matrix: entry `(i, j)` is the mean of the closed-form
/// overlap `∫∫ φ_i φ_j (x, ·, ·)` over the parent states.
///
/// The overlap factorizes into a center-distance part and one parent weight
/// per index, so the result is a Hadamard product of a fixed matrix with
/// `WᵗW / N`. The upper triangle is computed once and mirrored, making the
/// output exactly symmetric.
pub fn assemble_gram(basis: &GaussianBasis, parents: &[f64]) -> Result<DMatrix<f64>> {
    if parents.is_empty() {
        return Err(Error::Precondition("cannot assemble a Gram matrix from no parents".into()));
    }
    let d = basis.dim();
    let n = parents.len();
    let tau = basis.tau();
    let tau2x4 = 4.0 * tau * tau;
    let scale = std::f64::consts::PI * tau * tau / n as f64;
    let centers = basis.centers();

    let w = parent_weight_matrix(basis, parents);
    let c = gram_product(&w, n, d);

    let mut h = DMatrix::<f64>::zeros(d, d);
    for j in 0..d {
        for i in 0..=j {
            let d0 = centers[i].child0 - centers[j].child0;
            let d1 = centers[i].child1 - centers[j].child1;
            let apart = (-(d0 * d0 + d1 * d1) / tau2x4).exp();
            let v = scale * apart * c[i + j * d];
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    Ok(h)
}

/// Empirical moment vector: entry `i` is the mean of `φ_i` over the triangles.
pub fn assemble_moments(basis: &GaussianBasis, triangles: &[Triangle]) -> Result<DVector<f64>> {
    if triangles.is_empty() {
        return Err(Error::Precondition("cannot assemble moments from no triangles".into()));
    }
    let d = basis.dim();
    let inv_n = 1.0 / triangles.len() as f64;
    let mut out = vec![0.0f64; d];
    out.par_iter_mut().enumerate().for_each(|(i, slot)| {
        let mut acc = 0.0;
        for t in triangles {
            acc += basis.eval(i, t.parent, t.child0, t.child1);
        }
        *slot = acc * inv_n;
    });
    Ok(DVector::from_vec(out))
}

/// The assembled empirical quadratic problem.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSystem {
    pub gram: DMatrix<f64>,
    pub moments: DVector<f64>,
    pub n_samples: usize,
}

impl EmpiricalSystem {
    pub fn assemble(basis: &GaussianBasis, triangles: &[Triangle]) -> Result<EmpiricalSystem> {
        let parents: Vec<f64> = triangles.iter().map(|t| t.parent).collect();
        Ok(EmpiricalSystem {
            gram: assemble_gram(basis, &parents)?,
            moments: assemble_moments(basis, triangles)?,
            n_samples: triangles.len(),
        })
    }

    /// The empirical objective `½ βᵗGβ - βᵗm`.
    pub fn objective(&self, beta: &DVector<f64>) -> f64 {
        0.5 * (beta.transpose() * &self.gram * beta)[(0, 0)] - beta.dot(&self.moments)
    }
}

/// Solves `(G + λI) β = m` by Cholesky factorization with one step of
/// iterative refinement; falls back to an SVD least-squares solve if the
/// factorization fails (possible only when λ is extremely small relative
/// to accumulated rounding in `G`).
pub fn ridge_solve(gram: &DMatrix<f64>, moments: &DVector<f64>, lambda: f64) -> Result<DVector<f64>> {
    if !(lambda > 0.0) {
        return Err(Error::Precondition(format!("lambda must be positive, got {lambda}")));
    }
    let d = gram.nrows();
    if gram.ncols() != d || moments.len() != d {
        return Err(Error::Precondition(format!(
            "shape mismatch: gram {}x{}, moments {}",
            gram.nrows(),
            gram.ncols(),
            moments.len()
        )));
    }
    let mut m = gram.clone();
    for i in 0..d {
        m[(i, i)] += lambda;
    }
    match Cholesky::new(m.clone()) {
        Some(chol) => {
            let mut beta = chol.solve(moments);
            let residual = moments - &m * &beta;
            beta += chol.solve(&residual);
            Ok(beta)
        }
        None => {
            let svd = m.svd(true, true);
            svd.solve(moments, 1e-14)
                .map_err(|e| Error::Numeric(format!("ridge fallback solve failed: {e}")))
        }
    }
}

/// Componentwise `max(0, ·)`.
pub fn clip_nonneg(beta_tilde: &DVector<f64>) -> DVector<f64> {
    beta_tilde.map(|v| v.max(0.0))
}

/// A fitted density expansion: clipped coefficients over a basis, plus the
/// pre-clip solution kept for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityFit {
    basis: GaussianBasis,
    lambda: f64,
    beta: DVector<f64>,
    beta_tilde: DVector<f64>,
}

impl DensityFit {
    pub fn new(basis: GaussianBasis, lambda: f64, beta_tilde: DVector<f64>) -> Result<DensityFit> {
        if !(lambda > 0.0) {
            return Err(Error::Precondition(format!("lambda must be positive, got {lambda}")));
        }
        if beta_tilde.len() != basis.dim() {
            return Err(Error::Precondition(format!(
                "coefficient length {} does not match basis dimension {}",
                beta_tilde.len(),
                basis.dim()
            )));
        }
        let beta = clip_nonneg(&beta_tilde);
        Ok(DensityFit { basis, lambda, beta, beta_tilde })
    }

    pub fn basis(&self) -> &GaussianBasis {
        &self.basis
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Clipped coefficients; nonnegative componentwise.
    pub fn beta(&self) -> &DVector<f64> {
        &self.beta
    }

    /// Pre-clip ridge solution.
    pub fn beta_tilde(&self) -> &DVector<f64> {
        &self.beta_tilde
    }

    /// The raw expansion `Σ β_i φ_i(x, y, z)`; nonnegative everywhere.
    pub fn eval_raw(&self, x: f64, y: f64, z: f64) -> f64 {
        let mut acc = 0.0;
        for (i, &b) in self.beta.iter().enumerate() {
            if b > 0.0 {
                acc += b * self.basis.eval(i, x, y, z);
            }
        }
        acc
    }

    /// The slice mass `∫∫ Σ β_i φ_i (x, y, z) dy dz = Σ β_i · 2π tau² w_i(x)`.
    pub fn normalizer(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (i, &b) in self.beta.iter().enumerate() {
            if b > 0.0 {
                acc += b * self.basis.parent_weight(i, x);
            }
        }
        2.0 * std::f64::consts::PI * self.basis.tau() * self.basis.tau() * acc
    }

    /// The renormalized estimator: for fixed `x`, a probability density in
    /// `(y, z)` by construction. Errors when the slice carries no mass.
    pub fn eval_normalized(&self, x: f64, y: f64, z: f64) -> Result<f64> {
        let den = self.normalizer(x);
        if !(den > EPS_DENOMINATOR) {
            return Err(Error::UnsupportedSlice { x, normalizer: den });
        }
        Ok(self.eval_raw(x, y, z) / den)
    }

    /// CSV with one line per basis element (`j,c,c0,c1,beta`) preceded by a
    /// commented header recording `tau`, `lambda`, `d`, `n`, `seed`.
    pub fn to_csv(&self, n: u32, seed: u64) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# tau={}", self.basis.tau());
        let _ = writeln!(out, "# lambda={}", self.lambda);
        let _ = writeln!(out, "# d={}", self.basis.dim());
        let _ = writeln!(out, "# n={n}");
        let _ = writeln!(out, "# seed={seed}");
        out.push_str("j,c,c0,c1,beta\n");
        for (j, c) in self.basis.centers().iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                j + 1,
                c.parent,
                c.child0,
                c.child1,
                self.beta[j]
            );
        }
        out
    }
}

/// Full pipeline: assemble the system from triangles, solve the ridge
/// problem, clip.
pub fn fit(triangles: &[Triangle], basis: GaussianBasis, lambda: f64) -> Result<DensityFit> {
    let system = EmpiricalSystem::assemble(&basis, triangles)?;
    let beta_tilde = ridge_solve(&system.gram, &system.moments, lambda)?;
    DensityFit::new(basis, lambda, beta_tilde)
}
