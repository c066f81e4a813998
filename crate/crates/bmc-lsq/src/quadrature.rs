//! Gauss–Legendre quadrature, one-dimensional and tensorized over a box.

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on the Legendre polynomial,
    /// starting from the Chebyshev-like initial guesses.
    pub fn new(n: usize) -> GaussLegendre {
        assert!(n >= 1, "quadrature rule needs at least one point");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    let (p2, d2) = legendre_with_derivative(n, x);
                    dp = d2;
                    x -= p2 / d2;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped affinely to `[lo, hi]`.
    pub fn mapped(&self, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let nodes = self.nodes.iter().map(|&t| mid + half * t).collect();
        let weights = self.weights.iter().map(|&w| w * half).collect();
        (nodes, weights)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// One axis of an integration box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Axis> {
        if !(lo < hi) {
            return Err(Error::Precondition(format!(
                "axis bounds must satisfy lo < hi, got [{lo}, {hi}]"
            )));
        }
        if points < 16 {
            return Err(Error::Precondition(format!(
                "axis needs at least 16 quadrature points, got {points}"
            )));
        }
        Ok(Axis { lo, hi, points })
    }
}

/// Tensor Gauss–Legendre rule over a rectangle in the `(y, z)` plane.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    pub y: Axis,
    pub z: Axis,
}

impl QuadratureGrid {
    pub fn new(y: Axis, z: Axis) -> QuadratureGrid {
        QuadratureGrid { y, z }
    }

    /// A square box `[lo, hi]^2` with the same point count on both axes.
    pub fn square(lo: f64, hi: f64, points: usize) -> Result<QuadratureGrid> {
        let axis = Axis::new(lo, hi, points)?;
        Ok(QuadratureGrid { y: axis, z: axis })
    }

    /// Integral of `f` over the box.
    pub fn integrate(&self, mut f: impl FnMut(f64, f64) -> f64) -> f64 {
        let (ys, wy) = GaussLegendre::new(self.y.points).mapped(self.y.lo, self.y.hi);
        let (zs, wz) = GaussLegendre::new(self.z.points).mapped(self.z.lo, self.z.hi);
        let mut total = 0.0;
        for (y, wy) in ys.iter().zip(&wy) {
            let mut row = 0.0;
            for (z, wz) in zs.iter().zip(&wz) {
                row += wz * f(*y, *z);
            }
            total += wy * row;
        }
        total
    }

    /// The same rule with both axes' point counts doubled, for refinement checks.
    pub fn refined(&self) -> QuadratureGrid {
        QuadratureGrid {
            y: Axis { points: 2 * self.y.points, ..self.y },
            z: Axis { points: 2 * self.z.points, ..self.z },
        }
    }
}

/// One-dimensional Gauss–Legendre integral of `f` over `[lo, hi]`.
pub fn integrate_1d(lo: f64, hi: f64, points: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let (xs, ws) = GaussLegendre::new(points).mapped(lo, hi);
    xs.iter().zip(&ws).map(|(x, w)| w * f(*x)).sum()
}
