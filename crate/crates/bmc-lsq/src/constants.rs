//! Evaluable ergodicity-dependent constants and the Bernstein-type tail bound.
//!
//! Every piecewise formula is branch-split on the geometric ergodicity rate
//! `alpha`: the regimes meet at `2·alpha = 1` (where the convergence-rate
//! phase transition sits) and at `2·alpha = √2`. Branch predicates follow
//! the closed/open conventions of the defining indicators; the `2α = √2`
//! boundary is detected with absolute tolerance 1e-12.

use crate::error::{Error, Result};

const SQRT2_TOL: f64 = 1e-12;

fn one_or_r_squared(r: f64) -> f64 {
    1.0f64.max(r * r)
}

fn is_sqrt2_boundary(alpha: f64) -> bool {
    (2.0 * alpha - std::f64::consts::SQRT_2).abs() <= SQRT2_TOL
}

/// The base variance constant `c_alpha`, piecewise in the position of
/// `2·alpha` relative to `√2`.
pub fn c_alpha(alpha: f64, r: f64) -> f64 {
    let big_r = one_or_r_squared(r);
    if is_sqrt2_boundary(alpha) {
        16.0 * big_r
    } else if 2.0 * alpha < std::f64::consts::SQRT_2 {
        4.0 * big_r / (2.0 * alpha * alpha * (1.0 - 2.0 * alpha * alpha))
    } else {
        8.0 * big_r / (2.0 * alpha * alpha - 1.0)
    }
}

/// Variance-scale constant `c1 = c_alpha · sup|Qg²| · branch(n)`.
pub fn c1(alpha: f64, r: f64, n: u32, sup_qg2: f64) -> f64 {
    let branch = if is_sqrt2_boundary(alpha) {
        n as f64
    } else if 2.0 * alpha < std::f64::consts::SQRT_2 {
        1.0
    } else {
        (2.0 * alpha * alpha).powi(n as i32)
    };
    c_alpha(alpha, r) * sup_qg2 * branch
}

/// Linear-term constant `c2`, switching at `2·alpha = 1` (closed on the left).
pub fn c2(alpha: f64, r: f64, sup_gtilde: f64, sup_qg: f64) -> f64 {
    if 2.0 * alpha <= 1.0 {
        (4.0 / 3.0) * (1.0 + r * alpha) * sup_gtilde
    } else {
        (2.0 / 3.0) * (1.0 / alpha) * r * (1.0 + alpha) * sup_qg
    }
}

/// Deviation scale `v_n`: `2^{-n/2}` below the transition, `(2α²)^{n/2}` above.
pub fn v_n(alpha: f64, n: u32) -> f64 {
    if 2.0 * alpha <= 1.0 {
        (2.0f64).powf(-(n as f64) / 2.0)
    } else {
        (2.0 * alpha * alpha).powf(n as f64 / 2.0)
    }
}

/// Chaining scale `kappa_n`: constant below the transition, `(2α)^{n/2}` above.
pub fn kappa_n(alpha: f64, n: u32) -> f64 {
    if 2.0 * alpha <= 1.0 {
        1.0
    } else {
        (2.0 * alpha).powf(n as f64 / 2.0)
    }
}

/// Rate exponent `e(alpha) ∈ (0, 1]`: 1 below the transition, `log(1/α)/log 2` above.
pub fn e_alpha(alpha: f64) -> f64 {
    if 2.0 * alpha <= 1.0 {
        1.0
    } else {
        (1.0 / alpha).ln() / std::f64::consts::LN_2
    }
}

/// Localization radius `delta_n = |G_n|^{-e(alpha)/(2+gamma)}`.
pub fn delta_n(alpha: f64, gamma: f64, n: u32) -> f64 {
    (2.0f64).powf(-(n as f64) * e_alpha(alpha) / (2.0 + gamma))
}

/// Right-hand side of the Bernstein-type deviation bound:
/// `C · exp(-δ² / (2·(c2·v_n·δ + c1)))`.
pub fn bernstein_bound(delta: f64, c1v: f64, c2v: f64, vnv: f64, big_c: f64) -> f64 {
    big_c * (-(delta * delta) / (2.0 * (c2v * vnv * delta + c1v))).exp()
}

/// Geometric-ergodicity profile `(alpha, R)` plus the generation and the
/// bracketing-entropy exponent used by the localization radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErgodicityProfile {
    pub alpha: f64,
    pub r: f64,
    pub n: u32,
    pub gamma: f64,
}

impl ErgodicityProfile {
    pub fn new(alpha: f64, r: f64, n: u32, gamma: f64) -> Result<ErgodicityProfile> {
        let mut violations = Vec::new();
        if !(alpha > 0.0 && alpha < 1.0) {
            violations.push(format!("alpha must lie in (0, 1), got {alpha}"));
        }
        if !(r > 0.0) || !r.is_finite() {
            violations.push(format!("R must be positive, got {r}"));
        }
        if !(gamma > 0.0 && gamma < 2.0) {
            violations.push(format!("gamma must lie in (0, 2), got {gamma}"));
        }
        if violations.is_empty() {
            Ok(ErgodicityProfile { alpha, r, n, gamma })
        } else {
            Err(Error::ConfigViolations(violations))
        }
    }

    pub fn c_alpha(&self) -> f64 {
        c_alpha(self.alpha, self.r)
    }

    pub fn c1(&self, sup_qg2: f64) -> f64 {
        c1(self.alpha, self.r, self.n, sup_qg2)
    }

    pub fn c2(&self, sup_gtilde: f64, sup_qg: f64) -> f64 {
        c2(self.alpha, self.r, sup_gtilde, sup_qg)
    }

    pub fn v_n(&self) -> f64 {
        v_n(self.alpha, self.n)
    }

    pub fn kappa_n(&self) -> f64 {
        kappa_n(self.alpha, self.n)
    }

    pub fn e_alpha(&self) -> f64 {
        e_alpha(self.alpha)
    }

    pub fn delta_n(&self) -> f64 {
        delta_n(self.alpha, self.gamma, self.n)
    }

    /// All derived constants, evaluated at unit function bounds for `c1`/`c2`.
    pub fn table(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("c_alpha", self.c_alpha()),
            ("c1", self.c1(1.0)),
            ("c2", self.c2(1.0, 1.0)),
            ("v_n", self.v_n()),
            ("kappa_n", self.kappa_n()),
            ("e_alpha", self.e_alpha()),
            ("delta_n", self.delta_n()),
        ]
    }
}

/// Supremum norms of a test function through the tagged kernel, used to
/// instantiate `c1` and `c2` for a concrete chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionBounds {
    pub sup_qg2: f64,
    pub sup_qg: f64,
    pub sup_gtilde: f64,
}

/// Exact bounds for a function on the two-point state space `{-1, +1}`,
/// computed by enumeration. The invariant law is uniform by symmetry.
pub fn two_point_bounds(a: f64, g: impl Fn(f64) -> f64) -> FunctionBounds {
    let q = |h: &dyn Fn(f64) -> f64, x: f64| {
        0.5 * (1.0 + a) * h(x) + 0.5 * (1.0 - a) * h(-x)
    };
    let g2 = |x: f64| g(x) * g(x);
    let mean = 0.5 * (g(1.0) + g(-1.0));
    let states = [-1.0, 1.0];
    let sup = |f: &dyn Fn(f64) -> f64| states.iter().map(|&x| f(x).abs()).fold(0.0, f64::max);
    FunctionBounds {
        sup_qg2: sup(&|x| q(&g2, x)),
        sup_qg: sup(&|x| q(&g, x)),
        sup_gtilde: sup(&|x| g(x) - mean),
    }
}
