//! Simulatable and evaluable branching-chain transition kernels.
//!
//! A kernel maps a parent state to the joint law of its two children. Two
//! concrete models are provided: the nonlinear bifurcating autoregression
//! (drift plus correlated bivariate Gaussian noise), and a two-point chain
//! on `{-1, +1}` whose ergodicity constants are known exactly. Following a
//! uniformly random lineage through either kernel yields the tagged chain,
//! an ordinary Markov chain whose invariant law weights all error metrics.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::{node_stream, root_stream, stream};
use crate::tree::{generation_size, node_count, TreeSample, MAX_DEPTH};

/// `sin(2πx) / (2πx)`, with the removable singularity filled in at zero.
pub fn sinc_drift(x: f64) -> f64 {
    let t = 2.0 * std::f64::consts::PI * x;
    if t.abs() < 1e-8 {
        // Series around 0: 1 - t²/6 + O(t⁴); the t⁴ term is below f64 precision here.
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

/// Density at `(e0, e1)` of a centered bivariate Gaussian with common
/// standard deviation `sigma` and correlation `rho`.
pub fn biv_gauss_density(e0: f64, e1: f64, sigma: f64, rho: f64) -> f64 {
    debug_assert!(sigma > 0.0 && rho.abs() < 1.0);
    let s2 = sigma * sigma;
    let omr2 = 1.0 - rho * rho;
    let norm = 1.0 / (2.0 * std::f64::consts::PI * s2 * omr2.sqrt());
    // Grouped so the expression is exactly symmetric under e0 <-> e1.
    let quad = ((e0 * e0 + e1 * e1) - 2.0 * rho * (e0 * e1)) / (2.0 * s2 * omr2);
    norm * (-quad).exp()
}

/// The parent-to-children drift used by [`NbarModel`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drift {
    /// `sin(2πx)/(2πx)` — the unnormalized sinc applied at `2πx`.
    Sinc2Pi,
    /// Normalized sinc applied at `2πx`: `sin(2π²x)/(2π²x)`.
    NormalizedSinc2Pi,
    /// `x ↦ slope·x`; the tagged chain then contracts at rate `|slope|`.
    Linear { slope: f64 },
}

impl Drift {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Drift::Sinc2Pi => sinc_drift(x),
            Drift::NormalizedSinc2Pi => sinc_drift(std::f64::consts::PI * x),
            Drift::Linear { slope } => slope * x,
        }
    }

    /// Identifier used in configuration files and output metadata.
    pub fn id(&self) -> String {
        match *self {
            Drift::Sinc2Pi => "sinc2pi".to_string(),
            Drift::NormalizedSinc2Pi => "sinc2pi_normalized".to_string(),
            Drift::Linear { slope } => format!("linear:{slope}"),
        }
    }
}

/// Bifurcating autoregression: children are `(f(x) + ε0, f(x) + ε1)` with
/// `(ε0, ε1)` centered bivariate Gaussian, common variance `sigma²` and
/// correlation `rho`. Both children share the same drift `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct NbarModel {
    sigma: f64,
    rho: f64,
    drift: Drift,
}

impl NbarModel {
    pub fn new(sigma: f64, rho: f64, drift: Drift) -> Result<NbarModel> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Config(format!("sigma must be positive, got {sigma}")));
        }
        if !(rho.abs() < 1.0) {
            return Err(Error::Config(format!("rho must lie in (-1, 1), got {rho}")));
        }
        if let Drift::Linear { slope } = drift {
            if !(slope.abs() < 1.0) {
                return Err(Error::Config(format!(
                    "linear drift slope must lie in (-1, 1) for ergodicity, got {slope}"
                )));
            }
        }
        Ok(NbarModel { sigma, rho, drift })
    }

    /// The paper-scale model: unit noise, correlation 0.3, sinc drift.
    pub fn paper_default() -> NbarModel {
        NbarModel::new(1.0, 0.3, Drift::Sinc2Pi).expect("valid defaults")
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn drift(&self) -> Drift {
        self.drift
    }

    /// Transition density `(y, z) ↦ g(y - f(x), z - f(x))`.
    pub fn density(&self, x: f64, y: f64, z: f64) -> f64 {
        let fx = self.drift.eval(x);
        biv_gauss_density(y - fx, z - fx, self.sigma, self.rho)
    }

    /// Draws one children pair given the parent state `x`.
    pub fn step(&self, x: f64, rng: &mut ChaCha8Rng) -> (f64, f64) {
        let fx = self.drift.eval(x);
        let z0: f64 = StandardNormal.sample(rng);
        let z1: f64 = StandardNormal.sample(rng);
        let e0 = self.sigma * z0;
        let e1 = self.sigma * (self.rho * z0 + (1.0 - self.rho * self.rho).sqrt() * z1);
        (fx + e0, fx + e1)
    }
}

/// Two-point chain on `{-1, +1}`: each child independently keeps the parent
/// sign with probability `(1 + a)/2`. The tagged chain has the identity as
/// an exact eigenfunction with eigenvalue `a`, so the geometric ergodicity
/// constants are `alpha = |a|`, `R = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPointModel {
    a: f64,
}

impl TwoPointModel {
    pub fn new(a: f64) -> Result<TwoPointModel> {
        if !(a.abs() < 1.0) {
            return Err(Error::Config(format!(
                "two-point correlation must lie in (-1, 1), got {a}"
            )));
        }
        Ok(TwoPointModel { a })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Draws the two children of state `x ∈ {-1, +1}`.
    pub fn step(&self, x: f64, rng: &mut ChaCha8Rng) -> Result<(f64, f64)> {
        if x != 1.0 && x != -1.0 {
            return Err(Error::Domain(format!(
                "two-point state must be -1 or +1, got {x}"
            )));
        }
        let keep = 0.5 * (1.0 + self.a);
        let c0 = if rng.random::<f64>() < keep { x } else { -x };
        let c1 = if rng.random::<f64>() < keep { x } else { -x };
        Ok((c0, c1))
    }
}

/// Closed set of kernels selectable from configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelModel {
    Nbar(NbarModel),
    TwoPoint(TwoPointModel),
}

impl KernelModel {
    pub fn step(&self, x: f64, rng: &mut ChaCha8Rng) -> Result<(f64, f64)> {
        match self {
            KernelModel::Nbar(m) => Ok(m.step(x, rng)),
            KernelModel::TwoPoint(m) => m.step(x, rng),
        }
    }

    /// Lebesgue transition density, where one exists (the two-point chain
    /// is discrete and has none).
    pub fn density(&self, x: f64, y: f64, z: f64) -> Option<f64> {
        match self {
            KernelModel::Nbar(m) => Some(m.density(x, y, z)),
            KernelModel::TwoPoint(_) => None,
        }
    }
}

/// Law of the root state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialLaw {
    StandardNormal,
    /// Uniform on `{-1, +1}`; the invariant law of the two-point chain.
    UniformSign,
    Point(f64),
}

impl InitialLaw {
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            InitialLaw::StandardNormal => StandardNormal.sample(rng),
            InitialLaw::UniformSign => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            InitialLaw::Point(v) => v,
        }
    }
}

/// Simulates a full tree down to `depth`.
///
/// The root is drawn from `init`; the children pair of node `(m, k)` is
/// drawn from the kernel using the stream keyed by `(seed, m, k)`. Because
/// every node has its own stream, the result is independent of evaluation
/// order: any scheduler producing the same `(seed, depth)` produces the
/// same sample, bit for bit.
pub fn simulate_tree(
    kernel: &KernelModel,
    init: &InitialLaw,
    depth: u32,
    seed: u64,
) -> Result<TreeSample> {
    if depth > MAX_DEPTH {
        return Err(Error::Config(format!(
            "tree depth {depth} exceeds the cap of {MAX_DEPTH}"
        )));
    }
    let mut values = vec![0.0f64; node_count(depth)];
    values[0] = init.sample(&mut root_stream(seed));
    for m in 0..depth {
        let gen_start = ((1u64 << m) - 1) as usize;
        let child_start = ((1u64 << (m + 1)) - 1) as usize;
        for k in 0..generation_size(m) as usize {
            let x = values[gen_start + k];
            let (c0, c1) = kernel.step(x, &mut node_stream(seed, m, k as u64))?;
            values[child_start + 2 * k] = c0;
            values[child_start + 2 * k + 1] = c1;
        }
    }
    TreeSample::from_values(depth, seed, values)
}

/// A realization of the tagged chain: the lineage-following Markov chain
/// whose kernel averages the two child marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedChainPath {
    pub states: Vec<f64>,
    pub seed: u64,
}

impl TaggedChainPath {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Runs the tagged chain for `steps` transitions (path length `steps + 1`).
///
/// Each step draws the full children pair and keeps child 0 or child 1
/// with probability one half each.
pub fn tagged_chain(
    kernel: &KernelModel,
    init: &InitialLaw,
    steps: usize,
    seed: u64,
) -> Result<TaggedChainPath> {
    let mut states = Vec::with_capacity(steps + 1);
    let mut y = init.sample(&mut stream(seed, "tagged-init", 0, 0));
    states.push(y);
    for m in 0..steps {
        let mut rng = stream(seed, "tagged", m as u64, 0);
        let (c0, c1) = kernel.step(y, &mut rng)?;
        y = if rng.random::<bool>() { c0 } else { c1 };
        states.push(y);
    }
    Ok(TaggedChainPath { states, seed })
}
