//! Concentration lab: empirical tail frequencies of normalized generation
//! sums on the two-point chain, compared against the Bernstein-type bound
//! shape with exactly known ergodicity constants.

use rayon::prelude::*;

use crate::constants::{bernstein_bound, c1, c2, two_point_bounds, v_n};
use crate::error::{Error, Result};
use crate::kernels::{simulate_tree, InitialLaw, KernelModel, TwoPointModel};
use crate::rng::derive_seed;
use crate::tree::generation_size;

/// Test functions with exactly computable bounds on the two-point space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFunction {
    Identity,
}

impl TestFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            TestFunction::Identity => x,
        }
    }

    /// Invariant mean under the uniform law on `{-1, +1}`.
    pub fn invariant_mean(&self) -> f64 {
        let g = |x| self.eval(x);
        0.5 * (g(1.0) + g(-1.0))
    }

    pub fn id(&self) -> &'static str {
        match self {
            TestFunction::Identity => "identity",
        }
    }
}

/// One grid point of the lab: the empirical tail at `delta` next to the
/// bound shape (leading constant 1) and the calibrated bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationRow {
    pub delta: f64,
    pub empirical: f64,
    pub shape: f64,
    pub calibrated: f64,
}

/// Full lab output, including the constants that entered the bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationTable {
    pub rows: Vec<ConcentrationRow>,
    pub alpha: f64,
    pub c1: f64,
    pub c2: f64,
    pub v_n: f64,
    /// Smallest `C >= 1` making the bound hold at the first grid point.
    pub fitted_c: f64,
    pub reps: usize,
    pub n: u32,
}

impl ConcentrationTable {
    /// Fraction of grid points where the calibrated bound dominates the
    /// empirical tail.
    pub fn dominance_fraction(&self) -> f64 {
        if self.rows.is_empty() {
            return 1.0;
        }
        let hits = self
            .rows
            .iter()
            .filter(|r| r.calibrated >= r.empirical)
            .count();
        hits as f64 / self.rows.len() as f64
    }
}

/// The normalized centered generation sum `|G_n|^{-1/2} |Σ_u g̃(X_u)|`.
fn statistic(leaves: &[f64], g: TestFunction) -> f64 {
    let mean = g.invariant_mean();
    let sum: f64 = leaves.iter().map(|&x| g.eval(x) - mean).sum();
    sum.abs() / (leaves.len() as f64).sqrt()
}

/// Runs the lab: `reps` independent trees of depth `n`, empirical tail
/// frequency at each `delta`, and the Bernstein shape with the two-point
/// chain's exact constants (`alpha = |a|`, `R = 1`).
pub fn run_concentration(
    model: &TwoPointModel,
    g: TestFunction,
    n: u32,
    reps: usize,
    deltas: &[f64],
    master: u64,
) -> Result<ConcentrationTable> {
    let alpha = model.a().abs();
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!(
            "concentration lab needs 0 < |a| < 1, got a = {}",
            model.a()
        )));
    }
    if reps == 0 || deltas.is_empty() {
        return Err(Error::Precondition(
            "concentration lab needs replications and a delta grid".into(),
        ));
    }
    if deltas.windows(2).any(|w| w[0] >= w[1]) || deltas[0] < 0.0 {
        return Err(Error::Precondition(
            "delta grid must be nonnegative and strictly ascending".into(),
        ));
    }

    let kernel = KernelModel::TwoPoint(*model);
    let stats: Vec<Result<f64>> = (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let seed = derive_seed(master, "concentration-tree", rep, 0);
            let tree = simulate_tree(&kernel, &InitialLaw::UniformSign, n, seed)?;
            Ok(statistic(tree.generation_values(n), g))
        })
        .collect();
    let stats = stats.into_iter().collect::<Result<Vec<f64>>>()?;

    let bounds = two_point_bounds(model.a(), |x| g.eval(x));
    let c1v = c1(alpha, 1.0, n, bounds.sup_qg2);
    let c2v = c2(alpha, 1.0, bounds.sup_gtilde, bounds.sup_qg);
    let vnv = v_n(alpha, n);

    let empirical_tail = |delta: f64| -> f64 {
        stats.iter().filter(|&&s| s >= delta).count() as f64 / reps as f64
    };
    let shape = |delta: f64| bernstein_bound(delta, c1v, c2v, vnv, 1.0);

    let first = deltas[0];
    let fitted_c = (empirical_tail(first) / shape(first)).max(1.0);

    let rows = deltas
        .iter()
        .map(|&delta| {
            let s = shape(delta);
            ConcentrationRow {
                delta,
                empirical: empirical_tail(delta),
                shape: s,
                calibrated: fitted_c * s,
            }
        })
        .collect();
    Ok(ConcentrationTable {
        rows,
        alpha,
        c1: c1v,
        c2: c2v,
        v_n: vnv,
        fitted_c,
        reps,
        n,
    })
}

/// Exact tail probabilities at small depth by enumerating every sign
/// configuration of the full tree, weighted by its exact probability.
pub fn exact_tail_two_point(a: f64, n: u32, g: TestFunction, deltas: &[f64]) -> Result<Vec<f64>> {
    if n > 3 {
        return Err(Error::Precondition(format!(
            "exhaustive enumeration is limited to depth 3, requested {n}"
        )));
    }
    let node_count = crate::tree::node_count(n);
    let keep = 0.5 * (1.0 + a);
    let flip = 0.5 * (1.0 - a);
    let leaf_start = ((1u64 << n) - 1) as usize;
    let leaves = generation_size(n) as usize;
    let mut tails = vec![0.0; deltas.len()];
    for mask in 0u64..(1u64 << node_count) {
        let sign = |offset: usize| -> f64 {
            if mask >> offset & 1 == 1 {
                1.0
            } else {
                -1.0
            }
        };
        // Root is uniform; each edge keeps the parent sign with prob (1+a)/2.
        let mut prob = 0.5;
        for m in 0..n {
            let gen_start = ((1u64 << m) - 1) as usize;
            let child_start = ((1u64 << (m + 1)) - 1) as usize;
            for k in 0..generation_size(m) as usize {
                let parent = sign(gen_start + k);
                for c in 0..2 {
                    let child = sign(child_start + 2 * k + c);
                    prob *= if child == parent { keep } else { flip };
                }
            }
        }
        let leaf_values: Vec<f64> = (0..leaves).map(|k| sign(leaf_start + k)).collect();
        let s = statistic(&leaf_values, g);
        for (i, &delta) in deltas.iter().enumerate() {
            if s >= delta {
                tails[i] += prob;
            }
        }
    }
    Ok(tails)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn statistic_of_constant_leaves() {
        // Four +1 leaves: |G_2|^{-1/2} · 4 = 2.
        assert_relative_eq!(statistic(&[1.0; 4], TestFunction::Identity), 2.0);
        assert_relative_eq!(statistic(&[1.0, -1.0, 1.0, -1.0], TestFunction::Identity), 0.0);
    }

    #[test]
    fn enumeration_mass_sums_to_one() {
        let tails = exact_tail_two_point(0.4, 2, TestFunction::Identity, &[0.0]).unwrap();
        assert_relative_eq!(tails[0], 1.0, max_relative = 1e-12);
    }

    #[test]
    fn enumeration_rejects_large_depth() {
        assert!(exact_tail_two_point(0.4, 4, TestFunction::Identity, &[0.0]).is_err());
    }

    #[test]
    fn empirical_tail_at_zero_is_one() {
        let model = TwoPointModel::new(0.4).unwrap();
        let table = run_concentration(
            &model,
            TestFunction::Identity,
            4,
            200,
            &[0.0, 1.0, 2.0],
            99,
        )
        .unwrap();
        assert_eq!(table.rows[0].empirical, 1.0);
        assert!(table.fitted_c >= 1.0);
    }

    #[test]
    fn monte_carlo_matches_enumeration_at_small_depth() {
        // Oracle: exhaustive enumeration over all 2^7 sign configurations.
        let a = 0.4;
        let deltas = [0.5, 1.0, 1.5, 2.0];
        let exact = exact_tail_two_point(a, 2, TestFunction::Identity, &deltas).unwrap();
        let model = TwoPointModel::new(a).unwrap();
        let reps = 2000;
        let table =
            run_concentration(&model, TestFunction::Identity, 2, reps, &deltas, 123).unwrap();
        for (row, &p) in table.rows.iter().zip(&exact) {
            let se = (p * (1.0 - p) / reps as f64).sqrt();
            assert!(
                (row.empirical - p).abs() <= 3.0 * se + 1e-12,
                "delta {}: empirical {} vs exact {} (3se = {})",
                row.delta,
                row.empirical,
                p,
                3.0 * se
            );
        }
    }

    #[test]
    fn calibrated_bound_dominates_at_moderate_depth() {
        let model = TwoPointModel::new(0.4).unwrap();
        let deltas: Vec<f64> = (0..8).map(|i| 0.5 + 0.5 * i as f64).collect();
        let table =
            run_concentration(&model, TestFunction::Identity, 8, 500, &deltas, 7).unwrap();
        assert!(table.dominance_fraction() >= 0.95);
    }

    #[test]
    fn lab_rejects_degenerate_chains_and_grids() {
        let zero = TwoPointModel::new(0.0).unwrap();
        assert!(run_concentration(&zero, TestFunction::Identity, 3, 10, &[0.5], 1).is_err());
        let model = TwoPointModel::new(0.4).unwrap();
        assert!(run_concentration(&model, TestFunction::Identity, 3, 10, &[], 1).is_err());
        assert!(
            run_concentration(&model, TestFunction::Identity, 3, 10, &[1.0, 0.5], 1).is_err()
        );
    }
}
