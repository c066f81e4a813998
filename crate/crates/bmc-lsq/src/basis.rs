//! Gaussian tensor basis on ℝ³ with data-driven centers.
//!
//! Each basis function is a product of three Gaussians of common width
//! `tau`, centered on one mother-daughter triangle drawn from the sample.
//! Keeping the triple together means a basis element concentrates where
//! the data actually saw a transition, and it makes the overlap integrals
//! over the child coordinates available in closed form.

use std::fmt::Write as _;

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tree::Triangle;

/// Immutable basis: a width `tau` and `d` center triples.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianBasis {
    tau: f64,
    centers: Vec<Triangle>,
}

impl GaussianBasis {
    pub fn new(tau: f64, centers: Vec<Triangle>) -> Result<GaussianBasis> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::Config(format!("tau must be positive, got {tau}")));
        }
        if centers.is_empty() {
            return Err(Error::Precondition("basis needs at least one center".into()));
        }
        for (j, c) in centers.iter().enumerate() {
            if !(c.parent.is_finite() && c.child0.is_finite() && c.child1.is_finite()) {
                return Err(Error::Numeric(format!("non-finite center triple at {j}")));
            }
        }
        Ok(GaussianBasis { tau, centers })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn dim(&self) -> usize {
        self.centers.len()
    }

    pub fn centers(&self) -> &[Triangle] {
        &self.centers
    }

    /// Same centers, different width.
    pub fn with_tau(&self, tau: f64) -> Result<GaussianBasis> {
        GaussianBasis::new(tau, self.centers.clone())
    }

    /// Value of basis function `j` at `(x, y, z)`; always in `(0, 1]`.
    pub fn eval(&self, j: usize, x: f64, y: f64, z: f64) -> f64 {
        let c = &self.centers[j];
        let t2 = 2.0 * self.tau * self.tau;
        let dx = x - c.parent;
        let dy = y - c.child0;
        let dz = z - c.child1;
        (-(dx * dx + dy * dy + dz * dz) / t2).exp()
    }

    /// The parent-coordinate factor `exp(-(x - c_j)² / (2 tau²))` shared by
    /// Gram assembly and renormalization.
    pub fn parent_weight(&self, j: usize, x: f64) -> f64 {
        let dx = x - self.centers[j].parent;
        (-(dx * dx) / (2.0 * self.tau * self.tau)).exp()
    }

    /// Closed-form overlap `∫∫ φ_i φ_j (x, y, z) dy dz`.
    ///
    /// Exactly symmetric in `(i, j)` by construction of the exponent sum.
    pub fn overlap(&self, i: usize, j: usize, x: f64) -> f64 {
        let ci = &self.centers[i];
        let cj = &self.centers[j];
        let dxi = x - ci.parent;
        let dxj = x - cj.parent;
        let d0 = ci.child0 - cj.child0;
        let d1 = ci.child1 - cj.child1;
        let s = 2.0 * (dxi * dxi + dxj * dxj) + (d0 * d0 + d1 * d1);
        let t2 = self.tau * self.tau;
        std::f64::consts::PI * t2 * (-s / (4.0 * t2)).exp()
    }

    /// Closed-form marginal mass `∫∫ φ_j (x, y, z) dy dz = 2π tau² · w_j(x)`.
    pub fn marginal_integral(&self, j: usize, x: f64) -> f64 {
        2.0 * std::f64::consts::PI * self.tau * self.tau * self.parent_weight(j, x)
    }

    /// Serializes the centers as CSV with columns `j,c,c0,c1`.
    pub fn centers_csv(&self) -> String {
        let mut out = String::from("j,c,c0,c1\n");
        for (j, c) in self.centers.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{}", j + 1, c.parent, c.child0, c.child1);
        }
        out
    }

    /// Parses centers from the CSV produced by [`Self::centers_csv`].
    pub fn centers_from_csv(text: &str) -> Result<Vec<Triangle>> {
        let mut lines = text.lines();
        match lines.next() {
            Some("j,c,c0,c1") => {}
            other => {
                return Err(Error::Format(format!(
                    "expected centers header j,c,c0,c1, got {other:?}"
                )))
            }
        }
        let mut centers = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::Format(format!(
                    "centers line {}: expected 4 fields, got {}",
                    lineno + 2,
                    fields.len()
                )));
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|e| Error::Format(format!("centers line {}: {e}", lineno + 2)))
            };
            centers.push(Triangle {
                parent: parse(fields[1])?,
                child0: parse(fields[2])?,
                child1: parse(fields[3])?,
            });
        }
        Ok(centers)
    }
}

/// Samples `d` distinct triangles without replacement; each sampled triangle
/// becomes one center triple.
pub fn select_centers(
    triangles: &[Triangle],
    d: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Triangle>> {
    if d == 0 {
        return Err(Error::Precondition("cannot select zero centers".into()));
    }
    if d > triangles.len() {
        return Err(Error::Precondition(format!(
            "requested {d} centers from only {} triangles",
            triangles.len()
        )));
    }
    let picks = rand::seq::index::sample(rng, triangles.len(), d);
    Ok(picks.iter().map(|i| triangles[i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{simulate_tree, InitialLaw, KernelModel, NbarModel};
    use crate::quadrature::QuadratureGrid;
    use crate::rng::stream;
    use crate::tree::triangles_of_generation;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn sample_triangles(n: u32, seed: u64) -> Vec<Triangle> {
        let k = KernelModel::Nbar(NbarModel::paper_default());
        let t = simulate_tree(&k, &InitialLaw::StandardNormal, n + 1, seed).unwrap();
        triangles_of_generation(&t, n).unwrap()
    }

    fn test_basis(tau: f64, d: usize, seed: u64) -> GaussianBasis {
        let tri = sample_triangles(7, seed);
        let centers = select_centers(&tri, d, &mut stream(seed, "centers", 0, 0)).unwrap();
        GaussianBasis::new(tau, centers).unwrap()
    }

    #[test]
    fn select_all_is_a_permutation() {
        let tri = sample_triangles(4, 3);
        let centers = select_centers(&tri, tri.len(), &mut stream(3, "c", 0, 0)).unwrap();
        let mut a: Vec<[u64; 3]> = tri
            .iter()
            .map(|t| [t.parent.to_bits(), t.child0.to_bits(), t.child1.to_bits()])
            .collect();
        let mut b: Vec<[u64; 3]> = centers
            .iter()
            .map(|t| [t.parent.to_bits(), t.child0.to_bits(), t.child1.to_bits()])
            .collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn select_more_than_available_errors() {
        let tri = sample_triangles(3, 3);
        assert!(select_centers(&tri, tri.len() + 1, &mut stream(3, "c", 0, 0)).is_err());
    }

    #[test]
    fn selection_is_deterministic_given_stream() {
        let tri = sample_triangles(5, 11);
        let a = select_centers(&tri, 10, &mut stream(11, "c", 0, 0)).unwrap();
        let b = select_centers(&tri, 10, &mut stream(11, "c", 0, 0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn eval_is_one_at_own_center() {
        let b = test_basis(0.7, 20, 5);
        for j in [0usize, 7, 19] {
            let c = b.centers()[j];
            assert_eq!(b.eval(j, c.parent, c.child0, c.child1), 1.0);
        }
    }

    #[test]
    fn eval_grows_with_tau_at_fixed_offset() {
        let tri = sample_triangles(5, 7);
        let centers = select_centers(&tri, 5, &mut stream(7, "c", 0, 0)).unwrap();
        let narrow = GaussianBasis::new(0.5, centers.clone()).unwrap();
        let wide = GaussianBasis::new(1.0, centers).unwrap();
        let c = narrow.centers()[2];
        let v_narrow = narrow.eval(2, c.parent + 0.3, c.child0 - 0.2, c.child1 + 0.1);
        let v_wide = wide.eval(2, c.parent + 0.3, c.child0 - 0.2, c.child1 + 0.1);
        assert!(v_narrow < v_wide);
        assert!(v_wide < 1.0);
    }

    #[test]
    fn overlap_diagonal_at_center_is_pi_tau_squared() {
        let b = test_basis(0.4217, 10, 9);
        let c = b.centers()[3];
        assert_relative_eq!(
            b.overlap(3, 3, c.parent),
            std::f64::consts::PI * 0.4217 * 0.4217,
            max_relative = 1e-15
        );
    }

    #[test]
    fn overlap_vanishes_for_distant_children_centers() {
        let centers = vec![
            Triangle { parent: 0.0, child0: 0.0, child1: 0.0 },
            Triangle { parent: 0.0, child0: 500.0, child1: 0.0 },
        ];
        let b = GaussianBasis::new(1.0, centers).unwrap();
        assert_eq!(b.overlap(0, 1, 0.0), 0.0);
    }

    /// Oracle for the closed form: 64-point tensor Gauss–Legendre over a
    /// box of half-width 6·tau around the midpoint of the relevant centers.
    fn overlap_by_quadrature(b: &GaussianBasis, i: usize, j: usize, x: f64) -> f64 {
        let (ci, cj) = (b.centers()[i], b.centers()[j]);
        let tau = b.tau();
        let my = 0.5 * (ci.child0 + cj.child0);
        let mz = 0.5 * (ci.child1 + cj.child1);
        let grid = QuadratureGrid::new(
            crate::quadrature::Axis::new(my - 6.0 * tau, my + 6.0 * tau, 64).unwrap(),
            crate::quadrature::Axis::new(mz - 6.0 * tau, mz + 6.0 * tau, 64).unwrap(),
        );
        grid.integrate(|y, z| b.eval(i, x, y, z) * b.eval(j, x, y, z))
    }

    fn relative_gap(a: f64, b: f64) -> f64 {
        let scale = a.abs().max(b.abs());
        if scale < 1e-280 {
            0.0 // both effectively zero: the exponent underflowed in tandem
        } else {
            (a - b).abs() / scale
        }
    }

    #[test]
    fn overlap_matches_quadrature_on_random_pairs() {
        for (round, tau) in [(0u64, 0.0316), (1, 1.0), (2, 31.6228)] {
            let b = test_basis(tau, 24, 100 + round);
            let mut rng = stream(50 + round, "probe", 0, 0);
            for _ in 0..25 {
                let i = rng.random_range(0..b.dim());
                let j = rng.random_range(0..b.dim());
                let x: f64 = rng.random_range(-3.0..3.0);
                let closed = b.overlap(i, j, x);
                let quad = overlap_by_quadrature(&b, i, j, x);
                assert!(
                    relative_gap(closed, quad) < 1e-6,
                    "tau={tau} i={i} j={j} x={x}: closed {closed:e} vs quad {quad:e}"
                );
            }
        }
    }

    #[test]
    fn marginal_integral_matches_quadrature_and_peaks_at_center() {
        let b = test_basis(0.7, 12, 21);
        let c = b.centers()[4];
        assert_relative_eq!(
            b.marginal_integral(4, c.parent),
            2.0 * std::f64::consts::PI * 0.49,
            max_relative = 1e-14
        );
        let tau = b.tau();
        for x in [c.parent, c.parent + 0.5, c.parent - 1.3] {
            let grid = QuadratureGrid::new(
                crate::quadrature::Axis::new(c.child0 - 8.0 * tau, c.child0 + 8.0 * tau, 64)
                    .unwrap(),
                crate::quadrature::Axis::new(c.child1 - 8.0 * tau, c.child1 + 8.0 * tau, 64)
                    .unwrap(),
            );
            let quad = grid.integrate(|y, z| b.eval(4, x, y, z));
            assert_relative_eq!(b.marginal_integral(4, x), quad, max_relative = 1e-6);
        }
    }

    #[test]
    fn overlap_to_marginal_ratio_identity() {
        // overlap(j, j, x) / marginal(j, x) = exp(-(x-c_j)²/(2 tau²)) / 2.
        let b = test_basis(1.3, 8, 33);
        let c = b.centers()[2];
        for x in [-2.0, -0.5, c.parent, 1.0, 2.5] {
            let lhs = b.overlap(2, 2, x) / b.marginal_integral(2, x);
            let rhs = 0.5 * b.parent_weight(2, x);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
    }

    #[test]
    fn overlap_quadratic_form_is_nonnegative() {
        // Σ w_i w_j overlap(i,j,x) is the squared L² norm of Σ w_i φ_i(x,·,·).
        let b = test_basis(0.9, 16, 44);
        let mut rng = stream(44, "w", 0, 0);
        for probe in 0..5 {
            let x: f64 = rng.random_range(-3.0..3.0);
            let w: Vec<f64> = (0..b.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut q = 0.0;
            for i in 0..b.dim() {
                for j in 0..b.dim() {
                    q += w[i] * w[j] * b.overlap(i, j, x);
                }
            }
            assert!(q >= -1e-10, "probe {probe}: quadratic form {q}");
        }
    }

    #[test]
    fn centers_csv_round_trip() {
        let b = test_basis(0.5, 6, 55);
        let csv = b.centers_csv();
        assert!(csv.starts_with("j,c,c0,c1\n"));
        let back = GaussianBasis::centers_from_csv(&csv).unwrap();
        assert_eq!(back, b.centers());
    }

    proptest! {
        #[test]
        fn overlap_is_symmetric_and_bounded(
            cs in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0), 2..6),
            x in -4.0f64..4.0,
            tau in 0.05f64..20.0,
        ) {
            let centers: Vec<Triangle> = cs
                .iter()
                .map(|&(p, c0, c1)| Triangle { parent: p, child0: c0, child1: c1 })
                .collect();
            let b = GaussianBasis::new(tau, centers).unwrap();
            let bound = std::f64::consts::PI * tau * tau;
            for i in 0..b.dim() {
                for j in 0..b.dim() {
                    let v = b.overlap(i, j, x);
                    prop_assert_eq!(v, b.overlap(j, i, x));
                    prop_assert!(v >= 0.0 && v <= bound * (1.0 + 1e-15));
                }
            }
        }

        #[test]
        fn eval_stays_in_unit_interval(
            p in -5.0f64..5.0, c0 in -5.0f64..5.0, c1 in -5.0f64..5.0,
            x in -6.0f64..6.0, y in -6.0f64..6.0, z in -6.0f64..6.0,
            tau in 0.05f64..30.0,
        ) {
            let b = GaussianBasis::new(tau, vec![Triangle { parent: p, child0: c0, child1: c1 }])
                .unwrap();
            let v = b.eval(0, x, y, z);
            prop_assert!(v > 0.0 && v <= 1.0);
        }
    }
}
