//! Prelimit chains: the finite metric spaces of cumulative maxima or
//! cumulative sums of `d`-dimensional increments, with `ℓ_p` distances and
//! an applied normalization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gh::FiniteMetric;
use crate::pnorm::{lp_dist, lp_norm, CompensatedSum, Lp};

/// How increments accumulate along the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Componentwise running maxima (increments must be nonnegative).
    Maxima,
    /// Running sums.
    Walk,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Maxima => "maxima",
            Scheme::Walk => "walk",
        }
    }
}

pub const DEFAULT_MATRIX_CAP: usize = 4096;

/// The chain `{0, Y_1, …, Y_n}` with distance
/// `d(i, j) = scale · ‖points[j] − points[i]‖_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    points: Vec<Vec<f64>>,
    scheme: Scheme,
    p: Lp,
    scale: f64,
    monotone: bool,
}

impl Chain {
    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn p(&self) -> Lp {
        self.p
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.scale * lp_dist(&self.points[i], &self.points[j], self.p)
    }

    /// With nonnegative increments the points are componentwise
    /// nondecreasing, so the diameter is realized at the endpoints.
    pub fn diameter(&self) -> f64 {
        if self.monotone {
            self.distance(0, self.points.len() - 1)
        } else {
            let mut m = 0.0f64;
            for i in 0..self.points.len() {
                for j in (i + 1)..self.points.len() {
                    m = m.max(self.distance(i, j));
                }
            }
            m
        }
    }

    /// Restriction to a subset of indices as a materialized metric space.
    pub fn metric_at(&self, indices: &[usize]) -> FiniteMetric {
        FiniteMetric::from_fn(indices.len(), |i, j| self.distance(indices[i], indices[j]))
    }
}

/// Cumulative maxima or sums with a prepended origin.
pub fn build_chain(
    increments: &[Vec<f64>],
    scheme: Scheme,
    p: Lp,
    scale: f64,
) -> Result<Chain> {
    if increments.is_empty() {
        return Err(Error::param("build_chain needs at least one increment".into()));
    }
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::param(format!("scale must be positive, got {scale}")));
    }
    let d = increments[0].len();
    if increments.iter().any(|x| x.len() != d) {
        return Err(Error::param("increments must share one dimension".into()));
    }
    let mut monotone = true;
    for x in increments {
        if x.iter().any(|&v| v < 0.0) {
            if scheme == Scheme::Maxima {
                return Err(Error::param(
                    "maxima scheme requires nonnegative components".into(),
                ));
            }
            monotone = false;
        }
    }
    let mut points = Vec::with_capacity(increments.len() + 1);
    points.push(vec![0.0; d]);
    let mut state = vec![0.0; d];
    for x in increments {
        match scheme {
            Scheme::Maxima => {
                for (s, &v) in state.iter_mut().zip(x) {
                    if v > *s {
                        *s = v;
                    }
                }
            }
            Scheme::Walk => {
                for (s, &v) in state.iter_mut().zip(x) {
                    *s += v;
                }
            }
        }
        points.push(state.clone());
    }
    Ok(Chain { points, scheme, p, scale, monotone })
}

/// Zeroes out every increment whose `ℓ_p` norm is at most `a_n · s`,
/// preserving order and count.
pub fn threshold_increments(increments: &[Vec<f64>], p: Lp, s: f64, a_n: f64) -> Vec<Vec<f64>> {
    assert!(s > 0.0 && a_n > 0.0);
    let cut = s * a_n;
    increments
        .iter()
        .map(|x| {
            if lp_norm(x, p) > cut {
                x.clone()
            } else {
                vec![0.0; x.len()]
            }
        })
        .collect()
}

/// Materializes the full distance matrix, guarded by a size cap.
pub fn distance_matrix(chain: &Chain, cap: usize) -> Result<FiniteMetric> {
    if chain.len() > cap {
        return Err(Error::MatrixCap { size: chain.len(), cap });
    }
    Ok(FiniteMetric::from_fn(chain.len(), |i, j| chain.distance(i, j)))
}

/// The explicit upper bound on the Gromov–Hausdorff gap between a chain and
/// its thresholded version, from the small-increment remainder:
/// for maxima, the scaled `ℓ_p` norm of the componentwise maximum of the
/// small increments; for the walk, the scaled sum of their norms.
pub fn hausdorff_truncation_gap(
    increments: &[Vec<f64>],
    scheme: Scheme,
    p: Lp,
    s: f64,
    a_n: f64,
) -> f64 {
    assert!(s > 0.0 && a_n > 0.0);
    let cut = s * a_n;
    match scheme {
        Scheme::Maxima => {
            let d = increments.first().map_or(0, |x| x.len());
            let mut env = vec![0.0f64; d];
            for x in increments {
                if lp_norm(x, p) <= cut {
                    for (e, &v) in env.iter_mut().zip(x) {
                        if v.abs() > *e {
                            *e = v.abs();
                        }
                    }
                }
            }
            lp_norm(&env, p) / a_n
        }
        Scheme::Walk => {
            let mut acc = CompensatedSum::default();
            for x in increments {
                let nx = lp_norm(x, p);
                if nx <= cut {
                    acc.add(nx);
                }
            }
            acc.value() / a_n
        }
    }
}

/// Componentwise maximum.
pub fn pointwise_max(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(&x, &y)| x.max(y)).collect()
}

/// Componentwise minimum.
pub fn pointwise_min(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(&x, &y)| x.min(y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn incs(rows: &[&[f64]]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn maxima_chain_by_hand() {
        let inc = incs(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let c = build_chain(&inc, Scheme::Maxima, Lp::ONE, 1.0).unwrap();
        assert_eq!(c.points(), &[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 2.0]]);
        assert_eq!(c.distance(0, 2), 3.0);
    }

    #[test]
    fn disjoint_supports_make_schemes_agree() {
        let inc = incs(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let m = build_chain(&inc, Scheme::Maxima, Lp::ONE, 1.0).unwrap();
        let w = build_chain(&inc, Scheme::Walk, Lp::ONE, 1.0).unwrap();
        assert_eq!(m.points(), w.points());
    }

    #[test]
    fn single_increment_two_point_space() {
        let inc = incs(&[&[3.0, 4.0]]);
        let c = build_chain(&inc, Scheme::Walk, Lp::TWO, 0.5).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.distance(0, 1), 2.5);
        assert_eq!(c.diameter(), 2.5);
    }

    #[test]
    fn maxima_rejects_negative_components() {
        let inc = incs(&[&[1.0, -0.5]]);
        assert!(build_chain(&inc, Scheme::Maxima, Lp::ONE, 1.0).is_err());
        assert!(build_chain(&inc, Scheme::Walk, Lp::ONE, 1.0).is_ok());
    }

    #[test]
    fn walk_repeated_increment_doubles_distance() {
        let inc = incs(&[&[2.0, 1.0], &[2.0, 1.0]]);
        let c = build_chain(&inc, Scheme::Walk, Lp::ONE, 1.0).unwrap();
        assert_eq!(c.distance(0, 2), 6.0);
    }

    #[test]
    fn maxima_rows_nondecreasing_rightward() {
        let inc = incs(&[&[1.0, 0.2], &[0.5, 2.0], &[3.0, 0.1], &[0.9, 4.0]]);
        let c = build_chain(&inc, Scheme::Maxima, Lp::TWO, 1.0).unwrap();
        for i in 0..c.len() {
            let mut last = 0.0;
            for j in i..c.len() {
                let v = c.distance(i, j);
                assert!(v >= last - 1e-12);
                last = v;
            }
        }
    }

    #[test]
    fn threshold_zeroes_small_increments() {
        let inc = incs(&[&[3.0, 0.0], &[1.0, 0.0]]);
        let out = threshold_increments(&inc, Lp::ONE, 2.0, 1.0);
        assert_eq!(out, incs(&[&[3.0, 0.0], &[0.0, 0.0]]));
        let all = threshold_increments(&inc, Lp::ONE, 1e-9, 1.0);
        assert_eq!(all, inc);
        let none = threshold_increments(&inc, Lp::ONE, 10.0, 1.0);
        assert!(none.iter().all(|x| x.iter().all(|&v| v == 0.0)));
        let degenerate = build_chain(&none, Scheme::Maxima, Lp::ONE, 1.0).unwrap();
        assert_eq!(degenerate.diameter(), 0.0);
    }

    #[test]
    fn matrix_cap_enforced() {
        let inc = incs(&[&[1.0], &[1.0], &[1.0]]);
        let c = build_chain(&inc, Scheme::Walk, Lp::ONE, 1.0).unwrap();
        assert!(distance_matrix(&c, 2).is_err());
        let m = distance_matrix(&c, 16).unwrap();
        assert_eq!(m.len(), 4);
        assert_eq!(m.dist(0, 3), 3.0);
        assert_eq!(m.dist(3, 0), 3.0);
        assert_eq!(m.dist(2, 2), 0.0);
    }

    #[test]
    fn truncation_gap_examples() {
        let inc = incs(&[&[3.0, 0.0], &[0.5, 0.4], &[0.0, 0.6]]);
        // Threshold below everything: no gap.
        assert_eq!(
            hausdorff_truncation_gap(&inc, Scheme::Maxima, Lp::ONE, 1e-6, 1.0),
            0.0
        );
        // Walk with every increment small: the gap is the sum of norms.
        let small = incs(&[&[0.5, 0.4], &[0.0, 0.6]]);
        let gap = hausdorff_truncation_gap(&small, Scheme::Walk, Lp::ONE, 2.0, 1.0);
        assert!((gap - 1.5).abs() < 1e-12);
        // Maxima, p = inf, all increments small: at most s after scaling.
        let s = 0.7;
        let a_n = 10.0;
        let tiny = incs(&[&[3.0, 1.0], &[2.0, 6.9]]);
        let g = hausdorff_truncation_gap(&tiny, Scheme::Maxima, Lp::INF, s, a_n);
        assert!(g <= s + 1e-12, "gap {g}");
    }

    #[test]
    fn max_orthogonality_bound_holds() {
        use crate::streams::replicate_rng;
        use rand::Rng;
        let mut rng = replicate_rng(31, 0, 0);
        for _ in 0..2000 {
            let d = rng.random_range(1..20);
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..5.0)).collect();
            let y: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..5.0)).collect();
            for p in [Lp::ONE, Lp::TWO, Lp::INF] {
                let vee = pointwise_max(&x, &y);
                let diff: Vec<f64> = vee.iter().zip(&x).map(|(&a, &b)| a - b).collect();
                let lhs = (lp_norm(&diff, p) - lp_norm(&y, p)).abs();
                let rhs = lp_norm(&pointwise_min(&x, &y), p);
                assert!(lhs <= rhs + 1e-9 * (1.0 + rhs), "p={p:?}: {lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn scalar_power_sum_bound_with_bruteforce_constant() {
        // | |Σx|^p − Σ|x|^p | <= c · max_{i≠j} |x_i||x_j|^{p-1}, with the
        // constant calibrated per tuple size by grid maximization.
        use crate::streams::replicate_rng;
        use rand::Rng;
        for (m, p) in [(2usize, 1.5f64), (2, 2.0), (3, 2.0), (3, 3.0)] {
            // Grid search for the constant on the unit cube (both signs).
            let steps = if m == 2 { 41 } else { 13 };
            let mut c = 0.0f64;
            let mut idx = vec![0usize; m];
            loop {
                let xs: Vec<f64> = idx
                    .iter()
                    .map(|&k| -1.0 + 2.0 * k as f64 / (steps - 1) as f64)
                    .collect();
                let denom = pair_product_max(&xs, p);
                if denom > 1e-12 {
                    let sum: f64 = xs.iter().sum();
                    let power_sum: f64 = xs.iter().map(|x| x.abs().powf(p)).sum();
                    let num = (sum.abs().powf(p) - power_sum).abs();
                    c = c.max(num / denom);
                }
                let mut k = 0;
                loop {
                    idx[k] += 1;
                    if idx[k] < steps {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                    if k == m {
                        break;
                    }
                }
                if k == m {
                    break;
                }
            }
            // Safety margin over the grid estimate; the bound is about the
            // shape, not the sharp constant.
            let c = c * 1.25 + 1e-9;
            let mut rng = replicate_rng(31, 1, m as u64);
            for _ in 0..20_000 {
                let xs: Vec<f64> = (0..m).map(|_| rng.random_range(-3.0..3.0)).collect();
                let denom = pair_product_max(&xs, p);
                let sum: f64 = xs.iter().sum();
                let power_sum: f64 = xs.iter().map(|x| x.abs().powf(p)).sum();
                let num = (sum.abs().powf(p) - power_sum).abs();
                assert!(
                    num <= c * denom + 1e-9,
                    "m={m} p={p}: {num} > {c}*{denom} at {xs:?}"
                );
            }
        }
    }

    fn pair_product_max(xs: &[f64], p: f64) -> f64 {
        let mut best = 0.0f64;
        for (i, &a) in xs.iter().enumerate() {
            for (j, &b) in xs.iter().enumerate() {
                if i != j {
                    best = best.max(a.abs() * b.abs().powf(p - 1.0));
                }
            }
        }
        best
    }
}
