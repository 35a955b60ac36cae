//! Gromov–Hausdorff distance estimation for finite metric spaces.
//!
//! `d_GH` is half the infimum of the distortion over all correspondences
//! (relations covering both sides). The exact oracle enumerates
//! correspondences for spaces of at most [`ORACLE_CAP`] points with
//! branch-and-bound pruning; beyond that, [`gh_bounds`] sandwiches the value
//! between a provable lower bound and the distortion of a time-aligned
//! correspondence refined by local search.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pnorm::{lp_dist, Lp};

/// A finite metric space stored as a dense symmetric distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetric {
    n: usize,
    d: Vec<f64>,
}

impl FiniteMetric {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                debug_assert!(v >= 0.0 && v.is_finite());
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        FiniteMetric { n, d }
    }

    /// `ℓ_p` distances of a point set, scaled by `scale`.
    pub fn from_points(points: &[Vec<f64>], p: Lp, scale: f64) -> Self {
        Self::from_fn(points.len(), |i, j| scale * lp_dist(&points[i], &points[j], p))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn diameter(&self) -> f64 {
        self.d.iter().fold(0.0f64, |m, &v| m.max(v))
    }

    pub fn scaled(&self, c: f64) -> Self {
        assert!(c > 0.0);
        FiniteMetric {
            n: self.n,
            d: self.d.iter().map(|&v| c * v).collect(),
        }
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        Self::from_fn(self.n, |i, j| self.dist(perm[i], perm[j]))
    }

    /// Sorted distances from `base` to every point (the basepoint profile).
    fn profile(&self, base: usize) -> Vec<f64> {
        let mut row: Vec<f64> = (0..self.n).map(|j| self.dist(base, j)).collect();
        row.sort_by(f64::total_cmp);
        row
    }
}

/// A relation between two finite metric spaces in which every point of
/// either side appears.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Correspondence {
    pub pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn identity(n: usize) -> Self {
        Correspondence {
            pairs: (0..n).map(|i| (i, i)).collect(),
        }
    }

    pub fn validate(&self, len_a: usize, len_b: usize) -> Result<()> {
        let mut seen_a = vec![false; len_a];
        let mut seen_b = vec![false; len_b];
        for &(i, j) in &self.pairs {
            if i >= len_a || j >= len_b {
                return Err(Error::Correspondence(format!(
                    "pair ({i}, {j}) out of range for sizes {len_a} x {len_b}"
                )));
            }
            seen_a[i] = true;
            seen_b[j] = true;
        }
        if !seen_a.iter().all(|&s| s) || !seen_b.iter().all(|&s| s) {
            return Err(Error::Correspondence("every point must be covered".into()));
        }
        Ok(())
    }
}

/// `sup |d_A(a,a') − d_B(b,b')|` over pairs of related pairs.
pub fn distortion(corr: &Correspondence, a: &FiniteMetric, b: &FiniteMetric) -> Result<f64> {
    corr.validate(a.len(), b.len())?;
    let mut dis = 0.0f64;
    for (k, &(i, j)) in corr.pairs.iter().enumerate() {
        for &(i2, j2) in &corr.pairs[k..] {
            dis = dis.max((a.dist(i, i2) - b.dist(j, j2)).abs());
        }
    }
    Ok(dis)
}

/// An interval estimate `lower <= d_GH <= upper` with the correspondence
/// certifying the upper bound.
#[derive(Debug, Clone, Serialize)]
pub struct GhEstimate {
    pub lower: f64,
    pub upper: f64,
    pub witness: Correspondence,
}

/// Largest per-side size accepted by [`gh_exact`]. Coverage-complete
/// relations on 5 x 5 points are enumerable with pruning in well under a
/// second; 6 x 6 is already borderline.
pub const ORACLE_CAP: usize = 5;

/// Exact Gromov–Hausdorff distance by branch-and-bound over all
/// correspondences. Each point of `a` is assigned a nonempty subset of `b`;
/// the last assignment is forced to cover what is missing.
pub fn gh_exact(a: &FiniteMetric, b: &FiniteMetric) -> Result<GhEstimate> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::param("gh_exact needs nonempty spaces".into()));
    }
    let size = a.len().max(b.len());
    if size > ORACLE_CAP {
        return Err(Error::OracleCap { size, cap: ORACLE_CAP });
    }
    // Search over the smaller side to cut the depth.
    let (a, b, swapped) = if a.len() <= b.len() { (a, b, false) } else { (b, a, true) };

    let la = a.len();
    let lb = b.len();
    let full: u32 = (1u32 << lb) - 1;

    // Seed the bound with a proportional assignment.
    let seed = proportional_pairs(la, lb);
    let seed_corr = Correspondence { pairs: seed };
    let mut best = distortion(&seed_corr, a, b).expect("seed correspondence covers both sides");
    let mut best_masks: Vec<u32> = vec![0; la];
    {
        let mut masks = vec![0u32; la];
        for &(i, j) in &seed_corr.pairs {
            masks[i] |= 1 << j;
        }
        best_masks.copy_from_slice(&masks);
    }

    // diam_b[m] = max distance within the subset mask m.
    let mut diam_b = vec![0.0f64; 1 << lb];
    for m in 1u32..=full {
        let mut v = 0.0f64;
        let mut rest = m;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let mut rest2 = rest;
            while rest2 != 0 {
                let j = rest2.trailing_zeros() as usize;
                rest2 &= rest2 - 1;
                v = v.max(b.dist(i, j));
            }
        }
        diam_b[m as usize] = v;
    }

    let mut chosen = vec![0u32; la];
    search(a, b, 0, 0, 0.0, &diam_b, full, &mut chosen, &mut best, &mut best_masks);

    let mut pairs = Vec::new();
    for (i, &m) in best_masks.iter().enumerate() {
        let mut rest = m;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            pairs.push(if swapped { (j, i) } else { (i, j) });
        }
    }
    pairs.sort_unstable();
    let value = best / 2.0;
    Ok(GhEstimate {
        lower: value,
        upper: value,
        witness: Correspondence { pairs },
    })
}

fn proportional_pairs(la: usize, lb: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    let mut covered_b = vec![false; lb];
    for i in 0..la {
        let j = if la == 1 { 0 } else { (i * (lb - 1) + (la - 1) / 2) / (la - 1) };
        pairs.push((i, j));
        covered_b[j] = true;
    }
    for (j, done) in covered_b.iter().enumerate() {
        if !done {
            let i = if lb == 1 { 0 } else { (j * (la - 1) + (lb - 1) / 2) / (lb - 1) };
            pairs.push((i, j));
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

#[allow(clippy::too_many_arguments)]
fn search(
    a: &FiniteMetric,
    b: &FiniteMetric,
    level: usize,
    covered: u32,
    partial: f64,
    diam_b: &[f64],
    full: u32,
    chosen: &mut Vec<u32>,
    best: &mut f64,
    best_masks: &mut Vec<u32>,
) {
    let la = a.len();
    if level == la {
        if covered == full && partial < *best {
            *best = partial;
            best_masks.copy_from_slice(chosen);
        }
        return;
    }
    let last = level + 1 == la;
    let missing = full & !covered;

    // Candidate subsets for this level, cheapest incremental distortion
    // first so deeper pruning kicks in early.
    let mut cands: Vec<(f64, u32)> = Vec::with_capacity(full as usize);
    let mut m = 1u32;
    while m <= full {
        if last && (m & missing) != missing {
            m += 1;
            continue;
        }
        let mut inc = diam_b[m as usize]; // pairs within this level: d_A = 0
        for j in 0..level {
            let daij = a.dist(level, j);
            let mut rest = m;
            while rest != 0 {
                let bi = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let mut rest2 = chosen[j];
                while rest2 != 0 {
                    let bj = rest2.trailing_zeros() as usize;
                    rest2 &= rest2 - 1;
                    inc = inc.max((daij - b.dist(bi, bj)).abs());
                }
            }
        }
        cands.push((inc, m));
        m += 1;
    }
    cands.sort_by(|x, y| x.0.total_cmp(&y.0));

    for (inc, mask) in cands {
        let new_partial = partial.max(inc);
        if new_partial >= *best {
            break; // sorted ascending: the rest are no better
        }
        chosen[level] = mask;
        search(a, b, level + 1, covered | mask, new_partial, diam_b, full, chosen, best, best_masks);
    }
    chosen[level] = 0;
}

/// One-sided Hausdorff gap between two sorted value sets in `ℝ`.
fn hausdorff_gap_sorted(xs: &[f64], ys: &[f64]) -> f64 {
    let one_sided = |from: &[f64], to: &[f64]| {
        let mut worst = 0.0f64;
        for &x in from {
            let i = to.partition_point(|&y| y < x);
            let mut near = f64::INFINITY;
            if i < to.len() {
                near = near.min((to[i] - x).abs());
            }
            if i > 0 {
                near = near.min((x - to[i - 1]).abs());
            }
            worst = worst.max(near);
        }
        worst
    };
    one_sided(xs, ys).max(one_sided(ys, xs))
}

/// A lower bound on `d_GH`: half the larger of the diameter gap and the
/// best-matched basepoint-profile Hausdorff gap. For any correspondence
/// each basepoint of `a` is related to some point of `b`, and related
/// profiles are within the distortion of each other in Hausdorff distance.
pub fn gh_lower_bound(a: &FiniteMetric, b: &FiniteMetric) -> f64 {
    let diam_gap = (a.diameter() - b.diameter()).abs();
    let profiles_b: Vec<Vec<f64>> = (0..b.len()).map(|j| b.profile(j)).collect();
    let mut profile_gap = 0.0f64;
    for i in 0..a.len() {
        let pa = a.profile(i);
        let mut best = f64::INFINITY;
        for pb in &profiles_b {
            best = best.min(hausdorff_gap_sorted(&pa, pb));
            if best == 0.0 {
                break;
            }
        }
        profile_gap = profile_gap.max(best);
    }
    0.5 * diam_gap.max(profile_gap)
}

/// Sandwich estimate for two pointed chains carrying a time per point.
///
/// The upper bound is half the distortion of the correspondence that aligns
/// nearest times, optionally improved by bounded local search over
/// single-point reassignments. The lower bound is [`gh_lower_bound`].
pub fn gh_bounds(
    a: &FiniteMetric,
    a_times: &[f64],
    b: &FiniteMetric,
    b_times: &[f64],
    sweeps: usize,
) -> GhEstimate {
    assert_eq!(a.len(), a_times.len());
    assert_eq!(b.len(), b_times.len());
    let la = a.len();
    let lb = b.len();

    // Nearest-time partner for every point, both directions.
    let nearest = |t: f64, times: &[f64]| -> usize {
        let mut k = 0;
        let mut best = f64::INFINITY;
        for (i, &u) in times.iter().enumerate() {
            let gap = (t - u).abs();
            if gap < best {
                best = gap;
                k = i;
            }
        }
        k
    };
    let mut fwd: Vec<usize> = a_times.iter().map(|&t| nearest(t, b_times)).collect();
    let mut rev: Vec<usize> = b_times.iter().map(|&t| nearest(t, a_times)).collect();

    let assemble = |fwd: &[usize], rev: &[usize]| {
        let mut pairs: Vec<(usize, usize)> = fwd.iter().enumerate().map(|(i, &j)| (i, j)).collect();
        pairs.extend(rev.iter().enumerate().map(|(j, &i)| (i, j)));
        pairs.sort_unstable();
        pairs.dedup();
        Correspondence { pairs }
    };

    let mut corr = assemble(&fwd, &rev);
    let mut dis = distortion(&corr, a, b).expect("nearest-time correspondence covers both sides");

    // Greedy single-point moves to adjacent partners, strict improvement.
    'sweeps: for _ in 0..sweeps {
        let mut improved = false;
        for i in 0..la {
            let here = fwd[i];
            for cand in [here.wrapping_sub(1), here + 1] {
                if cand >= lb {
                    continue;
                }
                let old = fwd[i];
                fwd[i] = cand;
                let trial = assemble(&fwd, &rev);
                match distortion(&trial, a, b) {
                    Ok(v) if v < dis => {
                        dis = v;
                        corr = trial;
                        improved = true;
                    }
                    _ => {
                        fwd[i] = old;
                    }
                }
            }
        }
        for j in 0..lb {
            let here = rev[j];
            for cand in [here.wrapping_sub(1), here + 1] {
                if cand >= la {
                    continue;
                }
                let old = rev[j];
                rev[j] = cand;
                let trial = assemble(&fwd, &rev);
                match distortion(&trial, a, b) {
                    Ok(v) if v < dis => {
                        dis = v;
                        corr = trial;
                        improved = true;
                    }
                    _ => {
                        rev[j] = old;
                    }
                }
            }
        }
        if !improved {
            break 'sweeps;
        }
    }

    let upper = dis / 2.0;
    let lower = gh_lower_bound(a, b).min(upper);
    GhEstimate { lower, upper, witness: corr }
}
