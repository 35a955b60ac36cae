//! Exact samplers for the heavy-tailed ingredients and the closed-form
//! normalizing sequences.
//!
//! All samplers are pure functions of an explicit RNG, so replicates can run
//! on derived streams in parallel (see [`crate::streams`]).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;

use crate::error::{Error, Result};
use crate::numeric::ln_gamma;

const INV_2_53: f64 = 1.0 / 9_007_199_254_740_992.0;
const INV_2_52: f64 = 1.0 / 4_503_599_627_370_496.0;

/// Uniform draw on (0, 1].
#[inline]
pub fn unit_open_closed<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * INV_2_53
}

/// Uniform draw on (0, 1).
#[inline]
pub fn unit_open<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 12) as f64 + 0.5) * INV_2_52
}

/// Standard exponential via inversion.
#[inline]
pub fn sample_exp<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    -unit_open_closed(rng).ln()
}

/// Pareto quantile: `P{X > x} = (x/s)^{-alpha}` for `x >= s`, evaluated at
/// tail probability `u`, i.e. the value exceeded with probability `u`.
#[inline]
pub fn pareto_quantile(alpha: f64, lower: f64, u: f64) -> f64 {
    lower * u.powf(-1.0 / alpha)
}

/// Pareto draw with tail index `alpha` and lower bound `s`:
/// `s · U^{-1/alpha}` for `U` uniform on (0, 1].
#[inline]
pub fn sample_pareto<R: Rng + ?Sized>(alpha: f64, lower: f64, rng: &mut R) -> f64 {
    debug_assert!(alpha > 0.0 && lower > 0.0);
    pareto_quantile(alpha, lower, unit_open_closed(rng))
}

/// Fills `out` with Pareto draws. Hoists the reciprocal-power special case
/// (integer `1/alpha`) out of the loop; the bulk Monte Carlo paths draw
/// billions of these.
pub fn fill_pareto<R: Rng + ?Sized>(alpha: f64, lower: f64, out: &mut [f64], rng: &mut R) {
    debug_assert!(alpha > 0.0 && lower > 0.0);
    let inv = 1.0 / alpha;
    let k = inv.round();
    if inv == k && (1.0..=4.0).contains(&k) {
        let k = k as i32;
        for x in out.iter_mut() {
            let r = 1.0 / unit_open_closed(rng);
            *x = lower * r.powi(k);
        }
    } else {
        for x in out.iter_mut() {
            *x = lower * unit_open_closed(rng).powf(-inv);
        }
    }
}

/// Fréchet quantile of shape `r` (CDF `exp(-x^{-r})`) at probability `u`.
#[inline]
pub fn frechet_quantile(shape: f64, u: f64) -> f64 {
    (-u.ln()).powf(-1.0 / shape)
}

/// Fréchet draw of shape `r`: `(-ln U)^{-1/r}` for `U` uniform on (0, 1).
#[inline]
pub fn sample_frechet<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    debug_assert!(shape > 0.0);
    frechet_quantile(shape, unit_open(rng))
}

/// One-sided stable draw with Laplace transform `E e^{-t ζ} = e^{-t^gamma}`,
/// `gamma ∈ (0, 1)`, by Kanter's representation: with `θ` uniform on (0, π)
/// and `W` standard exponential,
///
/// `ζ = (A(θ)/W)^{(1-γ)/γ}`,
/// `A(θ) = [sin(γθ)/sin θ]^{γ/(1-γ)} · sin((1-γ)θ)/sin θ`.
///
/// Exact (no rejection loop) and stable over the whole range of `gamma`.
pub fn sample_positive_stable<R: Rng + ?Sized>(gamma: f64, rng: &mut R) -> f64 {
    assert!(
        gamma > 0.0 && gamma < 1.0,
        "stable exponent must lie in (0,1), got {gamma}"
    );
    let theta = std::f64::consts::PI * unit_open(rng);
    let w = sample_exp(rng);
    let sin_t = theta.sin();
    let a = (gamma * theta).sin().powf(gamma / (1.0 - gamma)) * ((1.0 - gamma) * theta).sin()
        / sin_t.powf(1.0 / (1.0 - gamma));
    (a / w).powf((1.0 - gamma) / gamma)
}

const SIBUYA_TABLE_LEN: usize = 1 << 14;

#[derive(Debug)]
struct SibuyaTable {
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

impl SibuyaTable {
    fn new(gamma: f64, len: usize) -> Self {
        // P{N = 1} = gamma, P{N = n+1} = P{N = n} (n - gamma)/(n + 1).
        let mut probs = Vec::with_capacity(len);
        let mut cdf = Vec::with_capacity(len);
        let mut p = gamma;
        let mut acc = 0.0;
        for n in 1..=len {
            probs.push(p);
            acc += p;
            cdf.push(acc);
            p *= (n as f64 - gamma) / (n as f64 + 1.0);
        }
        SibuyaTable { probs, cdf }
    }
}

fn sibuya_cache() -> &'static Mutex<HashMap<u64, Arc<SibuyaTable>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<SibuyaTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn sibuya_table(gamma: f64) -> Arc<SibuyaTable> {
    let mut cache = sibuya_cache().lock().unwrap();
    cache
        .entry(gamma.to_bits())
        .or_insert_with(|| Arc::new(SibuyaTable::new(gamma, SIBUYA_TABLE_LEN)))
        .clone()
}

/// Survival function `P{N > n}` of the Sibuya law, evaluated exactly as
/// `Γ(n+1-γ) / (Γ(1-γ) Γ(n+1))`.
pub fn sibuya_survival(gamma: f64, n: u64) -> f64 {
    let nf = n as f64;
    (ln_gamma(nf + 1.0 - gamma) - ln_gamma(1.0 - gamma) - ln_gamma(nf + 1.0)).exp()
}

/// Sampler for the Sibuya law with pgf `E z^N = 1 - (1-z)^gamma`.
///
/// Sequential inversion against a cached probability table (shared per
/// parameter, keyed by its exact bits); draws beyond the table fall back to
/// exact inversion of the survival function. The tail is so heavy that no
/// finite table can cover it.
#[derive(Debug, Clone)]
pub struct SibuyaSampler {
    gamma: f64,
    table: Arc<SibuyaTable>,
}

impl SibuyaSampler {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::param(format!(
                "Sibuya exponent must lie in (0,1), got {gamma}"
            )));
        }
        Ok(SibuyaSampler {
            gamma,
            table: sibuya_table(gamma),
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// P{N = n} for n >= 1 from the cached recursion table.
    pub fn prob(&self, n: u64) -> f64 {
        if n == 0 {
            return 0.0;
        }
        if let Some(&p) = self.table.probs.get(n as usize - 1) {
            p
        } else {
            sibuya_survival(self.gamma, n - 1) - sibuya_survival(self.gamma, n)
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u = unit_open(rng);
        let cdf = &self.table.cdf;
        if u <= cdf[cdf.len() - 1] {
            // partition_point returns the count of entries < u, i.e. n-1.
            return cdf.partition_point(|&c| c < u) as u64 + 1;
        }
        self.invert_tail(1.0 - u)
    }

    /// Smallest n with P{N > n} <= tail, found by bisection on the exact
    /// survival function around its power-law asymptote.
    fn invert_tail(&self, tail: f64) -> u64 {
        let g = self.gamma;
        let guess = (ln_gamma(1.0 - g).exp() * tail).powf(-1.0 / g);
        if guess >= u64::MAX as f64 / 4.0 {
            return u64::MAX;
        }
        let mut lo = (guess / 4.0) as u64;
        let mut hi = (guess * 4.0) as u64 + 2;
        lo = lo.max(SIBUYA_TABLE_LEN as u64);
        while sibuya_survival(g, lo) <= tail && lo > SIBUYA_TABLE_LEN as u64 {
            lo /= 2;
        }
        while sibuya_survival(g, hi) > tail {
            match hi.checked_mul(2) {
                Some(next) => hi = next,
                None => return u64::MAX,
            }
        }
        while lo + 1 < hi {
            let mid = lo + (hi - lo) / 2;
            if sibuya_survival(g, mid) > tail {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// A heavy-tailed ingredient law with validated parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum TailLaw {
    /// `P{X > x} = (x/s)^{-alpha}` for `x >= s`.
    Pareto { alpha: f64, lower: f64 },
    /// CDF `exp(-x^{-r})`.
    Frechet { shape: f64 },
    /// Laplace transform `e^{-t^gamma}`.
    PositiveStable { gamma: f64 },
    /// pgf `1 - (1-z)^gamma` on the positive integers.
    Sibuya { gamma: f64 },
}

impl TailLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TailLaw::Pareto { alpha, lower } => {
                if alpha <= 0.0 || lower <= 0.0 {
                    return Err(Error::param(format!(
                        "Pareto needs alpha > 0 and lower bound > 0 (got {alpha}, {lower})"
                    )));
                }
            }
            TailLaw::Frechet { shape } => {
                if shape <= 0.0 {
                    return Err(Error::param(format!("Fréchet shape must be > 0, got {shape}")));
                }
            }
            TailLaw::PositiveStable { gamma } | TailLaw::Sibuya { gamma } => {
                if !(gamma > 0.0 && gamma < 1.0) {
                    return Err(Error::param(format!(
                        "stable/Sibuya exponent must lie in (0,1), got {gamma}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            TailLaw::Pareto { alpha, lower } => sample_pareto(alpha, lower, rng),
            TailLaw::Frechet { shape } => sample_frechet(shape, rng),
            TailLaw::PositiveStable { gamma } => sample_positive_stable(gamma, rng),
            TailLaw::Sibuya { gamma } => SibuyaSampler::new(gamma).unwrap().sample(rng) as f64,
        }
    }
}

/// Which closed form the normalizing sequence follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizerRule {
    /// `a_n = (n d)^{1/alpha}`, from `sup{t : F̄(t) > (nd)^{-1}}` with a pure
    /// power tail.
    Iid,
    /// `a_n = n^{1/alpha}`, from `sup{t : F̄(t) > n^{-1}}`.
    Spike,
    /// `a_n = n d^{1/r}`.
    Logistic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalizer {
    pub a_n: f64,
    pub n: u64,
    pub d: u64,
    pub rule: NormalizerRule,
}

pub fn normalizer(rule: NormalizerRule, tail_param: f64, n: u64, d: u64) -> Result<Normalizer> {
    if n == 0 || d == 0 {
        return Err(Error::param(format!("normalizer needs n, d >= 1 (got {n}, {d})")));
    }
    if tail_param <= 0.0 {
        return Err(Error::param(format!("tail parameter must be > 0, got {tail_param}")));
    }
    let a_n = match rule {
        NormalizerRule::Iid => ((n * d) as f64).powf(1.0 / tail_param),
        NormalizerRule::Spike => (n as f64).powf(1.0 / tail_param),
        NormalizerRule::Logistic => n as f64 * (d as f64).powf(1.0 / tail_param),
    };
    Ok(Normalizer { a_n, n, d, rule })
}
