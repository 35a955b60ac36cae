//! The `ℓ_p` index and vector norms for `p ∈ [1, ∞]`.

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exponent `p ∈ [1, ∞]` selecting the `ℓ_p` metric.
///
/// The infinite case is stored as `f64::INFINITY`; construction rejects
/// anything below 1 and NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lp(f64);

impl Lp {
    pub const ONE: Lp = Lp(1.0);
    pub const TWO: Lp = Lp(2.0);
    pub const INF: Lp = Lp(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidP(p));
        }
        Ok(Lp(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl std::fmt::Display for Lp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for Lp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Lp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> de::Visitor<'de> for V {
            type Value = Lp;
            fn expecting(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str("a number >= 1 or the string \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Lp, E> {
                Lp::new(v).map_err(|e| E::custom(e.to_string()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Lp, E> {
                self.visit_f64(v as f64)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Lp, E> {
                self.visit_f64(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Lp, E> {
                match v {
                    "inf" | "infinity" | "Inf" | "Infinity" => Ok(Lp::INF),
                    other => other
                        .parse::<f64>()
                        .map_err(|_| E::custom(format!("not a valid p: {other:?}")))
                        .and_then(|p| Lp::new(p).map_err(|e| E::custom(e.to_string()))),
                }
            }
        }
        deserializer.deserialize_any(V)
    }
}

/// Neumaier compensated summation; keeps long power sums accurate.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(self) -> f64 {
        self.sum + self.comp
    }
}

/// `ℓ_p` norm of a vector.
pub fn lp_norm(xs: &[f64], p: Lp) -> f64 {
    if p.is_infinite() {
        return xs.iter().fold(0.0, |m, &x| m.max(x.abs()));
    }
    let pv = p.value();
    if pv == 1.0 {
        let mut acc = CompensatedSum::default();
        for &x in xs {
            acc.add(x.abs());
        }
        return acc.value();
    }
    let mut acc = CompensatedSum::default();
    for &x in xs {
        acc.add(x.abs().powf(pv));
    }
    acc.value().powf(1.0 / pv)
}

/// `ℓ_p` distance between two vectors of equal length.
pub fn lp_dist(a: &[f64], b: &[f64], p: Lp) -> f64 {
    assert_eq!(a.len(), b.len(), "lp_dist: dimension mismatch");
    if p.is_infinite() {
        return a
            .iter()
            .zip(b)
            .fold(0.0, |m, (&x, &y)| m.max((x - y).abs()));
    }
    let pv = p.value();
    let mut acc = CompensatedSum::default();
    if pv == 1.0 {
        for (&x, &y) in a.iter().zip(b) {
            acc.add((x - y).abs());
        }
        return acc.value();
    }
    for (&x, &y) in a.iter().zip(b) {
        acc.add((x - y).abs().powf(pv));
    }
    acc.value().powf(1.0 / pv)
}
