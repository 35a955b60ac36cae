//! Finite counting measures on the real line.
//!
//! A measure is a finite multiset of nonzero atoms. Atoms are kept sorted by
//! decreasing absolute value; ties in absolute value put the positive atom
//! first and otherwise keep insertion order. Zero atoms are dropped at
//! construction: they contribute nothing to any `‖·‖_p` and the matched-atom
//! metric pads with zeroes anyway, so the sorted representation is canonical.
//!
//! The metric `dm_p` aligns the two sorted atom sequences, pads the shorter
//! one with zeroes, and takes the `ℓ_p` distance of the aligned sequences.
//! `‖μ‖_p = dm_p(μ, 0)`, and for `p = ∞` this is the largest absolute atom.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::pnorm::{lp_norm, CompensatedSum, Lp};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CountingMeasure {
    atoms: Vec<f64>,
}

impl CountingMeasure {
    pub fn empty() -> Self {
        CountingMeasure { atoms: Vec::new() }
    }

    /// Builds a measure from arbitrary atoms. Zeroes are dropped; the rest are
    /// sorted into the canonical order. Non-finite atoms are a programming
    /// error.
    pub fn from_atoms<I: IntoIterator<Item = f64>>(atoms: I) -> Self {
        let mut v: Vec<f64> = atoms
            .into_iter()
            .inspect(|a| assert!(a.is_finite(), "atoms must be finite, got {a}"))
            .filter(|&a| a != 0.0)
            .collect();
        // Stable sort keeps insertion order within full ties.
        v.sort_by(|a, b| {
            b.abs()
                .total_cmp(&a.abs())
                .then(a.is_sign_negative().cmp(&b.is_sign_negative()))
        });
        CountingMeasure { atoms: v }
    }

    /// The embedding of a vector: one atom per nonzero component.
    /// Preserves every `ℓ_p` norm of the vector.
    pub fn embed(x: &[f64]) -> Self {
        Self::from_atoms(x.iter().copied())
    }

    /// A single-atom measure repeated `multiplicity` times, `m·δ_x`.
    pub fn dirac(x: f64, multiplicity: usize) -> Self {
        Self::from_atoms(std::iter::repeat(x).take(multiplicity))
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `‖μ‖_p`; the empty measure has norm 0 for every p.
    pub fn norm(&self, p: Lp) -> f64 {
        lp_norm(&self.atoms, p)
    }

    /// Matched-atom distance: pad the sorted atom sequences with zeroes to a
    /// common length and take the `ℓ_p` distance.
    pub fn dm(&self, other: &CountingMeasure, p: Lp) -> f64 {
        let a = &self.atoms;
        let b = &other.atoms;
        let long = a.len().max(b.len());
        if p.is_infinite() {
            let mut m = 0.0f64;
            for i in 0..long {
                let x = a.get(i).copied().unwrap_or(0.0);
                let y = b.get(i).copied().unwrap_or(0.0);
                m = m.max((x - y).abs());
            }
            return m;
        }
        let pv = p.value();
        let mut acc = CompensatedSum::default();
        for i in 0..long {
            let x = a.get(i).copied().unwrap_or(0.0);
            let y = b.get(i).copied().unwrap_or(0.0);
            let d = (x - y).abs();
            acc.add(if pv == 1.0 { d } else { d.powf(pv) });
        }
        let s = acc.value();
        if pv == 1.0 {
            s
        } else {
            s.powf(1.0 / pv)
        }
    }

    /// Keeps the `k` atoms largest in absolute value.
    pub fn truncate(&self, k: usize) -> Self {
        CountingMeasure {
            atoms: self.atoms[..k.min(self.atoms.len())].to_vec(),
        }
    }

    /// Restriction to `{x : |x| > s}` for `s > 0`.
    pub fn restrict_above(&self, s: f64) -> Self {
        assert!(s > 0.0, "threshold must be positive");
        // Sorted by decreasing |atom|, so the restriction is a prefix.
        let cut = self.atoms.partition_point(|a| a.abs() > s);
        CountingMeasure {
            atoms: self.atoms[..cut].to_vec(),
        }
    }

    /// `μ((−∞,−s) ∪ (s,∞))`.
    pub fn count_above(&self, s: f64) -> usize {
        assert!(s > 0.0, "threshold must be positive");
        self.atoms.partition_point(|a| a.abs() > s)
    }

    /// Scales every atom by `t > 0`.
    pub fn scaled(&self, t: f64) -> Self {
        assert!(t > 0.0 && t.is_finite());
        // Positive scaling preserves the canonical order.
        CountingMeasure {
            atoms: self.atoms.iter().map(|a| a * t).collect(),
        }
    }

    /// Superposition by atom-list concatenation.
    pub fn merged(&self, other: &CountingMeasure) -> Self {
        Self::from_atoms(self.atoms.iter().chain(other.atoms.iter()).copied())
    }

    /// `Σ f(atom)` for a pointwise integrand.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let mut acc = CompensatedSum::default();
        for &a in &self.atoms {
            acc.add(f(a));
        }
        acc.value()
    }
}

impl Serialize for CountingMeasure {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.atoms.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CountingMeasure {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let atoms = Vec::<f64>::deserialize(deserializer)?;
        if let Some(bad) = atoms.iter().find(|a| !a.is_finite()) {
            return Err(serde::de::Error::custom(format!("non-finite atom {bad}")));
        }
        Ok(CountingMeasure::from_atoms(atoms))
    }
}
