//! Probability vectors, the majorization pre-order, and Lorenz curves.
//!
//! A [`Distribution`] lives on the descending-sorted simplex: entries are
//! non-negative, sorted non-increasingly, and sum to one (up to the backend
//! tolerance; exactly under the rational backend). Majorization `p ≺ q`
//! holds when every prefix sum of `p` is dominated by the corresponding
//! prefix sum of `q` and the totals agree.
//!
//! Binary operations pad the shorter argument with zeros before doing any
//! work, so mixed dimensions are always legal. Off-simplex input is
//! rejected, never renormalized.

use num_rational::BigRational;
use serde_json::Value;

use crate::error::Error;
use crate::scalar::{sort_desc, Backend, Scalar};

/// Probability vector sorted non-increasingly, mass 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution<S: Scalar> {
    values: Vec<S>,
}

/// Non-negative vector sorted non-increasingly with arbitrary total mass.
///
/// Direct sums of two distributions carry total 2; the raw join precursor
/// carries total 1.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector<S: Scalar> {
    values: Vec<S>,
    total: S,
}

/// Cumulative sums `S_0 = 0, S_1, ..., S_n` of a sorted vector.
///
/// The curve of a descending-sorted vector is concave: its increments are
/// non-increasing. Indices past the end evaluate to the total mass,
/// mirroring the convention that `S_k = 1` for `k > d`.
#[derive(Clone, Debug, PartialEq)]
pub struct LorenzCurve<S: Scalar> {
    sums: Vec<S>,
}

/// Outcome of a majorization comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    /// All prefix sums agree (up to tolerance).
    Equal,
    /// `p ≺ q` strictly (`p` is majorized by `q`, `p ≠ q`).
    FirstMajorized,
    /// `q ≺ p` strictly.
    SecondMajorized,
    /// Prefix sums cross: neither direction holds.
    Incomparable,
}

impl Comparison {
    pub fn is_comparable(self) -> bool {
        self != Comparison::Incomparable
    }

    /// The comparison with the arguments swapped.
    pub fn flip(self) -> Self {
        match self {
            Comparison::FirstMajorized => Comparison::SecondMajorized,
            Comparison::SecondMajorized => Comparison::FirstMajorized,
            other => other,
        }
    }

    /// Wire name used in CSV reports.
    pub fn as_str(self) -> &'static str {
        match self {
            Comparison::Equal => "Equal",
            Comparison::FirstMajorized => "FirstMajorized",
            Comparison::SecondMajorized => "SecondMajorized",
            Comparison::Incomparable => "Incomparable",
        }
    }
}

impl std::fmt::Display for Comparison {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl<S: Scalar> Distribution<S> {
    /// Build a distribution from raw entries.
    ///
    /// Entries may arrive unsorted; they are stable-sorted descending.
    /// Entries within tolerance below zero are clamped to zero. The mass
    /// must already be 1: off-sum input is an error, not repaired.
    pub fn new(raw: Vec<S>, backend: &Backend<S>) -> Result<Self, Error> {
        if raw.is_empty() {
            return Err(Error::EmptyVector);
        }
        let mut values = Vec::with_capacity(raw.len());
        for (index, v) in raw.into_iter().enumerate() {
            // Negated predicate so NaN fails validation.
            if !(v >= -backend.tolerance().clone()) {
                return Err(Error::NegativeEntry { index, value: v.to_f64() });
            }
            values.push(if v < S::zero() { S::zero() } else { v });
        }
        let total = sum(&values);
        if !backend.eq(&total, &S::one()) {
            return Err(Error::MassNotOne { total: total.to_f64() });
        }
        sort_desc(&mut values);
        Ok(Self { values })
    }

    /// `(1, 0, ..., 0)` in dimension `d`.
    pub fn point_mass(d: usize) -> Self {
        assert!(d >= 1);
        let mut values = vec![S::zero(); d];
        values[0] = S::one();
        Self { values }
    }

    /// `(1/d, ..., 1/d)`.
    pub fn uniform(d: usize) -> Self {
        assert!(d >= 1);
        Self { values: vec![S::from_ratio(1, d as i64); d] }
    }

    /// Internal constructor for vectors that are sorted by construction
    /// (meet, join, tensor outputs). Re-sorts to keep the invariant exact
    /// even when float rounding produces ulp-level inversions.
    pub(crate) fn from_computed(mut values: Vec<S>) -> Self {
        debug_assert!(values.iter().all(|v| *v >= S::zero()));
        sort_desc(&mut values);
        Self { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// Append zeros up to `d_target`.
    pub fn pad(&self, d_target: usize) -> Result<Self, Error> {
        if d_target < self.dim() {
            return Err(Error::TargetTooSmall { target: d_target, current: self.dim() });
        }
        let mut values = self.values.clone();
        values.resize(d_target, S::zero());
        Ok(Self { values })
    }

    pub fn lorenz(&self) -> LorenzCurve<S> {
        LorenzCurve::from_values(&self.values)
    }

    /// Direct sum `p ⊕ q`: concatenation of the (padded) entries, sorted
    /// descending. Total mass 2, length `2·max(dim p, dim q)`.
    pub fn direct_sum(&self, other: &Self) -> WeightVector<S> {
        let d = self.dim().max(other.dim());
        let mut values = Vec::with_capacity(2 * d);
        values.extend_from_slice(&self.values);
        values.resize(d, S::zero());
        values.extend_from_slice(&other.values);
        values.resize(2 * d, S::zero());
        WeightVector::from_unsorted(values)
    }

    /// Tensor product: all pairwise products, sorted descending.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut values = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.values {
            for b in &other.values {
                values.push(a.clone() * b.clone());
            }
        }
        Self::from_computed(values)
    }

    /// Lossy conversion to the float backend.
    pub fn to_float(&self) -> Distribution<f64> {
        Distribution { values: self.values.iter().map(Scalar::to_f64).collect() }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.values.iter().map(Scalar::to_json).collect())
    }

    /// Parse a JSON array of entries (numbers, or `"num/den"` strings under
    /// the rational backend).
    pub fn from_json(v: &Value, backend: &Backend<S>) -> Result<Self, Error> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Parse(format!("expected a JSON array, got {v}")))?;
        let raw = arr.iter().map(S::from_json).collect::<Result<Vec<_>, _>>()?;
        Self::new(raw, backend)
    }

    pub fn from_json_str(s: &str, backend: &Backend<S>) -> Result<Self, Error> {
        let v: Value =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
        Self::from_json(&v, backend)
    }
}

impl Distribution<f64> {
    /// Exact rational image of the stored doubles, renormalized by the
    /// exact sum so the rational mass is exactly 1. (The doubles sum to 1
    /// only up to representation error, which the exact backend would
    /// otherwise reject.)
    pub fn to_exact(&self) -> Distribution<BigRational> {
        let values: Vec<BigRational> =
            self.values.iter().map(|&x| <BigRational as Scalar>::from_f64(x)).collect();
        let total = sum(&values);
        Distribution { values: values.into_iter().map(|v| v / total.clone()).collect() }
    }
}

impl<S: Scalar> WeightVector<S> {
    pub(crate) fn from_unsorted(mut values: Vec<S>) -> Self {
        sort_desc(&mut values);
        let total = sum(&values);
        Self { values, total }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn total(&self) -> &S {
        &self.total
    }

    pub fn lorenz(&self) -> LorenzCurve<S> {
        LorenzCurve::from_values(&self.values)
    }

    /// Divide a total-2 weight vector (a direct sum) by two, yielding a
    /// genuine distribution.
    pub fn halve(&self, backend: &Backend<S>) -> Result<Distribution<S>, Error> {
        if !backend.eq(&self.total, &S::from_int(2)) {
            return Err(Error::MassNotTwo { total: self.total.to_f64() });
        }
        let two = S::from_int(2);
        let values = self.values.iter().map(|v| v.clone() / two.clone()).collect();
        Ok(Distribution { values })
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.values.iter().map(Scalar::to_json).collect())
    }
}

impl<S: Scalar> LorenzCurve<S> {
    pub(crate) fn from_values(values: &[S]) -> Self {
        let mut sums = Vec::with_capacity(values.len() + 1);
        sums.push(S::zero());
        let mut acc = S::zero();
        for v in values {
            acc = acc + v.clone();
            sums.push(acc.clone());
        }
        Self { sums }
    }

    /// Number of increments (the underlying vector's length).
    pub fn len(&self) -> usize {
        self.sums.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `S_0, ..., S_n`.
    pub fn partial_sums(&self) -> &[S] {
        &self.sums
    }

    /// `S_k`, extended by `S_k = total` for `k > n`.
    pub fn at(&self, k: usize) -> &S {
        &self.sums[k.min(self.sums.len() - 1)]
    }

    pub fn total(&self) -> &S {
        &self.sums[self.sums.len() - 1]
    }
}

/// Majorization comparison of two distributions (Lorenz dominance with
/// equal totals), padded to a common dimension.
pub fn compare<S: Scalar>(
    p: &Distribution<S>,
    q: &Distribution<S>,
    backend: &Backend<S>,
) -> Comparison {
    dominance(&p.values, &q.values, backend)
}

/// Majorization comparison of two weight vectors. Vectors whose totals
/// differ beyond tolerance are incomparable by definition.
pub fn compare_weights<S: Scalar>(
    a: &WeightVector<S>,
    b: &WeightVector<S>,
    backend: &Backend<S>,
) -> Comparison {
    dominance(&a.values, &b.values, backend)
}

fn dominance<S: Scalar>(p: &[S], q: &[S], backend: &Backend<S>) -> Comparison {
    let n = p.len().max(q.len());
    let mut sp = S::zero();
    let mut sq = S::zero();
    let mut first_le = true; // S_k(p) <= S_k(q) for all k so far
    let mut second_le = true;
    for k in 0..n {
        if let Some(v) = p.get(k) {
            sp = sp + v.clone();
        }
        if let Some(v) = q.get(k) {
            sq = sq + v.clone();
        }
        first_le &= backend.le(&sp, &sq);
        second_le &= backend.le(&sq, &sp);
        if !first_le && !second_le {
            return Comparison::Incomparable;
        }
    }
    // Equal totals are part of the relation: a strict mass mismatch breaks
    // both directions.
    if !backend.eq(&sp, &sq) {
        return Comparison::Incomparable;
    }
    match (first_le, second_le) {
        (true, true) => Comparison::Equal,
        (true, false) => Comparison::FirstMajorized,
        (false, true) => Comparison::SecondMajorized,
        (false, false) => unreachable!(),
    }
}

fn sum<S: Scalar>(values: &[S]) -> S {
    values.iter().fold(S::zero(), |acc, v| acc + v.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(v: &[f64]) -> Distribution<f64> {
        Distribution::new(v.to_vec(), &Backend::float64()).unwrap()
    }

    #[test]
    fn construction_sorts_descending() {
        assert_eq!(dist(&[0.2, 0.5, 0.3]).values(), &[0.5, 0.3, 0.2]);
        assert_eq!(dist(&[1.0]).values(), &[1.0]);
    }

    #[test]
    fn off_sum_input_is_rejected() {
        let err = Distribution::new(vec![0.5, 0.6], &Backend::float64()).unwrap_err();
        assert!(matches!(err, Error::MassNotOne { .. }));
    }

    #[test]
    fn negative_entry_is_rejected_but_tolerance_slack_is_clamped() {
        let be = Backend::float64();
        let err = Distribution::new(vec![1.1, -0.1], &be).unwrap_err();
        assert!(matches!(err, Error::NegativeEntry { index: 1, .. }));
        let d = Distribution::new(vec![1.0, -1e-12, 1e-12], &be).unwrap();
        assert!(d.values()[2] >= 0.0);
    }

    #[test]
    fn nan_is_rejected() {
        let err = Distribution::new(vec![f64::NAN, 1.0], &Backend::float64()).unwrap_err();
        assert!(matches!(err, Error::NegativeEntry { index: 0, .. }));
    }

    #[test]
    fn empty_is_rejected() {
        assert!(matches!(
            Distribution::<f64>::new(vec![], &Backend::float64()),
            Err(Error::EmptyVector)
        ));
    }

    #[test]
    fn pad_appends_zeros_and_preserves_prefix_sums() {
        let p = dist(&[0.6, 0.4]);
        let padded = p.pad(3).unwrap();
        assert_eq!(padded.values(), &[0.6, 0.4, 0.0]);
        assert_eq!(p.pad(2).unwrap().values(), p.values());
        assert!(matches!(p.pad(1), Err(Error::TargetTooSmall { .. })));
        let one = dist(&[1.0]).pad(4).unwrap();
        assert_eq!(one.values(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn lorenz_prefix_sums() {
        assert_eq!(dist(&[0.5, 0.3, 0.2]).lorenz().partial_sums(), &[0.0, 0.5, 0.8, 1.0]);
        assert_eq!(dist(&[1.0, 0.0, 0.0]).lorenz().partial_sums(), &[0.0, 1.0, 1.0, 1.0]);
        assert_eq!(
            dist(&[0.25, 0.25, 0.25, 0.25]).lorenz().partial_sums(),
            &[0.0, 0.25, 0.5, 0.75, 1.0]
        );
        // Past-the-end convention.
        let c = dist(&[0.7, 0.3]).lorenz();
        assert_eq!(*c.at(5), 1.0);
    }

    #[test]
    fn compare_four_outcomes() {
        let be = Backend::float64();
        let uniform = dist(&[1.0 / 3.0; 3]);
        let point = dist(&[1.0, 0.0, 0.0]);
        assert_eq!(compare(&uniform, &point, &be), Comparison::FirstMajorized);
        assert_eq!(compare(&point, &uniform, &be), Comparison::SecondMajorized);
        // Prefix sums (0.5, 1.0) vs (0.6, 0.8) cross.
        let p = dist(&[0.5, 0.5, 0.0]);
        let q = dist(&[0.6, 0.2, 0.2]);
        assert_eq!(compare(&p, &q, &be), Comparison::Incomparable);
        let r = dist(&[0.7, 0.3]);
        assert_eq!(compare(&r, &r.clone(), &be), Comparison::Equal);
    }

    #[test]
    fn compare_pads_mixed_dimensions() {
        let be = Backend::float64();
        let p = dist(&[0.6, 0.4]);
        let q = dist(&[0.6, 0.4, 0.0, 0.0]);
        assert_eq!(compare(&p, &q, &be), Comparison::Equal);
    }

    #[test]
    fn direct_sum_merges_and_sorts() {
        let p = dist(&[0.5, 0.5, 0.0]);
        let q = dist(&[0.6, 0.2, 0.2]);
        let w = p.direct_sum(&q);
        assert_eq!(w.values(), &[0.6, 0.5, 0.5, 0.2, 0.2, 0.0]);
        assert_eq!(*w.total(), 2.0);

        let one = dist(&[1.0]);
        assert_eq!(one.direct_sum(&one).values(), &[1.0, 1.0]);
        let a = dist(&[0.5, 0.5]);
        let b = dist(&[1.0, 0.0]);
        assert_eq!(a.direct_sum(&b).values(), &[1.0, 0.5, 0.5, 0.0]);
    }

    #[test]
    fn tensor_enumerates_products() {
        let p = dist(&[0.5, 0.5, 0.0]);
        let q = dist(&[0.6, 0.2, 0.2]);
        let t = p.tensor(&q);
        let expect = [0.3, 0.3, 0.1, 0.1, 0.1, 0.1, 0.0, 0.0, 0.0];
        assert_eq!(t.dim(), 9);
        for (a, b) in t.values().iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
        // (1) is the identity element.
        let one = dist(&[1.0]);
        let q2 = one.tensor(&q);
        assert_eq!(q2.values(), q.values());
        let h = dist(&[0.5, 0.5]);
        assert_eq!(h.tensor(&h).values(), &[0.25; 4]);
    }

    #[test]
    fn halve_requires_total_two() {
        let p = dist(&[0.5, 0.5, 0.0]);
        let q = dist(&[0.6, 0.2, 0.2]);
        let be = Backend::float64();
        let half = p.direct_sum(&q).halve(&be).unwrap();
        assert_eq!(half.values(), &[0.3, 0.25, 0.25, 0.1, 0.1, 0.0]);

        let w = WeightVector::from_unsorted(vec![0.5, 0.5]);
        assert!(matches!(w.halve(&be), Err(Error::MassNotTwo { .. })));
    }

    #[test]
    fn exact_backend_round_trip() {
        let be = Backend::exact();
        let p = Distribution::from_json_str(r#"["1/2", "1/3", "1/6"]"#, &be).unwrap();
        assert_eq!(p.lorenz().total(), &BigRational::from_int(1));
        let back = Distribution::from_json(&p.to_json(), &be).unwrap();
        assert_eq!(back, p);
        // Exact mass check: 1/2 + 1/3 is not a distribution.
        assert!(Distribution::from_json_str(r#"["1/2", "1/3"]"#, &be).is_err());
    }

    #[test]
    fn float_to_exact_normalizes_mass() {
        use num_traits::One;
        let p = dist(&[0.6, 0.2, 0.2]);
        let e = p.to_exact();
        assert!(e.lorenz().total().is_one());
        for (a, b) in e.to_float().values().iter().zip(p.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
