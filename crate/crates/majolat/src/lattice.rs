//! Meet, join, and the direct-sum precursor relations.
//!
//! The meet of `p` and `q` is the distribution whose Lorenz curve is the
//! pointwise minimum of the two input curves; the minimum of two concave
//! curves is concave, so differencing it yields a sorted vector directly.
//! The max curve is not concave, so the join needs its least concave
//! majorant: a single monotone-chain pass over the pointwise-max Lorenz
//! points, with increments spread at constant slope across removed points.
//!
//! The precursor relations compared here:
//!
//! - `(p ∧ q) ⊕ (p ∨ q) ≺ p ⊕ q`
//! - `p ⊕ q ≺ (p ∧ q) ⊕ e`, with `e = (1, 0, ..., 0)`
//! - `p ⊗ q ≺ p ∧ q`
//!
//! The first is witnessed constructively by a sequence of T-transforms on
//! the concatenation `(p, q)`, one per prefix-sum sign change; see
//! [`decompose_ttransforms`].

use crate::dist::{compare, compare_weights, Comparison, Distribution, WeightVector};
use crate::error::Error;
use crate::scalar::{Backend, Scalar};

/// Elementary transfer `T = λI + (1-λ)P_ij`: a doubly stochastic mix of
/// two coordinates. Applying one always moves a vector downward in the
/// majorization order.
#[derive(Clone, Debug, PartialEq)]
pub struct TTransform<S: Scalar> {
    lam: S,
    i: usize,
    j: usize,
}

impl<S: Scalar> TTransform<S> {
    pub fn new(lam: S, i: usize, j: usize) -> Self {
        assert!(i != j, "transfer needs two distinct coordinates");
        assert!(
            lam >= S::zero() && lam <= S::one(),
            "mixing weight must lie in [0, 1]"
        );
        Self { lam, i, j }
    }

    pub fn lam(&self) -> &S {
        &self.lam
    }

    pub fn indices(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    /// Apply in place. Preserves the sum of the two touched coordinates.
    pub fn apply(&self, v: &mut [S]) {
        let a = v[self.i].clone();
        let b = v[self.j].clone();
        let keep = self.lam.clone();
        let swap = S::one() - self.lam.clone();
        v[self.i] = keep.clone() * a.clone() + swap.clone() * b.clone();
        v[self.j] = swap * a + keep * b;
    }
}

/// Meet, join, and the raw (pre-flattening) join precursor of one pair.
#[derive(Clone, Debug)]
pub struct MeetJoinPair<S: Scalar> {
    meet: Distribution<S>,
    join: Distribution<S>,
    beta_raw: Vec<S>,
}

impl<S: Scalar> MeetJoinPair<S> {
    pub fn new(p: &Distribution<S>, q: &Distribution<S>) -> Self {
        Self { meet: meet(p, q), join: join(p, q), beta_raw: beta(p, q) }
    }

    pub fn meet(&self) -> &Distribution<S> {
        &self.meet
    }

    pub fn join(&self) -> &Distribution<S> {
        &self.join
    }

    /// `β(p, q)` in construction order; possibly unsorted, total 1.
    pub fn beta_raw(&self) -> &[S] {
        &self.beta_raw
    }

    /// `β` sorted descending, as a total-1 weight vector.
    pub fn beta_sorted(&self) -> WeightVector<S> {
        WeightVector::from_unsorted(self.beta_raw.clone())
    }
}

fn padded_prefixes<S: Scalar>(p: &Distribution<S>, q: &Distribution<S>) -> (Vec<S>, Vec<S>, usize) {
    let d = p.dim().max(q.dim());
    (prefix_sums(p.values(), d), prefix_sums(q.values(), d), d)
}

fn prefix_sums<S: Scalar>(values: &[S], d: usize) -> Vec<S> {
    let mut sums = Vec::with_capacity(d + 1);
    sums.push(S::zero());
    let mut acc = S::zero();
    for k in 0..d {
        if let Some(v) = values.get(k) {
            acc = acc + v.clone();
        }
        sums.push(acc.clone());
    }
    sums
}

fn min_ref<'a, S: PartialOrd>(a: &'a S, b: &'a S) -> &'a S {
    if b < a {
        b
    } else {
        a
    }
}

fn max_ref<'a, S: PartialOrd>(a: &'a S, b: &'a S) -> &'a S {
    if b > a {
        b
    } else {
        a
    }
}

/// Greatest lower bound `p ∧ q`: increments of the pointwise-min Lorenz
/// curve. The result is sorted by construction and majorized by both
/// arguments.
pub fn meet<S: Scalar>(p: &Distribution<S>, q: &Distribution<S>) -> Distribution<S> {
    let (sp, sq, d) = padded_prefixes(p, q);
    let mut out = Vec::with_capacity(d);
    let mut prev = S::zero();
    for k in 1..=d {
        let cur = min_ref(&sp[k], &sq[k]).clone();
        out.push(cur.clone() - prev);
        prev = cur;
    }
    Distribution::from_computed(out)
}

/// Increments of the pointwise-max Lorenz curve, in construction order.
/// Sums to 1 but need not be sorted; the join flattens it.
pub fn beta<S: Scalar>(p: &Distribution<S>, q: &Distribution<S>) -> Vec<S> {
    let (sp, sq, d) = padded_prefixes(p, q);
    let mut out = Vec::with_capacity(d);
    let mut prev = S::zero();
    for k in 1..=d {
        let cur = max_ref(&sp[k], &sq[k]).clone();
        out.push(cur.clone() - prev);
        prev = cur;
    }
    out
}

/// Least upper bound `p ∨ q`: the least concave majorant of the
/// pointwise-max Lorenz points, differenced back into a distribution.
///
/// One monotone-chain pass builds the upper concave hull of the `d + 1`
/// points `(k, max(S_k(p), S_k(q)))`; increments across skipped points
/// share the segment slope.
pub fn join<S: Scalar>(p: &Distribution<S>, q: &Distribution<S>) -> Distribution<S> {
    let (sp, sq, d) = padded_prefixes(p, q);
    // Upper hull stack of (k, S_k) with strictly decreasing slopes.
    let mut hull: Vec<(usize, S)> = Vec::with_capacity(d + 1);
    for k in 0..=d {
        let y = max_ref(&sp[k], &sq[k]).clone();
        while hull.len() >= 2 {
            let (x1, y1) = &hull[hull.len() - 2];
            let (x2, y2) = &hull[hull.len() - 1];
            // Drop the middle point when it lies on or below the chord:
            // (y2 - y1)(k - x1) <= (y - y1)(x2 - x1).
            let lhs = (y2.clone() - y1.clone()) * S::from_int((k - x1) as i64);
            let rhs = (y.clone() - y1.clone()) * S::from_int((x2 - x1) as i64);
            if lhs <= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((k, y));
    }
    let mut out = Vec::with_capacity(d);
    for pair in hull.windows(2) {
        let (x1, y1) = &pair[0];
        let (x2, y2) = &pair[1];
        let slope = (y2.clone() - y1.clone()) / S::from_int((x2 - x1) as i64);
        for _ in *x1..*x2 {
            out.push(slope.clone());
        }
    }
    Distribution::from_computed(out)
}

/// The T-transforms that carry the concatenation `(p_1..p_d, q_1..q_d)`
/// onto the multiset union of `p ∧ q` and `β(p, q)`.
///
/// One transform is emitted per strict sign change of the prefix-sum gap
/// `S_k(p) - S_k(q)`: at a change from index `t-1` to `t`, the transform
/// mixes positions `t-1` and `d+t-1` with weight
/// `λ = 1 - Δ / |p_t - q_t|`, where `Δ` is the gap held by the previously
/// dominant side. Equal-prefix indices emit nothing (`Δ = 0` makes the
/// transform the identity).
pub fn decompose_ttransforms<S: Scalar>(
    p: &Distribution<S>,
    q: &Distribution<S>,
    backend: &Backend<S>,
) -> Result<Vec<TTransform<S>>, Error> {
    let (sp, sq, d) = padded_prefixes(p, q);
    let entry = |values: &[S], k: usize| values.get(k).cloned().unwrap_or_else(S::zero);
    let mut out = Vec::new();
    let mut prev_sign = 0i8; // sign of S_k(p) - S_k(q); 0 at k = 0
    for t in 1..=d {
        let sign = if backend.eq(&sp[t], &sq[t]) {
            0
        } else if sp[t] > sq[t] {
            1
        } else {
            -1
        };
        if prev_sign == 1 && sign == -1 {
            // p held the prefix lead through t-1 and loses it at t:
            // (p_t, q_t) -> (p_t + Δ, q_t - Δ) with q_t - p_t > Δ >= 0.
            let delta = sp[t - 1].clone() - sq[t - 1].clone();
            let denom = entry(q.values(), t - 1) - entry(p.values(), t - 1);
            out.push(transfer(delta, denom, t - 1, d + t - 1, t)?);
        } else if prev_sign == -1 && sign == 1 {
            let delta = sq[t - 1].clone() - sp[t - 1].clone();
            let denom = entry(p.values(), t - 1) - entry(q.values(), t - 1);
            out.push(transfer(delta, denom, t - 1, d + t - 1, t)?);
        }
        if sign != 0 {
            prev_sign = sign;
        } else if prev_sign != 0 {
            // A tie resets the bookkeeping: the entries at the tie index are
            // already entries of p and q up to a swap, and any later lead
            // starts from Δ = 0.
            prev_sign = 0;
        }
    }
    Ok(out)
}

fn transfer<S: Scalar>(
    delta: S,
    denom: S,
    i: usize,
    j: usize,
    index: usize,
) -> Result<TTransform<S>, Error> {
    if denom <= S::zero() {
        // The proof guarantees the now-dominant side's entry is strictly
        // larger whenever Δ > 0; hitting this means inconsistent input.
        return Err(Error::DegenerateTransfer { index });
    }
    let mut lam = S::one() - delta / denom;
    // Float rounding can land a hair outside [0, 1]; exact backends never do.
    if lam < S::zero() {
        lam = S::zero();
    }
    if lam > S::one() {
        lam = S::one();
    }
    Ok(TTransform::new(lam, i, j))
}

/// The concatenation `(p_1..p_d, q_1..q_d)` (padded, unsorted) that
/// [`decompose_ttransforms`] acts on.
pub fn concatenation<S: Scalar>(p: &Distribution<S>, q: &Distribution<S>) -> Vec<S> {
    let d = p.dim().max(q.dim());
    let mut v = Vec::with_capacity(2 * d);
    v.extend_from_slice(p.values());
    v.resize(d, S::zero());
    v.extend_from_slice(q.values());
    v.resize(2 * d, S::zero());
    v
}

/// Relation between `(p ∧ q) ⊕ (p ∨ q)` and `p ⊕ q`. Always
/// `FirstMajorized` or `Equal`.
pub fn precursor_supermodular<S: Scalar>(
    p: &Distribution<S>,
    q: &Distribution<S>,
    backend: &Backend<S>,
) -> Comparison {
    let m = meet(p, q);
    let j = join(p, q);
    compare_weights(&m.direct_sum(&j), &p.direct_sum(q), backend)
}

/// Relation between `p ⊕ q` and `(p ∧ q) ⊕ e`. Always `FirstMajorized`
/// or `Equal`.
pub fn precursor_subadditive<S: Scalar>(
    p: &Distribution<S>,
    q: &Distribution<S>,
    backend: &Backend<S>,
) -> Comparison {
    let d = p.dim().max(q.dim());
    let m = meet(p, q);
    let e = Distribution::point_mass(d);
    compare_weights(&p.direct_sum(q), &m.direct_sum(&e), backend)
}

/// Relation between `p ⊗ q` and `p ∧ q` (padded). Always `FirstMajorized`
/// or `Equal`.
pub fn precursor_tensor<S: Scalar>(
    p: &Distribution<S>,
    q: &Distribution<S>,
    backend: &Backend<S>,
) -> Comparison {
    let t = p.tensor(q);
    let m = meet(p, q);
    compare(&t, &m, backend)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn dist(v: &[f64]) -> Distribution<f64> {
        Distribution::new(v.to_vec(), &Backend::float64()).unwrap()
    }

    fn exact(v: &[(i64, i64)]) -> Distribution<BigRational> {
        let raw = v.iter().map(|&(n, d)| BigRational::from_ratio(n, d)).collect();
        Distribution::new(raw, &Backend::exact()).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) {
        assert_eq!(a.len(), b.len(), "{a:?} vs {b:?}");
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-12, "{a:?} vs {b:?}");
        }
    }

    // Running example pair used throughout: prefix sums cross once.
    fn pair_a() -> (Distribution<f64>, Distribution<f64>) {
        (dist(&[0.5, 0.5, 0.0]), dist(&[0.6, 0.2, 0.2]))
    }

    #[test]
    fn meet_of_crossing_pair() {
        // Oracle: min of prefix sums (0.5, 1.0, 1.0) and (0.6, 0.8, 1.0)
        // is (0.5, 0.8, 1.0); differenced: (0.5, 0.3, 0.2).
        let (p, q) = pair_a();
        close(meet(&p, &q).values(), &[0.5, 0.3, 0.2]);
        close(meet(&q, &p).values(), &[0.5, 0.3, 0.2]);
    }

    #[test]
    fn meet_is_idempotent_and_absorbs_comparable_pairs() {
        let p = dist(&[0.5, 0.3, 0.2]);
        close(meet(&p, &p).values(), p.values());
        let q = dist(&[0.7, 0.2, 0.1]); // p ≺ q
        assert_eq!(compare(&p, &q, &Backend::float64()), Comparison::FirstMajorized);
        close(meet(&p, &q).values(), p.values());
    }

    #[test]
    fn beta_may_be_unsorted() {
        // Max prefix sums (0.5, 0.7, 1.0, 1.0) differenced: (0.5, 0.2, 0.3, 0);
        // entry 3 exceeds entry 2.
        let p = dist(&[0.5, 0.2, 0.15, 0.15]);
        let q = dist(&[0.4, 0.3, 0.3, 0.0]);
        close(&beta(&p, &q), &[0.5, 0.2, 0.3, 0.0]);
        close(&beta(&p, &p), p.values());

        let (p, q) = pair_a();
        close(&beta(&p, &q), &[0.6, 0.4, 0.0]);
    }

    #[test]
    fn join_flattens_the_convex_dent() {
        // Hull of (0,0), (1,0.5), (2,0.7), (3,1), (4,1): the point (2,0.7)
        // sits below the chord value 0.75 and is removed.
        let p = dist(&[0.5, 0.2, 0.15, 0.15]);
        let q = dist(&[0.4, 0.3, 0.3, 0.0]);
        close(join(&p, &q).values(), &[0.5, 0.25, 0.25, 0.0]);

        // β already sorted: join = β.
        let (p, q) = pair_a();
        close(join(&p, &q).values(), &[0.6, 0.4, 0.0]);
    }

    #[test]
    fn join_absorbs_comparable_pairs() {
        let p = dist(&[0.5, 0.3, 0.2]);
        let q = dist(&[0.7, 0.2, 0.1]);
        close(join(&p, &q).values(), q.values());
        close(join(&p, &p).values(), p.values());
    }

    #[test]
    fn lattice_ops_are_exact_on_rationals() {
        let p = exact(&[(1, 2), (1, 2), (0, 1)]);
        let q = exact(&[(3, 5), (1, 5), (1, 5)]);
        let m = meet(&p, &q);
        assert_eq!(
            m.values(),
            &[
                BigRational::from_ratio(1, 2),
                BigRational::from_ratio(3, 10),
                BigRational::from_ratio(1, 5)
            ]
        );
        let j = join(&p, &q);
        assert_eq!(
            j.values(),
            &[
                BigRational::from_ratio(3, 5),
                BigRational::from_ratio(2, 5),
                BigRational::from_ratio(0, 1)
            ]
        );
    }

    #[test]
    fn ttransform_moves_mass_downward() {
        let be = Backend::float64();
        let p = dist(&[0.7, 0.2, 0.1]);
        let mut v = p.values().to_vec();
        TTransform::new(0.5, 0, 2).apply(&mut v);
        let moved = Distribution::new(v, &be).unwrap();
        assert_eq!(compare(&moved, &p, &be), Comparison::FirstMajorized);
    }

    #[test]
    fn decomposition_of_the_running_example() {
        // One sign change: prefix gap 0.6 > 0.5 then 0.8 < 1.0. The swap
        // pairs p_2 = 0.5 with q_2 = 0.2, Δ = 0.1, λ = 1 - 0.1/0.3 = 2/3.
        let (p, q) = pair_a();
        let ts = decompose_ttransforms(&p, &q, &Backend::float64()).unwrap();
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].indices(), (1, 4));
        assert!((ts[0].lam() - 2.0 / 3.0).abs() < 1e-12);

        let mut v = concatenation(&p, &q);
        for t in &ts {
            t.apply(&mut v);
        }
        // Result holds meet and beta entries up to permutation.
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        close(&v, &[0.6, 0.5, 0.4, 0.3, 0.2, 0.0]);
    }

    #[test]
    fn decomposition_is_empty_for_comparable_pairs() {
        let p = dist(&[0.5, 0.3, 0.2]);
        let q = dist(&[0.7, 0.2, 0.1]);
        let ts = decompose_ttransforms(&p, &q, &Backend::float64()).unwrap();
        assert!(ts.is_empty());
    }

    #[test]
    fn decomposition_reproduces_meet_and_beta_exactly() {
        let be = Backend::exact();
        let p = exact(&[(1, 2), (1, 2), (0, 1)]);
        let q = exact(&[(3, 5), (1, 5), (1, 5)]);
        let ts = decompose_ttransforms(&p, &q, &be).unwrap();
        let mut v = concatenation(&p, &q);
        for t in &ts {
            t.apply(&mut v);
        }
        let mut expect = meet(&p, &q).values().to_vec();
        expect.extend(beta(&p, &q));
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        expect.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert_eq!(v, expect);
    }

    #[test]
    fn precursors_on_the_running_example() {
        // Hand prefix sums: B = (0.6,1.1,1.5,1.8,2.0,2.0) ≤ A = (0.6,1.1,1.6,1.8,2.0,2.0);
        // C = (1,1.5,1.8,2,2,2) dominates A.
        let be = Backend::float64();
        let (p, q) = pair_a();
        assert_eq!(precursor_supermodular(&p, &q, &be), Comparison::FirstMajorized);
        assert_eq!(precursor_subadditive(&p, &q, &be), Comparison::FirstMajorized);
        assert_eq!(precursor_tensor(&p, &q, &be), Comparison::FirstMajorized);
    }

    #[test]
    fn precursors_degenerate_to_equality() {
        let be = Backend::float64();
        let p = dist(&[0.5, 0.3, 0.2]);
        assert_eq!(precursor_supermodular(&p, &p, &be), Comparison::Equal);
        let q = dist(&[0.7, 0.2, 0.1]);
        // Comparable pair: meet and join are p and q as multisets.
        assert_eq!(precursor_supermodular(&p, &q, &be), Comparison::Equal);

        // p = q = (1, 0): A = (1,1,0,0) = C.
        let e2 = dist(&[1.0, 0.0]);
        assert_eq!(precursor_subadditive(&e2, &e2, &be), Comparison::Equal);
        // Uniform d=2: A = (0.5,0.5,0.5,0.5) ≺ C = (1,0.5,0.5,0).
        let u2 = dist(&[0.5, 0.5]);
        assert_eq!(precursor_subadditive(&u2, &u2, &be), Comparison::FirstMajorized);

        // q = point mass: tensor = p padded, meet = p.
        let e3 = dist(&[1.0, 0.0, 0.0]);
        let (p3, _) = pair_a();
        assert_eq!(precursor_tensor(&p3, &e3, &be), Comparison::Equal);
        let one = dist(&[1.0]);
        assert_eq!(precursor_tensor(&one, &one, &be), Comparison::Equal);
    }

    #[test]
    fn meet_join_pair_collects_everything() {
        let (p, q) = pair_a();
        let mj = MeetJoinPair::new(&p, &q);
        close(mj.meet().values(), &[0.5, 0.3, 0.2]);
        close(mj.join().values(), &[0.6, 0.4, 0.0]);
        assert!((mj.beta_sorted().total() - 1.0).abs() < 1e-12);
    }
}
