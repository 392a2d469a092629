//! Entropies, divergences, and the entropy-based lattice distance.
//!
//! Shannon, Rényi, and KL values are in bits (base-2 logs). Tsallis values
//! and the Bregman divergence [`w_phi`] are on the natural-log scale; the
//! `log2(e)` conversion factor appears only where a bound needs it.
//!
//! All functions operate positionally on descending-sorted vectors —
//! the convention every correction term downstream relies on — and accept
//! plain slices so they apply to distributions and weight vectors alike.
//! Mismatched lengths are padded with zeros.

use crate::dist::Distribution;
use crate::error::Error;
use crate::lattice::join;

/// Entropy order. Non-negative; values within `1e-12` of 1 dispatch to
/// the Shannon limit rather than the generic formula.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(alpha: f64) -> Result<Self, Error> {
        if alpha.is_finite() && alpha >= 0.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::AlphaOutOfRange { alpha, need: "a finite value >= 0" })
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_one(self) -> bool {
        (self.0 - 1.0).abs() <= 1e-12
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self, Error> {
        Self::new(alpha)
    }
}

/// `x^a` under the convention `0^0 = 0`, so the order-0 power sum counts
/// the support.
fn pow0(x: f64, a: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.powf(a)
    }
}

/// Shannon entropy in bits, with `0·log 0 = 0`.
pub fn shannon(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

/// Shannon entropy in nats.
pub fn shannon_nats(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}

/// Power sum `Σ x_i^α` (the α-th power of the l_α quasinorm).
pub fn alpha_norm_pow(x: &[f64], alpha: Alpha) -> f64 {
    x.iter().map(|&v| pow0(v, alpha.get())).sum()
}

/// Rényi entropy of order α in bits; Shannon at α = 1.
pub fn renyi(p: &[f64], alpha: Alpha) -> f64 {
    if alpha.is_one() {
        shannon(p)
    } else {
        alpha_norm_pow(p, alpha).log2() / (1.0 - alpha.get())
    }
}

/// Tsallis entropy of order α; the α → 1 limit is Shannon in nats.
pub fn tsallis(p: &[f64], alpha: Alpha) -> f64 {
    if alpha.is_one() {
        shannon_nats(p)
    } else {
        (alpha_norm_pow(p, alpha) - 1.0) / (1.0 - alpha.get())
    }
}

/// KL divergence in bits, `Σ_{p_i > 0} p_i log2(p_i / q_i)`, evaluated
/// positionally. `+∞` when the support condition fails.
pub fn kl(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    let mut sum = 0.0;
    for i in 0..n {
        let a = p.get(i).copied().unwrap_or(0.0);
        if a == 0.0 {
            continue;
        }
        let b = q.get(i).copied().unwrap_or(0.0);
        if b == 0.0 {
            return f64::INFINITY;
        }
        sum += a * (a / b).log2();
    }
    sum
}

/// Coordinate-wise Bregman divergence of the convex function
/// `-φ_α`, `φ_α(t) = (t^α - t) / (1 - α)`: `W(x ‖ y) = Σ_i B(x_i, y_i)`
/// with `B(a, b) = g(a) - g(b) - g'(b)(a - b)`, `g = -φ_α`.
///
/// At α = 1 this is the generalized KL `Σ a ln(a/b) - (a - b)` (plain KL
/// in nats for equal totals); at α = 2 it collapses to `Σ (a - b)²`.
/// Non-negative, zero iff `x = y`; `+∞` when α ≤ 1 and some `y_i = 0 <
/// x_i` (the tangent slope of `g` diverges at 0 there).
///
/// Note: this is the derivative-at-the-second-argument Bregman form. The
/// transposed-argument variant `(x - y)φ'(x) + φ(y) - φ(x)` sums to the
/// *negative* of the KL divergence in the α → 1 limit and cannot be the
/// non-negative quantity the refined bounds add, so it is not used.
pub fn w_phi(x: &[f64], y: &[f64], alpha: Alpha) -> f64 {
    let n = x.len().max(y.len());
    let mut sum = 0.0;
    for i in 0..n {
        let a = x.get(i).copied().unwrap_or(0.0);
        let b = y.get(i).copied().unwrap_or(0.0);
        let term = bregman_term(a, b, alpha);
        if term.is_infinite() {
            return f64::INFINITY;
        }
        sum += term;
    }
    // Rounding can leave a tiny negative residue on near-identical inputs.
    sum.max(0.0)
}

fn bregman_term(a: f64, b: f64, alpha: Alpha) -> f64 {
    if a == b {
        return 0.0;
    }
    let al = alpha.get();
    if b == 0.0 {
        // g'(0) is finite only for α > 1.
        return if al > 1.0 { pow0(a, al) / (al - 1.0) } else { f64::INFINITY };
    }
    if alpha.is_one() {
        return if a == 0.0 { b } else { a * (a / b).ln() - (a - b) };
    }
    if a == 0.0 {
        return pow0(b, al);
    }
    pow0(b, al) + (al * a * pow0(b, al - 1.0) - pow0(a, al)) / (1.0 - al)
}

/// Entropy distance on the lattice:
/// `d_α(p, q) = H_α(p) + H_α(q) - 2 H_α(p ∨ q)`, for α ≥ 1.
///
/// Symmetric, non-negative, zero iff `p = q`, and a metric (the triangle
/// inequality follows from supermodularity, which holds for α ≥ 1).
pub fn lattice_distance(
    p: &Distribution<f64>,
    q: &Distribution<f64>,
    alpha: Alpha,
) -> Result<f64, Error> {
    if alpha.get() < 1.0 {
        return Err(Error::AlphaOutOfRange { alpha: alpha.get(), need: "alpha >= 1" });
    }
    let j = join(p, q);
    Ok(renyi(p.values(), alpha) + renyi(q.values(), alpha) - 2.0 * renyi(j.values(), alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Backend;

    fn a(x: f64) -> Alpha {
        Alpha::new(x).unwrap()
    }

    fn dist(v: &[f64]) -> Distribution<f64> {
        Distribution::new(v.to_vec(), &Backend::float64()).unwrap()
    }

    #[test]
    fn shannon_values() {
        assert_eq!(shannon(&[0.5, 0.5]), 1.0);
        assert_eq!(shannon(&[1.0, 0.0, 0.0]), 0.0);
        // Term by term: 0.5 + 0.3·log2(10/3) + 0.2·log2(5).
        let expect = 0.5 + 0.3 * (10.0_f64 / 3.0).log2() + 0.2 * 5.0_f64.log2();
        assert!((shannon(&[0.5, 0.3, 0.2]) - expect).abs() < 1e-12);
        assert!((shannon(&[0.5, 0.3, 0.2]) - 1.485475).abs() < 1e-5);
    }

    #[test]
    fn alpha_norm_pow_values() {
        assert!((alpha_norm_pow(&[0.5, 0.5], a(2.0)) - 0.5).abs() < 1e-15);
        // 0.36 + 0.04 + 0.04.
        assert!((alpha_norm_pow(&[0.6, 0.2, 0.2], a(2.0)) - 0.44).abs() < 1e-15);
        // Support count under 0^0 = 0.
        assert_eq!(alpha_norm_pow(&[0.5, 0.3, 0.2, 0.0], a(0.0)), 3.0);
    }

    #[test]
    fn renyi_values() {
        assert!((renyi(&[0.5, 0.5, 0.0], a(2.0)) - 1.0).abs() < 1e-12);
        // -log2(0.44).
        assert!((renyi(&[0.6, 0.2, 0.2], a(2.0)) - 1.184425).abs() < 1e-5);
        let p = [0.5, 0.3, 0.2];
        assert_eq!(renyi(&p, a(1.0)), shannon(&p));
        // Order 0: log2 of the support size.
        assert!((renyi(&[0.5, 0.5, 0.0], a(0.0)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tsallis_values() {
        // (0.5 - 1)/(1 - 2).
        assert!((tsallis(&[0.5, 0.5, 0.0], a(2.0)) - 0.5).abs() < 1e-15);
        assert_eq!(tsallis(&[1.0, 0.0], a(2.0)), 0.0);
        assert_eq!(tsallis(&[1.0, 0.0], a(0.5)), 0.0);
        // (0.44 - 1)/(-1).
        assert!((tsallis(&[0.6, 0.2, 0.2], a(2.0)) - 0.56).abs() < 1e-15);
        // α = 1 is Shannon in nats.
        let p = [0.6, 0.2, 0.2];
        assert_eq!(tsallis(&p, a(1.0)), shannon_nats(&p));
        assert!((shannon_nats(&p) - shannon(&p) * std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn kl_values() {
        let p = [0.5, 0.3, 0.2];
        assert_eq!(kl(&p, &p), 0.0);
        assert_eq!(kl(&[0.5, 0.5], &[1.0, 0.0]), f64::INFINITY);
        // Halved direct sums of the running example pair.
        let x = [0.3, 0.25, 0.25, 0.1, 0.1, 0.0];
        let y = [0.3, 0.25, 0.2, 0.15, 0.1, 0.0];
        let expect = 0.25 * (0.25_f64 / 0.2).log2() + 0.1 * (0.1_f64 / 0.15).log2();
        assert!((kl(&x, &y) - expect).abs() < 1e-12);
        assert!((kl(&x, &y) - 0.021986).abs() < 1e-5);
        // Shorter second argument pads with zeros: support violation.
        assert_eq!(kl(&[0.5, 0.5], &[1.0]), f64::INFINITY);
        // Shorter first argument is fine.
        assert_eq!(kl(&[1.0], &[1.0, 0.0]), 0.0);
    }

    #[test]
    fn w_phi_alpha_two_is_squared_distance() {
        let x = [0.6, 0.2, 0.2];
        let y = [0.5, 0.3, 0.2];
        assert!((w_phi(&x, &y, a(2.0)) - 0.02).abs() < 1e-15);
        let direct: f64 = x.iter().zip(&y).map(|(u, v)| (u - v) * (u - v)).sum();
        assert!((w_phi(&x, &y, a(2.0)) - direct).abs() < 1e-15);
        assert_eq!(w_phi(&x, &x, a(2.0)), 0.0);
    }

    #[test]
    fn w_phi_alpha_one_is_kl_in_nats() {
        let x = [0.6, 0.2, 0.2];
        let y = [0.5, 0.3, 0.2];
        assert!((w_phi(&x, &y, a(1.0)) - kl(&x, &y) * std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn w_phi_support_violation_only_below_alpha_one() {
        let x = [0.5, 0.5];
        let y = [1.0, 0.0];
        assert_eq!(w_phi(&x, &y, a(0.5)), f64::INFINITY);
        assert_eq!(w_phi(&x, &y, a(1.0)), f64::INFINITY);
        assert!(w_phi(&x, &y, a(2.0)).is_finite());
    }

    #[test]
    fn w_phi_is_positive_off_diagonal() {
        let x = [0.6, 0.2, 0.2];
        let y = [0.5, 0.3, 0.2];
        for al in [0.0, 0.3, 0.5, 0.9, 1.0, 1.5, 2.0, 3.0] {
            let w = w_phi(&x, &y, a(al));
            assert!(w >= 0.0, "alpha {al}: {w}");
            if al > 0.0 {
                assert!(w > 0.0, "alpha {al}: {w}");
            }
        }
    }

    #[test]
    fn w_phi_order_zero_counts_support_difference() {
        // At α = 0 each coordinate contributes 1 exactly when x_i > 0 = y_i
        // never happens (that would be +∞) and y_i > 0 = x_i.
        let x = [1.0, 0.0, 0.0];
        let y = [0.5, 0.3, 0.2];
        assert_eq!(w_phi(&x, &y, a(0.0)), 2.0);
    }

    #[test]
    fn lattice_distance_on_the_running_example() {
        let p = dist(&[0.5, 0.5, 0.0]);
        let q = dist(&[0.6, 0.2, 0.2]);
        // Shannon values: 1 + 1.370950 - 2·0.970951.
        let d1 = lattice_distance(&p, &q, a(1.0)).unwrap();
        assert!((d1 - 0.429048).abs() < 1e-5);
        let d2 = lattice_distance(&p, &q, a(2.0)).unwrap();
        assert!((d2 - 0.297593).abs() < 1e-5);
        assert_eq!(lattice_distance(&p, &p, a(1.5)).unwrap(), 0.0);
        assert!(matches!(
            lattice_distance(&p, &q, a(0.5)),
            Err(Error::AlphaOutOfRange { .. })
        ));
    }

    #[test]
    fn alpha_rejects_negative_and_nan() {
        assert!(Alpha::new(-0.1).is_err());
        assert!(Alpha::new(f64::NAN).is_err());
        assert!(Alpha::new(f64::INFINITY).is_err());
        assert!(Alpha::new(1.0 + 1e-13).unwrap().is_one());
        assert!(!Alpha::new(1.0 + 1e-4).unwrap().is_one());
    }
}
