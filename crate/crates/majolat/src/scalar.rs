//! Scalar backends for the lattice computations.
//!
//! Everything in the lattice layer (prefix sums, meet/join, T-transforms)
//! is rational arithmetic on the input entries, so it can run either on
//! IEEE binary64 with an absolute tolerance or on exact big rationals
//! with no tolerance at all. The entropy layer is binary64 only.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::Error;

/// Arithmetic backend for lattice-level quantities.
///
/// `EXACT` backends ignore tolerances entirely; comparisons are exact.
pub trait Scalar: Num + Signed + Clone + PartialOrd + std::fmt::Debug + Send + Sync + 'static {
    const EXACT: bool;

    fn from_int(n: i64) -> Self;

    /// Exact ratio `num/den`, `den > 0`.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Exact image of a finite double (every finite double is rational).
    fn from_f64(x: f64) -> Self;

    /// Nearest double; lossy for big rationals.
    fn to_f64(&self) -> f64;

    /// Parse one entry of a JSON distribution.
    fn from_json(v: &Value) -> Result<Self, Error>;

    /// JSON form: a plain number for doubles, a `"num/den"` string for rationals.
    fn to_json(&self) -> Value;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_json(v: &Value) -> Result<Self, Error> {
        v.as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::Parse(format!("expected a finite number, got {v}")))
    }

    fn to_json(&self) -> Value {
        serde_json::json!(self)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(x: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(x).expect("finite double")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_json(v: &Value) -> Result<Self, Error> {
        match v {
            // String entries use the "num/den" form (or a bare integer).
            Value::String(s) => s
                .parse::<BigRational>()
                .map_err(|_| Error::Parse(format!("bad rational literal {s:?}"))),
            // Numbers are converted via their exact binary64 value.
            Value::Number(_) => {
                let x = v.as_f64().filter(|x| x.is_finite()).ok_or_else(|| {
                    Error::Parse(format!("expected a finite number, got {v}"))
                })?;
                Ok(<Self as Scalar>::from_f64(x))
            }
            other => Err(Error::Parse(format!("expected number or \"num/den\", got {other}"))),
        }
    }

    fn to_json(&self) -> Value {
        Value::String(format!("{}/{}", self.numer(), self.denom()))
    }
}

/// Tolerance policy bundled with a scalar backend.
///
/// The float backend compares prefix sums up to an absolute tolerance
/// (default `1e-9`: prefix sums are O(1) in magnitude and every lattice
/// quantity is a sum or difference of inputs). The exact backend carries
/// a structural zero tolerance.
#[derive(Clone, Debug)]
pub struct Backend<S: Scalar> {
    tolerance: S,
}

impl Backend<f64> {
    pub const DEFAULT_TOLERANCE: f64 = 1e-9;

    pub fn float64() -> Self {
        Self { tolerance: Self::DEFAULT_TOLERANCE }
    }

    pub fn with_tolerance(tolerance: f64) -> Self {
        assert!(tolerance > 0.0, "float tolerance must be positive");
        Self { tolerance }
    }
}

impl Backend<BigRational> {
    pub fn exact() -> Self {
        Self { tolerance: BigRational::zero() }
    }
}

impl Default for Backend<f64> {
    fn default() -> Self {
        Self::float64()
    }
}

impl Default for Backend<BigRational> {
    fn default() -> Self {
        Self::exact()
    }
}

impl<S: Scalar> Backend<S> {
    pub fn tolerance(&self) -> &S {
        &self.tolerance
    }

    pub fn is_exact(&self) -> bool {
        S::EXACT
    }

    /// `a <= b` up to the backend tolerance.
    pub fn le(&self, a: &S, b: &S) -> bool {
        *a <= b.clone() + self.tolerance.clone()
    }

    /// `|a - b|` within the backend tolerance.
    pub fn eq(&self, a: &S, b: &S) -> bool {
        (a.clone() - b.clone()).abs() <= self.tolerance
    }
}

/// Stable descending sort; ties keep input order.
pub(crate) fn sort_desc<S: Scalar>(values: &mut [S]) {
    values.sort_by(|a, b| b.partial_cmp(a).expect("unordered scalar"));
}
