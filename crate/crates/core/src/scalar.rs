//! Ground-field scalars.
//!
//! Two backends implement [`Scalar`]: exact rationals ([`Rational`], always in
//! lowest terms with a positive denominator) and IEEE doubles (`f64`) compared
//! with an explicit [`Tolerance`]. Every algebraic structure in the crate is
//! generic over the backend; the backend also supplies the matrix kernels
//! (determinant, inverse, nullspace) that suit its arithmetic.

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::matrix::{self, Matrix};

/// Exact rational scalar.
pub type Rational = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Approx,
}

impl Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Backend::Exact => f.write_str("exact"),
            Backend::Approx => f.write_str("approx"),
        }
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "approx" => Ok(Backend::Approx),
            other => Err(Error::ParseScalar(format!("unknown backend {other}"))),
        }
    }
}

/// Comparison tolerances for the approximate backend. Ignored by exact code.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Relative scalar equality tolerance.
    pub eq: f64,
    /// Relative tolerance for matrix and identity residuals.
    pub residual: f64,
}

impl Tolerance {
    pub const DEFAULT_EQ: f64 = 1e-10;
    pub const DEFAULT_RESIDUAL: f64 = 1e-8;

    pub fn new(eq: f64, residual: f64) -> Result<Self> {
        if !(eq > 0.0 && eq <= residual && residual < 1.0) {
            return Err(Error::OutOfRange(format!(
                "tolerances must satisfy 0 < eq <= residual < 1 (got {eq}, {residual})"
            )));
        }
        Ok(Tolerance { eq, residual })
    }

    /// Keeps `eq` unless it would exceed the new residual tolerance.
    pub fn with_residual(self, residual: f64) -> Result<Self> {
        Tolerance::new(self.eq.min(residual), residual)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eq: Self::DEFAULT_EQ, residual: Self::DEFAULT_RESIDUAL }
    }
}

/// A class in `k* / k*^e`, stored by a canonical representative.
///
/// Exact representatives are `±Π p^(v_p mod e)` (sign kept only for even `e`);
/// over the reals the classes are the two signs.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerCoset<S> {
    pub exponent: u32,
    pub representative: S,
}

impl<S: Scalar> Display for PowerCoset<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (mod k*^{})", self.representative, self.exponent)
    }
}

/// Field element of one of the two supported ground fields (ℚ or ℝ).
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const BACKEND: Backend;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;

    /// Literal zero test for exact scalars, `|x| <= tol` for doubles.
    fn is_zero_within(&self, tol: f64) -> bool;

    /// `|x - y| <= tol * max(1, |x|, |y|)`; literal equality when exact.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;

    fn to_f64(&self) -> f64;

    /// Sign as -1, 0 or 1 (no tolerance applied).
    fn sign(&self) -> i32;

    fn checked_inv(&self) -> Result<Self>;

    fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self.clone() * other.checked_inv()?)
    }

    /// Square root inside the field, if one exists.
    fn sqrt(&self) -> Option<Self>;

    /// Representative of the class of `self` in `k* / k*^exponent`.
    fn coset_rep(&self, exponent: u32) -> Result<PowerCoset<Self>>;

    fn parse_scalar(s: &str) -> Result<Self>;

    /// A random coordinate for test data: small fractions (exact) or
    /// standard normals (approx).
    fn random_coord<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Uniform integer in [-5, 5].
    fn random_small_int<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_i64(rng.random_range(-5..=5))
    }

    fn matrix_determinant(m: &Matrix<Self>) -> Self;
    fn matrix_inverse(m: &Matrix<Self>) -> Option<Matrix<Self>>;
    /// Basis of the right nullspace. `tol` is a relative singular-value
    /// threshold for the approximate backend and ignored otherwise.
    fn matrix_nullspace(m: &Matrix<Self>, tol: f64) -> Vec<Vec<Self>>;

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }

    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Inv,
}

/// Binary/unary field arithmetic; unary operations ignore `b`.
pub fn field_op<S: Scalar>(a: &S, b: &S, op: FieldOp) -> Result<S> {
    match op {
        FieldOp::Add => Ok(a.clone() + b.clone()),
        FieldOp::Sub => Ok(a.clone() - b.clone()),
        FieldOp::Mul => Ok(a.clone() * b.clone()),
        FieldOp::Div => a.checked_div(b),
        FieldOp::Neg => Ok(-a.clone()),
        FieldOp::Inv => a.checked_inv(),
    }
}

impl Scalar for Rational {
    const BACKEND: Backend = Backend::Exact;

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn is_zero_within(&self, _tol: f64) -> bool {
        Zero::is_zero(self)
    }

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn sign(&self) -> i32 {
        if Zero::is_zero(self) {
            0
        } else if self.is_positive() {
            1
        } else {
            -1
        }
    }

    fn checked_inv(&self) -> Result<Self> {
        if Zero::is_zero(self) {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.recip())
        }
    }

    fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        if &(&n * &n) == self.numer() && &(&d * &d) == self.denom() {
            Some(BigRational::new(n, d))
        } else {
            None
        }
    }

    fn coset_rep(&self, exponent: u32) -> Result<PowerCoset<Self>> {
        let representative = rational_coset_rep(self, exponent)?;
        Ok(PowerCoset { exponent, representative })
    }

    fn parse_scalar(s: &str) -> Result<Self> {
        parse_rational(s.trim())
    }

    fn random_coord<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let num: i64 = rng.random_range(-6..=6);
        let den: i64 = [1, 1, 1, 2, 3][rng.random_range(0..5)];
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn matrix_determinant(m: &Matrix<Self>) -> Self {
        matrix::exact::determinant(m)
    }

    fn matrix_inverse(m: &Matrix<Self>) -> Option<Matrix<Self>> {
        matrix::exact::inverse(m)
    }

    fn matrix_nullspace(m: &Matrix<Self>, _tol: f64) -> Vec<Vec<Self>> {
        matrix::exact::nullspace(m)
    }
}

impl Scalar for f64 {
    const BACKEND: Backend = Backend::Approx;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn is_zero_within(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol * 1f64.max(self.abs()).max(other.abs())
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn sign(&self) -> i32 {
        if *self > 0.0 {
            1
        } else if *self < 0.0 {
            -1
        } else {
            0
        }
    }

    fn checked_inv(&self) -> Result<Self> {
        if *self == 0.0 {
            Err(Error::DivisionByZero)
        } else {
            Ok(1.0 / self)
        }
    }

    fn sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| f64::sqrt(*self))
    }

    fn coset_rep(&self, exponent: u32) -> Result<PowerCoset<Self>> {
        if *self == 0.0 {
            return Err(Error::ZeroScalar);
        }
        if exponent == 0 || exponent % 2 == 1 {
            return Err(Error::OutOfRange(format!("real power cosets need an even exponent, got {exponent}")));
        }
        Ok(PowerCoset { exponent, representative: self.signum() })
    }

    fn parse_scalar(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: f64 = n.trim().parse().map_err(|_| Error::ParseScalar(s.to_string()))?;
            let d: f64 = d.trim().parse().map_err(|_| Error::ParseScalar(s.to_string()))?;
            if d == 0.0 {
                return Err(Error::DivisionByZero);
            }
            return Ok(n / d);
        }
        let v: f64 = s.parse().map_err(|_| Error::ParseScalar(s.to_string()))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::ParseScalar(s.to_string()))
        }
    }

    fn random_coord<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }

    fn matrix_determinant(m: &Matrix<Self>) -> Self {
        matrix::dense::determinant(m)
    }

    fn matrix_inverse(m: &Matrix<Self>) -> Option<Matrix<Self>> {
        matrix::dense::inverse(m)
    }

    fn matrix_nullspace(m: &Matrix<Self>, tol: f64) -> Vec<Vec<Self>> {
        matrix::dense::nullspace(m, tol)
    }
}

fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::ParseScalar(s.to_string());
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        // Decimal literals are converted exactly: "0.25" -> 1/4.
        let negative = int_part.trim_start().starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        if !frac_part.chars().all(|c| c.is_ascii_digit())
            || !int_digits.chars().all(|c| c.is_ascii_digit())
            || (int_digits.is_empty() && frac_part.is_empty())
        {
            return Err(bad());
        }
        let digits = format!("{int_digits}{frac_part}");
        let mut n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
        if negative {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac_part.len());
        return Ok(BigRational::new(n, d));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Canonical representative of `rho` in `ℚ* / ℚ*^e` by trial division.
///
/// Numerator and denominator must fit in a `u64`. Trial division stops once
/// `p^3` exceeds the unfactored cofactor; what remains then has at most two
/// prime factors, which is enough to know every exponent modulo `e` without
/// splitting it (numerator and denominator are coprime, so cofactors never
/// share primes).
fn rational_coset_rep(rho: &Rational, e: u32) -> Result<Rational> {
    if Zero::is_zero(rho) {
        return Err(Error::ZeroScalar);
    }
    if e == 0 {
        return Err(Error::OutOfRange("exponent must be positive".into()));
    }
    let to_u64 =
        |v: &BigInt| v.abs().to_u64().ok_or_else(|| Error::OutOfRange(format!("{v} exceeds the factorisation range")));
    let num = to_u64(rho.numer())?;
    let den = to_u64(rho.denom())?;

    let mut factors: Vec<(u64, i64)> = Vec::new();
    for (value, sign) in [(num, 1i64), (den, -1i64)] {
        for (p, k) in factor_small(value) {
            factors.push((p, sign * k as i64));
        }
    }

    let modulus = e as i64;
    let mut rep = BigInt::one();
    for (p, k) in factors {
        let r = k.rem_euclid(modulus) as usize;
        if r > 0 {
            rep *= num_traits::pow(BigInt::from(p), r);
        }
    }
    if e % 2 == 0 && rho.is_negative() {
        rep = -rep;
    }
    Ok(BigRational::from_integer(rep))
}

/// Factorisation of `n` into (factor, multiplicity) pairs. Factors are
/// primes except possibly one final squarefree cofactor with at most two
/// distinct prime factors, which carries multiplicity 1.
fn factor_small(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    let mut push = |p: u64, n: &mut u64| {
        let mut k = 0;
        while *n % p == 0 {
            *n /= p;
            k += 1;
        }
        if k > 0 {
            out.push((p, k));
        }
    };
    push(2, &mut n);
    let mut p = 3u64;
    while (p as u128).pow(3) <= n as u128 {
        push(p, &mut n);
        p += 2;
    }
    if n > 1 {
        let r = n.sqrt();
        if r * r == n {
            out.push((r, 2));
        } else {
            out.push((n, 1));
        }
    }
    out
}

/// Least common multiple of the denominators of `values`.
pub(crate) fn lcm_of_denominators(values: &[Rational]) -> BigInt {
    values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}
