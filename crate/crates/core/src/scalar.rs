//! Scalar abstractions shared by the exact and floating-point code paths.
//!
//! Polynomials and jets are generic over a coefficient [`Field`]; the two
//! instantiations used in practice are exact Gaussian rationals
//! ([`QComplex`](crate::QComplex)) and floating complex numbers
//! (`Complex<f32>` / `Complex<f64>`). Numerical routines are generic over a
//! [`Real`] floating type.

use std::fmt::{Debug, Display};
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, One, ToPrimitive, Zero};
use thiserror::Error;

/// Floating point type used by the numerical layers: `f32` or `f64`.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Coefficient field for polynomials and jets.
///
/// Zero tests are exact (`Zero::is_zero`), which is what canonical forms
/// need for rationals and is a plain `== 0` test for floats.
pub trait Field: Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync {
    fn from_i64(v: i64) -> Self;

    /// Numeric value as a floating complex number.
    fn to_complex<F: Real>(&self) -> Complex<F>;
}

impl Field for Complex<BigRational> {
    fn from_i64(v: i64) -> Self {
        Complex::new(BigRational::from_integer(BigInt::from(v)), BigRational::zero())
    }

    fn to_complex<F: Real>(&self) -> Complex<F> {
        Complex::new(rational_to_real(&self.re), rational_to_real(&self.im))
    }
}

impl<T: Real> Field for Complex<T> {
    fn from_i64(v: i64) -> Self {
        Complex::new(T::from_i64(v).expect("integer representable"), T::zero())
    }

    fn to_complex<F: Real>(&self) -> Complex<F> {
        Complex::new(
            F::from(self.re).unwrap_or_else(F::nan),
            F::from(self.im).unwrap_or_else(F::nan),
        )
    }
}

pub fn rational_to_real<F: Real>(q: &BigRational) -> F {
    match q.to_f64() {
        Some(v) => F::lit(v),
        None => F::nan(),
    }
}

/// Exact Gaussian rational from integer parts.
pub fn qc(re: i64, im: i64) -> Complex<BigRational> {
    Complex::new(
        BigRational::from_integer(re.into()),
        BigRational::from_integer(im.into()),
    )
}

/// Exact Gaussian rational `(re_num/re_den) + i (im_num/im_den)`.
pub fn qc_frac(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Complex<BigRational> {
    Complex::new(
        BigRational::new(re_num.into(), re_den.into()),
        BigRational::new(im_num.into(), im_den.into()),
    )
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse {input:?} as a rational number")]
pub struct ParseRationalError {
    pub input: String,
}

/// Parses `"p"`, `"p/q"` or a plain decimal such as `"-0.125"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, ParseRationalError> {
    let err = || ParseRationalError { input: s.to_string() };
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = t.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(den.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let digits = format!("{}{}", if int_digits.is_empty() { "0" } else { int_digits }, frac);
        let mut n = BigInt::from_str(&digits).map_err(|_| err())?;
        if negative {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(n, d));
    }
    BigInt::from_str(t).map(BigRational::from_integer).map_err(|_| err())
}

/// Canonical string for an exact rational (`"p"` or `"p/q"`).
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// A positive rational `p/q` found close to a real number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RationalMatch {
    pub numer: u64,
    pub denom: u64,
}

/// Continued-fraction reconstruction: the first convergent `p/q` of `x`
/// with `q <= max_denom` and `|x - p/q| <= tol`, if `x > 0`.
pub fn match_positive_rational(x: f64, tol: f64, max_denom: u64) -> Option<RationalMatch> {
    if !(x.is_finite() && x > 0.0) {
        return None;
    }
    // convergent recurrences h_k = a_k h_{k-1} + h_{k-2}
    let (mut h_prev, mut h) = (1u128, x.floor() as u128);
    let (mut k_prev, mut k) = (0u128, 1u128);
    let mut rem = x - x.floor();
    for _ in 0..64 {
        if k > max_denom as u128 {
            return None;
        }
        let approx = h as f64 / k as f64;
        if h > 0 && (x - approx).abs() <= tol {
            return Some(RationalMatch {
                numer: h as u64,
                denom: k as u64,
            });
        }
        if rem.abs() < 1e-300 {
            return None;
        }
        let inv = 1.0 / rem;
        let a = inv.floor();
        if !a.is_finite() || a > 1e18 {
            return None;
        }
        rem = inv - a;
        let a = a as u128;
        let h_next = a.checked_mul(h)?.checked_add(h_prev)?;
        let k_next = a.checked_mul(k)?.checked_add(k_prev)?;
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
    }
    None
}

/// Complex-number helpers missing from `num_complex` for generic floats.
pub fn cabs<F: Real>(z: Complex<F>) -> F {
    z.re.hypot(z.im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), BigRational::new(3.into(), 4.into()));
        assert_eq!(parse_rational("-7").unwrap(), BigRational::from_integer((-7).into()));
        assert_eq!(parse_rational("-0.125").unwrap(), BigRational::new((-1).into(), 8.into()));
        assert_eq!(parse_rational(".5").unwrap(), BigRational::new(1.into(), 2.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn rational_format_roundtrips() {
        for s in ["0", "-3", "5/7", "-22/9"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
    }

    #[test]
    fn rational_match_small_denominators() {
        assert_eq!(
            match_positive_rational(2.0, 1e-10, 10_000),
            Some(RationalMatch { numer: 2, denom: 1 })
        );
        assert_eq!(
            match_positive_rational(1.0 / 3.0, 1e-10, 10_000),
            Some(RationalMatch { numer: 1, denom: 3 })
        );
        assert_eq!(match_positive_rational(std::f64::consts::SQRT_2, 1e-10, 10_000), None);
        assert_eq!(match_positive_rational(-2.0, 1e-10, 10_000), None);
    }

    #[test]
    fn exact_to_float_conversion() {
        let z = qc_frac(1, 4, -3, 2);
        let f: Complex<f64> = z.to_complex();
        assert_eq!(f, Complex::new(0.25, -1.5));
        let g: Complex<f32> = z.to_complex();
        assert_eq!(g, Complex::new(0.25f32, -1.5f32));
    }
}
