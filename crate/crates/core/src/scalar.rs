//! Coefficient fields: exact rationals and Gaussian rationals.
//!
//! Everything algebraic in this crate is generic over [`Scalar`], a field with
//! exact arithmetic. Two implementations are provided: [`Rat`] (arbitrary
//! precision rationals, the default) and [`GaussRat`] (rationals adjoined a
//! square root of -1, for complex structure constants). Floating point enters
//! only through [`Scalar::abs_sq_f64`], which feeds the norm diagnostics.

use alloc::string::String;


use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rat = BigRational;

/// Gaussian rational: `re + im * i` with exact rational parts.
pub type GaussRat = Complex<BigRational>;

/// An exact coefficient field.
///
/// Implementations must be exact: `add`/`mul`/`inv` never round. The few
/// float-returning methods are diagnostics-only and never feed back into the
/// algebra.
pub trait Scalar: Clone + PartialEq + core::fmt::Debug + core::fmt::Display + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn neg(&self) -> Self;
    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn from_i64(n: i64) -> Self;
    /// `num / den` as a field element; `den` must be nonzero.
    fn from_ratio_i64(num: i64, den: i64) -> Self;
    /// Squared absolute value as a float (diagnostics only).
    fn abs_sq_f64(&self) -> f64;
    /// Absolute value as a float (diagnostics only).
    fn abs_f64(&self) -> f64 {
        num_traits::Float::sqrt(self.abs_sq_f64())
    }

    /// Image in `Z/p` when the field is the rationals and the denominator is
    /// invertible mod `p`. `None` signals either a non-rational field (no
    /// modular fast path) or a bad prime for this value.
    fn residue_mod(&self, _p: u64) -> Option<u64> {
        None
    }

    /// Rebuild a field element from a rational reconstruction. Only the
    /// rational field supports this; it is the return leg of the modular
    /// solver.
    fn from_big_ratio(_num: BigInt, _den: BigInt) -> Option<Self> {
        None
    }

    fn div_ref(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.mul_ref(&r))
    }
}

fn bigint_mod_u64(n: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    let r = ((n % &m) + &m) % &m;
    r.to_u64().expect("residue fits in u64")
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_ratio_i64(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn abs_sq_f64(&self) -> f64 {
        let a = self.to_f64().unwrap_or(f64::NAN);
        a * a
    }
    fn abs_f64(&self) -> f64 {
        num_traits::Float::abs(self.to_f64().unwrap_or(f64::NAN))
    }
    fn residue_mod(&self, p: u64) -> Option<u64> {
        let den = bigint_mod_u64(self.denom(), p);
        if den == 0 {
            return None;
        }
        let num = bigint_mod_u64(self.numer(), p);
        Some(crate::modp::mul_mod(num, crate::modp::inv_mod(den, p)?, p))
    }
    fn from_big_ratio(num: BigInt, den: BigInt) -> Option<Self> {
        if den.is_zero() {
            None
        } else {
            Some(BigRational::new(num, den))
        }
    }
}

impl Scalar for GaussRat {
    fn zero() -> Self {
        Complex::new(Zero::zero(), Zero::zero())
    }
    fn one() -> Self {
        Complex::new(One::one(), Zero::zero())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn inv(&self) -> Option<Self> {
        if Scalar::is_zero(self) {
            return None;
        }
        // 1/(a+bi) = (a-bi)/(a^2+b^2)
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(Complex::new(&self.re / &norm, -(&self.im / &norm)))
    }
    fn from_i64(n: i64) -> Self {
        Complex::new(<BigRational as Scalar>::from_i64(n), Zero::zero())
    }
    fn from_ratio_i64(num: i64, den: i64) -> Self {
        Complex::new(<BigRational as Scalar>::from_ratio_i64(num, den), Zero::zero())
    }
    fn abs_sq_f64(&self) -> f64 {
        let re = self.re.to_f64().unwrap_or(f64::NAN);
        let im = self.im.to_f64().unwrap_or(f64::NAN);
        re * re + im * im
    }
}

/// Parse `"p/q"` (or `"p"`) into an exact rational. Used by tests; the CLI
/// crate has its own serde-facing parser.
pub fn rat(s: &str) -> Rat {
    parse_rat(s).expect("valid rational literal")
}

/// Fallible `"p/q"` parser. Rejects zero denominators.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        None => {
            let n: BigInt = s.parse().ok()?;
            Some(BigRational::from_integer(n))
        }
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().ok()?;
            let d: BigInt = den.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
    }
}

/// Exact factorial as an unsigned big integer.
pub fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for k in 2..=n {
        acc *= BigUint::from(k);
    }
    acc
}

/// The weight `alpha! * (n-1)! / (|alpha| + n - 1)!` attached to a monomial
/// exponent vector in the ball-average scalar product, as an exact rational.
pub fn l2_weight(exponents: &[u16], nvars: usize) -> Rat {
    let total: u64 = exponents.iter().map(|&e| e as u64).sum();
    let mut num = factorial(nvars as u64 - 1);
    for &e in exponents {
        num *= factorial(e as u64);
    }
    let den = factorial(total + nvars as u64 - 1);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Signs of a rational sequence, used when reporting exact data as text.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Render a slice of scalars for error messages.
pub fn fmt_slice<S: Scalar>(v: &[S]) -> String {
    use core::fmt::Write;
    let mut out = String::from("[");
    for (k, s) in v.iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{s}");
    }
    out.push(']');
    out
}

#[allow(unused)]
fn assert_sync_send<S: Scalar>() {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing() {
        assert_eq!(rat("3/4"), Rat::new(BigInt::from(3), BigInt::from(4)));
        assert_eq!(rat("-2"), <Rat as Scalar>::from_i64(-2));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(rat("6/4"), rat("3/2"));
    }

    #[test]
    fn gaussian_inverse() {
        let z = Complex::new(rat("1"), rat("2"));
        let inv = Scalar::inv(&z).unwrap();
        let prod = z.mul_ref(&inv);
        assert_eq!(prod, <GaussRat as Scalar>::one());
    }

    #[test]
    fn l2_weight_values() {
        // |alpha| = 1 in two variables: 1!1!/2! = 1/2.
        assert_eq!(l2_weight(&[1, 0], 2), rat("1/2"));
        // alpha = (1,1) in two variables: 1!1!1!/3! = 1/6.
        assert_eq!(l2_weight(&[1, 1], 2), rat("1/6"));
        assert_eq!(l2_weight(&[0, 0], 2), rat("1"));
    }

    #[test]
    fn residues() {
        let p = 1_000_003u64;
        let half = rat("1/2");
        let r = half.residue_mod(p).unwrap();
        assert_eq!(crate::modp::mul_mod(r, 2, p), 1);
        let bad = Rat::new(BigInt::from(1), BigInt::from(p));
        assert_eq!(bad.residue_mod(p), None);
    }
}
