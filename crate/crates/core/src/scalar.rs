//! Coefficient fields for the exponential-polynomial algebra.
//!
//! Two fields are provided: `Complex64` for fast numerical work and
//! [`Exact`], complex numbers over arbitrary-precision rationals. Every
//! finite `f64` is a dyadic rational, so lifting floating input into
//! [`Exact`] loses nothing; identities that must vanish do so to the bit.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Complex rationals.
pub type Exact = num_complex::Complex<BigRational>;

/// Field operations needed by [`crate::exppoly::ExpPoly`].
pub trait Scalar: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    /// The imaginary unit `i`.
    fn imag_unit() -> Self;
    fn from_int(n: i64) -> Self;
    /// Lift a floating value. Exact for [`Exact`].
    fn from_c64(z: Complex64) -> Self;
    fn to_c64(&self) -> Complex64;

    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    /// Division; callers guarantee a nonzero divisor.
    fn divide(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;
    fn conjugate(&self) -> Self;

    /// Exact zero test.
    fn vanishes(&self) -> bool;
    fn is_finite(&self) -> bool;

    fn scale_int(&self, n: i64) -> Self {
        self.times(&Self::from_int(n))
    }

    fn from_f64(x: f64) -> Self {
        Self::from_c64(Complex64::new(x, 0.0))
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn imag_unit() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn from_int(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn from_c64(z: Complex64) -> Self {
        z
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn divide(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn conjugate(&self) -> Self {
        self.conj()
    }
    fn vanishes(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite floating value")
}

fn rational_to_f64(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let numer = x.numer().abs();
    let denom = x.denom();
    // Scale so the integer quotient carries 66 bits, then fold the remainder
    // into a sticky bit so the final conversion rounds once.
    let shift = 66 - (numer.bits() as i64 - denom.bits() as i64);
    let (n, d) = if shift >= 0 {
        (numer << shift as usize, denom.clone())
    } else {
        (numer, denom << (-shift) as usize)
    };
    let (mut quotient, remainder) = (&n / &d, &n % &d);
    if !remainder.is_zero() {
        quotient |= BigInt::one();
    }
    let magnitude = ldexp(quotient.to_f64().unwrap_or(f64::INFINITY), -shift);
    if x.is_negative() {
        -magnitude
    } else {
        magnitude
    }
}

fn ldexp(mut value: f64, mut exp: i64) -> f64 {
    while exp > 1000 {
        value *= 2f64.powi(1000);
        exp -= 1000;
    }
    while exp < -1000 {
        value *= 2f64.powi(-1000);
        exp += 1000;
    }
    value * 2f64.powi(exp as i32)
}

impl Scalar for Exact {
    fn zero() -> Self {
        Exact::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        Exact::new(BigRational::one(), BigRational::zero())
    }
    fn imag_unit() -> Self {
        Exact::new(BigRational::zero(), BigRational::one())
    }
    fn from_int(n: i64) -> Self {
        Exact::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }
    fn from_c64(z: Complex64) -> Self {
        Exact::new(rational_from_f64(z.re), rational_from_f64(z.im))
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
    fn plus(&self, rhs: &Self) -> Self {
        Exact::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
    fn minus(&self, rhs: &Self) -> Self {
        Exact::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
    fn times(&self, rhs: &Self) -> Self {
        if self.im.is_zero() && rhs.im.is_zero() {
            return Exact::new(&self.re * &rhs.re, BigRational::zero());
        }
        Exact::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
    fn divide(&self, rhs: &Self) -> Self {
        if rhs.im.is_zero() {
            return Exact::new(&self.re / &rhs.re, &self.im / &rhs.re);
        }
        let norm = &rhs.re * &rhs.re + &rhs.im * &rhs.im;
        let num = self.times(&rhs.conjugate());
        Exact::new(num.re / &norm, num.im / norm)
    }
    fn negated(&self) -> Self {
        Exact::new(-&self.re, -&self.im)
    }
    fn conjugate(&self) -> Self {
        Exact::new(self.re.clone(), -&self.im)
    }
    fn vanishes(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn is_finite(&self) -> bool {
        true
    }
    fn scale_int(&self, n: i64) -> Self {
        let n = BigRational::from_integer(BigInt::from(n));
        Exact::new(&self.re * &n, &self.im * &n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_lift_round_trips_floats() {
        for x in [0.1, -3.5e-300, 1.0e300, 2f64.powi(-1074), 123456.789] {
            let z = Complex64::new(x, -x / 3.0);
            assert_eq!(Exact::from_c64(z).to_c64(), z);
        }
    }

    #[test]
    fn exact_division_inverts_multiplication() {
        let a = Exact::from_c64(Complex64::new(0.3, -1.25));
        let b = Exact::from_c64(Complex64::new(-2.0, 0.7));
        assert_eq!(a.times(&b).divide(&b), a);
        assert!(a.minus(&a).vanishes());
        assert_eq!(Exact::imag_unit().times(&Exact::imag_unit()), Exact::from_int(-1));
    }
}
