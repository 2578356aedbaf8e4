//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! Numerical code is written once against [`Real`] and instantiated either
//! with hardware floats (`f32`, `f64`) or with [`Mp`], a binary big float
//! whose precision is fixed at the type level. Fixing the precision in the
//! type means constants produced by [`Real::from_f64`] always carry the full
//! working precision, so no intermediate value silently drops to 53 bits.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use dashu_float::ops::{Abs, SquareRoot};
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::{IBig, UBig};
use num_bigint::{BigInt, Sign};
use num_traits::{Float, FloatConst, One, ToPrimitive, Zero};

/// Runtime-precision binary float used for extended evaluation.
pub type BigFloat = FBig<HalfEven, 2>;

/// Converts an exact integer to an unrounded [`BigFloat`].
pub fn bigint_to_bigfloat(x: &BigInt) -> BigFloat {
    let (sign, bytes) = x.to_bytes_le();
    let mag = IBig::from(UBig::from_le_bytes(&bytes));
    let v = if sign == Sign::Minus { -mag } else { mag };
    BigFloat::from(v)
}

/// Rounds `x` to `bits` of precision.
pub fn round_to(x: BigFloat, bits: usize) -> BigFloat {
    x.with_precision(bits).value()
}

/// A real field element with the handful of transcendental operations the
/// energy and root-finding code needs.
pub trait Real:
    Clone
    + fmt::Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Significand width in bits.
    const BITS: usize;

    fn from_f64(x: f64) -> Self;
    fn from_bigint(x: &BigInt) -> Self;
    fn from_bigfloat(x: &BigFloat) -> Self;
    fn to_bigfloat(&self) -> BigFloat;
    fn to_f64(&self) -> f64;

    fn sqrt(&self) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn abs(&self) -> Self;
    /// Four-quadrant arctangent of `self / x`.
    fn atan2(&self, x: &Self) -> Self;
    fn pi() -> Self;

    /// Unit roundoff `2^(1-BITS)`.
    fn epsilon() -> Self {
        Self::from_f64(2f64.powi(1 - Self::BITS as i32))
    }

    fn from_i64(x: i64) -> Self {
        Self::from_bigint(&BigInt::from(x))
    }

    fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl<F> Real for F
where
    F: Float + FloatConst + fmt::Debug + Send + Sync + 'static,
{
    const BITS: usize = std::mem::size_of::<F>() * 8 - if std::mem::size_of::<F>() == 8 { 11 } else { 8 };

    fn from_f64(x: f64) -> Self {
        F::from(x).expect("f64 converts to every float type")
    }
    fn from_bigint(x: &BigInt) -> Self {
        F::from(x.to_f64().unwrap_or(f64::INFINITY)).unwrap_or_else(F::infinity)
    }
    fn from_bigfloat(x: &BigFloat) -> Self {
        Self::from_f64(x.to_f64().value())
    }
    fn to_bigfloat(&self) -> BigFloat {
        BigFloat::try_from(Real::to_f64(self)).expect("finite float")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn sqrt(&self) -> Self {
        Float::sqrt(*self)
    }
    fn ln(&self) -> Self {
        Float::ln(*self)
    }
    fn exp(&self) -> Self {
        Float::exp(*self)
    }
    fn abs(&self) -> Self {
        Float::abs(*self)
    }
    fn atan2(&self, x: &Self) -> Self {
        Float::atan2(*self, *x)
    }
    fn pi() -> Self {
        F::PI()
    }
    fn epsilon() -> Self {
        F::epsilon()
    }
}

/// Binary big float with `BITS` bits of significand.
///
/// Every value is kept at exactly `BITS` precision; binary operations round
/// to that precision.
#[derive(Clone)]
pub struct Mp<const BITS: usize>(BigFloat);

impl<const BITS: usize> Mp<BITS> {
    pub fn new(x: BigFloat) -> Self {
        Mp(round_to(x, BITS))
    }

    pub fn inner(&self) -> &BigFloat {
        &self.0
    }

    /// Machin's formula, `pi = 16 atan(1/5) - 4 atan(1/239)`.
    fn machin_pi() -> Self {
        fn atan_inv<const B: usize>(k: i64) -> Mp<B> {
            let x = Mp::<B>::one() / Mp::<B>::from_i64(k);
            let x2 = x.clone() * x.clone();
            let mut term = x.clone();
            let mut sum = x;
            let eps = <Mp<B> as Real>::epsilon();
            let mut n = 1i64;
            loop {
                term = -(term * x2.clone());
                let add = term.clone() / Mp::<B>::from_i64(2 * n + 1);
                if Real::abs(&add) < eps.clone() * Real::abs(&sum) {
                    break;
                }
                sum = sum + add;
                n += 1;
            }
            sum
        }
        Mp::<BITS>::from_i64(16) * atan_inv::<BITS>(5) - Mp::<BITS>::from_i64(4) * atan_inv::<BITS>(239)
    }
}

impl<const BITS: usize> fmt::Debug for Mp<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mp<{BITS}>({:e})", self.0.to_f64().value())
    }
}

impl<const BITS: usize> fmt::Display for Mp<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_f64().value())
    }
}

impl<const BITS: usize> PartialEq for Mp<BITS> {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl<const BITS: usize> PartialOrd for Mp<BITS> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! mp_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl<const BITS: usize> $tr for Mp<BITS> {
            type Output = Self;
            fn $method(self, rhs: Self) -> Self {
                Mp(round_to(self.0 $op rhs.0, BITS))
            }
        }
        impl<'a, const BITS: usize> $tr<&'a Mp<BITS>> for Mp<BITS> {
            type Output = Self;
            fn $method(self, rhs: &'a Mp<BITS>) -> Self {
                Mp(round_to(self.0 $op &rhs.0, BITS))
            }
        }
    };
}

mp_binop!(Add, add, +);
mp_binop!(Sub, sub, -);
mp_binop!(Mul, mul, *);
mp_binop!(Div, div, /);

impl<const BITS: usize> Neg for Mp<BITS> {
    type Output = Self;
    fn neg(self) -> Self {
        Mp(-self.0)
    }
}

impl<const BITS: usize> Zero for Mp<BITS> {
    fn zero() -> Self {
        Mp(round_to(BigFloat::ZERO, BITS))
    }
    fn is_zero(&self) -> bool {
        self.0.repr().is_zero()
    }
}

impl<const BITS: usize> One for Mp<BITS> {
    fn one() -> Self {
        Mp(round_to(BigFloat::ONE, BITS))
    }
}

impl<const BITS: usize> Real for Mp<BITS> {
    const BITS: usize = BITS;

    fn from_f64(x: f64) -> Self {
        Mp::new(BigFloat::try_from(x).expect("finite f64"))
    }
    fn from_bigint(x: &BigInt) -> Self {
        Mp::new(bigint_to_bigfloat(x))
    }
    fn from_bigfloat(x: &BigFloat) -> Self {
        Mp::new(x.clone())
    }
    fn to_bigfloat(&self) -> BigFloat {
        self.0.clone()
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }
    fn sqrt(&self) -> Self {
        if self.0.repr().is_zero() {
            return Self::zero();
        }
        Mp(self.0.sqrt())
    }
    fn ln(&self) -> Self {
        Mp(self.0.ln())
    }
    fn exp(&self) -> Self {
        Mp(self.0.exp())
    }
    fn abs(&self) -> Self {
        Mp(self.0.clone().abs())
    }
    /// Evaluated in double precision; only used for reporting branch
    /// information, never inside an identity check.
    fn atan2(&self, x: &Self) -> Self {
        Self::from_f64(self.to_f64().atan2(x.to_f64()))
    }
    fn pi() -> Self {
        Self::machin_pi()
    }
}

/// Complex number over any [`Real`].
#[derive(Clone, Debug, PartialEq)]
pub struct Complex<T> {
    pub re: T,
    pub im: T,
}

impl<T: Real> Complex<T> {
    pub fn new(re: T, im: T) -> Self {
        Complex { re, im }
    }

    pub fn from_real(re: T) -> Self {
        Complex { re, im: T::zero() }
    }

    pub fn i() -> Self {
        Complex { re: T::zero(), im: T::one() }
    }

    pub fn zero() -> Self {
        Self::from_real(T::zero())
    }

    pub fn one() -> Self {
        Self::from_real(T::one())
    }

    pub fn from_f64(re: f64, im: f64) -> Self {
        Complex { re: T::from_f64(re), im: T::from_f64(im) }
    }

    pub fn conj(&self) -> Self {
        Complex { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> T {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    pub fn abs(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, k: &T) -> Self {
        Complex { re: self.re.clone() * k.clone(), im: self.im.clone() * k.clone() }
    }

    pub fn recip(&self) -> Self {
        let d = self.norm_sqr();
        Complex { re: self.re.clone() / d.clone(), im: -(self.im.clone() / d) }
    }

    pub fn sqr(&self) -> Self {
        self.clone() * self.clone()
    }

    /// Principal branch of the logarithm.
    pub fn ln(&self) -> Self {
        Complex { re: self.abs().ln(), im: self.im.atan2(&self.re) }
    }

    pub fn to_f64(&self) -> Complex<f64> {
        Complex { re: self.re.to_f64(), im: self.im.to_f64() }
    }

    pub fn cast<U: Real>(&self) -> Complex<U> {
        Complex { re: U::from_bigfloat(&self.re.to_bigfloat()), im: U::from_bigfloat(&self.im.to_bigfloat()) }
    }
}

impl<T: Real> Add for Complex<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Complex { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl<T: Real> Sub for Complex<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Complex { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl<T: Real> Mul for Complex<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Complex {
            re: self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone(),
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl<T: Real> Div for Complex<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl<T: Real> Neg for Complex<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Complex { re: -self.re, im: -self.im }
    }
}

impl<T: Real> AddAssign for Complex<T> {
    fn add_assign(&mut self, rhs: Self) {
        *self = self.clone() + rhs;
    }
}

impl<T: Real> SubAssign for Complex<T> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = self.clone() - rhs;
    }
}

impl<T: Real> MulAssign for Complex<T> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = self.clone() * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = Mp<192>;

    #[test]
    fn mp_keeps_full_precision_for_constants() {
        let third = M::one() / M::from_i64(3);
        let back = third * M::from_i64(3) - M::one();
        assert!(Real::abs(&back).to_f64() < 1e-55);
    }

    #[test]
    fn mp_pi_matches_double() {
        let pi = M::pi();
        assert!((pi.to_f64() - std::f64::consts::PI).abs() < 1e-15);
        let s = pi.sqrt();
        let err = Real::abs(&(s.clone() * s - pi));
        assert!(err.to_f64() < 1e-55);
    }

    #[test]
    fn bits_constants() {
        assert_eq!(<f64 as Real>::BITS, 53);
        assert_eq!(<f32 as Real>::BITS, 24);
        assert_eq!(<M as Real>::BITS, 192);
    }

    #[test]
    fn bigint_roundtrip_into_mp() {
        let big: BigInt = "-123456789012345678901234567890123456789".parse().unwrap();
        let v = M::from_bigint(&big);
        let expect = -1.2345678901234568e38;
        assert!((v.to_f64() - expect).abs() / expect.abs() < 1e-15);
    }

    #[test]
    fn complex_division_inverts_multiplication() {
        let a = Complex::<M>::from_f64(1.5, -0.25);
        let b = Complex::<M>::from_f64(-0.75, 2.0);
        let q = (a.clone() * b.clone()) / b;
        assert!((q - a).abs().to_f64() < 1e-55);
    }

    #[test]
    fn complex_ln_principal_branch() {
        let z = Complex::<f64>::from_f64(-1.0, 0.0);
        let l = z.ln();
        assert!(l.re.abs() < 1e-15);
        assert!((l.im - std::f64::consts::PI).abs() < 1e-15);
    }
}
