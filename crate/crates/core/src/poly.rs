//! Dense univariate polynomials.
//!
//! [`Poly`] is generic over its coefficient ring. The integer instance
//! ([`ExactPoly`](crate::ExactPoly)) additionally gets exact division,
//! primitive-PRS gcd, polynomial-matrix determinants and an arbitrary
//! precision evaluator with a running error bound.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, Num, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::{bigint_to_bigfloat, round_to, BigFloat, Complex, Real};

/// Coefficients in ascending degree order, with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly<C> {
    coeffs: Vec<C>,
}

impl<C> Poly<C>
where
    C: Clone + Num + Neg<Output = C> + FromPrimitive,
{
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::new(vec![C::zero(), C::one()])
    }

    pub fn monomial(c: C, k: usize) -> Self {
        let mut coeffs = vec![C::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with `-1` standing in for `-∞`.
    pub fn degree_i64(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn leading(&self) -> Option<&C> {
        self.coeffs.last()
    }

    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![C::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a.clone() * C::from_usize(k).expect("degree fits coefficient type"))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, order: usize) -> Self {
        (0..order).fold(self.clone(), |p, _| p.derivative())
    }

    /// Horner evaluation in the coefficient ring.
    pub fn eval(&self, x: &C) -> C {
        self.coeffs.iter().rev().fold(C::zero(), |acc, a| acc * x.clone() + a.clone())
    }

    /// `p(-x)`
    pub fn reflect(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, a)| if k % 2 == 1 { -a.clone() } else { a.clone() })
                .collect(),
        )
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }
}

impl<C> Add for &Poly<C>
where
    C: Clone + Num + Neg<Output = C> + FromPrimitive,
{
    type Output = Poly<C>;
    fn add(self, rhs: &Poly<C>) -> Poly<C> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<C> Sub for &Poly<C>
where
    C: Clone + Num + Neg<Output = C> + FromPrimitive,
{
    type Output = Poly<C>;
    fn sub(self, rhs: &Poly<C>) -> Poly<C> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<C> Mul for &Poly<C>
where
    C: Clone + Num + Neg<Output = C> + FromPrimitive,
{
    type Output = Poly<C>;
    fn mul(self, rhs: &Poly<C>) -> Poly<C> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<C> Neg for &Poly<C>
where
    C: Clone + Num + Neg<Output = C> + FromPrimitive,
{
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        Poly::new(self.coeffs.iter().map(|a| -a.clone()).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<C> $tr for Poly<C>
        where
            C: Clone + Num + Neg<Output = C> + FromPrimitive,
        {
            type Output = Poly<C>;
            fn $m(self, rhs: Poly<C>) -> Poly<C> {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

type IntPoly = Poly<BigInt>;

impl IntPoly {
    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// gcd of the coefficients, sign taken from the leading coefficient.
    pub fn content(&self) -> BigInt {
        let g = self.coeffs.iter().fold(BigInt::zero(), |g, a| g.gcd(a));
        match self.leading() {
            Some(l) if l.is_negative() => -g,
            _ => g,
        }
    }

    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let c = self.content();
        Poly::new(self.coeffs.iter().map(|a| a / &c).collect())
    }

    /// Largest coefficient bit length.
    pub fn max_coeff_bits(&self) -> u64 {
        self.coeffs.iter().map(|a| a.bits()).max().unwrap_or(0)
    }

    /// Quotient `self / d` when the division is exact over ℤ.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let dd = d.degree()?;
        let lead = d.leading()?.clone();
        let mut rem = self.coeffs.clone();
        if rem.is_empty() {
            return Some(Poly::zero());
        }
        if rem.len() <= dd {
            return None;
        }
        let mut q = vec![BigInt::zero(); rem.len() - dd];
        for k in (0..q.len()).rev() {
            let top = rem[k + dd].clone();
            if top.is_zero() {
                continue;
            }
            let (c, r) = top.div_rem(&lead);
            if !r.is_zero() {
                return None;
            }
            for (j, b) in d.coeffs.iter().enumerate() {
                rem[k + j] -= &c * b;
            }
            q[k] = c;
        }
        if rem.iter().all(Zero::is_zero) {
            Some(Poly::new(q))
        } else {
            None
        }
    }

    /// Pseudo-remainder: `lc(d)^e · self mod d` reduced step by step.
    pub fn pseudo_rem(&self, d: &Self) -> Self {
        let dd = d.degree().expect("nonzero divisor");
        let lead = d.leading().unwrap().clone();
        let mut r = self.clone();
        while let Some(dr) = r.degree() {
            if dr < dd {
                break;
            }
            let lr = r.leading().unwrap().clone();
            r = &r.scale(&lead) - &d.shift(dr - dd).scale(&lr);
        }
        r
    }

    /// Primitive polynomial remainder sequence gcd (up to a constant).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a
    }

    /// True iff `gcd(p, p′)` is constant. The zero polynomial is not squarefree.
    pub fn is_squarefree(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    /// Evaluates at a real scalar, converting coefficients to `T`.
    pub fn eval_real<T: Real>(&self, x: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, a| acc * x.clone() + T::from_bigint(a))
    }

    pub fn eval_complex<T: Real>(&self, z: &Complex<T>) -> Complex<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::zero(), |acc, a| acc * z.clone() + Complex::from_real(T::from_bigint(a)))
    }

    /// Default working precision: `max(128, 2 × largest coefficient bit length)`.
    pub fn default_precision(&self) -> usize {
        (2 * self.max_coeff_bits() as usize).max(128)
    }

    /// Horner evaluation at `z` in `precision_bits` binary precision.
    ///
    /// The bound covers coefficient conversion and every rounding in the
    /// recurrence: `(4d + 5) u Σ|a_k||z|^k` with `u = 2^-precision`.
    pub fn eval_extended<T: Real>(&self, z: &Complex<T>, precision_bits: usize) -> ExtendedValue {
        let p = precision_bits.max(53);
        let zr = round_to(z.re.to_bigfloat(), p);
        let zi = round_to(z.im.to_bigfloat(), p);
        let zabs = BigFloat::try_from(z.abs().to_f64()).unwrap().with_precision(64).value();
        let mut re = round_to(BigFloat::ZERO, p);
        let mut im = round_to(BigFloat::ZERO, p);
        let mut mu = BigFloat::ZERO.with_precision(64).value();
        for a in self.coeffs.iter().rev() {
            let af = round_to(bigint_to_bigfloat(a), p);
            let nre = &re * &zr - &im * &zi + &af;
            let nim = &re * &zi + &im * &zr;
            re = nre;
            im = nim;
            let aabs = round_to(bigint_to_bigfloat(&a.abs()), 64);
            mu = &mu * &zabs + aabs;
        }
        let d = self.degree().unwrap_or(0);
        let u = BigFloat::ONE.with_precision(64).value() >> (p as isize);
        let k = BigFloat::from(dashu_int::IBig::from((4 * d + 5) as i64)).with_precision(64).value();
        let bound = &(&k * &u) * &mu;
        ExtendedValue { re, im, bound }
    }
}

/// Result of [`Poly::eval_extended`].
#[derive(Clone, Debug)]
pub struct ExtendedValue {
    pub re: BigFloat,
    pub im: BigFloat,
    pub bound: BigFloat,
}

impl ExtendedValue {
    pub fn value<T: Real>(&self) -> Complex<T> {
        Complex::new(T::from_bigfloat(&self.re), T::from_bigfloat(&self.im))
    }

    pub fn bound<T: Real>(&self) -> T {
        T::from_bigfloat(&self.bound)
    }

    /// `|value| ≤ bound`
    pub fn contains_zero(&self) -> bool {
        let m = (&self.re * &self.re + &self.im * &self.im).with_precision(64).value();
        m <= (&self.bound * &self.bound)
    }
}

/// Determinant of a square matrix of integer polynomials.
///
/// Cofactor expansion up to 5×5, fraction-free (Bareiss) elimination beyond.
pub fn poly_determinant(m: &[Vec<IntPoly>]) -> IntPoly {
    let n = m.len();
    assert!(m.iter().all(|row| row.len() == n), "square matrix required");
    if n == 0 {
        return Poly::one();
    }
    if n <= 5 {
        cofactor_det(m)
    } else {
        bareiss_det(m.to_vec())
    }
}

fn cofactor_det(m: &[Vec<IntPoly>]) -> IntPoly {
    let n = m.len();
    match n {
        1 => m[0][0].clone(),
        2 => &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]),
        _ => {
            let mut acc = IntPoly::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<IntPoly>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, e)| e.clone()).collect())
                    .collect();
                let term = &m[0][j] * &cofactor_det(&minor);
                acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

pub(crate) fn bareiss_det(mut a: Vec<Vec<IntPoly>>) -> IntPoly {
    let n = a.len();
    let mut negate = false;
    let mut prev = IntPoly::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    negate = !negate;
                }
                None => return IntPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.exact_div(&prev).expect("Bareiss division is exact");
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -&d
    } else {
        d
    }
}

impl Serialize for IntPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            coeffs: Vec<String>,
        }
        Repr { coeffs: self.coeffs.iter().map(|c| c.to_string()).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            coeffs: Vec<String>,
        }
        let r = Repr::deserialize(d)?;
        let coeffs = r
            .coeffs
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(D::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Poly::new(coeffs))
    }
}

impl<C> fmt::Display for Poly<C>
where
    C: Clone + Num + Neg<Output = C> + FromPrimitive + fmt::Display + PartialOrd,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, a) in self.coeffs.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let neg = *a < C::zero();
            let mag = if neg { -a.clone() } else { a.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let unit = mag.is_one();
            match k {
                0 => write!(f, "{mag}")?,
                1 if unit => write!(f, "x")?,
                1 => write!(f, "{mag}x")?,
                _ if unit => write!(f, "x^{k}")?,
                _ => write!(f, "{mag}x^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Mp;
    use num_traits::One;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn derivatives() {
        assert_eq!(p(&[4, 0, 8]).derivative(), p(&[0, 16]));
        assert_eq!(p(&[4, 0, 8]).nth_derivative(3), IntPoly::zero());
        assert_eq!(p(&[0, 192, 0, 128]).nth_derivative(2), p(&[0, 768]));
    }

    #[test]
    fn degree_of_zero_is_sentinel() {
        assert_eq!(IntPoly::zero().degree(), None);
        assert_eq!(IntPoly::zero().degree_i64(), -1);
        assert_eq!(p(&[1, 2, 0, 0]).degree(), Some(1));
    }

    #[test]
    fn squarefree() {
        assert!(p(&[4, 0, 8]).is_squarefree());
        assert!(!p(&[0, 0, 1]).is_squarefree());
        assert!(p(&[0, 192, 0, 128]).is_squarefree());
        // (x-1)^2 (x+2)
        let q = &(&p(&[-1, 1]) * &p(&[-1, 1])) * &p(&[2, 1]);
        assert!(!q.is_squarefree());
    }

    #[test]
    fn exact_division() {
        let a = p(&[-1, 1]);
        let b = p(&[2, 3, 1]);
        let prod = &a * &b;
        assert_eq!(prod.exact_div(&b), Some(a.clone()));
        assert_eq!(prod.exact_div(&a), Some(b));
        assert_eq!(p(&[1, 0, 1]).exact_div(&p(&[0, 2])), None);
    }

    #[test]
    fn determinants_agree_between_cofactor_and_bareiss() {
        let x = IntPoly::x();
        let m: Vec<Vec<IntPoly>> = (0..5)
            .map(|i| (0..5).map(|j| &x.pow(((i * j) % 3) as u32) + &IntPoly::constant(BigInt::from(i as i64 - j as i64 + 2))).collect())
            .collect();
        assert_eq!(cofactor_det(&m), bareiss_det(m.clone()));
        let m6: Vec<Vec<IntPoly>> = (0..6)
            .map(|i| (0..6).map(|j| IntPoly::from_i64s(&[((i + 2 * j) % 5) as i64 - 2, (i == j) as i64])).collect())
            .collect();
        let big = poly_determinant(&m6);
        // expanding along the first row with cofactors must agree
        let mut acc = IntPoly::zero();
        for j in 0..6 {
            let minor: Vec<Vec<IntPoly>> =
                m6[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, e)| e.clone()).collect()).collect();
            let t = &m6[0][j] * &cofactor_det(&minor);
            acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
        }
        assert_eq!(big, acc);
    }

    #[test]
    fn eval_extended_examples() {
        let q = p(&[4, 0, 8]);
        let z = Complex::<Mp<256>>::new(Mp::zero(), Mp::one() / Mp::<256>::from_i64(2).sqrt());
        let v = q.eval_extended(&z, 256);
        assert!(v.contains_zero());

        let one = p(&[1]);
        let v = one.eval_extended(&Complex::<f64>::from_f64(3.0, -7.0), 128);
        assert_eq!(v.value::<f64>(), Complex::from_f64(1.0, 0.0));

        let c = p(&[0, 192, 0, 128]);
        let v = c.eval_extended(&Complex::<f64>::from_f64(1.0, 0.0), 128);
        assert_eq!(v.value::<f64>().re, 320.0);
        assert_eq!(v.value::<f64>().im, 0.0);
    }

    #[test]
    fn default_precision_rule() {
        assert_eq!(p(&[4, 0, 8]).default_precision(), 128);
        let big = IntPoly::new(vec![BigInt::one() << 200u32]);
        assert_eq!(big.default_precision(), 402);
    }

    #[test]
    fn json_uses_decimal_strings() {
        let q = IntPoly::new(vec![BigInt::from(4), BigInt::zero(), BigInt::one() << 70u32]);
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(s, r#"{"coeffs":["4","0","1180591620717411303424"]}"#);
        let back: IntPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn display() {
        assert_eq!(p(&[0, 192, 0, 128]).to_string(), "128x^3 + 192x");
        assert_eq!(p(&[-2, 0, 4]).to_string(), "4x^2 - 2");
        assert_eq!(IntPoly::zero().to_string(), "0");
    }

    proptest! {
        #[test]
        fn product_rule(a in proptest::collection::vec(-9i64..9, 0..6), b in proptest::collection::vec(-9i64..9, 0..6)) {
            let (a, b) = (p(&a), p(&b));
            let lhs = (&a * &b).derivative();
            let rhs = &(&a.derivative() * &b) + &(&a * &b.derivative());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn gcd_divides_both(a in proptest::collection::vec(-5i64..5, 1..5), b in proptest::collection::vec(-5i64..5, 1..5), c in proptest::collection::vec(-3i64..3, 1..3)) {
            let (a, b, c) = (p(&a), p(&b), p(&c));
            prop_assume!(!a.is_zero() && !b.is_zero() && !c.is_zero());
            let (x, y) = (&a * &c, &b * &c);
            let g = x.gcd(&y);
            prop_assert!(x.exact_div(&g).is_some());
            prop_assert!(y.exact_div(&g).is_some());
            prop_assert!(g.degree() >= c.primitive_part().degree());
        }
    }
}
