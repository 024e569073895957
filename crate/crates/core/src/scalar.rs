//! Scalar arithmetic.
//!
//! [`Rational`] is an arbitrary precision fraction, [`QuadExt`] is an element
//! `a + b√d` of a quadratic extension of ℚ, and [`Real64`] is a plain `f64`.
//! Floating-point comparisons always take an explicit tolerance.

use alloc::format;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Roots;
use num_traits::{Float, FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;
pub type Real64 = f64;

/// Common interface of the scalar types all algebra modules are generic over.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `true` for types where `==` is exact equality of field elements.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn is_zero(&self) -> bool;

    /// Absolute value (modulus) as a float; used for pivoting and tolerances.
    fn magnitude(&self) -> f64;

    /// Real part as a float.
    fn to_real(&self) -> f64;

    /// A cube root lying in the same field, if one can be found.
    fn cube_root(&self) -> Option<Self> {
        None
    }

    /// Zero for exact types, `|self| <= tol` for floating types.
    fn is_negligible(&self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.magnitude() <= tol
        }
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_int(n) / Self::from_int(d)
    }
}

/// Shorthand for `n/d` as a [`Rational`].
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
}

/// Exact binary value of a finite float.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

fn rational_cube_root(q: &Rational) -> Option<Rational> {
    let n = q.numer().cbrt();
    let d = q.denom().cbrt();
    if &(&n * &n * &n) == q.numer() && &(&d * &d * &d) == q.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_int(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn magnitude(&self) -> f64 {
        Float::abs(rational_to_f64(self))
    }
    fn to_real(&self) -> f64 {
        rational_to_f64(self)
    }
    fn cube_root(&self) -> Option<Self> {
        rational_cube_root(self)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn magnitude(&self) -> f64 {
        Float::abs(*self)
    }
    fn to_real(&self) -> f64 {
        *self
    }
    fn cube_root(&self) -> Option<Self> {
        Some(Float::cbrt(*self))
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_int(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_rational(q: &Rational) -> Self {
        Complex64::new(rational_to_f64(q), 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn to_real(&self) -> f64 {
        self.re
    }
}

/// An element `a + b√d` of ℚ(√d).
///
/// `d = 0` marks a plain rational that has not yet met an extension; it
/// adopts the `d` of whatever it is combined with. Combining two different
/// nonzero `d` panics: there are no implicit towers. Use [`QuadExt::checked_d`]
/// to test compatibility beforehand.
#[derive(Clone, Debug)]
pub struct QuadExt {
    pub a: Rational,
    pub b: Rational,
    pub d: i64,
}

impl QuadExt {
    /// `a + b√d` with `d` squarefree and different from 0 and 1.
    pub fn new(a: Rational, b: Rational, d: i64) -> Result<Self> {
        validate_d(d)?;
        Ok(QuadExt { a, b, d })
    }

    /// A rational number, compatible with every extension.
    pub fn rational(a: Rational) -> Self {
        QuadExt { a, b: Zero::zero(), d: 0 }
    }

    /// `√d`.
    pub fn sqrt_d(d: i64) -> Result<Self> {
        QuadExt::new(Zero::zero(), One::one(), d)
    }

    /// Galois conjugate `a − b√d`.
    pub fn conj(&self) -> Self {
        QuadExt { a: self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    /// Field norm `a² − d b²`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * Rational::from_int(self.d)
    }

    pub fn is_rational(&self) -> bool {
        Zero::is_zero(&self.b)
    }

    pub fn with_d(mut self, d: i64) -> Result<Self> {
        if self.d != 0 && self.d != d && !self.is_rational() {
            return Err(Error::domain(format!(
                "mixed quadratic extensions: d = {} and d = {}",
                self.d, d
            )));
        }
        validate_d(d)?;
        self.d = d;
        Ok(self)
    }

    /// The common `d` of two values, or a domain error if they differ.
    pub fn checked_d(&self, other: &Self) -> Result<i64> {
        match (self.d, other.d) {
            (0, e) => Ok(e),
            (e, 0) => Ok(e),
            (e, f) if e == f => Ok(e),
            (e, f) => Err(Error::domain(format!(
                "mixed quadratic extensions: d = {e} and d = {f}"
            ))),
        }
    }

    fn common_d(&self, other: &Self) -> i64 {
        match self.checked_d(other) {
            Ok(d) => d,
            Err(e) => panic!("{e}"),
        }
    }

    /// Complex value (exact up to float rounding).
    pub fn to_complex(&self) -> Complex64 {
        let a = rational_to_f64(&self.a);
        let b = rational_to_f64(&self.b);
        if self.d >= 0 {
            Complex64::new(a + b * Float::sqrt(self.d as f64), 0.0)
        } else {
            Complex64::new(a, b * Float::sqrt(-self.d as f64))
        }
    }

    /// Exact sign of a real element (`d > 0` or rational).
    pub fn signum_real(&self) -> Option<i32> {
        if self.d < 0 && !self.is_rational() {
            return None;
        }
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 {
            return Some(sa);
        }
        if sa == 0 || sa == sb {
            return Some(sb);
        }
        // a and b√d have opposite signs: compare a² with d b².
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * Rational::from_int(self.d);
        Some(if lhs > rhs { sa } else { sb })
    }
}

fn sign_of(q: &Rational) -> i32 {
    if Zero::is_zero(q) {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

fn validate_d(d: i64) -> Result<()> {
    if d == 0 || d == 1 {
        return Err(Error::invalid(format!("d must differ from 0 and 1, got {d}")));
    }
    let (core, _) = squarefree_part(&Rational::from_int(d))?;
    if core != d {
        return Err(Error::invalid(format!("d must be squarefree, got {d}")));
    }
    Ok(())
}

impl PartialEq for QuadExt {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a
            && self.b == other.b
            && (Zero::is_zero(&self.b) || self.d == other.d || self.d == 0 || other.d == 0)
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + {}·√{}", self.a, self.b, self.d)
        }
    }
}

impl Add for QuadExt {
    type Output = QuadExt;
    fn add(self, o: QuadExt) -> QuadExt {
        let d = self.common_d(&o);
        QuadExt { a: self.a + o.a, b: self.b + o.b, d }
    }
}

impl Sub for QuadExt {
    type Output = QuadExt;
    fn sub(self, o: QuadExt) -> QuadExt {
        let d = self.common_d(&o);
        QuadExt { a: self.a - o.a, b: self.b - o.b, d }
    }
}

impl Mul for QuadExt {
    type Output = QuadExt;
    fn mul(self, o: QuadExt) -> QuadExt {
        let d = self.common_d(&o);
        let dd = Rational::from_int(d);
        QuadExt {
            a: &self.a * &o.a + &self.b * &o.b * dd,
            b: &self.a * &o.b + &self.b * &o.a,
            d,
        }
    }
}

impl Div for QuadExt {
    type Output = QuadExt;
    fn div(self, o: QuadExt) -> QuadExt {
        let d = self.common_d(&o);
        let n = o.norm();
        assert!(!Zero::is_zero(&n), "division by zero in quadratic extension");
        let num = self * o.conj();
        QuadExt { a: num.a / &n, b: num.b / n, d }
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt { a: -self.a, b: -self.b, d: self.d }
    }
}

impl Scalar for QuadExt {
    const EXACT: bool = true;

    fn zero() -> Self {
        QuadExt::rational(Zero::zero())
    }
    fn one() -> Self {
        QuadExt::rational(One::one())
    }
    fn from_int(v: i64) -> Self {
        QuadExt::rational(Rational::from_int(v))
    }
    fn from_rational(q: &Rational) -> Self {
        QuadExt::rational(q.clone())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.a) && Zero::is_zero(&self.b)
    }
    fn magnitude(&self) -> f64 {
        self.to_complex().norm()
    }
    fn to_real(&self) -> f64 {
        self.to_complex().re
    }
    fn cube_root(&self) -> Option<Self> {
        if self.is_rational() {
            return rational_cube_root(&self.a).map(|a| QuadExt { a, b: Zero::zero(), d: self.d });
        }
        if self.d < 0 {
            return None;
        }
        // Real embedding: the cube roots of v and its conjugate give 2p and 2q√d.
        let v = self.to_real();
        let vc = self.conj().to_real();
        let c = Float::cbrt(v);
        let cc = Float::cbrt(vc);
        let p = (c + cc) / 2.0;
        let q = (c - cc) / (2.0 * Float::sqrt(self.d as f64));
        let tol = 1e-9 * (1.0 + Float::abs(c));
        let p = rational_reconstruct(p, 1_000_000, tol)?;
        let q = rational_reconstruct(q, 1_000_000, tol)?;
        let r = QuadExt { a: p, b: q, d: self.d };
        if r.clone() * r.clone() * r.clone() == *self {
            Some(r)
        } else {
            None
        }
    }
}

const TRIAL_BOUND: u128 = 1 << 20;

/// Writes `q = r²·d` with `d` a squarefree integer.
pub fn squarefree_part(q: &Rational) -> Result<(i64, Rational)> {
    if Zero::is_zero(q) {
        return Err(Error::domain("squarefree part of zero"));
    }
    let sign: i64 = if q.is_negative() { -1 } else { 1 };
    // q = n/m = (n·m)/m²
    let nm: BigInt = (q.numer() * q.denom()).abs();
    let nm = nm
        .to_u128()
        .ok_or_else(|| Error::domain("value too large to factor"))?;
    let mut c = nm;
    let mut square: u128 = 1;
    let mut core: u128 = 1;
    let mut p: u128 = 2;
    while p <= TRIAL_BOUND && p * p <= c {
        let mut e = 0u32;
        while c % p == 0 {
            c /= p;
            e += 1;
        }
        square *= p.pow(e / 2);
        if e % 2 == 1 {
            core *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if c > 1 {
        if p * p > c {
            core *= c;
        } else {
            // Every prime factor of c exceeds the trial bound.
            let s = c.sqrt();
            if s * s == c {
                square *= s;
            } else if c < TRIAL_BOUND * TRIAL_BOUND * TRIAL_BOUND {
                core *= c;
            } else {
                return Err(Error::domain("value too large to factor"));
            }
        }
    }
    let d = i64::try_from(core).map_err(|_| Error::domain("squarefree part exceeds i64"))? * sign;
    let r = Rational::new(
        FromPrimitive::from_u128(square).expect("u128 fits"),
        q.denom().clone(),
    );
    Ok((d, r))
}

/// Best rational approximation with bounded denominator, by continued fractions.
pub fn rational_reconstruct(x: f64, max_denominator: u64, tol: f64) -> Option<Rational> {
    if !x.is_finite() || max_denominator == 0 || tol.is_nan() || tol <= 0.0 {
        return None;
    }
    let maxd = max_denominator as i128;
    let (mut h1, mut h2): (i128, i128) = (1, 0);
    let (mut k1, mut k2): (i128, i128) = (0, 1);
    let mut r = x;
    let close = |h: i128, k: i128| Float::abs(x - h as f64 / k as f64) <= tol;
    for _ in 0..64 {
        let a = Float::floor(r);
        if Float::abs(a) > 1e30 {
            return None;
        }
        let a_i = a as i128;
        let h = a_i.checked_mul(h1)?.checked_add(h2)?;
        let k = a_i.checked_mul(k1)?.checked_add(k2)?;
        if k > maxd {
            if k1 > 0 {
                let t = (maxd - k2) / k1;
                if t >= 1 {
                    let hs = t * h1 + h2;
                    let ks = t * k1 + k2;
                    if close(hs, ks) {
                        return Some(rat_i128(hs, ks));
                    }
                }
            }
            return None;
        }
        if close(h, k) {
            return Some(rat_i128(h, k));
        }
        let frac = r - a;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
        h2 = h1;
        h1 = h;
        k2 = k1;
        k1 = k;
    }
    None
}

fn rat_i128(h: i128, k: i128) -> Rational {
    Rational::new(BigInt::from(h), BigInt::from(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn arb_rat() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..20).prop_map(|(n, d)| rat(n, d))
    }

    fn arb_quad(d: i64) -> impl Strategy<Value = QuadExt> {
        (arb_rat(), arb_rat()).prop_map(move |(a, b)| QuadExt::new(a, b, d).unwrap())
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_part(&rat(1, 1)).unwrap(), (1, rat(1, 1)));
        assert_eq!(squarefree_part(&rat(128, 1)).unwrap(), (2, rat(8, 1)));
        assert_eq!(squarefree_part(&rat(-64, 1)).unwrap(), (-1, rat(8, 1)));
        assert!(squarefree_part(&rat(0, 1)).is_err());
        let (d, r) = squarefree_part(&rat(3, 8)).unwrap();
        assert_eq!(d, 6);
        assert_eq!(r, rat(1, 4));
    }

    #[test]
    fn squarefree_large_prime_square() {
        // (2^31 - 1)^2 · 3, a square of a prime beyond the trial bound.
        let p = BigInt::from(2147483647i64);
        let q = Rational::from_integer(&p * &p * BigInt::from(3));
        let (d, r) = squarefree_part(&q).unwrap();
        assert_eq!(d, 3);
        assert_eq!(r, Rational::from_integer(p));
    }

    #[test]
    fn reconstruct_examples() {
        assert_eq!(rational_reconstruct(0.5, 1_000_000, 1e-9), Some(rat(1, 2)));
        assert_eq!(rational_reconstruct(0.666666666667, 1_000_000, 1e-9), Some(rat(2, 3)));
        assert_eq!(rational_reconstruct(core::f64::consts::PI, 1000, 1e-12), None);
        assert_eq!(rational_reconstruct(-1.75, 10, 1e-12), Some(rat(-7, 4)));
        assert_eq!(rational_reconstruct(f64::NAN, 10, 1e-12), None);
    }

    #[test]
    fn quadext_validation() {
        assert!(QuadExt::new(rat(1, 1), rat(1, 1), 4).is_err());
        assert!(QuadExt::new(rat(1, 1), rat(1, 1), 1).is_err());
        assert!(QuadExt::new(rat(1, 1), rat(1, 1), 0).is_err());
        assert!(QuadExt::new(rat(1, 1), rat(1, 1), -1).is_ok());
        let a = QuadExt::sqrt_d(2).unwrap();
        let b = QuadExt::sqrt_d(3).unwrap();
        assert!(a.checked_d(&b).is_err());
    }

    #[test]
    #[should_panic(expected = "mixed quadratic extensions")]
    fn quadext_mixing_panics() {
        let _ = QuadExt::sqrt_d(2).unwrap() + QuadExt::sqrt_d(3).unwrap();
    }

    #[test]
    fn quadext_cube_roots() {
        // (1 + √2)³ = 7 + 5√2
        let x = QuadExt::new(rat(7, 1), rat(5, 1), 2).unwrap();
        assert_eq!(x.cube_root(), Some(QuadExt::new(rat(1, 1), rat(1, 1), 2).unwrap()));
        assert_eq!(QuadExt::rational(rat(-27, 8)).cube_root(), Some(QuadExt::rational(rat(-3, 2))));
        assert_eq!(rat(2, 1).cube_root(), None);
    }

    #[test]
    fn quadext_sign() {
        let x = QuadExt::new(rat(-3, 2), rat(1, 1), 2).unwrap();
        assert_eq!(x.signum_real(), Some(-1));
        let y = QuadExt::new(rat(-1, 1), rat(1, 1), 2).unwrap();
        assert_eq!(y.signum_real(), Some(1));
        assert_eq!(QuadExt::sqrt_d(-1).unwrap().signum_real(), None);
    }

    proptest! {
        #[test]
        fn rational_field_axioms(a in arb_rat(), b in arb_rat(), c in arb_rat()) {
            prop_assert_eq!((a.clone() + b.clone()) + c.clone(), a.clone() + (b.clone() + c.clone()));
            prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
            prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
        }

        #[test]
        fn quadext_field_axioms((a, b, c) in prop::sample::select(vec![-1i64, 2, 3, 5, -7])
            .prop_flat_map(|d| (arb_quad(d), arb_quad(d), arb_quad(d)))) {
            prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
            prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
            if !b.is_zero() {
                prop_assert_eq!((a.clone() / b.clone()) * b.clone(), a.clone());
            }
        }

        #[test]
        fn quadext_conjugation(a in arb_quad(5), b in arb_quad(5)) {
            prop_assert_eq!((a.clone() * b.clone()).conj(), a.conj() * b.conj());
            prop_assert_eq!(a.conj().conj(), a.clone());
            let n = a.clone() * a.conj();
            prop_assert!(n.is_rational());
            prop_assert_eq!(n.a, a.norm());
        }

        #[test]
        fn squarefree_round_trip(n in -100_000i64..100_000, m in 1i64..1000) {
            prop_assume!(n != 0);
            let q = rat(n, m);
            let (d, r) = squarefree_part(&q).unwrap();
            prop_assert_eq!(r.clone() * r * Rational::from_int(d), q);
            let (d2, _) = squarefree_part(&Rational::from_int(d)).unwrap();
            prop_assert_eq!(d2, d);
        }

        #[test]
        fn reconstruct_recovers_small_fractions(n in -1000i64..1000, m in 1i64..1000) {
            let x = n as f64 / m as f64;
            let r = rational_reconstruct(x, 1000, 1e-12).unwrap();
            prop_assert_eq!(r, rat(n, m));
        }
    }
}
