//! Truncated p-adic numbers in "floating point" form.
//!
//! A nonzero value is stored as `p^v * u + O(p^(v+r))` with `p ∤ u` and
//! `0 < u < p^r`. Zero comes in two flavours: the exact zero, and a value
//! that is only known to vanish modulo `p^a`. The second one is what a
//! subtraction produces when every tracked digit cancels.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A p-adic valuation, possibly infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_at_least(self, k: i64) -> bool {
        self >= Valuation::Finite(k)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_i64(*v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) if s == "inf" => Ok(Valuation::Infinite),
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(Valuation::Finite)
                .ok_or_else(|| de::Error::custom("valuation out of range")),
            other => Err(de::Error::custom(format!("bad valuation {other}"))),
        }
    }
}

#[derive(Clone, Debug)]
enum Repr {
    /// `abs == None` is the exact zero, otherwise `O(p^abs)`.
    Zero { abs: Option<i64> },
    Nonzero { val: i64, unit: BigUint, rel: u32 },
}

#[derive(Clone, Debug)]
pub struct PAdicNumber {
    p: u64,
    repr: Repr,
}

pub(crate) fn p_pow(p: u64, k: u32) -> BigUint {
    BigUint::from(p).pow(k)
}

/// Splits `x = p^e * m` with `p ∤ m`. `x` must be nonzero.
pub(crate) fn split_p(x: &BigUint, p: u64) -> (u32, BigUint) {
    debug_assert!(!x.is_zero());
    let pb = BigUint::from(p);
    let mut e = 0;
    let mut m = x.clone();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return (e, m);
        }
        m = q;
        e += 1;
    }
}

fn split_p_int(x: &BigInt, p: u64) -> (u32, BigInt) {
    let (e, m) = split_p(x.magnitude(), p);
    (e, BigInt::from_biguint(x.sign(), m))
}

/// Reduces a signed integer into `[0, m)`.
pub(crate) fn reduce_signed(x: &BigInt, m: &BigUint) -> BigUint {
    let mi = BigInt::from(m.clone());
    x.mod_floor(&mi).to_biguint().expect("mod_floor is nonnegative")
}

impl PAdicNumber {
    pub fn zero(p: u64) -> Self {
        PAdicNumber { p, repr: Repr::Zero { abs: None } }
    }

    /// `O(p^abs)`: a value known only to vanish modulo `p^abs`.
    pub fn approx_zero(p: u64, abs: i64) -> Self {
        PAdicNumber { p, repr: Repr::Zero { abs: Some(abs) } }
    }

    pub fn one(p: u64, rel: u32) -> Self {
        PAdicNumber::from_parts(p, 0, BigUint::one(), rel)
    }

    /// Builds `p^val * unit + O(p^(val+rel))`; `unit` is reduced modulo `p^rel`.
    ///
    /// Panics if `rel == 0` or `p` divides `unit`.
    pub fn from_parts(p: u64, val: i64, unit: BigUint, rel: u32) -> Self {
        assert!(rel >= 1, "relative precision must be positive");
        let unit = unit % p_pow(p, rel);
        assert!(
            !(&unit % p).is_zero(),
            "unit part must not be divisible by p"
        );
        PAdicNumber { p, repr: Repr::Nonzero { val, unit, rel } }
    }

    /// The value `p^shift * x` where `x` is only known modulo `p^k`.
    pub fn from_residue(p: u64, x: &BigUint, k: u32, shift: i64) -> Self {
        let x = x % p_pow(p, k);
        if x.is_zero() {
            return PAdicNumber::approx_zero(p, shift + i64::from(k));
        }
        let (e, u) = split_p(&x, p);
        PAdicNumber::from_parts(p, shift + i64::from(e), u, k - e)
    }

    /// An integer carried with relative precision `prec`.
    pub fn from_integer(p: u64, n: impl Into<BigInt>, prec: u32) -> Self {
        let n = n.into();
        if n.is_zero() {
            return PAdicNumber::zero(p);
        }
        let (e, m) = split_p_int(&n, p);
        let modulus = p_pow(p, prec);
        PAdicNumber::from_parts(p, i64::from(e), reduce_signed(&m, &modulus), prec)
    }

    /// A rational number, known to absolute precision at least `prec` and to
    /// relative precision at least `prec`.
    pub fn from_rational(p: u64, a: &BigRational, prec: u32) -> Result<Self> {
        if a.denom().is_zero() {
            return Err(Error::DivisionByZero);
        }
        if a.numer().is_zero() {
            return Ok(PAdicNumber::zero(p));
        }
        let (en, n) = split_p_int(a.numer(), p);
        let (ed, d) = split_p_int(a.denom(), p);
        let val = i64::from(en) - i64::from(ed);
        let rel = if val < 0 { prec + (-val) as u32 } else { prec };
        let modulus = p_pow(p, rel);
        let n = reduce_signed(&n, &modulus);
        let d = reduce_signed(&d, &modulus);
        let dinv = d.modinv(&modulus).expect("p-free denominator is invertible");
        Ok(PAdicNumber::from_parts(p, val, n * dinv, rel))
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn valuation(&self) -> Valuation {
        match &self.repr {
            Repr::Zero { abs: None } => Valuation::Infinite,
            // only a lower bound for an approximate zero
            Repr::Zero { abs: Some(a) } => Valuation::Finite(*a),
            Repr::Nonzero { val, .. } => Valuation::Finite(*val),
        }
    }

    /// Absolute precision `v + r`; `None` for the exact zero.
    pub fn abs_precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { abs } => *abs,
            Repr::Nonzero { val, rel, .. } => Some(val + i64::from(*rel)),
        }
    }

    /// Relative precision; zero for either kind of zero.
    pub fn rel_precision(&self) -> u32 {
        match &self.repr {
            Repr::Nonzero { rel, .. } => *rel,
            Repr::Zero { .. } => 0,
        }
    }

    /// Unit part; zero for either kind of zero.
    pub fn unit(&self) -> BigUint {
        match &self.repr {
            Repr::Nonzero { unit, .. } => unit.clone(),
            Repr::Zero { .. } => BigUint::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { abs: None })
    }

    /// True when the value is a unit, i.e. has valuation zero.
    pub fn is_unit(&self) -> bool {
        matches!(self.repr, Repr::Nonzero { val: 0, .. })
    }

    fn check_prime(&self, other: &Self) {
        assert_eq!(
            self.p, other.p,
            "arithmetic on p-adic numbers over different primes"
        );
    }

    /// Drops digits beyond absolute precision `abs`.
    pub fn truncate_abs(&self, abs: i64) -> Self {
        match &self.repr {
            Repr::Zero { abs: None } => PAdicNumber::approx_zero(self.p, abs),
            Repr::Zero { abs: Some(a) } => PAdicNumber::approx_zero(self.p, abs.min(*a)),
            Repr::Nonzero { val, unit, rel } => {
                if abs <= *val {
                    PAdicNumber::approx_zero(self.p, abs)
                } else {
                    let r = (*rel).min((abs - val) as u32);
                    PAdicNumber::from_parts(self.p, *val, unit.clone(), r)
                }
            }
        }
    }

    /// Residue modulo `p^k` of a value of nonnegative valuation, provided it
    /// is known that far.
    pub fn residue(&self, k: u32) -> Result<BigUint> {
        let need = i64::from(k);
        match &self.repr {
            Repr::Zero { abs: None } => Ok(BigUint::zero()),
            Repr::Zero { abs: Some(a) } if *a >= need => Ok(BigUint::zero()),
            Repr::Nonzero { val, unit, rel } if *val >= 0 && val + i64::from(*rel) >= need => {
                if *val >= need {
                    Ok(BigUint::zero())
                } else {
                    Ok((unit * p_pow(self.p, *val as u32)) % p_pow(self.p, k))
                }
            }
            _ => Err(Error::PrecisionExhausted(format!(
                "value {self} is not known modulo p^{k}"
            ))),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::MismatchedPrime(self.p, other.p));
        }
        Ok(self.add_impl(other))
    }

    fn add_impl(&self, other: &Self) -> Self {
        self.check_prime(other);
        let p = self.p;
        match (&self.repr, &other.repr) {
            (Repr::Zero { abs: None }, _) => other.clone(),
            (_, Repr::Zero { abs: None }) => self.clone(),
            (Repr::Zero { abs: Some(a) }, _) => other.truncate_abs(*a),
            (_, Repr::Zero { abs: Some(b) }) => self.truncate_abs(*b),
            (
                Repr::Nonzero { val: v1, unit: u1, rel: r1 },
                Repr::Nonzero { val: v2, unit: u2, rel: r2 },
            ) => {
                let abs = (v1 + i64::from(*r1)).min(v2 + i64::from(*r2));
                let ((vl, ul), (vh, uh)) = if v1 <= v2 {
                    ((*v1, u1), (*v2, u2))
                } else {
                    ((*v2, u2), (*v1, u1))
                };
                let k = (abs - vl) as u32;
                let shift = vh - vl;
                let modulus = p_pow(p, k);
                let sum = if shift < i64::from(k) {
                    (ul + uh * p_pow(p, shift as u32)) % &modulus
                } else {
                    ul % &modulus
                };
                PAdicNumber::from_residue(p, &sum, k, vl)
            }
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::MismatchedPrime(self.p, other.p));
        }
        Ok(self.mul_impl(other))
    }

    fn mul_impl(&self, other: &Self) -> Self {
        self.check_prime(other);
        let p = self.p;
        match (&self.repr, &other.repr) {
            (Repr::Zero { abs: None }, _) | (_, Repr::Zero { abs: None }) => PAdicNumber::zero(p),
            (Repr::Zero { abs: Some(a) }, Repr::Zero { abs: Some(b) }) => {
                PAdicNumber::approx_zero(p, a + b)
            }
            (Repr::Zero { abs: Some(a) }, Repr::Nonzero { val, .. })
            | (Repr::Nonzero { val, .. }, Repr::Zero { abs: Some(a) }) => {
                PAdicNumber::approx_zero(p, a + val)
            }
            (
                Repr::Nonzero { val: v1, unit: u1, rel: r1 },
                Repr::Nonzero { val: v2, unit: u2, rel: r2 },
            ) => {
                let rel = (*r1).min(*r2);
                PAdicNumber::from_parts(p, v1 + v2, u1 * u2, rel)
            }
        }
    }

    /// Multiplicative inverse of a nonzero value; relative precision is kept.
    pub fn inverse(&self) -> Result<Self> {
        match &self.repr {
            Repr::Zero { abs: None } => Err(Error::DivisionByZero),
            Repr::Zero { abs: Some(a) } => Err(Error::PrecisionExhausted(format!(
                "cannot invert O({}^{a})",
                self.p
            ))),
            Repr::Nonzero { val, unit, rel } => {
                let modulus = p_pow(self.p, *rel);
                let inv = unit.modinv(&modulus).expect("unit is invertible");
                Ok(PAdicNumber::from_parts(self.p, -val, inv, *rel))
            }
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::MismatchedPrime(self.p, other.p));
        }
        let inv = other.inverse()?;
        Ok(self.mul_impl(&inv))
    }

    /// Multiplies by an exact integer without losing precision.
    pub fn mul_integer(&self, n: &BigInt) -> Self {
        if n.is_zero() {
            return PAdicNumber::zero(self.p);
        }
        let (e, m) = split_p_int(n, self.p);
        match &self.repr {
            Repr::Zero { abs: None } => self.clone(),
            Repr::Zero { abs: Some(a) } => PAdicNumber::approx_zero(self.p, a + i64::from(e)),
            Repr::Nonzero { val, unit, rel } => {
                let modulus = p_pow(self.p, *rel);
                let m = reduce_signed(&m, &modulus);
                PAdicNumber::from_parts(self.p, val + i64::from(e), unit * m, *rel)
            }
        }
    }

    /// Divides by an exact nonzero integer without losing relative precision.
    pub fn div_integer(&self, n: &BigInt) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (e, m) = split_p_int(n, self.p);
        Ok(match &self.repr {
            Repr::Zero { abs: None } => self.clone(),
            Repr::Zero { abs: Some(a) } => PAdicNumber::approx_zero(self.p, a - i64::from(e)),
            Repr::Nonzero { val, unit, rel } => {
                let modulus = p_pow(self.p, *rel);
                let m = reduce_signed(&m, &modulus);
                let inv = m.modinv(&modulus).expect("p-free integer is invertible");
                PAdicNumber::from_parts(self.p, val - i64::from(e), unit * inv, *rel)
            }
        })
    }

    pub fn pow(&self, e: u64) -> Self {
        match &self.repr {
            Repr::Zero { .. } if e == 0 => PAdicNumber::one(self.p, 1),
            Repr::Zero { abs: None } => self.clone(),
            Repr::Zero { abs: Some(a) } => PAdicNumber::approx_zero(self.p, a * e as i64),
            Repr::Nonzero { val, unit, rel } => {
                let modulus = p_pow(self.p, *rel);
                PAdicNumber::from_parts(
                    self.p,
                    val * e as i64,
                    unit.modpow(&BigUint::from(e), &modulus),
                    *rel,
                )
            }
        }
    }

    /// Valuation of `self - other`.
    pub fn diff_valuation(&self, other: &Self) -> Valuation {
        (self - other).valuation()
    }

    /// The integer `p^v * u` (or `u / p^-v`) represented by the digits that
    /// are known, as an exact rational.
    pub fn to_rational(&self) -> BigRational {
        match &self.repr {
            Repr::Zero { .. } => BigRational::zero(),
            Repr::Nonzero { val, unit, .. } => {
                let u = BigInt::from(unit.clone());
                let pk = BigInt::from(p_pow(self.p, val.unsigned_abs() as u32));
                if *val >= 0 {
                    BigRational::from_integer(u * pk)
                } else {
                    BigRational::new(u, pk)
                }
            }
        }
    }

    /// Signed representative of the unit part in `(-p^r/2, p^r/2]`, handy for
    /// printing small negative numbers.
    pub fn balanced_unit(&self) -> BigInt {
        match &self.repr {
            Repr::Zero { .. } => BigInt::zero(),
            Repr::Nonzero { unit, rel, .. } => {
                let m = p_pow(self.p, *rel);
                let half: BigUint = &m >> 1;
                if unit > &half {
                    BigInt::from(unit.clone()) - BigInt::from(m)
                } else {
                    BigInt::from(unit.clone())
                }
            }
        }
    }
}

impl PartialEq for PAdicNumber {
    /// Equality up to the precision both sides carry.
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && (self - other).is_zero()
    }
}

impl PartialOrd for PAdicNumber {
    fn partial_cmp(&self, _other: &Self) -> Option<Ordering> {
        None
    }
}

impl<'a> Add<&'a PAdicNumber> for &'a PAdicNumber {
    type Output = PAdicNumber;
    fn add(self, rhs: &'a PAdicNumber) -> PAdicNumber {
        self.add_impl(rhs)
    }
}

impl Add for PAdicNumber {
    type Output = PAdicNumber;
    fn add(self, rhs: PAdicNumber) -> PAdicNumber {
        self.add_impl(&rhs)
    }
}

impl<'a> Sub<&'a PAdicNumber> for &'a PAdicNumber {
    type Output = PAdicNumber;
    fn sub(self, rhs: &'a PAdicNumber) -> PAdicNumber {
        self.add_impl(&-rhs)
    }
}

impl Sub for PAdicNumber {
    type Output = PAdicNumber;
    fn sub(self, rhs: PAdicNumber) -> PAdicNumber {
        self.add_impl(&-&rhs)
    }
}

impl<'a> Mul<&'a PAdicNumber> for &'a PAdicNumber {
    type Output = PAdicNumber;
    fn mul(self, rhs: &'a PAdicNumber) -> PAdicNumber {
        self.mul_impl(rhs)
    }
}

impl Mul for PAdicNumber {
    type Output = PAdicNumber;
    fn mul(self, rhs: PAdicNumber) -> PAdicNumber {
        self.mul_impl(&rhs)
    }
}

impl Neg for &PAdicNumber {
    type Output = PAdicNumber;
    fn neg(self) -> PAdicNumber {
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Nonzero { val, unit, rel } => {
                let m = p_pow(self.p, *rel);
                PAdicNumber::from_parts(self.p, *val, m - unit, *rel)
            }
        }
    }
}

impl Neg for PAdicNumber {
    type Output = PAdicNumber;
    fn neg(self) -> PAdicNumber {
        -&self
    }
}

/// Arithmetic selector for [`arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Binary arithmetic with every failure reported as an error.
pub fn arith(x: &PAdicNumber, y: &PAdicNumber, op: ArithOp) -> Result<PAdicNumber> {
    match op {
        ArithOp::Add => x.checked_add(y),
        ArithOp::Sub => x.checked_add(&-y),
        ArithOp::Mul => x.checked_mul(y),
        ArithOp::Div => x.checked_div(y),
    }
}

impl fmt::Display for PAdicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.p;
        match &self.repr {
            Repr::Zero { abs: None } => f.write_str("0"),
            Repr::Zero { abs: Some(a) } => write!(f, "O({p}^{a})"),
            Repr::Nonzero { val, unit, rel } => {
                write!(f, "{unit} * {p}^{val} + O({p}^{})", val + i64::from(*rel))
            }
        }
    }
}

impl Serialize for PAdicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(4))?;
        m.serialize_entry("p", &self.p)?;
        m.serialize_entry("valuation", &self.valuation())?;
        m.serialize_entry("unit", &self.unit().to_string())?;
        m.serialize_entry("rel_precision", &self.rel_precision())?;
        m.end()
    }
}

#[derive(Deserialize)]
struct PAdicWire {
    p: u64,
    valuation: Valuation,
    unit: String,
    rel_precision: u32,
}

impl<'de> Deserialize<'de> for PAdicNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = PAdicWire::deserialize(d)?;
        let unit: BigUint = w
            .unit
            .parse()
            .map_err(|_| de::Error::custom("unit must be a decimal string"))?;
        match (w.valuation, w.rel_precision) {
            (Valuation::Infinite, _) => Ok(PAdicNumber::zero(w.p)),
            (Valuation::Finite(v), 0) => Ok(PAdicNumber::approx_zero(w.p, v)),
            (Valuation::Finite(v), r) => {
                if (&unit % w.p).is_zero() || unit >= p_pow(w.p, r) {
                    return Err(de::Error::custom("unit must be a p-free residue below p^r"));
                }
                Ok(PAdicNumber::from_parts(w.p, v, unit, r))
            }
        }
    }
}

/// Converts a small integer-valued p-adic number back to an `i64` if it is
/// known exactly enough to be recognised (balanced representative).
pub fn to_small_integer(x: &PAdicNumber) -> Option<i64> {
    match x.valuation() {
        Valuation::Infinite => Some(0),
        Valuation::Finite(v) if v >= 0 && !x.is_zero() => {
            let u = x.balanced_unit().to_i64()?;
            u.checked_mul(x.p.checked_pow(v as u32)? as i64)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn one_half_mod_nine() {
        let x = PAdicNumber::from_rational(3, &rat(1, 2), 2).unwrap();
        assert_eq!(x.valuation(), Valuation::Finite(0));
        assert_eq!(x.unit(), BigUint::from(5u32));
    }

    #[test]
    fn nine_halves_has_valuation_two() {
        let x = PAdicNumber::from_rational(3, &rat(9, 2), 4).unwrap();
        assert_eq!(x.valuation(), Valuation::Finite(2));
        let y = PAdicNumber::from_integer(3, 10, 4);
        assert_eq!(y.valuation(), Valuation::Finite(0));
        assert_eq!(PAdicNumber::zero(3).valuation(), Valuation::Infinite);
        assert!(PAdicNumber::from_rational(3, &rat(0, 5), 4).unwrap().is_exact_zero());
    }

    #[test]
    fn negative_valuation_keeps_absolute_precision() {
        let x = PAdicNumber::from_rational(3, &rat(1, 9), 5).unwrap();
        assert_eq!(x.valuation(), Valuation::Finite(-2));
        assert_eq!(x.abs_precision(), Some(5));
    }

    #[test]
    fn basic_arithmetic() {
        let one = PAdicNumber::from_integer(3, 1, 6);
        let two = PAdicNumber::from_integer(3, 2, 6);
        let s = arith(&one, &two, ArithOp::Add).unwrap();
        assert_eq!(s.valuation(), Valuation::Finite(1));
        assert_eq!(s.unit(), BigUint::one());

        let a = PAdicNumber::from_parts(3, 1, BigUint::from(2u32), 5);
        let b = PAdicNumber::from_parts(3, 2, BigUint::from(4u32), 5);
        assert_eq!(arith(&a, &b, ArithOp::Mul).unwrap().valuation(), Valuation::Finite(3));

        let three = PAdicNumber::from_integer(3, 3, 6);
        let q = arith(&one, &three, ArithOp::Div).unwrap();
        assert_eq!(q.valuation(), Valuation::Finite(-1));
    }

    #[test]
    fn division_errors() {
        let one = PAdicNumber::from_integer(5, 1, 6);
        assert!(matches!(
            arith(&one, &PAdicNumber::zero(5), ArithOp::Div),
            Err(Error::DivisionByZero)
        ));
        let tiny = &one - &one;
        assert!(tiny.is_zero() && !tiny.is_exact_zero());
        assert!(matches!(
            arith(&one, &tiny, ArithOp::Div),
            Err(Error::PrecisionExhausted(_))
        ));
        let other = PAdicNumber::from_integer(7, 1, 6);
        assert!(matches!(
            arith(&one, &other, ArithOp::Add),
            Err(Error::MismatchedPrime(5, 7))
        ));
    }

    #[test]
    fn cancellation_shrinks_precision() {
        let a = PAdicNumber::from_integer(3, 10, 5);
        let b = PAdicNumber::from_integer(3, 1, 5);
        let d = &a - &b;
        assert_eq!(d.valuation(), Valuation::Finite(2));
        assert_eq!(d.abs_precision(), Some(5));
        assert_eq!(d.rel_precision(), 3);
    }

    #[test]
    fn equality_respects_precision() {
        let a = PAdicNumber::from_parts(5, 0, BigUint::from(7u32), 2);
        let b = PAdicNumber::from_parts(5, 0, BigUint::from(7u32 + 25 * 3), 4);
        assert_eq!(a, b);
        let c = PAdicNumber::from_parts(5, 1, BigUint::from(7u32), 2);
        assert_ne!(a, c);
    }

    #[test]
    fn text_and_json_forms() {
        let x = PAdicNumber::from_rational(3, &rat(1, 2), 2).unwrap();
        assert_eq!(x.to_string(), "5 * 3^0 + O(3^2)");
        let j = serde_json::to_value(&x).unwrap();
        assert_eq!(
            j,
            serde_json::json!({"p": 3, "valuation": 0, "unit": "5", "rel_precision": 2})
        );
        let z = serde_json::to_value(PAdicNumber::zero(3)).unwrap();
        assert_eq!(z["valuation"], "inf");
        let back: PAdicNumber = serde_json::from_value(j).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn small_integer_roundtrip() {
        let x = PAdicNumber::from_integer(5, -4, 8);
        assert_eq!(to_small_integer(&x), Some(-4));
        let y = PAdicNumber::from_integer(5, 50, 8);
        assert_eq!(to_small_integer(&y), Some(50));
    }
}
