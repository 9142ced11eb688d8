//! p-adic logarithm, Teichmüller lifts and q-brackets.

use num_bigint::{BigInt, BigUint};
use num_traits::One;

use super::number::{p_pow, PAdicNumber, Valuation};
use super::PrimeContext;
use crate::error::{Error, Result};

/// Number of logarithm series terms needed so that every omitted term
/// `z^k/k` with `v(z) = w` has valuation at least `target`.
///
/// `k*w - floor(log_p k)` is nondecreasing in `k`, so the first `k` reaching
/// the target bounds the tail.
pub(crate) fn log_terms(p: u64, w: i64, target: i64) -> u64 {
    let mut k: u64 = 1;
    loop {
        let mut lg = 0i64;
        let mut t = k;
        while t >= p {
            t /= p;
            lg += 1;
        }
        if k as i64 * w - lg >= target {
            return k - 1;
        }
        k += 1;
    }
}

/// `log x = Σ (-1)^(k+1) (x-1)^k / k` for a 1-unit `x`.
///
/// The result carries the absolute precision of `x`.
pub fn padic_log(x: &PAdicNumber) -> Result<PAdicNumber> {
    let p = x.prime();
    if !x.is_unit() {
        return Err(Error::Domain(format!("log of non 1-unit {x}")));
    }
    let one = PAdicNumber::one(p, x.rel_precision());
    let z = x - &one;
    let w = match z.valuation() {
        Valuation::Finite(w) if w >= 1 => w,
        Valuation::Infinite => return Ok(PAdicNumber::zero(p)),
        Valuation::Finite(_) => {
            return Err(Error::Domain(format!("log of non 1-unit {x}")));
        }
    };
    if z.is_zero() {
        // x agrees with 1 to every known digit
        return Ok(z);
    }
    let target = x.abs_precision().expect("units have finite precision");
    let terms = log_terms(p, w, target);
    let mut power = z.clone();
    let mut sum = PAdicNumber::zero(p);
    for k in 1..=terms {
        let term = power.div_integer(&BigInt::from(k))?;
        sum = if k % 2 == 1 { &sum + &term } else { &sum - &term };
        power = &power * &z;
    }
    Ok(sum.truncate_abs(target))
}

/// Teichmüller representative of `a` modulo `p^k`, as a residue.
pub fn teichmuller_residue(p: u64, a: i64, k: u32) -> Result<BigUint> {
    if a.rem_euclid(p as i64) == 0 {
        return Err(Error::Domain(format!("teichmuller lift of {a}: p = {p} divides it")));
    }
    let m = p_pow(p, k);
    let pb = BigUint::from(p);
    let mut x = BigUint::from(a.rem_euclid(p as i64) as u64) % &m;
    loop {
        let next = x.modpow(&pb, &m);
        if next == x {
            return Ok(x);
        }
        x = next;
    }
}

/// The `(p-1)`-th root of unity congruent to `a` mod `p`, to the working
/// precision of `ctx`.
pub fn teichmuller(a: i64, ctx: &PrimeContext) -> Result<PAdicNumber> {
    let p = ctx.p();
    let x = teichmuller_residue(p, a, ctx.precision())?;
    Ok(PAdicNumber::from_parts(p, 0, x, ctx.precision()))
}

const DIRECT_BRACKET_LIMIT: u64 = 4096;

/// `[x]_base = 1 + base + … + base^(x-1)`.
///
/// Small `x` is summed directly; larger `x` goes through the closed form
/// `(1 - base^x)/(1 - base)` unless the base is indistinguishable from 1.
pub fn q_bracket(x: u64, base: &PAdicNumber) -> PAdicNumber {
    let p = base.prime();
    if x == 0 {
        return PAdicNumber::zero(p);
    }
    let rel = base.rel_precision().max(1);
    let one = PAdicNumber::one(p, rel);
    let diff = base - &one;
    if diff.is_zero() {
        return PAdicNumber::from_integer(p, x, rel);
    }
    if x <= DIRECT_BRACKET_LIMIT {
        let mut acc = one.clone();
        for _ in 1..x {
            acc = &(&acc * base) + &one;
        }
        return acc;
    }
    let num = &one - &base.pow(x);
    num.checked_div(&-&diff)
        .expect("nonzero base - 1 is invertible")
}

/// `[x]_q` with a rational base, evaluated exactly and then embedded.
pub fn q_bracket_rational(
    x: u64,
    base: &num_rational::BigRational,
    ctx: &PrimeContext,
) -> Result<PAdicNumber> {
    let mut acc = num_rational::BigRational::from_integer(BigInt::from(0));
    let mut pw = num_rational::BigRational::one();
    for _ in 0..x {
        acc += &pw;
        pw *= base;
    }
    ctx.rational(&acc)
}
