//! Symbolic integrands: polynomials, character twists of polynomials and
//! 1-unit exponentials, closed under translation and constant scaling.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::padic::{int_valuation, padic_log, parse_rational, PAdicNumber, PrimeContext};

#[derive(Clone, Debug)]
pub enum UDFunction {
    /// `Σ c_k x^k`, coefficients low to high.
    Poly(Vec<BigRational>),
    /// `χ(x) Σ c_k x^k`.
    CharPoly(DirichletCharacter, Vec<BigRational>),
    /// `r^x` for a rational 1-unit `r`.
    ExpBase(BigRational),
    /// `f(x + n)`.
    Shifted(Box<UDFunction>, u64),
    /// `c · f(x)` for a p-adic constant `c`.
    Scaled(PAdicNumber, Box<UDFunction>),
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl UDFunction {
    pub fn poly_int(coeffs: &[i64]) -> Self {
        UDFunction::Poly(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn constant(c: i64) -> Self {
        UDFunction::poly_int(&[c])
    }

    /// `x^n`.
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![rat(0); n + 1];
        c[n] = rat(1);
        UDFunction::Poly(c)
    }

    /// `χ(x) x^n`.
    pub fn char_monomial(chi: &DirichletCharacter, n: usize) -> Self {
        let mut c = vec![rat(0); n + 1];
        c[n] = rat(1);
        UDFunction::CharPoly(chi.clone(), c)
    }

    /// `r^x`, checking that `r` is a 1-unit for the prime of `ctx`.
    pub fn exp_base(r: BigRational, ctx: &PrimeContext) -> Result<Self> {
        check_one_unit(&r, ctx.p())?;
        Ok(UDFunction::ExpBase(r))
    }

    /// `f_n(x) = f(x + n)`; nested shifts are merged.
    pub fn shifted(&self, n: u64) -> Self {
        match self {
            UDFunction::Shifted(inner, a) => UDFunction::Shifted(inner.clone(), a + n),
            other => UDFunction::Shifted(Box::new(other.clone()), n),
        }
    }

    pub fn scaled(&self, c: PAdicNumber) -> Self {
        UDFunction::Scaled(c, Box::new(self.clone()))
    }

    /// Twists a polynomial by `χ`.
    pub fn twisted(&self, chi: &DirichletCharacter) -> Result<Self> {
        match self {
            UDFunction::Poly(c) => Ok(UDFunction::CharPoly(chi.clone(), c.clone())),
            UDFunction::Shifted(inner, n) => Ok(UDFunction::Shifted(Box::new(inner.twisted(chi)?), *n)),
            UDFunction::Scaled(c, inner) => Ok(UDFunction::Scaled(c.clone(), Box::new(inner.twisted(chi)?))),
            other => Err(Error::InvalidFunction(format!("only polynomials can be twisted, got {other}"))),
        }
    }

    /// Least common multiple of the moduli of every character involved.
    pub fn natural_modulus(&self) -> u64 {
        match self {
            UDFunction::CharPoly(chi, _) => chi.modulus(),
            UDFunction::Shifted(inner, _) | UDFunction::Scaled(_, inner) => inner.natural_modulus(),
            _ => 1,
        }
    }

    pub fn is_twisted(&self) -> bool {
        match self {
            UDFunction::CharPoly(..) => true,
            UDFunction::Shifted(inner, _) | UDFunction::Scaled(_, inner) => inner.is_twisted(),
            _ => false,
        }
    }

    /// Parses `poly:c0,c1,…`, `chpoly:<file>:c0,…`, `expbase:a/b` or
    /// `shift:<n>:<inner>`.
    pub fn parse(s: &str, ctx: &PrimeContext) -> Result<Self> {
        let s = s.trim();
        let (tag, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("function {s:?} lacks a kind prefix")))?;
        match tag {
            "poly" => Ok(UDFunction::Poly(parse_coeffs(rest)?)),
            "chpoly" => {
                let (file, coeffs) = rest.rsplit_once(':').ok_or_else(|| {
                    Error::Parse(format!("expected chpoly:<charfile>:<coeffs>, got {s:?}"))
                })?;
                let chi = DirichletCharacter::load(Path::new(file), ctx)?;
                Ok(UDFunction::CharPoly(chi, parse_coeffs(coeffs)?))
            }
            "expbase" => UDFunction::exp_base(parse_rational(rest)?, ctx),
            "shift" => {
                let (n, inner) = rest.split_once(':').ok_or_else(|| {
                    Error::Parse(format!("expected shift:<n>:<inner>, got {s:?}"))
                })?;
                let n: u64 = n
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad shift amount {n:?}")))?;
                Ok(UDFunction::parse(inner, ctx)?.shifted(n))
            }
            other => Err(Error::Parse(format!("unknown function kind {other:?}"))),
        }
    }
}

fn parse_coeffs(s: &str) -> Result<Vec<BigRational>> {
    let v = s
        .split(',')
        .map(parse_rational)
        .collect::<Result<Vec<_>>>()?;
    if v.is_empty() {
        return Err(Error::Parse("empty coefficient list".into()));
    }
    Ok(v)
}

fn check_one_unit(r: &BigRational, p: u64) -> Result<()> {
    let ok = !r.numer().is_zero()
        && int_valuation(r.denom(), p) == 0
        && !(r - BigRational::one()).is_zero()
        && int_valuation((r - BigRational::one()).numer(), p) >= 1;
    if ok || r.is_one() {
        Ok(())
    } else {
        Err(Error::InvalidFunction(format!(
            "exponential base {r} is not a 1-unit for p = {p}"
        )))
    }
}

fn eval_poly(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    coeffs
        .iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * x + c)
}

fn rational_pow(r: &BigRational, e: u64) -> BigRational {
    num_traits::pow::pow(r.clone(), e as usize)
}

/// Exact value of `f(j)`.
pub fn evaluate_f(f: &UDFunction, j: u64, ctx: &PrimeContext) -> Result<PAdicNumber> {
    match f {
        UDFunction::Poly(c) => ctx.rational(&eval_poly(c, &rat(j as i64))),
        UDFunction::CharPoly(chi, c) => {
            let v = ctx.rational(&eval_poly(c, &rat(j as i64)))?;
            Ok(&chi.evaluate(j as i64) * &v)
        }
        UDFunction::ExpBase(r) => {
            check_one_unit(r, ctx.p())?;
            if j <= 64 {
                ctx.rational(&rational_pow(r, j))
            } else {
                Ok(ctx.rational(r)?.pow(j))
            }
        }
        UDFunction::Shifted(inner, n) => evaluate_f(inner, j + n, ctx),
        UDFunction::Scaled(c, inner) => Ok(c * &evaluate_f(inner, j, ctx)?),
    }
}

/// Symbolic derivative. Character twists are rejected: `χ` is only
/// locally constant, not a differentiable function of `x`.
pub fn derivative_of(f: &UDFunction, ctx: &PrimeContext) -> Result<UDFunction> {
    match f {
        UDFunction::Poly(c) => {
            if c.len() <= 1 {
                return Ok(UDFunction::constant(0));
            }
            Ok(UDFunction::Poly(
                c.iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, ck)| ck * rat(k as i64))
                    .collect(),
            ))
        }
        UDFunction::CharPoly(..) => Err(Error::InvalidFunction(
            "character-twisted functions have no derivative on Z_p".into(),
        )),
        UDFunction::ExpBase(r) => {
            check_one_unit(r, ctx.p())?;
            let log_r = padic_log(&ctx.rational(r)?)?;
            Ok(UDFunction::Scaled(log_r, Box::new(f.clone())))
        }
        UDFunction::Shifted(inner, n) => Ok(derivative_of(inner, ctx)?.shifted(*n)),
        UDFunction::Scaled(c, inner) => Ok(UDFunction::Scaled(c.clone(), Box::new(derivative_of(inner, ctx)?))),
    }
}

/// Integrand in the form the summation kernel consumes.
#[derive(Clone, Debug)]
pub(crate) enum LoweredBody {
    Poly(Vec<BigInt>),
    CharPoly(DirichletCharacter, Vec<BigInt>),
    Exp(BigRational),
}

/// `scalar · body(x + shift)`.
#[derive(Clone, Debug)]
pub(crate) struct Lowered {
    pub scalar: PAdicNumber,
    pub shift: u64,
    pub body: LoweredBody,
}

/// Clears denominators: returns integer coefficients and the common
/// denominator they were multiplied by.
fn integer_coeffs(c: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let den = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints = c
        .iter()
        .map(|x| (x * BigRational::from_integer(den.clone())).to_integer())
        .collect();
    (ints, den)
}

pub(crate) fn lower(f: &UDFunction, ctx: &PrimeContext) -> Result<Lowered> {
    match f {
        UDFunction::Poly(c) | UDFunction::CharPoly(_, c) => {
            if c.is_empty() {
                return Err(Error::InvalidFunction("empty polynomial".into()));
            }
            let (ints, den) = integer_coeffs(c);
            let scalar = ctx.one().div_integer(&den.abs())?;
            let scalar = if den.is_negative() { -scalar } else { scalar };
            let body = match f {
                UDFunction::CharPoly(chi, _) => {
                    if chi.prime() != ctx.p() {
                        return Err(Error::MismatchedPrime(ctx.p(), chi.prime()));
                    }
                    LoweredBody::CharPoly(chi.clone(), ints)
                }
                _ => LoweredBody::Poly(ints),
            };
            Ok(Lowered { scalar, shift: 0, body })
        }
        UDFunction::ExpBase(r) => {
            check_one_unit(r, ctx.p())?;
            Ok(Lowered { scalar: ctx.one(), shift: 0, body: LoweredBody::Exp(r.clone()) })
        }
        UDFunction::Shifted(inner, n) => {
            let mut l = lower(inner, ctx)?;
            l.shift += n;
            Ok(l)
        }
        UDFunction::Scaled(c, inner) => {
            let mut l = lower(inner, ctx)?;
            l.scalar = c * &l.scalar;
            Ok(l)
        }
    }
}

fn fmt_coeffs(c: &[BigRational]) -> String {
    c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for UDFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UDFunction::Poly(c) => write!(f, "poly:{}", fmt_coeffs(c)),
            UDFunction::CharPoly(chi, c) => {
                write!(f, "chpoly:<mod {}>:{}", chi.modulus(), fmt_coeffs(c))
            }
            UDFunction::ExpBase(r) => write!(f, "expbase:{r}"),
            UDFunction::Shifted(inner, n) => write!(f, "shift:{n}:{inner}"),
            UDFunction::Scaled(c, inner) => write!(f, "({c})*{inner}"),
        }
    }
}
