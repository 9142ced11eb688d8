use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::analytic::{padic_log, q_bracket};
use super::number::PAdicNumber;
use crate::error::{Error, Result};

/// The deformation parameter `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QParam {
    /// Classical Volkenborn / Haar setting.
    One,
    Rational(BigRational),
}

impl QParam {
    /// Parses `"1"`, `"a"` or `"a/b"`.
    pub fn parse(s: &str) -> Result<Self> {
        let r = parse_rational(s)?;
        if r.is_one() {
            Ok(QParam::One)
        } else {
            Ok(QParam::Rational(r))
        }
    }
}

impl fmt::Display for QParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QParam::One => f.write_str("1"),
            QParam::Rational(r) => write!(f, "{r}"),
        }
    }
}

/// Parses an integer or `a/b` rational literal.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational literal: {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(a, b))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// p-adic valuation of a nonzero integer.
pub(crate) fn int_valuation(n: &BigInt, p: u64) -> u32 {
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}

/// Fixed odd prime, working precision and `q`, shared by every computation.
///
/// The derived constants `q`, `log q` and `(q-1)/log q` are computed once at
/// construction.
#[derive(Clone, Debug)]
pub struct PrimeContext {
    p: u64,
    precision: u32,
    q: QParam,
    q_padic: PAdicNumber,
    log_q: PAdicNumber,
    c_q: PAdicNumber,
}

impl PrimeContext {
    pub fn new(p: u64, precision: u32, q: QParam) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        if precision == 0 {
            return Err(Error::Domain("working precision must be positive".into()));
        }
        let q = match q {
            QParam::Rational(r) if r.is_one() => QParam::One,
            other => other,
        };
        let (q_padic, log_q, c_q) = match &q {
            QParam::One => {
                let one = PAdicNumber::one(p, precision);
                (one.clone(), PAdicNumber::zero(p), one)
            }
            QParam::Rational(r) => {
                if int_valuation(r.denom(), p) > 0 {
                    return Err(Error::InvalidQ(format!(
                        "denominator of q = {r} is divisible by p = {p}"
                    )));
                }
                let qm1 = r - BigRational::one();
                if int_valuation(qm1.numer(), p) < 1 {
                    return Err(Error::InvalidQ(format!(
                        "q = {r} is not congruent to 1 mod p = {p}"
                    )));
                }
                let qp = PAdicNumber::from_rational(p, r, precision)?;
                let log_q = padic_log(&qp)?;
                let qm1 = PAdicNumber::from_rational(p, &qm1, precision)?;
                let c_q = qm1.checked_div(&log_q)?;
                (qp, log_q, c_q)
            }
        };
        Ok(PrimeContext { p, precision, q, q_padic, log_q, c_q })
    }

    /// Convenience constructor taking `q` as a literal such as `"4"` or `"1"`.
    pub fn with_q_str(p: u64, precision: u32, q: &str) -> Result<Self> {
        PrimeContext::new(p, precision, QParam::parse(q)?)
    }

    /// Same prime and `q` at another working precision.
    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        PrimeContext::new(self.p, precision, self.q.clone())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn q_param(&self) -> &QParam {
        &self.q
    }

    pub fn is_classical(&self) -> bool {
        self.q == QParam::One
    }

    /// `q` as an exact rational.
    pub fn q_rational(&self) -> BigRational {
        match &self.q {
            QParam::One => BigRational::one(),
            QParam::Rational(r) => r.clone(),
        }
    }

    pub fn q(&self) -> &PAdicNumber {
        &self.q_padic
    }

    /// `log q`; the exact zero when `q = 1`.
    pub fn log_q(&self) -> &PAdicNumber {
        &self.log_q
    }

    /// `(q-1)/log q`, equal to 1 in the classical case.
    pub fn c_q(&self) -> &PAdicNumber {
        &self.c_q
    }

    /// `v_p(q - 1)`, or `None` when `q = 1`.
    pub fn q_minus_one_valuation(&self) -> Option<u32> {
        match &self.q {
            QParam::One => None,
            QParam::Rational(r) => {
                let m = r - BigRational::one();
                Some(int_valuation(m.numer(), self.p))
            }
        }
    }

    pub fn one(&self) -> PAdicNumber {
        PAdicNumber::one(self.p, self.precision)
    }

    pub fn int(&self, n: impl Into<BigInt>) -> PAdicNumber {
        PAdicNumber::from_integer(self.p, n, self.precision)
    }

    pub fn rational(&self, r: &BigRational) -> Result<PAdicNumber> {
        PAdicNumber::from_rational(self.p, r, self.precision)
    }

    /// `[x]_q`, exact integer `x` in the classical case.
    pub fn q_bracket(&self, x: u64) -> PAdicNumber {
        match self.q {
            QParam::One => self.int(x),
            QParam::Rational(_) => q_bracket(x, &self.q_padic),
        }
    }

    /// `[x]_{-q}`.
    pub fn neg_q_bracket(&self, x: u64) -> PAdicNumber {
        q_bracket(x, &-&self.q_padic)
    }

    /// Modulus of `q`'s denominator and numerator, for the summation kernels.
    pub(crate) fn q_parts(&self) -> (BigInt, BigInt) {
        let r = self.q_rational();
        let g = r.numer().gcd(r.denom());
        (r.numer() / &g, r.denom() / &g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Valuation;

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            PrimeContext::with_q_str(2, 10, "1"),
            Err(Error::InvalidPrime(2))
        ));
        assert!(matches!(
            PrimeContext::with_q_str(9, 10, "1"),
            Err(Error::InvalidPrime(9))
        ));
        assert!(matches!(
            PrimeContext::with_q_str(3, 10, "2"),
            Err(Error::InvalidQ(_))
        ));
        assert!(matches!(
            PrimeContext::with_q_str(3, 10, "4/3"),
            Err(Error::InvalidQ(_))
        ));
        assert!(PrimeContext::with_q_str(3, 10, "7/4").is_ok());
    }

    #[test]
    fn c_q_is_a_unit() {
        for (p, q) in [(3, "4"), (3, "7"), (5, "6"), (5, "11"), (7, "50"), (3, "10/19")] {
            let ctx = PrimeContext::with_q_str(p, 20, q).unwrap();
            assert_eq!(ctx.c_q().valuation(), Valuation::Finite(0), "p={p} q={q}");
        }
        let ctx = PrimeContext::with_q_str(3, 20, "1").unwrap();
        assert!(ctx.is_classical());
        assert_eq!(ctx.c_q(), &ctx.one());
        assert!(ctx.log_q().is_exact_zero());
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("-3/6").unwrap(), BigRational::new((-1).into(), 2.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(QParam::parse("2/2").unwrap(), QParam::One);
    }
}
