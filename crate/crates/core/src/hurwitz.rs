//! Truncated exponential generating functions `Σ c_n t^n / n!`.
//!
//! Coefficients are stored in divided-power form, so `e^{at}` has the
//! coefficient sequence `a^n` and products are binomial convolutions. No
//! factorial is ever divided out, which keeps `v_p(n!)` from eating
//! precision. Each coefficient carries its own precision.

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{PAdicNumber, PrimeContext};

/// Pascal's triangle up to row `n`.
#[derive(Clone, Debug)]
pub struct Binomials {
    rows: Vec<Vec<BigInt>>,
}

impl Binomials {
    pub fn new(n: usize) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
        rows.push(vec![BigInt::one()]);
        for i in 1..=n {
            let prev = &rows[i - 1];
            let mut row = Vec::with_capacity(i + 1);
            row.push(BigInt::one());
            for k in 1..i {
                row.push(&prev[k - 1] + &prev[k]);
            }
            row.push(BigInt::one());
            rows.push(row);
        }
        Binomials { rows }
    }

    pub fn get(&self, n: usize, k: usize) -> &BigInt {
        &self.rows[n][k]
    }
}

#[derive(Clone, Debug)]
pub struct HurwitzSeries {
    p: u64,
    coeffs: Vec<PAdicNumber>,
}

impl HurwitzSeries {
    /// Series from its coefficients `c_0, …, c_D`.
    pub fn new(coeffs: Vec<PAdicNumber>) -> Result<Self> {
        let p = coeffs
            .first()
            .map(PAdicNumber::prime)
            .ok_or_else(|| Error::Domain("a series needs at least one coefficient".into()))?;
        if let Some(c) = coeffs.iter().find(|c| c.prime() != p) {
            return Err(Error::MismatchedPrime(p, c.prime()));
        }
        Ok(HurwitzSeries { p, coeffs })
    }

    pub fn zero(p: u64, degree: usize) -> Self {
        HurwitzSeries { p, coeffs: vec![PAdicNumber::zero(p); degree + 1] }
    }

    pub fn constant(c: PAdicNumber, degree: usize) -> Self {
        let p = c.prime();
        let mut s = HurwitzSeries::zero(p, degree);
        s.coeffs[0] = c;
        s
    }

    pub fn one(ctx: &PrimeContext, degree: usize) -> Self {
        HurwitzSeries::constant(ctx.one(), degree)
    }

    /// The formal variable `t` itself.
    pub fn t(ctx: &PrimeContext, degree: usize) -> Self {
        HurwitzSeries::one(ctx, degree).mul_by_t()
    }

    /// `e^{a t}`: coefficients `a^n`.
    pub fn exp_linear(a: &PAdicNumber, degree: usize, ctx: &PrimeContext) -> Self {
        let mut coeffs = Vec::with_capacity(degree + 1);
        coeffs.push(ctx.one());
        for n in 1..=degree {
            let next = &coeffs[n - 1] * a;
            coeffs.push(next);
        }
        HurwitzSeries { p: ctx.p(), coeffs }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[PAdicNumber] {
        &self.coeffs
    }

    pub fn coefficient(&self, n: usize) -> Result<&PAdicNumber> {
        self.coeffs
            .get(n)
            .ok_or(Error::OutOfRange { index: n, degree: self.degree() })
    }

    pub fn truncate(&self, degree: usize) -> Self {
        let d = degree.min(self.degree());
        HurwitzSeries { p: self.p, coeffs: self.coeffs[..=d].to_vec() }
    }

    /// `(fg)_n = Σ_k C(n,k) f_k g_{n-k}`; the result has the smaller degree.
    pub fn binomial_convolve(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::MismatchedPrime(self.p, other.p));
        }
        let d = self.degree().min(other.degree());
        let binom = Binomials::new(d);
        let coeffs = (0..=d)
            .map(|n| {
                (0..=n).fold(PAdicNumber::zero(self.p), |acc, k| {
                    let term = (&self.coeffs[k] * &other.coeffs[n - k]).mul_integer(binom.get(n, k));
                    &acc + &term
                })
            })
            .collect();
        Ok(HurwitzSeries { p: self.p, coeffs })
    }

    /// Reciprocal series.
    ///
    /// Uses `g_0 = 1/c_0`, `g_n = -(1/c_0) Σ_{k=1..n} C(n,k) c_k g_{n-k}`.
    /// When `c_0` has positive valuation `w`, `g_n` can reach valuation
    /// `-(n+1)w`; the lost digits show up in each coefficient's precision.
    pub fn invert(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_exact_zero() {
            return Err(Error::DivisionByZero);
        }
        let inv0 = c0.inverse()?;
        let d = self.degree();
        let binom = Binomials::new(d);
        let mut g: Vec<PAdicNumber> = Vec::with_capacity(d + 1);
        g.push(inv0.clone());
        for n in 1..=d {
            let s = (1..=n).fold(PAdicNumber::zero(self.p), |acc, k| {
                let term = (&self.coeffs[k] * &g[n - k]).mul_integer(binom.get(n, k));
                &acc + &term
            });
            g.push(-(&s * &inv0));
        }
        Ok(HurwitzSeries { p: self.p, coeffs: g })
    }

    /// Multiplication by `t`: `(t f)_n = n f_{n-1}`. The degree is kept, so
    /// the old top coefficient drops off.
    pub fn mul_by_t(&self) -> Self {
        let d = self.degree();
        let mut coeffs = Vec::with_capacity(d + 1);
        coeffs.push(PAdicNumber::zero(self.p));
        for n in 1..=d {
            coeffs.push(self.coeffs[n - 1].mul_integer(&BigInt::from(n)));
        }
        HurwitzSeries { p: self.p, coeffs }
    }

    /// Division by `t` of a series with vanishing constant term:
    /// `(f/t)_n = f_{n+1}/(n+1)`. The degree drops by one.
    pub fn div_by_t(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Domain("series is not divisible by t".into()));
        }
        if self.degree() == 0 {
            return Err(Error::Domain("cannot divide a degree-0 series by t".into()));
        }
        let coeffs = (0..self.degree())
            .map(|n| self.coeffs[n + 1].div_integer(&BigInt::from(n + 1)))
            .collect::<Result<Vec<_>>>()?;
        Ok(HurwitzSeries { p: self.p, coeffs })
    }

    pub fn scale(&self, c: &PAdicNumber) -> Self {
        HurwitzSeries {
            p: self.p,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// `Σ scalar_i · f_i`, truncated to the smallest degree present.
    pub fn linear_combo(terms: &[(PAdicNumber, &HurwitzSeries)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::Domain("empty linear combination".into()))?;
        let p = first.p;
        let d = terms.iter().map(|(_, f)| f.degree()).min().unwrap_or(0);
        let mut acc = HurwitzSeries::zero(p, d);
        for (c, f) in terms {
            if f.p != p || c.prime() != p {
                return Err(Error::MismatchedPrime(p, if f.p != p { f.p } else { c.prime() }));
            }
            for n in 0..=d {
                acc.coeffs[n] = &acc.coeffs[n] + &(c * &f.coeffs[n]);
            }
        }
        Ok(acc)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::MismatchedPrime(self.p, other.p));
        }
        let d = self.degree().min(other.degree());
        let coeffs = (0..=d).map(|n| &self.coeffs[n] + &other.coeffs[n]).collect();
        Ok(HurwitzSeries { p: self.p, coeffs })
    }

    pub fn neg(&self) -> Self {
        HurwitzSeries { p: self.p, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Coefficientwise equality at tracked precision.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.p == other.p
            && self.degree() == other.degree()
            && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a == b)
    }

    /// Absolute precision of each coefficient; `None` for exact zeros.
    pub fn precisions(&self) -> Vec<Option<i64>> {
        self.coeffs.iter().map(PAdicNumber::abs_precision).collect()
    }
}

/// `Σ_{n} a_n` for exact small integer coefficients, as a series.
pub fn from_integers(ctx: &PrimeContext, ints: &[i64]) -> HurwitzSeries {
    let coeffs = ints.iter().map(|&n| ctx.int(n)).collect();
    HurwitzSeries { p: ctx.p(), coeffs }
}

/// `n!` as a big integer.
pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

impl Serialize for HurwitzSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("degree", &self.degree())?;
        m.serialize_entry("coeffs", &self.coeffs)?;
        m.end()
    }
}

impl PartialEq for HurwitzSeries {
    fn eq(&self, other: &Self) -> bool {
        self.agrees_with(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Valuation;

    fn ctx() -> PrimeContext {
        PrimeContext::with_q_str(5, 12, "1").unwrap()
    }

    #[test]
    fn exp_linear_coefficients() {
        let c = ctx();
        let e0 = HurwitzSeries::exp_linear(&PAdicNumber::zero(5), 4, &c);
        assert_eq!(e0, HurwitzSeries::one(&c, 4));
        let e1 = HurwitzSeries::exp_linear(&c.one(), 4, &c);
        assert!(e1.coeffs().iter().all(|x| x == &c.one()));
        let e2 = HurwitzSeries::exp_linear(&c.int(2), 4, &c);
        assert_eq!(e2.coefficient(3).unwrap(), &c.int(8));
        let e3 = HurwitzSeries::exp_linear(&c.int(3), 4, &c);
        assert_eq!(e3.coefficient(0).unwrap(), &c.one());
        assert_eq!(e3.coefficient(2).unwrap(), &c.int(9));
        assert!(matches!(e3.coefficient(5), Err(Error::OutOfRange { index: 5, degree: 4 })));
    }

    #[test]
    fn exp_is_a_homomorphism() {
        let c = ctx();
        let a = HurwitzSeries::exp_linear(&c.int(3), 8, &c);
        let b = HurwitzSeries::exp_linear(&c.int(-7), 8, &c);
        let ab = HurwitzSeries::exp_linear(&c.int(-4), 8, &c);
        assert_eq!(a.binomial_convolve(&b).unwrap(), ab);
        assert_eq!(HurwitzSeries::one(&c, 8).binomial_convolve(&a).unwrap(), a);
    }

    #[test]
    fn square_of_exp_minus_one() {
        let c = ctx();
        let e = HurwitzSeries::exp_linear(&c.one(), 8, &c);
        let f = e.sub(&HurwitzSeries::one(&c, 8)).unwrap();
        let sq = f.binomial_convolve(&f).unwrap();
        assert!(sq.coefficient(0).unwrap().is_zero());
        for n in 1..=8u32 {
            assert_eq!(sq.coefficient(n as usize).unwrap(), &c.int(2i64.pow(n) - 2));
        }
    }

    #[test]
    fn inversion_examples() {
        let c = ctx();
        let e = HurwitzSeries::exp_linear(&c.one(), 6, &c);
        let em = HurwitzSeries::exp_linear(&c.int(-1), 6, &c);
        assert_eq!(e.invert().unwrap(), em);
        let two = HurwitzSeries::constant(c.int(2), 6);
        let half = c.rational(&num_rational::BigRational::new(1.into(), 2.into())).unwrap();
        assert_eq!(two.invert().unwrap(), HurwitzSeries::constant(half, 6));
        assert!(matches!(
            HurwitzSeries::zero(5, 3).invert(),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn inversion_with_nonunit_constant_tracks_loss() {
        // q e^t - 1 with q = 6: constant term has valuation 1
        let c = PrimeContext::with_q_str(5, 20, "6").unwrap();
        let den = HurwitzSeries::exp_linear(&c.one(), 6, &c)
            .scale(c.q())
            .sub(&HurwitzSeries::one(&c, 6))
            .unwrap();
        let inv = den.invert().unwrap();
        for n in 0..=6 {
            let g = inv.coefficient(n).unwrap();
            assert!(g.valuation() >= Valuation::Finite(-(n as i64) - 1));
            assert!(g.abs_precision().unwrap() >= 20 - 2 * (n as i64 + 1));
        }
        let prod = den.binomial_convolve(&inv).unwrap();
        assert_eq!(prod, HurwitzSeries::one(&c, 6));
    }

    #[test]
    fn multiplication_by_t() {
        let c = ctx();
        let e = HurwitzSeries::exp_linear(&c.one(), 6, &c);
        let te = e.mul_by_t();
        for n in 0..=6 {
            assert_eq!(te.coefficient(n).unwrap(), &c.int(n as i64));
        }
        let t = HurwitzSeries::t(&c, 4);
        assert_eq!(t, from_integers(&c, &[0, 1, 0, 0, 0]));
        assert_eq!(t.mul_by_t(), from_integers(&c, &[0, 0, 2, 0, 0]));
        assert_eq!(te.div_by_t().unwrap(), e.truncate(5));
        assert!(e.div_by_t().is_err());
    }

    #[test]
    fn linear_combinations() {
        let c = ctx();
        let f = from_integers(&c, &[1, 2, 3]);
        let g = from_integers(&c, &[4, 5, 6]);
        let zero = PAdicNumber::zero(5);
        assert_eq!(
            HurwitzSeries::linear_combo(&[(c.one(), &f), (zero, &g)]).unwrap(),
            f
        );
        let diff = HurwitzSeries::linear_combo(&[(c.one(), &f), (c.int(-1), &f)]).unwrap();
        assert!(diff.coeffs().iter().all(PAdicNumber::is_zero));
        let ones = from_integers(&c, &[1, 1, 1]);
        assert_eq!(
            HurwitzSeries::linear_combo(&[(c.int(2), &ones)]).unwrap(),
            from_integers(&c, &[2, 2, 2])
        );
    }

    #[test]
    fn mismatched_primes_are_rejected() {
        let a = HurwitzSeries::one(&ctx(), 3);
        let b = HurwitzSeries::one(&PrimeContext::with_q_str(7, 5, "1").unwrap(), 3);
        assert!(matches!(a.binomial_convolve(&b), Err(Error::MismatchedPrime(5, 7))));
    }

    #[test]
    fn json_form() {
        let c = ctx();
        let j = serde_json::to_value(from_integers(&c, &[1, 0])).unwrap();
        assert_eq!(j["degree"], 1);
        assert_eq!(j["coeffs"][0]["unit"], "1");
        assert_eq!(j["coeffs"][1]["valuation"], "inf");
    }

    proptest::proptest! {
        #[test]
        fn inverse_is_exact_to_tracked_precision(
            nums in proptest::collection::vec(-60i64..60, 1..9),
            dens in proptest::collection::vec(1i64..30, 9),
        ) {
            // denominators may contain p; whatever precision survives must be right
            let c = PrimeContext::with_q_str(3, 15, "1").unwrap();
            let mut coeffs: Vec<PAdicNumber> = nums
                .iter()
                .zip(&dens)
                .map(|(&a, &b)| c.rational(&num_rational::BigRational::new(a.into(), b.into())).unwrap())
                .collect();
            coeffs[0] = c.int(3 * nums[0] + 1);
            let f = HurwitzSeries::new(coeffs).unwrap();
            let g = f.invert().unwrap();
            let prod = f.binomial_convolve(&g).unwrap();
            let one = HurwitzSeries::one(&c, f.degree());
            for (x, y) in prod.coeffs().iter().zip(one.coeffs()) {
                proptest::prop_assert!((x - y).is_zero(), "{} vs {}", x, y);
            }
        }
    }
}
