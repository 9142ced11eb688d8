//! q-Bernoulli and Frobenius-Euler numbers by generating-function
//! coefficient extraction, and the moments they predict.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::hurwitz::{Binomials, HurwitzSeries};
use crate::integrator::Kind;
use crate::padic::{PAdicNumber, PrimeContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    QBernoulli,
    QBernoulliChi,
    FrobeniusEuler,
    FrobeniusEulerChi,
    Classical,
}

impl std::fmt::Display for TableKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TableKind::QBernoulli => "q_bernoulli",
            TableKind::QBernoulliChi => "q_bernoulli_chi",
            TableKind::FrobeniusEuler => "frobenius_euler",
            TableKind::FrobeniusEulerChi => "frobenius_euler_chi",
            TableKind::Classical => "classical",
        })
    }
}

/// Entries `0..=n_max` of a generating function, with the parameters used.
#[derive(Clone, Debug)]
pub struct NumberTable {
    pub kind: TableKind,
    pub params: Map<String, Value>,
    pub entries: Vec<PAdicNumber>,
    working_precision: u32,
}

impl NumberTable {
    /// Absolute precision of each entry; exact entries report the working
    /// precision.
    pub fn precisions(&self) -> Vec<i64> {
        self.entries
            .iter()
            .map(|e| e.abs_precision().unwrap_or(i64::from(self.working_precision)))
            .collect()
    }

    pub fn get(&self, n: usize) -> Option<&PAdicNumber> {
        self.entries.get(n)
    }
}

impl Serialize for NumberTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(4))?;
        m.serialize_entry("kind", &self.kind)?;
        m.serialize_entry("params", &self.params)?;
        m.serialize_entry("entries", &self.entries)?;
        m.serialize_entry("precisions", &self.precisions())?;
        m.end()
    }
}

fn base_params(ctx: &PrimeContext) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("p".into(), json!(ctx.p()));
    m.insert("q".into(), json!(ctx.q_param().to_string()));
    m.insert("working_precision".into(), json!(ctx.precision()));
    m
}

fn table(
    kind: TableKind,
    params: Map<String, Value>,
    series: &HurwitzSeries,
    n_max: usize,
    ctx: &PrimeContext,
) -> NumberTable {
    NumberTable {
        kind,
        params,
        entries: series.coeffs()[..=n_max].to_vec(),
        working_precision: ctx.precision(),
    }
}

fn guard_degree(n_max: usize) -> usize {
    n_max + 2
}

/// `q^a` for a small nonnegative integer `a`.
fn q_pow(ctx: &PrimeContext, a: u64) -> PAdicNumber {
    ctx.q().pow(a)
}

/// `B_{n,q}` from `(log q + t)/(q e^t - 1) = Σ B_{n,q} t^n/n!`.
pub fn q_bernoulli(n_max: usize, ctx: &PrimeContext) -> Result<NumberTable> {
    if ctx.is_classical() {
        return Err(Error::Domain("q = 1: use classical_bernoulli".into()));
    }
    let deg = guard_degree(n_max);
    let one = HurwitzSeries::one(ctx, deg);
    let t = HurwitzSeries::t(ctx, deg);
    let num = HurwitzSeries::linear_combo(&[(ctx.log_q().clone(), &one), (ctx.one(), &t)])?;
    let e = HurwitzSeries::exp_linear(&ctx.one(), deg, ctx);
    let den = HurwitzSeries::linear_combo(&[(ctx.q().clone(), &e), (ctx.int(-1), &one)])?;
    let series = num.binomial_convolve(&den.invert()?)?;
    Ok(table(TableKind::QBernoulli, base_params(ctx), &series, n_max, ctx))
}

/// Classical Bernoulli numbers (`t/(e^t - 1)`, so `B_1 = -1/2`) in exact
/// rationals, by inverting `(e^t - 1)/t = Σ t^n/(n+1)!`.
pub fn classical_bernoulli(n_max: usize) -> Vec<BigRational> {
    let binom = Binomials::new(n_max);
    let c: Vec<BigRational> = (0..=n_max)
        .map(|n| BigRational::new(BigInt::one(), BigInt::from(n + 1)))
        .collect();
    let mut g: Vec<BigRational> = vec![BigRational::one()];
    for n in 1..=n_max {
        let s = (1..=n).fold(BigRational::zero(), |acc, k| {
            acc + BigRational::from_integer(binom.get(n, k).clone()) * &c[k] * &g[n - k]
        });
        g.push(-s);
    }
    g
}

pub fn classical_bernoulli_table(n_max: usize, ctx: &PrimeContext) -> Result<NumberTable> {
    let entries = classical_bernoulli(n_max)
        .iter()
        .map(|b| ctx.rational(b))
        .collect::<Result<Vec<_>>>()?;
    let mut params = base_params(ctx);
    params.insert("q".into(), json!("1"));
    Ok(NumberTable {
        kind: TableKind::Classical,
        params,
        entries,
        working_precision: ctx.precision(),
    })
}

fn char_params(ctx: &PrimeContext, chi: &DirichletCharacter) -> Map<String, Value> {
    let mut m = base_params(ctx);
    m.insert("d".into(), json!(chi.modulus()));
    m.insert("chi_order".into(), json!(chi.order()));
    m
}

fn check_char(chi: &DirichletCharacter, ctx: &PrimeContext) -> Result<()> {
    if chi.prime() != ctx.p() {
        return Err(Error::MismatchedPrime(ctx.p(), chi.prime()));
    }
    Ok(())
}

/// `B_{n,q,χ}` from
/// `Σ_a χ(a) q^a e^{at} (t + log q) / (q^d e^{dt} - 1)`.
pub fn generalized_q_bernoulli(
    chi: &DirichletCharacter,
    n_max: usize,
    ctx: &PrimeContext,
) -> Result<NumberTable> {
    check_char(chi, ctx)?;
    if ctx.is_classical() {
        return Err(Error::Domain("q = 1: use generalized_bernoulli".into()));
    }
    let deg = guard_degree(n_max);
    let d = chi.modulus();
    let mut terms: Vec<(PAdicNumber, HurwitzSeries)> = Vec::new();
    for a in 0..d {
        let c = chi.evaluate(a as i64);
        if c.is_zero() {
            continue;
        }
        let ea = HurwitzSeries::exp_linear(&ctx.int(a), deg, ctx);
        let w = &c * &q_pow(ctx, a);
        terms.push((w.clone(), ea.mul_by_t()));
        terms.push((&w * ctx.log_q(), ea));
    }
    let refs: Vec<(PAdicNumber, &HurwitzSeries)> = terms.iter().map(|(c, s)| (c.clone(), s)).collect();
    let num = HurwitzSeries::linear_combo(&refs)?;
    let ed = HurwitzSeries::exp_linear(&ctx.int(d), deg, ctx);
    let one = HurwitzSeries::one(ctx, deg);
    let den = HurwitzSeries::linear_combo(&[(q_pow(ctx, d), &ed), (ctx.int(-1), &one)])?;
    let series = num.binomial_convolve(&den.invert()?)?;
    Ok(table(TableKind::QBernoulliChi, char_params(ctx, chi), &series, n_max, ctx))
}

/// Classical generalized Bernoulli numbers `B_{n,χ}`:
/// `Σ_a χ(a) e^{at} · t/(e^{dt} - 1)`.
pub fn generalized_bernoulli(
    chi: &DirichletCharacter,
    n_max: usize,
    ctx: &PrimeContext,
) -> Result<NumberTable> {
    check_char(chi, ctx)?;
    let deg = guard_degree(n_max);
    let d = chi.modulus();
    // (e^{dt} - 1)/t has coefficients d^{n+1}/(n+1)
    let coeffs = (0..=deg)
        .map(|n| ctx.int(BigInt::from(d).pow(n as u32 + 1)).div_integer(&BigInt::from(n + 1)))
        .collect::<Result<Vec<_>>>()?;
    let den = HurwitzSeries::new(coeffs)?;
    let mut acc = HurwitzSeries::zero(ctx.p(), deg);
    for a in 0..d {
        let c = chi.evaluate(a as i64);
        if c.is_zero() {
            continue;
        }
        acc = acc.add(&HurwitzSeries::exp_linear(&ctx.int(a), deg, ctx).scale(&c))?;
    }
    let series = acc.binomial_convolve(&den.invert()?)?;
    let mut params = char_params(ctx, chi);
    params.insert("q".into(), json!("1"));
    Ok(table(TableKind::QBernoulliChi, params, &series, n_max, ctx))
}

/// `u = -q^{-1}`, the Frobenius-Euler parameter of the fermionic integral.
pub fn fermionic_u(ctx: &PrimeContext) -> Result<PAdicNumber> {
    Ok(-ctx.q().inverse()?)
}

/// `H_n(u)` from `(1 - u)/(e^t - u) = Σ H_n(u) t^n/n!`.
pub fn frobenius_euler(u: &PAdicNumber, n_max: usize, ctx: &PrimeContext) -> Result<NumberTable> {
    let one_minus_u = &ctx.one() - u;
    if one_minus_u.is_zero() {
        return Err(Error::Domain("Frobenius-Euler numbers need u != 1".into()));
    }
    let deg = guard_degree(n_max);
    let e = HurwitzSeries::exp_linear(&ctx.one(), deg, ctx);
    let one = HurwitzSeries::one(ctx, deg);
    let den = HurwitzSeries::linear_combo(&[(ctx.one(), &e), (-u, &one)])?;
    let series = den.invert()?.scale(&one_minus_u);
    let mut params = base_params(ctx);
    params.insert("u".into(), json!(u.to_string()));
    Ok(table(TableKind::FrobeniusEuler, params, &series, n_max, ctx))
}

/// `H_{n,χ}(-q^{-1})` from
/// `[2]_q Σ_l (-1)^l q^l χ(l) e^{lt} / (q^d e^{dt} + 1)` for odd `d`.
pub fn generalized_frobenius_euler(
    chi: &DirichletCharacter,
    n_max: usize,
    ctx: &PrimeContext,
) -> Result<NumberTable> {
    check_char(chi, ctx)?;
    let d = chi.modulus();
    if d % 2 == 0 {
        return Err(Error::Domain(format!(
            "generalized Frobenius-Euler numbers need an odd modulus, got {d}"
        )));
    }
    let deg = guard_degree(n_max);
    let two_q = ctx.q_bracket(2);
    let mut acc = HurwitzSeries::zero(ctx.p(), deg);
    for l in 0..d {
        let c = chi.evaluate(l as i64);
        if c.is_zero() {
            continue;
        }
        let mut w = &c * &q_pow(ctx, l);
        if l % 2 == 1 {
            w = -w;
        }
        acc = acc.add(&HurwitzSeries::exp_linear(&ctx.int(l), deg, ctx).scale(&w))?;
    }
    let num = acc.scale(&two_q);
    let ed = HurwitzSeries::exp_linear(&ctx.int(d), deg, ctx);
    let one = HurwitzSeries::one(ctx, deg);
    let den = HurwitzSeries::linear_combo(&[(q_pow(ctx, d), &ed), (ctx.one(), &one)])?;
    let series = num.binomial_convolve(&den.invert()?)?;
    Ok(table(TableKind::FrobeniusEulerChi, char_params(ctx, chi), &series, n_max, ctx))
}

/// Series-side moments `∫ χ(x) x^n` for `n = 0..=n_max`.
pub fn moments(
    n_max: usize,
    kind: Kind,
    chi: Option<&DirichletCharacter>,
    ctx: &PrimeContext,
) -> Result<Vec<PAdicNumber>> {
    let entries = match (kind, chi) {
        (Kind::Bosonic, None) if ctx.is_classical() => classical_bernoulli_table(n_max, ctx)?.entries,
        (Kind::Bosonic, Some(chi)) if ctx.is_classical() => generalized_bernoulli(chi, n_max, ctx)?.entries,
        (Kind::Bosonic, None) => scale_all(q_bernoulli(n_max, ctx)?.entries, ctx.c_q()),
        (Kind::Bosonic, Some(chi)) => {
            scale_all(generalized_q_bernoulli(chi, n_max, ctx)?.entries, ctx.c_q())
        }
        (Kind::Fermionic, None) => frobenius_euler(&fermionic_u(ctx)?, n_max, ctx)?.entries,
        (Kind::Fermionic, Some(chi)) => generalized_frobenius_euler(chi, n_max, ctx)?.entries,
    };
    Ok(entries)
}

fn scale_all(v: Vec<PAdicNumber>, c: &PAdicNumber) -> Vec<PAdicNumber> {
    v.iter().map(|x| x * c).collect()
}

/// Series-side value of the `n`-th moment: `c_q B_{n,q}` (bosonic) or
/// `H_n(-q^{-1})` (fermionic), twisted by `χ` when given.
pub fn moment(
    n: usize,
    kind: Kind,
    chi: Option<&DirichletCharacter>,
    ctx: &PrimeContext,
) -> Result<PAdicNumber> {
    Ok(moments(n, kind, chi, ctx)?.swap_remove(n))
}

/// Working precision needed to obtain entries up to `n_max` at absolute
/// precision `target`.
pub fn required_precision(target: u32, n_max: usize, kind: Kind, ctx_q_valuation: Option<u32>) -> u32 {
    match kind {
        Kind::Bosonic => target + (n_max as u32 + 1) * ctx_q_valuation.unwrap_or(0) + 5,
        Kind::Fermionic => target + 5,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, m: u32, q: &str) -> PrimeContext {
        PrimeContext::with_q_str(p, m, q).unwrap()
    }

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    /// Independent oracle: Bernoulli numbers from the recurrence
    /// `Σ_{k<n+1} C(n+1,k) B_k = 0`, i.e. with `B_1 = -1/2`.
    fn bernoulli_recurrence(n_max: usize) -> Vec<BigRational> {
        let mut b = vec![r(1, 1)];
        for m in 1..=n_max {
            let mut s = r(0, 1);
            let mut binom = BigInt::one();
            for (k, bk) in b.iter().enumerate() {
                s += BigRational::from_integer(binom.clone()) * bk;
                binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
            }
            b.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
        }
        b
    }

    #[test]
    fn classical_values() {
        let b = classical_bernoulli(12);
        assert_eq!(b[0], r(1, 1));
        assert_eq!(b[1], r(-1, 2));
        assert_eq!(b[2], r(1, 6));
        assert_eq!(b[3], r(0, 1));
        assert_eq!(b[4], r(-1, 30));
        for k in 1..6 {
            assert!(b[2 * k + 1].is_zero());
        }
        assert_eq!(b, bernoulli_recurrence(12));
    }

    #[test]
    fn q_bernoulli_leading_terms() {
        let c = ctx(3, 30, "4");
        let t = q_bernoulli(4, &c).unwrap();
        let b0 = c.log_q().checked_div(&(c.q() - &c.one())).unwrap();
        assert_eq!(t.entries[0], b0);
        let lhs = c.c_q() * &t.entries[1];
        let rhs = &c.log_q().inverse().unwrap() - &c.q().checked_div(&(c.q() - &c.one())).unwrap();
        assert!(lhs.diff_valuation(&rhs).is_at_least(15));
        assert!(q_bernoulli(3, &ctx(3, 10, "1")).is_err());
    }

    #[test]
    fn generalized_reduces_to_plain() {
        let c = ctx(5, 30, "6");
        let triv = DirichletCharacter::trivial(&c);
        let a = generalized_q_bernoulli(&triv, 6, &c).unwrap();
        let b = q_bernoulli(6, &c).unwrap();
        assert_eq!(a.entries, b.entries);
        let fa = generalized_frobenius_euler(&triv, 6, &c).unwrap();
        let fb = frobenius_euler(&fermionic_u(&c).unwrap(), 6, &c).unwrap();
        assert_eq!(fa.entries, fb.entries);
        let c1 = ctx(5, 20, "1");
        let ga = generalized_bernoulli(&DirichletCharacter::trivial(&c1), 6, &c1).unwrap();
        assert_eq!(ga.entries, classical_bernoulli_table(6, &c1).unwrap().entries);
    }

    #[test]
    fn generalized_constant_terms() {
        let c = ctx(5, 30, "6");
        let chi = DirichletCharacter::quadratic(3, &c).unwrap();
        let b = generalized_q_bernoulli(&chi, 2, &c).unwrap();
        let expect = -(&(c.q() * c.log_q()).checked_div(&c.q_bracket(3)).unwrap());
        assert_eq!(b.entries[0], expect);
        let h = generalized_frobenius_euler(&chi, 2, &c).unwrap();
        let q = c.q();
        let den = &(&(q * q) - q) + &c.one();
        let expect = -(&(q * &(q + &c.one())).checked_div(&den).unwrap());
        assert_eq!(h.entries[0], expect);
    }

    #[test]
    fn frobenius_euler_values() {
        let c = ctx(5, 20, "6");
        let u = fermionic_u(&c).unwrap();
        let h = frobenius_euler(&u, 4, &c).unwrap();
        assert_eq!(h.entries[0], c.one());
        assert_eq!(h.entries[1], (&u - &c.one()).inverse().unwrap());
        let closed = -c.q().checked_div(&(c.q() + &c.one())).unwrap();
        assert_eq!(h.entries[1], closed);
        // u = -1: 2/(e^t + 1) = 1 - t/2 + t^3/24 - ...
        let c1 = ctx(5, 20, "1");
        let h = frobenius_euler(&c1.int(-1), 5, &c1).unwrap();
        let expect = [r(1, 1), r(-1, 2), r(0, 1), r(1, 4), r(0, 1), r(-1, 2)];
        for (e, x) in h.entries.iter().zip(expect.iter()) {
            assert_eq!(e, &c1.rational(x).unwrap());
        }
        assert!(frobenius_euler(&c1.one(), 3, &c1).is_err());
    }

    #[test]
    fn zeroth_moments_are_one() {
        let c = ctx(3, 20, "4");
        assert_eq!(moment(0, Kind::Bosonic, None, &c).unwrap(), c.one());
        assert_eq!(moment(0, Kind::Fermionic, None, &c).unwrap(), c.one());
        let m1 = moment(1, Kind::Fermionic, None, &c).unwrap();
        assert_eq!(m1, -c.q().checked_div(&(c.q() + &c.one())).unwrap());
    }

    #[test]
    fn first_bosonic_moment_closed_form() {
        for (p, q) in [(3, "4"), (3, "7"), (5, "6"), (5, "11")] {
            let c = ctx(p, 30, q);
            let m = moment(1, Kind::Bosonic, None, &c).unwrap();
            let q1 = c.q() - &c.one();
            let expect = &c.log_q().inverse().unwrap() - &c.q().checked_div(&q1).unwrap();
            assert!(m.diff_valuation(&expect).is_at_least(20), "p={p} q={q}: {m}");
        }
    }

    #[test]
    fn bosonic_moments_denominators() {
        // v_p ≥ -1, with -1 only where (p - 1) | n, as for classical B_n
        for (p, q) in [(3, "4"), (3, "7"), (5, "6"), (5, "11")] {
            let c = ctx(p, 30, q);
            for (n, m) in moments(8, Kind::Bosonic, None, &c).unwrap().iter().enumerate() {
                let v = m.valuation().finite().unwrap();
                assert!(v >= -1, "p={p} q={q} n={n}: {m}");
                if v == -1 {
                    assert!(n > 0 && n as u64 % (p - 1) == 0, "p={p} q={q} n={n}");
                }
            }
        }
    }

    #[test]
    fn precision_budget() {
        let c = ctx(3, 18, "4");
        let t = q_bernoulli(6, &c).unwrap();
        let c_q = c.c_q();
        for (n, e) in t.entries.iter().enumerate() {
            assert!((c_q * e).abs_precision().unwrap() >= 6, "entry {n}");
        }
        assert_eq!(required_precision(6, 6, Kind::Bosonic, Some(1)), 18);
        let j = serde_json::to_value(&t).unwrap();
        assert_eq!(j["kind"], "q_bernoulli");
        assert_eq!(j["entries"].as_array().unwrap().len(), 7);
        assert_eq!(j["precisions"].as_array().unwrap().len(), 7);
    }
}
