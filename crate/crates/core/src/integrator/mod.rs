//! Weighted Riemann sums over residues mod `d*p^N` and their limits.
//!
//! The bosonic sum at level `N` is `(1/[L]_q) Σ_{j<L} q^j f(j)` and the
//! fermionic one `(1/[L]_{-q}) Σ_{j<L} (-q)^j f(j)`, with `L = d*p^N`.

mod function;
mod kernel;

use num_bigint::BigUint;
use num_integer::Integer;
use serde::Serialize;

pub use function::{derivative_of, evaluate_f, UDFunction};

use crate::error::{Error, Result};
use crate::padic::{p_pow, reduce_signed, PAdicNumber, PrimeContext, Valuation};
use function::{lower, LoweredBody};
use kernel::{total_sum, BigRing, Body, Mont128, Mont64, Plan, ResidueRing};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Bosonic,
    Fermionic,
}

impl std::str::FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bosonic" => Ok(Kind::Bosonic),
            "fermionic" => Ok(Kind::Fermionic),
            _ => Err(Error::Parse(format!("kind must be bosonic or fermionic, got {s:?}"))),
        }
    }
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kind::Bosonic => "bosonic",
            Kind::Fermionic => "fermionic",
        })
    }
}

/// A certified limit of Riemann sums.
#[derive(Clone, Debug, Serialize)]
pub struct IntegralResult {
    pub value: PAdicNumber,
    /// Level `N` of the returned sum.
    pub level: u32,
    /// Consecutive levels agreed modulo `p^certified_valuation`.
    pub certified_valuation: i64,
    pub kind: Kind,
    /// `v_p(S_N - S_{N-1})` for `N = 2, …, level`.
    pub trajectory: Vec<Valuation>,
}

#[derive(Clone, Debug)]
pub struct IntegrationOptions {
    /// Highest level tried.
    pub n_max: u32,
    /// Refuse levels whose index range `d*p^N` exceeds this.
    pub max_terms: u64,
    pub workers: usize,
    /// Digits of working precision kept in reserve above the target.
    pub safety_margin: u32,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions {
            n_max: 12,
            max_terms: 1 << 26,
            workers: default_workers(),
            safety_margin: 2,
        }
    }
}

fn default_workers() -> usize {
    if cfg!(feature = "parallel") {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8)
    } else {
        1
    }
}

/// Number of summation indices `d*p^N`, if it fits in a `u64`.
pub fn level_size(p: u64, d: u64, n: u32) -> Option<u64> {
    p.checked_pow(n)?.checked_mul(d)
}

/// `μ_q(j + p^N Z_p) = q^j / [p^N]_q`.
pub fn measure_of_ball(j: u64, n: u32, ctx: &PrimeContext) -> Result<PAdicNumber> {
    let pn = level_size(ctx.p(), 1, n)
        .ok_or_else(|| Error::Domain(format!("p^{n} does not fit in 64 bits")))?;
    if j >= pn {
        return Err(Error::Domain(format!("ball index {j} is not below p^{n} = {pn}")));
    }
    ctx.q().pow(j).checked_div(&ctx.q_bracket(pn))
}

fn check_modulus(f: &UDFunction, d: u64, kind: Kind, ctx: &PrimeContext) -> Result<()> {
    if d == 0 || d.gcd(&ctx.p()) != 1 {
        return Err(Error::Domain(format!("modulus d = {d} must be positive and prime to p")));
    }
    if kind == Kind::Fermionic && d % 2 == 0 {
        return Err(Error::Domain(format!("fermionic sums need an odd modulus, got d = {d}")));
    }
    let m = f.natural_modulus();
    if d % m != 0 {
        return Err(Error::Domain(format!(
            "summation modulus {d} is not a multiple of the character modulus {m}"
        )));
    }
    Ok(())
}

fn build_plan<R: ResidueRing>(
    ring: &R,
    body: &LoweredBody,
    shift: u64,
    weight: &BigUint,
    modulus: &BigUint,
    k: u32,
) -> Result<Plan<R::Elem>> {
    let elems = |v: &[num_bigint::BigInt]| -> Vec<R::Elem> {
        v.iter().map(|c| ring.elem(&reduce_signed(c, modulus))).collect()
    };
    let body = match body {
        LoweredBody::Poly(c) => Body::Poly(elems(c)),
        LoweredBody::CharPoly(chi, c) => Body::CharPoly {
            chi: chi.residues(k)?.iter().map(|x| ring.elem(x)).collect(),
            poly: elems(c),
        },
        LoweredBody::Exp(r) => {
            let num = reduce_signed(r.numer(), modulus);
            let den = reduce_signed(r.denom(), modulus);
            let inv = den
                .modinv(modulus)
                .ok_or_else(|| Error::InvalidFunction(format!("base {r} has p in its denominator")))?;
            Body::Exp(ring.elem(&(num * inv % modulus)))
        }
    };
    Ok(Plan { weight: ring.elem(weight), shift, body })
}

/// Level-`N` Riemann sum of either kind over `d*p^N` residues, split across
/// `workers` chunks.
pub fn riemann_sum(
    f: &UDFunction,
    d: u64,
    n: u32,
    kind: Kind,
    ctx: &PrimeContext,
    workers: usize,
) -> Result<PAdicNumber> {
    check_modulus(f, d, kind, ctx)?;
    let p = ctx.p();
    let len = level_size(p, d, n)
        .ok_or_else(|| Error::Domain(format!("d*p^N = {d}*{p}^{n} does not fit in 64 bits")))?;
    let lowered = lower(f, ctx)?;
    let extra = match lowered.scalar.valuation() {
        Valuation::Finite(v) if v < 0 => (-v) as u32,
        _ => 0,
    };
    // [dp^N]_q has valuation N, so the bosonic quotient loses N digits;
    // [dp^N]_{-q} is a unit for odd d. The last few digits absorb a
    // negative valuation of the sum itself.
    let loss = match kind {
        Kind::Bosonic => n,
        Kind::Fermionic => 0,
    };
    let k = ctx.precision() + loss + extra + 4;
    let modulus = p_pow(p, k);
    let (qn, qd) = ctx.q_parts();
    let q_res = reduce_signed(&qn, &modulus)
        * reduce_signed(&qd, &modulus)
            .modinv(&modulus)
            .expect("q has a p-free denominator")
        % &modulus;
    let weight = match kind {
        Kind::Bosonic => q_res,
        Kind::Fermionic => (&modulus - q_res) % &modulus,
    };

    let (numer, norm) = if modulus < (BigUint::from(1u8) << 63) {
        let ring = Mont64::new(u64::try_from(&modulus).expect("below 2^63"));
        let plan = build_plan(&ring, &lowered.body, lowered.shift, &weight, &modulus, k)?;
        total_sum(&ring, &plan, len, workers)
    } else if modulus < (BigUint::from(1u8) << 127) {
        let ring = Mont128::new(u128::try_from(&modulus).expect("below 2^127"));
        let plan = build_plan(&ring, &lowered.body, lowered.shift, &weight, &modulus, k)?;
        total_sum(&ring, &plan, len, workers)
    } else {
        let ring = BigRing::new(modulus.clone());
        let plan = build_plan(&ring, &lowered.body, lowered.shift, &weight, &modulus, k)?;
        total_sum(&ring, &plan, len, workers)
    };
    let numer = PAdicNumber::from_residue(p, &numer, k, 0);
    let norm = PAdicNumber::from_residue(p, &norm, k, 0);
    let s = (&lowered.scalar * &numer).checked_div(&norm)?;
    Ok(s.truncate_abs(i64::from(ctx.precision())))
}

/// `(1/[dp^N]_q) Σ_{j<dp^N} q^j f(j)`.
pub fn riemann_sum_bosonic(f: &UDFunction, d: u64, n: u32, ctx: &PrimeContext) -> Result<PAdicNumber> {
    riemann_sum(f, d, n, Kind::Bosonic, ctx, 1)
}

/// `(1/[dp^N]_{-q}) Σ_{j<dp^N} (-q)^j f(j)`; `d` must be odd.
pub fn riemann_sum_fermionic(f: &UDFunction, d: u64, n: u32, ctx: &PrimeContext) -> Result<PAdicNumber> {
    riemann_sum(f, d, n, Kind::Fermionic, ctx, 1)
}

/// Integral as the limit of Riemann sums with default options.
pub fn integrate(
    f: &UDFunction,
    d: u64,
    kind: Kind,
    target_valuation: i64,
    ctx: &PrimeContext,
) -> Result<IntegralResult> {
    integrate_with(f, d, kind, target_valuation, ctx, &IntegrationOptions::default())
}

/// Runs levels `N = 1, 2, …` until two consecutive sums agree modulo
/// `p^target_valuation`.
pub fn integrate_with(
    f: &UDFunction,
    d: u64,
    kind: Kind,
    target_valuation: i64,
    ctx: &PrimeContext,
    opts: &IntegrationOptions,
) -> Result<IntegralResult> {
    let limit = i64::from(ctx.precision()) - i64::from(opts.safety_margin);
    if target_valuation > limit {
        return Err(Error::PrecisionExhausted(format!(
            "target valuation {target_valuation} exceeds working precision {} minus margin {}",
            ctx.precision(),
            opts.safety_margin
        )));
    }
    check_modulus(f, d, kind, ctx)?;
    let mut prev = riemann_sum(f, d, 1, kind, ctx, opts.workers)?;
    let mut trajectory = Vec::new();
    let mut level = 1;
    for n in 2..=opts.n_max {
        match level_size(ctx.p(), d, n) {
            Some(len) if len <= opts.max_terms => {}
            _ => break,
        }
        let cur = riemann_sum(f, d, n, kind, ctx, opts.workers)?;
        let defect = prev.diff_valuation(&cur);
        trajectory.push(defect);
        level = n;
        if defect.is_at_least(target_valuation) {
            let certified = match defect {
                Valuation::Finite(v) => v,
                Valuation::Infinite => cur.abs_precision().unwrap_or(i64::from(ctx.precision())),
            };
            return Ok(IntegralResult {
                value: cur,
                level: n,
                certified_valuation: certified,
                kind,
                trajectory,
            });
        }
        prev = cur;
    }
    let monotone = trajectory.windows(2).all(|w| w[0] <= w[1]);
    Err(Error::NonConvergence { target: target_valuation, level, trajectory, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn ctx(p: u64, m: u32, q: &str) -> PrimeContext {
        PrimeContext::with_q_str(p, m, q).unwrap()
    }

    fn half(c: &PrimeContext, sign: i64) -> PAdicNumber {
        c.rational(&BigRational::new(sign.into(), 2.into())).unwrap()
    }

    #[test]
    fn constant_sums_are_exactly_one() {
        for q in ["1", "4", "7"] {
            let c = ctx(3, 10, q);
            for n in 1..=5 {
                for kind in [Kind::Bosonic, Kind::Fermionic] {
                    let s = riemann_sum(&UDFunction::constant(1), 1, n, kind, &c, 1).unwrap();
                    assert_eq!(s.valuation(), Valuation::Finite(0));
                    assert_eq!(s.unit(), BigUint::from(1u32));
                }
            }
        }
    }

    #[test]
    fn classical_linear_sum() {
        let c = ctx(3, 12, "1");
        let x = UDFunction::monomial(1);
        for n in 1..=6u32 {
            let s = riemann_sum_bosonic(&x, 1, n, &c).unwrap();
            let exact = c.rational(&BigRational::new((3i64.pow(n) - 1).into(), 2.into())).unwrap();
            assert_eq!(s, exact);
            assert_eq!(s.diff_valuation(&half(&c, -1)), Valuation::Finite(i64::from(n)));
            let fs = riemann_sum_fermionic(&x, 1, n, &c).unwrap();
            assert_eq!(fs, exact);
        }
    }

    #[test]
    fn measure_sums_to_one() {
        let c = ctx(3, 12, "4");
        let total = (0..27).fold(PAdicNumber::zero(3), |acc, j| &acc + &measure_of_ball(j, 3, &c).unwrap());
        assert_eq!(total, c.one());
        let c1 = ctx(5, 8, "1");
        assert_eq!(
            measure_of_ball(3, 2, &c1).unwrap(),
            c1.one().div_integer(&25.into()).unwrap()
        );
        assert_eq!(
            measure_of_ball(0, 2, &c).unwrap(),
            c.q_bracket(9).inverse().unwrap()
        );
        assert!(measure_of_ball(9, 2, &c).is_err());
    }

    #[test]
    fn bosonic_linear_closed_form() {
        let c = ctx(3, 20, "4");
        let r = integrate(&UDFunction::monomial(1), 1, Kind::Bosonic, 6, &c).unwrap();
        let closed = &c.log_q().inverse().unwrap()
            - &c.q().checked_div(&(c.q() - &c.one())).unwrap();
        assert!(r.value.diff_valuation(&closed).is_at_least(6));
        assert!(r.certified_valuation >= 6);
    }

    #[test]
    fn fermionic_linear_closed_forms() {
        let c = ctx(3, 20, "1");
        let r = integrate(&UDFunction::monomial(1), 1, Kind::Fermionic, 6, &c).unwrap();
        assert!(r.value.diff_valuation(&half(&c, -1)).is_at_least(6));
        let c = ctx(5, 20, "6");
        let r = integrate(&UDFunction::monomial(1), 1, Kind::Fermionic, 6, &c).unwrap();
        let closed = -c.q().checked_div(&(c.q() + &c.one())).unwrap();
        assert!(r.value.diff_valuation(&closed).is_at_least(6));
    }

    #[test]
    fn constant_converges_immediately() {
        let c = ctx(5, 12, "6");
        let r = integrate(&UDFunction::constant(1), 1, Kind::Bosonic, 8, &c).unwrap();
        assert_eq!(r.level, 2);
        assert_eq!(r.value, c.one());
    }

    #[test]
    fn linearity_at_fixed_level() {
        let c = ctx(5, 16, "11");
        let f = UDFunction::poly_int(&[1, 2, 0, 3]);
        let g = UDFunction::poly_int(&[0, -1, 4]);
        let fg = UDFunction::poly_int(&[2 * 1 - 3 * 0, 2 * 2 - 3 * -1, -3 * 4, 2 * 3]);
        for kind in [Kind::Bosonic, Kind::Fermionic] {
            let sf = riemann_sum(&f, 1, 3, kind, &c, 1).unwrap();
            let sg = riemann_sum(&g, 1, 3, kind, &c, 1).unwrap();
            let sfg = riemann_sum(&fg, 1, 3, kind, &c, 1).unwrap();
            assert_eq!(sfg, &sf.mul_integer(&2.into()) - &sg.mul_integer(&3.into()));
        }
    }

    #[test]
    fn modulus_checks() {
        let c = ctx(5, 12, "6");
        let chi = crate::characters::DirichletCharacter::quadratic(3, &c).unwrap();
        let f = UDFunction::char_monomial(&chi, 1);
        assert!(riemann_sum(&f, 1, 2, Kind::Bosonic, &c, 1).is_err());
        assert!(riemann_sum(&f, 3, 2, Kind::Bosonic, &c, 1).is_ok());
        assert!(riemann_sum(&UDFunction::monomial(1), 2, 2, Kind::Fermionic, &c, 1).is_err());
        assert!(riemann_sum(&UDFunction::monomial(1), 5, 2, Kind::Bosonic, &c, 1).is_err());
    }

    #[test]
    fn target_above_precision_is_rejected() {
        let c = ctx(3, 8, "4");
        let e = integrate(&UDFunction::monomial(1), 1, Kind::Bosonic, 7, &c).unwrap_err();
        assert!(e.is_precision());
    }

    #[test]
    fn non_convergence_reports_trajectory() {
        let c = ctx(3, 30, "4");
        let opts = IntegrationOptions { n_max: 4, ..Default::default() };
        let e = integrate_with(&UDFunction::monomial(2), 1, Kind::Bosonic, 20, &c, &opts).unwrap_err();
        match e {
            Error::NonConvergence { trajectory, level, .. } => {
                assert_eq!(level, 4);
                assert_eq!(trajectory.len(), 3);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn big_modulus_fallback_agrees() {
        // 13^(M + N + 4) exceeds 2^127 here, forcing the BigUint ring
        let c = ctx(13, 30, "14");
        let f = UDFunction::poly_int(&[1, 1, 1]);
        let a = riemann_sum_bosonic(&f, 1, 2, &c).unwrap();
        let c_small = ctx(13, 20, "14");
        let b = riemann_sum_bosonic(&f, 1, 2, &c_small).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn all_rings_agree() {
        // 3^(M + N + 4) lands below 2^63, below 2^127 and above it
        let f = UDFunction::poly_int(&[2, -1, 0, 5]);
        for kind in [Kind::Bosonic, Kind::Fermionic] {
            let sums: Vec<PAdicNumber> = [10, 50, 80]
                .iter()
                .map(|&m| {
                    let s = riemann_sum(&f, 1, 4, kind, &ctx(3, m, "4"), 1).unwrap();
                    s.truncate_abs(10)
                })
                .collect();
            assert_eq!(sums[0], sums[1]);
            assert_eq!(sums[1], sums[2]);
            assert_eq!(sums[0].abs_precision(), Some(10));
        }
    }
}
