//! Generating-function values against Riemann-sum limits over the full
//! parameter grid, and the q = 1 specializations.

use num_bigint::BigInt;
use num_rational::BigRational;

use qvolkenborn::characters::DirichletCharacter;
use qvolkenborn::hurwitz::HurwitzSeries;
use qvolkenborn::integrator::{integrate_with, IntegrationOptions, Kind, UDFunction};
use qvolkenborn::qnumbers;
use qvolkenborn::PrimeContext;

fn opts() -> IntegrationOptions {
    IntegrationOptions { workers: 1, ..Default::default() }
}

#[test]
fn witt_grid() {
    for p in [3u64, 5] {
        let d = if p == 3 { 5 } else { 3 };
        for q in [1 + p, 1 + 2 * p] {
            let c = PrimeContext::with_q_str(p, 18, &q.to_string()).unwrap();
            let chi = DirichletCharacter::quadratic(d, &c).unwrap();
            for kind in [Kind::Bosonic, Kind::Fermionic] {
                for twist in [None, Some(&chi)] {
                    let series = qnumbers::moments(6, kind, twist, &c).unwrap();
                    for (n, m) in series.iter().enumerate() {
                        let f = match twist {
                            Some(chi) => UDFunction::char_monomial(chi, n),
                            None => UDFunction::monomial(n),
                        };
                        let r = integrate_with(&f, f.natural_modulus(), kind, 7, &c, &opts()).unwrap();
                        let dv = m.diff_valuation(&r.value);
                        assert!(
                            dv.is_at_least(r.certified_valuation.min(7)),
                            "p={p} q={q} {kind} {f}: {m} vs {}",
                            r.value
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn classical_bernoulli_matches_series_path() {
    // t/(e^t - 1) = invert((e^t - 1)/t), with (e^t - 1)/t = Σ t^n/(n+1)!
    let c = PrimeContext::with_q_str(7, 20, "1").unwrap();
    let n_max = 10;
    let coeffs = (0..=n_max)
        .map(|n| c.one().div_integer(&BigInt::from(n + 1)).unwrap())
        .collect();
    let inv = HurwitzSeries::new(coeffs).unwrap().invert().unwrap();
    let exact = qnumbers::classical_bernoulli(n_max);
    for (b, s) in exact.iter().zip(inv.coeffs()) {
        assert!(c.rational(b).unwrap().diff_valuation(s).is_at_least(18));
    }
}

#[test]
fn euler_at_minus_one_matches_fermionic_q1() {
    for p in [3u64, 5] {
        let c = PrimeContext::with_q_str(p, 14, "1").unwrap();
        let h = qnumbers::frobenius_euler(&c.int(-1), 5, &c).unwrap();
        for n in 0..=5 {
            let r = integrate_with(&UDFunction::monomial(n), 1, Kind::Fermionic, 7, &c, &opts()).unwrap();
            assert!(h.entries[n].diff_valuation(&r.value).is_at_least(7), "p={p} n={n}");
        }
        assert_eq!(
            qnumbers::moments(5, Kind::Fermionic, None, &c).unwrap(),
            h.entries
        );
    }
}

#[test]
fn trivial_twist_reduces() {
    for (p, q) in [(3u64, "4"), (5, "11")] {
        let c = PrimeContext::with_q_str(p, 20, q).unwrap();
        let triv = DirichletCharacter::trivial(&c);
        for kind in [Kind::Bosonic, Kind::Fermionic] {
            let a = qnumbers::moments(6, kind, None, &c).unwrap();
            let b = qnumbers::moments(6, kind, Some(&triv), &c).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!(x.diff_valuation(y).is_at_least(12), "p={p} q={q} {kind}");
            }
        }
    }
}

#[test]
fn exponential_integrand_closed_form() {
    // I_q(r^x) = c_q (log q + log r)/(q r - 1)
    let c = PrimeContext::with_q_str(5, 16, "6").unwrap();
    let r = BigRational::from_integer(11.into());
    let f = UDFunction::exp_base(r.clone(), &c).unwrap();
    let got = integrate_with(&f, 1, Kind::Bosonic, 8, &c, &opts()).unwrap();
    let log_r = qvolkenborn::padic::padic_log(&c.rational(&r).unwrap()).unwrap();
    let qr_minus_one = &(c.q() * &c.rational(&r).unwrap()) - &c.one();
    let expect = (c.c_q() * &(c.log_q() + &log_r)).checked_div(&qr_minus_one).unwrap();
    assert!(got.value.diff_valuation(&expect).is_at_least(7), "{} vs {expect}", got.value);
}
