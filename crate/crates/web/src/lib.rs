//! wasm-bindgen entry points for the demo page in `www/`.
//!
//! Every export returns a JSON string; failures surface as JS exceptions
//! carrying the library's error message.

use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use qvolkenborn::integrator::{riemann_sum, IntegrationOptions, Kind, UDFunction};
use qvolkenborn::qnumbers;
use qvolkenborn::verify::verify_witt_with;
use qvolkenborn::{PrimeContext, Valuation};

/// Largest index range a single level may cover in the browser.
pub const MAX_TERMS: u64 = 2_000_000;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn parse_kind(kind: &str) -> Result<Kind, String> {
    kind.parse().map_err(err)
}

#[derive(Serialize)]
struct Entry {
    n: usize,
    text: String,
    valuation: Valuation,
    precision: i64,
}

/// `B_{n,q}` (or classical `B_n` for `q = 1`) to absolute precision `prec`.
pub fn bernoulli_table_json(p: u64, q: &str, nmax: usize, prec: u32) -> Result<Value, String> {
    let probe = PrimeContext::with_q_str(p, prec.max(1), q).map_err(err)?;
    let working = qnumbers::required_precision(prec, nmax, Kind::Bosonic, probe.q_minus_one_valuation());
    let ctx = probe.with_precision(working).map_err(err)?;
    let table = if ctx.is_classical() {
        qnumbers::classical_bernoulli_table(nmax, &ctx)
    } else {
        qnumbers::q_bernoulli(nmax, &ctx)
    }
    .map_err(err)?;
    let entries: Vec<Entry> = table
        .entries
        .iter()
        .enumerate()
        .map(|(n, e)| {
            let e = e.truncate_abs(i64::from(prec));
            Entry {
                n,
                text: e.to_string(),
                valuation: e.valuation(),
                precision: e.abs_precision().unwrap_or(i64::from(prec)),
            }
        })
        .collect();
    Ok(json!({ "kind": table.kind.to_string(), "p": p, "q": q, "entries": entries }))
}

/// Riemann sums `S_1, …, S_max_level` of `f` and the defects
/// `v_p(S_N - S_{N-1})`.
pub fn convergence_json(p: u64, q: &str, f: &str, kind: &str, max_level: u32, prec: u32) -> Result<Value, String> {
    let ctx = PrimeContext::with_q_str(p, prec.max(1), q).map_err(err)?;
    let kind = parse_kind(kind)?;
    let f = UDFunction::parse(f, &ctx).map_err(err)?;
    if f.is_twisted() {
        return Err("character files are not available in the browser; use poly:, expbase: or shift:".into());
    }
    let mut levels = Vec::new();
    let mut prev = None;
    for n in 1..=max_level {
        let len = p.checked_pow(n).unwrap_or(u64::MAX);
        if len > MAX_TERMS {
            break;
        }
        let s = riemann_sum(&f, 1, n, kind, &ctx, 1).map_err(err)?;
        let defect = prev.as_ref().map(|x: &qvolkenborn::PAdicNumber| x.diff_valuation(&s));
        levels.push(json!({ "level": n, "terms": len, "value": s.to_string(), "defect": defect }));
        prev = Some(s);
    }
    Ok(json!({ "p": p, "q": q, "f": f.to_string(), "kind": kind, "levels": levels }))
}

/// Moments from sums against generating-function values, `n = 0..=nmax`.
pub fn witt_json(p: u64, q: &str, nmax: usize, kind: &str, threshold: i64) -> Result<Value, String> {
    let kind = parse_kind(kind)?;
    if !(1..=12).contains(&threshold) {
        return Err(format!("threshold must lie in 1..=12, got {threshold}"));
    }
    let target = threshold as u32 + 1;
    let probe = PrimeContext::with_q_str(p, target, q).map_err(err)?;
    let working = qnumbers::required_precision(target, nmax, kind, probe.q_minus_one_valuation()).max(target + 5);
    let ctx = probe.with_precision(working).map_err(err)?;
    let opts = IntegrationOptions { max_terms: MAX_TERMS, workers: 1, ..Default::default() };
    let report = verify_witt_with(nmax, kind, None, &ctx, threshold, &opts).map_err(err)?;
    let rows: Vec<Value> = report
        .instances
        .iter()
        .map(|i| {
            json!({
                "label": i.label,
                "sum": i.lhs.to_string(),
                "series": i.rhs.to_string(),
                "diff_valuation": i.diff_valuation,
                "pass": i.pass,
            })
        })
        .collect();
    Ok(json!({ "verdict": report.verdict, "threshold": threshold, "rows": rows }))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn bernoulli_table(p: u32, q: &str, nmax: u32, prec: u32) -> Result<String, JsError> {
    to_js(bernoulli_table_json(u64::from(p), q, nmax as usize, prec))
}

#[wasm_bindgen]
pub fn convergence(p: u32, q: &str, f: &str, kind: &str, max_level: u32, prec: u32) -> Result<String, JsError> {
    to_js(convergence_json(u64::from(p), q, f, kind, max_level, prec))
}

#[wasm_bindgen]
pub fn witt_check(p: u32, q: &str, nmax: u32, kind: &str, threshold: i32) -> Result<String, JsError> {
    to_js(witt_json(u64::from(p), q, nmax as usize, kind, i64::from(threshold)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_has_requested_entries() {
        let v = bernoulli_table_json(3, "4", 5, 8).unwrap();
        assert_eq!(v["entries"].as_array().unwrap().len(), 6);
        assert_eq!(v["kind"], "q_bernoulli");
        let v = bernoulli_table_json(5, "1", 2, 6).unwrap();
        assert_eq!(v["kind"], "classical");
        assert!(bernoulli_table_json(4, "5", 2, 6).is_err());
    }

    #[test]
    fn defects_grow() {
        let v = convergence_json(3, "4", "poly:0,1", "bosonic", 8, 20).unwrap();
        let levels = v["levels"].as_array().unwrap();
        assert_eq!(levels.len(), 8);
        assert!(levels[0]["defect"].is_null());
        let d: Vec<i64> = levels[1..].iter().map(|l| l["defect"].as_i64().unwrap()).collect();
        assert!(d.windows(2).all(|w| w[0] <= w[1]));
        assert!(convergence_json(3, "4", "poly:0,1", "sideways", 4, 10).is_err());
    }

    #[test]
    fn level_cap() {
        let v = convergence_json(7, "1", "poly:0,0,1", "fermionic", 12, 10).unwrap();
        // 7^8 exceeds the browser cap
        assert_eq!(v["levels"].as_array().unwrap().len(), 7);
    }

    #[test]
    fn witt_passes() {
        let v = witt_json(3, "4", 3, "bosonic", 5).unwrap();
        assert_eq!(v["verdict"], "pass");
        assert_eq!(v["rows"].as_array().unwrap().len(), 4);
        let v = witt_json(5, "6", 3, "fermionic", 5).unwrap();
        assert_eq!(v["verdict"], "pass");
    }
}
