use thiserror::Error;

use crate::padic::Valuation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    InvalidPrime(u64),

    #[error("invalid q: {0}")]
    InvalidQ(String),

    #[error("mismatched primes: {0} vs {1}")]
    MismatchedPrime(u64, u64),

    #[error("division by exact zero")]
    DivisionByZero,

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {index} out of range for series of degree {degree}")]
    OutOfRange { index: usize, degree: usize },

    #[error("invalid character: {0}")]
    InvalidCharacter(String),

    #[error("character is not multiplicative: chi({a})*chi({b}) = {lhs} but chi({ab}) = {rhs}")]
    NotMultiplicative {
        a: u64,
        b: u64,
        ab: u64,
        lhs: String,
        rhs: String,
    },

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error(
        "no convergence to valuation {target} by level {level} (defect valuations {}, {})",
        fmt_trajectory(.trajectory),
        if *.monotone { "monotone" } else { "not monotone" }
    )]
    NonConvergence {
        target: i64,
        level: u32,
        trajectory: Vec<Valuation>,
        monotone: bool,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn fmt_trajectory(t: &[Valuation]) -> String {
    let parts: Vec<String> = t.iter().map(|v| v.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

impl Error {
    /// True for errors caused by running out of p-adic precision or by a
    /// limit that failed to stabilise.
    pub fn is_precision(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted(_) | Error::NonConvergence { .. }
        )
    }
}
