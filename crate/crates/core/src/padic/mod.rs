//! Exact truncated p-adic arithmetic over a fixed odd prime.

mod analytic;
mod context;
mod number;

pub use analytic::{padic_log, q_bracket, q_bracket_rational, teichmuller, teichmuller_residue};
pub use context::{parse_rational, PrimeContext, QParam};
pub use number::{arith, to_small_integer, ArithOp, PAdicNumber, Valuation};

pub(crate) use context::{int_valuation, is_prime};
pub(crate) use number::{p_pow, reduce_signed};
