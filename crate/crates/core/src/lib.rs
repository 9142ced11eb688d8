//! Exact p-adic q-Volkenborn integration.
//!
//! Integrals `I_q(f)` and their fermionic counterparts `I_{-q}(f)` over
//! `Z_p` are computed two ways: as limits of weighted Riemann sums over
//! residues mod `d*p^N`, and as coefficients of exponential generating
//! functions (q-Bernoulli and Frobenius-Euler numbers). The [`verify`]
//! module checks the two against each other and against the translation
//! identities satisfied by the integrals.

pub mod characters;
pub mod error;
pub mod hurwitz;
pub mod integrator;
pub mod padic;
pub mod qnumbers;
pub mod verify;

pub use error::{Error, Result};
pub use padic::{PAdicNumber, PrimeContext, QParam, Valuation};

#[cfg(feature = "cli")]
pub mod cli;
