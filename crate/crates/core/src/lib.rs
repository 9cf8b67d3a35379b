//! Finite truncations of compact-operator commutators.
//!
//! The crate builds block tridiagonal commutator witnesses `CZ − ZC = D`,
//! derives staircase and block tridiagonal bases by Gram–Schmidt over
//! operator words, counts support densities of matrix forms, and evaluates
//! s-number and partial-trace diagnostics on finite prefixes.

pub mod anderson;
pub mod blockmat;
pub mod cli;
pub mod density;
pub mod error;
pub mod linalg;
pub mod obstruction;
pub mod report;
pub mod seqcalc;
pub mod staircase;
pub mod tol;

pub use error::{Error, Result};
pub use tol::Tolerances;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
