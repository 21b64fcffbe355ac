//! Exact and p-adic arithmetic for the Kloosterman family and the
//! L-functions of its symmetric powers.
//!
//! Two independent pipelines are provided. The exact pipeline ([`exact`])
//! sums characters over finite fields with cyclotomic integers and builds
//! integer L-polynomials. The p-adic pipeline ([`bessel`], [`sym`]) builds
//! the relative Frobenius of the Kloosterman family from Dwork's splitting
//! function, takes its infinite symmetric powers and evaluates Fredholm
//! determinants. The [`harness`] module cross-checks the two.

pub mod bessel;
pub mod error;
pub mod exact;
pub mod harness;
pub mod padic;
pub mod profile;
pub mod sym;

pub use error::{Error, Result};
