//! Arithmetic in the Eisenstein extension Omega = Q_p(pi), pi^(p-1) = -p.
//!
//! An element is stored as p-1 residues modulo p^N in the basis
//! 1, pi, ..., pi^(p-2), together with its absolute precision measured in
//! powers of pi. Valuations are counted in pi-units, so `valuation(p) = p-1`
//! units and `valuation(pi) = 1` unit.

mod elem;
pub mod series;

pub use elem::{
    hensel_quadratic_unit_root, omega_mul, teichmuller, Ctx, PadicElem, PadicRecord, Valuation,
};

use crate::error::{Error, Result};

/// Coordinate capacity of the fixed-size storage; limits p to at most 13.
pub const MAX_COORDS: usize = 12;
pub const MIN_PRIME: u32 = 5;
pub const MAX_PRIME: u32 = 13;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Largest N with p^N < 2^62, the storage limit for coordinates.
pub fn max_storage_precision(p: u32) -> u32 {
    let mut n = 0;
    let mut m: u128 = 1;
    while m * p as u128 <= (1u128 << 62) {
        m *= p as u128;
        n += 1;
    }
    n
}

pub fn check_prime(p: u32) -> Result<()> {
    if !is_prime(p as u64) {
        return Err(Error::config(format!("p = {p} is not prime")));
    }
    if p < MIN_PRIME {
        return Err(Error::config(format!(
            "p = {p} is not supported: the construction requires p >= 5"
        )));
    }
    if p > MAX_PRIME {
        return Err(Error::config(format!(
            "p = {p} is not supported: storage holds at most {MAX_COORDS} coordinates (p <= {MAX_PRIME})"
        )));
    }
    Ok(())
}

/// p-adic valuation of a nonzero integer.
pub fn ord_p_u64(mut x: u64, p: u64) -> u32 {
    debug_assert!(x != 0);
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

/// ord_p(l!) by Legendre's formula.
pub fn ord_p_factorial(l: u64, p: u64) -> u64 {
    let mut v = 0;
    let mut pk = p;
    while pk <= l {
        v += l / pk;
        pk = match pk.checked_mul(p) {
            Some(x) => x,
            None => break,
        };
    }
    v
}
