//! Kloosterman sums and symmetric functions of the fiber roots.

use num_bigint::BigInt;

use super::cyclo::CycElem;
use super::field::{FqElem, FqField};
use crate::error::{Error, Result};

/// counts[j] = #{x in F^* : Tr(x + t/x) = j}.
pub fn kloosterman_counts(field: &FqField, t: FqElem) -> Result<Vec<u64>> {
    if t == 0 {
        return Err(Error::domain("Kloosterman sum at t = 0 is excluded"));
    }
    let p = field.p();
    let n = (field.size() - 1) as u64;
    let lt = field.log(t).expect("t is nonzero") as u64;
    let mut counts = vec![0u64; p as usize];
    for i in 0..n {
        let x = field.exp(i);
        let y = field.exp(lt + n - i);
        let e = (field.trace(x) + field.trace(y)) % p;
        counts[e as usize] += 1;
    }
    Ok(counts)
}

/// Kl(t) = sum over x in F^* of zeta^Tr(x + t/x), with Tr the absolute trace.
pub fn kloosterman_sum(field: &FqField, t: FqElem) -> Result<CycElem> {
    let counts = kloosterman_counts(field, t)?;
    Ok(CycElem::from_exponent_counts(field.p(), &counts))
}

/// Checks |sigma(Kl)| <= 2 sqrt(size) + 1e-6 under every complex embedding.
pub fn weil_bound_holds(kl: &CycElem, size: u64) -> bool {
    let bound = 2.0 * (size as f64).sqrt() + 1e-6;
    kl.embedding_abs().into_iter().all(|v| v <= bound)
}

/// p_m = pi0^m + pi1^m from s = pi0 + pi1 and pi0 pi1 = q_t.
pub fn fiber_power_sum(q_t: &BigInt, s: &CycElem, m: u32) -> CycElem {
    let p = s.p();
    let mut prev = CycElem::from_int(p, 2);
    if m == 0 {
        return prev;
    }
    let mut cur = s.clone();
    for _ in 1..m {
        let next = &(s * &cur) - &prev.scale(q_t);
        prev = cur;
        cur = next;
    }
    cur
}

/// Complete homogeneous symmetric polynomial h_k(a, b) from e1 = a + b and
/// e2 = ab.
pub fn complete_homog(k: u32, e1: &CycElem, e2: &CycElem) -> CycElem {
    let p = e1.p();
    let mut prev = CycElem::one(p);
    if k == 0 {
        return prev;
    }
    let mut cur = e1.clone();
    for _ in 1..k {
        let next = &(e1 * &cur) - &(e2 * &prev);
        prev = cur;
        cur = next;
    }
    cur
}
