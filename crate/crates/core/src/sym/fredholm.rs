//! Truncated characteristic series by a division-free method.

use crate::error::{Error, Result};
use crate::padic::{Ctx, PadicElem};

/// Coefficients c_0..c_m of det(1 - M T), by Berkowitz's recursion keeping
/// only the top m + 1 coefficients of each leading principal minor.
pub fn det_one_minus(ctx: Ctx, rows: &[Vec<PadicElem>], m: usize) -> Result<Vec<PadicElem>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::config("matrix is not square"));
    }
    // v[k] is the coefficient of lambda^(r - k) in det(lambda - A_r)
    let mut v = vec![ctx.zero(); m + 1];
    v[0] = ctx.one();
    for r in 0..n {
        // Toeplitz column for A_{r+1}: 1, -a, -R C, -R A C, ...
        let mut t = vec![ctx.zero(); m + 1];
        t[0] = ctx.one();
        if m >= 1 {
            t[1] = -rows[r][r];
        }
        let mut cur: Vec<PadicElem> = (0..r).map(|i| rows[i][r]).collect();
        for tk in t.iter_mut().skip(2) {
            if r == 0 {
                break;
            }
            let rc = (0..r).fold(ctx.zero(), |acc, j| acc + rows[r][j] * cur[j]);
            *tk = -rc;
            let next: Vec<PadicElem> = (0..r)
                .map(|i| (0..r).fold(ctx.zero(), |acc, j| acc + rows[i][j] * cur[j]))
                .collect();
            cur = next;
        }
        let mut nv = vec![ctx.zero(); m + 1];
        for k in 0..=m {
            for i in 0..=k {
                nv[k] += t[k - i] * v[i];
            }
        }
        v = nv;
    }
    Ok(v)
}

/// g(T) / g(qT) for g with constant term 1, through the length of g.
pub fn delta_q(g: &[PadicElem], q: u64) -> Result<Vec<PadicElem>> {
    if g.is_empty() {
        return Ok(Vec::new());
    }
    let ctx = g[0].ctx();
    if g[0] != ctx.one() {
        return Err(Error::domain("delta_q needs constant term 1"));
    }
    let n = g.len();
    let mut gq = Vec::with_capacity(n);
    let mut qk = ctx.one();
    let qe = ctx.int(q as i64);
    for &c in g {
        gq.push(c * qk);
        qk *= qe;
    }
    // solve L * gq = g
    let mut l = vec![ctx.zero(); n];
    for k in 0..n {
        let mut acc = g[k];
        for i in 0..k {
            acc -= l[i] * gq[k - i];
        }
        l[k] = acc;
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_matrices() {
        let ctx = Ctx::new(5, 6).unwrap();
        assert_eq!(det_one_minus(ctx, &[], 3).unwrap()[0], ctx.one());
        let d = vec![vec![ctx.int(2), ctx.zero()], vec![ctx.zero(), ctx.int(3)]];
        let c = det_one_minus(ctx, &d, 3).unwrap();
        assert_eq!(c[1], ctx.int(-5));
        assert_eq!(c[2], ctx.int(6));
        assert!(c[3].is_zero());
        let u = vec![vec![ctx.zero(), ctx.int(7)], vec![ctx.zero(), ctx.zero()]];
        let c = det_one_minus(ctx, &u, 2).unwrap();
        assert!(c[1].is_zero() && c[2].is_zero());
    }

    #[test]
    fn delta_q_inverts() {
        let ctx = Ctx::new(5, 6).unwrap();
        // (1 - T)/(1 - 5T) from g = 1 - T: g(T)/g(5T)
        let l = delta_q(&[ctx.one(), ctx.int(-1), ctx.zero()], 5).unwrap();
        assert_eq!(l[1], ctx.int(4));
        assert_eq!(l[2], ctx.int(20));
    }
}
