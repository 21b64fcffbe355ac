//! Fibers of the Bessel family at Teichmuller points: the Dwork trace
//! formula and the unit root of the fiber Frobenius.

use serde::Serialize;

use super::theta::SplittingFunction;
use crate::error::{Error, Result};
use crate::exact::{kloosterman_sum, CycElem, FqElem, FqField};
use crate::padic::{hensel_quadratic_unit_root, teichmuller, PadicElem};

/// Image of an element of Z[zeta_p] under zeta -> theta(1).
pub fn embed_cyclotomic(c: &CycElem, theta: &SplittingFunction) -> PadicElem {
    let ctx = theta.ctx();
    let z = theta.eval_one();
    let mut acc = ctx.zero();
    let mut zp = ctx.one();
    for x in c.coords() {
        acc += zp * ctx.from_bigint(x);
        zp *= z;
    }
    acc
}

/// Matrix of psi_x o theta(x) theta(that/x) on x^v, |v| <= u_max, for the
/// Teichmuller lift that of a nonzero residue t in F_p:
/// M[u][v] = G(pu - v), G(s) = sum_{i - j = s} theta_i theta_j that^j.
pub fn fiber_matrix(theta: &SplittingFunction, t: u64, u_max: usize) -> Result<Vec<Vec<PadicElem>>> {
    let ctx = theta.ctx();
    let p = ctx.p() as i64;
    let that = teichmuller(ctx, t)?;
    let len = theta.len();
    let th: Vec<PadicElem> = (0..len).map(|i| theta.coeff(i)).collect();
    let mut tp = Vec::with_capacity(len);
    let mut x = ctx.one();
    for _ in 0..len {
        tp.push(x);
        x *= that;
    }
    let umax = u_max as i64;
    let smax = (p + 1) * umax;
    let g: Vec<PadicElem> = (-smax..=smax)
        .map(|s| {
            let mut acc = ctx.zero();
            let j0 = (-s).max(0) as usize;
            for j in j0..len {
                let i = j as i64 + s;
                if i as usize >= len {
                    break;
                }
                acc += th[i as usize] * th[j] * tp[j];
            }
            acc
        })
        .collect();
    let dim = 2 * u_max + 1;
    let mut m = vec![vec![ctx.zero(); dim]; dim];
    for (a, row) in m.iter_mut().enumerate() {
        let u = a as i64 - umax;
        for (b, e) in row.iter_mut().enumerate() {
            let v = b as i64 - umax;
            *e = g[(p * u - v + smax) as usize];
        }
    }
    Ok(m)
}

fn mat_mul(a: &[Vec<PadicElem>], b: &[Vec<PadicElem>]) -> Vec<Vec<PadicElem>> {
    let n = a.len();
    let ctx = a[0][0].ctx();
    let mut out = vec![vec![ctx.zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i][k];
            for j in 0..n {
                out[i][j] += x * b[k][j];
            }
        }
    }
    out
}

/// Outcome of one trace-formula comparison.
#[derive(Clone, Debug, Serialize)]
pub struct TraceCheck {
    pub p: u32,
    pub t: u64,
    pub m: u32,
    /// Digits guaranteed by the truncations and storage.
    pub n_eff: u32,
    /// Valuation of lhs - rhs in pi-units (capped at the precision).
    pub residual_units: u32,
    pub pass: bool,
}

/// Guaranteed precision of (p^m - 1) Tr(M^m) in pi-units: discarded
/// x-exponents cost (p-1)^3 (u_max + 1) / p^2 and discarded theta
/// coefficients the theta tail bound.
pub fn trace_precision(theta: &SplittingFunction, u_max: usize) -> u32 {
    let ctx = theta.ctx();
    let p = ctx.p() as u64;
    let trunc = ((p - 1).pow(3) * (u_max as u64 + 1) / (p * p)) as u32;
    ctx.cap().min(trunc).min(theta.tail_bound())
}

/// Compares (p^m - 1) Tr(alpha^m) with the Kloosterman sum of t over
/// F_{p^m} mapped into Omega.
pub fn fiber_trace_check(theta: &SplittingFunction, t: u64, m: u32, u_max: usize) -> Result<TraceCheck> {
    let ctx = theta.ctx();
    let p = ctx.p();
    if t.is_multiple_of(p as u64) {
        return Err(Error::domain("fiber at t = 0 is excluded"));
    }
    if m == 0 {
        return Err(Error::config("m must be positive"));
    }
    let base = fiber_matrix(theta, t, u_max)?;
    let mut pow = base.clone();
    for _ in 1..m {
        pow = mat_mul(&pow, &base);
    }
    let trace = (0..pow.len()).fold(ctx.zero(), |acc, i| acc + pow[i][i]);
    let lhs = trace.mul_int((p as i64).pow(m) - 1);

    let field = FqField::new(p, m, crate::exact::lpoly::FIELD_SEED)?;
    let kl = kloosterman_sum(&field, t as FqElem)?;
    let rhs = embed_cyclotomic(&kl, theta);

    let prec = trace_precision(theta, u_max);
    let diff = (lhs - rhs).with_abs(prec);
    let residual_units = diff.val_units();
    Ok(TraceCheck {
        p,
        t,
        m,
        n_eff: prec / (p - 1),
        residual_units,
        pass: residual_units >= prec,
    })
}

/// Unit root pi0 of the fiber Frobenius at a point t of a finite field F:
/// the unit root of X^2 + Kl(t) X + |F|, with Kl over F.
pub fn unit_root(theta: &SplittingFunction, field: &FqField, t: FqElem) -> Result<PadicElem> {
    let ctx = theta.ctx();
    let kl = kloosterman_sum(field, t)?;
    let s = -embed_cyclotomic(&kl, theta);
    let c = ctx.from_bigint(&num_bigint::BigInt::from(field.size()));
    hensel_quadratic_unit_root(&s, &c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Ctx;

    #[test]
    fn trace_formula_at_one() {
        let ctx = Ctx::new(5, 14).unwrap();
        let theta = SplittingFunction::compute(ctx, 80).unwrap();
        let r = fiber_trace_check(&theta, 1, 1, 20).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.n_eff >= 10);
    }
}
