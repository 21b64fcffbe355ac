//! Columns of [alpha]_kappa on the normalized basis w^(m).

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::beta::r_factor;
use super::boundary::SymBlock;
use super::kappa::KappaValue;
use crate::bessel::FrobMatrix2;
use crate::error::{Error, Result};
use crate::padic::series::Series;

/// Image of w^(m) under [alpha]_kappa, truncated to t-degree <= n_t and
/// w-degree <= m_w:
///   sum_j A1^(kappa-m) sum_nu (kappa-j)^(m-nu) binom(m,nu) A2^(m-nu) A4^nu (A3/A1)^l / l! w^(j)
/// with l = j - nu, which is the expansion of
/// kappa^(m) (A1 + A3 w)^(kappa-m) (A2 + A4 w)^m after the ratio of
/// falling factorials has been cancelled.
pub fn alpha_sym_column(kappa: &KappaValue, m: usize, frob: &FrobMatrix2, n_t: usize, m_w: usize) -> Result<SymBlock> {
    let ctx = frob.ctx();
    kappa.check(ctx.p())?;
    if frob.len() <= n_t {
        return Err(Error::config("A-series shorter than the requested t-degree"));
    }
    let a = frob.unscaled();
    let len = n_t + 1;
    let a1 = a[0][0].truncate(len);
    let a2 = a[1][0].truncate(len);
    let a3 = a[0][1].truncate(len);
    let a4 = a[1][1].truncate(len);
    let inv1 = a1.inv()?;
    let mut xp = &a3 * &inv1;
    for e in 0..len {
        let v = xp
            .coeff(e)
            .div_pi()
            .map_err(|_| Error::consistency("A3/A1 is not divisible by pi"))?;
        xp.set(e, v);
    }
    let kprec = kappa.precision_units(ctx);
    let rep = kappa.representative(ctx.p());
    let g = match kappa {
        KappaValue::Int(k) => a1.pow_i64(k - m as i64)?,
        KappaValue::Padic { .. } => {
            let r = rep
                .to_u64()
                .ok_or_else(|| Error::config("kappa residue exceeds 64 bits"))?;
            let s = &a1.pow(r) * &inv1.pow(m as u64);
            Series::from_vec(ctx, s.coeffs().iter().map(|x| x.with_abs(kprec)).collect())
        }
    };
    let mut binom = vec![BigInt::from(1)];
    for i in 1..=m {
        let next = &binom[i - 1] * BigInt::from(m - i + 1) / BigInt::from(i);
        binom.push(next);
    }
    let mut out = SymBlock::zero(ctx);
    for j in 0..=m_w {
        let mut acc = Series::zero(ctx, len);
        for nu in 0..=m.min(j) {
            let r = r_factor(kappa, &rep, j, nu, m);
            if r.is_zero() {
                continue;
            }
            let l = j - nu;
            let c = ctx.from_bigint(&(r * &binom[nu])).with_abs(kprec) * ctx.pi_pow_over_factorial(l as u64);
            let term = &(&a2.pow((m - nu) as u64) * &a4.pow(nu as u64)) * &xp.pow(l as u64);
            acc = &acc + &term.scale(c);
        }
        let s = &g * &acc;
        for (n, &c) in s.coeffs().iter().enumerate() {
            if !c.is_zero() {
                out.add_term(n, j, c);
            }
        }
    }
    Ok(out)
}
