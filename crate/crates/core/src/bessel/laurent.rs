//! Finite Laurent blocks in t and x, and the operators acting on them.

use std::collections::BTreeMap;

use super::theta::SplittingFunction;
use crate::error::{Error, Result};
use crate::padic::{Ctx, PadicElem};

/// Finite sum of monomials A t^e x^u with raw exponents e >= 0.
///
/// Elements of the space K_q are the blocks whose monomials satisfy
/// e >= q max(-u, 0); [`LaurentBlock::kq_coords`] gives the coordinates
/// (n, u) with t^e x^u = t^n (t^q / x)^(-u) for u < 0.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentBlock {
    ctx: Ctx,
    terms: BTreeMap<(u64, i64), PadicElem>,
}

impl LaurentBlock {
    pub fn zero(ctx: Ctx) -> LaurentBlock {
        LaurentBlock {
            ctx,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(ctx: Ctx, t_exp: u64, x_exp: i64, c: PadicElem) -> LaurentBlock {
        let mut b = LaurentBlock::zero(ctx);
        b.add_term(t_exp, x_exp, c);
        b
    }

    /// Monomial given by K_q coordinates: t^n t^(q m(u)) x^u, m(u) = max(-u, 0).
    pub fn kq_monomial(ctx: Ctx, q: u64, n: u64, u: i64, c: PadicElem) -> LaurentBlock {
        LaurentBlock::monomial(ctx, n + q * (-u).max(0) as u64, u, c)
    }

    pub fn ctx(&self) -> Ctx {
        self.ctx
    }

    pub fn add_term(&mut self, t_exp: u64, x_exp: i64, c: PadicElem) {
        let e = self.terms.entry((t_exp, x_exp)).or_insert_with(|| self.ctx.zero());
        *e += c;
    }

    pub fn get(&self, t_exp: u64, x_exp: i64) -> PadicElem {
        self.terms
            .get(&(t_exp, x_exp))
            .copied()
            .unwrap_or_else(|| self.ctx.zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, i64, PadicElem)> + '_ {
        self.terms.iter().map(|(&(e, u), &c)| (e, u, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.is_zero())
    }

    pub fn scale(&self, s: PadicElem) -> LaurentBlock {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out
    }

    pub fn add(&self, other: &LaurentBlock) -> LaurentBlock {
        let mut out = self.clone();
        for (e, u, c) in other.terms() {
            out.add_term(e, u, c);
        }
        out
    }

    pub fn sub(&self, other: &LaurentBlock) -> LaurentBlock {
        self.add(&other.scale(-self.ctx.one()))
    }

    /// Keeps the monomials with t-exponent at most `max_t` and
    /// |x-exponent| at most `max_x`.
    pub fn restrict(&self, max_t: u64, max_x: i64) -> LaurentBlock {
        let mut out = LaurentBlock::zero(self.ctx);
        for (e, u, c) in self.terms() {
            if e <= max_t && u.abs() <= max_x {
                out.add_term(e, u, c);
            }
        }
        out
    }

    /// K_q coordinates (n, u, A) of every monomial; fails if a monomial is
    /// not in K_q.
    pub fn kq_coords(&self, q: u64) -> Result<Vec<(u64, i64, PadicElem)>> {
        self.terms()
            .map(|(e, u, c)| {
                let m = q * (-u).max(0) as u64;
                if e < m {
                    Err(Error::domain(format!(
                        "t^{e} x^{u} does not lie in the space K_{q}"
                    )))
                } else {
                    Ok((e - m, u, c))
                }
            })
            .collect()
    }
}

/// psi_x: keeps the monomials with x-exponent divisible by p and divides
/// that exponent by p.
pub fn psi_x(blk: &LaurentBlock) -> LaurentBlock {
    let p = blk.ctx.p() as i64;
    let mut out = LaurentBlock::zero(blk.ctx);
    for (e, u, c) in blk.terms() {
        if u.rem_euclid(p) == 0 {
            out.add_term(e, u / p, c);
        }
    }
    out
}

/// D_{t^q} = x d/dx + pi (x - t^q / x).
pub fn d_tq(blk: &LaurentBlock, q: u64) -> LaurentBlock {
    let ctx = blk.ctx;
    let pi = ctx.pi();
    let mut out = LaurentBlock::zero(ctx);
    for (e, u, c) in blk.terms() {
        out.add_term(e, u, c.mul_int(u));
        out.add_term(e, u + 1, c * pi);
        out.add_term(e + q, u - 1, -(c * pi));
    }
    out
}

/// The connection t d/dt + pi t / x on K_1.
pub fn partial_t(blk: &LaurentBlock) -> LaurentBlock {
    let ctx = blk.ctx;
    let pi = ctx.pi();
    let mut out = LaurentBlock::zero(ctx);
    for (e, u, c) in blk.terms() {
        out.add_term(e, u, c.mul_int(e as i64));
        out.add_term(e + 1, u - 1, c * pi);
    }
    out
}

/// alpha_1 = psi_x o theta(x) theta(t/x), using theta_0..theta_I only.
/// Outputs whose every contributing index is at most I are exact.
pub fn frobenius_apply(blk: &LaurentBlock, theta: &SplittingFunction) -> LaurentBlock {
    let ctx = blk.ctx;
    let p = ctx.p() as i64;
    let len = theta.len();
    let th: Vec<PadicElem> = (0..len).map(|i| theta.coeff(i)).collect();
    let mut out = LaurentBlock::zero(ctx);
    for (e, u, c) in blk.terms() {
        for i in 0..len {
            // x-exponent u + i - j must be divisible by p
            let first_j = (u + i as i64).rem_euclid(p) as usize;
            let ci = c * th[i];
            for j in (first_j..len).step_by(p as usize) {
                let v = u + i as i64 - j as i64;
                out.add_term(e + j as u64, v / p, ci * th[j]);
            }
        }
    }
    out
}
