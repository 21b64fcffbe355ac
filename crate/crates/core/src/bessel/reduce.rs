//! Reduction of K_q modulo the image of D_{t^q} onto the free module with
//! basis {1, pi t^q / x}.
//!
//! In K_q coordinates e(n, u) = t^n (t^q)^max(-u,0) x^u the relations are
//!   e(n, u+1) = -(u/pi) e(n, u) + e(n+q, u-1)      for u >= 1,
//!   e(n, 1)   = e(n, -1),
//!   e(n, u-1) =  (u/pi) e(n, u) + e(n+q, u+1)      for u <= -1.
//! Entries are stored as A(n,u) = Ahat(n,u) pi^(w(n,u) - den) for a weight
//! function w chosen so that every step multiplies by a nonnegative power
//! of pi.

use serde::{Deserialize, Serialize};

use super::laurent::LaurentBlock;
use crate::error::{Error, Result};
use crate::padic::{Ctx, PadicElem, PadicRecord};

/// a(t) + b(t) pi t^q / x with both series divided by pi^den.
#[derive(Clone, Debug, PartialEq)]
pub struct VPair {
    pub a: Vec<PadicElem>,
    pub b: Vec<PadicElem>,
    pub den: u32,
}

impl VPair {
    /// Lowers den while every coefficient stays integral.
    pub fn normalize(&mut self) {
        while self.den > 0 {
            let a: Result<Vec<_>> = self.a.iter().map(|x| x.div_pi()).collect();
            let b: Result<Vec<_>> = self.b.iter().map(|x| x.div_pi()).collect();
            match (a, b) {
                (Ok(a), Ok(b)) => {
                    self.a = a;
                    self.b = b;
                    self.den -= 1;
                }
                _ => break,
            }
        }
    }

    pub fn a_coeff(&self, n: usize) -> Option<PadicElem> {
        self.a.get(n).copied()
    }

    pub fn b_coeff(&self, n: usize) -> Option<PadicElem> {
        self.b.get(n).copied()
    }

    pub fn to_record(&self) -> VPairRecord {
        VPairRecord {
            a: self.a.iter().map(|x| x.to_record()).collect(),
            b: self.b.iter().map(|x| x.to_record()).collect(),
            den: self.den,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VPairRecord {
    pub a: Vec<PadicRecord>,
    pub b: Vec<PadicRecord>,
    pub den: u32,
}

/// Dense grid n in 0..=d, u in -umax..=umax.
pub(crate) struct Grid {
    pub ctx: Ctx,
    pub q: usize,
    pub d: usize,
    pub umax: usize,
    pub data: Vec<PadicElem>,
}

impl Grid {
    pub fn new(ctx: Ctx, q: usize, d: usize, umax: usize) -> Grid {
        Grid {
            ctx,
            q,
            d,
            umax,
            data: vec![ctx.zero(); (d + 1) * (2 * umax + 1)],
        }
    }

    #[inline]
    fn idx(&self, n: usize, u: i64) -> usize {
        n * (2 * self.umax + 1) + (u + self.umax as i64) as usize
    }

    pub fn get(&self, n: usize, u: i64) -> PadicElem {
        self.data[self.idx(n, u)]
    }

    pub fn add(&mut self, n: usize, u: i64, v: PadicElem) {
        let i = self.idx(n, u);
        self.data[i] += v;
    }

    /// Runs the reduction in place; afterwards only u = 0 and u = -1 hold
    /// nonzero entries.
    pub fn reduce(&mut self, w: &dyn Fn(usize, i64) -> i64) -> Result<()> {
        let (q, d, umax) = (self.q, self.d, self.umax as i64);
        let step = |from: i64, to: i64| -> Result<u32> {
            u32::try_from(from - to).map_err(|_| {
                Error::consistency(format!("reduction weight drops by {} in one step", to - from))
            })
        };
        for u in (2..=umax).rev() {
            for n in 0..=d {
                let v = self.get(n, u);
                let wf = w(n, u);
                let k = step(wf - 1, w(n, u - 1))?;
                self.add(n, u - 1, v.mul_int(-(u - 1)).mul_pi_pow(k));
                if n + q <= d {
                    let k = step(wf, w(n + q, u - 2))?;
                    self.add(n + q, u - 2, v.mul_pi_pow(k));
                }
                let i = self.idx(n, u);
                self.data[i] = self.ctx.zero();
            }
        }
        for u in -umax..=-2 {
            for n in 0..=d {
                let v = self.get(n, u);
                let wf = w(n, u);
                let k = step(wf - 1, w(n, u + 1))?;
                self.add(n, u + 1, v.mul_int(u + 1).mul_pi_pow(k));
                if n + q <= d {
                    let k = step(wf, w(n + q, u + 2))?;
                    self.add(n + q, u + 2, v.mul_pi_pow(k));
                }
                let i = self.idx(n, u);
                self.data[i] = self.ctx.zero();
            }
        }
        if umax >= 1 {
            for n in 0..=d {
                let v = self.get(n, 1);
                let k = step(w(n, 1), w(n, -1))?;
                self.add(n, -1, v.mul_pi_pow(k));
                let i = self.idx(n, 1);
                self.data[i] = self.ctx.zero();
            }
        }
        Ok(())
    }
}

/// Reduces a block of K_q to (a, b) with blk = a + b pi t^q / x modulo
/// D_{t^q} K_q. The t-degree of the result covers every term the block can
/// reach.
pub fn reduce_to_v(blk: &LaurentBlock, q: u64) -> Result<VPair> {
    let ctx = blk.ctx();
    let coords = blk.kq_coords(q)?;
    let umax = coords.iter().map(|c| c.1.unsigned_abs()).max().unwrap_or(0).max(1) as usize;
    let nmax = coords.iter().map(|c| c.0).max().unwrap_or(0) as usize;
    let q = q as usize;
    let d = nmax + q * umax;
    let den = umax as i64;
    let mut grid = Grid::new(ctx, q, d, umax);
    for (n, u, c) in coords {
        grid.add(n as usize, u, c.mul_pi_pow((den - u.abs()) as u32));
    }
    grid.reduce(&|_, u| u.abs())?;
    let mut out = VPair {
        a: (0..=d).map(|n| grid.get(n, 0)).collect(),
        b: (0..=d).map(|n| grid.get(n, -1)).collect(),
        den: den as u32,
    };
    out.normalize();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_and_x_squared_at_level_one() {
        let ctx = Ctx::new(5, 10).unwrap();
        let one = ctx.one();
        let r = reduce_to_v(&LaurentBlock::monomial(ctx, 0, 1, one), 1).unwrap();
        assert_eq!(r.den, 1);
        assert!(r.a.iter().all(|x| x.is_zero()));
        assert_eq!(r.b[0], one);

        let r = reduce_to_v(&LaurentBlock::monomial(ctx, 0, 2, one), 1).unwrap();
        assert_eq!(r.den, 2);
        assert_eq!(r.a[1], ctx.pi_pow(2));
        assert_eq!(r.b[0], -one);
    }
}
