//! Truncated power series in one variable over Omega.

use std::ops::{Add, Mul, Neg, Sub};

use super::{Ctx, PadicElem};
use crate::error::{Error, Result};

/// Power series truncated to `len` coefficients (degrees 0..len).
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    ctx: Ctx,
    c: Vec<PadicElem>,
}

impl Series {
    pub fn zero(ctx: Ctx, len: usize) -> Series {
        Series {
            ctx,
            c: vec![ctx.zero(); len],
        }
    }

    pub fn one(ctx: Ctx, len: usize) -> Series {
        let mut s = Series::zero(ctx, len);
        if len > 0 {
            s.c[0] = ctx.one();
        }
        s
    }

    pub fn from_vec(ctx: Ctx, c: Vec<PadicElem>) -> Series {
        Series { ctx, c }
    }

    pub fn ctx(&self) -> Ctx {
        self.ctx
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn coeffs(&self) -> &[PadicElem] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> PadicElem {
        self.c.get(i).copied().unwrap_or_else(|| self.ctx.zero())
    }

    pub fn set(&mut self, i: usize, v: PadicElem) {
        self.c[i] = v;
    }

    pub fn truncate(&self, len: usize) -> Series {
        let mut c = self.c.clone();
        c.resize(len, self.ctx.zero());
        Series { ctx: self.ctx, c }
    }

    pub fn scale(&self, s: PadicElem) -> Series {
        Series {
            ctx: self.ctx,
            c: self.c.iter().map(|&x| x * s).collect(),
        }
    }

    /// Multiplies coefficient i by pi^(w i), i.e. substitutes T -> pi^w T.
    pub fn dilate_pi(&self, w: u32) -> Series {
        Series {
            ctx: self.ctx,
            c: self
                .c
                .iter()
                .enumerate()
                .map(|(i, x)| x.mul_pi_pow(w * i as u32))
                .collect(),
        }
    }

    /// Substitutes T -> c T.
    pub fn dilate(&self, c: PadicElem) -> Series {
        let mut f = self.ctx.one();
        let mut out = self.clone();
        for x in out.c.iter_mut() {
            *x *= f;
            f *= c;
        }
        out
    }

    /// Inverse of a series with unit constant term.
    pub fn inv(&self) -> Result<Series> {
        let n = self.len();
        if n == 0 {
            return Ok(self.clone());
        }
        let u = self.c[0].invert_unit()?;
        let mut out = Series::zero(self.ctx, n);
        out.c[0] = u;
        for k in 1..n {
            let mut acc = self.ctx.zero();
            for j in 1..=k {
                acc += self.c[j] * out.c[k - j];
            }
            out.c[k] = -(acc * u);
        }
        Ok(out)
    }

    /// Exact quotient self / other where other has unit constant term.
    pub fn div(&self, other: &Series) -> Result<Series> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, mut e: u64) -> Series {
        let mut base = self.clone();
        let mut acc = Series::one(self.ctx, self.len());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Integer power, negative exponents through the inverse.
    pub fn pow_i64(&self, e: i64) -> Result<Series> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.inv()?.pow(e.unsigned_abs()))
        }
    }

    /// Sum of weights[i] (self - 1)^i for a series with constant term 1.
    /// Terms beyond the truncation vanish since (self - 1) has no constant.
    pub fn compose_one_plus(&self, weights: &[PadicElem]) -> Result<Series> {
        let n = self.len();
        if n == 0 {
            return Ok(self.clone());
        }
        if self.c[0] != self.ctx.one() {
            return Err(Error::domain("binomial series needs constant term 1"));
        }
        let mut x = self.clone();
        x.c[0] = self.ctx.zero();
        let mut out = Series::zero(self.ctx, n);
        let mut xp = Series::one(self.ctx, n);
        for (i, w) in weights.iter().enumerate().take(n) {
            if i > 0 {
                xp = &xp * &x;
            }
            out = &out + &xp.scale(*w);
        }
        Ok(out)
    }

    pub fn min_abs_precision(&self) -> u32 {
        self.c.iter().map(|x| x.abs_precision()).min().unwrap_or(self.ctx.cap())
    }

    /// Evaluation sum of the coefficients (T = 1).
    pub fn sum(&self) -> PadicElem {
        self.c.iter().fold(self.ctx.zero(), |a, &b| a + b)
    }
}

impl<'a> Add<&'a Series> for &'a Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        let n = self.len().max(rhs.len());
        Series {
            ctx: self.ctx,
            c: (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect(),
        }
    }
}

impl<'a> Sub<&'a Series> for &'a Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        let n = self.len().max(rhs.len());
        Series {
            ctx: self.ctx,
            c: (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect(),
        }
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series {
            ctx: self.ctx,
            c: self.c.iter().map(|&x| -x).collect(),
        }
    }
}

/// Truncated product; the result has the length of the shorter operand.
impl<'a> Mul<&'a Series> for &'a Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        let n = self.len().min(rhs.len());
        let mut c = vec![self.ctx.zero(); n];
        for (i, a) in self.c.iter().enumerate().take(n) {
            if a.is_zero() && a.abs_precision() == self.ctx.cap() {
                continue;
            }
            for j in 0..n - i {
                c[i + j] += *a * rhs.c[j];
            }
        }
        Series { ctx: self.ctx, c }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_one_minus_t() {
        let ctx = Ctx::new(5, 12).unwrap();
        let s = Series::from_vec(ctx, vec![ctx.one(), -ctx.one(), ctx.zero(), ctx.zero()]);
        let inv = s.inv().unwrap();
        for i in 0..4 {
            assert_eq!(inv.coeff(i), ctx.one());
        }
        let prod = &s * &inv;
        assert_eq!(prod, Series::one(ctx, 4));
    }

    #[test]
    fn binomial_series_with_integer_exponent_matches_power() {
        let ctx = Ctx::new(5, 12).unwrap();
        let s = Series::from_vec(ctx, vec![ctx.one(), ctx.int(3), ctx.int(-2), ctx.int(7)]);
        // binom(3, i) weights reproduce the cube
        let w: Vec<_> = [1, 3, 3, 1].iter().map(|&v| ctx.int(v)).collect();
        assert_eq!(s.compose_one_plus(&w).unwrap(), s.pow(3));
    }
}
