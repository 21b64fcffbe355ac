//! Dwork's splitting function theta(z) = exp(pi (z - z^p)).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{ord_p_u64, Ctx, PadicElem, PadicRecord};

/// floor((p-1)^2 i / p^2): the valuation bound ord_p theta_i >= (p-1)i/p^2
/// expressed in pi-units.
pub fn theta_shift(p: u32, i: usize) -> u32 {
    let p = p as u64;
    ((p - 1) * (p - 1) * i as u64 / (p * p)) as u32
}

/// theta_0..theta_I, stored as theta_i / pi^(r_i) with r_i = theta_shift(i)
/// so that every coefficient keeps the full relative precision.
#[derive(Clone, Debug, PartialEq)]
pub struct SplittingFunction {
    ctx: Ctx,
    scaled: Vec<PadicElem>,
}

/// Working element of Z_p[pi] with big-integer coordinates modulo p^K.
struct BigOmega {
    p: BigInt,
    modulus: BigInt,
    c: Vec<BigInt>,
}

impl BigOmega {
    fn new(p: u32, k: u32) -> Self {
        let pb = BigInt::from(p);
        BigOmega {
            modulus: pb.pow(k),
            p: pb,
            c: vec![BigInt::zero(); (p - 1) as usize],
        }
    }

    /// Adds v * pi^e.
    fn add_pi_pow(&mut self, v: &BigInt, e: u64) {
        let d = self.c.len() as u64;
        let s = (e / d) as u32;
        let mut f = self.p.pow(s);
        if s % 2 == 1 {
            f = -f;
        }
        let j = (e % d) as usize;
        self.c[j] = (&self.c[j] + v * f).mod_floor(&self.modulus);
    }

    /// Exact division by pi; None if the constant coordinate is not
    /// divisible by p.
    fn div_pi(&mut self) -> Option<()> {
        let (q, r) = self.c[0].div_rem(&self.p);
        if !r.is_zero() {
            return None;
        }
        self.c.rotate_left(1);
        let last = self.c.len() - 1;
        self.c[last] = (-q).mod_floor(&self.modulus);
        Some(())
    }
}

impl SplittingFunction {
    /// Computes theta_0..=theta_max_index exactly: each term of
    /// sum_{a + pb = i} (pi^a/a!)((-pi)^b/b!) is an integer unit times a
    /// power of pi, summed modulo p^K with K large enough that the division
    /// by pi^(r_i) leaves N exact digits.
    pub fn compute(ctx: Ctx, max_index: usize) -> Result<SplittingFunction> {
        let p = ctx.p();
        let p64 = p as u64;
        let deg = (p - 1) as u64;
        let r_max = theta_shift(p, max_index) as u64;
        let k = ctx.n() + r_max.div_ceil(deg) as u32 + 1;
        let modulus = BigInt::from(p).pow(k);

        // unit parts of factorials and their inverses mod p^K
        let mut unit = vec![BigInt::one()];
        let mut vals = vec![0u64];
        for a in 1..=max_index as u64 {
            let v = ord_p_u64(a, p64) as u64;
            let u = a / p64.pow(v as u32);
            unit.push((&unit[(a - 1) as usize] * u).mod_floor(&modulus));
            vals.push(vals[(a - 1) as usize] + v);
        }
        let inv_unit: Vec<BigInt> = unit
            .iter()
            .map(|u| {
                let g = u.extended_gcd(&modulus);
                debug_assert!(g.gcd.is_one());
                g.x.mod_floor(&modulus)
            })
            .collect();

        let mut scaled = Vec::with_capacity(max_index + 1);
        for i in 0..=max_index {
            let mut acc = BigOmega::new(p, k);
            for b in 0..=i / p as usize {
                let a = i - p as usize * b;
                let v = vals[a] + vals[b];
                let e = (a + b) as u64 - v * deg;
                let mut term = (&inv_unit[a] * &inv_unit[b]).mod_floor(&modulus);
                if (b as u64 + v) % 2 == 1 {
                    term = -term;
                }
                acc.add_pi_pow(&term, e);
            }
            let r = theta_shift(p, i);
            for _ in 0..r {
                acc.div_pi().ok_or_else(|| {
                    Error::consistency(format!(
                        "theta_{i} violates the valuation bound (p-1)i/p^2"
                    ))
                })?;
            }
            scaled.push(ctx.from_coords(&acc.c)?);
        }
        Ok(SplittingFunction { ctx, scaled })
    }

    pub fn ctx(&self) -> Ctx {
        self.ctx
    }

    /// Number of stored coefficients, I + 1.
    pub fn len(&self) -> usize {
        self.scaled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scaled.is_empty()
    }

    pub fn shift(&self, i: usize) -> u32 {
        theta_shift(self.ctx.p(), i)
    }

    /// theta_i / pi^(r_i).
    pub fn scaled(&self, i: usize) -> PadicElem {
        self.scaled[i]
    }

    /// theta_i itself.
    pub fn coeff(&self, i: usize) -> PadicElem {
        self.scaled[i].mul_pi_pow(self.shift(i))
    }

    /// Valuation bound of every discarded coefficient, in pi-units.
    pub fn tail_bound(&self) -> u32 {
        self.shift(self.len())
    }

    /// theta(1) = sum theta_i, with precision limited by the tail bound.
    /// It is a primitive p-th root of unity.
    pub fn eval_one(&self) -> PadicElem {
        let s = (0..self.len()).fold(self.ctx.zero(), |acc, i| acc + self.coeff(i));
        s.with_abs(self.tail_bound())
    }

    /// Copy with theta_i perturbed by delta; used by negative controls.
    pub fn tampered(&self, i: usize, delta: PadicElem) -> SplittingFunction {
        let mut out = self.clone();
        let r = out.shift(i);
        out.scaled[i] = (out.coeff(i) + delta)
            .div_pi_pow(r)
            .unwrap_or_else(|_| out.scaled[i] + out.ctx.one());
        out
    }

    pub fn to_records(&self) -> Vec<PadicRecord> {
        self.scaled.iter().map(|x| x.to_record()).collect()
    }

    pub fn from_records(ctx: Ctx, recs: &[PadicRecord]) -> Result<SplittingFunction> {
        let scaled = recs
            .iter()
            .map(PadicElem::from_record)
            .collect::<Result<Vec<_>>>()?;
        if scaled.iter().any(|x| x.ctx() != ctx) {
            return Err(Error::Parse("theta record context mismatch".into()));
        }
        Ok(SplittingFunction { ctx, scaled })
    }
}

/// Serializable form used by the cache.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThetaRecord {
    pub p: u32,
    #[serde(rename = "N")]
    pub n: u32,
    pub coeffs: Vec<PadicRecord>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_coefficients() {
        let ctx = Ctx::new(5, 10).unwrap();
        let th = SplittingFunction::compute(ctx, 30).unwrap();
        assert_eq!(th.coeff(0), ctx.one());
        assert_eq!(th.coeff(1), ctx.pi());
        // theta_2 = pi^2 / 2
        assert_eq!(th.coeff(2) * ctx.int(2), ctx.pi_pow(2));
    }

    #[test]
    fn theta_of_one_is_a_pth_root_of_unity() {
        let ctx = Ctx::new(5, 10).unwrap();
        let th = SplittingFunction::compute(ctx, 80).unwrap();
        let z = th.eval_one();
        assert_eq!(z.pow(5), ctx.one());
        assert_ne!(z, ctx.one());
        assert_eq!((z - ctx.one()).valuation().units, Some(1));
    }
}
