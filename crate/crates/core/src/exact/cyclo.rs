//! Exact arithmetic in Z[zeta_p].

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Element of Z[zeta_p] in the basis 1, zeta, ..., zeta^(p-2).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycElem {
    p: u32,
    c: Vec<BigInt>,
}

impl CycElem {
    pub fn zero(p: u32) -> CycElem {
        CycElem {
            p,
            c: vec![BigInt::zero(); (p - 1) as usize],
        }
    }

    pub fn from_int(p: u32, v: impl Into<BigInt>) -> CycElem {
        let mut e = CycElem::zero(p);
        e.c[0] = v.into();
        e
    }

    pub fn one(p: u32) -> CycElem {
        CycElem::from_int(p, 1)
    }

    /// zeta^j for any integer j.
    pub fn zeta_pow(p: u32, j: i64) -> CycElem {
        let mut counts = vec![0u64; p as usize];
        counts[j.rem_euclid(p as i64) as usize] = 1;
        CycElem::from_exponent_counts(p, &counts)
    }

    /// sum_j counts[j] zeta^j for j in 0..p.
    pub fn from_exponent_counts(p: u32, counts: &[u64]) -> CycElem {
        assert_eq!(counts.len(), p as usize);
        let top = counts[(p - 1) as usize] as i128;
        CycElem {
            p,
            c: (0..(p - 1) as usize)
                .map(|j| BigInt::from(counts[j] as i128 - top))
                .collect(),
        }
    }

    pub fn from_coords(p: u32, c: Vec<BigInt>) -> CycElem {
        assert_eq!(c.len(), (p - 1) as usize);
        CycElem { p, c }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// The rational integer value, if the element lies in Z.
    pub fn as_integer(&self) -> Option<BigInt> {
        self.c[1..]
            .iter()
            .all(|x| x.is_zero())
            .then(|| self.c[0].clone())
    }

    pub fn scale(&self, s: &BigInt) -> CycElem {
        CycElem {
            p: self.p,
            c: self.c.iter().map(|x| x * s).collect(),
        }
    }

    /// Galois action zeta -> zeta^g for g prime to p.
    pub fn galois(&self, g: u32) -> CycElem {
        assert!(!g.is_multiple_of(self.p), "galois exponent must be prime to p");
        let p = self.p as usize;
        let mut full = vec![BigInt::zero(); p];
        for (j, x) in self.c.iter().enumerate() {
            full[(j * g as usize) % p] += x;
        }
        let top = full[p - 1].clone();
        CycElem {
            p: self.p,
            c: full[..p - 1].iter().map(|x| x - &top).collect(),
        }
    }

    /// Complex embedding zeta -> exp(2 pi i g / p), as (re, im).
    pub fn embed_complex(&self, g: u32) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, x) in self.c.iter().enumerate() {
            let v = x.to_f64().unwrap_or(f64::NAN);
            let ang = 2.0 * std::f64::consts::PI * ((j as u64 * g as u64) % self.p as u64) as f64
                / self.p as f64;
            re += v * ang.cos();
            im += v * ang.sin();
        }
        (re, im)
    }

    /// Absolute values under all p-1 complex embeddings.
    pub fn embedding_abs(&self) -> Vec<f64> {
        (1..self.p)
            .map(|g| {
                let (re, im) = self.embed_complex(g);
                re.hypot(im)
            })
            .collect()
    }

    pub fn pow(&self, mut e: u32) -> CycElem {
        let mut base = self.clone();
        let mut acc = CycElem::one(self.p);
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

    /// Largest absolute coordinate, for logging sizes.
    pub fn height(&self) -> BigInt {
        self.c.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
    }

    pub fn is_one(&self) -> bool {
        self.c[0].is_one() && self.c[1..].iter().all(|x| x.is_zero())
    }
}

impl<'a> Add<&'a CycElem> for &'a CycElem {
    type Output = CycElem;
    fn add(self, rhs: &CycElem) -> CycElem {
        assert_eq!(self.p, rhs.p);
        CycElem {
            p: self.p,
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a CycElem> for &'a CycElem {
    type Output = CycElem;
    fn sub(self, rhs: &CycElem) -> CycElem {
        assert_eq!(self.p, rhs.p);
        CycElem {
            p: self.p,
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CycElem {
    type Output = CycElem;
    fn neg(self) -> CycElem {
        CycElem {
            p: self.p,
            c: self.c.iter().map(|a| -a).collect(),
        }
    }
}

impl<'a> Mul<&'a CycElem> for &'a CycElem {
    type Output = CycElem;
    fn mul(self, rhs: &CycElem) -> CycElem {
        assert_eq!(self.p, rhs.p);
        let p = self.p as usize;
        // product in Z[x]/(x^p - 1), then fold zeta^(p-1) = -(1 + ... + zeta^(p-2))
        let mut full = vec![BigInt::zero(); p];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate() {
                full[(i + j) % p] += a * b;
            }
        }
        let top = full[p - 1].clone();
        CycElem {
            p: self.p,
            c: full[..p - 1].iter().map(|x| x - &top).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_has_order_p() {
        let z = CycElem::zeta_pow(7, 1);
        assert!(z.pow(7).is_one());
        assert!(!z.pow(3).is_one());
        let sum = (0..7).fold(CycElem::zero(7), |acc, j| &acc + &CycElem::zeta_pow(7, j));
        assert!(sum.is_zero());
    }

    #[test]
    fn galois_is_multiplicative() {
        let a = CycElem::from_exponent_counts(5, &[1, 2, 0, 3, 1]);
        let b = CycElem::from_exponent_counts(5, &[0, 1, 4, 0, 2]);
        for g in 1..5 {
            assert_eq!((&a * &b).galois(g), &a.galois(g) * &b.galois(g));
        }
    }

    #[test]
    fn embedding_of_zeta_has_unit_modulus() {
        let z = CycElem::zeta_pow(5, 2);
        for v in z.embedding_abs() {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }
}
