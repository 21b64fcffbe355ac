//! Integer L-polynomials of symmetric powers of the Kloosterman family.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cyclo::CycElem;
use super::field::FqField;
use super::kloosterman::{complete_homog, kloosterman_sum};
use super::newton::{
    check_bound, heuristic_bound, newton_polygon, ord_q_integer, proven_bound, BoundStatus,
    NewtonPoint, NewtonPolygon, Tag, Q64,
};
use crate::error::{Error, Result};
use crate::padic::check_prime;

/// Seed for the modulus search, fixed so that outputs are reproducible.
pub const FIELD_SEED: u64 = 0x6b6c_6162;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPolynomial {
    pub p: u32,
    pub a: u32,
    pub k: u32,
    pub modulus: Vec<u32>,
    pub extension_moduli: Vec<Vec<u32>>,
    /// S_k(m) for m = 1..=M.
    pub power_sums: Vec<BigInt>,
    /// c_0..=c_M.
    pub coeffs: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRow {
    pub m: usize,
    pub ord_q: Option<String>,
    pub proven: BoundStatus,
    pub heuristic: BoundStatus,
}

/// S_k(field) = sum over t in field^* of h_k(-Kl(t), |field|).
pub fn sym_power_sum(field: &FqField, k: u32) -> Result<BigInt> {
    let p = field.p();
    let e2 = CycElem::from_int(p, field.size());
    let total = (1..field.size())
        .into_par_iter()
        .map(|t| -> Result<CycElem> {
            let kl = kloosterman_sum(field, t)?;
            Ok(complete_homog(k, &(-&kl), &e2))
        })
        .try_reduce(|| CycElem::zero(p), |a, b| Ok(&a + &b))?;
    total.as_integer().ok_or_else(|| {
        Error::consistency(format!(
            "S_{k} over F_{}^{} is not a rational integer: {:?}",
            p,
            field.degree(),
            total.coords()
        ))
    })
}

/// Coefficients of exp(sum_{m>=1} s[m-1] T^m / m) through T^len(s), via
/// m c_m = sum_{i=1}^m s_i c_{m-i} over the rationals.
pub fn exp_power_sums(s: &[BigInt]) -> Result<Vec<BigInt>> {
    let mut c: Vec<BigRational> = vec![BigRational::one()];
    for m in 1..=s.len() {
        let mut acc = BigRational::zero();
        for i in 1..=m {
            acc += BigRational::from_integer(s[i - 1].clone()) * &c[m - i];
        }
        c.push(acc / BigRational::from_integer(BigInt::from(m)));
    }
    c.into_iter()
        .enumerate()
        .map(|(m, x)| {
            if x.is_integer() {
                Ok(x.to_integer())
            } else {
                Err(Error::consistency(format!("coefficient c_{m} = {x} is not an integer")))
            }
        })
        .collect()
}

pub fn l_sym_k_coeffs(p: u32, a: u32, k: u32, terms: usize) -> Result<LPolynomial> {
    l_sym_k_coeffs_seeded(p, a, k, terms, FIELD_SEED)
}

pub fn l_sym_k_coeffs_seeded(p: u32, a: u32, k: u32, terms: usize, seed: u64) -> Result<LPolynomial> {
    check_prime(p)?;
    if a == 0 || k == 0 || terms == 0 {
        return Err(Error::config("a, k and the number of terms must be positive"));
    }
    let base = FqField::new(p, a, seed)?;
    let mut power_sums = Vec::with_capacity(terms);
    let mut extension_moduli = Vec::with_capacity(terms);
    for m in 1..=terms as u32 {
        let field = FqField::new(p, a * m, seed)?;
        power_sums.push(sym_power_sum(&field, k)?);
        extension_moduli.push(field.modulus().to_vec());
    }
    let coeffs = exp_power_sums(&power_sums)?;
    Ok(LPolynomial {
        p,
        a,
        k,
        modulus: base.modulus().to_vec(),
        extension_moduli,
        power_sums,
        coeffs,
    })
}

impl LPolynomial {
    pub fn newton_points(&self) -> Vec<NewtonPoint> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| NewtonPoint {
                m,
                value: ord_q_integer(c, self.p, self.a),
                tag: Tag::Exact,
            })
            .collect()
    }

    pub fn newton_polygon(&self) -> NewtonPolygon {
        newton_polygon(&self.newton_points())
    }

    pub fn bound_report(&self) -> Vec<BoundRow> {
        self.newton_points()
            .iter()
            .map(|pt| BoundRow {
                m: pt.m,
                ord_q: pt.value.map(|v| v.to_string()),
                proven: check_bound(pt, proven_bound(self.p, pt.m)),
                heuristic: check_bound(pt, heuristic_bound(pt.m)),
            })
            .collect()
    }

    pub fn proven_bound_holds(&self) -> bool {
        self.bound_report()
            .iter()
            .all(|r| r.proven == BoundStatus::Holds)
    }

    pub fn to_record(&self) -> LPolyRecord {
        LPolyRecord {
            p: self.p,
            a: self.a,
            k: self.k,
            modulus: self.modulus.clone(),
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
            newton: self
                .newton_points()
                .iter()
                .map(|pt| {
                    (
                        pt.m,
                        pt.value.map_or_else(|| "inf".to_string(), |v| v.to_string()),
                    )
                })
                .collect(),
        }
    }
}

/// JSON form of an L-polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LPolyRecord {
    pub p: u32,
    pub a: u32,
    pub k: u32,
    pub modulus: Vec<u32>,
    pub coeffs: Vec<String>,
    pub newton: Vec<(usize, String)>,
}

impl LPolyRecord {
    /// Validating decode: checks the prime, c_0 = 1, decimal coefficients
    /// and that the Newton column agrees with the coefficients.
    pub fn decode(&self) -> Result<LPolynomial> {
        check_prime(self.p).map_err(|e| Error::Parse(e.to_string()))?;
        if self.a == 0 || self.a > 8 {
            return Err(Error::Parse(format!("extension degree a = {} out of range", self.a)));
        }
        if self.modulus.len() != self.a as usize + 1
            || self.modulus.iter().any(|&c| c >= self.p)
            || self.modulus.last() != Some(&1)
        {
            return Err(Error::Parse("modulus is not a monic polynomial of degree a".into()));
        }
        let coeffs: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|s| {
                if s.is_empty() || s.len() > 4096 {
                    return Err(Error::Parse("coefficient string empty or too long".into()));
                }
                s.parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("not a decimal integer: {s:?}")))
            })
            .collect::<Result<_>>()?;
        if coeffs.first() != Some(&BigInt::one()) {
            return Err(Error::Parse("c_0 must be 1".into()));
        }
        let poly = LPolynomial {
            p: self.p,
            a: self.a,
            k: self.k,
            modulus: self.modulus.clone(),
            extension_moduli: Vec::new(),
            power_sums: Vec::new(),
            coeffs,
        };
        if !self.newton.is_empty() {
            let expected = poly.to_record().newton;
            if expected != self.newton {
                return Err(Error::Parse("Newton column disagrees with coefficients".into()));
            }
        }
        Ok(poly)
    }
}

/// ord_q as an exact rational; exposed for callers building reports.
pub fn ord_q(c: &BigInt, p: u32, a: u32) -> Option<Q64> {
    ord_q_integer(c, p, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_geometric_power_sums() {
        // S(m) = 2^m gives 1/(1 - 2T)
        let s: Vec<BigInt> = (1..=5).map(|m| BigInt::from(2).pow(m)).collect();
        let c = exp_power_sums(&s).unwrap();
        for (m, x) in c.iter().enumerate() {
            assert_eq!(*x, BigInt::from(2).pow(m as u32));
        }
    }

    #[test]
    fn non_integral_exp_is_reported() {
        let s = vec![BigInt::from(1), BigInt::from(0)];
        assert!(exp_power_sums(&s).is_err());
    }

    #[test]
    fn record_round_trip() {
        let l = l_sym_k_coeffs(5, 1, 1, 3).unwrap();
        assert_eq!(l.coeffs[0], BigInt::one());
        let rec = l.to_record();
        let back = rec.decode().unwrap();
        assert_eq!(back.coeffs, l.coeffs);
    }
}
