//! L-functions of infinite symmetric powers: the determinant route, the
//! Euler-product routes over closed points, and the unit-root L-function.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::beta::{beta_matrix, commutation_residual, required_t_degree, BetaMatrix, CommutationReport};
use super::fredholm::{delta_q, det_one_minus};
use super::kappa::KappaValue;
use crate::bessel::frobenius::truncation_bound;
use crate::bessel::{unit_root, FrobMatrix2, FrobParams, SplittingFunction};
use crate::error::{Error, Result};
use crate::exact::lpoly::FIELD_SEED;
use crate::exact::newton::{check_bound, proven_bound, BoundStatus, NewtonPoint, Q64, Tag};
use crate::exact::FqField;
use crate::padic::{Ctx, PadicElem};
use crate::profile::PrecisionProfile;

/// Splitting function and level-one Frobenius sized for a profile.
#[derive(Clone, Debug)]
pub struct SymSetup {
    pub prof: PrecisionProfile,
    pub theta: SplittingFunction,
    pub frob: FrobMatrix2,
}

impl SymSetup {
    pub fn frob_params(prof: &PrecisionProfile) -> FrobParams {
        FrobParams {
            t_deg: required_t_degree(prof),
            u_max: prof.u_x,
        }
    }

    pub fn new(prof: &PrecisionProfile) -> Result<SymSetup> {
        prof.validate()?;
        let ctx = prof.ctx()?;
        let params = SymSetup::frob_params(prof);
        let theta = SplittingFunction::compute(ctx, params.theta_len(prof.p))?;
        let frob = FrobMatrix2::level_one(&theta, params)?;
        SymSetup::from_parts(prof, theta, frob)
    }

    /// Assembles a setup from cached parts, checking they fit the profile.
    pub fn from_parts(prof: &PrecisionProfile, theta: SplittingFunction, frob: FrobMatrix2) -> Result<SymSetup> {
        prof.validate()?;
        let ctx = prof.ctx()?;
        let params = SymSetup::frob_params(prof);
        if theta.ctx() != ctx || frob.ctx() != ctx {
            return Err(Error::config("cached parts were computed at another precision"));
        }
        if theta.len() < params.theta_len(prof.p) || frob.len() < params.t_deg + 1 {
            return Err(Error::config("cached parts are too short for the profile"));
        }
        Ok(SymSetup {
            prof: prof.clone(),
            theta,
            frob,
        })
    }

    pub fn ctx(&self) -> Ctx {
        self.theta.ctx()
    }

    /// Precision guaranteed by the Frobenius truncation, in pi-units.
    pub fn frob_units(&self) -> u32 {
        truncation_bound(self.prof.p, &SymSetup::frob_params(&self.prof)).min(self.ctx().cap())
    }
}

/// Power series c_0 + c_1 T + ... in 1 + T Z_p[[T]] with per-coefficient
/// precision.
#[derive(Clone, Debug)]
pub struct LSeriesPadic {
    pub p: u32,
    pub a: u32,
    pub kappa: KappaValue,
    pub coeffs: Vec<PadicElem>,
    /// Truncation certificate in pi-units; applies to every coefficient.
    pub cert_units: u32,
}

impl LSeriesPadic {
    pub fn new(kappa: KappaValue, coeffs: Vec<PadicElem>, cert_units: u32) -> LSeriesPadic {
        let p = coeffs[0].p();
        let coeffs = coeffs.into_iter().map(|c| c.with_abs(cert_units)).collect();
        LSeriesPadic {
            p,
            a: 1,
            kappa,
            coeffs,
            cert_units,
        }
    }

    pub fn ctx(&self) -> Ctx {
        self.coeffs[0].ctx()
    }

    /// Effective precision of coefficient i in p-adic digits.
    pub fn n_eff(&self, i: usize) -> u32 {
        self.coeffs[i].precision_digits()
    }

    pub fn min_n_eff(&self) -> u32 {
        (0..self.coeffs.len()).map(|i| self.n_eff(i)).min().unwrap_or(0)
    }

    /// Coefficient i as an integer modulo p^n_eff; None when it is not in
    /// Z_p within its precision.
    pub fn integer_coeff(&self, i: usize) -> Option<BigInt> {
        let c = self.coeffs[i];
        c.with_abs(c.precision_digits() * (self.p - 1)).to_integer_symmetric()
    }

    pub fn newton_points(&self) -> Vec<NewtonPoint> {
        let den = (self.p - 1) as i64 * self.a as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| {
                let v = c.valuation();
                let value = v.units.map(|u| Q64::new(u as i64, den));
                let tag = if v.lower_bound { Tag::LowerBound } else { Tag::Exact };
                NewtonPoint { m, value, tag }
            })
            .collect()
    }

    /// Status of ord_q c_m >= (1 - 1/(p-1)) m(m-1) for each coefficient.
    pub fn bound_status(&self) -> Vec<BoundStatus> {
        self.newton_points()
            .iter()
            .map(|pt| check_bound(pt, proven_bound(self.p, pt.m)))
            .collect()
    }

    /// Sum of the coefficients, the value at T = 1 of the truncation.
    pub fn partial_sum(&self) -> PadicElem {
        self.coeffs.iter().fold(self.ctx().zero(), |a, &b| a + b)
    }

    /// Number of pi-units to which each coefficient agrees with `other`.
    pub fn agreement_units(&self, other: &LSeriesPadic) -> Vec<u32> {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (*a - *b).val_units())
            .collect()
    }

    pub fn to_record(&self) -> Result<LSeriesRecord> {
        let p = self.p;
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            let n_eff = self.n_eff(i);
            let value = self.integer_coeff(i).ok_or_else(|| {
                Error::consistency(format!("coefficient {i} is not in Z_p within its precision"))
            })?;
            let v = c.with_abs(n_eff * (p - 1)).valuation();
            let (val_num, val_den) = match v.units {
                Some(u) if !v.lower_bound => {
                    let g = (u as i64).gcd(&((p - 1) as i64));
                    (Some(u as i64 / g), (p - 1) as i64 / g)
                }
                _ => (None, 1),
            };
            coeffs.push(LCoeffRecord {
                val_num,
                val_den,
                digits: base_p_digits(&value, p, n_eff),
                value: value.to_string(),
                n_eff,
            });
        }
        let newton_points = self
            .newton_points()
            .iter()
            .zip(self.bound_status())
            .map(|(pt, st)| NewtonRecord {
                m: pt.m,
                ord_q: pt.value.map_or_else(|| "inf".to_string(), |v| v.to_string()),
                tag: pt.tag,
                bound: st,
            })
            .collect();
        Ok(LSeriesRecord {
            p,
            a: self.a,
            kappa: self.kappa.to_string(),
            cert_units: self.cert_units,
            coeffs,
            newton_points,
        })
    }
}

/// Little-endian base-p digits of x mod p^n, comma separated.
pub fn base_p_digits(x: &BigInt, p: u32, n: u32) -> String {
    let m = BigInt::from(p).pow(n);
    let mut r = x.mod_floor(&m);
    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let (q, d) = r.div_rem(&BigInt::from(p));
        out.push(d.to_string());
        r = q;
    }
    out.join(",")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LCoeffRecord {
    /// ord_p as val_num / val_den; null when the coefficient vanishes
    /// within its precision.
    pub val_num: Option<i64>,
    pub val_den: i64,
    pub digits: String,
    pub value: String,
    #[serde(rename = "Neff")]
    pub n_eff: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonRecord {
    pub m: usize,
    pub ord_q: String,
    pub tag: Tag,
    pub bound: BoundStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LSeriesRecord {
    pub p: u32,
    pub a: u32,
    pub kappa: String,
    pub cert_units: u32,
    pub coeffs: Vec<LCoeffRecord>,
    pub newton_points: Vec<NewtonRecord>,
}

/// Everything the determinant route produces for one kappa.
#[derive(Clone, Debug)]
pub struct DeterminantRun {
    pub dim: usize,
    /// det(1 - beta T) through T^M_T.
    pub det: Vec<PadicElem>,
    pub l: LSeriesPadic,
    pub commutation: Option<CommutationReport>,
}

/// Builds beta_kappa and returns det(1 - beta T) and D(T)/D(qT).
pub fn determinant_run(setup: &SymSetup, kappa: &KappaValue, check_commutation: bool) -> Result<DeterminantRun> {
    let beta = beta_matrix(kappa, &setup.frob, &setup.prof)?;
    determinant_from_beta(setup, &beta, check_commutation)
}

pub fn determinant_from_beta(setup: &SymSetup, beta: &BetaMatrix, check_commutation: bool) -> Result<DeterminantRun> {
    let ctx = setup.ctx();
    let mt = setup.prof.m_t;
    let det = det_one_minus(ctx, &beta.rows(), mt)?;
    let l = delta_q(&det, setup.prof.q())?;
    let cert = beta.window.cert_units.min(setup.frob_units());
    let commutation = check_commutation.then(|| commutation_residual(beta));
    Ok(DeterminantRun {
        dim: beta.dim(),
        det,
        l: LSeriesPadic::new(beta.kappa.clone(), l, cert),
        commutation,
    })
}

/// L(Sym^{infinity, kappa} Kl, T) through T^M_T by the determinant route.
pub fn l_sym_inf(setup: &SymSetup, kappa: &KappaValue) -> Result<LSeriesPadic> {
    Ok(determinant_run(setup, kappa, false)?.l)
}

/// x^kappa for a 1-unit x. For digit input the result is known to the
/// precision of kappa.
pub fn unit_power(x: PadicElem, kappa: &KappaValue) -> Result<PadicElem> {
    let ctx = x.ctx();
    if x.abs_precision() >= 1 && (x - ctx.one()).val_units() == 0 {
        return Err(Error::domain("power base is not a 1-unit"));
    }
    match kappa {
        KappaValue::Int(k) if *k >= 0 => Ok(x.pow(*k as u64)),
        KappaValue::Int(k) => Ok(x.invert_unit()?.pow(k.unsigned_abs())),
        KappaValue::Padic { .. } => {
            let r = kappa.representative(ctx.p());
            let r = r
                .to_u64()
                .ok_or_else(|| Error::config("kappa residue exceeds 64 bits"))?;
            Ok(x.pow(r).with_abs(kappa.precision_units(ctx) + 1))
        }
    }
}

/// A closed point of G_m of degree d with the unit root of its Frobenius.
#[derive(Clone, Debug)]
pub struct ClosedPoint {
    pub degree: u32,
    pub pi0: PadicElem,
}

/// Closed points of G_m over F_p of degree <= max_degree, each with its
/// unit root.
pub fn closed_points(theta: &SplittingFunction, max_degree: u32) -> Result<Vec<ClosedPoint>> {
    let p = theta.ctx().p();
    let mut out = Vec::new();
    for d in 1..=max_degree {
        let field = FqField::new(p, d, FIELD_SEED)?;
        for t in field.units() {
            if field.element_degree(t) != d {
                continue;
            }
            let mut c = t;
            let mut min = t;
            for _ in 1..d {
                c = field.frobenius(c);
                min = min.min(c);
            }
            if min != t {
                continue;
            }
            out.push(ClosedPoint {
                degree: d,
                pi0: unit_root(theta, &field, t)?,
            });
        }
    }
    Ok(out)
}

/// Multiplies a truncated series by 1/(1 - lam T^d).
fn mul_geometric(s: &mut [PadicElem], lam: PadicElem, d: usize) {
    for k in d..s.len() {
        let x = s[k - d] * lam;
        s[k] += x;
    }
}

/// L(Sym^{infinity, kappa} Kl, T) through T^mt from its Euler product over
/// closed points.
pub fn l_sym_inf_euler(points: &[ClosedPoint], ctx: Ctx, kappa: &KappaValue, mt: usize) -> Result<LSeriesPadic> {
    let p = ctx.p() as i64;
    let mut l = vec![ctx.zero(); mt + 1];
    l[0] = ctx.one();
    for pt in points.iter().filter(|pt| pt.degree as usize <= mt) {
        let d = pt.degree as usize;
        let inv = pt.pi0.invert_unit()?;
        // pi1 / pi0 = q^d / pi0^2
        let ratio = ctx.int(p.pow(pt.degree)) * inv * inv;
        let mut lam = unit_power(pt.pi0, kappa)?;
        // ord(lam) grows by d digits per step
        let steps = ctx.n() as usize / d + 1;
        for _ in 0..=steps {
            mul_geometric(&mut l, lam, d);
            lam *= ratio;
        }
    }
    Ok(LSeriesPadic::new(kappa.clone(), l, ctx.cap()))
}

/// Unit-root L-function through T^mt from its Euler product.
pub fn l_unit_euler(points: &[ClosedPoint], ctx: Ctx, kappa: &KappaValue, mt: usize) -> Result<LSeriesPadic> {
    let mut l = vec![ctx.zero(); mt + 1];
    l[0] = ctx.one();
    for pt in points.iter().filter(|pt| pt.degree as usize <= mt) {
        mul_geometric(&mut l, unit_power(pt.pi0, kappa)?, pt.degree as usize);
    }
    Ok(LSeriesPadic::new(kappa.clone(), l, ctx.cap()))
}

/// f(T) / g(cT) for series with unit constant terms.
pub fn div_dilated(f: &[PadicElem], g: &[PadicElem], c: PadicElem) -> Result<Vec<PadicElem>> {
    let n = f.len().min(g.len());
    let ctx = f[0].ctx();
    let mut gd = Vec::with_capacity(n);
    let mut ck = ctx.one();
    for &x in &g[..n] {
        gd.push(x * ck);
        ck *= c;
    }
    let u = gd[0].invert_unit()?;
    let mut out = vec![ctx.zero(); n];
    for k in 0..n {
        let mut acc = f[k];
        for i in 0..k {
            acc -= out[i] * gd[k - i];
        }
        out[k] = acc * u;
    }
    Ok(out)
}

/// Unit-root L-function as L(Sym^{infinity, kappa})(T) / L(Sym^{infinity,
/// kappa - 2})(qT).
pub fn l_unit_ratio(setup: &SymSetup, kappa: &KappaValue) -> Result<LSeriesPadic> {
    let a = l_sym_inf(setup, kappa)?;
    let b = l_sym_inf(setup, &kappa.minus(setup.prof.p, 2))?;
    let q = setup.ctx().int(setup.prof.q() as i64);
    let c = div_dilated(&a.coeffs, &b.coeffs, q)?;
    Ok(LSeriesPadic::new(kappa.clone(), c, a.cert_units.min(b.cert_units)))
}

/// Comparison of an exact integer L-polynomial with a p-adic series.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub p: u32,
    pub k: u32,
    pub terms: usize,
    pub exact: Vec<String>,
    pub padic: Vec<String>,
    /// Digits of agreement per coefficient, capped at n_eff.
    pub agree_digits: Vec<u32>,
    pub n_eff: u32,
    pub pass: bool,
}

/// L(Sym^k Kl, T) from the exact pipeline against
/// L(Sym^{inf,k})(T) / L(Sym^{inf,-(k+2)})(q^{k+1} T), through T^terms.
pub fn finite_sym_check(setup: &SymSetup, k: u32, exact: &[BigInt], terms: usize) -> Result<IdentityReport> {
    if setup.prof.m_t < terms {
        return Err(Error::config("not enough coefficients for the identity check"));
    }
    let a = l_sym_inf(setup, &KappaValue::Int(k as i64))?;
    let b = l_sym_inf(setup, &KappaValue::Int(-(k as i64) - 2))?;
    identity_report(k, &a, &b, exact, terms)
}

/// The identity check from precomputed L(Sym^{inf,k}) and
/// L(Sym^{inf,-(k+2)}).
pub fn identity_report(k: u32, a: &LSeriesPadic, b: &LSeriesPadic, exact: &[BigInt], terms: usize) -> Result<IdentityReport> {
    let ctx = a.ctx();
    let p = a.p;
    if exact.len() <= terms || a.coeffs.len() <= terms || b.coeffs.len() <= terms {
        return Err(Error::config("not enough coefficients for the identity check"));
    }
    let c = ctx.int(p as i64).pow(k as u64 + 1);
    let ratio = div_dilated(&a.coeffs[..=terms], &b.coeffs[..=terms], c)?;
    let cert = a.cert_units.min(b.cert_units);
    let series = LSeriesPadic::new(KappaValue::Int(k as i64), ratio, cert);
    let n_eff = series.min_n_eff();
    let mut agree = Vec::with_capacity(terms + 1);
    for (i, e) in exact.iter().enumerate().take(terms + 1) {
        let d = (series.coeffs[i] - ctx.from_bigint(e)).val_units() / (p - 1);
        agree.push(d.min(series.n_eff(i)));
    }
    let pass = agree.iter().enumerate().all(|(i, &d)| d >= series.n_eff(i));
    Ok(IdentityReport {
        p,
        k,
        terms,
        exact: exact[..=terms].iter().map(|x| x.to_string()).collect(),
        padic: (0..=terms)
            .map(|i| {
                series
                    .integer_coeff(i)
                    .map_or_else(|| format!("{:?}", series.coeffs[i]), |v| v.to_string())
            })
            .collect(),
        agree_digits: agree,
        n_eff,
        pass,
    })
}

/// Smallest ord_p over the tail m > mt permitted by the Newton bound.
pub fn tail_bound_digits(p: u32, mt: usize) -> u32 {
    let b = proven_bound(p, mt + 1);
    let c = b.ceil().to_integer();
    if c.is_negative() {
        0
    } else {
        c as u32
    }
}

/// ord_p of the partial sum c_0 + ... + c_M_T in digits, capped at the
/// series precision.
pub fn partial_sum_digits(l: &LSeriesPadic) -> u32 {
    let s = l.partial_sum();
    if s.is_zero() {
        return s.precision_digits();
    }
    (s.val_units() / (l.p - 1)).min(s.precision_digits())
}

/// True when the partial sum through M_T is divisible by the power of p
/// that the Newton bound allows for the tail.
pub fn vanishes_at_one(l: &LSeriesPadic) -> bool {
    partial_sum_digits(l) >= tail_bound_digits(l.p, l.coeffs.len() - 1)
}
