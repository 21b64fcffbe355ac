//! The operator beta_kappa = psi_t o [alpha]_kappa on t^n w^(m), in a
//! diagonally rescaled basis where every entry is integral and column
//! (n', m) is divisible by pi^g(n', m).
//!
//! Valuation classes of the t-scaled A-series (pi-units, A(e) = Ahat(e) pi^e):
//!   ord Ahat_i(e) >= (tA - 1) e + off_i
//! with tA = 2(p-1)^2/p^2, off1 = 0, off2 = 1 - (p-1)^2/p^2,
//! off3 = (p-1)^2/p - 1, off4 = (p-1)^3/p^2. The basis t^n w^(j) is scaled
//! by pi^(omega_n n + omega_j j).

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::kappa::{falling_int, KappaValue};
use crate::bessel::FrobMatrix2;
use crate::error::{Error, Result};
use crate::padic::series::Series;
use crate::padic::{Ctx, PadicElem};
use crate::profile::PrecisionProfile;

/// Scaling constants, all rationals carried with denominator p^2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScaleConsts {
    pub p: u32,
    pub omega_n: u32,
    pub omega_j: u32,
    /// p^2 * gain per unit of n'.
    pub gain_n: i64,
    /// p^2 * gain per unit of m.
    pub gain_m: i64,
}

impl ScaleConsts {
    pub fn new(p: u32) -> ScaleConsts {
        let p = p as i64;
        let s = (p - 1) * (p - 1);
        let p2 = p * p;
        let omega_n = (2 * s) / p;
        let off2 = p2 - s;
        let off3 = s * p - p2;
        let off4 = s * (p - 1);
        let omega_j = (off3 - p2).min(off4 - off2).div_euclid(p2);
        ScaleConsts {
            p: p as u32,
            omega_n: omega_n as u32,
            omega_j: omega_j as u32,
            gain_n: omega_n * (p - 1) * p,
            gain_m: off2 + omega_j * p2,
        }
    }

    /// p^2 times the lower bound (tA - 1) e + off_i.
    pub fn class_bound(&self, i: usize, e: usize) -> i64 {
        let p = self.p as i64;
        let s = (p - 1) * (p - 1);
        let p2 = p * p;
        let off = match i {
            1 => 0,
            2 => p2 - s,
            3 => s * p - p2,
            4 => s * (p - 1),
            _ => panic!("A-series index {i} out of range"),
        };
        (2 * s - p2) * e as i64 + off
    }

    /// p^2 g(n, m).
    pub fn gain(&self, n: usize, m: usize) -> i64 {
        self.gain_n * n as i64 + self.gain_m * m as i64
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

/// Basis elements (n, j) kept in the truncated operator, ordered
/// lexicographically, and the precision they certify.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Window {
    pub basis: Vec<(usize, usize)>,
    /// Determinant coefficients are exact modulo pi^cert_units.
    pub cert_units: u32,
    pub n_max: usize,
    pub j_max: usize,
}

pub fn window(prof: &PrecisionProfile) -> Window {
    let sc = ScaleConsts::new(prof.p);
    let p2 = (prof.p * prof.p) as i64;
    let target = (prof.target_digits * (prof.p - 1)) as i64;
    let limit = target * p2;
    let mut basis = Vec::new();
    for n in 0..=prof.n_t {
        for j in 0..=prof.m_w {
            if sc.gain(n, j) < limit {
                basis.push((n, j));
            }
        }
    }
    let mut cert = target;
    cert = cert.min(ceil_div(sc.gain(prof.n_t + 1, 0), p2));
    cert = cert.min(ceil_div(sc.gain(0, prof.m_w + 1), p2));
    let n_max = basis.iter().map(|b| b.0).max().unwrap_or(0);
    let j_max = basis.iter().map(|b| b.1).max().unwrap_or(0);
    Window {
        basis,
        cert_units: cert.max(0) as u32,
        n_max,
        j_max,
    }
}

/// Highest t-degree of the A-series needed for a window.
pub fn required_t_degree(prof: &PrecisionProfile) -> usize {
    prof.q() as usize * window(prof).n_max
}

/// Checks the valuation classes of the t-scaled level-one A-series; a
/// coefficient whose exact valuation is below its class is an error.
pub fn check_classes(frob: &FrobMatrix2) -> Result<i64> {
    if frob.level != 1 || frob.t_scale != 1 {
        return Err(Error::config("valuation classes apply to the t-scaled level-one matrix"));
    }
    let sc = ScaleConsts::new(frob.p);
    let p2 = (frob.p * frob.p) as i64;
    let mut slack = i64::MAX;
    for i in 1..=4 {
        for (e, x) in frob.a(i).coeffs().iter().enumerate() {
            let v = x.valuation();
            let Some(u) = v.units else { continue };
            if u >= x.abs_precision() as u64 {
                continue;
            }
            let s = u as i64 * p2 - sc.class_bound(i, e);
            if s < 0 {
                return Err(Error::consistency(format!(
                    "A{i} coefficient {e} has valuation {u} below its class"
                )));
            }
            slack = slack.min(s);
        }
    }
    Ok(slack)
}

/// Matrix of beta_kappa on a window, in the rescaled basis.
#[derive(Clone, Debug)]
pub struct BetaMatrix {
    pub p: u32,
    pub q: u64,
    pub kappa: KappaValue,
    pub consts: ScaleConsts,
    pub window: Window,
    index: HashMap<(usize, usize), usize>,
    /// Row-major; entry [r][c] is the coefficient of basis r in the image
    /// of basis c.
    pub entries: Vec<PadicElem>,
}

impl BetaMatrix {
    pub fn dim(&self) -> usize {
        self.window.basis.len()
    }

    pub fn get(&self, r: usize, c: usize) -> PadicElem {
        self.entries[r * self.dim() + c]
    }

    pub fn index_of(&self, n: usize, j: usize) -> Option<usize> {
        self.index.get(&(n, j)).copied()
    }

    pub fn ctx(&self) -> Ctx {
        self.entries[0].ctx()
    }

    /// Rows as vectors, for the determinant routines.
    pub fn rows(&self) -> Vec<Vec<PadicElem>> {
        self.entries.chunks(self.dim()).map(|r| r.to_vec()).collect()
    }
}

/// (kappa - j)^(m - nu) with the integer-kappa conventions: for kappa = k
/// and m <= k the factor vanishes once l = j - nu exceeds k - m; for m > k
/// the zero factor is skipped.
pub(crate) fn r_factor(kappa: &KappaValue, rep: &BigInt, j: usize, nu: usize, m: usize) -> BigInt {
    let s = (m - nu) as u64;
    let x = rep - j;
    match kappa.nonneg_int() {
        Some(k) if m as u64 <= k => {
            if (j - nu) as u64 > k - m as u64 {
                BigInt::zero()
            } else {
                falling_int(&x, s, false)
            }
        }
        Some(_) => falling_int(&x, s, true),
        None => falling_int(&x, s, false),
    }
}

/// acc[a + b] += x[a] y[b] for a + b < acc.len().
fn mul_acc(acc: &mut [PadicElem], x: &[PadicElem], y: &[PadicElem]) {
    let n = acc.len();
    for (a, &xa) in x.iter().enumerate().take(n) {
        if xa.coords().iter().all(|&c| c == 0) {
            continue;
        }
        for (b, &yb) in y.iter().enumerate().take(n - a) {
            acc[a + b] += xa * yb;
        }
    }
}

fn shift(v: PadicElem, k: i64) -> Result<PadicElem> {
    if k >= 0 {
        Ok(v.mul_pi_pow(k as u32))
    } else {
        v.div_pi_pow((-k) as u32)
            .map_err(|_| Error::consistency("operator entry below its valuation bound"))
    }
}

/// Assembles the truncated matrix of beta_kappa from the t-scaled
/// level-one Frobenius matrix.
pub fn beta_matrix(kappa: &KappaValue, frob: &FrobMatrix2, prof: &PrecisionProfile) -> Result<BetaMatrix> {
    prof.validate()?;
    kappa.check(prof.p)?;
    if frob.level != 1 || frob.t_scale != 1 || frob.p != prof.p {
        return Err(Error::config("beta needs the t-scaled level-one matrix for the same prime"));
    }
    let ctx = frob.ctx();
    let p = prof.p;
    let q = p as usize;
    let sc = ScaleConsts::new(p);
    let win = window(prof);
    let need = q * win.n_max + 1;
    if frob.len() < need {
        return Err(Error::config(format!(
            "A-series of length {} do not reach t-degree {}",
            frob.len(),
            need - 1
        )));
    }
    let kprec = kappa.precision_units(ctx);
    let rep = kappa.representative(p);

    // row extents per w-degree
    let mut n_row_max = vec![None::<usize>; win.j_max + 1];
    for &(n, j) in &win.basis {
        n_row_max[j] = Some(n_row_max[j].map_or(n, |x: usize| x.max(n)));
    }
    let len_of = |j: usize| n_row_max[j].map(|n| q * n + 1);
    let e0 = need;

    let trunc = |s: &Series| s.truncate(e0);
    let a1 = trunc(frob.a(1));
    let inv1 = a1.inv()?;
    let mut x3 = &trunc(frob.a(3)) * &inv1;
    for e in 0..e0 {
        let v = x3.coeff(e).div_pi_pow(sc.omega_j + 1).map_err(|_| {
            Error::consistency(format!("A3/A1 coefficient {e} below its valuation bound"))
        })?;
        x3.set(e, v);
    }
    let y2 = trunc(frob.a(2)).scale(ctx.pi_pow(sc.omega_j));
    let y4 = trunc(frob.a(4));

    let j_max = win.j_max;
    let mut q_l: Vec<Series> = Vec::with_capacity(j_max + 1);
    let mut x3p = Series::one(ctx, e0);
    for l in 0..=j_max {
        if l > 0 {
            x3p = &x3p * &x3;
        }
        q_l.push(x3p.scale(ctx.pi_pow_over_factorial(l as u64)));
    }
    let m_max = win.j_max;
    let mut y2p = vec![Series::one(ctx, e0)];
    let mut y4p = vec![Series::one(ctx, e0)];
    for i in 1..=m_max {
        y2p.push(&y2p[i - 1] * &y2);
        y4p.push(&y4p[i - 1] * &y4);
    }

    let mut g = match kappa {
        KappaValue::Int(k) => a1.pow_i64(*k)?,
        KappaValue::Padic { .. } => {
            let r: u64 = rep
                .to_u64()
                .ok_or_else(|| Error::config("kappa residue exceeds 64 bits"))?;
            let s = a1.pow(r);
            Series::from_vec(ctx, s.coeffs().iter().map(|x| x.with_abs(kprec)).collect())
        }
    };

    let dim = win.basis.len();
    let index: HashMap<(usize, usize), usize> =
        win.basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let mut entries = vec![ctx.zero(); dim * dim];
    let mut cols_by_m: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m_max + 1];
    for (ci, &(n1, m)) in win.basis.iter().enumerate() {
        cols_by_m[m].push((ci, n1));
    }
    let binom_row = |m: usize| -> Vec<BigInt> {
        let mut row = vec![BigInt::from(1)];
        for i in 1..=m {
            let next = &row[i - 1] * BigInt::from(m - i + 1) / BigInt::from(i);
            row.push(next);
        }
        row
    };

    for (m, cols) in cols_by_m.iter().enumerate() {
        if m > 0 {
            g = &g * &inv1;
        }
        if cols.is_empty() {
            continue;
        }
        let binoms = binom_row(m);
        let pm: Vec<Series> = (0..=m)
            .map(|nu| (&y2p[m - nu] * &y4p[nu]).scale(ctx.from_bigint(&binoms[nu])))
            .collect();
        for j in 0..=j_max {
            let Some(len) = len_of(j) else { continue };
            let mut acc = vec![ctx.zero(); len];
            for nu in 0..=m.min(j) {
                let r = r_factor(kappa, &rep, j, nu, m);
                if r.is_zero() {
                    continue;
                }
                let rp: Vec<PadicElem> = pm[nu].coeffs()[..len]
                    .iter()
                    .map(|&x| (x * ctx.from_bigint(&r)).with_abs(kprec))
                    .collect();
                mul_acc(&mut acc, &rp, &q_l[j - nu].coeffs()[..len]);
            }
            let mut s = vec![ctx.zero(); len];
            mul_acc(&mut s, &g.coeffs()[..len], &acc);
            for &(ci, n1) in cols {
                for n in 0..=n_row_max[j].unwrap() {
                    let Some(&ri) = index.get(&(n, j)) else { continue };
                    let qn = q * n;
                    if qn < n1 {
                        continue;
                    }
                    let e = qn - n1;
                    let k = e as i64 + sc.omega_n as i64 * (n1 as i64 - n as i64);
                    entries[ri * dim + ci] = shift(s[e], k)?;
                }
            }
        }
    }
    Ok(BetaMatrix {
        p,
        q: q as u64,
        kappa: kappa.clone(),
        consts: sc,
        window: win,
        index,
        entries,
    })
}

/// Coefficient of the lowering term of the boundary operator,
/// m (kappa - m + 1), with the zero factor skipped at m = k + 1 for
/// kappa = k >= 0.
pub fn lowering_coeff(kappa: &KappaValue, rep: &BigInt, m: usize) -> BigInt {
    let f = rep - BigInt::from(m) + 1;
    match kappa.nonneg_int() {
        Some(k) if m as u64 == k + 1 => BigInt::from(m),
        _ => BigInt::from(m) * f,
    }
}

/// Whether the boundary operator has the raising term at w-degree m.
pub fn has_raising(kappa: &KappaValue, m: usize) -> bool {
    kappa.nonneg_int() != Some(m as u64)
}

/// Result of comparing q dhat Mhat with Mhat dhat on interior entries.
#[derive(Clone, Debug, Serialize)]
pub struct CommutationReport {
    pub entries_checked: usize,
    pub nonzero: usize,
    /// Smallest valuation of a residual, capped at its precision.
    pub min_residual_units: u32,
}

/// Residual of q d o beta = beta o d for the boundary operator d on the
/// window, with d rescaled by pi^omega_n so that it is integral.
pub fn commutation_residual(beta: &BetaMatrix) -> CommutationReport {
    let ctx = beta.ctx();
    let sc = beta.consts;
    let kappa = &beta.kappa;
    let rep = kappa.representative(beta.p);
    let kprec = kappa.precision_units(ctx);
    let on = ctx.pi_pow(sc.omega_n);
    let up = ctx.pi_pow(sc.omega_n - sc.omega_j);
    let down = |m: usize| {
        ctx.from_bigint(&lowering_coeff(kappa, &rep, m))
            .with_abs(kprec)
            .mul_pi_pow(2 + sc.omega_j)
    };
    // image of basis (n, m) under dhat: list of (index, coefficient)
    let d_col = |n: usize, m: usize| -> Option<Vec<(usize, PadicElem)>> {
        let mut v = vec![(beta.index_of(n, m)?, on.mul_int(n as i64))];
        if has_raising(kappa, m) {
            v.push((beta.index_of(n, m + 1)?, up));
        }
        if m >= 1 {
            v.push((beta.index_of(n + 1, m - 1)?, down(m)));
        }
        Some(v)
    };
    let dim = beta.dim();
    let mut cols_d: Vec<Option<Vec<(usize, PadicElem)>>> = Vec::with_capacity(dim);
    for &(n, m) in &beta.window.basis {
        cols_d.push(d_col(n, m));
    }
    // rows of dhat: for each row index r, the (k, coefficient) with dhat[r][k] != 0
    let mut rows_d: Vec<Vec<(usize, PadicElem)>> = vec![Vec::new(); dim];
    for &(n, m) in &beta.window.basis {
        let k = beta.index_of(n, m).unwrap();
        rows_d[k].push((k, on.mul_int(n as i64)));
        if has_raising(kappa, m) {
            if let Some(r) = beta.index_of(n, m + 1) {
                rows_d[r].push((k, up));
            }
        }
        if m >= 1 {
            if let Some(r) = beta.index_of(n + 1, m - 1) {
                rows_d[r].push((k, down(m)));
            }
        }
    }
    let mut report = CommutationReport {
        entries_checked: 0,
        nonzero: 0,
        min_residual_units: ctx.cap(),
    };
    let q = beta.q as i64;
    for (c, col) in cols_d.iter().enumerate() {
        let Some(col) = col else { continue };
        for r in 0..dim {
            let lhs = rows_d[r]
                .iter()
                .fold(ctx.zero(), |acc, &(k, d)| acc + d * beta.get(k, c))
                .mul_int(q);
            let rhs = col.iter().fold(ctx.zero(), |acc, &(k, d)| acc + beta.get(r, k) * d);
            let diff = lhs - rhs;
            report.entries_checked += 1;
            if !diff.is_zero() {
                report.nonzero += 1;
            }
            report.min_residual_units = report.min_residual_units.min(diff.val_units());
        }
    }
    report
}
