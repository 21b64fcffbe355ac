//! The boundary operator d_kappa on t^n w^(m), its kernel on finite
//! windows, and the reduction of w-polynomials to the w^(0) part.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::beta::{has_raising, lowering_coeff};
use super::kappa::KappaValue;
use crate::error::{Error, Result};
use crate::padic::{Ctx, PadicElem};

/// Finite sum of A(n, m) t^n w^(m).
#[derive(Clone, Debug, PartialEq)]
pub struct SymBlock {
    pub ctx: Ctx,
    pub entries: BTreeMap<(usize, usize), PadicElem>,
}

impl SymBlock {
    pub fn zero(ctx: Ctx) -> SymBlock {
        SymBlock {
            ctx,
            entries: BTreeMap::new(),
        }
    }

    pub fn monomial(ctx: Ctx, n: usize, m: usize, c: PadicElem) -> SymBlock {
        let mut b = SymBlock::zero(ctx);
        b.add_term(n, m, c);
        b
    }

    pub fn add_term(&mut self, n: usize, m: usize, c: PadicElem) {
        let e = self.entries.entry((n, m)).or_insert_with(|| self.ctx.zero());
        *e += c;
    }

    pub fn get(&self, n: usize, m: usize) -> PadicElem {
        self.entries.get(&(n, m)).copied().unwrap_or_else(|| self.ctx.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|c| c.is_zero())
    }

    pub fn sub(&self, other: &SymBlock) -> SymBlock {
        let mut out = self.clone();
        for (&(n, m), &c) in &other.entries {
            out.add_term(n, m, -c);
        }
        out
    }

    pub fn scale(&self, s: PadicElem) -> SymBlock {
        SymBlock {
            ctx: self.ctx,
            entries: self.entries.iter().map(|(&k, &c)| (k, c * s)).collect(),
        }
    }

    /// Smallest value of ord(A(n, m)) - (2 b' n + eps m), all in pi-units
    /// scaled by `den`; the block lies in S(b', eps; rho) iff this is
    /// at least rho.
    pub fn class_margin(&self, b2_num: i64, eps_num: i64, den: i64) -> Option<i64> {
        self.entries
            .iter()
            .filter_map(|(&(n, m), c)| {
                let v = c.valuation();
                if v.lower_bound {
                    return None;
                }
                v.units.map(|u| u as i64 * den - b2_num * n as i64 - eps_num * m as i64)
            })
            .min()
    }
}

/// d_kappa(t^n w^(m)) = n t^n w^(m) + t^n w^(m+1) + m (kappa - m + 1) pi^2 t^(n+1) w^(m-1),
/// with the raising term absent at m = k and the zero factor skipped at
/// m = k + 1 when kappa = k >= 0.
pub fn partial_kappa(kappa: &KappaValue, blk: &SymBlock) -> SymBlock {
    let ctx = blk.ctx;
    let rep = kappa.representative(ctx.p());
    let kprec = kappa.precision_units(ctx);
    let pi2 = ctx.pi_pow(2);
    let mut out = SymBlock::zero(ctx);
    for (&(n, m), &c) in &blk.entries {
        if n > 0 {
            out.add_term(n, m, c.mul_int(n as i64));
        }
        if has_raising(kappa, m) {
            out.add_term(n, m + 1, c);
        }
        if m >= 1 {
            let l = ctx.from_bigint(&lowering_coeff(kappa, &rep, m)).with_abs(kprec);
            out.add_term(n + 1, m - 1, c * l * pi2);
        }
    }
    out
}

/// Outcome of a kernel computation on a window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelReport {
    pub n_t: usize,
    pub m_w: usize,
    pub dim: usize,
    /// Set when finite p-adic precision of kappa left the rank undecided;
    /// `dim` is then an upper bound.
    pub indeterminate: bool,
}

/// Columns of d_kappa on the window in the basis pi^(2n) t^n w^(m), where
/// all coefficients are integers (residues for digit kappa).
fn window_columns(rep: &BigInt, kappa: &KappaValue, n_t: usize, m_w: usize) -> (Vec<(usize, usize)>, Vec<Vec<((usize, usize), BigInt)>>) {
    let mut basis = Vec::new();
    let mut cols = Vec::new();
    for n in 0..=n_t {
        for m in 0..=m_w {
            basis.push((n, m));
            let mut col = Vec::new();
            if n > 0 {
                col.push(((n, m), BigInt::from(n)));
            }
            if has_raising(kappa, m) {
                col.push(((n, m + 1), BigInt::one()));
            }
            if m >= 1 {
                let c = lowering_coeff(kappa, rep, m);
                if !c.is_zero() {
                    col.push(((n + 1, m - 1), c));
                }
            }
            cols.push(col);
        }
    }
    (basis, cols)
}

/// Dimension of the space of xi supported on {n <= n_t, m <= m_w} with
/// d_kappa(xi) = 0 exactly (images outside the window included), so
/// truncation artefacts at the window edge are not counted.
pub fn kernel_dim(kappa: &KappaValue, p: u32, n_t: usize, m_w: usize) -> Result<KernelReport> {
    kappa.check(p)?;
    if let Some(k) = kappa.as_int() {
        if k > 0 {
            return Err(Error::domain(
                "kernel of the boundary operator is not computed for positive integer kappa",
            ));
        }
    }
    let rep = kappa.representative(p);
    let (basis, cols) = window_columns(&rep, kappa, n_t, m_w);
    let ncols = basis.len();
    let mut row_ids: HashMap<(usize, usize), usize> = HashMap::new();
    for col in &cols {
        for (r, _) in col {
            let next = row_ids.len();
            row_ids.entry(*r).or_insert(next);
        }
    }
    match kappa {
        KappaValue::Int(_) => {
            let rank = rational_rank(&cols, &row_ids);
            Ok(KernelReport {
                n_t,
                m_w,
                dim: ncols - rank,
                indeterminate: false,
            })
        }
        KappaValue::Padic { digits } => {
            let (rank, undecided) = padic_rank(&cols, &row_ids, p, digits.len() as u32);
            Ok(KernelReport {
                n_t,
                m_w,
                dim: ncols - rank,
                indeterminate: undecided,
            })
        }
    }
}

/// Exact rank over Q by sparse echelon insertion.
fn rational_rank(cols: &[Vec<((usize, usize), BigInt)>], row_ids: &HashMap<(usize, usize), usize>) -> usize {
    // work with rows of the transpose: each column of d is a sparse vector
    let mut vecs: Vec<BTreeMap<usize, BigRational>> = cols
        .iter()
        .map(|c| {
            c.iter()
                .map(|(r, v)| (row_ids[r], BigRational::from_integer(v.clone())))
                .collect()
        })
        .collect();
    vecs.retain(|v| !v.is_empty());
    let mut rank = 0;
    // pivot index -> reduced vector with leading entry 1 at that index
    let mut pivots: BTreeMap<usize, BTreeMap<usize, BigRational>> = BTreeMap::new();
    for mut v in vecs {
        loop {
            let Some((&lead, _)) = v.iter().next() else { break };
            match pivots.get(&lead) {
                Some(pv) => {
                    let f = v[&lead].clone();
                    for (&i, x) in pv {
                        let e = v.entry(i).or_insert_with(BigRational::zero);
                        *e -= &f * x;
                        if e.is_zero() {
                            v.remove(&i);
                        }
                    }
                }
                None => {
                    let inv = v[&lead].recip();
                    for x in v.values_mut() {
                        *x *= &inv;
                    }
                    pivots.insert(lead, v);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

/// Rank over Q_p of an integer matrix known modulo p^digits, by full
/// pivoting on p-adic valuation. Returns (rank, undecided).
fn padic_rank(cols: &[Vec<((usize, usize), BigInt)>], row_ids: &HashMap<(usize, usize), usize>, p: u32, digits: u32) -> (usize, bool) {
    let digits = digits.clamp(1, 24);
    let modulus = (p as u128).pow(digits);
    let nrows = row_ids.len();
    let red = |x: &BigInt| -> u128 {
        let m = BigInt::from(modulus);
        ((x % &m + &m) % &m).to_u128().unwrap()
    };
    let mut a: Vec<Vec<u128>> = cols
        .iter()
        .map(|c| {
            let mut row = vec![0u128; nrows];
            for (r, v) in c {
                row[row_ids[r]] = red(v);
            }
            row
        })
        .collect();
    let ordp = |x: u128| -> u32 {
        if x == 0 {
            u32::MAX
        } else {
            let mut v = 0;
            let mut y = x;
            while y.is_multiple_of(p as u128) {
                y /= p as u128;
                v += 1;
            }
            v
        }
    };
    let mulmod = |x: u128, y: u128| -> u128 {
        // operands are below p^24 < 2^56
        (x % modulus) * (y % modulus) % modulus
    };
    let inv_unit = |u: u128| -> u128 {
        // Newton iteration for the inverse modulo p^digits
        let u0 = (u % p as u128) as u64;
        let mut y = (1..p as u64).find(|&y| (u0 * y) % p as u64 == 1).unwrap() as u128;
        let mut prec = 1;
        while prec < digits {
            let t = (2 + modulus - mulmod(u, y)) % modulus;
            y = mulmod(y, t);
            prec *= 2;
        }
        y
    };
    // current precision in digits: every entry is known modulo p^prec
    let mut prec = digits;
    let mut rank = 0;
    let mut active: Vec<usize> = (0..a.len()).collect();
    let mut active_cols: Vec<usize> = (0..nrows).collect();
    loop {
        let mut best: Option<(u32, usize, usize)> = None;
        for &i in &active {
            for &j in &active_cols {
                let v = ordp(a[i][j] % (p as u128).pow(prec));
                if v < prec && best.is_none_or(|b| v < b.0) {
                    best = Some((v, i, j));
                }
            }
        }
        let Some((v, pi, pj)) = best else {
            // what is left vanishes only modulo p^prec
            return (rank, !active.is_empty() && !active_cols.is_empty());
        };
        rank += 1;
        let pv = a[pi][pj];
        let unit = pv / (p as u128).pow(v);
        let uinv = inv_unit(unit);
        active.retain(|&i| i != pi);
        active_cols.retain(|&j| j != pj);
        for &i in &active {
            let x = a[i][pj];
            if x == 0 {
                continue;
            }
            // f = x / pv, exact to precision prec - v
            let f = mulmod(x / (p as u128).pow(v), uinv);
            for &j in &active_cols {
                let y = a[pi][j];
                if y != 0 {
                    a[i][j] = (a[i][j] + modulus - mulmod(f, y)) % modulus;
                }
            }
            a[i][pj] = 0;
        }
        prec -= v;
        if prec == 0 {
            let left = !active.is_empty() && !active_cols.is_empty();
            return (rank, left);
        }
    }
}

/// Coefficient of w^(0) in blk modulo the image of d_kappa, as a map from
/// t-degree to coefficient. One top-down sweep using
/// c w^(m) = -(t c') w^(m-1) - (m-1)(kappa-m+2) pi^2 t c w^(m-2) mod image.
pub fn reduce_to_r(kappa: &KappaValue, blk: &SymBlock) -> Result<BTreeMap<usize, PadicElem>> {
    if kappa.nonneg_int().is_some() {
        return Err(Error::domain("reduction to R needs kappa outside Z_{>=0}"));
    }
    let ctx = blk.ctx;
    let rep = kappa.representative(ctx.p());
    let kprec = kappa.precision_units(ctx);
    let pi2 = ctx.pi_pow(2);
    let m_top = blk.entries.keys().map(|k| k.1).max().unwrap_or(0);
    // by_m[m] = t-polynomial coefficient of w^(m)
    let mut by_m: Vec<BTreeMap<usize, PadicElem>> = vec![BTreeMap::new(); m_top + 1];
    for (&(n, m), &c) in &blk.entries {
        *by_m[m].entry(n).or_insert_with(|| ctx.zero()) += c;
    }
    for m in (1..=m_top).rev() {
        let poly = std::mem::take(&mut by_m[m]);
        for (n, c) in poly {
            if n > 0 {
                *by_m[m - 1].entry(n).or_insert_with(|| ctx.zero()) -= c.mul_int(n as i64);
            }
            if m >= 2 {
                let f = ctx
                    .from_bigint(&((&rep - BigInt::from(m) + 2) * BigInt::from(m - 1)))
                    .with_abs(kprec);
                *by_m[m - 2].entry(n + 1).or_insert_with(|| ctx.zero()) -= c * f * pi2;
            }
        }
    }
    let mut out = std::mem::take(&mut by_m[0]);
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

/// eta_{2m,0} with w^(2m) = eta_{2m,0} pi^(2m) t^m + L_H(...): the product
/// prod_{j=1..m} -(2j-1)(kappa-2j+2).
pub fn eta_coefficient(kappa: &KappaValue, m: u64, ctx: Ctx) -> PadicElem {
    let rep = kappa.representative(ctx.p());
    let mut acc = BigInt::one();
    for j in 1..=m {
        acc *= -(BigInt::from(2 * j - 1)) * (&rep - BigInt::from(2 * j) + 2);
    }
    ctx.from_bigint(&acc).with_abs(kappa.precision_units(ctx))
}

/// 2^(2m) (kappa/2)_m (-1/2)_m with falling Pochhammer symbols, as an
/// exact rational for integer kappa.
pub fn eta_pochhammer(kappa: i64, m: u64) -> BigRational {
    let half = |x: BigRational| x / BigInt::from(2);
    let k2 = half(BigRational::from_integer(BigInt::from(kappa)));
    let mh = half(BigRational::from_integer(BigInt::from(-1)));
    let mut acc = BigRational::from_integer(BigInt::from(4).pow(m as u32));
    for i in 0..m {
        let i = BigRational::from_integer(BigInt::from(i));
        acc *= (&k2 - &i) * (&mh - &i);
    }
    acc
}

/// Coefficient of t^j in the L_H-part decomposition of w^(2m), the term
/// that survives when the t d/dt contributions are dropped.
pub fn decompose_lh(kappa: &KappaValue, m: u64, ctx: Ctx) -> Result<SymBlock> {
    if kappa.nonneg_int().is_some() {
        return Err(Error::domain("decomposition needs kappa outside Z_{>=0}"));
    }
    let eta = eta_coefficient(kappa, m, ctx);
    Ok(SymBlock::monomial(ctx, m as usize, 0, eta * ctx.pi_pow(2 * m as u32)))
}
