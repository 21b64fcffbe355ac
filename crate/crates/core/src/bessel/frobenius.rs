//! The 2x2 Frobenius matrix on the relative cohomology of the Bessel family.
//!
//! Row 0 is the image of 1 and row 1 the image of pi t / x, each written in
//! the basis {1, pi t^q / x}:
//!   [[A1, A3], [A2, A4]].

use serde::{Deserialize, Serialize};

use super::reduce::Grid;
use super::theta::SplittingFunction;
use crate::error::{Error, Result};
use crate::padic::series::Series;
use crate::padic::{Ctx, PadicElem, PadicRecord};

/// Truncation parameters for the level-one computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobParams {
    /// Highest t-degree of the A-series.
    pub t_deg: usize,
    /// Largest |x-exponent| kept before reduction.
    pub u_max: usize,
}

impl FrobParams {
    /// Number of theta coefficients the computation reads.
    pub fn theta_len(&self, p: u32) -> usize {
        p as usize * self.u_max + self.t_deg + 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrobMatrix2 {
    pub p: u32,
    pub level: u32,
    /// q = p^level.
    pub q: u64,
    /// Stored coefficient e equals A(e) / pi^(t_scale e).
    pub t_scale: u32,
    /// entries[r][c] with r, c in {0, 1}.
    pub entries: [[Series; 2]; 2],
}

/// Weight of e(n, u) at level one: a lower bound for the valuation of the
/// corresponding coefficient of the Frobenius image, in pi-units.
pub fn level_one_weight(p: u32, n: usize, u: i64) -> i64 {
    let p = p as i64;
    let x = (p - 1) * (p - 1) * (2 * n as i64 + p * u.abs()) / (p * p);
    (x - 2).max(0)
}

/// Guaranteed precision of the scaled A-series against discarding the
/// x-exponents beyond u_max, in pi-units.
pub fn truncation_bound(p: u32, params: &FrobParams) -> u32 {
    let p = p as i64;
    let num = ((p - 1) * (p - 1) - p) * (p * (params.u_max as i64 + 1) - 2 * params.t_deg as i64);
    (num.div_euclid(p * p) - 2).max(0) as u32
}

fn shift(v: PadicElem, k: i64) -> Result<PadicElem> {
    if k >= 0 {
        Ok(v.mul_pi_pow(k as u32))
    } else {
        v.div_pi_pow((-k) as u32).map_err(|_| {
            Error::consistency("A-series coefficient below its valuation bound")
        })
    }
}

impl FrobMatrix2 {
    /// Level-one matrix, t-scaled by one pi-unit per degree.
    pub fn level_one(theta: &SplittingFunction, params: FrobParams) -> Result<FrobMatrix2> {
        let ctx = theta.ctx();
        let p = ctx.p();
        let need = params.theta_len(p);
        if theta.len() < need {
            return Err(Error::config(format!(
                "Frobenius matrix needs {need} theta coefficients, have {}",
                theta.len()
            )));
        }
        if params.u_max < 2 {
            return Err(Error::config("u_max must be at least 2"));
        }
        let (d, umax) = (params.t_deg, params.u_max);
        let pu = p as usize;
        let w = |n: usize, u: i64| level_one_weight(p, n, u);
        let prec = truncation_bound(p, &params);

        let mut rows: Vec<[Series; 2]> = Vec::with_capacity(2);
        for row in 0..2 {
            let mut grid = Grid::new(ctx, pu, d, umax);
            for n in 0..=d {
                for u in -(umax as i64)..=umax as i64 {
                    let (i, j, extra) = match (row, u >= 0) {
                        (0, true) => (pu * u as usize + n, n, 0),
                        (0, false) => (n, n + pu * u.unsigned_abs() as usize, 0),
                        (_, true) if n == 0 => continue,
                        (_, true) => (pu * u as usize + n, n - 1, 1),
                        (_, false) => (n, n + pu * u.unsigned_abs() as usize - 1, 1),
                    };
                    let e = (theta.shift(i) + theta.shift(j)) as i64 + extra - w(n, u);
                    if e < 0 {
                        return Err(Error::consistency(format!(
                            "Frobenius input at ({n},{u}) below its weight"
                        )));
                    }
                    grid.add(n, u, (theta.scaled(i) * theta.scaled(j)).mul_pi_pow(e as u32));
                }
            }
            grid.reduce(&w)?;
            let mut a = Vec::with_capacity(d + 1);
            let mut b = Vec::with_capacity(d + 1);
            for e in 0..=d {
                let ei = e as i64;
                a.push(shift(grid.get(e, 0), w(e, 0) - ei)?.with_abs(prec));
                b.push(shift(grid.get(e, -1), w(e, -1) - 1 - ei)?.with_abs(prec));
            }
            rows.push([Series::from_vec(ctx, a), Series::from_vec(ctx, b)]);
        }
        let r1 = rows.pop().unwrap();
        let r0 = rows.pop().unwrap();
        Ok(FrobMatrix2 {
            p,
            level: 1,
            q: p as u64,
            t_scale: 1,
            entries: [r0, r1],
        })
    }

    pub fn ctx(&self) -> Ctx {
        self.entries[0][0].ctx()
    }

    pub fn len(&self) -> usize {
        self.entries[0][0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// A1, A2, A3, A4 in the numbering of the constants check.
    pub fn a(&self, i: usize) -> &Series {
        match i {
            1 => &self.entries[0][0],
            2 => &self.entries[1][0],
            3 => &self.entries[0][1],
            4 => &self.entries[1][1],
            _ => panic!("A-series index {i} out of range 1..=4"),
        }
    }

    /// Coefficients of the true series, undoing the t-scaling.
    pub fn unscaled(&self) -> [[Series; 2]; 2] {
        let s = self.t_scale;
        let f = |x: &Series| x.dilate_pi(s);
        [
            [f(&self.entries[0][0]), f(&self.entries[0][1])],
            [f(&self.entries[1][0]), f(&self.entries[1][1])],
        ]
    }

    /// Level-m matrix M(t) M(t^p) ... M(t^(p^(m-1))) from the level-one
    /// matrix, returned unscaled and truncated to the same t-degree.
    pub fn level(&self, m: u32) -> Result<FrobMatrix2> {
        if self.level != 1 {
            return Err(Error::config("levels are built from the level-one matrix"));
        }
        if m == 0 {
            return Err(Error::config("level must be positive"));
        }
        let ctx = self.ctx();
        let len = self.len();
        let base = self.unscaled();
        let mut acc = base.clone();
        let mut stride = 1usize;
        for _ in 1..m {
            stride *= self.p as usize;
            let sub = |x: &Series| {
                let mut out = Series::zero(ctx, len);
                for e in 0..len {
                    if e * stride >= len {
                        break;
                    }
                    out.set(e * stride, x.coeff(e));
                }
                out
            };
            let f = [
                [sub(&base[0][0]), sub(&base[0][1])],
                [sub(&base[1][0]), sub(&base[1][1])],
            ];
            acc = mat_mul(&acc, &f);
        }
        Ok(FrobMatrix2 {
            p: self.p,
            level: m,
            q: (self.p as u64).pow(m),
            t_scale: 0,
            entries: acc,
        })
    }

    pub fn to_record(&self) -> FrobRecord {
        let rec = |s: &Series| s.coeffs().iter().map(|x| x.to_record()).collect();
        FrobRecord {
            p: self.p,
            level: self.level,
            t_scale: self.t_scale,
            a1: rec(self.a(1)),
            a2: rec(self.a(2)),
            a3: rec(self.a(3)),
            a4: rec(self.a(4)),
        }
    }

    pub fn from_record(r: &FrobRecord) -> Result<FrobMatrix2> {
        let dec = |v: &[PadicRecord]| -> Result<Vec<PadicElem>> {
            v.iter().map(PadicElem::from_record).collect()
        };
        let a = [dec(&r.a1)?, dec(&r.a2)?, dec(&r.a3)?, dec(&r.a4)?];
        let len = a[0].len();
        if len == 0 || a.iter().any(|s| s.len() != len) {
            return Err(Error::Parse("A-series of unequal or zero length".into()));
        }
        let ctx = a[0][0].ctx();
        if ctx.p() != r.p || a.iter().flatten().any(|x| x.ctx() != ctx) {
            return Err(Error::Parse("A-series context mismatch".into()));
        }
        if r.t_scale > 1 {
            return Err(Error::Parse(format!("t-scale {} is not 0 or 1", r.t_scale)));
        }
        let q = match (r.level, (r.p as u64).checked_pow(r.level)) {
            (1.., Some(q)) => q,
            _ => return Err(Error::Parse(format!("level {} out of range", r.level))),
        };
        let [a1, a2, a3, a4] = a;
        Ok(FrobMatrix2 {
            p: r.p,
            level: r.level,
            q,
            t_scale: r.t_scale,
            entries: [
                [Series::from_vec(ctx, a1), Series::from_vec(ctx, a3)],
                [Series::from_vec(ctx, a2), Series::from_vec(ctx, a4)],
            ],
        })
    }
}

/// Serializable form; coefficients are the stored (possibly t-scaled) ones.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrobRecord {
    pub p: u32,
    pub level: u32,
    pub t_scale: u32,
    pub a1: Vec<PadicRecord>,
    pub a2: Vec<PadicRecord>,
    pub a3: Vec<PadicRecord>,
    pub a4: Vec<PadicRecord>,
}

fn mat_mul(x: &[[Series; 2]; 2], y: &[[Series; 2]; 2]) -> [[Series; 2]; 2] {
    let e = |i: usize, j: usize| &(&x[i][0] * &y[0][j]) + &(&x[i][1] * &y[1][j]);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// Matrix of the connection t d/dt + pi t / x on {1, pi t / x}, obtained by
/// reducing the images of the two basis elements.
pub fn gauss_manin_matrix(ctx: Ctx) -> Result<[[Series; 2]; 2]> {
    use super::laurent::{partial_t, LaurentBlock};
    use super::reduce::reduce_to_v;
    let one = LaurentBlock::monomial(ctx, 0, 0, ctx.one());
    let w = LaurentBlock::monomial(ctx, 1, -1, ctx.pi());
    let mut out: Vec<[Series; 2]> = Vec::new();
    for blk in [one, w] {
        let mut v = reduce_to_v(&partial_t(&blk), 1)?;
        v.normalize();
        if v.den != 0 {
            return Err(Error::consistency("Gauss-Manin image is not integral"));
        }
        out.push([Series::from_vec(ctx, v.a), Series::from_vec(ctx, v.b)]);
    }
    let r1 = out.pop().unwrap();
    let r0 = out.pop().unwrap();
    Ok([r0, r1])
}

/// Residual of the transfer equation H M = t dM/dt + p M H(t^p) for the
/// unscaled level-one matrix, with H(t) = [[0, 1], [pi^2 t, 0]]. Returns the
/// smallest valuation of a residual coefficient in degrees below `upto`.
pub fn transfer_residual(frob: &FrobMatrix2, upto: usize) -> u32 {
    let ctx = frob.ctx();
    let m = frob.unscaled();
    let p = frob.p as usize;
    let pi2 = ctx.pi_pow(2);
    let mut best = ctx.cap();
    for e in 0..upto.min(frob.len()) {
        for i in 0..2 {
            for j in 0..2 {
                // (H M)[i][j]
                let hm = if i == 0 {
                    m[1][j].coeff(e)
                } else if e >= 1 {
                    pi2 * m[0][j].coeff(e - 1)
                } else {
                    ctx.zero()
                };
                // t dM/dt
                let d = m[i][j].coeff(e).mul_int(e as i64);
                // p M H(t^p): column 1 of H picks M[i][0]; column 0 picks
                // pi^2 t^p M[i][1]
                let mh = if j == 1 {
                    m[i][0].coeff(e)
                } else if e >= p {
                    pi2 * m[i][1].coeff(e - p)
                } else {
                    ctx.zero()
                };
                let r = hm - d - mh.mul_int(p as i64);
                best = best.min(r.val_units());
            }
        }
    }
    best
}
