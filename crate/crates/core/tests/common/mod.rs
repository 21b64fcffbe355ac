//! Independent oracles and property bodies shared by the integration tests
//! and the acceptance target.
#![allow(dead_code)]

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config as ProptestConfig, RngSeed, TestCaseError, TestRunner};

use klab::bessel::{d_tq, reduce_to_v, LaurentBlock, SplittingFunction};
use klab::padic::{Ctx, PadicElem};
use klab::profile::PrecisionProfile;
use klab::sym::{beta_matrix, commutation_residual, delta_q, det_one_minus, falling_factorial, KappaValue, SymSetup};

pub const SEED: u64 = 0x5eed;
pub const CASES: u32 = 128;

pub fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(SEED),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new(config(cases))
}

// ---- finite fields and Kloosterman sums over C ----

/// F_{p^m} as F_p[x]/(f), f the first monic irreducible in lexicographic
/// order. Elements are coefficient vectors.
pub struct Field {
    pub p: u64,
    pub m: usize,
    f: Vec<u64>,
}

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let db = b.len() - 1;
    let inv_lead = pow_mod(b[db], p - 2, p);
    while a.len() > db {
        let lead = a[a.len() - 1] * inv_lead % p;
        let shift = a.len() - 1 - db;
        for (i, &c) in b.iter().enumerate() {
            a[shift + i] = (a[shift + i] + p * p - lead * c % p) % p;
        }
        a.pop();
    }
    a
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn monic_polys(p: u64, d: usize) -> Vec<Vec<u64>> {
    let n = p.pow(d as u32);
    (0..n)
        .map(|mut i| {
            let mut v = Vec::with_capacity(d + 1);
            for _ in 0..d {
                v.push(i % p);
                i /= p;
            }
            v.push(1);
            v
        })
        .collect()
}

impl Field {
    pub fn new(p: u64, m: usize) -> Field {
        let f = if m == 1 {
            vec![0, 1]
        } else {
            monic_polys(p, m)
                .into_iter()
                .find(|f| {
                    (1..=m / 2).all(|d| {
                        monic_polys(p, d)
                            .iter()
                            .all(|g| poly_rem(f, g, p).iter().any(|&c| c != 0))
                    })
                })
                .expect("an irreducible polynomial exists")
        };
        Field { p, m, f }
    }

    pub fn size(&self) -> u64 {
        self.p.pow(self.m as u32)
    }

    pub fn modulus(&self) -> Vec<u32> {
        self.f.iter().map(|&c| c as u32).collect()
    }

    pub fn elem(&self, mut i: u64) -> Vec<u64> {
        (0..self.m)
            .map(|_| {
                let c = i % self.p;
                i /= self.p;
                c
            })
            .collect()
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        if self.m == 1 {
            return vec![a[0] * b[0] % self.p];
        }
        let mut prod = vec![0u64; 2 * self.m - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        let mut r = poly_rem(&prod, &self.f, self.p);
        r.resize(self.m, 0);
        r
    }

    pub fn pow(&self, a: &[u64], mut e: u64) -> Vec<u64> {
        let mut r = self.elem(1);
        let mut b = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        r
    }

    /// Absolute trace to F_p.
    pub fn trace(&self, a: &[u64]) -> u64 {
        let mut s = 0;
        let mut x = a.to_vec();
        for _ in 0..self.m {
            s = (s + x[0]) % self.p;
            x = self.pow(&x, self.p);
        }
        // x^(p^m) = x, the F_p-part of the sum of conjugates is the trace
        s
    }

    pub fn index(&self, a: &[u64]) -> usize {
        a.iter().rev().fold(0u64, |acc, &c| acc * self.p + c) as usize
    }
}

/// Kl(t) over F_{p^m} for every t in F_{p^m}^*, as real numbers (the sum
/// is real because x -> -x conjugates it).
pub fn kloosterman_table(field: &Field) -> Vec<f64> {
    let q = field.size();
    let p = field.p;
    let elems: Vec<Vec<u64>> = (0..q).map(|i| field.elem(i)).collect();
    // the trace is linear, so Tr over the basis determines it
    let basis_tr: Vec<u64> = (0..field.m)
        .map(|j| {
            let mut e = vec![0; field.m];
            e[j] = 1;
            field.trace(&e)
        })
        .collect();
    let tr = |a: &[u64]| a.iter().zip(&basis_tr).map(|(x, y)| x * y).sum::<u64>() % p;
    let inv: Vec<Vec<u64>> = elems.iter().map(|e| field.pow(e, q - 2)).collect();
    let cos: Vec<f64> = (0..p)
        .map(|j| (2.0 * std::f64::consts::PI * j as f64 / p as f64).cos())
        .collect();
    let mut out = vec![0.0; q as usize];
    for t in 1..q as usize {
        let mut s = 0.0;
        for x in 1..q as usize {
            let y = field.add(&elems[x], &field.mul(&elems[t], &inv[x]));
            s += cos[tr(&y) as usize];
        }
        out[t] = s;
    }
    out
}

/// S_k(m) = sum over t of h_k of the two fiber roots, from real
/// Kloosterman sums.
pub fn sym_power_sum_oracle(p: u64, m: usize, k: u32) -> BigInt {
    let field = Field::new(p, m);
    let q = field.size() as f64;
    let kl = kloosterman_table(&field);
    let mut total = 0.0f64;
    for &x in &kl[1..] {
        let s = -x;
        let (mut h0, mut h1) = (1.0, s);
        for _ in 1..k {
            let h2 = s * h1 - q * h0;
            h0 = h1;
            h1 = h2;
        }
        total += h1;
    }
    let r = total.round();
    assert!((total - r).abs() < 1e-3, "S_k(m) is not an integer: {total}");
    BigInt::from(r as i128)
}

/// exp(sum S_m T^m / m) over Q.
pub fn exp_oracle(s: &[BigInt]) -> Vec<BigRational> {
    let n = s.len();
    let mut c = vec![BigRational::zero(); n + 1];
    c[0] = BigRational::one();
    // m c_m = sum_{i=1}^m S_i c_{m-i}
    for m in 1..=n {
        let mut acc = BigRational::zero();
        for i in 1..=m {
            acc += BigRational::from_integer(s[i - 1].clone()) * &c[m - i];
        }
        c[m] = acc / BigRational::from_integer(BigInt::from(m));
    }
    c
}

pub fn lpoly_oracle(p: u64, k: u32, terms: usize) -> Vec<BigRational> {
    let s: Vec<BigInt> = (1..=terms).map(|m| sym_power_sum_oracle(p, m, k)).collect();
    exp_oracle(&s)
}

// ---- Omega = Q_p(pi), pi^(p-1) = -p, on coordinate vectors ----

pub fn omega_mul_oracle(p: u32, n: u32, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let d = (p - 1) as usize;
    let modulus = BigInt::from(p).pow(n);
    let mut prod = vec![BigInt::zero(); 2 * d];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] += x * y;
        }
    }
    let mut out = vec![BigInt::zero(); d];
    for (k, c) in prod.into_iter().enumerate() {
        if k < d {
            out[k] += c;
        } else {
            out[k - d] -= c * BigInt::from(p);
        }
    }
    out.into_iter()
        .map(|c| {
            let r = c % &modulus;
            if r.is_negative() {
                r + &modulus
            } else {
                r
            }
        })
        .collect()
}

pub fn omega_add_oracle(p: u32, n: u32, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let modulus = BigInt::from(p).pow(n);
    a.iter().zip(b).map(|(x, y)| (x + y) % &modulus).collect()
}

pub fn coords_strategy(p: u32, n: u32) -> impl Strategy<Value = Vec<BigInt>> {
    let m = (p as u64).pow(n);
    prop::collection::vec(0..m, (p - 1) as usize).prop_map(|v| v.into_iter().map(BigInt::from).collect())
}

pub fn prop_ring_axioms(p: u32, n: u32, a: Vec<BigInt>, b: Vec<BigInt>, c: Vec<BigInt>) -> Result<(), TestCaseError> {
    let ctx = Ctx::new(p, n).unwrap();
    let x = ctx.from_coords(&a).unwrap();
    let y = ctx.from_coords(&b).unwrap();
    let z = ctx.from_coords(&c).unwrap();
    prop_assert_eq!((x * y).to_bigints(), omega_mul_oracle(p, n, &a, &b));
    prop_assert_eq!((x + y).to_bigints(), omega_add_oracle(p, n, &a, &b));
    prop_assert_eq!((x * (y + z)).to_bigints(), ((x * y) + (x * z)).to_bigints());
    prop_assert_eq!(((x * y) * z).to_bigints(), (x * (y * z)).to_bigints());
    prop_assert_eq!((x + (-x)).to_bigints(), ctx.zero().to_bigints());
    prop_assert_eq!((x * ctx.one()).to_bigints(), x.to_bigints());
    Ok(())
}

// ---- splitting function ----

/// theta_i from exp(pi x) exp(-pi x^p) = sum pi^a/a! x^a sum (-pi)^b/b! x^(pb).
pub fn theta_oracle(ctx: Ctx, i: usize) -> PadicElem {
    let p = ctx.p() as usize;
    let mut s = ctx.zero();
    for b in 0..=i / p {
        let a = i - p * b;
        let mut term = ctx.pi_pow_over_factorial(a as u64) * ctx.pi_pow_over_factorial(b as u64);
        if b % 2 == 1 {
            term = -term;
        }
        s += term;
    }
    s
}

pub fn theta_fixture(p: u32) -> &'static SplittingFunction {
    static T5: OnceLock<SplittingFunction> = OnceLock::new();
    static T7: OnceLock<SplittingFunction> = OnceLock::new();
    let cell = if p == 5 { &T5 } else { &T7 };
    cell.get_or_init(|| SplittingFunction::compute(Ctx::new(p, 12).unwrap(), 400).unwrap())
}

/// theta_i agrees with the oracle and has valuation at least
/// (p-1)^2 i / p^2 in pi-units, that is ord_p theta_i >= (p-1) i / p^2.
pub fn prop_theta(p: u32, i: usize) -> Result<(), TestCaseError> {
    let th = theta_fixture(p);
    let c = th.coeff(i);
    let want = theta_oracle(th.ctx(), i);
    prop_assert_eq!(c, want, "theta_{} disagrees with the oracle", i);
    let bound = ((p as u64 - 1).pow(2) * i as u64 / (p as u64 * p as u64)) as u32;
    prop_assert_eq!(th.shift(i), bound);
    if !c.is_zero() {
        prop_assert!(c.val_units() >= bound.min(c.abs_precision()), "theta_{} valuation {} < {}", i, c.val_units(), bound);
    }
    Ok(())
}

// ---- reduction ----

pub type Terms = Vec<(u64, i64, i64)>;

/// Random small blocks of K_q: (t-exponent above the K_q floor, x-exponent,
/// integer coefficient).
pub fn block_strategy() -> impl Strategy<Value = Terms> {
    prop::collection::vec((0u64..4, -3i64..=3, -20i64..=20), 1..6)
}

pub fn make_block(ctx: Ctx, q: u64, terms: &Terms) -> LaurentBlock {
    let mut b = LaurentBlock::zero(ctx);
    for &(e, u, c) in terms {
        b.add_term(e + q * (-u).max(0) as u64, u, ctx.int(c));
    }
    b
}

/// reduce is a projection onto a + b pi t^q / x and kills D_{t^q}.
pub fn prop_reduce_projection(q: u64, terms: Terms, a: Vec<i64>, b: Vec<i64>) -> Result<(), TestCaseError> {
    let ctx = Ctx::new(5, 12).unwrap();
    let g = make_block(ctx, q, &terms);
    let r = reduce_to_v(&d_tq(&g, q), q).map_err(|e| TestCaseError::fail(e.to_string()))?;
    for x in r.a.iter().chain(&r.b) {
        prop_assert!(x.is_zero(), "D(g) did not reduce to zero: {:?}", r);
    }
    let mut v = LaurentBlock::zero(ctx);
    for (n, &c) in a.iter().enumerate() {
        v.add_term(n as u64, 0, ctx.int(c));
    }
    for (n, &c) in b.iter().enumerate() {
        v.add_term(n as u64 + q, -1, ctx.pi() * ctx.int(c));
    }
    let r = reduce_to_v(&v, q).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(r.den, 0);
    for (n, &c) in a.iter().enumerate() {
        prop_assert_eq!(r.a_coeff(n).unwrap_or(ctx.zero()), ctx.int(c));
    }
    for (n, &c) in b.iter().enumerate() {
        prop_assert_eq!(r.b_coeff(n).unwrap_or(ctx.zero()), ctx.int(c));
    }
    Ok(())
}

// ---- symmetric powers ----

pub fn small_profile() -> PrecisionProfile {
    PrecisionProfile {
        p: 5,
        a: 1,
        n_padic: 12,
        n_t: 6,
        m_w: 10,
        m_t: 3,
        target_digits: 4,
        u_x: 30,
    }
}

pub fn small_setup() -> &'static SymSetup {
    static S: OnceLock<SymSetup> = OnceLock::new();
    S.get_or_init(|| SymSetup::new(&small_profile()).unwrap())
}

pub fn kappa_strategy() -> impl Strategy<Value = KappaValue> {
    prop_oneof![
        (-40i64..40).prop_map(KappaValue::Int),
        prop::collection::vec(0u32..5, 1..12).prop_map(|digits| KappaValue::Padic { digits }),
    ]
}

pub fn prop_commutation(kappa: KappaValue) -> Result<(), TestCaseError> {
    let setup = small_setup();
    let beta = beta_matrix(&kappa, &setup.frob, &setup.prof).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let cr = commutation_residual(&beta);
    prop_assert!(cr.entries_checked > 0);
    prop_assert_eq!(cr.nonzero, 0, "kappa = {}", kappa);
    Ok(())
}

/// Sum of principal k-minors of an integer matrix, by Bareiss elimination on
/// each subset.
pub fn principal_minor_sum(a: &[Vec<i64>], k: usize) -> BigInt {
    let n = a.len();
    let mut total = BigInt::zero();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let mut m: Vec<Vec<BigRational>> = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| BigRational::from_integer(a[i][j].into())).collect())
            .collect();
        let mut det = BigRational::one();
        for c in 0..k {
            let Some(r) = (c..k).find(|&r| !m[r][c].is_zero()) else {
                det = BigRational::zero();
                break;
            };
            if r != c {
                m.swap(r, c);
                det = -det;
            }
            det *= &m[c][c];
            for r in c + 1..k {
                let f = &m[r][c] / &m[c][c];
                for j in c..k {
                    let v = &f * &m[c][j];
                    m[r][j] -= v;
                }
            }
        }
        total += det.to_integer();
    }
    total
}

pub fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..6).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-30i64..30, n), n))
}

/// det(1 - A T) against principal minors, and D(T) = L(T) D(qT) for
/// L = delta_q(D).
pub fn prop_fredholm_delta(a: Vec<Vec<i64>>) -> Result<(), TestCaseError> {
    let ctx = Ctx::new(5, 20).unwrap();
    let n = a.len();
    let rows: Vec<Vec<PadicElem>> = a.iter().map(|r| r.iter().map(|&x| ctx.int(x)).collect()).collect();
    let d = det_one_minus(ctx, &rows, n).map_err(|e| TestCaseError::fail(e.to_string()))?;
    for (k, dk) in d.iter().enumerate() {
        let mut e = principal_minor_sum(&a, k);
        if k % 2 == 1 {
            e = -e;
        }
        prop_assert_eq!(*dk, ctx.from_bigint(&e), "coefficient {}", k);
    }
    let q = 5u64;
    let l = delta_q(&d, q).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let qe = ctx.int(q as i64);
    for k in 0..d.len() {
        let mut acc = ctx.zero();
        let mut qi = ctx.one();
        for i in 0..=k {
            acc += l[k - i] * d[i] * qi;
            qi *= qe;
        }
        prop_assert_eq!(acc, d[k], "delta_q consistency at {}", k);
    }
    Ok(())
}

/// kappa^(m+1) = kappa^(m) (kappa - m), with the zero factor skipped for
/// kappa = k >= 0 at m = k.
pub fn prop_falling(kappa: i64, m: u64) -> Result<(), TestCaseError> {
    let ctx = Ctx::new(5, 20).unwrap();
    let kv = KappaValue::Int(kappa);
    let f0 = falling_factorial(&kv, m, ctx);
    let f1 = falling_factorial(&kv, m + 1, ctx);
    if kappa >= 0 && m as i64 == kappa {
        prop_assert_eq!(f1, f0);
    } else {
        prop_assert_eq!(f1, f0 * ctx.int(kappa - m as i64));
    }
    // direct product oracle
    let mut prod = BigInt::one();
    for i in 0..m {
        let f = BigInt::from(kappa - i as i64);
        if !f.is_zero() {
            prod *= f;
        }
    }
    prop_assert_eq!(f0, ctx.from_bigint(&prod));
    Ok(())
}

/// Integer value of a rational known to be integral.
pub fn to_int(r: &BigRational) -> Option<BigInt> {
    r.is_integer().then(|| r.to_integer())
}

pub fn as_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("fits in i64")
}
