use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{check_prime, max_storage_precision, ord_p_factorial, MAX_COORDS};
use crate::error::{Error, Result};

/// Arithmetic context: the prime and the storage precision N (coordinates
/// live modulo p^N).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ctx {
    p: u32,
    n: u32,
    modulus: u64,
}

impl Ctx {
    pub fn new(p: u32, n: u32) -> Result<Ctx> {
        check_prime(p)?;
        let max = max_storage_precision(p);
        if n == 0 || n > max {
            return Err(Error::config(format!(
                "storage precision N = {n} out of range 1..={max} for p = {p}"
            )));
        }
        Ok(Ctx {
            p,
            n,
            modulus: (p as u64).pow(n),
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Number of coordinates, p - 1.
    pub fn degree(&self) -> usize {
        (self.p - 1) as usize
    }

    /// Largest representable absolute precision in pi-units.
    pub fn cap(&self) -> u32 {
        (self.p - 1) * self.n
    }

    pub fn zero(&self) -> PadicElem {
        PadicElem {
            ctx: *self,
            abs: self.cap(),
            c: [0; MAX_COORDS],
        }
    }

    pub fn one(&self) -> PadicElem {
        self.int(1)
    }

    pub fn int(&self, v: i64) -> PadicElem {
        let mut e = self.zero();
        e.c[0] = self.reduce_i128(v as i128);
        e
    }

    pub fn from_bigint(&self, v: &BigInt) -> PadicElem {
        let mut e = self.zero();
        e.c[0] = self.residue(v);
        e
    }

    /// Element with the given coordinates in the basis 1, pi, ..., pi^(p-2).
    pub fn from_coords(&self, coords: &[BigInt]) -> Result<PadicElem> {
        if coords.len() != self.degree() {
            return Err(Error::config(format!(
                "expected {} coordinates, got {}",
                self.degree(),
                coords.len()
            )));
        }
        let mut e = self.zero();
        for (j, c) in coords.iter().enumerate() {
            e.c[j] = self.residue(c);
        }
        Ok(e)
    }

    pub fn pi(&self) -> PadicElem {
        self.pi_pow(1)
    }

    pub fn pi_pow(&self, k: u32) -> PadicElem {
        self.one().mul_pi_pow(k)
    }

    /// pi^l / l!, which is integral in Omega. Computed exactly: with
    /// l! = p^v u, pi^l / l! = (-1)^v pi^(l - v(p-1)) / u.
    pub fn pi_pow_over_factorial(&self, l: u64) -> PadicElem {
        let p = self.p as u64;
        let v = ord_p_factorial(l, p);
        let mut u: u64 = 1;
        for i in 1..=l {
            let mut x = i;
            while x % p == 0 {
                x /= p;
            }
            u = self.mulmod(u, x % self.modulus);
        }
        let uinv = self.inv_mod(u).expect("factorial unit part is a unit");
        let mut e = self.zero();
        e.c[0] = uinv;
        if v % 2 == 1 {
            e = -e;
        }
        e.mul_pi_pow((l - v * (p - 1)) as u32)
    }

    /// v mod p^N in [0, p^N).
    pub fn residue(&self, v: &BigInt) -> u64 {
        let m = BigInt::from(self.modulus);
        v.mod_floor(&m).to_u64().expect("residue below modulus")
    }

    pub(crate) fn reduce_i128(&self, v: i128) -> u64 {
        v.rem_euclid(self.modulus as i128) as u64
    }

    pub(crate) fn mulmod(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    /// Inverse of an integer unit modulo p^N.
    pub fn inv_mod(&self, u: u64) -> Result<u64> {
        let m = self.modulus as i128;
        let (mut r0, mut r1) = (m, (u as i128).rem_euclid(m));
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        if r0 != 1 {
            return Err(Error::NonUnit(format!("{u} is divisible by {}", self.p)));
        }
        Ok(s0.rem_euclid(m) as u64)
    }
}

/// Valuation in units of 1/(p-1); `units == None` is +infinity. A value
/// reached at the precision horizon is only a lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Valuation {
    pub units: Option<u64>,
    pub den: u32,
    pub lower_bound: bool,
}

impl Valuation {
    pub fn exact(units: u64, den: u32) -> Self {
        Valuation {
            units: Some(units),
            den,
            lower_bound: false,
        }
    }

    pub fn at_least(units: u64, den: u32) -> Self {
        Valuation {
            units: Some(units),
            den,
            lower_bound: true,
        }
    }

    pub fn infinite(den: u32) -> Self {
        Valuation {
            units: None,
            den,
            lower_bound: false,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.units.is_none()
    }

    pub fn as_f64(&self) -> f64 {
        match self.units {
            Some(u) => u as f64 / self.den as f64,
            None => f64::INFINITY,
        }
    }

    /// Value as units, with +infinity mapped to u64::MAX.
    pub fn units_or_max(&self) -> u64 {
        self.units.unwrap_or(u64::MAX)
    }

    pub fn add(&self, other: &Valuation) -> Valuation {
        assert_eq!(self.den, other.den, "valuation denominators differ");
        match (self.units, other.units) {
            (Some(a), Some(b)) => Valuation {
                units: Some(a + b),
                den: self.den,
                lower_bound: self.lower_bound || other.lower_bound,
            },
            _ => Valuation::infinite(self.den),
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        if self.den != other.den {
            return None;
        }
        Some(self.units_or_max().cmp(&other.units_or_max()))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.units {
            None => write!(f, "+inf"),
            Some(u) => {
                if self.lower_bound {
                    write!(f, ">=")?;
                }
                write!(f, "{}/{}", u, self.den)
            }
        }
    }
}

/// Element of Omega with absolute precision `abs` (known modulo pi^abs).
#[derive(Clone, Copy)]
pub struct PadicElem {
    ctx: Ctx,
    abs: u32,
    c: [u64; MAX_COORDS],
}

impl PadicElem {
    pub fn ctx(&self) -> Ctx {
        self.ctx
    }

    pub fn p(&self) -> u32 {
        self.ctx.p
    }

    /// Absolute precision in pi-units.
    pub fn abs_precision(&self) -> u32 {
        self.abs
    }

    /// Absolute precision in whole p-adic digits.
    pub fn precision_digits(&self) -> u32 {
        self.abs / (self.ctx.p - 1)
    }

    pub fn coords(&self) -> &[u64] {
        &self.c[..self.ctx.degree()]
    }

    /// Lowers the absolute precision to at most `abs` pi-units.
    pub fn with_abs(mut self, abs: u32) -> Self {
        self.abs = self.abs.min(abs);
        self
    }

    /// Number of p-adic digits of coordinate j covered by the precision.
    fn known_digits(&self, j: usize) -> u32 {
        let k = self.ctx.p - 1;
        let j = j as u32;
        if self.abs <= j {
            0
        } else {
            (self.abs - j).div_ceil(k).min(self.ctx.n)
        }
    }

    /// Coordinates reduced to their known digits.
    pub fn canonical_coords(&self) -> Vec<u64> {
        (0..self.ctx.degree())
            .map(|j| {
                let d = self.known_digits(j);
                if d >= self.ctx.n {
                    self.c[j]
                } else {
                    self.c[j] % (self.ctx.p as u64).pow(d)
                }
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.canonical_coords().iter().all(|&c| c == 0)
    }

    /// Residue of the element in F_p (coordinate 0 mod p); meaningful for
    /// integral elements.
    pub fn residue_mod_p(&self) -> u64 {
        self.c[0] % self.ctx.p as u64
    }

    pub fn is_unit(&self) -> bool {
        self.abs >= 1 && self.residue_mod_p() != 0
    }

    pub fn valuation(&self) -> Valuation {
        let k = self.ctx.p - 1;
        if self.c[..self.ctx.degree()].iter().all(|&c| c == 0) && self.abs == self.ctx.cap() {
            return Valuation::infinite(k);
        }
        let p = self.ctx.p as u64;
        let mut best = self.abs as u64;
        for (j, c) in self.canonical_coords().into_iter().enumerate() {
            if c == 0 {
                continue;
            }
            let v = super::ord_p_u64(c, p) as u64 * k as u64 + j as u64;
            best = best.min(v);
        }
        if best >= self.abs as u64 {
            Valuation::at_least(self.abs as u64, k)
        } else {
            Valuation::exact(best, k)
        }
    }

    /// Valuation in pi-units, clamped at the precision horizon.
    pub fn val_units(&self) -> u32 {
        self.valuation().units.map_or(self.abs, |u| u.min(self.abs as u64) as u32)
    }

    pub fn mul_int(&self, v: i64) -> PadicElem {
        let m = self.ctx.reduce_i128(v as i128);
        let mut out = *self;
        for j in 0..self.ctx.degree() {
            out.c[j] = self.ctx.mulmod(self.c[j], m);
        }
        out
    }

    pub fn mul_pi(&self) -> PadicElem {
        let k = self.ctx.degree();
        let ctx = self.ctx;
        let mut out = *self;
        let top = self.c[k - 1];
        for j in (1..k).rev() {
            out.c[j] = self.c[j - 1];
        }
        out.c[0] = ctx.reduce_i128(-((top as u128 * ctx.p as u128 % ctx.modulus as u128) as i128));
        out.abs = (self.abs + 1).min(ctx.cap());
        out
    }

    pub fn mul_pi_pow(&self, k: u32) -> PadicElem {
        let deg = self.ctx.p - 1;
        let (s, r) = (k / deg, k % deg);
        let mut out = *self;
        if s > 0 {
            let ps = if s >= self.ctx.n {
                0
            } else {
                (self.ctx.p as u64).pow(s)
            };
            let f = if s % 2 == 1 {
                self.ctx.reduce_i128(-(ps as i128))
            } else {
                ps
            };
            for j in 0..self.ctx.degree() {
                out.c[j] = self.ctx.mulmod(out.c[j], f);
            }
            out.abs = (self.abs.saturating_add(s * deg)).min(self.ctx.cap());
        }
        for _ in 0..r {
            out = out.mul_pi();
        }
        out
    }

    /// Exact division by pi; fails when the known part is not divisible.
    pub fn div_pi(&self) -> Result<PadicElem> {
        let ctx = self.ctx;
        let p = ctx.p as u64;
        if self.abs >= 1 && !self.c[0].is_multiple_of(p) {
            return Err(Error::domain(format!("{self:?} is not divisible by pi")));
        }
        let k = ctx.degree();
        let mut out = *self;
        for j in 0..k - 1 {
            out.c[j] = self.c[j + 1];
        }
        out.c[k - 1] = ctx.reduce_i128(-((self.c[0] / p) as i128));
        out.abs = self.abs.saturating_sub(1);
        Ok(out)
    }

    pub fn div_pi_pow(&self, k: u32) -> Result<PadicElem> {
        let mut out = *self;
        for _ in 0..k {
            out = out.div_pi()?;
        }
        Ok(out)
    }

    pub fn pow(&self, mut e: u64) -> PadicElem {
        let mut base = *self;
        let mut acc = self.ctx.one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        acc
    }

    /// Multiplicative inverse of a unit (valuation 0) by Newton iteration.
    pub fn invert_unit(&self) -> Result<PadicElem> {
        if !self.is_unit() {
            return Err(Error::NonUnit(format!(
                "{self:?} has positive valuation or no known digits"
            )));
        }
        let ctx = self.ctx;
        let seed = ctx.inv_mod(self.c[0] % ctx.p as u64)?;
        let mut y = ctx.int(seed as i64);
        let two = ctx.int(2);
        let mut reach = 1u32;
        while reach < ctx.cap() {
            y = y * (two - *self * y);
            reach *= 2;
        }
        Ok(y.with_abs(self.abs))
    }

    /// Reduces storage to a smaller precision N' (coordinates mod p^N').
    pub fn reduce_storage(&self, n: u32) -> Result<PadicElem> {
        let ctx = Ctx::new(self.ctx.p, n.min(self.ctx.n))?;
        let mut out = ctx.zero();
        for j in 0..ctx.degree() {
            out.c[j] = self.c[j] % ctx.modulus;
        }
        out.abs = self.abs.min(ctx.cap());
        Ok(out)
    }

    /// Re-embeds into a context with the same prime and possibly larger
    /// storage; precision is unchanged.
    pub fn lift_storage(&self, ctx: Ctx) -> PadicElem {
        assert_eq!(ctx.p, self.ctx.p);
        let mut out = ctx.zero();
        for j in 0..ctx.degree() {
            out.c[j] = self.c[j] % ctx.modulus;
        }
        out.abs = self.abs.min(ctx.cap());
        out
    }

    pub fn to_bigints(&self) -> Vec<BigInt> {
        self.canonical_coords().into_iter().map(BigInt::from).collect()
    }

    /// Rational integer value when the element lies in Z_p, as the
    /// symmetric residue modulo the known digits of coordinate 0.
    pub fn to_integer_symmetric(&self) -> Option<BigInt> {
        let cc = self.canonical_coords();
        if cc[1..].iter().any(|&c| c != 0) {
            return None;
        }
        let d = self.known_digits(0);
        let m = BigInt::from(self.ctx.p).pow(d);
        let mut v = BigInt::from(cc[0]);
        if v.clone() * 2 > m {
            v -= m;
        }
        Some(v)
    }

    pub fn to_record(&self) -> PadicRecord {
        PadicRecord {
            p: self.ctx.p,
            n: self.ctx.n,
            abs: self.abs,
            coeffs: self.canonical_coords().iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn from_record(rec: &PadicRecord) -> Result<PadicElem> {
        let ctx = Ctx::new(rec.p, rec.n)?;
        if rec.coeffs.len() != ctx.degree() {
            return Err(Error::Parse(format!(
                "expected {} coordinates, got {}",
                ctx.degree(),
                rec.coeffs.len()
            )));
        }
        if rec.abs > ctx.cap() {
            return Err(Error::Parse(format!(
                "precision {} exceeds storage capacity {}",
                rec.abs,
                ctx.cap()
            )));
        }
        let mut e = ctx.zero();
        for (j, s) in rec.coeffs.iter().enumerate() {
            let v: u64 = s
                .parse()
                .map_err(|_| Error::Parse(format!("coordinate {j}: not a decimal integer: {s:?}")))?;
            if v >= ctx.modulus {
                return Err(Error::Parse(format!("coordinate {j} exceeds p^N")));
            }
            e.c[j] = v;
        }
        e.abs = rec.abs;
        Ok(e)
    }
}

/// JSON form of a [`PadicElem`]: coordinates as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicRecord {
    pub p: u32,
    #[serde(rename = "N")]
    pub n: u32,
    pub abs: u32,
    pub coeffs: Vec<String>,
}

impl PartialEq for PadicElem {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.p == other.ctx.p && (*self - *other).is_zero()
    }
}

impl fmt::Debug for PadicElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cc = self.canonical_coords();
        let mut first = true;
        for (j, c) in cc.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*pi")?,
                _ => write!(f, "{c}*pi^{j}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(pi^{})", self.abs)
    }
}

impl fmt::Display for PadicElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Add for PadicElem {
    type Output = PadicElem;
    fn add(self, rhs: PadicElem) -> PadicElem {
        debug_assert_eq!(self.ctx, rhs.ctx, "mixed contexts");
        let m = self.ctx.modulus;
        let mut out = self;
        for j in 0..self.ctx.degree() {
            let s = self.c[j] + rhs.c[j];
            out.c[j] = if s >= m { s - m } else { s };
        }
        out.abs = self.abs.min(rhs.abs);
        out
    }
}

impl Sub for PadicElem {
    type Output = PadicElem;
    fn sub(self, rhs: PadicElem) -> PadicElem {
        debug_assert_eq!(self.ctx, rhs.ctx, "mixed contexts");
        let m = self.ctx.modulus;
        let mut out = self;
        for j in 0..self.ctx.degree() {
            out.c[j] = if self.c[j] >= rhs.c[j] {
                self.c[j] - rhs.c[j]
            } else {
                self.c[j] + m - rhs.c[j]
            };
        }
        out.abs = self.abs.min(rhs.abs);
        out
    }
}

impl Neg for PadicElem {
    type Output = PadicElem;
    fn neg(self) -> PadicElem {
        let m = self.ctx.modulus;
        let mut out = self;
        for j in 0..self.ctx.degree() {
            out.c[j] = if self.c[j] == 0 { 0 } else { m - self.c[j] };
        }
        out
    }
}

impl Mul for PadicElem {
    type Output = PadicElem;
    fn mul(self, rhs: PadicElem) -> PadicElem {
        debug_assert_eq!(self.ctx, rhs.ctx, "mixed contexts");
        let k = self.ctx.degree();
        let m = self.ctx.modulus as u128;
        // Each accumulator sums at most k < 16 products below 2^124.
        let mut lo = [0u128; MAX_COORDS];
        let mut hi = [0u128; MAX_COORDS];
        for i in 0..k {
            let a = self.c[i] as u128;
            if a == 0 {
                continue;
            }
            for j in 0..k {
                let prod = a * rhs.c[j] as u128;
                let s = i + j;
                if s < k {
                    lo[s] += prod;
                } else {
                    hi[s - k] += prod;
                }
            }
        }
        let mut out = self;
        let p = self.ctx.p as u128;
        for s in 0..k {
            let l = lo[s] % m;
            let h = (hi[s] % m) * p % m;
            out.c[s] = ((l + m - h) % m) as u64;
        }
        out.abs = self.abs.min(rhs.abs);
        out
    }
}

impl AddAssign for PadicElem {
    fn add_assign(&mut self, rhs: PadicElem) {
        *self = *self + rhs;
    }
}

impl SubAssign for PadicElem {
    fn sub_assign(&mut self, rhs: PadicElem) {
        *self = *self - rhs;
    }
}

impl MulAssign for PadicElem {
    fn mul_assign(&mut self, rhs: PadicElem) {
        *self = *self * rhs;
    }
}

/// Product in Omega; elements of different primes are a configuration
/// error, and differing storage precisions multiply at the smaller one.
pub fn omega_mul(x: &PadicElem, y: &PadicElem) -> Result<PadicElem> {
    if x.ctx.p != y.ctx.p {
        return Err(Error::config(format!(
            "cannot multiply elements over p = {} and p = {}",
            x.ctx.p, y.ctx.p
        )));
    }
    if x.ctx.n == y.ctx.n {
        return Ok(*x * *y);
    }
    let n = x.ctx.n.min(y.ctx.n);
    Ok(x.reduce_storage(n)? * y.reduce_storage(n)?)
}

/// Teichmuller lift of a nonzero residue c in F_p: the (p-1)-st root of
/// unity congruent to c, found as the fixed point of x -> x^p.
pub fn teichmuller(ctx: Ctx, c: u64) -> Result<PadicElem> {
    let p = ctx.p as u64;
    let c = c % p;
    if c == 0 {
        return Err(Error::domain("Teichmuller lift of 0 is undefined"));
    }
    let mut x = ctx.int(c as i64);
    for _ in 0..=ctx.n + 1 {
        let y = x.pow(p);
        if y.c[0] == x.c[0] {
            return Ok(y);
        }
        x = y;
    }
    Ok(x)
}

/// Unit root of X^2 - sX + c for a unit s and c of positive valuation,
/// by Newton iteration seeded at s. The other root is c / root.
pub fn hensel_quadratic_unit_root(s: &PadicElem, c: &PadicElem) -> Result<PadicElem> {
    if !s.is_unit() {
        return Err(Error::NonUnit(format!(
            "X^2 - sX + c has no unit root when s = {s:?} is not a unit"
        )));
    }
    if c.abs >= 1 && c.residue_mod_p() != 0 {
        return Err(Error::domain(format!(
            "constant term {c:?} must have positive valuation"
        )));
    }
    let mut x = *s;
    let cap = s.abs.min(c.abs);
    for _ in 0..2 * (64 - (cap as u64).leading_zeros()) + 4 {
        let f = x * x - *s * x + *c;
        if f.is_zero() {
            break;
        }
        let d = (x + x - *s).invert_unit()?;
        x -= f * d;
    }
    let f = x * x - *s * x + *c;
    if !f.is_zero() {
        return Err(Error::consistency("Newton iteration for the unit root did not converge"));
    }
    Ok(x)
}
