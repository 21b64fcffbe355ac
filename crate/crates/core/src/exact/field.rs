//! Finite fields F_{p^d} = F_p[x]/(f) with table-driven arithmetic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::padic::is_prime;

/// Largest field size for which log/exp tables are built.
pub const MAX_FIELD_SIZE: u64 = 1 << 22;

/// Field elements are encoded as integers sum c_i p^i, where c_i are the
/// coordinates in the basis 1, x, ..., x^(d-1).
pub type FqElem = u32;

#[derive(Clone, Debug)]
pub struct FqField {
    p: u32,
    d: u32,
    size: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    trace: Vec<u32>,
}

impl FqField {
    /// F_{p^d} with a modulus found by seeded random search.
    pub fn new(p: u32, d: u32, seed: u64) -> Result<FqField> {
        check_size(p, d)?;
        if d == 1 {
            return FqField::with_modulus(p, &[0, 1]);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((p as u64) << 32) ^ d as u64);
        for _ in 0..100_000 {
            let mut f: Vec<u32> = (0..d).map(|_| rng.gen_range(0..p)).collect();
            f.push(1);
            if f[0] != 0 && is_irreducible(&f, p) {
                return FqField::with_modulus(p, &f);
            }
        }
        Err(Error::consistency(format!(
            "no irreducible polynomial of degree {d} over F_{p} found"
        )))
    }

    /// F_p[x]/(f) for a monic f given low degree first.
    pub fn with_modulus(p: u32, f: &[u32]) -> Result<FqField> {
        if f.len() < 2 {
            return Err(Error::config("modulus must have degree at least 1"));
        }
        let d = (f.len() - 1) as u32;
        check_size(p, d)?;
        if f.iter().any(|&c| c >= p) || *f.last().unwrap() != 1 {
            return Err(Error::config("modulus must be monic with coefficients below p"));
        }
        if !is_irreducible(f, p) {
            return Err(Error::config(format!("modulus {f:?} is reducible over F_{p}")));
        }
        let size = p.pow(d);
        let mut field = FqField {
            p,
            d,
            size,
            modulus: f.to_vec(),
            exp: Vec::new(),
            log: Vec::new(),
            trace: Vec::new(),
        };
        field.build_tables()?;
        Ok(field)
    }

    fn build_tables(&mut self) -> Result<()> {
        let n = (self.size - 1) as usize;
        let order_primes = prime_factors((self.size - 1) as u64);
        let mut gen = None;
        for g in 1..self.size {
            if order_primes
                .iter()
                .all(|&r| self.slow_pow(g, (self.size as u64 - 1) / r) != 1)
            {
                gen = Some(g);
                break;
            }
        }
        let g = gen.ok_or_else(|| Error::consistency("no primitive element found"))?;
        self.exp = Vec::with_capacity(n);
        self.log = vec![0; self.size as usize];
        let mut x = 1;
        for i in 0..n {
            self.exp.push(x);
            self.log[x as usize] = i as u32;
            x = self.slow_mul(x, g);
        }
        if x != 1 {
            return Err(Error::consistency("generator order mismatch"));
        }
        self.trace = (0..self.size).map(|a| self.trace_direct(a)).collect();
        Ok(())
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn digits(&self, a: FqElem) -> Vec<u32> {
        let mut a = a;
        (0..self.d)
            .map(|_| {
                let c = a % self.p;
                a /= self.p;
                c
            })
            .collect()
    }

    pub fn from_digits(&self, c: &[u32]) -> FqElem {
        c.iter().rev().fold(0, |acc, &x| acc * self.p + x % self.p)
    }

    /// Residue class of the polynomial variable x.
    pub fn x(&self) -> FqElem {
        if self.d == 1 {
            // x = -f_0 in F_p[x]/(x + f_0)
            (self.p - self.modulus[0]) % self.p
        } else {
            self.p
        }
    }

    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.d {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, a: FqElem) -> FqElem {
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.d {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.size - 1;
        let e = (self.log[a as usize] + self.log[b as usize]) % n;
        self.exp[e as usize]
    }

    pub fn inv(&self, a: FqElem) -> Result<FqElem> {
        if a == 0 {
            return Err(Error::domain("zero has no inverse"));
        }
        let n = self.size - 1;
        Ok(self.exp[((n - self.log[a as usize]) % n) as usize])
    }

    pub fn div(&self, a: FqElem, b: FqElem) -> Result<FqElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FqElem, e: u64) -> FqElem {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let n = (self.size - 1) as u64;
        self.exp[((self.log[a as usize] as u64 * (e % n)) % n) as usize]
    }

    /// Discrete logarithm to the table generator.
    pub fn log(&self, a: FqElem) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    pub fn exp(&self, i: u64) -> FqElem {
        self.exp[(i % (self.size as u64 - 1)) as usize]
    }

    pub fn frobenius(&self, a: FqElem) -> FqElem {
        self.pow(a, self.p as u64)
    }

    /// Absolute trace to F_p, from the precomputed table.
    pub fn trace(&self, a: FqElem) -> u32 {
        self.trace[a as usize]
    }

    /// Absolute trace as sum of a^(p^i), evaluated by polynomial arithmetic.
    pub fn trace_direct(&self, a: FqElem) -> u32 {
        let mut acc = 0;
        let mut x = a;
        for _ in 0..self.d {
            acc = self.add(acc, x);
            x = self.slow_pow(x, self.p as u64);
        }
        debug_assert!(acc < self.p, "trace must lie in the prime field");
        acc
    }

    /// Nonzero elements in encoding order.
    pub fn units(&self) -> impl Iterator<Item = FqElem> {
        1..self.size
    }

    /// Smallest nonnegative integer representative of an element of F_p.
    pub fn prime_field_value(&self, a: FqElem) -> Option<u32> {
        (a < self.p).then_some(a)
    }

    /// Degree of a over F_p: the size of its Frobenius orbit.
    pub fn element_degree(&self, a: FqElem) -> u32 {
        let mut x = self.frobenius(a);
        let mut deg = 1;
        while x != a {
            x = self.frobenius(x);
            deg += 1;
        }
        deg
    }

    /// Embedding of `self` into a larger field whose degree is a multiple
    /// of ours, by finding a root of our modulus. Returns the image table.
    pub fn embed_into(&self, big: &FqField) -> Result<Vec<FqElem>> {
        if big.p != self.p || !big.d.is_multiple_of(self.d) {
            return Err(Error::config(format!(
                "F_{}^{} does not embed in F_{}^{}",
                self.p, self.d, big.p, big.d
            )));
        }
        let root = (0..big.size)
            .find(|&r| {
                let mut acc = 0;
                for &c in self.modulus.iter().rev() {
                    acc = big.add(big.mul(acc, r), c);
                }
                acc == 0
            })
            .ok_or_else(|| Error::consistency("modulus has no root in the extension"))?;
        Ok((0..self.size)
            .map(|a| {
                let digits = self.digits(a);
                let mut acc = 0;
                for &c in digits.iter().rev() {
                    acc = big.add(big.mul(acc, root), c);
                }
                acc
            })
            .collect())
    }

    fn slow_mul(&self, a: FqElem, b: FqElem) -> FqElem {
        let prod = poly_mul(&self.digits(a), &self.digits(b), self.p);
        let r = poly_rem(&prod, &self.modulus, self.p);
        self.from_digits(&r)
    }

    fn slow_pow(&self, a: FqElem, mut e: u64) -> FqElem {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.slow_mul(acc, base);
            }
            base = self.slow_mul(base, base);
            e >>= 1;
        }
        acc
    }
}

fn check_size(p: u32, d: u32) -> Result<()> {
    if !is_prime(p as u64) {
        return Err(Error::config(format!("p = {p} is not prime")));
    }
    if d == 0 {
        return Err(Error::config("field degree must be positive"));
    }
    let size = (p as u64).checked_pow(d).unwrap_or(u64::MAX);
    if size > MAX_FIELD_SIZE {
        return Err(Error::config(format!(
            "F_{p}^{d} has {size} elements, above the table limit {MAX_FIELD_SIZE}"
        )));
    }
    Ok(())
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x as u64 * y as u64;
        }
    }
    trim(out.into_iter().map(|c| (c % p as u64) as u32).collect())
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

fn poly_rem(a: &[u32], f: &[u32], p: u32) -> Vec<u32> {
    let mut r = trim(a.to_vec());
    let f = trim(f.to_vec());
    let df = f.len() - 1;
    let lead_inv = inv_mod_p(f[df], p);
    while r.len() > df {
        let shift = r.len() - 1 - df;
        let c = (*r.last().unwrap() as u64 * lead_inv as u64 % p as u64) as u32;
        for (i, &fc) in f.iter().enumerate() {
            let sub = (c as u64 * fc as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        r = trim(r);
    }
    r
}

fn poly_sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect(),
    )
}

fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// x^(p^e) mod f.
fn frob_power_of_x(f: &[u32], p: u32, e: u32) -> Vec<u32> {
    let mut x = poly_rem(&[0, 1], f, p);
    for _ in 0..e {
        // x <- x^p by repeated squaring
        let mut acc = vec![1];
        let mut base = x.clone();
        let mut k = p;
        while k > 0 {
            if k & 1 == 1 {
                acc = poly_rem(&poly_mul(&acc, &base, p), f, p);
            }
            base = poly_rem(&poly_mul(&base, &base, p), f, p);
            k >>= 1;
        }
        x = acc;
    }
    x
}

/// Rabin irreducibility test for a monic f over F_p.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let f = trim(f.to_vec());
    if f.len() < 2 {
        return false;
    }
    let d = (f.len() - 1) as u32;
    if d == 1 {
        return true;
    }
    let xpd = frob_power_of_x(&f, p, d);
    if !poly_sub(&xpd, &[0, 1], p).is_empty() {
        return false;
    }
    for r in prime_factors(d as u64) {
        let h = frob_power_of_x(&f, p, d / r as u32);
        let g = poly_gcd(&f, &poly_sub(&h, &[0, 1], p), p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f25_with_given_modulus() {
        // g^2 = g + 3, i.e. f = x^2 - x - 3 = x^2 + 4x + 2 over F_5
        let f = FqField::with_modulus(5, &[2, 4, 1]).unwrap();
        let g = f.x();
        assert_eq!(f.mul(g, g), f.add(g, 3));
        // oracle: g + g^5 by repeated multiplication
        let mut g5 = 1;
        for _ in 0..5 {
            g5 = f.mul(g5, g);
        }
        assert_eq!(f.trace(g), f.add(g, g5));
        assert_eq!(f.trace(1), 2);
    }

    #[test]
    fn reducible_modulus_is_rejected() {
        assert!(FqField::with_modulus(5, &[4, 0, 1]).is_err());
        assert!(is_irreducible(&[2, 0, 1], 5));
    }

    #[test]
    fn random_modulus_is_reproducible() {
        let a = FqField::new(7, 3, 11).unwrap();
        let b = FqField::new(7, 3, 11).unwrap();
        assert_eq!(a.modulus(), b.modulus());
        assert_eq!(a.size(), 343);
    }

    #[test]
    fn subfield_embedding_is_a_ring_map() {
        let small = FqField::new(5, 2, 1).unwrap();
        let big = FqField::new(5, 4, 2).unwrap();
        let e = small.embed_into(&big).unwrap();
        for a in [1u32, 7, 13, 24] {
            for b in [2u32, 5, 19] {
                assert_eq!(e[small.mul(a, b) as usize], big.mul(e[a as usize], e[b as usize]));
                assert_eq!(e[small.add(a, b) as usize], big.add(e[a as usize], e[b as usize]));
            }
        }
    }
}
