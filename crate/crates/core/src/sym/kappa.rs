//! The exponent kappa and the falling factorials built from it.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{ord_p_factorial, Ctx, PadicElem};

/// Longest digit string accepted by the parser.
pub const MAX_KAPPA_DIGITS: usize = 64;

/// kappa in Z_p: an exact integer, or a residue modulo p^digits given by
/// its base-p digits.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum KappaValue {
    Int(i64),
    Padic { digits: Vec<u32> },
}

impl KappaValue {
    /// Parses "-7", "12" or "digits:d0,d1,...". Digit ranges are checked
    /// against p by [`KappaValue::check`].
    pub fn parse(s: &str) -> Result<KappaValue> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("digits:") {
            if rest.is_empty() {
                return Err(Error::Parse("empty digit list".into()));
            }
            let digits = rest
                .split(',')
                .map(|d| {
                    d.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad digit {d:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if digits.len() > MAX_KAPPA_DIGITS {
                return Err(Error::Parse(format!(
                    "at most {MAX_KAPPA_DIGITS} digits are accepted"
                )));
            }
            Ok(KappaValue::Padic { digits })
        } else {
            s.parse::<i64>()
                .map(KappaValue::Int)
                .map_err(|_| Error::Parse(format!("kappa must be an integer or digits:..., got {s:?}")))
        }
    }

    /// Validates digits against p.
    pub fn check(&self, p: u32) -> Result<()> {
        if let KappaValue::Padic { digits } = self {
            if let Some(d) = digits.iter().find(|&&d| d >= p) {
                return Err(Error::Parse(format!("digit {d} is not below p = {p}")));
            }
        }
        Ok(())
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            KappaValue::Int(k) => Some(*k),
            KappaValue::Padic { .. } => None,
        }
    }

    /// k when kappa is an exact integer k >= 0.
    pub fn nonneg_int(&self) -> Option<u64> {
        self.as_int().and_then(|k| u64::try_from(k).ok())
    }

    /// Number of known p-adic digits; None for exact integers.
    pub fn known_digits(&self) -> Option<u32> {
        match self {
            KappaValue::Int(_) => None,
            KappaValue::Padic { digits } => Some(digits.len() as u32),
        }
    }

    /// An integer congruent to kappa modulo its precision (the residue in
    /// [0, p^d) for digit input).
    pub fn representative(&self, p: u32) -> BigInt {
        match self {
            KappaValue::Int(k) => BigInt::from(*k),
            KappaValue::Padic { digits } => digits
                .iter()
                .rev()
                .fold(BigInt::zero(), |acc, &d| acc * p + d),
        }
    }

    /// kappa - s, keeping the kind.
    pub fn minus(&self, p: u32, s: i64) -> KappaValue {
        match self {
            KappaValue::Int(k) => KappaValue::Int(k - s),
            KappaValue::Padic { digits } => {
                let d = digits.len();
                let m = BigInt::from(p).pow(d as u32);
                let mut r = (self.representative(p) - s).mod_floor(&m);
                let mut out = Vec::with_capacity(d);
                for _ in 0..d {
                    let (q, rem) = r.div_rem(&BigInt::from(p));
                    out.push(rem.to_u32().unwrap());
                    r = q;
                }
                KappaValue::Padic { digits: out }
            }
        }
    }

    /// Precision of kappa in pi-units, capped by the context.
    pub fn precision_units(&self, ctx: Ctx) -> u32 {
        match self.known_digits() {
            None => ctx.cap(),
            Some(d) => (d * (ctx.p() - 1)).min(ctx.cap()),
        }
    }

    pub fn to_padic(&self, ctx: Ctx) -> PadicElem {
        ctx.from_bigint(&self.representative(ctx.p()))
            .with_abs(self.precision_units(ctx))
    }
}

impl fmt::Display for KappaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KappaValue::Int(k) => write!(f, "{k}"),
            KappaValue::Padic { digits } => {
                let parts: Vec<String> = digits.iter().map(|d| d.to_string()).collect();
                write!(f, "digits:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for KappaValue {
    type Err = Error;
    fn from_str(s: &str) -> Result<KappaValue> {
        KappaValue::parse(s)
    }
}

impl From<KappaValue> for String {
    fn from(k: KappaValue) -> String {
        k.to_string()
    }
}

impl TryFrom<String> for KappaValue {
    type Error = Error;
    fn try_from(s: String) -> Result<KappaValue> {
        KappaValue::parse(&s)
    }
}

/// x(x-1)...(x-s+1) for an integer x, omitting a zero factor when
/// `skip_zero` is set.
pub fn falling_int(x: &BigInt, s: u64, skip_zero: bool) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..s {
        let f = x - i;
        if f.is_zero() && skip_zero {
            continue;
        }
        acc *= f;
    }
    acc
}

/// kappa^(m) = kappa(kappa-1)...(kappa-m+1); for kappa = k >= 0 the zero
/// factor is skipped, so k^(k+1) = k!.
pub fn falling_factorial(kappa: &KappaValue, m: u64, ctx: Ctx) -> PadicElem {
    let x = kappa.representative(ctx.p());
    let v = falling_int(&x, m, kappa.nonneg_int().is_some());
    ctx.from_bigint(&v).with_abs(kappa.precision_units(ctx))
}

/// binom(tau, l) for tau in Z_p, computed from an integer representative.
/// The result loses ord_p(l!) digits of tau's precision.
pub fn binom_padic(tau: &KappaValue, l: u64, ctx: Ctx) -> PadicElem {
    let p = ctx.p();
    let x = tau.representative(p);
    let num = falling_int(&x, l, false);
    let den: BigInt = (1..=l).fold(BigInt::one(), |a, i| a * i);
    let v = ctx.from_bigint(&(num / den));
    match tau.known_digits() {
        None => v,
        Some(d) => {
            let loss = ord_p_factorial(l, p as u64) as u32;
            v.with_abs(d.saturating_sub(loss) * (p - 1))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        assert_eq!(KappaValue::parse("-7").unwrap(), KappaValue::Int(-7));
        let k = KappaValue::parse("digits:3,1").unwrap();
        assert_eq!(k.representative(5), BigInt::from(8));
        assert_eq!(k.to_string(), "digits:3,1");
        assert!(KappaValue::parse("digits:").is_err());
        assert!(KappaValue::parse("x").is_err());
        assert!(KappaValue::parse("digits:7").unwrap().check(5).is_err());
    }

    #[test]
    fn minus_wraps_residues() {
        let k = KappaValue::parse("digits:1,0").unwrap();
        assert_eq!(k.minus(5, 2).representative(5), BigInt::from(24));
    }
}
