//! Precision and truncation settings shared by the p-adic pipelines.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{check_prime, max_storage_precision, Ctx};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecisionProfile {
    pub p: u32,
    pub a: u32,
    /// Storage precision N in p-adic digits.
    pub n_padic: u32,
    /// Cap on the t-degree of the symmetric-power window.
    pub n_t: usize,
    /// Cap on the w-degree of the symmetric-power window.
    pub m_w: usize,
    /// Number of L-function coefficients after c_0.
    pub m_t: usize,
    /// Digits the operator window is chosen to certify.
    pub target_digits: u32,
    /// |x-exponent| window of the Frobenius reduction.
    pub u_x: usize,
}

impl PrecisionProfile {
    pub fn default_for(p: u32) -> PrecisionProfile {
        PrecisionProfile {
            p,
            a: 1,
            n_padic: max_storage_precision(p.clamp(5, 13)),
            n_t: 24,
            m_w: 64,
            m_t: 4,
            target_digits: 18,
            u_x: 80,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_prime(self.p)?;
        if self.a != 1 {
            return Err(Error::config(
                "the symmetric-power operator is implemented for a = 1 only",
            ));
        }
        let max = max_storage_precision(self.p);
        if self.n_padic == 0 || self.n_padic > max {
            return Err(Error::config(format!(
                "N = {} out of range 1..={max} for p = {}",
                self.n_padic, self.p
            )));
        }
        if self.m_t == 0 || self.m_t > 12 {
            return Err(Error::config("M_T must be in 1..=12"));
        }
        if self.target_digits == 0 {
            return Err(Error::config("target digits must be positive"));
        }
        if self.u_x < 2 {
            return Err(Error::config("u_x must be at least 2"));
        }
        Ok(())
    }

    pub fn ctx(&self) -> Result<Ctx> {
        Ctx::new(self.p, self.n_padic)
    }

    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.a)
    }
}

impl Default for PrecisionProfile {
    fn default() -> Self {
        PrecisionProfile::default_for(5)
    }
}
