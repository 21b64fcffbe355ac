//! Run configuration recorded in every output file.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::check_prime;
use crate::profile::PrecisionProfile;
use crate::sym::KappaValue;

/// Deliberate corruption used by negative controls.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    #[default]
    None,
    /// Adds p^shift to coefficient `index` of the splitting function.
    TamperTheta { index: usize, shift: u32 },
    /// Adds p^shift to the constant term of A1.
    TamperFrobenius { shift: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub profile: PrecisionProfile,
    pub kappa: Option<KappaValue>,
    pub k: Option<u32>,
    pub out: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub seed: u64,
    #[serde(default)]
    pub fault: Fault,
}

impl RunConfig {
    pub fn new(command: &str, profile: PrecisionProfile) -> RunConfig {
        RunConfig {
            command: command.to_string(),
            profile,
            kappa: None,
            k: None,
            out: None,
            cache: None,
            seed: 0x5eed,
            fault: Fault::None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.profile.validate()?;
        if let Some(kappa) = &self.kappa {
            kappa.check(self.profile.p)?;
            if let Some(d) = kappa.known_digits() {
                if d == 0 {
                    return Err(Error::config("kappa needs at least one digit"));
                }
            }
        }
        if self.k == Some(0) {
            return Err(Error::config("k must be positive"));
        }
        Ok(())
    }

    /// Validation for the exact pipeline, which also accepts a > 1.
    pub fn validate_exact(&self) -> Result<()> {
        check_prime(self.profile.p)?;
        if self.profile.a == 0 || self.profile.a > 8 {
            return Err(Error::config("a must be in 1..=8"));
        }
        if self.profile.m_t == 0 {
            return Err(Error::config("at least one coefficient is needed"));
        }
        match self.k {
            Some(0) | None => Err(Error::config("k must be positive")),
            Some(_) => Ok(()),
        }
    }
}
