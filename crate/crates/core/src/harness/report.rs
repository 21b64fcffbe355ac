//! Verification reports and process exit codes.

use serde::Serialize;

use super::config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    /// Statement the check exercises, in words.
    pub anchor: String,
    pub status: Status,
    pub lhs: String,
    pub rhs: String,
    /// Precision the comparison was made at, in p-adic digits (0 for exact).
    pub precision: u32,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub pass: usize,
    pub fail: usize,
    pub indeterminate: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub totals: Totals,
}

impl VerificationReport {
    pub fn new(config: RunConfig) -> VerificationReport {
        VerificationReport {
            config,
            checks: Vec::new(),
            totals: Totals::default(),
        }
    }

    pub fn push(&mut self, check: Check) {
        match check.status {
            Status::Pass => self.totals.pass += 1,
            Status::Fail => self.totals.fail += 1,
            Status::Indeterminate => self.totals.indeterminate += 1,
        }
        self.checks.push(check);
    }

    pub fn add(
        &mut self,
        name: impl Into<String>,
        anchor: impl Into<String>,
        status: Status,
        lhs: impl Into<String>,
        rhs: impl Into<String>,
        precision: u32,
    ) {
        self.push(Check {
            name: name.into(),
            anchor: anchor.into(),
            status,
            lhs: lhs.into(),
            rhs: rhs.into(),
            precision,
        });
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// 0 when everything passed, 1 on any failure, 2 when the only
    /// shortfalls are indeterminate checks.
    pub fn exit_code(&self) -> i32 {
        exit_code(&self.totals)
    }

    pub fn summary_lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                let s = match c.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Indeterminate => "INDETERMINATE",
                };
                format!("{s:>13}  {}  [{} digits]", c.name, c.precision)
            })
            .collect()
    }
}

pub fn exit_code(t: &Totals) -> i32 {
    if t.fail > 0 {
        1
    } else if t.indeterminate > 0 {
        2
    } else {
        0
    }
}

/// Status of a p-adic comparison that needs `required` digits: agreement
/// to the available precision passes only if that precision is enough.
pub fn compare_status(agree_digits: u32, available: u32, required: u32) -> Status {
    if agree_digits < available {
        Status::Fail
    } else if available >= required {
        Status::Pass
    } else {
        Status::Indeterminate
    }
}
