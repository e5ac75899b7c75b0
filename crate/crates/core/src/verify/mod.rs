//! Registry of numeric identity checks, run in parallel and reported as JSON.
//!
//! Tier A holds identities that are forced by classical mathematics; a
//! failure there is a bug. Tier B holds the claims specific to this
//! library's reversion/integral pipeline; their statuses are findings.

mod checks;

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use checks::ROUND_TRIP_CORPUS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tier {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Recorded,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub tier: Tier,
    pub status: Status,
    pub max_abs_error: f64,
    pub tolerance: f64,
    pub samples: u64,
    pub notes: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub engine: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub tolerance_default: f64,
    pub versions: Versions,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn tier_a_failures(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| c.tier == Tier::A && c.status == Status::Fail)
            .count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// Errors at or above this value mean the check did not produce a number.
pub const NOT_COMPUTED: f64 = f64::MAX;

/// Runs the checks of `suite` (`classical` = Tier A, `paper` = Tier B,
/// `all`); any other name selects nothing. Checks with the default
/// tolerance class are measured against `tol`; the others carry their own
/// documented tolerance.
pub fn run_suite(suite: &str, tol: f64) -> VerificationReport {
    let wanted = |t: Tier| match suite {
        "classical" => t == Tier::A,
        "paper" => t == Tier::B,
        "all" => true,
        _ => false,
    };
    let defs: Vec<_> = checks::registry()
        .into_iter()
        .filter(|d| wanted(d.tier))
        .collect();
    let mut results: Vec<CheckResult> = defs.par_iter().map(|d| d.execute(tol)).collect();
    results.sort_by(|a, b| a.id.cmp(&b.id));
    VerificationReport {
        suite: suite.to_string(),
        tolerance_default: tol,
        versions: Versions {
            engine: format!("qrevert {}", env!("CARGO_PKG_VERSION")),
        },
        checks: results,
    }
}

/// Ids of all registered checks with their tier, in id order.
pub fn list_checks() -> Vec<(&'static str, Tier)> {
    let mut v: Vec<_> = checks::registry()
        .into_iter()
        .map(|d| (d.id, d.tier))
        .collect();
    v.sort();
    v
}

pub fn emit_report(r: &VerificationReport, path: &Path) -> Result<()> {
    let mut text = r.to_json();
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}
