//! The executable check suite: canonical commutators, displacement and
//! rotation relations, the angular-momentum identities, the bracket rule,
//! and the inconsistency demonstrations. Every check reports one measured
//! number against one tolerance; the suite is the regression surface.

pub mod checks;
pub mod demos;

use crate::arrangement::ArrangementError;
use crate::operator::OperatorError;
use crate::repr::ReprError;
use crate::symbolic::SymbolicError;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("wavepacket leaks at the boundary: amplitude {leak:.3e} exceeds 1e-12")]
    BoundaryLeak { leak: f64 },
    #[error("the demo is vacuous: the inputs commute")]
    InputsCommute,
    #[error("unknown check group '{0}' (expected one of: angular, grid, pb, arrangements)")]
    UnknownCheckName(String),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Repr(#[from] ReprError),
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
}

/// One check outcome. `passed` holds exactly when `measured <= tolerance`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub details: String,
}

impl CheckResult {
    pub fn evaluate(
        name: impl Into<String>,
        measured: f64,
        tolerance: f64,
        details: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            passed: measured <= tolerance,
            measured,
            tolerance,
            details: details.into(),
        }
    }
}

/// Parameters of the default suite; grid and spin knobs mirror the config
/// file keys (`j`, `hbar`, `grid.n`, `grid.length`, `wavepacket.center`,
/// `wavepacket.width`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub hbar: f64,
    pub j_max: f64,
    pub grid_n: usize,
    pub grid_length: f64,
    pub wavepacket_center: f64,
    pub wavepacket_width: f64,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            j_max: 10.0,
            grid_n: 512,
            grid_length: 1.0,
            wavepacket_center: 0.5,
            wavepacket_width: 1.0 / 16.0,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckGroup {
    Angular,
    Grid,
    Pb,
    Arrangements,
}

impl std::str::FromStr for CheckGroup {
    type Err = VerifyError;
    fn from_str(s: &str) -> Result<Self, VerifyError> {
        match s {
            "angular" => Ok(CheckGroup::Angular),
            "grid" => Ok(CheckGroup::Grid),
            "pb" => Ok(CheckGroup::Pb),
            "arrangements" => Ok(CheckGroup::Arrangements),
            other => Err(VerifyError::UnknownCheckName(other.to_string())),
        }
    }
}

/// Runs the selected groups (all of them by default) and collects results.
pub fn run_suite(
    config: &SuiteConfig,
    groups: Option<&[CheckGroup]>,
) -> Result<Vec<CheckResult>, VerifyError> {
    let all = [
        CheckGroup::Angular,
        CheckGroup::Grid,
        CheckGroup::Pb,
        CheckGroup::Arrangements,
    ];
    let selected: &[CheckGroup] = groups.unwrap_or(&all);
    let mut results = Vec::new();
    for group in selected {
        match group {
            CheckGroup::Angular => checks::angular_group(config, &mut results)?,
            CheckGroup::Grid => checks::grid_group(config, &mut results)?,
            CheckGroup::Pb => checks::pb_group(config, &mut results)?,
            CheckGroup::Arrangements => checks::arrangements_group(config, &mut results)?,
        }
    }
    Ok(results)
}

/// Machine-readable report wrapper; the JSON schema is versioned.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SuiteReport {
    pub version: u32,
    pub checks: Vec<CheckResult>,
    pub summary: SuiteSummary,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SuiteSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

impl SuiteReport {
    pub fn new(checks: Vec<CheckResult>) -> Self {
        let passed = checks.iter().filter(|c| c.passed).count();
        let summary = SuiteSummary {
            total: checks.len(),
            passed,
            failed: checks.len() - passed,
        };
        Self {
            version: 1,
            checks,
            summary,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }
}
