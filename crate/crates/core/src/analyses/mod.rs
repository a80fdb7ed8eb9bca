//! Specification analyses: unrealizable cores, trivially true or false
//! constraints, and monitor well-formedness.

mod core;
mod monitor;
mod trivial;

use crate::diag::Diagnostic;
use crate::gr1::{solve, Gr1Error};
use crate::lowering::{lower, to_gr1};
use crate::semcheck::CheckedSpec;

pub use self::core::{unrealizable_core, CoreReport, GuaranteeRef};
pub use monitor::{check_monitor, MonitorVerdict, Witness};
pub use trivial::{find_trivial, TrivialFinding, Triviality};

#[derive(Clone, Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("specification is realizable")]
    Realizable,
    #[error("lowering failed: {}", .0.first().map(|d| d.message.as_str()).unwrap_or("unknown error"))]
    Lowering(Vec<Diagnostic>),
    #[error(transparent)]
    Solve(#[from] Gr1Error),
    #[error("no monitor named `{0}`")]
    UnknownMonitor(String),
}

/// Lowers, solves and reports the realizability verdict.
pub fn is_realizable(spec: &CheckedSpec) -> Result<bool, AnalysisError> {
    let kernel = lower(spec).map_err(AnalysisError::Lowering)?;
    let mut problem = to_gr1(&kernel);
    Ok(solve(&mut problem)?.realizable)
}
