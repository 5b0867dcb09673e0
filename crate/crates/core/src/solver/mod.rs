//! Exact and heuristic solvers for the key assignment problem.
//!
//! [`solve_bb`] is a depth-first branch-and-bound over the key-ring cells
//! x_ik with constraint propagation. [`brute_force`] enumerates every
//! assignment through [`crate::instance::evaluate`] and serves as the
//! reference for small instances. [`greedy_heuristic`] provides the warm
//! start.

mod bb;
mod brute;
mod greedy;
mod holders;
pub(crate) mod state;

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{KmpError, Result};
use crate::instance::KeyAssignment;

pub use bb::solve_bb;
pub use brute::{brute_force, BRUTE_FORCE_MAX_CELLS};
pub use greedy::greedy_heuristic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolveStatus {
    Optimal,
    /// Stopped on the time or node limit with a feasible incumbent.
    FeasibleTimeout,
    /// Never produced: the all-zero assignment is always feasible.
    InfeasibleNone,
    Error,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "OPTIMAL",
            SolveStatus::FeasibleTimeout => "FEASIBLE_TIMEOUT",
            SolveStatus::InfeasibleNone => "INFEASIBLE_NONE",
            SolveStatus::Error => "ERROR",
        }
    }
}

impl std::str::FromStr for SolveStatus {
    type Err = KmpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "OPTIMAL" => Ok(SolveStatus::Optimal),
            "FEASIBLE_TIMEOUT" => Ok(SolveStatus::FeasibleTimeout),
            "INFEASIBLE_NONE" => Ok(SolveStatus::InfeasibleNone),
            "ERROR" => Ok(SolveStatus::Error),
            other => Err(KmpError::parse(0, format!("unknown status `{other}`"))),
        }
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Order in which the branch-and-bound offers holder sets to a key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchRule {
    /// Sets securing more edges first, then higher endpoint degree sum.
    #[default]
    DegreeFirst,
    /// Sets in lexicographic order of their vertices.
    Natural,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub time_limit: Duration,
    /// Tie-breaking seed for the warm-start heuristic.
    pub seed: u64,
    pub branch_rule: BranchRule,
    pub node_limit: Option<u64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            time_limit: Duration::from_secs(300),
            seed: 0,
            branch_rule: BranchRule::default(),
            node_limit: None,
        }
    }
}

impl SolverConfig {
    pub fn with_time_limit(secs: f64) -> Result<Self> {
        if !(secs.is_finite() && secs > 0.0) {
            return Err(KmpError::InvalidConfig(format!(
                "time limit must be positive, got {secs}"
            )));
        }
        Ok(SolverConfig {
            time_limit: Duration::from_secs_f64(secs),
            ..Default::default()
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.time_limit.is_zero() {
            return Err(KmpError::InvalidConfig("time limit must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ResultJson", from = "ResultJson")]
pub struct SolveResult {
    pub status: SolveStatus,
    pub incumbent: KeyAssignment,
    /// Objective of the incumbent.
    pub lower_bound: usize,
    pub upper_bound: usize,
    pub gap: f64,
    pub nodes: u64,
    /// Seconds.
    pub wall_time: f64,
}

#[derive(Serialize, Deserialize)]
struct ResultJson {
    status: SolveStatus,
    objective: usize,
    bound: usize,
    gap: f64,
    nodes: u64,
    wall_time: f64,
    #[serde(flatten)]
    x: KeyAssignment,
}

impl From<SolveResult> for ResultJson {
    fn from(r: SolveResult) -> Self {
        ResultJson {
            status: r.status,
            objective: r.lower_bound,
            bound: r.upper_bound,
            gap: r.gap,
            nodes: r.nodes,
            wall_time: r.wall_time,
            x: r.incumbent,
        }
    }
}

impl From<ResultJson> for SolveResult {
    fn from(r: ResultJson) -> Self {
        SolveResult {
            status: r.status,
            incumbent: r.x,
            lower_bound: r.objective,
            upper_bound: r.bound,
            gap: r.gap,
            nodes: r.nodes,
            wall_time: r.wall_time,
        }
    }
}

impl SolveResult {
    pub fn objective(&self) -> usize {
        self.lower_bound
    }
}

/// (UB - LB) / max(UB, 1).
pub fn relative_gap(lower: usize, upper: usize) -> f64 {
    upper.saturating_sub(lower) as f64 / upper.max(1) as f64
}
