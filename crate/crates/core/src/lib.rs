//! Key predistribution for wireless sensor networks under the q-composite
//! scheme: instance model, exact binary program, branch-and-bound solver,
//! assignment analysis and an experiment harness.

pub mod analysis;
pub mod error;
pub mod graph;
pub mod harness;
pub mod ilp;
pub mod instance;
pub mod solver;

pub use analysis::{
    assignment_report, key_path_connected, naive_pairwise_key_count, secure_graph,
    AssignmentReport, NaiveBaseline, SecureGraph,
};
pub use error::{KmpError, Result};
pub use graph::{generate_er, Graph};
pub use harness::{builtin_tables, run_experiment, ExperimentConfig, ExperimentStats, Scale};
pub use instance::{
    derive_z, evaluate, shared_keys, ConstraintKind, FeasibilityReport, KeyAssignment,
    KmpInstance, Violation,
};
pub use solver::{
    brute_force, greedy_heuristic, solve_bb, BranchRule, SolveResult, SolveStatus, SolverConfig,
};
