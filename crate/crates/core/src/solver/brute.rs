use std::time::Instant;

use super::{SolveResult, SolveStatus};
use crate::error::{KmpError, Result};
use crate::instance::{evaluate, KeyAssignment, KmpInstance};

/// Largest n·|K| accepted by [`brute_force`].
pub const BRUTE_FORCE_MAX_CELLS: usize = 24;

/// Enumerates all 2^(n|K|) assignments and keeps the first best feasible
/// one under [`evaluate`].
pub fn brute_force(inst: &KmpInstance) -> Result<SolveResult> {
    let start = Instant::now();
    let (n, kc) = (inst.vertex_count(), inst.key_count());
    let cells = n * kc;
    if cells > BRUTE_FORCE_MAX_CELLS {
        return Err(KmpError::InstanceTooLarge {
            cells,
            limit: BRUTE_FORCE_MAX_CELLS,
        });
    }

    let mut best = KeyAssignment::empty(n, kc);
    let mut best_obj = 0;
    let total = 1u64 << cells;
    for mask in 1..total {
        let a = KeyAssignment::from_mask(n, kc, mask);
        let report = evaluate(inst, &a)?;
        if report.feasible && report.objective > best_obj {
            best_obj = report.objective;
            best = a;
        }
    }
    Ok(SolveResult {
        status: SolveStatus::Optimal,
        incumbent: best,
        lower_bound: best_obj,
        upper_bound: best_obj,
        gap: 0.0,
        nodes: total,
        wall_time: start.elapsed().as_secs_f64(),
    })
}
