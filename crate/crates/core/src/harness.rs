//! Batch experiments over generated instances and their CSV / table output.

use std::fmt::Write as _;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{KmpError, Result};
use crate::graph::generate_er;
use crate::instance::KmpInstance;
use crate::solver::{solve_bb, SolveStatus, SolverConfig};

/// m_k used for every generated key.
pub const DEFAULT_MEM_PER_KEY: u32 = 1;
/// alpha used for every generated instance.
pub const DEFAULT_ALPHA: u32 = 1;
pub const DEFAULT_BASE_SEED: u64 = 1;
pub const DESK_INSTANCE_COUNT: usize = 20;
pub const DESK_TIME_LIMIT_SECS: f64 = 300.0;

pub const CSV_HEADER: &str = "config_id,seed,status,objective,bound,gap,wall_time";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub config_id: String,
    pub n: usize,
    pub d: f64,
    pub key_count: usize,
    pub q: u32,
    pub p: f64,
    /// Uniform c_i.
    pub c: u32,
    /// Uniform t_k.
    pub t: u32,
    pub instance_count: usize,
    pub time_limit_seconds: f64,
    pub base_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scale {
    /// 20 instances, 300 s each.
    #[default]
    Desk,
    /// Instance count and time limits as configured.
    Full,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.instance_count == 0 {
            return Err(KmpError::InvalidConfig("instance_count must be at least 1".into()));
        }
        if !(self.time_limit_seconds.is_finite() && self.time_limit_seconds > 0.0) {
            return Err(KmpError::InvalidConfig(format!(
                "time limit must be positive, got {}",
                self.time_limit_seconds
            )));
        }
        if self.n == 0 || !(0.0..=1.0).contains(&self.d) {
            return Err(KmpError::InvalidConfig(format!(
                "bad graph parameters n = {}, d = {}",
                self.n, self.d
            )));
        }
        // the remaining ranges are the instance's own invariants
        let probe = crate::graph::Graph::new(1, [])?;
        KmpInstance::uniform(
            probe,
            self.key_count,
            self.q,
            self.p,
            DEFAULT_ALPHA,
            DEFAULT_MEM_PER_KEY,
            self.c,
            self.t,
        )
        .map(|_| ())
        .map_err(|e| KmpError::InvalidConfig(e.to_string()))
    }

    pub fn scaled(mut self, scale: Scale) -> Self {
        if scale == Scale::Desk {
            self.instance_count = DESK_INSTANCE_COUNT;
            self.time_limit_seconds = DESK_TIME_LIMIT_SECS;
        }
        self
    }

    pub fn seed(&self, index: usize) -> u64 {
        self.base_seed.wrapping_add(index as u64)
    }

    /// The instance drawn with `seed`.
    pub fn instance_for_seed(&self, seed: u64) -> Result<KmpInstance> {
        let g = generate_er(self.n, self.d, seed)?;
        KmpInstance::uniform(
            g,
            self.key_count,
            self.q,
            self.p,
            DEFAULT_ALPHA,
            DEFAULT_MEM_PER_KEY,
            self.c,
            self.t,
        )
    }

    pub fn instance(&self, index: usize) -> Result<KmpInstance> {
        self.instance_for_seed(self.seed(index))
    }
}

#[allow(clippy::too_many_arguments)]
fn table_row(
    q: u32,
    row: usize,
    n: usize,
    d: f64,
    key_count: usize,
    p: f64,
    c: u32,
    t: u32,
    time_limit_seconds: f64,
) -> ExperimentConfig {
    ExperimentConfig {
        config_id: format!("q{q}-{row}"),
        n,
        d,
        key_count,
        q,
        p,
        c,
        t,
        instance_count: 100,
        time_limit_seconds,
        base_seed: DEFAULT_BASE_SEED,
    }
}

/// The 13 q = 1 configurations (7200 s limit) followed by the 13 q = 2
/// configurations (10800 s limit), 100 instances each. Ids are `q1-1` ..
/// `q1-13` and `q2-1` .. `q2-13`.
pub fn builtin_tables() -> Vec<ExperimentConfig> {
    const Q1: [(usize, f64, usize, f64, u32, u32); 13] = [
        (10, 0.2, 10, 0.3, 5, 3),
        (10, 0.3, 10, 0.3, 5, 3),
        (10, 0.4, 10, 0.3, 5, 3),
        (10, 0.5, 10, 0.3, 5, 3),
        (30, 0.05, 20, 0.3, 6, 3),
        (30, 0.08, 20, 0.3, 6, 3),
        (30, 0.10, 20, 0.3, 6, 3),
        (30, 0.15, 20, 0.3, 6, 3),
        (50, 0.04, 30, 0.4, 7, 4),
        (50, 0.05, 30, 0.4, 7, 4),
        (50, 0.08, 30, 0.4, 7, 4),
        (100, 0.03, 60, 0.4, 8, 5),
        (100, 0.05, 60, 0.4, 8, 5),
    ];
    const Q2: [(usize, f64, usize, f64, u32, u32); 13] = [
        (10, 0.2, 10, 0.4, 5, 4),
        (10, 0.3, 10, 0.4, 5, 4),
        (10, 0.4, 10, 0.4, 5, 4),
        (10, 0.5, 10, 0.4, 5, 4),
        (15, 0.2, 15, 0.4, 6, 4),
        (15, 0.3, 15, 0.4, 6, 4),
        (15, 0.4, 15, 0.4, 6, 4),
        (15, 0.5, 15, 0.4, 6, 4),
        (25, 0.15, 25, 0.5, 7, 5),
        (25, 0.2, 25, 0.5, 7, 5),
        (25, 0.3, 25, 0.5, 7, 5),
        (30, 0.15, 30, 0.5, 8, 5),
        (30, 0.2, 30, 0.5, 8, 5),
    ];
    let q1 = Q1
        .iter()
        .enumerate()
        .map(|(r, &(n, d, k, p, c, t))| table_row(1, r + 1, n, d, k, p, c, t, 7200.0));
    let q2 = Q2
        .iter()
        .enumerate()
        .map(|(r, &(n, d, k, p, c, t))| table_row(2, r + 1, n, d, k, p, c, t, 10800.0));
    q1.chain(q2).collect()
}

pub fn find_config(config_id: &str) -> Option<ExperimentConfig> {
    builtin_tables().into_iter().find(|c| c.config_id == config_id)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRow {
    pub seed: u64,
    pub status: SolveStatus,
    pub objective: usize,
    pub bound: usize,
    pub gap: f64,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentStats {
    pub config_id: String,
    pub instance_count: usize,
    pub solved_count: usize,
    pub error_count: usize,
    /// Mean seconds over instances solved to optimality.
    pub avg_time_solved: Option<f64>,
    /// Mean gap in percent over instances stopped by the limit (0 if none).
    pub avg_gap_unsolved: f64,
    /// Mean gap in percent over all non-error instances, solved ones at 0.
    pub avg_gap_all: f64,
    /// Sorted by seed.
    pub rows: Vec<InstanceRow>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

impl ExperimentStats {
    pub fn from_rows(config_id: impl Into<String>, mut rows: Vec<InstanceRow>) -> Self {
        rows.sort_by_key(|r| r.seed);
        let solved = || rows.iter().filter(|r| r.status == SolveStatus::Optimal);
        let unsolved = || rows.iter().filter(|r| r.status == SolveStatus::FeasibleTimeout);
        let finished = || rows.iter().filter(|r| r.status != SolveStatus::Error);
        ExperimentStats {
            config_id: config_id.into(),
            instance_count: rows.len(),
            solved_count: solved().count(),
            error_count: rows.iter().filter(|r| r.status == SolveStatus::Error).count(),
            avg_time_solved: mean(solved().map(|r| r.wall_time)),
            avg_gap_unsolved: mean(unsolved().map(|r| 100.0 * r.gap)).unwrap_or(0.0),
            avg_gap_all: mean(finished().map(|r| 100.0 * r.gap)).unwrap_or(0.0),
            rows,
        }
    }

    pub fn avg_objective(&self) -> Option<f64> {
        mean(self.rows.iter().map(|r| r.objective as f64))
    }
}

fn solve_one(cfg: &ExperimentConfig, seed: u64) -> InstanceRow {
    let failed = InstanceRow {
        seed,
        status: SolveStatus::Error,
        objective: 0,
        bound: 0,
        gap: 0.0,
        wall_time: 0.0,
    };
    let Ok(inst) = cfg.instance_for_seed(seed) else {
        return failed;
    };
    let solver = SolverConfig {
        time_limit: Duration::from_secs_f64(cfg.time_limit_seconds),
        seed,
        ..SolverConfig::default()
    };
    match solve_bb(&inst, &solver) {
        Ok(r) => InstanceRow {
            seed,
            status: r.status,
            objective: r.lower_bound,
            bound: r.upper_bound,
            gap: r.gap,
            wall_time: r.wall_time,
        },
        Err(_) => failed,
    }
}

/// Generates instance `i` with seed `base_seed + i`, solves each under the
/// per-instance limit on up to `parallel_instances` threads, and aggregates.
/// Per-instance results do not depend on the thread count.
pub fn run_experiment(cfg: &ExperimentConfig, parallel_instances: usize) -> Result<ExperimentStats> {
    cfg.validate()?;
    let seeds: Vec<u64> = (0..cfg.instance_count).map(|i| cfg.seed(i)).collect();
    let rows = if parallel_instances <= 1 {
        seeds.iter().map(|&s| solve_one(cfg, s)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallel_instances)
            .build()
            .map_err(|e| KmpError::InvalidConfig(e.to_string()))?;
        pool.install(|| seeds.par_iter().map(|&s| solve_one(cfg, s)).collect())
    };
    Ok(ExperimentStats::from_rows(cfg.config_id.clone(), rows))
}

/// One line per instance under [`CSV_HEADER`], then a summary line
/// `<id>,summary,<solved>/<count>,<mean objective>,<mean bound>,
/// <mean gap of unsolved>,<mean time of solved>`.
pub fn emit_csv(stats: &ExperimentStats) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    write_csv_rows(&mut out, stats);
    out
}

/// Several experiments in one CSV document.
pub fn emit_csv_all(all: &[ExperimentStats]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for stats in all {
        write_csv_rows(&mut out, stats);
    }
    out
}

fn write_csv_rows(out: &mut String, stats: &ExperimentStats) {
    let id = &stats.config_id;
    for r in &stats.rows {
        let _ = writeln!(
            out,
            "{id},{},{},{},{},{:?},{:.6}",
            r.seed, r.status, r.objective, r.bound, r.gap, r.wall_time
        );
    }
    if stats.rows.is_empty() {
        return;
    }
    let avg_bound = mean(stats.rows.iter().map(|r| r.bound as f64)).unwrap_or(0.0);
    let _ = writeln!(
        out,
        "{id},summary,{}/{},{:.3},{:.3},{:?},{}",
        stats.solved_count,
        stats.instance_count,
        stats.avg_objective().unwrap_or(0.0),
        avg_bound,
        stats.avg_gap_unsolved / 100.0,
        stats
            .avg_time_solved
            .map_or_else(String::new, |t| format!("{t:.6}"))
    );
}

/// Reads CSV produced by [`emit_csv`] back into per-configuration stats,
/// recomputing the summaries from the instance lines.
pub fn parse_csv(text: &str) -> Result<Vec<ExperimentStats>> {
    let mut groups: Vec<(String, Vec<InstanceRow>)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let ln = idx + 1;
        if line.trim().is_empty() || line == CSV_HEADER {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(KmpError::parse(ln, format!("expected 7 fields, got {}", f.len())));
        }
        if f[1] == "summary" {
            continue;
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| KmpError::parse(ln, format!("bad number `{s}`")));
        let int = |s: &str| s.parse::<u64>().map_err(|_| KmpError::parse(ln, format!("bad integer `{s}`")));
        let row = InstanceRow {
            seed: int(f[1])?,
            status: f[2].parse().map_err(|_| KmpError::parse(ln, format!("bad status `{}`", f[2])))?,
            objective: int(f[3])? as usize,
            bound: int(f[4])? as usize,
            gap: num(f[5])?,
            wall_time: num(f[6])?,
        };
        match groups.iter_mut().find(|(id, _)| id == f[0]) {
            Some((_, rows)) => rows.push(row),
            None => groups.push((f[0].to_string(), vec![row])),
        }
    }
    Ok(groups
        .into_iter()
        .map(|(id, rows)| ExperimentStats::from_rows(id, rows))
        .collect())
}

/// Text table with solved count, mean solve time, and both gap averages.
pub fn summary_table(all: &[ExperimentStats]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:>8} {:>14} {:>16} {:>12}",
        "config", "solved", "avg time (s)", "avg gap unsolved", "avg gap all"
    );
    for s in all {
        let time = s
            .avg_time_solved
            .map_or_else(|| "-".to_string(), |t| format!("{t:.2}"));
        let _ = writeln!(
            out,
            "{:<10} {:>8} {:>14} {:>15.2}% {:>11.2}%",
            s.config_id,
            format!("{}/{}", s.solved_count, s.instance_count),
            time,
            s.avg_gap_unsolved,
            s.avg_gap_all
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(seed: u64, status: SolveStatus, gap: f64, time: f64) -> InstanceRow {
        InstanceRow {
            seed,
            status,
            objective: 3,
            bound: 4,
            gap,
            wall_time: time,
        }
    }

    #[test]
    fn table_contents() {
        let all = builtin_tables();
        assert_eq!(all.len(), 26);
        let q1_13 = find_config("q1-13").unwrap();
        assert_eq!(
            (q1_13.n, q1_13.d, q1_13.key_count, q1_13.p, q1_13.c, q1_13.t),
            (100, 0.05, 60, 0.4, 8, 5)
        );
        assert_eq!(q1_13.time_limit_seconds, 7200.0);
        let q2_1 = find_config("q2-1").unwrap();
        assert_eq!(
            (q2_1.n, q2_1.d, q2_1.key_count, q2_1.q, q2_1.p, q2_1.c, q2_1.t),
            (10, 0.2, 10, 2, 0.4, 5, 4)
        );
        assert_eq!(q2_1.time_limit_seconds, 10800.0);
        assert!(all.iter().all(|c| c.instance_count == 100 && c.validate().is_ok()));
    }

    #[test]
    fn desk_scale() {
        let c = find_config("q1-1").unwrap().scaled(Scale::Desk);
        assert_eq!((c.instance_count, c.time_limit_seconds), (20, 300.0));
        let full = find_config("q2-3").unwrap().scaled(Scale::Full);
        assert_eq!((full.instance_count, full.time_limit_seconds), (100, 10800.0));
    }

    #[test]
    fn gap_conventions() {
        let s = ExperimentStats::from_rows(
            "x",
            vec![
                row(2, SolveStatus::FeasibleTimeout, 0.25, 9.0),
                row(1, SolveStatus::Optimal, 0.0, 1.0),
                row(3, SolveStatus::Optimal, 0.0, 3.0),
                row(4, SolveStatus::Error, 0.0, 0.0),
            ],
        );
        assert_eq!(s.rows.iter().map(|r| r.seed).collect::<Vec<_>>(), [1, 2, 3, 4]);
        assert_eq!((s.solved_count, s.error_count), (2, 1));
        assert_eq!(s.avg_time_solved, Some(2.0));
        assert_eq!(s.avg_gap_unsolved, 25.0);
        assert!((s.avg_gap_all - 25.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn csv_shapes() {
        let empty = ExperimentStats::from_rows("q1-1", vec![]);
        assert_eq!(emit_csv(&empty), format!("{CSV_HEADER}\n"));

        let one = ExperimentStats::from_rows("q1-1", vec![row(5, SolveStatus::Optimal, 0.0, 0.5)]);
        let text = emit_csv(&one);
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1], "q1-1,5,OPTIMAL,3,4,0.0,0.500000");
        assert!(lines[2].starts_with("q1-1,summary,1/1,"));

        let parsed = parse_csv(&text).unwrap();
        assert_eq!(parsed, vec![one]);
        assert!(parse_csv("q,1,OPTIMAL,1\n").is_err());
        assert!(parse_csv("q,1,WHAT,1,1,0,0\n").is_err());
    }

    #[test]
    fn generator_failure_is_a_row_not_an_abort() {
        let cfg = ExperimentConfig {
            config_id: "tiny".into(),
            n: 3,
            d: 0.0,
            key_count: 2,
            q: 1,
            p: 0.5,
            c: 2,
            t: 2,
            instance_count: 2,
            time_limit_seconds: 5.0,
            base_seed: 0,
        };
        let s = run_experiment(&cfg, 1).unwrap();
        assert_eq!(s.error_count, 2);
        assert!(s.rows.iter().all(|r| r.status == SolveStatus::Error));
    }

    fn tiny(q: u32, key_count: usize) -> ExperimentConfig {
        ExperimentConfig {
            config_id: "tiny".into(),
            n: 4,
            d: 0.6,
            key_count,
            q,
            p: 0.5,
            c: 2,
            t: 3,
            instance_count: 6,
            time_limit_seconds: 30.0,
            base_seed: 10,
        }
    }

    #[test]
    fn q_above_pool_is_all_zero() {
        let s = run_experiment(&tiny(3, 2), 1).unwrap();
        assert_eq!(s.solved_count, 6);
        assert!(s.rows.iter().all(|r| r.objective == 0 && r.bound == 0));
        assert_eq!((s.avg_gap_unsolved, s.avg_gap_all), (0.0, 0.0));
    }

    #[test]
    fn tiny_config_matches_brute_force_average() {
        let cfg = tiny(1, 2);
        let s = run_experiment(&cfg, 1).unwrap();
        let exact: Vec<f64> = (0..cfg.instance_count)
            .map(|i| crate::solver::brute_force(&cfg.instance(i).unwrap()).unwrap().objective() as f64)
            .collect();
        let avg = exact.iter().sum::<f64>() / exact.len() as f64;
        assert_eq!(s.avg_objective(), Some(avg));
        assert_eq!(s.solved_count, cfg.instance_count);
    }

    #[test]
    fn thread_count_does_not_change_rows() {
        let mut cfg = find_config("q2-1").unwrap().scaled(Scale::Desk);
        cfg.instance_count = 4;
        let strip = |s: ExperimentStats| {
            s.rows
                .into_iter()
                .map(|r| (r.seed, r.status, r.objective, r.bound))
                .collect::<Vec<_>>()
        };
        let one = strip(run_experiment(&cfg, 1).unwrap());
        assert_eq!(one, strip(run_experiment(&cfg, 3).unwrap()));
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = find_config("q1-1").unwrap();
        cfg.instance_count = 0;
        assert!(run_experiment(&cfg, 1).is_err());
        let mut cfg = find_config("q1-1").unwrap();
        cfg.q = 0;
        assert!(cfg.validate().is_err());
    }
}
