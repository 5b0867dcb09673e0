//! Depth-first branch-and-bound over the key columns x_·k.
//!
//! Each branching step fixes a whole column: the next key of a key class
//! receives a holder set (see [`holders`](super::holders)), or the class is
//! closed and its remaining keys stay unused. The three propagation rules
//! are built into the candidate sets:
//!
//! * capacity: a set is offered only if every holder still has room for m_k;
//! * usage: sets have at most t_k vertices;
//! * neighborhood: every holder has at most its cap of neighbors in the set.
//!
//! So every node is a feasible assignment and doubles as an incumbent.
//! Keys with identical (m_k, t_k) are interchangeable, so within a class the
//! sets are taken in non-decreasing branching order.

use std::time::{Duration, Instant};

use super::greedy::greedy_heuristic;
use super::holders::{holder_sets, HolderSet};
use super::state::Ctx;
use super::{relative_gap, BranchRule, SolveResult, SolveStatus, SolverConfig};
use crate::error::Result;
use crate::instance::{evaluate, KeyAssignment, KmpInstance};

/// Sets examined exactly per class when bounding one more key; past this
/// the static edge count of the next set stands in for the rest.
const GAIN_SCAN_BUDGET: usize = 512;

struct Class {
    mem: u32,
    keys: Vec<usize>,
    /// Holder-set ids in branching order.
    order: Vec<usize>,
    /// Positions into `order`, by decreasing edge count.
    by_weight: Vec<usize>,
}

struct Search<'a> {
    inst: &'a KmpInstance,
    q: u32,
    sets: Vec<HolderSet>,
    classes: Vec<Class>,
    /// Classes sorted by memory per key, for the vertex bound.
    by_mem: Vec<usize>,
    /// Per vertex: most incident edges one key can secure.
    reach: Vec<usize>,

    cover: Vec<u32>,
    satisfied: usize,
    mem_left: Vec<u32>,
    chosen: Vec<Vec<usize>>,

    best_obj: usize,
    best: Option<Vec<Vec<usize>>>,

    nodes: u64,
    start: Instant,
    time_limit: Duration,
    node_limit: Option<u64>,
    stopped: bool,
    open_bound: usize,
}

/// Exact maximization of the secure-edge count.
///
/// Runs until optimality is proven or a limit in `cfg` is hit; in the latter
/// case the status is [`SolveStatus::FeasibleTimeout`] and `upper_bound` is
/// the largest bound among the unexplored nodes. Identical inputs give
/// identical results apart from `wall_time`, unless the time limit fires.
pub fn solve_bb(inst: &KmpInstance, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let start = Instant::now();
    let ctx = Ctx::new(inst);
    let g = inst.graph();

    let max_size = inst.usage_limit().iter().copied().max().unwrap_or(0) as usize;
    let sets = holder_sets(g, &ctx.nb_cap, max_size.min(ctx.n));
    let degree_sum = |s: &HolderSet| s.vertices.iter().map(|&v| g.degree(v)).sum::<usize>();

    let mut classes: Vec<Class> = Vec::new();
    let mut sigs: Vec<(u32, u32)> = Vec::new();
    for k in 0..ctx.kc {
        let sig = (inst.mem_per_key()[k], inst.usage_limit()[k]);
        match sigs.iter().position(|&s| s == sig) {
            Some(c) => classes[c].keys.push(k),
            None => {
                sigs.push(sig);
                let (mem, limit) = sig;
                let mut order: Vec<usize> = (0..sets.len())
                    .filter(|&s| {
                        let set = &sets[s];
                        set.vertices.len() <= limit as usize
                            && set.vertices.iter().all(|&v| inst.capacity()[v] >= mem)
                    })
                    .collect();
                if cfg.branch_rule == BranchRule::DegreeFirst {
                    order.sort_by_key(|&s| {
                        (
                            std::cmp::Reverse(sets[s].edges.len()),
                            std::cmp::Reverse(degree_sum(&sets[s])),
                            s,
                        )
                    });
                }
                let mut by_weight: Vec<usize> = (0..order.len()).collect();
                by_weight.sort_by_key(|&p| (std::cmp::Reverse(sets[order[p]].edges.len()), p));
                classes.push(Class {
                    mem,
                    keys: vec![k],
                    order,
                    by_weight,
                });
            }
        }
    }
    let mut by_mem: Vec<usize> = (0..classes.len()).collect();
    by_mem.sort_by_key(|&c| (classes[c].mem, c));

    let warm = greedy_heuristic(inst, cfg.seed);
    let warm_obj = evaluate(inst, &warm)?.objective;

    let mut search = Search {
        inst,
        q: inst.q(),
        reach: (0..ctx.n)
            .map(|v| g.degree(v).min(ctx.nb_cap[v] as usize))
            .collect(),
        cover: vec![0; g.edge_count()],
        satisfied: 0,
        mem_left: inst.capacity().to_vec(),
        chosen: vec![Vec::new(); classes.len()],
        best_obj: warm_obj,
        best: None,
        nodes: 0,
        start,
        time_limit: cfg.time_limit,
        node_limit: cfg.node_limit,
        stopped: false,
        open_bound: 0,
        sets,
        classes,
        by_mem,
    };
    search.dfs(0, 0, 0);

    let lower = search.best_obj;
    let upper = if search.stopped {
        search.open_bound.max(lower)
    } else {
        lower
    };
    let incumbent = match &search.best {
        Some(chosen) => search.assignment(chosen),
        None => warm,
    };

    let report = evaluate(inst, &incumbent)?;
    let status = if !report.feasible || report.objective != lower {
        SolveStatus::Error
    } else if upper == lower {
        SolveStatus::Optimal
    } else {
        SolveStatus::FeasibleTimeout
    };

    Ok(SolveResult {
        status,
        incumbent,
        lower_bound: lower,
        upper_bound: upper,
        gap: relative_gap(lower, upper),
        nodes: search.nodes,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

impl Search<'_> {
    /// Node: keys `0..r` of class `c` are placed, the next one takes a set
    /// at position `from` or later of the class order.
    fn dfs(&mut self, c: usize, r: usize, from: usize) {
        self.nodes += 1;
        if self.satisfied > self.best_obj {
            self.best_obj = self.satisfied;
            self.best = Some(self.chosen.clone());
        }
        if c == self.classes.len() {
            return;
        }
        let bound = self.bound(c, r, from);
        if bound <= self.best_obj {
            if self.start.elapsed() >= self.time_limit {
                self.stopped = true;
            }
            return;
        }
        let over_nodes = self.node_limit.is_some_and(|l| self.nodes >= l);
        if over_nodes || self.start.elapsed() >= self.time_limit {
            self.stopped = true;
            self.open_bound = self.open_bound.max(bound);
            return;
        }

        let last = r + 1 == self.classes[c].keys.len();
        for pos in from..self.classes[c].order.len() {
            let s = self.classes[c].order[pos];
            if !self.fits(c, s) {
                continue;
            }
            self.apply(c, s);
            if last {
                self.dfs(c + 1, 0, 0);
            } else {
                self.dfs(c, r + 1, pos);
            }
            self.undo(c, s);
            if self.stopped {
                self.open_bound = self.open_bound.max(bound);
                return;
            }
            if bound <= self.best_obj {
                return;
            }
        }
        if c + 1 < self.classes.len() {
            self.dfs(c + 1, 0, 0);
            if self.stopped {
                self.open_bound = self.open_bound.max(bound);
            }
        }
    }

    fn fits(&self, c: usize, s: usize) -> bool {
        let mem = self.classes[c].mem;
        self.sets[s].vertices.iter().all(|&v| self.mem_left[v] >= mem)
    }

    fn apply(&mut self, c: usize, s: usize) {
        let mem = self.classes[c].mem;
        let set = &self.sets[s];
        for &v in &set.vertices {
            self.mem_left[v] -= mem;
        }
        for &e in &set.edges {
            self.cover[e] += 1;
            if self.cover[e] == self.q {
                self.satisfied += 1;
            }
        }
        self.chosen[c].push(s);
    }

    fn undo(&mut self, c: usize, s: usize) {
        let mem = self.classes[c].mem;
        let set = &self.sets[s];
        for &v in &set.vertices {
            self.mem_left[v] += mem;
        }
        for &e in &set.edges {
            if self.cover[e] == self.q {
                self.satisfied -= 1;
            }
            self.cover[e] -= 1;
        }
        self.chosen[c].pop();
    }

    /// Most still-unsatisfied edges one more key of class `c` can cover,
    /// using sets at position `from` or later.
    fn max_gain(&self, c: usize, from: usize) -> usize {
        let class = &self.classes[c];
        let mut best = 0;
        let mut scanned = 0;
        for &pos in &class.by_weight {
            let s = class.order[pos];
            let weight = self.sets[s].edges.len();
            if weight <= best {
                break;
            }
            if pos < from || !self.fits(c, s) {
                continue;
            }
            if scanned == GAIN_SCAN_BUDGET {
                return weight;
            }
            scanned += 1;
            let gain = self.sets[s]
                .edges
                .iter()
                .filter(|&&e| self.cover[e] < self.q)
                .count();
            best = best.max(gain);
        }
        best
    }

    /// Satisfied edges plus the minimum of three optimistic completions:
    /// every unsatisfied edge; the edges whose missing shared keys fit in
    /// the coverage the remaining keys can supply; and, per vertex, the
    /// incident edges its remaining ring slots can serve, halved.
    fn bound(&self, c: usize, r: usize, from: usize) -> usize {
        let q = self.q as usize;
        let g = self.inst.graph();
        // need[d]: unsatisfied edges missing d shared keys
        let mut need = vec![0usize; q + 1];
        for &cov in &self.cover {
            if (cov as usize) < q {
                need[q - cov as usize] += 1;
            }
        }
        let unsatisfied: usize = need.iter().sum();
        if unsatisfied == 0 {
            return self.satisfied;
        }

        let remaining = |cc: usize| {
            let len = self.classes[cc].keys.len();
            if cc == c {
                len - r
            } else {
                len
            }
        };
        let mut units = 0;
        for cc in c..self.classes.len() {
            let keys = remaining(cc);
            if keys > 0 {
                units += keys * self.max_gain(cc, if cc == c { from } else { 0 });
            }
        }
        let per_key = closable(&need, units);

        let mut incident = 0;
        let mut local = vec![0usize; q + 1];
        for v in 0..g.vertex_count() {
            local.iter_mut().for_each(|x| *x = 0);
            for &u in g.neighbors(v) {
                let Some(e) = g.edge_index(v, u) else { continue };
                let cov = self.cover[e] as usize;
                if cov < q {
                    local[q - cov] += 1;
                }
            }
            if local.iter().all(|&x| x == 0) {
                continue;
            }
            let mut room = self.mem_left[v];
            let mut slots = 0;
            for &cc in &self.by_mem {
                if cc < c {
                    continue;
                }
                let mem = self.classes[cc].mem;
                let take = remaining(cc).min((room / mem) as usize);
                slots += take;
                room -= take as u32 * mem;
            }
            incident += closable(&local, slots * self.reach[v]);
        }
        let per_vertex = incident / 2;

        self.satisfied + unsatisfied.min(per_key).min(per_vertex)
    }

    fn assignment(&self, chosen: &[Vec<usize>]) -> KeyAssignment {
        let mut a = KeyAssignment::empty(self.inst.vertex_count(), self.inst.key_count());
        for (class, sets) in self.classes.iter().zip(chosen) {
            for (&k, &s) in class.keys.iter().zip(sets) {
                for &v in &self.sets[s].vertices {
                    a.set(v, k, true);
                }
            }
        }
        a
    }
}

/// Edges that `units` of coverage can complete, cheapest deficits first.
fn closable(need: &[usize], mut units: usize) -> usize {
    let mut done = 0;
    for (d, &count) in need.iter().enumerate().skip(1) {
        let take = count.min(units / d);
        done += take;
        units -= take * d;
        if take < count {
            break;
        }
    }
    done
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_er, Graph};
    use crate::solver::brute_force;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn q_above_pool_gives_zero() {
        let inst = KmpInstance::uniform(Graph::path(2), 1, 2, 1.0, 1, 1, 1, 2).unwrap();
        let r = solve_bb(&inst, &cfg()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.objective(), 0);
    }

    #[test]
    fn path_and_triangle() {
        let path = KmpInstance::uniform(Graph::path(3), 2, 1, 1.0, 1, 1, 1, 3).unwrap();
        let r = solve_bb(&path, &cfg()).unwrap();
        assert_eq!((r.status, r.objective(), r.gap), (SolveStatus::Optimal, 2, 0.0));

        let tri = KmpInstance::uniform(Graph::complete(3), 1, 1, 1.0, 1, 1, 1, 3).unwrap();
        let r = solve_bb(&tri, &cfg()).unwrap();
        assert_eq!((r.status, r.objective()), (SolveStatus::Optimal, 3));
    }

    #[test]
    fn closable_takes_small_deficits_first() {
        assert_eq!(closable(&[0, 3, 2], 4), 3);
        assert_eq!(closable(&[0, 3, 2], 7), 5);
        assert_eq!(closable(&[0, 0, 2], 3), 1);
        assert_eq!(closable(&[0, 1], 0), 0);
    }

    #[test]
    fn root_bound_is_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for round in 0..30 {
            let n = rng.random_range(3..=5);
            let g = generate_er(n, 0.6, round).unwrap();
            let kc = rng.random_range(1..=4);
            let inst = KmpInstance::uniform(g, kc, rng.random_range(1..=2), 0.5, 1, 1, 3, 3)
                .unwrap();
            if n * kc > 20 {
                continue;
            }
            let exact = brute_force(&inst).unwrap().objective();
            let stopped = solve_bb(&inst, &SolverConfig { node_limit: Some(1), ..cfg() }).unwrap();
            assert!(stopped.upper_bound >= exact, "round {round}");
            assert!(stopped.lower_bound <= exact);
        }
    }

    #[test]
    fn matches_brute_force_on_random_small_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for round in 0..60 {
            let n = rng.random_range(2..=4);
            let kc = rng.random_range(1..=3);
            let g = generate_er(n, 0.6, round).unwrap();
            let inst = KmpInstance::new(
                g,
                kc,
                rng.random_range(1..=2),
                f64::from(rng.random_range(0..=10u32)) / 10.0,
                1,
                (0..kc).map(|_| rng.random_range(1..=2)).collect(),
                (0..n).map(|_| rng.random_range(1..=3)).collect(),
                (0..kc).map(|_| rng.random_range(1..=4)).collect(),
            )
            .unwrap();
            let exact = brute_force(&inst).unwrap().objective();
            for rule in [BranchRule::DegreeFirst, BranchRule::Natural] {
                let r = solve_bb(&inst, &SolverConfig { branch_rule: rule, ..cfg() }).unwrap();
                assert_eq!(r.status, SolveStatus::Optimal);
                assert_eq!(r.objective(), exact, "round {round} {rule:?}");
            }
        }
    }

    #[test]
    fn node_limit_reports_timeout_with_valid_bound() {
        let g = generate_er(10, 0.5, 4).unwrap();
        let inst = KmpInstance::uniform(g, 10, 2, 0.4, 1, 1, 5, 4).unwrap();
        let limited = SolverConfig {
            node_limit: Some(5),
            ..cfg()
        };
        let r = solve_bb(&inst, &limited).unwrap();
        assert_eq!(r.status, SolveStatus::FeasibleTimeout);
        assert!(r.lower_bound < r.upper_bound);
        assert!(r.gap > 0.0);
        assert!(r.upper_bound <= inst.graph().edge_count());
        let report = evaluate(&inst, &r.incumbent).unwrap();
        assert!(report.feasible);
        assert_eq!(report.objective, r.lower_bound);
    }
}
