//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use kmp_core::graph::{generate_er, Graph};
use kmp_core::ilp::{x_name, IlpModel, RowSense};
use kmp_core::instance::{evaluate, KeyAssignment, KmpInstance};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const EPS: f64 = 1e-9;

/// For every x (as a row-major bit mask), the best objective over the
/// feasible binary points of `model` with that x, or `None` if there is no
/// feasible completion. Exhaustive depth-first enumeration in column order,
/// pruned only when some row can no longer be satisfied.
pub fn model_optimum_per_x(model: &IlpModel, n: usize, key_count: usize) -> Vec<Option<f64>> {
    let nvars = model.variables().len();
    let rows = model.constraints();
    let mut col_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nvars];
    for (r, row) in rows.iter().enumerate() {
        for &(v, c) in &row.coeffs {
            col_rows[v].push((r, c));
        }
    }
    // suffix_lo[r][d], suffix_hi[r][d]: extreme activity of row r from
    // columns d.. when all of them are still free
    let mut suffix_lo = vec![vec![0.0; nvars + 1]; rows.len()];
    let mut suffix_hi = vec![vec![0.0; nvars + 1]; rows.len()];
    for r in 0..rows.len() {
        for d in (0..nvars).rev() {
            let c = col_rows[d].iter().find(|&&(rr, _)| rr == r).map_or(0.0, |&(_, c)| c);
            suffix_lo[r][d] = suffix_lo[r][d + 1] + c.min(0.0);
            suffix_hi[r][d] = suffix_hi[r][d + 1] + c.max(0.0);
        }
    }
    let mut obj = vec![0.0; nvars];
    for &(v, c) in model.objective() {
        obj[v] = c;
    }
    let mut bit_of = vec![None; nvars];
    for i in 0..n {
        for k in 0..key_count {
            let v = model.var(&x_name(i, k)).expect("x column");
            bit_of[v] = Some(i * key_count + k);
        }
    }

    struct Walk<'a> {
        model: &'a IlpModel,
        col_rows: Vec<Vec<(usize, f64)>>,
        suffix_lo: Vec<Vec<f64>>,
        suffix_hi: Vec<Vec<f64>>,
        obj: Vec<f64>,
        bit_of: Vec<Option<usize>>,
        act: Vec<f64>,
        point: Vec<bool>,
        out: Vec<Option<f64>>,
    }

    impl Walk<'_> {
        fn go(&mut self, depth: usize, value: f64, mask: u64) {
            for (r, row) in self.model.constraints().iter().enumerate() {
                let ok = match row.sense {
                    RowSense::Le => self.act[r] + self.suffix_lo[r][depth] <= row.rhs + EPS,
                    RowSense::Ge => self.act[r] + self.suffix_hi[r][depth] >= row.rhs - EPS,
                };
                if !ok {
                    return;
                }
            }
            if depth == self.point.len() {
                let direct = self.model.evaluate_point(&self.point).expect("feasible point");
                assert!((direct - value).abs() < EPS);
                let slot = &mut self.out[mask as usize];
                *slot = Some(slot.map_or(value, |v: f64| v.max(value)));
                return;
            }
            self.go(depth + 1, value, mask);
            self.point[depth] = true;
            for &(r, c) in &self.col_rows[depth] {
                self.act[r] += c;
            }
            let mask1 = self.bit_of[depth].map_or(mask, |b| mask | 1 << b);
            self.go(depth + 1, value + self.obj[depth], mask1);
            for &(r, c) in &self.col_rows[depth] {
                self.act[r] -= c;
            }
            self.point[depth] = false;
        }
    }

    let mut walk = Walk {
        model,
        act: vec![0.0; rows.len()],
        point: vec![false; nvars],
        out: vec![None; 1 << (n * key_count)],
        col_rows,
        suffix_lo,
        suffix_hi,
        obj,
        bit_of,
    };
    walk.go(0, 0.0, 0);
    walk.out
}

/// For every x mask, the secure-edge count if x satisfies the quadratic
/// model, else `None`.
pub fn quadratic_value_per_x(inst: &KmpInstance) -> Vec<Option<f64>> {
    let (n, kc) = (inst.vertex_count(), inst.key_count());
    (0..1u64 << (n * kc))
        .map(|mask| {
            let r = evaluate(inst, &KeyAssignment::from_mask(n, kc, mask)).unwrap();
            r.feasible.then_some(r.objective as f64)
        })
        .collect()
}

pub fn best(values: &[Option<f64>]) -> f64 {
    values.iter().flatten().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
}

/// Random instance drawn from broad parameter ranges with n·|K| ≤ `max_cells`.
pub fn random_instance(rng: &mut StdRng, max_n: usize, max_keys: usize, max_cells: usize) -> KmpInstance {
    loop {
        let n = rng.random_range(2..=max_n);
        let kc = rng.random_range(1..=max_keys);
        if n * kc > max_cells {
            continue;
        }
        let d = [0.5, 0.8, 1.0][rng.random_range(0..3)];
        let g = generate_er(n, d, rng.random()).unwrap();
        return KmpInstance::new(
            g,
            kc,
            [1, 1, 2][rng.random_range(0..3)],
            [0.0, 0.3, 0.5, 1.0][rng.random_range(0..4)],
            rng.random_range(1..=2),
            (0..kc).map(|_| [1, 1, 2][rng.random_range(0..3)]).collect(),
            (0..n).map(|_| rng.random_range(1..=4)).collect(),
            (0..kc).map(|_| rng.random_range(1..=n.max(2) as u32)).collect(),
        )
        .unwrap();
    }
}

/// Fixed battery for the linearization check: n·|K| ≤ 9, q up to 3.
pub fn linearization_battery() -> Vec<KmpInstance> {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut out = vec![
        // triangle with a single shared key
        KmpInstance::uniform(Graph::complete(3), 1, 1, 1.0, 1, 1, 1, 3).unwrap(),
        // path with two keys
        KmpInstance::new(Graph::path(3), 2, 1, 1.0, 1, vec![1, 1], vec![1, 1, 1], vec![3, 3]).unwrap(),
        // q above the pool
        KmpInstance::uniform(Graph::path(2), 2, 3, 1.0, 1, 1, 2, 2).unwrap(),
        KmpInstance::uniform(Graph::star(4), 2, 2, 0.0, 1, 1, 2, 4).unwrap(),
        KmpInstance::uniform(Graph::complete(3), 3, 2, 0.5, 1, 1, 3, 3).unwrap(),
    ];
    while out.len() < 60 {
        out.push(random_instance(&mut rng, 4, 4, 9));
    }
    out
}

/// Mean edge count of G(n, d) conditioned on connectivity, by rejection
/// sampling with its own RNG and adjacency-matrix connectivity test.
#[allow(clippy::needless_range_loop)]
pub fn connected_er_mean_edges(n: usize, d: f64, samples: usize, seed: u64) -> f64 {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut total = 0usize;
    let mut kept = 0usize;
    let mut adj = vec![vec![false; n]; n];
    while kept < samples {
        let mut edges = 0;
        for i in 0..n {
            for j in i + 1..n {
                let on = rng.random::<f64>() < d;
                adj[i][j] = on;
                adj[j][i] = on;
                edges += usize::from(on);
            }
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for u in 0..n {
                if adj[v][u] && !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        if seen.iter().all(|&s| s) {
            total += edges;
            kept += 1;
        }
    }
    total as f64 / samples as f64
}

/// `connected_er_mean_edges(10, 0.2, 100_000, 7)`, frozen.
pub const CONNECTED_ER_MEAN_N10_D02: f64 = 11.94145;

/// A result's JSON with `wall_time` removed.
pub fn json_without_time<T: serde::Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).unwrap();
    if let Some(obj) = v.as_object_mut() {
        obj.remove("wall_time");
    }
    serde_json::to_string(&v).unwrap()
}

pub const A: usize = 0;
pub const B: usize = 1;
pub const C: usize = 2;
pub const D: usize = 3;

/// Triangle; A and B share one key, both share two with C; q = 2.
pub fn relay_through_c() -> (KmpInstance, KeyAssignment) {
    let inst = KmpInstance::uniform(Graph::complete(3), 8, 2, 1.0, 1, 1, 4, 3).unwrap();
    let rings = [vec![1, 3, 4, 5], vec![5, 6, 7], vec![3, 4, 6, 7]];
    (inst, KeyAssignment::from_rings(8, &rings).unwrap())
}

/// Triangle A, B, C plus pendant D on B; D shares nothing with B; q = 1.
pub fn isolated_d() -> (KmpInstance, KeyAssignment) {
    let g = Graph::new(4, [(A, B), (A, C), (B, C), (B, D)]).unwrap();
    let inst = KmpInstance::uniform(g, 11, 1, 1.0, 1, 1, 3, 4).unwrap();
    let rings = [vec![6, 7, 9], vec![2, 6, 8], vec![3, 7, 8], vec![4, 5, 10]];
    (inst, KeyAssignment::from_rings(11, &rings).unwrap())
}
