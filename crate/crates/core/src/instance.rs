//! Problem instances, key assignments and the quadratic-form validator.
//!
//! [`evaluate`] scores an assignment against the original model with its
//! products `x_ik * x_jk` computed directly. It is the reference semantics
//! every other component (linearized model, solver, heuristic) is checked
//! against.

use serde::{Deserialize, Serialize};

use crate::error::{KmpError, Result};
use crate::graph::Graph;

/// A q-composite key management instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceJson", into = "InstanceJson")]
pub struct KmpInstance {
    graph: Graph,
    key_count: usize,
    q: u32,
    p: f64,
    alpha: u32,
    mem_per_key: Vec<u32>,
    capacity: Vec<u32>,
    usage_limit: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    graph: Graph,
    key_count: usize,
    q: u32,
    p: f64,
    alpha: u32,
    mem_per_key: Vec<u32>,
    capacity: Vec<u32>,
    usage_limit: Vec<u32>,
}

impl TryFrom<InstanceJson> for KmpInstance {
    type Error = KmpError;

    fn try_from(raw: InstanceJson) -> Result<Self> {
        KmpInstance::new(
            raw.graph,
            raw.key_count,
            raw.q,
            raw.p,
            raw.alpha,
            raw.mem_per_key,
            raw.capacity,
            raw.usage_limit,
        )
    }
}

impl From<KmpInstance> for InstanceJson {
    fn from(inst: KmpInstance) -> Self {
        InstanceJson {
            graph: inst.graph,
            key_count: inst.key_count,
            q: inst.q,
            p: inst.p,
            alpha: inst.alpha,
            mem_per_key: inst.mem_per_key,
            capacity: inst.capacity,
            usage_limit: inst.usage_limit,
        }
    }
}

impl KmpInstance {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        graph: Graph,
        key_count: usize,
        q: u32,
        p: f64,
        alpha: u32,
        mem_per_key: Vec<u32>,
        capacity: Vec<u32>,
        usage_limit: Vec<u32>,
    ) -> Result<Self> {
        let invalid = |msg: String| Err(KmpError::InvalidInstance(msg));
        let n = graph.vertex_count();
        if n == 0 {
            return invalid("graph has no vertices".into());
        }
        if !graph.is_connected() {
            return invalid("graph is not connected".into());
        }
        if key_count == 0 {
            return invalid("key pool is empty".into());
        }
        if q == 0 {
            return invalid("q must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&p) {
            return invalid(format!("p = {p} outside [0, 1]"));
        }
        if alpha == 0 {
            return invalid("alpha must be at least 1".into());
        }
        if mem_per_key.len() != key_count || usage_limit.len() != key_count {
            return invalid(format!(
                "per-key vectors must have {key_count} entries (got m: {}, t: {})",
                mem_per_key.len(),
                usage_limit.len()
            ));
        }
        if capacity.len() != n {
            return invalid(format!(
                "capacity must have {n} entries (got {})",
                capacity.len()
            ));
        }
        if let Some(k) = mem_per_key.iter().position(|&m| m == 0) {
            return invalid(format!("m_{k} must be positive"));
        }
        if let Some(i) = capacity.iter().position(|&c| c == 0) {
            return invalid(format!("c_{i} must be positive"));
        }
        if let Some(k) = usage_limit.iter().position(|&t| t == 0) {
            return invalid(format!("t_{k} must be at least 1"));
        }
        Ok(KmpInstance {
            graph,
            key_count,
            q,
            p,
            alpha,
            mem_per_key,
            capacity,
            usage_limit,
        })
    }

    /// Instance with the same m, c and t for every key / vertex.
    #[allow(clippy::too_many_arguments)]
    pub fn uniform(
        graph: Graph,
        key_count: usize,
        q: u32,
        p: f64,
        alpha: u32,
        mem: u32,
        capacity: u32,
        usage_limit: u32,
    ) -> Result<Self> {
        let n = graph.vertex_count();
        Self::new(
            graph,
            key_count,
            q,
            p,
            alpha,
            vec![mem; key_count],
            vec![capacity; n],
            vec![usage_limit; key_count],
        )
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn key_count(&self) -> usize {
        self.key_count
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn mem_per_key(&self) -> &[u32] {
        &self.mem_per_key
    }

    pub fn capacity(&self) -> &[u32] {
        &self.capacity
    }

    pub fn usage_limit(&self) -> &[u32] {
        &self.usage_limit
    }

    /// Right-hand side p|N(i)| + alpha of the neighborhood-use constraint.
    pub fn neighborhood_rhs(&self, i: usize) -> f64 {
        self.p * self.graph.degree(i) as f64 + f64::from(self.alpha)
    }

    /// Largest integer count that satisfies the neighborhood-use constraint
    /// at `i` under the same exact comparison [`evaluate`] performs.
    pub fn neighborhood_cap(&self, i: usize) -> u32 {
        self.neighborhood_rhs(i).floor() as u32
    }

    pub fn check_assignment(&self, a: &KeyAssignment) -> Result<()> {
        if a.vertex_count() != self.vertex_count() || a.key_count() != self.key_count {
            return Err(KmpError::DimensionMismatch {
                got_rows: a.vertex_count(),
                got_cols: a.key_count(),
                want_rows: self.vertex_count(),
                want_cols: self.key_count,
            });
        }
        Ok(())
    }
}

/// Binary key-ring matrix: `get(i, k)` is true iff key `k` is stored on `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "AssignmentJson", into = "AssignmentJson")]
pub struct KeyAssignment {
    n: usize,
    key_count: usize,
    bits: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct AssignmentJson {
    x: Vec<Vec<u8>>,
}

impl TryFrom<AssignmentJson> for KeyAssignment {
    type Error = KmpError;

    fn try_from(raw: AssignmentJson) -> Result<Self> {
        let n = raw.x.len();
        let key_count = raw.x.first().map_or(0, Vec::len);
        let mut a = KeyAssignment::empty(n, key_count);
        for (i, row) in raw.x.iter().enumerate() {
            if row.len() != key_count {
                return Err(KmpError::DimensionMismatch {
                    got_rows: n,
                    got_cols: row.len(),
                    want_rows: n,
                    want_cols: key_count,
                });
            }
            for (k, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => a.set(i, k, true),
                    other => {
                        return Err(KmpError::InvalidInstance(format!(
                            "x[{i}][{k}] = {other} is not binary"
                        )))
                    }
                }
            }
        }
        Ok(a)
    }
}

impl From<KeyAssignment> for AssignmentJson {
    fn from(a: KeyAssignment) -> Self {
        AssignmentJson { x: a.rows() }
    }
}

impl KeyAssignment {
    pub fn empty(n: usize, key_count: usize) -> Self {
        KeyAssignment {
            n,
            key_count,
            bits: vec![false; n * key_count],
        }
    }

    /// Builds an assignment from explicit key rings.
    pub fn from_rings(key_count: usize, rings: &[Vec<usize>]) -> Result<Self> {
        let mut a = Self::empty(rings.len(), key_count);
        for (i, ring) in rings.iter().enumerate() {
            for &k in ring {
                if k >= key_count {
                    return Err(KmpError::IndexOutOfRange {
                        index: k,
                        limit: key_count,
                    });
                }
                a.set(i, k, true);
            }
        }
        Ok(a)
    }

    /// Decodes the low `n * key_count` bits of `mask`, row-major.
    pub fn from_mask(n: usize, key_count: usize, mask: u64) -> Self {
        let bits = (0..n * key_count).map(|b| mask >> b & 1 == 1).collect();
        KeyAssignment { n, key_count, bits }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn key_count(&self) -> usize {
        self.key_count
    }

    pub fn get(&self, i: usize, k: usize) -> bool {
        self.bits[i * self.key_count + k]
    }

    pub fn set(&mut self, i: usize, k: usize, value: bool) {
        self.bits[i * self.key_count + k] = value;
    }

    pub fn key_ring(&self, i: usize) -> Vec<usize> {
        (0..self.key_count).filter(|&k| self.get(i, k)).collect()
    }

    /// Number of vertices holding key `k`.
    pub fn key_usage(&self, k: usize) -> usize {
        (0..self.n).filter(|&i| self.get(i, k)).count()
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.n)
            .map(|i| (0..self.key_count).map(|k| u8::from(self.get(i, k))).collect())
            .collect()
    }

    fn shared_unchecked(&self, i: usize, j: usize) -> usize {
        (0..self.key_count)
            .filter(|&k| self.get(i, k) && self.get(j, k))
            .count()
    }
}

/// |ring(i) ∩ ring(j)|.
pub fn shared_keys(a: &KeyAssignment, i: usize, j: usize) -> Result<usize> {
    for v in [i, j] {
        if v >= a.vertex_count() {
            return Err(KmpError::IndexOutOfRange {
                index: v,
                limit: a.vertex_count(),
            });
        }
    }
    Ok(a.shared_unchecked(i, j))
}

/// Secure-edge indicators in edge order: z_ij = 1 iff the endpoints share at
/// least q keys. For a fixed x this is the best z completion, since z only
/// appears in the objective and the sharing constraint.
pub fn derive_z(inst: &KmpInstance, a: &KeyAssignment) -> Result<Vec<bool>> {
    inst.check_assignment(a)?;
    let q = inst.q as usize;
    Ok(inst
        .graph
        .edges()
        .iter()
        .map(|&(i, j)| a.shared_unchecked(i, j) >= q)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConstraintKind {
    /// Σ_k m_k x_ik <= c_i, indexed by (i).
    Capacity,
    /// Σ_{j in N(i)} x_ik x_jk <= p|N(i)| + alpha, indexed by (i, k).
    NeighborhoodUse,
    /// Σ_i x_ik <= t_k, indexed by (k).
    GlobalUse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: ConstraintKind,
    pub index: Vec<usize>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub objective: usize,
    pub violations: Vec<Violation>,
}

/// Checks every constraint of the quadratic model and counts secure edges.
pub fn evaluate(inst: &KmpInstance, a: &KeyAssignment) -> Result<FeasibilityReport> {
    inst.check_assignment(a)?;
    let g = &inst.graph;
    let n = g.vertex_count();
    let kc = inst.key_count;
    let mut violations = Vec::new();

    for i in 0..n {
        let used: u64 = (0..kc)
            .filter(|&k| a.get(i, k))
            .map(|k| u64::from(inst.mem_per_key[k]))
            .sum();
        if used > u64::from(inst.capacity[i]) {
            violations.push(Violation {
                constraint: ConstraintKind::Capacity,
                index: vec![i],
                lhs: used as f64,
                rhs: f64::from(inst.capacity[i]),
            });
        }
    }

    for i in 0..n {
        let rhs = inst.neighborhood_rhs(i);
        for k in 0..kc {
            let lhs = g
                .neighbors(i)
                .iter()
                .filter(|&&j| a.get(i, k) && a.get(j, k))
                .count() as f64;
            if lhs > rhs {
                violations.push(Violation {
                    constraint: ConstraintKind::NeighborhoodUse,
                    index: vec![i, k],
                    lhs,
                    rhs,
                });
            }
        }
    }

    for k in 0..kc {
        let used = a.key_usage(k);
        if used > inst.usage_limit[k] as usize {
            violations.push(Violation {
                constraint: ConstraintKind::GlobalUse,
                index: vec![k],
                lhs: used as f64,
                rhs: f64::from(inst.usage_limit[k]),
            });
        }
    }

    let objective = derive_z(inst, a)?.into_iter().filter(|&z| z).count();
    Ok(FeasibilityReport {
        feasible: violations.is_empty(),
        objective,
        violations,
    })
}
