//! Undirected simple graphs and seeded Erdős–Rényi generation.
//!
//! Vertices are `0..n`. Edges are stored as `(i, j)` with `i < j`, sorted
//! lexicographically, which is also the JSON layout.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{KmpError, Result};

/// Cap on whole-graph redraws while looking for a connected G(n, d) sample.
pub const MAX_ER_ATTEMPTS: u32 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphJson> for Graph {
    type Error = KmpError;

    fn try_from(raw: GraphJson) -> Result<Self> {
        Graph::new(raw.n, raw.edges.into_iter().map(|[i, j]| (i, j)))
    }
}

impl From<Graph> for GraphJson {
    fn from(g: Graph) -> Self {
        GraphJson {
            n: g.n,
            edges: g.edges.into_iter().map(|(i, j)| [i, j]).collect(),
        }
    }
}

impl Graph {
    /// Builds a graph from an edge list. Endpoint order is irrelevant, but
    /// self-loops, duplicates and out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut normalized = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(KmpError::InvalidGraph(format!(
                    "edge ({a}, {b}) references a vertex outside 0..{n}"
                )));
            }
            if a == b {
                return Err(KmpError::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(KmpError::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(Self::from_sorted_unchecked(n, normalized))
    }

    fn from_sorted_unchecked(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in &edges {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Graph {
            n,
            edges,
            adjacency,
        }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Self::from_sorted_unchecked(n, edges)
    }

    pub fn path(n: usize) -> Self {
        Self::from_sorted_unchecked(n, (1..n).map(|j| (j - 1, j)).collect())
    }

    pub fn star(n: usize) -> Self {
        Self::from_sorted_unchecked(n, (1..n).map(|j| (0, j)).collect())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbor list N(i).
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    /// Position of edge {i, j} in [`Graph::edges`].
    pub fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        let key = (i.min(j), i.max(j));
        self.edges.binary_search(&key).ok()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edge_index(i, j).is_some()
    }

    /// 2|E| / (n(n-1)), or 0 when n <= 1.
    pub fn density(&self) -> f64 {
        if self.n <= 1 {
            return 0.0;
        }
        2.0 * self.edges.len() as f64 / (self.n as f64 * (self.n as f64 - 1.0))
    }

    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut reached = 1;
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for &u in &self.adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    reached += 1;
                    queue.push_back(u);
                }
            }
        }
        reached == self.n
    }

    /// Labels connected components `0..count` in order of their smallest vertex.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.n];
        let mut count = 0;
        for start in 0..self.n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &u in &self.adjacency[v] {
                    if label[u] == usize::MAX {
                        label[u] = count;
                        queue.push_back(u);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Number of edges in any spanning tree, n - 1.
    pub fn spanning_tree_edge_count(&self) -> Result<usize> {
        if !self.is_connected() {
            return Err(KmpError::Disconnected);
        }
        Ok(self.n.saturating_sub(1))
    }

    /// Keeps only the edges accepted by `keep`.
    pub fn filter_edges(&self, mut keep: impl FnMut(usize, usize) -> bool) -> Graph {
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(i, j)| keep(i, j))
            .collect();
        Self::from_sorted_unchecked(self.n, edges)
    }
}

/// Draws a connected G(n, d) graph.
///
/// The generator is ChaCha8 seeded with `seed` through `seed_from_u64`. Each
/// draw visits candidate pairs `(i, j)`, `i < j`, in lexicographic order and
/// keeps a pair when a uniform `f64` in `[0, 1)` is below `d`. Disconnected
/// draws are discarded and the whole graph is redrawn from the same stream,
/// at most [`MAX_ER_ATTEMPTS`] times. The accepted distribution is therefore
/// G(n, d) conditioned on connectivity, which biases edge counts upward.
pub fn generate_er(n: usize, density: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(KmpError::InvalidGraph("vertex count must be positive".into()));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(KmpError::InvalidGraph(format!(
            "edge probability {density} outside [0, 1]"
        )));
    }
    if n >= 2 && density == 0.0 {
        return Err(KmpError::UnsatisfiableDensity { n, density });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ER_ATTEMPTS {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < density {
                    edges.push((i, j));
                }
            }
        }
        let g = Graph::from_sorted_unchecked(n, edges);
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(KmpError::RetryExhausted {
        n,
        density,
        attempts: MAX_ER_ATTEMPTS,
    })
}
