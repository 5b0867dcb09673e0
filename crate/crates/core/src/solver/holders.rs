//! Enumeration of admissible holder sets for a single key.
//!
//! A holder set S is the set of vertices whose rings contain a key. It is
//! admissible when every v in S has at most `nb_cap[v]` neighbors inside S
//! and no vertex of S is isolated in the induced subgraph G[S]. Dropping an
//! isolated holder never breaks a constraint and never loses a secure edge,
//! so some optimal assignment uses only admissible sets.

use std::collections::HashSet;

use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct HolderSet {
    /// Ascending.
    pub vertices: Vec<usize>,
    /// Indices of the edges of G[S].
    pub edges: Vec<usize>,
}

fn within_caps(g: &Graph, nb_cap: &[u32], set: &[usize]) -> bool {
    set.iter().all(|&v| {
        let inside = g.neighbors(v).iter().filter(|u| set.binary_search(u).is_ok()).count();
        inside as u32 <= nb_cap[v]
    })
}

/// Connected admissible sets with 2..=max_size vertices, sorted.
fn connected_sets(g: &Graph, nb_cap: &[u32], max_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut level: Vec<Vec<usize>> = g
        .edges()
        .iter()
        .map(|&(i, j)| vec![i, j])
        .filter(|s| within_caps(g, nb_cap, s))
        .collect();
    // caps only tighten as a set grows, and every connected set is reached
    // from a connected subset one vertex smaller
    for _ in 2..max_size {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for s in &level {
            for &v in s {
                for &u in g.neighbors(v) {
                    if s.binary_search(&u).is_ok() {
                        continue;
                    }
                    let mut t = s.clone();
                    let at = t.binary_search(&u).unwrap_err();
                    t.insert(at, u);
                    if within_caps(g, nb_cap, &t) && seen.insert(t.clone()) {
                        next.push(t);
                    }
                }
            }
        }
        out.append(&mut level);
        level = next;
    }
    if max_size >= 2 {
        out.append(&mut level);
    }
    out.sort();
    out
}

/// All admissible holder sets with at most `max_size` vertices: unions of
/// pairwise non-adjacent connected admissible sets.
pub(crate) fn holder_sets(g: &Graph, nb_cap: &[u32], max_size: usize) -> Vec<HolderSet> {
    let comps = connected_sets(g, nb_cap, max_size);
    let mut blocked = vec![0u32; g.vertex_count()];
    let mut union = Vec::new();
    let mut out = Vec::new();
    extend(g, &comps, 0, max_size, &mut blocked, &mut union, &mut out);
    out.sort();
    out.into_iter()
        .map(|vertices| {
            let mut edges = Vec::new();
            for (a, &i) in vertices.iter().enumerate() {
                for &j in &vertices[a + 1..] {
                    if let Some(e) = g.edge_index(i, j) {
                        edges.push(e);
                    }
                }
            }
            HolderSet { vertices, edges }
        })
        .collect()
}

fn extend(
    g: &Graph,
    comps: &[Vec<usize>],
    start: usize,
    room: usize,
    blocked: &mut [u32],
    union: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    for (idx, comp) in comps.iter().enumerate().skip(start) {
        if comp.len() > room || comp.iter().any(|&v| blocked[v] > 0) {
            continue;
        }
        let mark = |blocked: &mut [u32], delta: i32| {
            for &v in comp {
                blocked[v] = blocked[v].wrapping_add_signed(delta);
                for &u in g.neighbors(v) {
                    blocked[u] = blocked[u].wrapping_add_signed(delta);
                }
            }
        };
        mark(blocked, 1);
        union.extend_from_slice(comp);
        let mut set = union.clone();
        set.sort_unstable();
        out.push(set);
        extend(g, comps, idx + 1, room - comp.len(), blocked, union, out);
        union.truncate(union.len() - comp.len());
        mark(blocked, -1);
    }
}
