//! Secure-link structure of a key assignment and the naive pairwise baseline.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::Graph;
use crate::instance::{derive_z, evaluate, KeyAssignment, KmpInstance};

/// The instance graph restricted to edges whose endpoints share >= q keys.
#[derive(Debug, Clone, PartialEq)]
pub struct SecureGraph {
    pub graph: Graph,
    /// Component label per vertex, `0..component_count`.
    pub component: Vec<usize>,
    pub component_count: usize,
}

impl SecureGraph {
    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Vertices with no secure link.
    pub fn isolated(&self) -> Vec<usize> {
        (0..self.graph.vertex_count())
            .filter(|&v| self.graph.degree(v) == 0)
            .collect()
    }
}

pub fn secure_graph(inst: &KmpInstance, a: &KeyAssignment) -> Result<SecureGraph> {
    let z = derive_z(inst, a)?;
    let mut secure = z.into_iter();
    let graph = inst.graph().filter_edges(|_, _| secure.next().unwrap_or(false));
    let (component, component_count) = graph.components();
    Ok(SecureGraph {
        graph,
        component,
        component_count,
    })
}

/// Every pair of vertices can reach each other over secure links.
pub fn key_path_connected(sg: &SecureGraph) -> bool {
    sg.component_count <= 1
}

/// Which edges the naive scheme must secure with dedicated keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NaiveBaseline {
    /// A spanning tree, n - 1 edges.
    #[default]
    SpanningTree,
    /// Every edge of the graph.
    AllEdges,
}

/// Keys a fully pairwise scheme needs when each secured edge gets q keys of
/// its own and no key is reused.
pub fn naive_pairwise_key_count(g: &Graph, q: u32, baseline: NaiveBaseline) -> Result<usize> {
    let edges = match baseline {
        NaiveBaseline::SpanningTree => g.spanning_tree_edge_count()?,
        NaiveBaseline::AllEdges => {
            if !g.is_connected() {
                return Err(crate::error::KmpError::Disconnected);
            }
            g.edge_count()
        }
    };
    Ok(q as usize * edges)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveComparison {
    pub baseline: NaiveBaseline,
    pub naive_keys: usize,
    pub key_pool: usize,
    /// Keys the naive scheme needs beyond the pool (0 if the pool suffices).
    pub additional_keys: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentReport {
    pub feasible: bool,
    pub objective: usize,
    pub edge_count: usize,
    pub violation_count: usize,
    pub key_usage: Vec<usize>,
    pub ring_sizes: Vec<usize>,
    pub memory_used: Vec<u64>,
    pub secure_components: usize,
    pub isolated_vertices: Vec<usize>,
    pub key_path_connected: bool,
    pub naive: NaiveComparison,
}

pub fn assignment_report(
    inst: &KmpInstance,
    a: &KeyAssignment,
    baseline: NaiveBaseline,
) -> Result<AssignmentReport> {
    let feas = evaluate(inst, a)?;
    let sg = secure_graph(inst, a)?;
    let n = inst.vertex_count();
    let naive_keys = naive_pairwise_key_count(inst.graph(), inst.q(), baseline)?;
    Ok(AssignmentReport {
        feasible: feas.feasible,
        objective: feas.objective,
        edge_count: inst.graph().edge_count(),
        violation_count: feas.violations.len(),
        key_usage: (0..inst.key_count()).map(|k| a.key_usage(k)).collect(),
        ring_sizes: (0..n).map(|i| a.key_ring(i).len()).collect(),
        memory_used: (0..n)
            .map(|i| {
                a.key_ring(i)
                    .into_iter()
                    .map(|k| u64::from(inst.mem_per_key()[k]))
                    .sum()
            })
            .collect(),
        secure_components: sg.component_count,
        isolated_vertices: sg.isolated(),
        key_path_connected: key_path_connected(&sg),
        naive: NaiveComparison {
            baseline,
            naive_keys,
            key_pool: inst.key_count(),
            additional_keys: naive_keys.saturating_sub(inst.key_count()),
        },
    })
}

fn list(values: &[impl fmt::Display]) -> String {
    values
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

impl fmt::Display for AssignmentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "feasible:            {} ({} violations)",
            self.feasible, self.violation_count
        )?;
        writeln!(f, "secure edges:        {} / {}", self.objective, self.edge_count)?;
        writeln!(f, "secure components:   {}", self.secure_components)?;
        writeln!(f, "key-path connected:  {}", self.key_path_connected)?;
        if !self.isolated_vertices.is_empty() {
            writeln!(f, "isolated vertices:   {}", list(&self.isolated_vertices))?;
        }
        writeln!(f, "key usage:           {}", list(&self.key_usage))?;
        writeln!(f, "ring sizes:          {}", list(&self.ring_sizes))?;
        writeln!(f, "memory used:         {}", list(&self.memory_used))?;
        let what = match self.naive.baseline {
            NaiveBaseline::SpanningTree => "spanning tree",
            NaiveBaseline::AllEdges => "all edges",
        };
        write!(
            f,
            "naive pairwise ({what}): {} keys, pool {}, {} additional",
            self.naive.naive_keys, self.naive.key_pool, self.naive.additional_keys
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::KmpError;

    /// Triangle A, B, C plus D attached to B; single-key scheme.
    fn single_key_example() -> (KmpInstance, KeyAssignment) {
        let g = Graph::new(4, [(0, 1), (0, 2), (1, 2), (1, 3)]).unwrap();
        let inst = KmpInstance::uniform(g, 11, 1, 1.0, 1, 1, 3, 4).unwrap();
        let rings = [vec![6, 7, 9], vec![2, 6, 8], vec![3, 7, 8], vec![4, 5, 10]];
        (inst, KeyAssignment::from_rings(11, &rings).unwrap())
    }

    #[test]
    fn isolated_vertex_in_single_key_example() {
        let (inst, a) = single_key_example();
        let sg = secure_graph(&inst, &a).unwrap();
        assert_eq!(sg.component, vec![0, 0, 0, 1]);
        assert_eq!(sg.isolated(), vec![3]);
        assert!(!key_path_connected(&sg));
    }

    #[test]
    fn trivial_secure_graphs() {
        let (inst, _) = single_key_example();
        let sg = secure_graph(&inst, &KeyAssignment::empty(4, 11)).unwrap();
        assert_eq!((sg.edge_count(), sg.component_count), (0, 4));

        let two = KmpInstance::uniform(Graph::complete(3), 2, 2, 1.0, 1, 1, 2, 3).unwrap();
        let all = KeyAssignment::from_rings(2, &[vec![0, 1], vec![0, 1], vec![0, 1]]).unwrap();
        let sg = secure_graph(&two, &all).unwrap();
        assert_eq!(&sg.graph, two.graph());
        assert!(key_path_connected(&sg));

        let single = KmpInstance::uniform(Graph::new(1, []).unwrap(), 1, 1, 0.0, 1, 1, 1, 1).unwrap();
        let sg = secure_graph(&single, &KeyAssignment::empty(1, 1)).unwrap();
        assert!(key_path_connected(&sg));
    }

    #[test]
    fn naive_counts() {
        let spanning = NaiveBaseline::SpanningTree;
        assert_eq!(naive_pairwise_key_count(&Graph::path(20), 2, spanning), Ok(38));
        assert_eq!(naive_pairwise_key_count(&Graph::path(2), 1, spanning), Ok(1));
        assert_eq!(naive_pairwise_key_count(&Graph::star(6), 2, spanning), Ok(10));
        assert_eq!(
            naive_pairwise_key_count(&Graph::complete(4), 2, NaiveBaseline::AllEdges),
            Ok(12)
        );
        let split = Graph::new(3, [(0, 1)]).unwrap();
        assert_eq!(
            naive_pairwise_key_count(&split, 1, spanning),
            Err(KmpError::Disconnected)
        );
    }

    #[test]
    fn report_of_zero_assignment() {
        let (inst, _) = single_key_example();
        let r = assignment_report(&inst, &KeyAssignment::empty(4, 11), NaiveBaseline::SpanningTree)
            .unwrap();
        assert_eq!((r.objective, r.secure_components), (0, 4));
        assert_eq!(r.naive.naive_keys, 3);
        assert_eq!(r.naive.additional_keys, 0);
        let text = r.to_string();
        assert!(text.contains("secure edges:        0 / 4"));
        assert!(text.contains("isolated vertices:   0 1 2 3"));
    }

    #[test]
    fn report_of_triangle_optimum() {
        let inst = KmpInstance::uniform(Graph::complete(3), 1, 1, 1.0, 1, 1, 1, 3).unwrap();
        let best = crate::solver::brute_force(&inst).unwrap().incumbent;
        let r = assignment_report(&inst, &best, NaiveBaseline::SpanningTree).unwrap();
        assert_eq!(r.objective, 3);
        assert_eq!(r.secure_components, 1);
        assert_eq!(r.key_usage, vec![3]);
        assert!(r.key_path_connected);
    }
}
