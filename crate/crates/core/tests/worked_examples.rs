//! Small hand-built instances with known secure-link structure.

mod common;

use kmp_core::analysis::{key_path_connected, naive_pairwise_key_count, secure_graph, NaiveBaseline};
use kmp_core::graph::{generate_er, Graph};
use kmp_core::instance::{derive_z, evaluate, shared_keys, KeyAssignment, KmpInstance};
use kmp_core::solver::{brute_force, greedy_heuristic, solve_bb, SolveStatus, SolverConfig};

use common::{isolated_d, relay_through_c, A, B, C, D};

#[test]
fn relay_example() {
    let (inst, a) = relay_through_c();
    assert_eq!(shared_keys(&a, A, B), Ok(1));
    assert_eq!(shared_keys(&a, A, C), Ok(2));
    assert_eq!(shared_keys(&a, B, C), Ok(2));
    // edges (A,B), (A,C), (B,C)
    assert_eq!(derive_z(&inst, &a).unwrap(), vec![false, true, true]);
    assert!(key_path_connected(&secure_graph(&inst, &a).unwrap()));
    assert!(evaluate(&inst, &a).unwrap().feasible);
}

#[test]
fn isolated_example() {
    let (inst, a) = isolated_d();
    assert_eq!(shared_keys(&a, B, D), Ok(0));
    let sg = secure_graph(&inst, &a).unwrap();
    assert_eq!(sg.isolated(), vec![D]);
    assert!(!key_path_connected(&sg));
    assert_eq!(evaluate(&inst, &a).unwrap().objective, 3);
}

#[test]
fn naive_pairwise_count_for_twenty_nodes() {
    for seed in [1, 2, 3] {
        let g = generate_er(20, 0.2, seed).unwrap();
        assert_eq!(naive_pairwise_key_count(&g, 2, NaiveBaseline::SpanningTree), Ok(38));
    }
    let extra = 38 - 20;
    assert_eq!(extra, 18);
}

#[test]
fn small_optima_agree_across_solvers() {
    let path = KmpInstance::new(Graph::path(3), 2, 1, 1.0, 1, vec![1, 1], vec![1, 1, 1], vec![3, 3])
        .unwrap();
    let tri = KmpInstance::uniform(Graph::complete(3), 1, 1, 1.0, 1, 1, 1, 3).unwrap();
    for (inst, opt) in [(path, 2), (tri, 3)] {
        let bb = solve_bb(&inst, &SolverConfig::default()).unwrap();
        assert_eq!((bb.status, bb.objective()), (SolveStatus::Optimal, opt));
        assert_eq!(brute_force(&inst).unwrap().objective(), opt);
        let greedy = evaluate(&inst, &greedy_heuristic(&inst, 0)).unwrap();
        assert!(greedy.feasible && greedy.objective <= opt && greedy.objective >= 1);
    }
}

#[test]
fn triangle_full_assignment_is_feasible() {
    let inst = KmpInstance::uniform(Graph::complete(3), 1, 1, 1.0, 1, 1, 1, 3).unwrap();
    let all = KeyAssignment::from_rings(1, &[vec![0], vec![0], vec![0]]).unwrap();
    let r = evaluate(&inst, &all).unwrap();
    assert!(r.feasible);
    assert_eq!(r.objective, 3);
}
