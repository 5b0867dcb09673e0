mod common;

use common::{connected_er_mean_edges, CONNECTED_ER_MEAN_N10_D02};
use kmp_core::graph::generate_er;

#[test]
fn frozen_connected_mean_reproduces() {
    assert_eq!(connected_er_mean_edges(10, 0.2, 100_000, 7), CONNECTED_ER_MEAN_N10_D02);
}

#[test]
fn mean_edge_count_tracks_connected_mean() {
    let total: usize = (1..=1000u64)
        .map(|seed| generate_er(10, 0.2, seed).unwrap().edge_count())
        .sum();
    let mean = total as f64 / 1000.0;
    let rel = (mean - CONNECTED_ER_MEAN_N10_D02).abs() / CONNECTED_ER_MEAN_N10_D02;
    assert!(rel <= 0.15, "mean {mean}");
}

#[test]
fn every_draw_is_connected_and_reproducible() {
    for seed in 0..200 {
        let g = generate_er(12, 0.25, seed).unwrap();
        assert!(g.is_connected());
        assert_eq!(g, generate_er(12, 0.25, seed).unwrap());
    }
}
