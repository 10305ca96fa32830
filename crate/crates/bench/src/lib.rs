//! Fixture graphs shared by the benchmarks.

use grounded_core::graph::generate::{directed_path, LeaderPosition};
use grounded_core::{generate, GraphKind, LeaderGraph};

/// Random directed graph with `followers` followers and two leaders.
pub fn random_directed(followers: usize, seed: u64) -> LeaderGraph {
    generate(&GraphKind::RandomDirected { followers, edge_prob: 0.2, leaders: 2, seed }).expect("valid parameters")
}

pub fn platoon(followers: usize) -> LeaderGraph {
    directed_path(followers, LeaderPosition::Middle).expect("valid parameters")
}
