//! Deterministic graph generators.
//!
//! Followers always get ids `0..k` and leaders follow them, so the
//! grounded Laplacian rows line up with follower ids.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{LeaderGraph, Mode};
use crate::error::{Error, Result};

/// Where the leader sits in a line of `k + 1` vehicles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeaderPosition {
    End,
    /// Vehicle slot `⌊(k+1)/2⌋`.
    Middle,
    /// Explicit vehicle slot in `0..=k`.
    Index(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphKind {
    DirectedPath { followers: usize, leader: LeaderPosition },
    DirectedCyclePlusLeader { cycle: usize },
    DirectedRandomTree { followers: usize, extra_leaders: usize, seed: u64 },
    /// Directed `cycle`-cycle with `leaders` leaders spread evenly around it.
    BalancedCycleFamily { cycle: usize, leaders: usize },
    UndirectedPath { followers: usize },
    /// Random spanning arborescence plus extra follower edges, each present
    /// with probability `edge_prob` in a random direction.
    RandomDirected { followers: usize, edge_prob: f64, leaders: usize, seed: u64 },
    RandomUndirected { followers: usize, edge_prob: f64, leaders: usize, seed: u64 },
}

pub fn generate(kind: &GraphKind) -> Result<LeaderGraph> {
    match *kind {
        GraphKind::DirectedPath { followers, leader } => directed_path(followers, leader),
        GraphKind::DirectedCyclePlusLeader { cycle } => directed_cycle_plus_leader(cycle),
        GraphKind::DirectedRandomTree { followers, extra_leaders, seed } => {
            directed_random_tree(followers, extra_leaders, seed)
        }
        GraphKind::BalancedCycleFamily { cycle, leaders } => balanced_cycle_family(cycle, leaders),
        GraphKind::UndirectedPath { followers } => undirected_path(followers),
        GraphKind::RandomDirected { followers, edge_prob, leaders, seed } => {
            random_graph(Mode::Directed, followers, edge_prob, leaders, seed)
        }
        GraphKind::RandomUndirected { followers, edge_prob, leaders, seed } => {
            random_graph(Mode::Undirected, followers, edge_prob, leaders, seed)
        }
    }
}

fn need(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::BadParams(msg.to_string()))
    }
}

/// Line of `k` followers plus one leader, edges pointing away from the leader.
pub fn directed_path(k: usize, leader: LeaderPosition) -> Result<LeaderGraph> {
    need(k >= 1, "path needs at least one follower")?;
    let p = match leader {
        LeaderPosition::End => 0,
        LeaderPosition::Middle => k.div_ceil(2),
        LeaderPosition::Index(i) => {
            need(i <= k, "leader slot beyond the end of the path")?;
            i
        }
    };
    // follower ids follow slot order with the leader slot skipped
    let id = |slot: usize| if slot == p { k } else if slot < p { slot } else { slot - 1 };
    let mut edges = Vec::with_capacity(k);
    for slot in 0..p {
        edges.push((id(slot + 1), id(slot)));
    }
    for slot in p + 1..=k {
        edges.push((id(slot - 1), id(slot)));
    }
    LeaderGraph::new(k + 1, Mode::Directed, &edges, &[k])
}

pub fn undirected_path(k: usize) -> Result<LeaderGraph> {
    need(k >= 1, "path needs at least one follower")?;
    let mut edges = vec![(k, 0)];
    edges.extend((1..k).map(|i| (i - 1, i)));
    LeaderGraph::new(k + 1, Mode::Undirected, &edges, &[k])
}

/// Directed cycle `0 -> 1 -> ... -> k-1 -> 0` with one leader feeding node 0.
pub fn directed_cycle_plus_leader(k: usize) -> Result<LeaderGraph> {
    balanced_cycle_family(k, 1)
}

pub fn balanced_cycle_family(k: usize, leaders: usize) -> Result<LeaderGraph> {
    need(k >= 3, "directed cycle needs at least three followers")?;
    need(leaders >= 1, "need at least one leader")?;
    let mut edges: Vec<_> = (0..k).map(|i| (i, (i + 1) % k)).collect();
    for l in 0..leaders {
        edges.push((k + l, l * k / leaders));
    }
    let ids: Vec<usize> = (k..k + leaders).collect();
    LeaderGraph::new(k + leaders, Mode::Directed, &edges, &ids)
}

/// Random relabelling of follower ids; leaders keep theirs.
fn shuffle_followers(k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..k).collect();
    perm.shuffle(rng);
    perm
}

/// Random arborescence over `k` followers rooted at a single leader, plus
/// `extra_leaders` leaders each attached to one random follower.
pub fn directed_random_tree(k: usize, extra_leaders: usize, seed: u64) -> Result<LeaderGraph> {
    need(k >= 1, "tree needs at least one follower")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let perm = shuffle_followers(k, &mut rng);
    let mut edges = vec![(k, perm[0])];
    for c in 1..k {
        let parent = rng.random_range(0..c);
        edges.push((perm[parent], perm[c]));
    }
    for l in 1..=extra_leaders {
        edges.push((k + l, rng.random_range(0..k)));
    }
    let ids: Vec<usize> = (k..=k + extra_leaders).collect();
    LeaderGraph::new(k + 1 + extra_leaders, Mode::Directed, &edges, &ids)
}

fn random_graph(mode: Mode, k: usize, edge_prob: f64, leaders: usize, seed: u64) -> Result<LeaderGraph> {
    need(k >= 1, "need at least one follower")?;
    need(leaders >= 1, "need at least one leader")?;
    need((0.0..=1.0).contains(&edge_prob), "edge probability must lie in [0, 1]")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let perm = shuffle_followers(k, &mut rng);
    let mut linked = vec![vec![false; k]; k];
    let mut edges = vec![(k, perm[0])];
    for c in 1..k {
        let parent = rng.random_range(0..c);
        linked[parent][c] = true;
        linked[c][parent] = true;
        edges.push((perm[parent], perm[c]));
    }
    for a in 0..k {
        for b in a + 1..k {
            if !linked[a][b] && rng.random_bool(edge_prob) {
                if rng.random_bool(0.5) {
                    edges.push((perm[a], perm[b]));
                } else {
                    edges.push((perm[b], perm[a]));
                }
            }
        }
    }
    for l in 1..leaders {
        let fanout = rng.random_range(1..=2.min(k));
        let mut targets: Vec<usize> = (0..k).collect();
        targets.shuffle(&mut rng);
        edges.extend(targets[..fanout].iter().map(|&t| (k + l, t)));
    }
    let ids: Vec<usize> = (k..k + leaders).collect();
    LeaderGraph::new(k + leaders, mode, &edges, &ids)
}
