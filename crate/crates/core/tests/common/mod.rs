#![allow(dead_code)]

use grounded_core::graph::generate::{self, GraphKind, LeaderPosition};
use grounded_core::{LeaderGraph, Mode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_directed(seed: u64, max_followers: usize) -> LeaderGraph {
    let mut r = rng(seed ^ 0x5eed);
    let followers = r.random_range(1..=max_followers);
    let edge_prob = r.random_range(0.0..0.6);
    let leaders = r.random_range(1..=3);
    generate::generate(&GraphKind::RandomDirected { followers, edge_prob, leaders, seed }).unwrap()
}

pub fn random_undirected(seed: u64, max_followers: usize) -> LeaderGraph {
    let mut r = rng(seed ^ 0xface);
    let followers = r.random_range(1..=max_followers);
    let edge_prob = r.random_range(0.0..0.6);
    let leaders = r.random_range(1..=3);
    generate::generate(&GraphKind::RandomUndirected { followers, edge_prob, leaders, seed }).unwrap()
}

pub fn single_leader_tree(seed: u64, min: usize, max: usize) -> LeaderGraph {
    let k = rng(seed ^ 0x7e3).random_range(min..=max);
    generate::directed_random_tree(k, 0, seed).unwrap()
}

pub fn multi_leader_tree(seed: u64, min: usize, max: usize) -> LeaderGraph {
    let mut r = rng(seed ^ 0x3u64);
    let k = r.random_range(min..=max);
    let extra = r.random_range(1..=3);
    generate::directed_random_tree(k, extra, seed).unwrap()
}

/// Union of random edge-disjoint directed cycles on the followers, with
/// leaders attached so every weak component is reachable.
pub fn random_balanced(seed: u64, max_followers: usize) -> LeaderGraph {
    let mut r = rng(seed ^ 0xba1);
    let k = r.random_range(1..=max_followers);
    let mut used = std::collections::BTreeSet::new();
    let mut edges = Vec::new();
    for _ in 0..r.random_range(1..=3) {
        if k < 3 {
            break;
        }
        let len = r.random_range(3..=k);
        let mut nodes: Vec<usize> = (0..k).collect();
        for i in 0..len {
            let j = r.random_range(i..k);
            nodes.swap(i, j);
        }
        let cyc: Vec<(usize, usize)> = (0..len).map(|i| (nodes[i], nodes[(i + 1) % len])).collect();
        if cyc.iter().any(|&(a, b)| used.contains(&(a, b)) || used.contains(&(b, a))) {
            continue;
        }
        used.extend(cyc.iter().copied());
        edges.extend(cyc);
    }
    // weak components of the follower graph
    let mut comp: Vec<usize> = (0..k).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        if c[x] != x {
            let r = find(c, c[x]);
            c[x] = r;
        }
        c[x]
    }
    for &(a, b) in &edges {
        let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
        comp[ra] = rb;
    }
    let mut roots: Vec<usize> = (0..k).map(|v| find(&mut comp, v)).collect();
    roots.sort_unstable();
    roots.dedup();
    let mut leaders = Vec::new();
    for (i, root) in roots.iter().enumerate() {
        let members: Vec<usize> = (0..k).filter(|&v| find(&mut comp, v) == *root).collect();
        let l = k + i;
        leaders.push(l);
        edges.push((l, members[r.random_range(0..members.len())]));
        if r.random_bool(0.3) {
            let extra = members[r.random_range(0..members.len())];
            if !edges.contains(&(l, extra)) {
                edges.push((l, extra));
            }
        }
    }
    LeaderGraph::new(k + leaders.len(), Mode::Directed, &edges, &leaders).unwrap()
}

/// Every directed graph on `n` nodes whose last node is the only leader,
/// with no anti-parallel pairs and every follower reachable from the leader.
pub fn all_small_directed(n: usize) -> Vec<LeaderGraph> {
    let k = n - 1;
    let leader = k;
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    for leader_mask in 1u32..(1 << k) {
        let mut combos = 1usize;
        for _ in &pairs {
            combos *= 3;
        }
        for code in 0..combos {
            let mut edges: Vec<(usize, usize)> = (0..k).filter(|&f| leader_mask >> f & 1 == 1).map(|f| (leader, f)).collect();
            let mut c = code;
            for &(a, b) in &pairs {
                match c % 3 {
                    1 => edges.push((a, b)),
                    2 => edges.push((b, a)),
                    _ => {}
                }
                c /= 3;
            }
            let g = LeaderGraph::new(n, Mode::Directed, &edges, &[leader]).unwrap();
            if g.all_reachable() {
                out.push(g);
            }
        }
    }
    out
}

/// The generator family used for round trips and sweeps.
pub fn generator_family(seed: u64) -> Vec<LeaderGraph> {
    let mut r = rng(seed);
    let k = r.random_range(1..=12);
    let mut v = vec![
        generate::directed_path(k, LeaderPosition::End).unwrap(),
        generate::directed_path(k, LeaderPosition::Middle).unwrap(),
        generate::directed_path(k, LeaderPosition::Index(r.random_range(0..=k))).unwrap(),
        generate::undirected_path(k).unwrap(),
        generate::directed_random_tree(k, r.random_range(0..3), seed).unwrap(),
        random_directed(seed, 12),
        random_undirected(seed, 12),
    ];
    if k >= 3 {
        v.push(generate::directed_cycle_plus_leader(k).unwrap());
        v.push(generate::balanced_cycle_family(k, r.random_range(1..=2 * k)).unwrap());
    }
    v
}
