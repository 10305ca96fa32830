mod common;

use grounded_core::graph::generate::{directed_path, LeaderPosition};
use grounded_core::graph::io::{from_json, from_text, to_json, to_text};
use grounded_core::{spectral, Error, LeaderGraph, Mode};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_and_json_round_trip(seed in any::<u64>()) {
        for g in common::generator_family(seed) {
            prop_assert_eq!(&from_text(&to_text(&g)).unwrap(), &g);
            prop_assert_eq!(&from_json(&to_json(&g)).unwrap(), &g);
        }
    }

    #[test]
    fn leader_degree_sum_is_boundary(seed in any::<u64>()) {
        for g in common::generator_family(seed) {
            let s = g.degree_stats();
            prop_assert_eq!(s.leader_deg.iter().sum::<usize>(), g.edge_boundary(g.leaders()).unwrap());
            prop_assert_eq!(s.boundary_s, g.edge_boundary(g.leaders()).unwrap());
            for (i, &f) in s.followers.iter().enumerate() {
                let follower_in = g.in_neighbors(f).iter().filter(|&&w| !g.is_leader(w)).count();
                prop_assert_eq!(s.in_deg[i], follower_in + s.leader_deg[i]);
                prop_assert!(s.gamma_min <= s.leader_deg[i] && s.leader_deg[i] <= s.gamma_max);
            }
        }
    }

    #[test]
    fn grounded_inverse_is_nonnegative(seed in any::<u64>()) {
        let g = common::random_directed(seed, 15);
        let l = g.grounded_laplacian().unwrap();
        let inv = spectral::inverse(&l.matrix).unwrap();
        prop_assert!(inv.iter().all(|&x| x >= -1e-12));
        if g.mode() == Mode::Undirected {
            prop_assert_eq!(&l.matrix, &l.matrix.transpose());
        }
    }

    #[test]
    fn counterpart_preserves_leaders_and_reachability(seed in any::<u64>()) {
        let g = common::random_directed(seed, 15);
        let u = g.undirected_counterpart().unwrap();
        prop_assert_eq!(u.leaders(), g.leaders());
        prop_assert!(u.all_reachable());
        prop_assert!(matches!(u.undirected_counterpart(), Err(Error::AlreadyUndirected)));
        prop_assert_eq!(u.as_undirected(), u.clone());
        let l = u.grounded_laplacian().unwrap().matrix;
        prop_assert_eq!(&l, &l.transpose());
    }
}

#[test]
fn path_closeness_closed_form() {
    for k in 1..40 {
        let g = directed_path(k, LeaderPosition::End).unwrap();
        let m = k + 1;
        assert_eq!(g.closeness_centrality(k).unwrap(), (m * (m - 1) / 2) as f64);
    }
}

#[test]
fn leader_adjacent_to_everyone() {
    let edges: Vec<_> = (0..5).map(|f| (5, f)).collect();
    let g = LeaderGraph::new(6, Mode::Directed, &edges, &[5]).unwrap();
    assert_eq!(g.closeness_centrality(5).unwrap(), 5.0);
}

#[test]
fn directed_star_counterpart() {
    let g = LeaderGraph::new(5, Mode::Directed, &[(4, 0), (0, 1), (0, 2), (0, 3)], &[4]).unwrap();
    let u = g.undirected_counterpart().unwrap();
    assert_eq!(u.degree_stats().in_deg, vec![4, 1, 1, 1]);
}
