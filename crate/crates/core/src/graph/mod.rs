//! Leader–follower graphs.
//!
//! A [`LeaderGraph`] is a simple graph on nodes `0..n` with a designated
//! nonempty leader set. Leaders never listen to anyone, so in directed mode
//! they have in-degree zero and in undirected mode an edge touching a leader
//! is an attachment that only the follower end feels.
//!
//! Edges carry influence: `(a, b)` means `b` listens to `a`. Everything that
//! depends on degrees (grounded Laplacian, bounds, certificates) reads from
//! the adjacency built here.

use std::collections::{BTreeSet, VecDeque};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod generate;
pub mod io;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Directed,
    Undirected,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Directed => "directed",
            Mode::Undirected => "undirected",
        })
    }
}

/// Shape of the follower-induced subgraph, ignoring edge directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FollowerShape {
    /// Connected and acyclic.
    Tree,
    /// Acyclic with more than one component.
    Forest,
    Cyclic,
}

/// Serialized form shared by the JSON reader/writer.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphSpec {
    pub mode: Mode,
    pub nodes: usize,
    pub leaders: Vec<usize>,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "GraphSpec", try_from = "GraphSpec")]
pub struct LeaderGraph {
    n: usize,
    mode: Mode,
    leaders: Vec<usize>,
    edges: Vec<(usize, usize)>,
    is_leader: Vec<bool>,
    in_nbrs: Vec<Vec<usize>>,
    out_nbrs: Vec<Vec<usize>>,
}

impl From<LeaderGraph> for GraphSpec {
    fn from(g: LeaderGraph) -> Self {
        GraphSpec {
            mode: g.mode,
            nodes: g.n,
            leaders: g.leaders,
            edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

impl TryFrom<GraphSpec> for LeaderGraph {
    type Error = Error;

    fn try_from(spec: GraphSpec) -> Result<Self> {
        let edges: Vec<(usize, usize)> = spec.edges.iter().map(|e| (e[0], e[1])).collect();
        LeaderGraph::new(spec.nodes, spec.mode, &edges, &spec.leaders)
    }
}

/// Per-follower degree statistics, indexed in ascending follower order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub followers: Vec<usize>,
    /// Δ_i: every in-neighbor, leaders included.
    pub in_deg: Vec<usize>,
    /// δ_i: out-neighbors that are followers.
    pub out_deg: Vec<usize>,
    /// Γ_i: leader in-neighbors.
    pub leader_deg: Vec<usize>,
    pub gamma_max: usize,
    pub gamma_min: usize,
    /// |∂S|, the number of leader-to-follower edges.
    pub boundary_s: usize,
}

/// Grounded Laplacian restricted to followers.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundedLaplacian {
    pub matrix: DMatrix<f64>,
    /// `order[row]` is the follower node id of that row.
    pub order: Vec<usize>,
    pub mode: Mode,
}

impl GroundedLaplacian {
    pub fn dim(&self) -> usize {
        self.order.len()
    }

    pub fn row_of(&self, node: usize) -> Option<usize> {
        self.order.binary_search(&node).ok()
    }
}

impl LeaderGraph {
    /// Builds and validates a graph.
    ///
    /// In undirected mode `(a, b)` and `(b, a)` are the same edge and edges at
    /// a leader are stored leader-first.
    pub fn new(n: usize, mode: Mode, edges: &[(usize, usize)], leaders: &[usize]) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadParams("graph needs at least one node".into()));
        }
        if leaders.is_empty() {
            return Err(Error::EmptyLeaderSet);
        }
        let mut is_leader = vec![false; n];
        for &l in leaders {
            if l >= n {
                return Err(Error::NodeOutOfRange { node: l, n });
            }
            is_leader[l] = true;
        }
        let leaders: Vec<usize> = (0..n).filter(|&v| is_leader[v]).collect();
        if leaders.len() == n {
            return Err(Error::NoFollowers);
        }

        let mut seen = BTreeSet::new();
        let mut canon = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(Error::NodeOutOfRange { node: v, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            let e = match mode {
                Mode::Directed => {
                    if is_leader[b] {
                        return Err(Error::LeaderHasInEdge(b));
                    }
                    if seen.contains(&(b, a)) {
                        return Err(Error::AntiParallelPair(a, b));
                    }
                    (a, b)
                }
                Mode::Undirected => match (is_leader[a], is_leader[b]) {
                    (true, true) => return Err(Error::LeaderHasInEdge(b)),
                    (false, true) => (b, a),
                    (true, false) => (a, b),
                    (false, false) => (a.min(b), a.max(b)),
                },
            };
            if !seen.insert(e) {
                return Err(Error::DuplicateEdge(a, b));
            }
            canon.push(e);
        }
        canon.sort_unstable();

        let mut in_nbrs = vec![Vec::new(); n];
        let mut out_nbrs = vec![Vec::new(); n];
        for &(a, b) in &canon {
            out_nbrs[a].push(b);
            in_nbrs[b].push(a);
            if mode == Mode::Undirected && !is_leader[a] {
                out_nbrs[b].push(a);
                in_nbrs[a].push(b);
            }
        }
        for list in in_nbrs.iter_mut().chain(out_nbrs.iter_mut()) {
            list.sort_unstable();
        }

        Ok(LeaderGraph { n, mode, leaders, edges: canon, is_leader, in_nbrs, out_nbrs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn leaders(&self) -> &[usize] {
        &self.leaders
    }

    pub fn followers(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| !self.is_leader[v]).collect()
    }

    pub fn num_followers(&self) -> usize {
        self.n - self.leaders.len()
    }

    pub fn is_leader(&self, v: usize) -> bool {
        self.is_leader.get(v).copied().unwrap_or(false)
    }

    pub fn is_follower(&self, v: usize) -> bool {
        v < self.n && !self.is_leader[v]
    }

    /// Canonical, sorted edge list.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Nodes that `v` listens to.
    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.in_nbrs[v]
    }

    /// Nodes that listen to `v`.
    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out_nbrs[v]
    }

    /// True when `b` listens to `a`.
    pub fn has_influence(&self, a: usize, b: usize) -> bool {
        a < self.n && self.out_nbrs[a].binary_search(&b).is_ok()
    }

    /// Neighbors ignoring direction.
    fn undirected_nbrs(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.in_nbrs[v].iter().chain(self.out_nbrs[v].iter()).copied()
    }

    pub fn degree_stats(&self) -> DegreeStats {
        let followers = self.followers();
        let mut in_deg = Vec::with_capacity(followers.len());
        let mut out_deg = Vec::with_capacity(followers.len());
        let mut leader_deg = Vec::with_capacity(followers.len());
        for &f in &followers {
            in_deg.push(self.in_nbrs[f].len());
            out_deg.push(self.out_nbrs[f].iter().filter(|&&w| !self.is_leader[w]).count());
            leader_deg.push(self.in_nbrs[f].iter().filter(|&&w| self.is_leader[w]).count());
        }
        let gamma_max = leader_deg.iter().copied().max().unwrap_or(0);
        let gamma_min = leader_deg.iter().copied().min().unwrap_or(0);
        let boundary_s = leader_deg.iter().sum();
        DegreeStats { followers, in_deg, out_deg, leader_deg, gamma_max, gamma_min, boundary_s }
    }

    /// Followers with no directed path from any leader.
    pub fn unreachable_followers(&self) -> Vec<usize> {
        let mut seen = self.is_leader.clone();
        let mut queue: VecDeque<usize> = self.leaders.iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            for &w in &self.out_nbrs[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        (0..self.n).filter(|&v| !seen[v]).collect()
    }

    /// Every follower is reachable from some leader.
    pub fn all_reachable(&self) -> bool {
        self.unreachable_followers().is_empty()
    }

    pub fn ensure_reachable(&self) -> Result<()> {
        let unreachable = self.unreachable_followers();
        if unreachable.is_empty() {
            Ok(())
        } else {
            Err(Error::Unreachable(unreachable))
        }
    }

    /// Dense grounded Laplacian with rows in ascending follower order.
    pub fn grounded_laplacian(&self) -> Result<GroundedLaplacian> {
        self.ensure_reachable()?;
        let order = self.followers();
        let mut row_of = vec![usize::MAX; self.n];
        for (r, &f) in order.iter().enumerate() {
            row_of[f] = r;
        }
        let k = order.len();
        let mut m = DMatrix::zeros(k, k);
        for (r, &f) in order.iter().enumerate() {
            m[(r, r)] = self.in_nbrs[f].len() as f64;
            for &w in &self.in_nbrs[f] {
                if !self.is_leader[w] {
                    m[(r, row_of[w])] = -1.0;
                }
            }
        }
        Ok(GroundedLaplacian { matrix: m, order, mode: self.mode })
    }

    pub fn undirected_counterpart(&self) -> Result<LeaderGraph> {
        if self.mode == Mode::Undirected {
            return Err(Error::AlreadyUndirected);
        }
        LeaderGraph::new(self.n, Mode::Undirected, &self.edges, &self.leaders)
    }

    /// The graph itself when undirected, else its undirected counterpart.
    pub fn as_undirected(&self) -> LeaderGraph {
        match self.mode {
            Mode::Undirected => self.clone(),
            Mode::Directed => self.undirected_counterpart().expect("directed graphs always have a counterpart"),
        }
    }

    fn bfs_distances(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0);
            for w in self.undirected_nbrs(v) {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Connected when edge directions are ignored.
    pub fn is_connected(&self) -> bool {
        self.bfs_distances(0).iter().all(Option::is_some)
    }

    /// Sum of unit-length shortest-path distances from every node to `v`,
    /// ignoring edge directions.
    pub fn closeness_centrality(&self, v: usize) -> Result<f64> {
        if v >= self.n {
            return Err(Error::NodeOutOfRange { node: v, n: self.n });
        }
        let mut total = 0usize;
        for d in self.bfs_distances(v) {
            total += d.ok_or(Error::Disconnected)?;
        }
        Ok(total as f64)
    }

    /// |∂X|: edges leaving `set`. Undirected edges count when exactly one
    /// endpoint lies in the set.
    pub fn edge_boundary(&self, set: &[usize]) -> Result<usize> {
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut member = vec![false; self.n];
        for &v in set {
            if v >= self.n {
                return Err(Error::NodeOutOfRange { node: v, n: self.n });
            }
            member[v] = true;
        }
        let count = self
            .edges
            .iter()
            .filter(|&&(a, b)| match self.mode {
                Mode::Directed => member[a] && !member[b],
                Mode::Undirected => member[a] != member[b],
            })
            .count();
        Ok(count)
    }

    /// Follower-to-follower edges in canonical order.
    pub fn follower_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied().filter(|&(a, b)| !self.is_leader[a] && !self.is_leader[b])
    }

    pub fn follower_shape(&self) -> FollowerShape {
        let followers = self.followers();
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = followers.len();
        let mut cyclic = false;
        for (a, b) in self.follower_edges() {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                cyclic = true;
            } else {
                parent[ra] = rb;
                components -= 1;
            }
        }
        match (cyclic, components) {
            (true, _) => FollowerShape::Cyclic,
            (false, 1) => FollowerShape::Tree,
            (false, _) => FollowerShape::Forest,
        }
    }

    /// First follower whose follower in-degree differs from its follower
    /// out-degree, if any. Leader edges are ignored.
    pub fn unbalanced_follower(&self) -> Option<usize> {
        self.followers().into_iter().find(|&f| {
            let fin = self.in_nbrs[f].iter().filter(|&&w| !self.is_leader[w]).count();
            let fout = self.out_nbrs[f].iter().filter(|&&w| !self.is_leader[w]).count();
            fin != fout
        })
    }

    pub fn is_follower_balanced(&self) -> bool {
        self.unbalanced_follower().is_none()
    }

    /// A copy with the extra edge `a -> b` (or `{a, b}` when undirected).
    pub fn with_edge(&self, a: usize, b: usize) -> Result<LeaderGraph> {
        let mut edges = self.edges.clone();
        edges.push((a, b));
        LeaderGraph::new(self.n, self.mode, &edges, &self.leaders)
    }

    pub fn without_edge(&self, a: usize, b: usize) -> Result<LeaderGraph> {
        let probe = LeaderGraph::new(self.n, self.mode, &[(a, b)], &self.leaders)?;
        let target = probe.edges[0];
        let edges: Vec<_> = self.edges.iter().copied().filter(|&e| e != target).collect();
        if edges.len() == self.edges.len() {
            return Err(Error::BadParams(format!("no edge {a} -> {b}")));
        }
        LeaderGraph::new(self.n, self.mode, &edges, &self.leaders)
    }

    /// Adds a fresh leader node (id `n`) with an edge into each target
    /// follower. Returns the new graph and the new leader id.
    pub fn with_new_leader(&self, targets: &[usize]) -> Result<(LeaderGraph, usize)> {
        for &t in targets {
            if !self.is_follower(t) {
                return Err(Error::NotFollower(t));
            }
        }
        let id = self.n;
        let mut edges = self.edges.clone();
        edges.extend(targets.iter().map(|&t| (id, t)));
        let mut leaders = self.leaders.clone();
        leaders.push(id);
        Ok((LeaderGraph::new(self.n + 1, self.mode, &edges, &leaders)?, id))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> LeaderGraph {
        LeaderGraph::new(4, Mode::Directed, &[(3, 0), (0, 1), (1, 2)], &[3]).unwrap()
    }

    fn three_cycle() -> LeaderGraph {
        LeaderGraph::new(4, Mode::Directed, &[(3, 0), (0, 1), (1, 2), (2, 0)], &[3]).unwrap()
    }

    #[test]
    fn minimal_pair() {
        let g = LeaderGraph::new(2, Mode::Directed, &[(1, 0)], &[1]).unwrap();
        assert_eq!(g.followers(), vec![0]);
        assert_eq!(g.num_followers(), 1);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            LeaderGraph::new(3, Mode::Directed, &[(0, 1), (1, 0)], &[2]),
            Err(Error::AntiParallelPair(1, 0))
        ));
        assert!(matches!(LeaderGraph::new(3, Mode::Directed, &[(0, 0)], &[2]), Err(Error::SelfLoop(0))));
        assert!(matches!(
            LeaderGraph::new(3, Mode::Directed, &[(0, 1), (0, 1)], &[2]),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(LeaderGraph::new(3, Mode::Directed, &[(0, 2)], &[2]), Err(Error::LeaderHasInEdge(2))));
        assert!(matches!(LeaderGraph::new(3, Mode::Directed, &[], &[]), Err(Error::EmptyLeaderSet)));
        assert!(matches!(
            LeaderGraph::new(3, Mode::Directed, &[(0, 5)], &[2]),
            Err(Error::NodeOutOfRange { node: 5, n: 3 })
        ));
        assert!(matches!(
            LeaderGraph::new(3, Mode::Undirected, &[(0, 1), (1, 0)], &[2]),
            Err(Error::DuplicateEdge(1, 0))
        ));
        assert!(matches!(
            LeaderGraph::new(3, Mode::Undirected, &[(1, 2)], &[1, 2]),
            Err(Error::LeaderHasInEdge(2))
        ));
    }

    #[test]
    fn undirected_leader_edges_are_stored_leader_first() {
        let g = LeaderGraph::new(3, Mode::Undirected, &[(0, 2), (1, 0)], &[2]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (2, 0)]);
        assert!(g.in_neighbors(2).is_empty());
        assert_eq!(g.in_neighbors(0), &[1, 2]);
    }

    #[test]
    fn reachability() {
        assert!(path3().all_reachable());
        assert!(three_cycle().all_reachable());
        let g = LeaderGraph::new(3, Mode::Directed, &[(2, 0)], &[2]).unwrap();
        assert!(!g.all_reachable());
        assert!(matches!(g.grounded_laplacian(), Err(Error::Unreachable(ref v)) if v == &[1]));
        // reachable only against the edge direction
        let g = LeaderGraph::new(3, Mode::Directed, &[(2, 0), (1, 0)], &[2]).unwrap();
        assert!(!g.all_reachable());
        assert!(g.undirected_counterpart().unwrap().all_reachable());
    }

    #[test]
    fn degree_stats_by_hand() {
        let s = LeaderGraph::new(3, Mode::Directed, &[(2, 0), (0, 1)], &[2]).unwrap().degree_stats();
        assert_eq!(s.in_deg, vec![1, 1]);
        assert_eq!(s.out_deg, vec![1, 0]);
        assert_eq!(s.leader_deg, vec![1, 0]);
        assert_eq!(s.boundary_s, 1);

        let s = three_cycle().degree_stats();
        assert_eq!(s.in_deg, vec![2, 1, 1]);
        assert_eq!(s.out_deg, vec![1, 1, 1]);
        assert_eq!(s.leader_deg, vec![1, 0, 0]);
        assert_eq!((s.gamma_min, s.gamma_max), (0, 1));
    }

    #[test]
    fn grounded_laplacians() {
        let l = LeaderGraph::new(3, Mode::Directed, &[(2, 0), (0, 1)], &[2]).unwrap().grounded_laplacian().unwrap();
        assert_eq!(l.matrix, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, -1.0, 1.0]));

        let l = three_cycle().grounded_laplacian().unwrap();
        let want = DMatrix::from_row_slice(3, 3, &[2.0, 0.0, -1.0, -1.0, 1.0, 0.0, 0.0, -1.0, 1.0]);
        assert_eq!(l.matrix, want);
        assert_eq!(l.order, vec![0, 1, 2]);

        let u = three_cycle().undirected_counterpart().unwrap().grounded_laplacian().unwrap();
        let want = DMatrix::from_row_slice(3, 3, &[3.0, -1.0, -1.0, -1.0, 2.0, -1.0, -1.0, -1.0, 2.0]);
        assert_eq!(u.matrix, want);
    }

    #[test]
    fn leaders_need_not_be_last() {
        let g = LeaderGraph::new(3, Mode::Directed, &[(0, 1), (1, 2)], &[0]).unwrap();
        let l = g.grounded_laplacian().unwrap();
        assert_eq!(l.order, vec![1, 2]);
        assert_eq!(l.row_of(2), Some(1));
        assert_eq!(l.row_of(0), None);
    }

    #[test]
    fn counterpart() {
        let u = three_cycle().undirected_counterpart().unwrap();
        assert_eq!(u.mode(), Mode::Undirected);
        assert_eq!(u.leaders(), &[3]);
        assert!(matches!(u.undirected_counterpart(), Err(Error::AlreadyUndirected)));
        assert_eq!(u.as_undirected(), u);
        assert_eq!(u.follower_shape(), FollowerShape::Cyclic);
    }

    #[test]
    fn closeness() {
        assert_eq!(path3().closeness_centrality(3).unwrap(), 6.0);
        // star: leader at the center of four followers
        let star = LeaderGraph::new(5, Mode::Directed, &[(4, 0), (4, 1), (4, 2), (4, 3)], &[4]).unwrap();
        assert_eq!(star.closeness_centrality(4).unwrap(), 4.0);
        let split = LeaderGraph::new(4, Mode::Directed, &[(3, 0), (2, 1)], &[2, 3]).unwrap();
        assert!(matches!(split.closeness_centrality(3), Err(Error::Disconnected)));
    }

    #[test]
    fn boundaries() {
        let g = LeaderGraph::new(3, Mode::Directed, &[(2, 0), (0, 1)], &[2]).unwrap();
        assert_eq!(g.edge_boundary(&[2]).unwrap(), 1);
        assert_eq!(g.edge_boundary(&[0, 1, 2]).unwrap(), 0);
        assert_eq!(three_cycle().edge_boundary(&[0]).unwrap(), 1);
        assert!(matches!(g.edge_boundary(&[]), Err(Error::EmptySet)));
        let u = three_cycle().undirected_counterpart().unwrap();
        assert_eq!(u.edge_boundary(&[0]).unwrap(), 3);
        assert_eq!(u.edge_boundary(&[1, 2]).unwrap(), 2);
    }

    #[test]
    fn shapes_and_balance() {
        assert_eq!(path3().follower_shape(), FollowerShape::Tree);
        assert_eq!(three_cycle().follower_shape(), FollowerShape::Cyclic);
        let forest = LeaderGraph::new(4, Mode::Directed, &[(3, 0), (3, 1), (1, 2)], &[3]).unwrap();
        assert_eq!(forest.follower_shape(), FollowerShape::Forest);
        assert!(three_cycle().is_follower_balanced());
        assert_eq!(path3().unbalanced_follower(), Some(0));
    }

    #[test]
    fn edits() {
        let g = path3().with_edge(0, 2).unwrap();
        assert!(g.has_influence(0, 2));
        assert_eq!(g.without_edge(0, 2).unwrap(), path3());
        assert!(matches!(path3().with_edge(1, 0), Err(Error::AntiParallelPair(1, 0))));
        let (h, id) = path3().with_new_leader(&[2]).unwrap();
        assert_eq!(id, 4);
        assert_eq!(h.leaders(), &[3, 4]);
        assert!(matches!(path3().with_new_leader(&[3]), Err(Error::NotFollower(3))));
    }
}
