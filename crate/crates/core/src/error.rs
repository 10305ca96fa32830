use thiserror::Error;

use crate::graph::FollowerShape;

#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop at node {0}")]
    SelfLoop(usize),

    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(usize, usize),

    #[error("anti-parallel pair {0} <-> {1} in a directed graph")]
    AntiParallelPair(usize, usize),

    #[error("leader {0} has an incoming edge")]
    LeaderHasInEdge(usize),

    #[error("leader set is empty")]
    EmptyLeaderSet,

    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("every node is a leader; at least one follower is required")]
    NoFollowers,

    #[error("followers {0:?} are not reachable from any leader")]
    Unreachable(Vec<usize>),

    #[error("graph is already undirected")]
    AlreadyUndirected,

    #[error("operation requires a directed graph")]
    RequiresDirected,

    #[error("graph is disconnected")]
    Disconnected,

    #[error("node set is empty")]
    EmptySet,

    #[error("node {0} is not a follower")]
    NotFollower(usize),

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("matrix is singular (smallest singular value {0:e})")]
    Singular(f64),

    #[error("matrix is not square: {0} x {1}")]
    NotSquare(usize, usize),

    #[error("iteration did not converge after {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("matrix structure violated: {0}")]
    StructureViolated(String),

    #[error("rank-one update is singular (denominator {0:e})")]
    SingularUpdate(f64),

    #[error("frequency gain {gain} at omega={omega} exceeds DC gain {dc}")]
    PositivityViolated { omega: f64, gain: f64, dc: f64 },

    #[error("isoperimetric brute force limited to {limit} followers, got {followers}")]
    TooLargeForBruteForce { followers: usize, limit: usize },

    #[error("follower subgraph is not balanced (node {0})")]
    NotBalanced(usize),

    #[error("follower subgraph is not a tree ({0:?})")]
    NotTree(FollowerShape),

    #[error("square law mismatch: hinf_d^2 = {directed_squared}, hinf_u = {undirected}")]
    SquareLawMismatch { directed_squared: f64, undirected: f64 },

    #[error("node {0} is not on the path")]
    NotOnPath(usize),

    #[error("state magnitude exceeded 1e12 at t={0}")]
    UnstableStep(f64),

    #[error("simulated tail deviates from steady state by {0:e}")]
    NotConverged(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
