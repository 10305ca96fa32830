//! Graph-theoretic bounds on the spectral quantities behind the H∞ norm,
//! and the degree certificate for `‖G‖∞ ≤ γ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{FollowerShape, LeaderGraph, Mode};
use crate::hinf;
use crate::spectral::{self, Structure};

/// Largest follower count for the isoperimetric subset enumeration.
pub const BRUTE_FORCE_LIMIT: usize = 20;
pub const SANDWICH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// λ₁ of the undirected grounded Laplacian.
    Lambda1,
    /// σ₁ of the directed grounded Laplacian.
    Sigma1,
    /// The directed H∞ norm itself.
    HinfDirected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub name: String,
    pub value: f64,
}

impl Bound {
    fn new(name: impl Into<String>, value: f64) -> Self {
        Bound { name: name.into(), value }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Guaranteed,
    Impossible,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub kind: ConditionKind,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKind {
    Sufficient,
    Necessary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaCertificate {
    pub gamma: f64,
    pub verdict: Verdict,
    pub conditions: Vec<Condition>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub target_kind: Target,
    pub target: f64,
    pub lower: Vec<Bound>,
    pub upper: Vec<Bound>,
    pub tight_lower: Option<String>,
    pub tight_upper: Option<String>,
    /// Related quantities that are not bounds (per-leader values, norms).
    pub extras: Vec<Bound>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_verdict: Option<GammaCertificate>,
}

impl BoundsReport {
    fn new(target_kind: Target, target: f64, lower: Vec<Bound>, upper: Vec<Bound>, extras: Vec<Bound>) -> Self {
        let pick = |bs: &[Bound], better: fn(f64, f64) -> bool| {
            bs.iter().fold(None::<&Bound>, |acc, b| match acc {
                Some(a) if !better(b.value, a.value) => Some(a),
                _ => Some(b),
            })
            .map(|b| b.name.clone())
        };
        let tight_lower = pick(&lower, |a, b| a > b);
        let tight_upper = pick(&upper, |a, b| a < b);
        BoundsReport { target_kind, target, lower, upper, tight_lower, tight_upper, extras, gamma_verdict: None }
    }

    /// Bounds on the wrong side of the target by more than `tol`
    /// (relative to max(1, |target|)).
    pub fn violations(&self, tol: f64) -> Vec<String> {
        let slack = tol * self.target.abs().max(1.0);
        let mut out = Vec::new();
        for b in &self.lower {
            if b.value > self.target + slack {
                out.push(format!("lower {} = {} > target {}", b.name, b.value, self.target));
            }
        }
        for b in &self.upper {
            if b.value < self.target - slack {
                out.push(format!("upper {} = {} < target {}", b.name, b.value, self.target));
            }
        }
        out
    }

    pub fn sandwich_holds(&self) -> bool {
        self.violations(SANDWICH_TOL).is_empty()
    }

    pub fn lower_value(&self, name: &str) -> Option<f64> {
        self.lower.iter().find(|b| b.name == name).map(|b| b.value)
    }

    pub fn upper_value(&self, name: &str) -> Option<f64> {
        self.upper.iter().find(|b| b.name == name).map(|b| b.value)
    }

    pub fn extra_value(&self, name: &str) -> Option<f64> {
        self.extras.iter().find(|b| b.name == name).map(|b| b.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Isoperimetric {
    Off,
    BruteForce,
}

/// min over nonempty follower subsets X of |∂X|/|X| in the undirected graph.
pub fn isoperimetric_number(g: &LeaderGraph) -> Result<f64> {
    let u = g.as_undirected();
    let followers = u.followers();
    let k = followers.len();
    if k > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLargeForBruteForce { followers: k, limit: BRUTE_FORCE_LIMIT });
    }
    let mut bit = vec![0u32; u.n()];
    for (i, &f) in followers.iter().enumerate() {
        bit[f] = 1 << i;
    }
    let deg: Vec<u32> = followers.iter().map(|&f| u.in_neighbors(f).len() as u32).collect();
    let nbr_mask: Vec<u32> = followers
        .iter()
        .map(|&f| u.in_neighbors(f).iter().fold(0, |m, &w| m | bit[w]))
        .collect();
    let mut best = f64::INFINITY;
    for set in 1u32..(1u32 << k) {
        let (mut boundary, mut size) = (0u32, 0u32);
        let mut rest = set;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            size += 1;
            boundary += deg[i] - (nbr_mask[i] & set).count_ones();
        }
        best = best.min(boundary as f64 / size as f64);
    }
    Ok(best)
}

pub fn undirected_bounds(g: &LeaderGraph, iso: Isoperimetric) -> Result<BoundsReport> {
    let u = g.as_undirected();
    if !u.is_connected() {
        return Err(Error::Disconnected);
    }
    let l = u.grounded_laplacian()?;
    let target = spectral::smallest_eigenvalue(&l.matrix, Structure::Symmetric)?.value;
    let stats = u.degree_stats();
    let k = stats.followers.len() as f64;
    let boundary_mean = stats.boundary_s as f64 / k;

    let mut extras = Vec::new();
    let mut best_closeness = f64::NEG_INFINITY;
    for &leader in u.leaders() {
        let c = u.closeness_centrality(leader)?;
        extras.push(Bound::new(format!("closeness[{leader}]"), c));
        best_closeness = best_closeness.max(1.0 / c);
    }
    let x_min = spectral::perron_component_min(&l.matrix)?;
    extras.push(Bound::new("perron_min_component", x_min));

    let lower = vec![
        Bound::new("inverse_closeness", best_closeness),
        Bound::new("gamma_min", stats.gamma_min as f64),
        Bound::new("boundary_perron", boundary_mean * x_min),
    ];
    let mut upper = Vec::new();
    if iso == Isoperimetric::BruteForce {
        upper.push(Bound::new("isoperimetric", isoperimetric_number(&u)?));
    }
    upper.push(Bound::new("boundary_mean", boundary_mean));
    upper.push(Bound::new("gamma_max", stats.gamma_max as f64));
    Ok(BoundsReport::new(Target::Lambda1, target, lower, upper, extras))
}

fn require_directed(g: &LeaderGraph) -> Result<()> {
    if g.mode() != Mode::Directed {
        return Err(Error::RequiresDirected);
    }
    Ok(())
}

pub fn directed_bounds(g: &LeaderGraph) -> Result<BoundsReport> {
    require_directed(g)?;
    let l = g.grounded_laplacian()?;
    let target = spectral::smallest_singular_value(&l.matrix)?.value;
    let s = g.degree_stats();
    let k = s.followers.len() as f64;
    let gersh = (0..s.followers.len())
        .map(|i| 0.5 * (s.in_deg[i] as f64 - s.out_deg[i] as f64 + s.leader_deg[i] as f64))
        .fold(f64::INFINITY, f64::min)
        .max(0.0);
    let uniform = (s.leader_deg.iter().map(|&x| (x * x) as f64).sum::<f64>() / k).sqrt();
    let unit = (0..s.followers.len())
        .map(|i| (s.in_deg[i] * s.in_deg[i] + s.out_deg[i]) as f64)
        .fold(f64::INFINITY, f64::min)
        .sqrt();
    Ok(BoundsReport::new(
        Target::Sigma1,
        target,
        vec![Bound::new("gershgorin_singular_value", gersh)],
        vec![Bound::new("rayleigh_uniform", uniform), Bound::new("rayleigh_unit_vector", unit)],
        Vec::new(),
    ))
}

/// Integer value of `x` when it is integral up to rounding noise.
fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x
    }
}

fn ceil_exact(x: f64) -> f64 {
    snap(x).ceil()
}

fn floor_exact(x: f64) -> f64 {
    snap(x).floor()
}

/// Degree certificate for `‖G‖∞,d ≤ γ`.
///
/// Guaranteed when min(Δ−δ+Γ) ≥ ⌈2/γ⌉. Impossible when any of
/// ΣΓ² ≥ ⌊N/γ²⌋, min(Δ²+δ) ≥ ⌊1/γ²⌋, Γ_max ≥ ⌊1/γ⌋ fails.
pub fn certify_gamma(g: &LeaderGraph, gamma: f64) -> Result<GammaCertificate> {
    require_directed(g)?;
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::BadParams(format!("gamma must be positive and finite, got {gamma}")));
    }
    g.ensure_reachable()?;
    let s = g.degree_stats();
    let k = s.followers.len();
    let min_gersh = (0..k)
        .map(|i| s.in_deg[i] as i64 - s.out_deg[i] as i64 + s.leader_deg[i] as i64)
        .min()
        .unwrap_or(0) as f64;
    let sum_sq = s.leader_deg.iter().map(|&x| (x * x) as f64).sum::<f64>();
    let min_unit = (0..k).map(|i| s.in_deg[i] * s.in_deg[i] + s.out_deg[i]).min().unwrap_or(0) as f64;

    let cond = |name: &str, kind, lhs: f64, rhs: f64| Condition { name: name.into(), kind, lhs, rhs, holds: lhs >= rhs };
    let conditions = vec![
        cond("min(in_deg - out_deg + leader_deg) >= ceil(2/gamma)", ConditionKind::Sufficient, min_gersh, ceil_exact(2.0 / gamma)),
        cond(
            "sum(leader_deg^2) >= floor(followers/gamma^2)",
            ConditionKind::Necessary,
            sum_sq,
            floor_exact(k as f64 / (gamma * gamma)),
        ),
        cond("min(in_deg^2 + out_deg) >= floor(1/gamma^2)", ConditionKind::Necessary, min_unit, floor_exact(1.0 / (gamma * gamma))),
        cond("gamma_max >= floor(1/gamma)", ConditionKind::Necessary, s.gamma_max as f64, floor_exact(1.0 / gamma)),
    ];
    let verdict = if conditions[0].holds {
        Verdict::Guaranteed
    } else if conditions[1..].iter().any(|c| !c.holds) {
        Verdict::Impossible
    } else {
        Verdict::Inconclusive
    };
    Ok(GammaCertificate { gamma, verdict, conditions })
}

/// Upper bounds on ‖G‖∞,d when the follower subgraph is balanced.
pub fn balanced_bound(g: &LeaderGraph) -> Result<BoundsReport> {
    require_directed(g)?;
    if let Some(v) = g.unbalanced_follower() {
        return Err(Error::NotBalanced(v));
    }
    let l = g.grounded_laplacian()?;
    let hd = hinf::dc_gain(&l)?;
    let hu = hinf::hinf_value(&g.undirected_counterpart()?)?;
    let sym = &l.matrix + l.matrix.transpose();
    let lam = spectral::smallest_eigenvalue(&sym, Structure::Symmetric)?.value;
    Ok(BoundsReport::new(
        Target::HinfDirected,
        hd,
        Vec::new(),
        vec![Bound::new("symmetric_part", 2.0 / lam.abs()), Bound::new("twice_undirected", 2.0 * hu)],
        vec![Bound::new("hinf_directed", hd), Bound::new("hinf_undirected", hu)],
    ))
}

/// Bounds on ‖G‖∞,d when the follower subgraph is a tree.
///
/// With one leader and every follower of in-degree one the whole graph is a
/// directed tree and ‖G‖∞,d² = ‖G‖∞,u is checked; a mismatch is an error.
pub fn tree_bounds(g: &LeaderGraph) -> Result<BoundsReport> {
    require_directed(g)?;
    let shape = g.follower_shape();
    if shape != FollowerShape::Tree {
        return Err(Error::NotTree(shape));
    }
    let l = g.grounded_laplacian()?;
    let hd = hinf::dc_gain(&l)?;
    let hu = hinf::hinf_value(&g.undirected_counterpart()?)?;
    let stats = g.degree_stats();
    let min_in = stats.in_deg.iter().copied().min().unwrap_or(1) as f64;
    let mut closeness = f64::INFINITY;
    let mut extras = vec![Bound::new("hinf_directed", hd), Bound::new("hinf_undirected", hu)];
    for &leader in g.leaders() {
        let c = g.closeness_centrality(leader)?;
        extras.push(Bound::new(format!("closeness[{leader}]"), c));
        closeness = closeness.min(c);
    }
    if square_law_applies(g) {
        let tol = 1e-9 * hu.max(1.0);
        if (hd * hd - hu).abs() > tol {
            return Err(Error::SquareLawMismatch { directed_squared: hd * hd, undirected: hu });
        }
        extras.push(Bound::new("square_law_gap", hd * hd - hu));
    }
    Ok(BoundsReport::new(
        Target::HinfDirected,
        hd,
        vec![Bound::new("inverse_min_in_degree", 1.0 / min_in)],
        vec![Bound::new("sqrt_undirected", hu.sqrt()), Bound::new("sqrt_closeness", closeness.sqrt())],
        extras,
    ))
}

/// One leader and a tree follower subgraph in which every follower has
/// exactly one in-neighbor.
pub fn square_law_applies(g: &LeaderGraph) -> bool {
    g.mode() == Mode::Directed
        && g.leaders().len() == 1
        && g.follower_shape() == FollowerShape::Tree
        && g.degree_stats().in_deg.iter().all(|&d| d == 1)
}
