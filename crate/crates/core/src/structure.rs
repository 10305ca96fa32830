//! Leader-rooted paths in follower trees and the effect of adding edges or
//! leaders on the H∞ norm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{FollowerShape, LeaderGraph, Mode};
use crate::hinf;
use crate::spectral::{self, RankOneUpdate, UpdateDirection};

/// Directed follower path from a leader's out-neighbor to a node with no
/// follower out-neighbors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeaderRootedPath {
    pub nodes: Vec<usize>,
    pub root_leader: usize,
}

impl LeaderRootedPath {
    pub fn position(&self, v: usize) -> Option<usize> {
        self.nodes.iter().position(|&x| x == v)
    }

    fn positions(&self, e: (usize, usize)) -> Result<(usize, usize)> {
        let a = self.position(e.0).ok_or(Error::NotOnPath(e.0))?;
        let b = self.position(e.1).ok_or(Error::NotOnPath(e.1))?;
        Ok((a, b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    DecreasesHinf,
    IncreasesHinf,
    Unclassified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    NonInterferingSamePathNoCycle,
    CreatesCycleInPath,
    OutsideScope,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeClassification {
    pub classification: Classification,
    pub reason: Reason,
    /// Path used for the classification, if any.
    pub path: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeEffectReport {
    pub edge: (usize, usize),
    pub classification: Classification,
    pub reason: Reason,
    pub path: Option<Vec<usize>>,
    pub hinf_before: f64,
    pub hinf_after: f64,
    /// Whether the measured change has the predicted sign; `None` when
    /// unclassified.
    pub prediction_confirmed: Option<bool>,
    /// Largest entrywise increase and decrease of L_g⁻¹ under the update.
    pub inverse_max_increase: f64,
    pub inverse_max_decrease: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeaderEffect {
    pub follower: usize,
    pub new_leader: usize,
    pub hinf_before: f64,
    pub hinf_after: f64,
}

fn require_tree(g: &LeaderGraph) -> Result<()> {
    if g.mode() != Mode::Directed {
        return Err(Error::RequiresDirected);
    }
    match g.follower_shape() {
        FollowerShape::Tree => Ok(()),
        other => Err(Error::NotTree(other)),
    }
}

pub fn leader_rooted_paths(g: &LeaderGraph) -> Result<Vec<LeaderRootedPath>> {
    require_tree(g)?;
    let follower_out = |v: usize| g.out_neighbors(v).iter().copied().filter(|&w| !g.is_leader(w));
    let mut paths = Vec::new();
    for start in g.followers() {
        let Some(&root_leader) = g.in_neighbors(start).iter().find(|&&w| g.is_leader(w)) else {
            continue;
        };
        // the follower graph is a tree, so a plain DFS never revisits
        let mut stack = vec![vec![start]];
        while let Some(path) = stack.pop() {
            let last = *path.last().unwrap_or(&start);
            let next: Vec<usize> = follower_out(last).collect();
            if next.is_empty() {
                paths.push(LeaderRootedPath { nodes: path, root_leader });
                continue;
            }
            for w in next.into_iter().rev() {
                let mut p = path.clone();
                p.push(w);
                stack.push(p);
            }
        }
    }
    Ok(paths)
}

/// Literal interference rule for two edges on one path: with `e1` the edge
/// whose tail comes first, they interfere when e1's head lies strictly
/// after e2's tail.
pub fn interfering(path: &LeaderRootedPath, e1: (usize, usize), e2: (usize, usize)) -> Result<bool> {
    let p1 = path.positions(e1)?;
    let p2 = path.positions(e2)?;
    let (first, second) = if p1.0 <= p2.0 { (p1, p2) } else { (p2, p1) };
    Ok(first.1 > second.0)
}

fn unclassified() -> EdgeClassification {
    EdgeClassification { classification: Classification::Unclassified, reason: Reason::OutsideScope, path: None }
}

/// Predicts the sign of the H∞ change when `candidate = (from, to)` is added
/// to `g` on top of `existing` additions.
///
/// Only graphs whose followers each have exactly one in-neighbor are
/// classified; with extra leader edges the prediction is known to fail.
pub fn classify_edge_addition(
    g: &LeaderGraph,
    existing: &[(usize, usize)],
    candidate: (usize, usize),
) -> Result<EdgeClassification> {
    // forests are accepted but never classified
    let forest = g.mode() == Mode::Directed && g.follower_shape() == FollowerShape::Forest;
    if !forest {
        require_tree(g)?;
    }
    for v in [candidate.0, candidate.1] {
        if !g.is_follower(v) {
            return Err(Error::NotFollower(v));
        }
    }
    let mut edited = g.clone();
    for &(a, b) in existing {
        edited = edited.with_edge(a, b)?;
    }
    edited.with_edge(candidate.0, candidate.1)?;

    if forest || g.degree_stats().in_deg.iter().any(|&d| d != 1) {
        return Ok(unclassified());
    }
    let paths = leader_rooted_paths(g)?;
    for path in &paths {
        let Ok((a, b)) = path.positions(candidate) else { continue };
        if a > b {
            if existing.is_empty() {
                return Ok(EdgeClassification {
                    classification: Classification::IncreasesHinf,
                    reason: Reason::CreatesCycleInPath,
                    path: Some(path.nodes.clone()),
                });
            }
            continue;
        }
        let on_path_forward = existing
            .iter()
            .all(|&e| matches!(path.positions(e), Ok((x, y)) if x < y));
        if !on_path_forward {
            continue;
        }
        let mut all = existing.to_vec();
        all.push(candidate);
        let mut clash = false;
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                clash |= interfering(path, all[i], all[j])?;
            }
        }
        if !clash {
            return Ok(EdgeClassification {
                classification: Classification::DecreasesHinf,
                reason: Reason::NonInterferingSamePathNoCycle,
                path: Some(path.nodes.clone()),
            });
        }
    }
    Ok(unclassified())
}

/// Classifies the candidate, then measures the norm before and after and the
/// entrywise change of L_g⁻¹ through a Sherman–Morrison update.
pub fn apply_edge_and_measure(
    g: &LeaderGraph,
    existing: &[(usize, usize)],
    candidate: (usize, usize),
) -> Result<EdgeEffectReport> {
    let class = classify_edge_addition(g, existing, candidate)?;
    let mut base = g.clone();
    for &(a, b) in existing {
        base = base.with_edge(a, b)?;
    }
    let after = base.with_edge(candidate.0, candidate.1)?;
    let l = base.grounded_laplacian()?;
    let hinf_before = hinf::dc_gain(&l)?;
    let hinf_after = hinf::hinf_value(&after)?;

    let row = |v: usize| l.row_of(v).ok_or(Error::NotFollower(v));
    let update = RankOneUpdate { i: row(candidate.1)?, j: row(candidate.0)?, direction: UpdateDirection::Add };
    let inv = spectral::inverse(&l.matrix)?;
    let inv_after = spectral::sherman_morrison_update(&inv, update)?;
    let diff = inv_after - &inv;
    let inverse_max_increase = diff.max().max(0.0);
    let inverse_max_decrease = (-diff.min()).max(0.0);

    let prediction_confirmed = match class.classification {
        Classification::DecreasesHinf => Some(hinf_after < hinf_before),
        Classification::IncreasesHinf => Some(hinf_after > hinf_before),
        Classification::Unclassified => None,
    };
    Ok(EdgeEffectReport {
        edge: candidate,
        classification: class.classification,
        reason: class.reason,
        path: class.path,
        hinf_before,
        hinf_after,
        prediction_confirmed,
        inverse_max_increase,
        inverse_max_decrease,
    })
}

/// Attaches a fresh leader to `follower` and measures the norm.
pub fn leader_addition_effect(g: &LeaderGraph, follower: usize) -> Result<LeaderEffect> {
    let hinf_before = hinf::hinf_value(g)?;
    let (h, new_leader) = g.with_new_leader(&[follower])?;
    let hinf_after = hinf::hinf_value(&h)?;
    Ok(LeaderEffect { follower, new_leader, hinf_before, hinf_after })
}
