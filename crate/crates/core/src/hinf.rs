//! H∞ norm of the follower dynamics `ψ̇ = -L_g ψ + w`, `z = ψ`.
//!
//! The system is positive, so the norm is the DC gain: 1/σ₁(L_g) for a
//! directed graph and 1/λ₁(L_g) for an undirected one. A frequency sweep is
//! available as an independent check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GroundedLaplacian, LeaderGraph, Mode};
use crate::spectral::{self, Structure};

/// Relative slack allowed for a sweep to exceed the DC gain.
pub const POSITIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    DcGain,
    FrequencySweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HinfReport {
    pub value: f64,
    pub mode: Mode,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax_omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_max_omega: Option<f64>,
}

/// DC gain of an already built grounded Laplacian.
pub fn dc_gain(l: &GroundedLaplacian) -> Result<f64> {
    match l.mode {
        Mode::Directed => Ok(1.0 / spectral::smallest_singular_value(&l.matrix)?.value),
        Mode::Undirected => Ok(1.0 / spectral::smallest_eigenvalue(&l.matrix, Structure::Symmetric)?.value),
    }
}

pub fn hinf_norm(g: &LeaderGraph) -> Result<HinfReport> {
    let l = g.grounded_laplacian()?;
    Ok(HinfReport { value: dc_gain(&l)?, mode: g.mode(), method: Method::DcGain, argmax_omega: None, sweep_max_omega: None })
}

pub fn hinf_value(g: &LeaderGraph) -> Result<f64> {
    hinf_norm(g).map(|r| r.value)
}

/// `0` followed by `count` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let mut grid = vec![0.0];
    if count == 1 {
        grid.push(lo);
    } else if count > 1 {
        let (a, b) = (lo.log10(), hi.log10());
        let step = (b - a) / (count - 1) as f64;
        grid.extend((0..count).map(|i| 10f64.powf(a + step * i as f64)));
    }
    grid
}

pub fn default_grid() -> Vec<f64> {
    log_grid(1e-3, 1e3, 200)
}

/// Maximum of the frequency gain over `grid`.
///
/// The argmax is the smallest frequency whose gain is within 1e-12 of the
/// maximum, so rounding noise near DC does not move it off zero.
pub fn hinf_verify_sweep(g: &LeaderGraph, grid: &[f64]) -> Result<HinfReport> {
    if grid.is_empty() || grid.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::BadParams("frequency grid must be nonempty, finite and non-negative".into()));
    }
    let l = g.grounded_laplacian()?;
    let dc = dc_gain(&l)?;
    let gains = grid.iter().map(|&w| spectral::frequency_gain(&l.matrix, w)).collect::<Result<Vec<_>>>()?;
    let best = gains.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let argmax = grid
        .iter()
        .zip(&gains)
        .filter(|(_, &gain)| gain >= best * (1.0 - 1e-12))
        .map(|(&w, _)| w)
        .fold(f64::INFINITY, f64::min);
    if best > dc * (1.0 + POSITIVITY_TOL) {
        return Err(Error::PositivityViolated { omega: argmax, gain: best, dc });
    }
    Ok(HinfReport {
        value: best,
        mode: g.mode(),
        method: Method::FrequencySweep,
        argmax_omega: Some(argmax),
        sweep_max_omega: grid.iter().copied().reduce(f64::max),
    })
}
