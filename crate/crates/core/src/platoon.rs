//! Double-integrator platoon tracking a reference velocity.
//!
//! Every vehicle obeys `ṗ = u`, `u̇ = q + w`. Followers use
//! `q_i = Σ_{j ∈ in(i)} (u_j − u_i)` and leaders hold `q = 0`, `w = 0`.

use std::fmt::Write as _;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::generate::{directed_path, LeaderPosition};
use crate::graph::LeaderGraph;
use crate::{hinf, spectral};

pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_T_END: f64 = 100.0;
pub const DEFAULT_SPACING: f64 = 10.0;
pub const STEADY_TOL: f64 = 1e-4;
const BLOWUP: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Disturbance {
    None,
    /// Same level on every follower (m/s²).
    Constant { level: f64 },
    /// One level per follower, in ascending follower order.
    PerFollower { levels: Vec<f64> },
    /// `amplitude · direction_i · sin(frequency · t)` on follower `i`; an
    /// empty direction means all ones.
    Sinusoid { amplitude: f64, frequency: f64, direction: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlatoonConfig {
    pub graph: LeaderGraph,
    pub u_star: f64,
    pub disturbance: Disturbance,
    pub t_end: f64,
    pub dt: f64,
    /// Per node id (m).
    pub initial_positions: Vec<f64>,
    /// Per node id (m/s); leaders must start at `u_star`.
    pub initial_velocities: Vec<f64>,
}

impl PlatoonConfig {
    /// Defaults: 10 m spacing by node id, followers at rest, leaders at `u_star`.
    pub fn new(graph: LeaderGraph, u_star: f64) -> Self {
        let n = graph.n();
        let initial_positions = (0..n).map(|i| -DEFAULT_SPACING * i as f64).collect();
        let initial_velocities = (0..n).map(|i| if graph.is_leader(i) { u_star } else { 0.0 }).collect();
        PlatoonConfig {
            graph,
            u_star,
            disturbance: Disturbance::None,
            t_end: DEFAULT_T_END,
            dt: DEFAULT_DT,
            initial_positions,
            initial_velocities,
        }
    }

    pub fn with_disturbance(mut self, d: Disturbance) -> Self {
        self.disturbance = d;
        self
    }

    pub fn with_horizon(mut self, t_end: f64, dt: f64) -> Self {
        self.t_end = t_end;
        self.dt = dt;
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.graph.n();
        let k = self.graph.num_followers();
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::BadParams("dt must be positive".into()));
        }
        if !(self.t_end >= self.dt && self.t_end.is_finite()) {
            return Err(Error::BadParams("t_end must be at least dt".into()));
        }
        if self.initial_positions.len() != n || self.initial_velocities.len() != n {
            return Err(Error::BadParams(format!("initial conditions need {n} entries")));
        }
        if self.graph.leaders().iter().any(|&l| self.initial_velocities[l] != self.u_star) {
            return Err(Error::BadParams("leaders must start at the reference velocity".into()));
        }
        match &self.disturbance {
            Disturbance::PerFollower { levels } if levels.len() != k => {
                Err(Error::BadParams(format!("need {k} disturbance levels, got {}", levels.len())))
            }
            Disturbance::Sinusoid { direction, .. } if !direction.is_empty() && direction.len() != k => {
                Err(Error::BadParams(format!("need {k} direction entries, got {}", direction.len())))
            }
            _ => Ok(()),
        }
    }

    /// Disturbance per node at time `t`.
    fn disturbance_at(&self, t: f64, slot: &[Option<usize>], out: &mut [f64]) {
        for (v, s) in slot.iter().enumerate() {
            out[v] = match (s, &self.disturbance) {
                (None, _) | (_, Disturbance::None) => 0.0,
                (Some(_), Disturbance::Constant { level }) => *level,
                (Some(i), Disturbance::PerFollower { levels }) => levels[*i],
                (Some(i), Disturbance::Sinusoid { amplitude, frequency, direction }) => {
                    let d = direction.get(*i).copied().unwrap_or(1.0);
                    amplitude * d * (frequency * t).sin()
                }
            };
        }
    }

    fn constant_levels(&self) -> Result<Vec<f64>> {
        let k = self.graph.num_followers();
        match &self.disturbance {
            Disturbance::None => Ok(vec![0.0; k]),
            Disturbance::Constant { level } => Ok(vec![*level; k]),
            Disturbance::PerFollower { levels } => Ok(levels.clone()),
            Disturbance::Sinusoid { .. } => Err(Error::BadParams("steady state needs a constant disturbance".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub times: Vec<f64>,
    /// `positions[vehicle][sample]` (m).
    pub positions: Vec<Vec<f64>>,
    /// `velocities[vehicle][sample]` (m/s).
    pub velocities: Vec<Vec<f64>>,
    /// Max over followers of |u_i − u*| per sample (m/s).
    pub velocity_error: Vec<f64>,
}

impl SimTrace {
    /// Final state as `[p_0..p_{n-1}, u_0..u_{n-1}]`.
    pub fn final_state(&self) -> Vec<f64> {
        self.positions.iter().chain(&self.velocities).map(|row| *row.last().unwrap_or(&0.0)).collect()
    }

    pub fn to_csv(&self) -> String {
        let n = self.positions.len();
        let mut out = String::from("time");
        for i in 0..n {
            let _ = write!(out, ",p{i}");
        }
        for i in 0..n {
            let _ = write!(out, ",u{i}");
        }
        out.push('\n');
        for (s, &t) in self.times.iter().enumerate() {
            out.push_str(&fmt_g(t));
            for row in self.positions.iter().chain(&self.velocities) {
                out.push(',');
                out.push_str(&fmt_g(row[s]));
            }
            out.push('\n');
        }
        out
    }
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros trimmed.
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').unwrap_or((&sci, "0"));
    let exp: i32 = exp.parse().unwrap_or(0);
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let mant = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
        format!("{mant}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn follower_slots(g: &LeaderGraph) -> Vec<Option<usize>> {
    let mut next = 0;
    (0..g.n())
        .map(|v| {
            if g.is_leader(v) {
                None
            } else {
                next += 1;
                Some(next - 1)
            }
        })
        .collect()
}

pub fn simulate(cfg: &PlatoonConfig) -> Result<SimTrace> {
    cfg.validate()?;
    let g = &cfg.graph;
    g.ensure_reachable()?;
    let n = g.n();
    let slots = follower_slots(g);
    let steps = (cfg.t_end / cfg.dt).round() as usize;

    // x = [p; u]
    let deriv = |t: f64, x: &DVector<f64>, w: &mut [f64]| -> DVector<f64> {
        cfg.disturbance_at(t, &slots, w);
        let mut dx = DVector::zeros(2 * n);
        for v in 0..n {
            dx[v] = x[n + v];
            if slots[v].is_some() {
                let q: f64 = g.in_neighbors(v).iter().map(|&j| x[n + j] - x[n + v]).sum();
                dx[n + v] = q + w[v];
            }
        }
        dx
    };

    let mut x = DVector::from_iterator(
        2 * n,
        cfg.initial_positions.iter().chain(&cfg.initial_velocities).copied(),
    );
    let mut w = vec![0.0; n];
    let mut trace = SimTrace {
        times: Vec::with_capacity(steps + 1),
        positions: vec![Vec::with_capacity(steps + 1); n],
        velocities: vec![Vec::with_capacity(steps + 1); n],
        velocity_error: Vec::with_capacity(steps + 1),
    };
    let record = |trace: &mut SimTrace, t: f64, x: &DVector<f64>| {
        trace.times.push(t);
        let mut err = 0.0f64;
        for v in 0..n {
            trace.positions[v].push(x[v]);
            trace.velocities[v].push(x[n + v]);
            if slots[v].is_some() {
                err = err.max((x[n + v] - cfg.u_star).abs());
            }
        }
        trace.velocity_error.push(err);
    };
    record(&mut trace, 0.0, &x);
    let h = cfg.dt;
    for s in 0..steps {
        let t = s as f64 * h;
        let k1 = deriv(t, &x, &mut w);
        let k2 = deriv(t + 0.5 * h, &(&x + &k1 * (0.5 * h)), &mut w);
        let k3 = deriv(t + 0.5 * h, &(&x + &k2 * (0.5 * h)), &mut w);
        let k4 = deriv(t + h, &(&x + &k3 * h), &mut w);
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        let t_next = (s + 1) as f64 * h;
        if x.iter().any(|v| !v.is_finite() || v.abs() > BLOWUP) {
            return Err(Error::UnstableStep(t_next));
        }
        record(&mut trace, t_next, &x);
    }
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    /// L_g⁻¹ w per follower (m/s).
    pub analytic: Vec<f64>,
    /// Final simulated u_i − u* per follower (m/s).
    pub simulated: Vec<f64>,
    /// Largest deviation from `analytic` over the last 5% of the horizon.
    pub tail_deviation: f64,
}

/// Velocity offset from the reference under a constant disturbance.
pub fn analytic_steady_state(cfg: &PlatoonConfig) -> Result<Vec<f64>> {
    let levels = cfg.constant_levels()?;
    let l = cfg.graph.grounded_laplacian()?;
    let inv = spectral::inverse(&l.matrix)?;
    Ok((inv * DVector::from_vec(levels)).iter().copied().collect())
}

pub fn steady_state_error(cfg: &PlatoonConfig) -> Result<SteadyState> {
    let analytic = analytic_steady_state(cfg)?;
    let trace = simulate(cfg)?;
    let followers = cfg.graph.followers();
    let samples = trace.times.len();
    let tail_start = trace.times.partition_point(|&t| t < 0.95 * cfg.t_end).min(samples - 1);
    let mut tail_deviation = 0.0f64;
    for (i, &f) in followers.iter().enumerate() {
        for s in tail_start..samples {
            tail_deviation = tail_deviation.max((trace.velocities[f][s] - cfg.u_star - analytic[i]).abs());
        }
    }
    if tail_deviation > STEADY_TOL {
        return Err(Error::NotConverged(tail_deviation));
    }
    let simulated = followers.iter().map(|&f| trace.velocities[f][samples - 1] - cfg.u_star).collect();
    Ok(SteadyState { analytic, simulated, tail_deviation })
}

/// Gain from a slow sinusoidal disturbance to the follower velocity error,
/// with the input along the worst-case DC direction.
///
/// Simulates `periods` periods and measures the peak response norm over the
/// last one.
pub fn probe_velocity_gain(g: &LeaderGraph, omega: f64, periods: usize, dt: f64) -> Result<f64> {
    let l = g.grounded_laplacian()?;
    let sv = spectral::smallest_singular_value(&l.matrix)?;
    let v = sv.vector.ok_or(Error::Singular(sv.value))?;
    let dir = (&l.matrix * v) / sv.value;
    let period = 2.0 * std::f64::consts::PI / omega;
    let cfg = PlatoonConfig::new(g.clone(), 0.0)
        .with_disturbance(Disturbance::Sinusoid { amplitude: 1.0, frequency: omega, direction: dir.iter().copied().collect() })
        .with_horizon(period * periods as f64, dt);
    let trace = simulate(&cfg)?;
    let followers = g.followers();
    let start = trace.times.partition_point(|&t| t < cfg.t_end - period);
    let peak = (start..trace.times.len())
        .map(|s| followers.iter().map(|&f| trace.velocities[f][s].powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    Ok(peak / dir.norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    End,
    Middle,
}

impl std::fmt::Display for Placement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Placement::End => "end",
            Placement::Middle => "middle",
        })
    }
}

impl From<Placement> for LeaderPosition {
    fn from(p: Placement) -> Self {
        match p {
            Placement::End => LeaderPosition::End,
            Placement::Middle => LeaderPosition::Middle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Number of followers.
    pub length: usize,
    pub placement: Placement,
    pub hinf: f64,
    /// min over leaders of sqrt(closeness).
    pub closeness_bound: f64,
}

/// Platoon for `length` followers with the leader at `placement`.
pub fn platoon_graph(length: usize, placement: Placement) -> Result<LeaderGraph> {
    directed_path(length, placement.into())
}

pub fn leader_placement_sweep(lengths: &[usize], placements: &[Placement]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(lengths.len() * placements.len());
    for &length in lengths {
        if length < 2 {
            return Err(Error::BadParams(format!("platoon length must be at least 2, got {length}")));
        }
        for &placement in placements {
            let g = platoon_graph(length, placement)?;
            let hinf = hinf::hinf_value(&g)?;
            let closeness_bound = g
                .leaders()
                .iter()
                .map(|&l| g.closeness_centrality(l).map(f64::sqrt))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            rows.push(SweepRow { length, placement, hinf, closeness_bound });
        }
    }
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("length,placement,hinf,closeness_bound\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.length, r.placement, fmt_g(r.hinf), fmt_g(r.closeness_bound));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> LeaderGraph {
        platoon_graph(3, Placement::End).unwrap()
    }

    #[test]
    fn formatting() {
        assert_eq!(fmt_g(0.0), "0");
        assert_eq!(fmt_g(14.0), "14");
        assert_eq!(fmt_g(2.246979603717467), "2.24697960372");
        assert_eq!(fmt_g(-0.5), "-0.5");
        assert_eq!(fmt_g(1.5e-7), "1.5e-07");
        assert_eq!(fmt_g(123456789012345.0), "1.23456789012e+14");
    }

    #[test]
    fn equilibrium_stays_put() {
        let g = path3();
        let mut cfg = PlatoonConfig::new(g, 14.0).with_horizon(5.0, 0.01);
        cfg.initial_velocities = vec![14.0; 4];
        let tr = simulate(&cfg).unwrap();
        assert!(tr.velocities.iter().flatten().all(|&u| u == 14.0));
        assert_eq!(tr.times.len(), 501);
    }

    #[test]
    fn converges_to_reference() {
        let cfg = PlatoonConfig::new(path3(), 14.0).with_horizon(60.0, 0.01);
        let tr = simulate(&cfg).unwrap();
        assert!(*tr.velocity_error.last().unwrap() < 1e-6);
        assert!(tr.velocities[3].iter().all(|&u| u == 14.0));
    }

    #[test]
    fn steady_state_matches_dense_solve() {
        let cfg = PlatoonConfig::new(path3(), 14.0).with_disturbance(Disturbance::Constant { level: 0.1 });
        let ss = steady_state_error(&cfg).unwrap();
        // bidiagonal L: cumulative sums of the disturbance
        for (got, want) in ss.analytic.iter().zip([0.1, 0.2, 0.3]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(ss.tail_deviation < STEADY_TOL);
        let zero = analytic_steady_state(&PlatoonConfig::new(path3(), 14.0)).unwrap();
        assert_eq!(zero, vec![0.0; 3]);
    }

    #[test]
    fn middle_beats_end_at_steady_state() {
        let w = Disturbance::Constant { level: 0.1 };
        let end = analytic_steady_state(&PlatoonConfig::new(path3(), 14.0).with_disturbance(w.clone())).unwrap();
        let mid = analytic_steady_state(
            &PlatoonConfig::new(platoon_graph(3, Placement::Middle).unwrap(), 14.0).with_disturbance(w),
        )
        .unwrap();
        assert!(mid.iter().copied().fold(0.0, f64::max) < end.iter().copied().fold(0.0, f64::max));
    }

    #[test]
    fn sweep_rows() {
        let rows = leader_placement_sweep(&[2, 3], &[Placement::End]).unwrap();
        assert!((rows[0].hinf - 1.0 / (2.0 - 2.0 * (std::f64::consts::PI / 5.0).cos()).sqrt()).abs() < 1e-12);
        assert!((rows[1].hinf - 2.2469796).abs() < 1e-6);
        assert!((rows[1].closeness_bound - 6f64.sqrt()).abs() < 1e-12);
        let csv = sweep_csv(&rows);
        assert_eq!(csv.lines().count(), 3);
        assert!(leader_placement_sweep(&[1], &[Placement::End]).is_err());
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = PlatoonConfig::new(path3(), 14.0);
        cfg.initial_velocities[3] = 0.0;
        assert!(matches!(simulate(&cfg), Err(Error::BadParams(_))));
        let cfg = PlatoonConfig::new(path3(), 14.0).with_horizon(1.0, 0.0);
        assert!(simulate(&cfg).is_err());
    }

    #[test]
    fn trace_csv_header() {
        let cfg = PlatoonConfig::new(platoon_graph(2, Placement::End).unwrap(), 14.0).with_horizon(0.02, 0.01);
        let csv = simulate(&cfg).unwrap().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("time,p0,p1,p2,u0,u1,u2"));
        assert_eq!(lines.count(), 3);
    }
}
