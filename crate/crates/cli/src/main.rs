mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use grounded_core::bounds::{self, Isoperimetric, Verdict};
use grounded_core::graph::io;
use grounded_core::hinf;
use grounded_core::platoon::{self, Disturbance, Placement, PlatoonConfig};
use grounded_core::structure;
use grounded_core::{Error, FollowerShape, GraphKind, LeaderGraph, LeaderPosition, Mode};
use serde::Serialize;

use report::Table;

#[derive(Parser)]
#[command(name = "grounded", version, about = "H-infinity analysis of leader-follower networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArg {
    /// Graph file, text or JSON.
    #[arg(long, short = 'g')]
    graph: PathBuf,
    /// Print JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Norm, reachability and follower structure.
    Analyze {
        #[command(flatten)]
        input: GraphArg,
        /// Also verify the norm with a frequency sweep.
        #[arg(long)]
        sweep: bool,
    },
    /// Every applicable bound next to the quantity it bounds.
    Bounds {
        #[command(flatten)]
        input: GraphArg,
        /// Attach the degree certificate for this gamma.
        #[arg(long)]
        gamma: Option<f64>,
        /// Skip the isoperimetric subset enumeration.
        #[arg(long)]
        no_isoperimetric: bool,
    },
    /// Degree certificate for a norm target. Exit 0 guaranteed, 4 impossible, 5 inconclusive.
    Certify {
        #[command(flatten)]
        input: GraphArg,
        #[arg(long)]
        gamma: f64,
    },
    /// Predicted and measured effect of adding one follower edge.
    EdgeEffect {
        #[command(flatten)]
        input: GraphArg,
        /// Candidate edge FROM TO. Nodes are ids or `fK` for the K-th follower.
        #[arg(long, num_args = 2, value_names = ["FROM", "TO"], required = true)]
        edge: Vec<String>,
        /// Edge already added before the candidate; repeatable.
        #[arg(long = "with", num_args = 2, value_names = ["FROM", "TO"], action = clap::ArgAction::Append)]
        with: Vec<String>,
    },
    /// Attach a fresh leader to a follower and measure the norm.
    Leaders {
        #[command(flatten)]
        input: GraphArg,
        /// Follower to attach to; repeatable, each measured separately.
        #[arg(long, required = true)]
        attach: Vec<String>,
    },
    /// Write a generated graph.
    Generate(GenerateArgs),
    /// Simulate a platoon and report the steady-state velocity error.
    Platoon(PlatoonArgs),
    /// H-infinity norm of platoons over lengths and leader placements, as CSV.
    Sweep {
        /// `A..B:STEP` (inclusive) or a comma list.
        #[arg(long, default_value = "3..31:2")]
        lengths: String,
        #[arg(long, value_delimiter = ',', default_value = "end,middle")]
        placements: Vec<PlacementArg>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Kind {
    DirectedPath,
    DirectedCycle,
    DirectedRandomTree,
    BalancedCycle,
    UndirectedPath,
    RandomDirected,
    RandomUndirected,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlacementArg {
    End,
    Middle,
}

impl From<PlacementArg> for Placement {
    fn from(p: PlacementArg) -> Self {
        match p {
            PlacementArg::End => Placement::End,
            PlacementArg::Middle => Placement::Middle,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    kind: Kind,
    /// Number of followers (cycle length for cycles).
    size: usize,
    /// Leader slot for paths: end, middle or a slot index.
    #[arg(long, default_value = "end")]
    leader: String,
    /// Leader count for balanced cycles and random graphs.
    #[arg(long, default_value_t = 1)]
    leaders: usize,
    /// Extra leaders for random trees.
    #[arg(long, default_value_t = 0)]
    extra_leaders: usize,
    #[arg(long, default_value_t = 0.3)]
    edge_prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; `.json` selects JSON. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PlatoonArgs {
    /// Graph file; otherwise a path platoon is built from --length.
    #[arg(long, short = 'g', conflicts_with_all = ["length", "placement"])]
    graph: Option<PathBuf>,
    /// Number of followers.
    #[arg(long, default_value_t = 7)]
    length: usize,
    #[arg(long, value_enum, default_value = "end")]
    placement: PlacementArg,
    /// Reference velocity (m/s).
    #[arg(long, default_value_t = 14.0)]
    u_star: f64,
    /// Constant disturbance on every follower (m/s^2).
    #[arg(long, default_value_t = 0.1)]
    disturbance: f64,
    #[arg(long, default_value_t = platoon::DEFAULT_T_END)]
    t_end: f64,
    #[arg(long, default_value_t = platoon::DEFAULT_DT)]
    dt: f64,
    /// Write the full trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

/// Error paired with its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Unreachable(_) => 3,
            Error::Parse { .. } | Error::Json(_) => 2,
            _ => 1,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, msg: msg.into() }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Analyze { input, sweep } => analyze(&input, sweep),
        Command::Bounds { input, gamma, no_isoperimetric } => bounds_cmd(&input, gamma, no_isoperimetric),
        Command::Certify { input, gamma } => certify(&input, gamma),
        Command::EdgeEffect { input, edge, with } => edge_effect(&input, &edge, &with),
        Command::Leaders { input, attach } => leaders(&input, &attach),
        Command::Generate(args) => generate(&args),
        Command::Platoon(args) => platoon_cmd(&args),
        Command::Sweep { lengths, placements, json } => sweep(&lengths, &placements, json),
    }
}

/// Reads and validates a graph. Any file or format problem is exit 2.
fn load(path: &Path) -> Result<LeaderGraph, Failure> {
    let g = io::read_graph(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    g.ensure_reachable()?;
    Ok(g)
}

fn emit_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
}

/// `fK` is the K-th follower (1-based, ascending id); anything else is a node id.
fn parse_node(g: &LeaderGraph, tok: &str) -> Result<usize, Failure> {
    if let Some(k) = tok.strip_prefix('f') {
        let k: usize = k.parse().map_err(|_| usage(format!("bad node '{tok}'")))?;
        let fs = g.followers();
        return k
            .checked_sub(1)
            .and_then(|i| fs.get(i).copied())
            .ok_or_else(|| usage(format!("'{tok}': graph has {} followers", fs.len())));
    }
    let v: usize = tok.parse().map_err(|_| usage(format!("bad node '{tok}'")))?;
    if v >= g.n() {
        return Err(usage(format!("node {v} out of range")));
    }
    Ok(v)
}

fn parse_pairs(g: &LeaderGraph, toks: &[String]) -> Result<Vec<(usize, usize)>, Failure> {
    toks.chunks(2).map(|p| Ok((parse_node(g, &p[0])?, parse_node(g, &p[1])?))).collect()
}

#[derive(Serialize)]
struct SweepCheck {
    value: f64,
    argmax_omega: Option<f64>,
    points: usize,
}

#[derive(Serialize)]
struct AnalyzeReport {
    mode: Mode,
    nodes: usize,
    followers: usize,
    leaders: Vec<usize>,
    all_reachable: bool,
    hinf: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    hinf_undirected_counterpart: Option<f64>,
    follower_shape: FollowerShape,
    balanced: bool,
    tree: bool,
    /// None when the square law does not apply.
    square_law_holds: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<SweepCheck>,
}

fn analyze(input: &GraphArg, with_sweep: bool) -> Outcome {
    let g = load(&input.graph)?;
    let hd = hinf::hinf_value(&g)?;
    let hu = match g.mode() {
        Mode::Directed => Some(hinf::hinf_value(&g.undirected_counterpart()?)?),
        Mode::Undirected => None,
    };
    let shape = g.follower_shape();
    let square_law_holds = bounds::square_law_applies(&g).then(|| {
        let hu = hu.unwrap_or(f64::NAN);
        (hd * hd - hu).abs() <= 1e-9 * hu.max(1.0)
    });
    let sweep = if with_sweep {
        let grid = hinf::default_grid();
        let r = hinf::hinf_verify_sweep(&g, &grid)?;
        Some(SweepCheck { value: r.value, argmax_omega: r.argmax_omega, points: grid.len() })
    } else {
        None
    };
    let rep = AnalyzeReport {
        mode: g.mode(),
        nodes: g.n(),
        followers: g.num_followers(),
        leaders: g.leaders().to_vec(),
        all_reachable: true,
        hinf: hd,
        hinf_undirected_counterpart: hu,
        follower_shape: shape,
        balanced: g.is_follower_balanced(),
        tree: shape == FollowerShape::Tree,
        square_law_holds,
        sweep,
    };
    if input.json {
        emit_json(&rep);
        return Ok(0);
    }
    let yes = |b: bool| if b { "yes" } else { "no" };
    let mut t = Table::new();
    t.row("mode", rep.mode);
    t.row("followers", rep.followers);
    t.row("leaders", report::join(&rep.leaders));
    t.row("reachable", "all followers");
    match rep.hinf_undirected_counterpart {
        Some(hu) => {
            t.row("hinf_directed", report::num(rep.hinf));
            t.row("hinf_undirected_counterpart", report::num(hu));
        }
        None => t.row("hinf", report::num(rep.hinf)),
    }
    t.row("follower_shape", report::snake(&rep.follower_shape));
    t.row("balanced", yes(rep.balanced));
    t.row("tree", yes(rep.tree));
    t.row(
        "square_law",
        match rep.square_law_holds {
            Some(true) => "holds",
            Some(false) => "violated",
            None => "not applicable",
        },
    );
    if let Some(s) = &rep.sweep {
        t.row("sweep_max", report::num(s.value));
        t.row("sweep_argmax_omega", s.argmax_omega.map_or("-".into(), report::num));
    }
    print!("{t}");
    Ok(0)
}

fn bounds_cmd(input: &GraphArg, gamma: Option<f64>, no_iso: bool) -> Outcome {
    let g = load(&input.graph)?;
    let iso = if no_iso || g.num_followers() > bounds::BRUTE_FORCE_LIMIT {
        Isoperimetric::Off
    } else {
        Isoperimetric::BruteForce
    };
    let mut reports = Vec::new();
    match g.mode() {
        Mode::Undirected => reports.push(("undirected", bounds::undirected_bounds(&g, iso)?)),
        Mode::Directed => {
            let mut d = bounds::directed_bounds(&g)?;
            if let Some(gamma) = gamma {
                d.gamma_verdict = Some(bounds::certify_gamma(&g, gamma)?);
            }
            reports.push(("directed", d));
            reports.push(("undirected_counterpart", bounds::undirected_bounds(&g.undirected_counterpart()?, iso)?));
            if g.is_follower_balanced() {
                reports.push(("balanced", bounds::balanced_bound(&g)?));
            }
            if g.follower_shape() == FollowerShape::Tree {
                reports.push(("tree", bounds::tree_bounds(&g)?));
            }
        }
    }
    if input.json {
        let map: serde_json::Map<String, serde_json::Value> = reports
            .iter()
            .map(|(k, r)| (k.to_string(), serde_json::to_value(r).expect("report serializes")))
            .collect();
        emit_json(&map);
        return Ok(0);
    }
    for (i, (name, r)) in reports.iter().enumerate() {
        if i > 0 {
            println!();
        }
        print!("{}", report::bounds_table(name, r));
    }
    if let Some(c) = reports.first().and_then(|(_, r)| r.gamma_verdict.as_ref()) {
        println!();
        print!("{}", report::certificate(c));
    }
    Ok(0)
}

fn certify(input: &GraphArg, gamma: f64) -> Outcome {
    let g = load(&input.graph)?;
    let c = bounds::certify_gamma(&g, gamma)?;
    if input.json {
        emit_json(&c);
    } else {
        print!("{}", report::certificate(&c));
    }
    Ok(match c.verdict {
        Verdict::Guaranteed => 0,
        Verdict::Impossible => 4,
        Verdict::Inconclusive => 5,
    })
}

fn edge_effect(input: &GraphArg, edge: &[String], with: &[String]) -> Outcome {
    let g = load(&input.graph)?;
    let edge = parse_pairs(&g, edge)?[0];
    let existing = parse_pairs(&g, with)?;
    let r = structure::apply_edge_and_measure(&g, &existing, edge)?;
    if input.json {
        emit_json(&r);
    } else {
        print!("{}", report::edge_effect(&r));
    }
    Ok(0)
}

fn leaders(input: &GraphArg, attach: &[String]) -> Outcome {
    let g = load(&input.graph)?;
    let effects = attach
        .iter()
        .map(|tok| Ok(structure::leader_addition_effect(&g, parse_node(&g, tok)?)?))
        .collect::<Result<Vec<_>, Failure>>()?;
    if input.json {
        emit_json(&effects);
        return Ok(0);
    }
    let mut t = report::Grid::new(&["follower", "new_leader", "hinf_before", "hinf_after"]);
    for e in &effects {
        t.push(vec![
            e.follower.to_string(),
            e.new_leader.to_string(),
            report::num(e.hinf_before),
            report::num(e.hinf_after),
        ]);
    }
    print!("{t}");
    Ok(0)
}

fn leader_position(s: &str) -> Result<LeaderPosition, Failure> {
    match s {
        "end" => Ok(LeaderPosition::End),
        "middle" => Ok(LeaderPosition::Middle),
        _ => s.parse().map(LeaderPosition::Index).map_err(|_| usage(format!("bad leader position '{s}'"))),
    }
}

fn generate(a: &GenerateArgs) -> Outcome {
    let kind = match a.kind {
        Kind::DirectedPath => GraphKind::DirectedPath { followers: a.size, leader: leader_position(&a.leader)? },
        Kind::DirectedCycle => GraphKind::DirectedCyclePlusLeader { cycle: a.size },
        Kind::DirectedRandomTree => {
            GraphKind::DirectedRandomTree { followers: a.size, extra_leaders: a.extra_leaders, seed: a.seed }
        }
        Kind::BalancedCycle => GraphKind::BalancedCycleFamily { cycle: a.size, leaders: a.leaders },
        Kind::UndirectedPath => GraphKind::UndirectedPath { followers: a.size },
        Kind::RandomDirected => {
            GraphKind::RandomDirected { followers: a.size, edge_prob: a.edge_prob, leaders: a.leaders, seed: a.seed }
        }
        Kind::RandomUndirected => {
            GraphKind::RandomUndirected { followers: a.size, edge_prob: a.edge_prob, leaders: a.leaders, seed: a.seed }
        }
    };
    let g = grounded_core::generate(&kind)?;
    match &a.out {
        Some(path) => grounded_core::write_graph(&g, path)?,
        None if a.json => println!("{}", io::to_json(&g)),
        None => print!("{}", io::to_text(&g)),
    }
    Ok(0)
}

#[derive(Serialize)]
struct PlatoonReport {
    followers: Vec<usize>,
    u_star: f64,
    disturbance: f64,
    t_end: f64,
    dt: f64,
    #[serde(flatten)]
    steady: platoon::SteadyState,
}

fn platoon_cmd(a: &PlatoonArgs) -> Outcome {
    let g = match &a.graph {
        Some(path) => load(path)?,
        None => platoon::platoon_graph(a.length, a.placement.into())?,
    };
    let cfg = PlatoonConfig::new(g, a.u_star)
        .with_disturbance(Disturbance::Constant { level: a.disturbance })
        .with_horizon(a.t_end, a.dt);
    if let Some(path) = &a.trace {
        let trace = platoon::simulate(&cfg)?;
        std::fs::write(path, trace.to_csv()).map_err(Error::from)?;
    }
    let steady = platoon::steady_state_error(&cfg)?;
    let rep = PlatoonReport {
        followers: cfg.graph.followers(),
        u_star: a.u_star,
        disturbance: a.disturbance,
        t_end: a.t_end,
        dt: a.dt,
        steady,
    };
    if a.json {
        emit_json(&rep);
        return Ok(0);
    }
    let mut t = report::Grid::new(&["follower", "analytic", "simulated"]);
    for (i, f) in rep.followers.iter().enumerate() {
        t.push(vec![f.to_string(), report::num(rep.steady.analytic[i]), report::num(rep.steady.simulated[i])]);
    }
    print!("{t}");
    println!("tail_deviation {:.3e}", rep.steady.tail_deviation);
    Ok(0)
}

/// `A..B:STEP` with B inclusive, `A..B`, or `a,b,c`.
fn parse_lengths(s: &str) -> Result<Vec<usize>, Failure> {
    let bad = || usage(format!("bad lengths '{s}'"));
    if let Some((lo, rest)) = s.split_once("..") {
        let (hi, step) = rest.split_once(':').unwrap_or((rest, "1"));
        let (lo, hi, step): (usize, usize, usize) = (
            lo.trim().parse().map_err(|_| bad())?,
            hi.trim().parse().map_err(|_| bad())?,
            step.trim().parse().map_err(|_| bad())?,
        );
        if step == 0 || lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).step_by(step).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

fn sweep(lengths: &str, placements: &[PlacementArg], json: bool) -> Outcome {
    let lengths = parse_lengths(lengths)?;
    let placements: Vec<Placement> = placements.iter().map(|&p| p.into()).collect();
    let rows = platoon::leader_placement_sweep(&lengths, &placements)?;
    if json {
        emit_json(&rows);
    } else {
        print!("{}", platoon::sweep_csv(&rows));
    }
    Ok(0)
}
