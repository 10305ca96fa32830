//! Text and JSON graph files.
//!
//! ```text
//! mode directed
//! nodes 4
//! leaders 3
//! edge 3 0
//! edge 0 1
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{GraphSpec, LeaderGraph, Mode};
use crate::error::{Error, Result};

pub fn to_text(g: &LeaderGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "mode {}", g.mode());
    let _ = writeln!(out, "nodes {}", g.n());
    let leaders: Vec<String> = g.leaders().iter().map(|l| l.to_string()).collect();
    let _ = writeln!(out, "leaders {}", leaders.join(" "));
    for &(a, b) in g.edges() {
        let _ = writeln!(out, "edge {a} {b}");
    }
    out
}

fn parse_id(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse().map_err(|_| Error::Parse { line, msg: format!("bad {what} '{tok}'") })
}

pub fn from_text(text: &str) -> Result<LeaderGraph> {
    let mut mode = None;
    let mut nodes = None;
    let mut leaders: Option<Vec<usize>> = None;
    let mut edges = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let body = raw.split('#').next().unwrap_or("");
        let mut toks = body.split_whitespace();
        let Some(key) = toks.next() else { continue };
        let rest: Vec<&str> = toks.collect();
        let dup = |what: &str| Error::Parse { line, msg: format!("repeated '{what}' line") };
        match key {
            "mode" => {
                if mode.is_some() {
                    return Err(dup("mode"));
                }
                mode = Some(match rest.as_slice() {
                    ["directed"] => Mode::Directed,
                    ["undirected"] => Mode::Undirected,
                    _ => return Err(Error::Parse { line, msg: "mode must be 'directed' or 'undirected'".into() }),
                });
            }
            "nodes" => {
                if nodes.is_some() {
                    return Err(dup("nodes"));
                }
                let [tok] = rest.as_slice() else {
                    return Err(Error::Parse { line, msg: "expected 'nodes <n>'".into() });
                };
                nodes = Some(parse_id(tok, line, "node count")?);
            }
            "leaders" => {
                if leaders.is_some() {
                    return Err(dup("leaders"));
                }
                if rest.is_empty() {
                    return Err(Error::Parse { line, msg: "leader list is empty".into() });
                }
                leaders = Some(rest.iter().map(|t| parse_id(t, line, "leader id")).collect::<Result<_>>()?);
            }
            "edge" => {
                let [a, b] = rest.as_slice() else {
                    return Err(Error::Parse { line, msg: "expected 'edge <from> <to>'".into() });
                };
                edges.push((parse_id(a, line, "edge endpoint")?, parse_id(b, line, "edge endpoint")?));
            }
            other => return Err(Error::Parse { line, msg: format!("unknown keyword '{other}'") }),
        }
    }

    let missing = |what: &str| Error::Parse { line: last_line.max(1), msg: format!("missing '{what}' line") };
    let mode = mode.ok_or_else(|| missing("mode"))?;
    let n = nodes.ok_or_else(|| missing("nodes"))?;
    let leaders = leaders.ok_or_else(|| missing("leaders"))?;
    LeaderGraph::new(n, mode, &edges, &leaders)
}

pub fn to_json(g: &LeaderGraph) -> String {
    serde_json::to_string_pretty(&GraphSpec::from(g.clone())).expect("graph spec serializes")
}

pub fn from_json(text: &str) -> Result<LeaderGraph> {
    let spec: GraphSpec = serde_json::from_str(text)?;
    LeaderGraph::try_from(spec)
}

fn is_json_path(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Parses either format; JSON is chosen by a `.json` extension or a leading `{`.
pub fn parse_graph(text: &str) -> Result<LeaderGraph> {
    if text.trim_start().starts_with('{') {
        from_json(text)
    } else {
        from_text(text)
    }
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<LeaderGraph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    if is_json_path(path) {
        from_json(&text)
    } else {
        parse_graph(&text)
    }
}

pub fn write_graph(g: &LeaderGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = if is_json_path(path) { to_json(g) } else { to_text(g) };
    std::fs::write(path, text)?;
    Ok(())
}
