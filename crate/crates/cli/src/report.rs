//! Plain-text rendering.

use std::fmt;

use grounded_core::bounds::{BoundsReport, GammaCertificate};
use grounded_core::EdgeEffectReport;
use serde::Serialize;

pub fn num(x: f64) -> String {
    format!("{x:.6}")
}

pub fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

/// The serde name of a unit enum variant.
pub fn snake<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        other => format!("{other:?}"),
    }
}

/// Two-column key/value listing.
#[derive(Default)]
pub struct Table {
    rows: Vec<(String, String)>,
}

impl Table {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn row(&mut self, key: impl Into<String>, value: impl ToString) {
        self.rows.push((key.into(), value.to_string()));
    }
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.rows {
            writeln!(f, "{k:<w$}  {v}")?;
        }
        Ok(())
    }
}

/// Column-aligned table with a header.
pub struct Grid {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Grid {
    pub fn new(header: &[&str]) -> Self {
        Grid { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut widths: Vec<usize> = self.header.iter().map(String::len).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.len());
            }
        }
        for r in std::iter::once(&self.header).chain(&self.rows) {
            let cells: Vec<String> = r.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
            writeln!(f, "{}", cells.join("  ").trim_end())?;
        }
        Ok(())
    }
}

pub fn bounds_table(title: &str, r: &BoundsReport) -> String {
    let mut g = Grid::new(&["side", "name", "value"]);
    g.push(vec!["target".into(), snake(&r.target_kind), num(r.target)]);
    let mark = |name: &str, tight: &Option<String>| {
        if tight.as_deref() == Some(name) {
            format!("{name} *")
        } else {
            name.to_string()
        }
    };
    for b in &r.lower {
        g.push(vec!["lower".into(), mark(&b.name, &r.tight_lower), num(b.value)]);
    }
    for b in &r.upper {
        g.push(vec!["upper".into(), mark(&b.name, &r.tight_upper), num(b.value)]);
    }
    for b in &r.extras {
        g.push(vec!["extra".into(), b.name.clone(), num(b.value)]);
    }
    let status = if r.sandwich_holds() { "ok" } else { "VIOLATED" };
    format!("[{title}] sandwich {status}\n{g}")
}

pub fn certificate(c: &GammaCertificate) -> String {
    let mut g = Grid::new(&["kind", "holds", "lhs", "rhs", "condition"]);
    for cond in &c.conditions {
        g.push(vec![
            snake(&cond.kind),
            if cond.holds { "yes" } else { "no" }.into(),
            cond.lhs.to_string(),
            cond.rhs.to_string(),
            cond.name.clone(),
        ]);
    }
    format!("gamma {} verdict {}\n{g}", c.gamma, snake(&c.verdict))
}

pub fn edge_effect(r: &EdgeEffectReport) -> String {
    let mut g = Grid::new(&["edge", "classification", "before", "after", "confirmed"]);
    let confirmed = match r.prediction_confirmed {
        Some(true) => "confirmed",
        Some(false) => "refuted",
        None => "-",
    };
    g.push(vec![
        format!("{}->{}", r.edge.0, r.edge.1),
        snake(&r.classification),
        format!("{:.4}", r.hinf_before),
        format!("{:.4}", r.hinf_after),
        confirmed.into(),
    ]);
    format!("{g}reason {}\n", snake(&r.reason))
}
