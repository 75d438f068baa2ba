use std::io::Write;

use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};

pub const CONVENTION: &str = "M = i diag(E1,E2) + (1/2)[[G, Gc],[Gc*, G]] with Gc = G cos(phi/2) + i dG sin(phi/2); \
    gauge V1L* = V2L = |VL| e^{i phi/4}, V1R = V2R* = |VR| e^{i phi/4}; rho21 = <2|rho|1>; dots empty at t = 0";
pub const UNITS: &str = "hbar = e = k_B = 1; energies in the unit of the linewidths (normally Gamma), times in its inverse, \
    phases in radians, current in e Gamma / hbar";
pub const NAN_NOTE: &str = "undefined phase (|rho21| <= 1e-9) is written as NaN in csv and null in json";

/// Shortest round-trip form; exponent notation for very small or large magnitudes.
pub fn num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{x}")
    } else {
        format!("{x:?}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => num(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            // serde_json maps non-finite numbers to null.
            Cell::Num(x) => json!(x),
            Cell::Text(s) => json!(s),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ResultTable {
    pub command: &'static str,
    pub columns: Vec<(&'static str, &'static str)>,
    pub rows: Vec<Vec<Cell>>,
    /// Command-specific summary entries, after the config echo.
    pub summary: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(command: &'static str, columns: &[(&'static str, &'static str)]) -> Self {
        Self {
            command,
            columns: columns.to_vec(),
            rows: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    fn metadata(&self, config: &RunConfig) -> Vec<(String, String)> {
        let mut m = vec![
            ("generator".to_string(), format!("abmol {}", env!("CARGO_PKG_VERSION"))),
            ("command".to_string(), self.command.to_string()),
        ];
        m.extend(config.echo());
        m.push(("convention".into(), CONVENTION.into()));
        m.push(("units".into(), UNITS.into()));
        m.push(("nan".into(), NAN_NOTE.into()));
        m.extend(self.summary.iter().cloned());
        m
    }

    pub fn write(&self, config: &RunConfig, out: &mut dyn Write) -> std::io::Result<()> {
        match config.format {
            Format::Csv => self.write_csv(config, out),
            Format::Json => self.write_json(config, out),
        }
    }

    fn write_csv(&self, config: &RunConfig, out: &mut dyn Write) -> std::io::Result<()> {
        for (k, v) in self.metadata(config) {
            writeln!(out, "# {k} = {v}")?;
        }
        let units: Vec<String> = self.columns.iter().map(|(n, u)| format!("{n}: {u}")).collect();
        writeln!(out, "# columns = {}", units.join(", "))?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns.iter().map(|(n, _)| *n))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()
    }

    fn write_json(&self, config: &RunConfig, out: &mut dyn Write) -> std::io::Result<()> {
        let metadata: Map<String, Value> = self.metadata(config).into_iter().map(|(k, v)| (k, json!(v))).collect();
        let doc = json!({
            "metadata": metadata,
            "columns": self.columns.iter().map(|(n, _)| *n).collect::<Vec<_>>(),
            "units": self.columns.iter().map(|(_, u)| *u).collect::<Vec<_>>(),
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        });
        serde_json::to_writer_pretty(&mut *out, &doc)?;
        writeln!(out)
    }
}
