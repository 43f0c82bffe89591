//! File formats: curve CSV files, result documents and flat config files.
//!
//! # Curve CSV
//!
//! One curve per row. If the first row parses as strictly increasing reals
//! in `[0, 1]` and more rows follow, it is the grid; otherwise the grid is
//! uniform over the columns. Values are written in shortest round-trip form.
//!
//! # Result documents
//!
//! Line oriented, diff friendly:
//!
//! ```text
//! frec-result
//! schema_version = 1
//! command = records
//! seed = none
//! arg.depth = mbd
//! [records]
//! n = 4
//! @columns j,R,kind,N,N_u,N_l,definitional
//! 1,1,L,1,0,1,1
//! ```
//!
//! Top-level `key = value` lines come first, `[name]` opens a section,
//! `@columns` starts the section's table and every following line without
//! ` = ` is a table row. Lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{FrecError, Result};
use crate::grid::{uniform_grid, Curve, FunctionalSample, Grid};
use crate::harness::McCell;
use crate::records::{counting_process, RecordTrajectory};
use crate::urtest::TestResult;

pub const SCHEMA_VERSION: &str = "1";
const MAGIC: &str = "frec-result";

/// Reads a functional sample from a CSV file.
pub fn parse_csv(path: impl AsRef<Path>) -> Result<FunctionalSample> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| FrecError::Io(format!("{}: {e}", path.display())))?;
    parse_csv_str(&text)
}

fn is_grid_row(values: &[f64]) -> bool {
    values.len() >= 2
        && values.iter().all(|v| (0.0..=1.0).contains(v))
        && values.windows(2).all(|w| w[1] > w[0])
}

pub fn parse_csv_str(text: &str) -> Result<FunctionalSample> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| FrecError::format(format!("row {}: {e}", r + 1)))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row_no = rows.len() + 1;
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(FrecError::format(format!(
                "row {row_no} has {} columns, expected {w}",
                record.len()
            )));
        }
        let values = record
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                cell.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        FrecError::format(format!(
                            "row {row_no}, column {}: not a number: '{cell}'",
                            c + 1
                        ))
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(FrecError::format("no data rows"));
    }
    let m = rows[0].len();
    if m < 2 {
        return Err(FrecError::format("curves need at least 2 grid points"));
    }
    let grid = if rows.len() > 1 && is_grid_row(&rows[0]) {
        Grid::new(rows.remove(0)).map_err(|e| FrecError::format(e.to_string()))?
    } else {
        uniform_grid(m)?
    };
    let curves = rows
        .into_iter()
        .map(Curve::new)
        .collect::<Result<Vec<_>>>()
        .map_err(|e| FrecError::format(e.to_string()))?;
    FunctionalSample::new(grid, curves).map_err(|e| FrecError::format(e.to_string()))
}

fn join<T: std::fmt::Display>(values: impl IntoIterator<Item = T>) -> String {
    let mut out = String::new();
    for (k, v) in values.into_iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v}");
    }
    out
}

/// CSV text with a grid header row followed by one row per curve.
pub fn write_csv(sample: &FunctionalSample) -> String {
    let mut out = join(sample.grid().points());
    out.push('\n');
    for c in sample.curves() {
        out.push_str(&join(c.values()));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Section {
    pub name: String,
    pub fields: Vec<(String, String)>,
    pub table: Option<Table>,
}

impl Section {
    pub fn new(name: impl Into<String>) -> Self {
        Section {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn field(mut self, key: &str, value: impl std::fmt::Display) -> Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

/// Structured output of one command invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultDocument {
    pub schema_version: String,
    pub command: String,
    /// Every flag value used, so the run can be regenerated.
    pub args: Vec<(String, String)>,
    pub seed: Option<u64>,
    pub sections: Vec<Section>,
}

impl ResultDocument {
    pub fn new(command: &str, args: Vec<(String, String)>, seed: Option<u64>) -> Self {
        ResultDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            args,
            seed,
            sections: Vec::new(),
        }
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn arg(&self, key: &str) -> Option<&str> {
        self.args
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "schema_version = {}", self.schema_version);
        let _ = writeln!(out, "command = {}", self.command);
        match self.seed {
            Some(s) => {
                let _ = writeln!(out, "seed = {s}");
            }
            None => out.push_str("seed = none\n"),
        }
        for (k, v) in &self.args {
            let _ = writeln!(out, "arg.{k} = {v}");
        }
        for s in &self.sections {
            let _ = writeln!(out, "[{}]", s.name);
            for (k, v) in &s.fields {
                let _ = writeln!(out, "{k} = {v}");
            }
            if let Some(t) = &s.table {
                let _ = writeln!(out, "@columns {}", t.columns.join(","));
                for row in &t.rows {
                    let _ = writeln!(out, "{}", row.join(","));
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });
        match lines.next() {
            Some((_, l)) if l.trim() == MAGIC => {}
            _ => return Err(FrecError::format(format!("missing '{MAGIC}' header line"))),
        }
        let mut doc = ResultDocument::new("", Vec::new(), None);
        doc.schema_version.clear();
        let mut current: Option<Section> = None;
        for (no, raw) in lines {
            let line = raw.trim_end();
            let err = |msg: &str| FrecError::format(format!("line {}: {msg}", no + 1));
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                if let Some(s) = current.take() {
                    doc.sections.push(s);
                }
                current = Some(Section::new(name));
            } else if let Some(cols) = line.strip_prefix("@columns ") {
                let s = current
                    .as_mut()
                    .ok_or_else(|| err("table outside a section"))?;
                s.table = Some(Table {
                    columns: cols.split(',').map(str::to_string).collect(),
                    rows: Vec::new(),
                });
            } else if let Some((k, v)) = line.split_once(" = ") {
                let (k, v) = (k.trim().to_string(), v.to_string());
                match current.as_mut() {
                    Some(s) => s.fields.push((k, v)),
                    None => match k.as_str() {
                        "schema_version" => doc.schema_version = v,
                        "command" => doc.command = v,
                        "seed" => {
                            doc.seed = if v == "none" {
                                None
                            } else {
                                Some(v.parse().map_err(|_| err("bad seed"))?)
                            }
                        }
                        _ => match k.strip_prefix("arg.") {
                            Some(a) => doc.args.push((a.to_string(), v)),
                            None => return Err(err(&format!("unknown top-level key '{k}'"))),
                        },
                    },
                }
            } else {
                let table = current
                    .as_mut()
                    .and_then(|s| s.table.as_mut())
                    .ok_or_else(|| err("row outside a table"))?;
                let row: Vec<String> = line.split(',').map(str::to_string).collect();
                if row.len() != table.columns.len() {
                    return Err(err("row width does not match the columns"));
                }
                table.rows.push(row);
            }
        }
        if let Some(s) = current.take() {
            doc.sections.push(s);
        }
        if doc.schema_version.is_empty() || doc.command.is_empty() {
            return Err(FrecError::format("missing schema_version or command"));
        }
        Ok(doc)
    }
}

/// Record listing: one row per time with `j, R_j, kind, N_j, N^u_j, N^l_j`
/// and a flag for the two definitional records.
pub fn records_section(traj: &RecordTrajectory) -> Section {
    let rows = counting_process(traj)
        .into_iter()
        .map(|c| {
            let event = traj.event_at(c.j);
            vec![
                c.j.to_string(),
                u8::from(event.is_some()).to_string(),
                event.map_or("-", |e| e.kind.as_str()).to_string(),
                c.total.to_string(),
                c.upper.to_string(),
                c.lower.to_string(),
                u8::from(event.is_some_and(|e| e.is_definitional())).to_string(),
            ]
        })
        .collect();
    let mut s = Section::new("records")
        .field("n", traj.n())
        .field("N_total", traj.total())
        .field("N_upper", traj.total_upper())
        .field("N_lower", traj.total_lower())
        .field("record_times", join(traj.record_times()));
    s.table = Some(Table {
        columns: ["j", "R", "kind", "N", "N_u", "N_l", "definitional"]
            .iter()
            .map(|c| c.to_string())
            .collect(),
        rows,
    });
    s
}

pub fn test_section(t: &TestResult) -> Section {
    Section::new("test")
        .field("n", t.n)
        .field("N_total", t.n_total)
        .field("N_upper", t.n_upper)
        .field("N_lower", t.n_lower)
        .field("T_n", t.statistic)
        .field("alpha", t.alpha)
        .field("q_alpha", t.q_alpha)
        .field("p_value", t.p_value)
        .field("reject", t.reject)
}

/// Cell summary with per-replicate values as a table.
pub fn mc_cell_section(name: &str, c: &McCell) -> Section {
    let mut s = Section::new(name)
        .field("model", c.model.as_str())
        .field("noise", c.noise.kind.as_str())
        .field("n", c.n)
        .field("psi1_norm", c.psi1_norm)
        .field("alpha", c.alpha)
        .field("replicates", c.replicates.len())
        .field("rejections", c.rejections)
        .field("rejection_rate", c.rejection_rate)
        .field("mean_T", c.mean_statistic)
        .field("far_norm", "unavailable")
        .field("wall_time_s", format!("{:.3}", c.wall_time));
    s.table = Some(Table {
        columns: [
            "replicate",
            "N_total",
            "N_upper",
            "N_lower",
            "T_n",
            "reject",
        ]
        .iter()
        .map(|c| c.to_string())
        .collect(),
        rows: c
            .replicates
            .iter()
            .enumerate()
            .map(|(r, rep)| {
                vec![
                    r.to_string(),
                    rep.n_total.to_string(),
                    rep.n_upper.to_string(),
                    rep.n_lower.to_string(),
                    rep.statistic.to_string(),
                    u8::from(rep.reject).to_string(),
                ]
            })
            .collect(),
    });
    s
}

/// Parses a flat `key = value` config file; `#` starts a comment line.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (k, v) = t.split_once('=').ok_or_else(|| {
            FrecError::format(format!("config line {}: expected key = value", no + 1))
        })?;
        let k = k.trim().trim_start_matches("--").to_string();
        if k.is_empty() {
            return Err(FrecError::format(format!(
                "config line {}: empty key",
                no + 1
            )));
        }
        out.push((k, v.trim().to_string()));
    }
    Ok(out)
}
