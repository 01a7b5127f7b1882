//! Report files: CSV or JSON tables plus a JSON summary per module, each
//! with a provenance header. The header is the only place a timestamp
//! appears, so bodies are byte-identical across runs with the same config.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use gaussconv::gauss::GENERATOR_ID;
use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Version of the input schemas and report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
    B(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::B(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::F)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(v) => format!("{v:.16e}"),
            Cell::I(v) => v.to_string(),
            Cell::S(s) => s.clone(),
            Cell::B(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(v) => json!(v),
            Cell::I(v) => json!(v),
            Cell::S(s) => json!(s),
            Cell::B(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Table { name: name.into(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn csv_body(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn json_body(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let m: serde_json::Map<String, Value> =
                    self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect();
                Value::Object(m)
            })
            .collect();
        json!({ "columns": self.columns, "rows": rows })
    }
}

/// One tolerance check. `lower`/`upper` bound `value` when present; a
/// check with neither is a plain flag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub passed: bool,
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn le(id: impl Into<String>, value: f64, upper: f64) -> Self {
        Check { id: id.into(), passed: value <= upper, value: Some(value), lower: None, upper: Some(upper), note: None }
    }

    pub fn ge(id: impl Into<String>, value: f64, lower: f64) -> Self {
        Check { id: id.into(), passed: value >= lower, value: Some(value), lower: Some(lower), upper: None, note: None }
    }

    pub fn within(id: impl Into<String>, value: f64, lower: f64, upper: f64) -> Self {
        Check {
            id: id.into(),
            passed: value >= lower && value <= upper,
            value: Some(value),
            lower: Some(lower),
            upper: Some(upper),
            note: None,
        }
    }

    pub fn flag(id: impl Into<String>, passed: bool) -> Self {
        Check { id: id.into(), passed, value: None, lower: None, upper: None, note: None }
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Everything one subcommand produces.
#[derive(Debug, Clone)]
pub struct ModuleReport {
    pub module: &'static str,
    pub tol: f64,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    pub summary: Value,
}

impl ModuleReport {
    pub fn new(module: &'static str, tol: f64) -> Self {
        ModuleReport { module, tol, checks: Vec::new(), tables: Vec::new(), summary: json!({}) }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Run-wide settings shared by every module.
#[derive(Debug, Clone)]
pub struct Context {
    pub seed: u64,
    pub samples: usize,
    pub quick: bool,
    pub tol: Option<f64>,
    pub format: Format,
    pub out_dir: PathBuf,
    pub generated_unix: u64,
}

impl Context {
    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn header(&self, module: &str, tol: Option<f64>) -> Vec<(&'static str, String)> {
        let mut h = vec![
            ("tool", format!("gc {TOOL_VERSION}")),
            ("library", format!("gaussconv {}", gaussconv::VERSION)),
            ("module", format!("{module} {}", gaussconv::VERSION)),
            ("schema_version", SCHEMA_VERSION.to_string()),
            ("generator", GENERATOR_ID.to_string()),
            ("seed", self.seed.to_string()),
            ("samples", self.samples.to_string()),
            ("quick", self.quick.to_string()),
        ];
        if let Some(t) = tol {
            h.push(("tol", format!("{t:e}")));
        }
        h.push(("generated_unix", self.generated_unix.to_string()));
        h
    }

    fn csv_header(&self, module: &str, tol: Option<f64>) -> String {
        let mut out = String::new();
        for (k, v) in self.header(module, tol) {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out
    }

    fn json_doc(&self, module: &str, tol: Option<f64>, body: Value) -> String {
        let header: serde_json::Map<String, Value> =
            self.header(module, tol).into_iter().map(|(k, v)| (k.to_string(), Value::String(v))).collect();
        let mut s = serde_json::to_string_pretty(&json!({ "header": header, "body": body })).expect("serializable");
        s.push('\n');
        s
    }

    fn write(&self, path: &Path, contents: &str) -> Result<(), CliError> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        }
        fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    /// Writes tables and `summary.json` under `<out_dir>/<module>/`.
    pub fn write_module(&self, r: &ModuleReport) -> Result<PathBuf, CliError> {
        let dir = self.out_dir.join(r.module);
        for t in &r.tables {
            match self.format {
                Format::Csv => {
                    let body = self.csv_header(r.module, Some(r.tol)) + &t.csv_body();
                    self.write(&dir.join(format!("{}.csv", t.name)), &body)?;
                }
                Format::Json => {
                    let doc = self.json_doc(r.module, Some(r.tol), t.json_body());
                    self.write(&dir.join(format!("{}.json", t.name)), &doc)?;
                }
            }
        }
        let passed = r.checks.iter().filter(|c| c.passed).count();
        let body = json!({
            "module": r.module,
            "passed": passed,
            "total": r.checks.len(),
            "checks": r.checks,
            "summary": r.summary,
        });
        self.write(&dir.join("summary.json"), &self.json_doc(r.module, Some(r.tol), body))?;
        Ok(dir)
    }

    pub fn write_failures(&self, module: &str, failures: &[(String, Check)]) -> Result<String, CliError> {
        let list: Vec<Value> = failures.iter().map(|(m, c)| json!({ "module": m, "check": c })).collect();
        let body = json!({ "failures": list });
        self.write(&self.out_dir.join("failures.json"), &self.json_doc(module, None, body.clone()))?;
        Ok(serde_json::to_string(&body).expect("serializable"))
    }

    pub fn write_raw(&self, name: &str, module: &str, body: Value) -> Result<(), CliError> {
        self.write(&self.out_dir.join(name), &self.json_doc(module, None, body))
    }
}
