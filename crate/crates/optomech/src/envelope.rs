//! Result envelope and plot-ready tables.
//!
//! The envelope carries no timestamps or host details, so identical inputs
//! give identical bytes.

use serde::Serialize;

use crate::config::{OutputFormat, ScenarioConfig};

/// Engine identification.
#[derive(Debug, Clone, Serialize)]
pub struct EngineInfo {
    /// Package name.
    pub name: &'static str,
    /// Package version.
    pub version: &'static str,
}

impl EngineInfo {
    /// This build.
    pub fn current() -> Self {
        Self { name: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION") }
    }
}

/// Parameters actually used by the engine after unit conversion.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct NormalizedEcho {
    /// `wM` (rad/s).
    pub omega_m: f64,
    /// `gamma_M` (rad/s).
    pub gamma_m: f64,
    /// `n_T` at resonance.
    pub n_thermal: f64,
    /// `K` (rad^3/s^3).
    pub kappa: f64,
    /// `resonant` or `per_frequency`.
    pub occupation: &'static str,
}

/// Labeled column.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Column {
    /// Name.
    pub name: String,
    /// Unit; `1` for dimensionless.
    pub unit: &'static str,
}

impl Column {
    /// Column `name` in `unit`.
    pub fn new(name: impl Into<String>, unit: &'static str) -> Self {
        Self { name: name.into(), unit }
    }

    fn header(&self) -> String {
        format!("{}[{}]", self.name, self.unit)
    }
}

/// Rectangular table; `None` cells are empty in CSV and `null` in JSON.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Table {
    /// Identifier, also used in the CSV file name.
    pub name: String,
    /// Columns.
    pub columns: Vec<Column>,
    /// Rows.
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    /// Empty table.
    pub fn new(name: impl Into<String>, columns: Vec<Column>) -> Self {
        Self { name: name.into(), columns, rows: Vec::new() }
    }

    /// Appends a row.
    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Values of a column.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.columns.iter().position(|c| c.name == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// CSV text with a `name[unit]` header.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.iter().map(Column::header).collect::<Vec<_>>().join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.map(format_cell).unwrap_or_default()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

// shortest round-trip digits
fn format_cell(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else {
        format!("{v}").to_lowercase()
    }
}

/// Reference from the envelope to a table.
#[derive(Debug, Clone, Serialize)]
pub struct TableEntry {
    /// Identifier.
    pub name: String,
    /// Columns.
    pub columns: Vec<Column>,
    /// Number of rows.
    pub row_count: usize,
    /// CSV file name, relative to the envelope (CSV format).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    /// Inline rows (JSON format).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<Vec<Option<f64>>>>,
}

/// Reproducibility record.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    /// Master seed.
    pub seed: u64,
}

/// Top-level result document.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope {
    /// Engine.
    pub engine: EngineInfo,
    /// Subcommand.
    pub command: &'static str,
    /// Configuration as parsed.
    pub config: ScenarioConfig,
    /// Engine parameters.
    pub normalized: NormalizedEcho,
    /// Reproducibility record.
    pub provenance: Provenance,
    /// Non-fatal findings.
    pub warnings: Vec<String>,
    /// Analysis-specific scalars.
    pub summary: serde_json::Value,
    /// Tables.
    pub tables: Vec<TableEntry>,
}

/// Files produced by one run: `(file name, contents)`, envelope last.
pub fn render(
    mut envelope: Envelope,
    tables: &[Table],
    format: OutputFormat,
) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    envelope.tables = tables
        .iter()
        .map(|t| {
            let (file, rows) = match format {
                OutputFormat::Csv => {
                    let name = if t.name == envelope.command {
                        format!("{}.csv", t.name)
                    } else {
                        format!("{}_{}.csv", envelope.command, t.name)
                    };
                    files.push((name.clone(), t.to_csv().into_bytes()));
                    (Some(name), None)
                }
                OutputFormat::Json => (None, Some(t.rows.clone())),
            };
            TableEntry { name: t.name.clone(), columns: t.columns.clone(), row_count: t.rows.len(), file, rows }
        })
        .collect();
    let mut json = serde_json::to_vec_pretty(&envelope).expect("envelope serializes");
    json.push(b'\n');
    files.push((format!("{}.json", envelope.command), json));
    files
}
