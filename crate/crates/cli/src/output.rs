//! Run manifests and CSV output.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{ConfigFile, CONFIG_LINE};
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything needed to regenerate an output file.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub config: ConfigFile,
    pub seed: Option<u64>,
    pub version: String,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, config: &ConfigFile, out: Option<&Path>) -> Self {
        Manifest {
            command: command.to_string(),
            config: config.clone(),
            seed: config.seed,
            version: format!("fdbia {VERSION}"),
            outputs: vec![out.map_or_else(|| "-".to_string(), |p| p.display().to_string())],
        }
    }

    /// Comment lines placed above the CSV header.
    pub fn header(&self) -> String {
        let config = serde_json::to_string(&self.config).expect("config serializes");
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        format!(
            "# command: {}\n# version: {}\n# seed: {seed}\n# outputs: {}\n{CONFIG_LINE}{config}\n",
            self.command,
            self.version,
            self.outputs.join(";")
        )
    }
}

/// A CSV table: header row plus data rows, all fields preformatted.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn csv_body(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Space-aligned text for terminals.
    pub fn pretty(&self) -> String {
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|c| self.rows.iter().map(|r| r[c].len()).chain([self.columns[c].len()]).max().unwrap_or(0))
            .collect();
        let line = |cells: Vec<&str>| {
            cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
        };
        let mut out = line(self.columns.clone());
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row.iter().map(String::as_str).collect()));
            out.push('\n');
        }
        out
    }
}

/// Shortest text that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Writes `manifest` and `table` to `out`, or to stdout when `out` is `None`
/// and `json` is off. Returns what to print on stdout.
pub fn emit_table<T: Serialize>(
    manifest: &Manifest,
    table: &Table,
    rows: &T,
    out: Option<&PathBuf>,
    json: bool,
) -> Result<String, CliError> {
    let csv = format!("{}{}", manifest.header(), table.csv_body());
    if let Some(path) = out {
        fs::write(path, &csv).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    }
    if json {
        #[derive(Serialize)]
        struct Report<'a, T> {
            manifest: &'a Manifest,
            rows: &'a T,
        }
        return Ok(serde_json::to_string_pretty(&Report { manifest, rows }).expect("report serializes") + "\n");
    }
    Ok(match out {
        Some(path) => format!("{}wrote {}\n", table.pretty(), path.display()),
        None => csv,
    })
}
