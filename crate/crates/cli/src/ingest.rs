//! Loading molecule tables from CSV or JSON.
//!
//! Both formats carry the same four fields: `smiles`, `name`, `label` and
//! `target`. Every row is validated before anything is returned; a file with
//! any bad row is rejected as a whole, listing each failure with its line.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qmse_core::vqml::{Dataset, LabeledDataset, TargetDataset};
use qmse_core::{parse_smiles, MolGraph};
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: [&str; 4] = ["smiles", "name", "label", "target"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub smiles: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<u8>,
    /// Kelvin for boiling points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Guesses from the extension; anything but `.json` is CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// Which optional column every row must fill.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Need {
    /// Label or target, whichever is present.
    #[default]
    Either,
    Label,
    Target,
    /// SMILES only; used for similarity work.
    Nothing,
}

impl FromStr for Need {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "either" => Ok(Need::Either),
            "label" => Ok(Need::Label),
            "target" => Ok(Need::Target),
            "nothing" => Ok(Need::Nothing),
            _ => Err(format!("unknown requirement '{s}' (either, label, target, nothing)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: expected header `{expected}`, found `{found}`")]
    Header {
        path: PathBuf,
        expected: String,
        found: String,
    },
    #[error("{path}: {} invalid row(s)\n{}", .rows.len(), join_rows(.rows))]
    Rows { path: PathBuf, rows: Vec<RowError> },
    #[error("{path}: line {line}: {message}")]
    Json {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: no records")]
    Empty { path: PathBuf },
}

fn join_rows(rows: &[RowError]) -> String {
    rows.iter().map(|r| format!("  {r}")).collect::<Vec<_>>().join("\n")
}

/// A validated record with its parsed graph.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub record: Record,
    pub graph: MolGraph,
}

pub fn ingest(path: &Path, format: Format, need: Need) -> Result<Vec<Loaded>, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match format {
        Format::Csv => from_csv(path, &text, need),
        Format::Json => from_json(path, &text, need),
    }
}

fn from_csv(path: &Path, text: &str, need: Need) -> Result<Vec<Loaded>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| IngestError::Rows {
        path: path.to_path_buf(),
        rows: vec![RowError {
            line: 1,
            message: e.to_string(),
        }],
    })?;
    let found: Vec<&str> = header.iter().collect();
    if found != CSV_HEADER {
        return Err(IngestError::Header {
            path: path.to_path_buf(),
            expected: CSV_HEADER.join(","),
            found: found.join(","),
        });
    }

    let mut loaded = Vec::new();
    let mut errors = Vec::new();
    for row in reader.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                errors.push(RowError {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != CSV_HEADER.len() {
            errors.push(RowError {
                line,
                message: format!("expected {} fields, found {}", CSV_HEADER.len(), row.len()),
            });
            continue;
        }
        let result = parse_label(&row[2]).and_then(|label| {
            let target = parse_target(&row[3])?;
            validate(
                Record {
                    smiles: row[0].to_string(),
                    name: row[1].to_string(),
                    label,
                    target,
                },
                need,
            )
        });
        match result {
            Ok(l) => loaded.push(l),
            Err(message) => errors.push(RowError { line, message }),
        }
    }
    finish(path, loaded, errors)
}

fn parse_label(s: &str) -> Result<Option<u8>, String> {
    match s {
        "" => Ok(None),
        "0" => Ok(Some(0)),
        "1" => Ok(Some(1)),
        _ => Err(format!("label must be 0 or 1, found '{s}'")),
    }
}

fn parse_target(s: &str) -> Result<Option<f64>, String> {
    if s.is_empty() {
        return Ok(None);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(format!("target must be a finite number, found '{s}'")),
    }
}

fn validate(record: Record, need: Need) -> Result<Loaded, String> {
    if record.name.is_empty() {
        return Err("empty name".into());
    }
    let missing = match need {
        Need::Either => record.label.is_none() && record.target.is_none(),
        Need::Label => record.label.is_none(),
        Need::Target => record.target.is_none(),
        Need::Nothing => false,
    };
    if missing {
        return Err(match need {
            Need::Label => format!("'{}' has no label", record.name),
            Need::Target => format!("'{}' has no target", record.name),
            _ => format!("'{}' has neither label nor target", record.name),
        });
    }
    if record.label.is_some_and(|l| l > 1) {
        return Err(format!("label must be 0 or 1 for '{}'", record.name));
    }
    if record.target.is_some_and(|t| !t.is_finite()) {
        return Err(format!("target is not finite for '{}'", record.name));
    }
    let graph = parse_smiles(&record.smiles).map_err(|e| format!("SMILES '{}': {e}", record.smiles))?;
    Ok(Loaded { record, graph })
}

fn from_json(path: &Path, text: &str, need: Need) -> Result<Vec<Loaded>, IngestError> {
    let records: Vec<Record> = serde_json::from_str(text).map_err(|e| IngestError::Json {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })?;
    let lines = record_lines(text);
    let mut loaded = Vec::new();
    let mut errors = Vec::new();
    for (k, record) in records.into_iter().enumerate() {
        match validate(record, need) {
            Ok(l) => loaded.push(l),
            Err(message) => errors.push(RowError {
                line: lines.get(k).copied().unwrap_or(0),
                message,
            }),
        }
    }
    finish(path, loaded, errors)
}

/// Line of the opening brace of each top-level array element.
fn record_lines(text: &str) -> Vec<u64> {
    let mut out = Vec::new();
    let (mut depth, mut line, mut in_str, mut escaped) = (0usize, 1u64, false, false);
    for c in text.chars() {
        if in_str {
            match c {
                _ if escaped => escaped = false,
                '\\' => escaped = true,
                '"' => in_str = false,
                '\n' => line += 1,
                _ => {}
            }
            continue;
        }
        match c {
            '"' => in_str = true,
            '\n' => line += 1,
            '[' | '{' => {
                if c == '{' && depth == 1 {
                    out.push(line);
                }
                depth += 1;
            }
            ']' | '}' => depth = depth.saturating_sub(1),
            _ => {}
        }
    }
    out
}

fn finish(path: &Path, loaded: Vec<Loaded>, errors: Vec<RowError>) -> Result<Vec<Loaded>, IngestError> {
    if !errors.is_empty() {
        return Err(IngestError::Rows {
            path: path.to_path_buf(),
            rows: errors,
        });
    }
    if loaded.is_empty() {
        return Err(IngestError::Empty {
            path: path.to_path_buf(),
        });
    }
    Ok(loaded)
}

pub fn labeled(rows: &[Loaded]) -> LabeledDataset {
    LabeledDataset {
        names: rows.iter().map(|r| r.record.name.clone()).collect(),
        molecules: rows.iter().map(|r| r.graph.clone()).collect(),
        labels: rows
            .iter()
            .map(|r| r.record.label.expect("ingested with Need::Label"))
            .collect(),
    }
}

pub fn targets(rows: &[Loaded]) -> TargetDataset {
    TargetDataset {
        names: rows.iter().map(|r| r.record.name.clone()).collect(),
        molecules: rows.iter().map(|r| r.graph.clone()).collect(),
        targets: rows
            .iter()
            .map(|r| r.record.target.expect("ingested with Need::Target"))
            .collect(),
    }
}

pub fn dataset(rows: &[Loaded], need: Need) -> Dataset {
    match need {
        Need::Target => Dataset::Targets(targets(rows)),
        _ => Dataset::Labeled(labeled(rows)),
    }
}
