use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

/// Tool version, config echo, seed and (unless deterministic) a timestamp.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl Provenance {
    pub fn new(command: &str, config: Value, seed: Option<u64>, deterministic: bool) -> Self {
        let timestamp =
            (!deterministic).then(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
        Self {
            tool: "newton-ensemble".into(),
            version: newton_ensemble::VERSION.into(),
            command: command.into(),
            config,
            seed,
            timestamp,
        }
    }

    fn csv_header(&self) -> String {
        let mut out = format!("# {} {}\n# command: {}\n", self.tool, self.version, self.command);
        out += &format!("# config: {}\n", self.config);
        match self.seed {
            Some(seed) => out += &format!("# seed: {seed}\n"),
            None => out += "# seed: none\n",
        }
        if let Some(t) = self.timestamp {
            out += &format!("# timestamp: {t}\n");
        }
        out
    }
}

/// A table of plain fields; every cell is a number, a boolean or a bare label.
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self { columns, rows: Vec::new() }
    }
}

pub enum Artifact {
    Csv(Table),
    Json(Value),
}

pub fn render(artifact: &Artifact, provenance: &Provenance) -> Result<Vec<u8>, CliError> {
    match artifact {
        Artifact::Csv(table) => {
            let mut buf = provenance.csv_header().into_bytes();
            {
                let mut w = csv::Writer::from_writer(&mut buf);
                w.write_record(&table.columns).map_err(CliError::io)?;
                for row in &table.rows {
                    w.write_record(row).map_err(CliError::io)?;
                }
                w.flush().map_err(CliError::io)?;
            }
            Ok(buf)
        }
        Artifact::Json(value) => {
            let doc = serde_json::json!({ "provenance": provenance, "result": value });
            let mut buf = serde_json::to_vec_pretty(&doc).map_err(CliError::io)?;
            buf.push(b'\n');
            Ok(buf)
        }
    }
}

pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(path) => std::fs::write(path, bytes).map_err(CliError::io),
        None => std::io::stdout().lock().write_all(bytes).map_err(CliError::io),
    }
}

fn plain_cell(cell: &str) -> bool {
    cell.parse::<f64>().is_ok() || (!cell.is_empty() && cell.chars().all(|c| c.is_ascii_alphanumeric() || "_-'".contains(c)))
}

/// Summary line for a valid file, or the reason it is malformed.
pub fn validate_file(path: &Path) -> Result<String, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    if text.trim_start().starts_with('{') {
        let doc: Value = serde_json::from_str(&text).map_err(|e| format!("invalid JSON: {e}"))?;
        let prov = doc.get("provenance").ok_or("missing provenance")?;
        for key in ["tool", "version", "command", "config"] {
            if prov.get(key).is_none() {
                return Err(format!("provenance lacks {key}"));
            }
        }
        doc.get("result").ok_or("missing result")?;
        return Ok("json".into());
    }
    let comments: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    if !comments.first().is_some_and(|l| l.starts_with("# newton-ensemble ")) {
        return Err("missing provenance header".into());
    }
    for key in ["# command: ", "# config: ", "# seed: "] {
        if !comments.iter().any(|l| l.starts_with(key)) {
            return Err(format!("provenance header lacks `{}`", key.trim_end_matches(": ").trim_start_matches("# ")));
        }
    }
    let config = comments.iter().find_map(|l| l.strip_prefix("# config: ")).unwrap_or_default();
    serde_json::from_str::<Value>(config).map_err(|e| format!("config echo is not JSON: {e}"))?;
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let width = reader.headers().map_err(|e| e.to_string())?.len();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| e.to_string())?;
        if record.len() != width {
            return Err(format!("row {} has {} fields, header has {width}", rows + 1, record.len()));
        }
        if let Some(bad) = record.iter().find(|c| !plain_cell(c)) {
            return Err(format!("row {}: unparsable field {bad:?}", rows + 1));
        }
        rows += 1;
    }
    Ok(format!("csv, {width} columns, {rows} rows"))
}
