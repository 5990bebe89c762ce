//! CSV and JSON writers. Every artifact starts with the resolved config.

use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    pub fn int(v: impl Into<u64>) -> Self {
        Cell::Int(v.into())
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Missing => String::new(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => Value::from(*v),
            Cell::Num(_) | Cell::Missing => Value::Null,
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    config: &'a RunConfig,
    columns: &'a [String],
    rows: Vec<Vec<Value>>,
}

/// Renders the artifact: `# {config}` then a CSV table, or one JSON document.
pub fn render(config: &RunConfig, table: &Table) -> String {
    match config.format {
        Format::Csv => {
            let mut out = format!("# {config}\n{}\n", table.columns.join(","));
            for row in &table.rows {
                out.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let doc = JsonDoc {
                config,
                columns: &table.columns,
                rows: table.rows.iter().map(|r| r.iter().map(Cell::json).collect()).collect(),
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
            s.push('\n');
            s
        }
    }
}

/// Writes to `config.output`, or stdout when unset.
pub fn emit(config: &RunConfig, table: &Table) -> std::io::Result<()> {
    let text = render(config, table);
    match &config.output {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(path, text)
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{CommandKind, PartialConfig};

    fn cfg(format: Format) -> RunConfig {
        let p = PartialConfig { command: Some(CommandKind::Limit), format: Some(format), ..Default::default() };
        RunConfig::resolve(p, None).unwrap()
    }

    #[test]
    fn csv_layout_and_round_trip() {
        let mut t = Table::new(&["s", "f1", "note"]);
        t.push(vec![Cell::Num(0.1), Cell::Missing, "a,b".into()]);
        let text = render(&cfg(Format::Csv), &t);
        let mut lines = text.lines();
        let header = lines.next().unwrap().strip_prefix("# ").unwrap();
        let back: RunConfig = serde_json::from_str(header).unwrap();
        assert_eq!(back, cfg(Format::Csv));
        assert_eq!(lines.next(), Some("s,f1,note"));
        assert_eq!(lines.next(), Some("1.0000000000000001e-1,,\"a,b\""));
        assert_eq!("1.0000000000000001e-1".parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn json_document() {
        let mut t = Table::new(&["s", "ok"]);
        t.push(vec![Cell::Num(f64::NAN), true.into()]);
        let v: Value = serde_json::from_str(&render(&cfg(Format::Json), &t)).unwrap();
        assert_eq!(v["rows"][0][0], Value::Null);
        assert_eq!(v["config"]["command"], "limit");
    }
}
