use std::io::Write;

use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_INDETERMINATE: i32 = 3;

pub fn exit_code(e: &mumford::Error) -> i32 {
    match e {
        mumford::Error::Indeterminate(_) => EXIT_INDETERMINATE,
        _ => EXIT_ERROR,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
    Json,
}

/// One command's output: JSON payload, a flat table built from the same
/// values, free-form notes and the exit status.
#[derive(Debug)]
pub struct Report {
    pub command: String,
    pub payload: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<String>,
    pub status: i32,
}

impl Report {
    pub fn new(command: impl Into<String>, payload: Value) -> Self {
        Report {
            command: command.into(),
            payload,
            header: Vec::new(),
            rows: Vec::new(),
            notes: Vec::new(),
            status: EXIT_OK,
        }
    }

    pub fn columns(mut self, header: &[&str]) -> Self {
        self.header = header.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    /// Two-column field/value table from the top-level payload fields.
    pub fn fields(mut self, keys: &[&str]) -> Self {
        self.header = vec!["field".into(), "value".into()];
        for k in keys {
            let v = self.payload.get(*k).map(cell).unwrap_or_default();
            self.rows.push(vec![k.to_string(), v]);
        }
        self
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn fail(&mut self, status: i32, why: impl Into<String>) {
        if self.status == EXIT_OK {
            self.status = status;
        }
        self.notes.push(why.into());
    }

    pub fn render(&self, format: Format, out: &mut impl Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                let v = json!({
                    "command": self.command,
                    "payload": self.payload,
                    "notes": self.notes,
                    "status": self.status,
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json"))
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                if !self.header.is_empty() {
                    w.write_record(&self.header)?;
                }
                for r in &self.rows {
                    w.write_record(r)?;
                }
                w.flush()
            }
            Format::Markdown => {
                writeln!(out, "$ mumford {}", self.command)?;
                if !self.header.is_empty() {
                    writeln!(out)?;
                    writeln!(out, "| {} |", self.header.join(" | "))?;
                    writeln!(out, "|{}", "---|".repeat(self.header.len()))?;
                    for r in &self.rows {
                        writeln!(out, "| {} |", r.join(" | "))?;
                    }
                }
                if !self.notes.is_empty() {
                    writeln!(out)?;
                    for n in &self.notes {
                        writeln!(out, "- {n}")?;
                    }
                }
                writeln!(out)?;
                writeln!(
                    out,
                    "status: {}",
                    if self.status == EXIT_OK { "ok".to_string() } else { self.status.to_string() }
                )
            }
        }
    }
}

/// Table text for a JSON value: strings bare, everything else compact JSON.
pub fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        Report::new("demo", json!({"g": "4", "order": 36, "nested": {"x": 1}, "none": null}))
            .fields(&["g", "order", "none"])
    }

    #[test]
    fn first_failure_sets_the_status() {
        let mut r = sample();
        r.fail(EXIT_MISMATCH, "a");
        r.fail(EXIT_INDETERMINATE, "b");
        assert_eq!(r.status, EXIT_MISMATCH);
        assert_eq!(r.notes, ["a", "b"]);
    }

    #[test]
    fn csv_rows_come_from_the_payload() {
        let mut out = Vec::new();
        sample().render(Format::Csv, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "field,value\ng,4\norder,36\nnone,-\n");
    }

    #[test]
    fn markdown_ends_with_the_status() {
        let mut r = sample();
        r.fail(EXIT_MISMATCH, "off by one");
        let mut out = Vec::new();
        r.render(Format::Markdown, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("$ mumford demo\n"));
        assert!(text.contains("| g | 4 |"));
        assert!(text.contains("- off by one"));
        assert!(text.ends_with("status: 2\n"));
    }

    #[test]
    fn indeterminate_errors_have_their_own_code() {
        assert_eq!(exit_code(&mumford::Error::Indeterminate("x")), EXIT_INDETERMINATE);
    }
}
