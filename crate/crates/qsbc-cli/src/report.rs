//! Report assembly and rendering.
//!
//! A report is the echoed configuration, a list of rows (one JSON object
//! per grid point), and the artifact version. The same row values feed
//! both output formats, so a number renders identically in JSON and CSV;
//! floating-point metrics are rounded to 12 significant digits on entry.

use anyhow::Result;
use serde_json::{Map, Value};

/// Round to 12 significant digits so reports are auditable at the
/// documented tolerances without dragging along noise digits.
pub fn sig12(x: f64) -> f64 {
    format!("{x:.11e}")
        .parse()
        .expect("formatted float always parses")
}

/// One report row under construction, with insertion-ordered keys.
#[derive(Default)]
pub struct Row(Map<String, Value>);

impl Row {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn text(mut self, key: &str, value: impl Into<String>) -> Self {
        self.0.insert(key.into(), Value::String(value.into()));
        self
    }

    pub fn int(mut self, key: &str, value: usize) -> Self {
        self.0.insert(key.into(), Value::from(value as u64));
        self
    }

    pub fn seed(mut self, key: &str, value: u64) -> Self {
        self.0.insert(key.into(), Value::from(value));
        self
    }

    pub fn num(mut self, key: &str, value: f64) -> Self {
        self.0.insert(key.into(), Value::from(sig12(value)));
        self
    }

    /// A possibly-inapplicable metric: `None` renders as JSON null and an
    /// empty CSV cell.
    pub fn opt_num(mut self, key: &str, value: Option<f64>) -> Self {
        self.0.insert(
            key.into(),
            value.map_or(Value::Null, |x| Value::from(sig12(x))),
        );
        self
    }

    pub fn flag(mut self, key: &str, value: bool) -> Self {
        self.0.insert(key.into(), Value::Bool(value));
        self
    }

    pub fn into_value(self) -> Value {
        Value::Object(self.0)
    }
}

/// A finished report ready for rendering.
pub struct Report {
    pub config: Value,
    pub rows: Vec<Value>,
}

impl Report {
    pub fn render_json(&self) -> String {
        let mut top = Map::new();
        top.insert("config".into(), self.config.clone());
        top.insert("rows".into(), Value::Array(self.rows.clone()));
        top.insert(
            "version".into(),
            Value::String(env!("CARGO_PKG_VERSION").into()),
        );
        let mut text = serde_json::to_string_pretty(&Value::Object(top))
            .expect("report serialization cannot fail");
        text.push('\n');
        text
    }

    /// CSV with `#`-prefixed preamble lines carrying the config and
    /// version, then a header row over the union of row keys in
    /// first-seen order. Cells render exactly as the JSON values do.
    pub fn render_csv(&self) -> Result<String> {
        let mut columns: Vec<String> = Vec::new();
        for row in &self.rows {
            if let Value::Object(map) = row {
                for key in map.keys() {
                    if !columns.iter().any(|c| c == key) {
                        columns.push(key.clone());
                    }
                }
            }
        }
        let mut text = format!(
            "# version: {}\n# config: {}\n",
            env!("CARGO_PKG_VERSION"),
            serde_json::to_string(&self.config)?
        );
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&columns)?;
        for row in &self.rows {
            let record: Vec<String> = columns.iter().map(|c| cell(&row[c.as_str()])).collect();
            writer.write_record(&record)?;
        }
        text.push_str(std::str::from_utf8(&writer.into_inner()?)?);
        Ok(text)
    }

    pub fn render(&self, format: crate::Format) -> Result<String> {
        match format {
            crate::Format::Json => Ok(self.render_json()),
            crate::Format::Csv => self.render_csv(),
        }
    }
}

/// CSV cell text for a JSON value: bare strings, JSON rendering for
/// numbers and booleans (so both formats print the same characters), and
/// an empty cell for null or absent values.
fn cell(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_significant_digits() {
        assert_eq!(sig12(0.123456789012345), 0.123456789012);
        assert_eq!(sig12(-1.0 / 3.0), -0.333333333333);
        assert_eq!(sig12(0.0), 0.0);
        assert_eq!(sig12(0.9375), 0.9375);
    }

    #[test]
    fn csv_and_json_render_the_same_numbers() {
        let report = Report {
            config: Value::Object(Map::new()),
            rows: vec![
                Row::new()
                    .text("kind", "a")
                    .num("x", 1.0 / 3.0)
                    .into_value(),
                Row::new()
                    .text("kind", "b")
                    .opt_num("x", None)
                    .flag("ok", true)
                    .into_value(),
            ],
        };
        let json = report.render_json();
        let csv_text = report.render_csv().unwrap();
        assert!(json.contains("0.333333333333"));
        assert!(csv_text.contains("0.333333333333"));
        let lines: Vec<&str> = csv_text.lines().collect();
        assert!(lines[0].starts_with("# version"));
        assert_eq!(lines[2], "kind,x,ok");
        assert_eq!(lines[4], "b,,true");
    }
}
