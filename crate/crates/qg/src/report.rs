//! Pass/fail reports: every emitted number carries the bound it was tested against.

use serde_json::{Map, Value};

/// Formats `x` with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// `x` as a JSON number with 17 significant digits; non-finite values become strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        serde_json::from_str(&fmt17(x)).expect("formatted float is valid JSON")
    } else {
        Value::String(fmt17(x))
    }
}

/// One measured quantity and its acceptance window `lower ≤ value < upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: f64,
    /// Measured value known not to meet the window; excluded from the overall verdict.
    pub known_deviation: bool,
}

impl Check {
    /// `value < upper`.
    pub fn below(name: impl Into<String>, value: f64, upper: f64) -> Self {
        Self { name: name.into(), value, lower: None, upper, known_deviation: false }
    }

    /// `|value - centre| < half_width`.
    pub fn within(name: impl Into<String>, value: f64, centre: f64, half_width: f64) -> Self {
        Self {
            name: name.into(),
            value,
            lower: Some(centre - half_width),
            upper: centre + half_width,
            known_deviation: false,
        }
    }

    pub fn known_deviation(mut self) -> Self {
        self.known_deviation = true;
        self
    }

    pub fn pass(&self) -> bool {
        self.value.is_finite() && self.value < self.upper && self.lower.map_or(true, |l| self.value >= l)
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), Value::String(self.name.clone()));
        m.insert("value".into(), num(self.value));
        if let Some(l) = self.lower {
            m.insert("lower".into(), num(l));
        }
        m.insert("upper".into(), num(self.upper));
        m.insert("pass".into(), Value::Bool(self.pass()));
        if self.known_deviation {
            m.insert("known_deviation".into(), Value::Bool(true));
        }
        Value::Object(m)
    }
}

/// Rows of numbers with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Outcome of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub cmd: String,
    pub seed: u64,
    pub params: Vec<(String, Value)>,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    /// Failures that prevented a measurement (the command could not run to completion).
    pub errors: Vec<String>,
}

impl Report {
    pub fn new(cmd: &str, seed: u64) -> Self {
        Self { cmd: cmd.into(), seed, params: Vec::new(), checks: Vec::new(), tables: Vec::new(), errors: Vec::new() }
    }

    pub fn param(&mut self, k: &str, v: Value) {
        self.params.push((k.into(), v));
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    /// Records a fallible measurement; an error becomes a failed report entry.
    pub fn try_check<E: std::fmt::Display>(&mut self, r: Result<Check, E>) {
        match r {
            Ok(c) => self.checks.push(c),
            Err(e) => self.errors.push(e.to_string()),
        }
    }

    /// All checks pass apart from declared known deviations, and nothing errored.
    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.checks.iter().all(|c| c.pass() || c.known_deviation)
    }

    pub fn first_failure(&self) -> Option<String> {
        if let Some(e) = self.errors.first() {
            return Some(e.clone());
        }
        self.checks.iter().find(|c| !c.pass() && !c.known_deviation).map(|c| {
            format!("{}: value {} outside [{}, {})", c.name, fmt17(c.value), c.lower.map_or("-inf".into(), fmt17), fmt17(c.upper))
        })
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("cmd".into(), Value::String(self.cmd.clone()));
        m.insert("seed".into(), Value::from(self.seed));
        m.insert("pass".into(), Value::Bool(self.passed()));
        m.insert("params".into(), Value::Object(self.params.iter().cloned().collect()));
        m.insert("checks".into(), Value::Array(self.checks.iter().map(Check::to_json).collect()));
        if !self.tables.is_empty() {
            let tables = self
                .tables
                .iter()
                .map(|t| {
                    let mut tm = Map::new();
                    tm.insert("name".into(), Value::String(t.name.clone()));
                    tm.insert("columns".into(), Value::Array(t.columns.iter().cloned().map(Value::String).collect()));
                    tm.insert(
                        "rows".into(),
                        Value::Array(t.rows.iter().map(|r| Value::Array(r.iter().map(|&x| num(x)).collect())).collect()),
                    );
                    Value::Object(tm)
                })
                .collect();
            m.insert("tables".into(), Value::Array(tables));
        }
        if !self.errors.is_empty() {
            m.insert("errors".into(), Value::Array(self.errors.iter().cloned().map(Value::String).collect()));
        }
        Value::Object(m)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }

    /// CSV view: the first table if present, otherwise the checks. The header comment
    /// records command and seed.
    pub fn to_csv_string(&self) -> String {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        match self.tables.first() {
            Some(t) => {
                w.write_record(&t.columns).expect("in-memory write");
                for r in &t.rows {
                    w.write_record(r.iter().map(|&x| fmt17(x))).expect("in-memory write");
                }
            }
            None => {
                w.write_record(["name", "value", "lower", "upper", "pass", "known_deviation"]).expect("in-memory write");
                for c in &self.checks {
                    w.write_record([
                        c.name.clone(),
                        fmt17(c.value),
                        c.lower.map_or(String::new(), fmt17),
                        fmt17(c.upper),
                        c.pass().to_string(),
                        c.known_deviation.to_string(),
                    ])
                    .expect("in-memory write");
                }
            }
        }
        let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8");
        format!("# cmd={} seed={} pass={}\n{}", self.cmd, self.seed, self.passed(), body)
    }
}
