//! CSV report with a `#` header block.

use std::fmt::Display;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

pub const COLUMNS: [&str; 7] = ["check", "anchor", "parameters", "quantity", "value", "tolerance", "status"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Reported quantity with no pass/fail contract.
    Info,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Row {
    pub check: String,
    pub anchor: &'static str,
    pub parameters: String,
    pub quantity: String,
    pub value: String,
    pub tolerance: String,
    pub status: Status,
}

pub struct Report {
    command: String,
    seed: u64,
    threads: usize,
    params: Vec<(String, String)>,
    rows: Vec<Row>,
}

impl Report {
    pub fn new(command: &str, seed: u64, threads: usize) -> Self {
        Self { command: command.to_string(), seed, threads, params: Vec::new(), rows: Vec::new() }
    }

    pub fn param(&mut self, key: &str, value: impl Display) {
        self.params.push((key.to_string(), value.to_string()));
    }

    pub fn row(
        &mut self,
        check: &str,
        anchor: &'static str,
        parameters: impl Display,
        quantity: &str,
        value: impl Display,
        tolerance: Option<f64>,
        status: Status,
    ) {
        self.rows.push(Row {
            check: check.to_string(),
            anchor,
            parameters: parameters.to_string(),
            quantity: quantity.to_string(),
            value: value.to_string(),
            tolerance: tolerance.map(|t| format!("{t:e}")).unwrap_or_default(),
            status,
        });
    }

    /// Reported value without a pass/fail contract.
    pub fn info(&mut self, check: &str, anchor: &'static str, parameters: impl Display, quantity: &str, value: impl Display) {
        self.row(check, anchor, parameters, quantity, value, None, Status::Info);
    }

    /// Value checked against `tol` by `ok`.
    pub fn check(
        &mut self,
        check: &str,
        anchor: &'static str,
        parameters: impl Display,
        quantity: &str,
        value: impl Display,
        tol: f64,
        ok: bool,
    ) {
        self.row(check, anchor, parameters, quantity, value, Some(tol), Status::from_bool(ok));
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.status == Status::Fail).count()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# ancient {}\n", env!("CARGO_PKG_VERSION")));
        out.push_str(&format!("# command: {}\n", self.command));
        out.push_str(&format!("# seed: {}\n", self.seed));
        out.push_str(&format!("# threads: {}\n", self.threads));
        for (k, v) in &self.params {
            out.push_str(&format!("# param {k}: {v}\n"));
        }
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        out.push_str(&format!("# timestamp: {stamp}\n"));

        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(COLUMNS).expect("writing to memory");
        for r in &self.rows {
            w.write_record([
                r.check.as_str(),
                r.anchor,
                &r.parameters,
                &r.quantity,
                &r.value,
                &r.tolerance,
                r.status.as_str(),
            ])
            .expect("writing to memory");
        }
        let body = w.into_inner().expect("flushing to memory");
        out.push_str(&String::from_utf8(body).expect("CSV of UTF-8 fields"));
        out
    }

    pub fn emit(&self, out: Option<&Path>) -> std::io::Result<()> {
        let text = self.render();
        match out {
            Some(p) => std::fs::write(p, text),
            None => std::io::stdout().write_all(text.as_bytes()),
        }
    }
}
