//! The report every subcommand emits, as text or JSON.

use std::time::Duration;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// How a command ended; maps onto the process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Decided,
    UndecidedAtBound,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Decided => 0,
            Status::UndecidedAtBound => 2,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(path: &str, bytes: &[u8]) -> Self {
        InputDigest { path: path.to_owned(), sha256: hex::encode(Sha256::digest(bytes)) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub status: Status,
    pub result: Value,
    pub bounds: Value,
    pub elapsed_ms: f64,
    /// Human-readable lines, omitted from JSON.
    #[serde(skip)]
    pub lines: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_owned(),
            inputs: Vec::new(),
            status: Status::Decided,
            result: Value::Null,
            bounds: Value::Null,
            elapsed_ms: 0.0,
            lines: Vec::new(),
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn finish(&mut self, elapsed: Duration) {
        self.elapsed_ms = elapsed.as_secs_f64() * 1000.0;
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            return serde_json::to_string_pretty(self).expect("report serializes");
        }
        let mut out = self.lines.join("\n");
        if self.bounds != Value::Null {
            out.push_str(&format!("\nbounds: {}", self.bounds));
        }
        if self.status == Status::UndecidedAtBound {
            out.push_str("\nstatus: undecided at bound");
        }
        out
    }
}
