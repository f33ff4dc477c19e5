use std::fs;
use std::path::Path;

use pingpong_core::{Error, LocalField};
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA: u32 = 1;

/// How a reported number was obtained.
#[derive(Clone, Copy, Debug)]
pub enum Provenance {
    /// Exact arithmetic, or an input echoed back.
    Exact,
    /// Floating-point computation, correct up to the working tolerance.
    Tolerance,
    /// Sampled or otherwise statistical.
    Estimate,
}

impl Provenance {
    fn as_str(self) -> &'static str {
        match self {
            Provenance::Exact => "exact",
            Provenance::Tolerance => "tolerance",
            Provenance::Estimate => "estimate",
        }
    }

    /// Provenance of a value computed in field `T`.
    pub fn computed<T: LocalField>() -> Self {
        if T::is_archimedean() {
            Provenance::Tolerance
        } else {
            Provenance::Exact
        }
    }
}

pub fn tagged<V: Serialize>(value: V, provenance: Provenance) -> Value {
    json!({ "value": value, "provenance": provenance.as_str() })
}

pub fn exact<V: Serialize>(value: V) -> Value {
    tagged(value, Provenance::Exact)
}

/// An input file: its text and SHA-256 digest.
pub struct Input {
    pub role: &'static str,
    pub text: String,
    pub sha256: String,
}

impl Input {
    pub fn read(role: &'static str, path: &Path) -> Result<Self, Error> {
        let bytes = fs::read(path).map_err(|e| Error::Schema {
            path: String::new(),
            message: format!("cannot read {} ({}): {e}", path.display(), role),
        })?;
        let sha256 = format!("{:x}", Sha256::digest(&bytes));
        let text = String::from_utf8(bytes).map_err(|_| Error::Schema {
            path: String::new(),
            message: format!("{} is not UTF-8", path.display()),
        })?;
        Ok(Input { role, text, sha256 })
    }
}

/// The JSON document every command prints.
pub struct Report {
    pub command: &'static str,
    pub inputs: Map<String, Value>,
    pub parameters: Map<String, Value>,
    pub seed: Option<u64>,
    pub result: Value,
    pub pass: bool,
}

impl Report {
    pub fn new(command: &'static str, inputs: &[&Input]) -> Self {
        let inputs = inputs
            .iter()
            .map(|i| (i.role.to_string(), json!({ "sha256": i.sha256 })))
            .collect();
        Report {
            command,
            inputs,
            parameters: Map::new(),
            seed: None,
            result: Value::Null,
            pass: false,
        }
    }

    pub fn param<V: Serialize>(&mut self, key: &str, value: V) {
        self.parameters.insert(key.to_string(), exact(value));
    }

    pub fn to_value(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "inputs": self.inputs,
            "parameters": self.parameters,
            "seed": self.seed,
            "result": self.result,
            "pass": self.pass,
        })
    }
}

/// Report for a command that stopped with an error.
pub fn error_report(command: &str, err: &Error) -> Value {
    let mut e = json!({ "kind": error_kind(err), "message": err.to_string() });
    if let Error::Schema { path, .. } = err {
        e["path"] = json!(path);
    }
    json!({
        "schema": SCHEMA,
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "error": e,
        "pass": false,
    })
}

fn error_kind(err: &Error) -> &'static str {
    if err.is_precondition() {
        "precondition"
    } else {
        "input"
    }
}
