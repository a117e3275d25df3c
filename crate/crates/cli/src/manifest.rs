//! Run manifests: everything needed to replay a command.
//!
//! Inputs are identified by the SHA-256 of their bytes, written as lowercase hex.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Default)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub config: Vec<(String, String)>,
    /// `(path, sha256 hex)`.
    pub inputs: Vec<(String, String)>,
    pub version: String,
    pub seed: u64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

impl RunManifest {
    pub fn new(command: &str, argv: &[String], seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            argv: argv.to_vec(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            ..Default::default()
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.config.push((key.to_string(), value.to_string()));
    }

    pub fn add_input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.push((path.display().to_string(), sha256_hex(bytes)));
    }

    /// Flat `key=value` text; config keys are prefixed `config.` and inputs `input.`.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command={}", self.command);
        let _ = writeln!(s, "version={}", self.version);
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "argv={}", self.argv.join(" "));
        for (k, v) in &self.config {
            let _ = writeln!(s, "config.{k}={v}");
        }
        for (p, h) in &self.inputs {
            let _ = writeln!(s, "input.{p}=sha256:{h}");
        }
        s
    }
}
