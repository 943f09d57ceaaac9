use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use sha2::{Digest, Sha256};

/// Provenance written as `#` header lines at the top of every output file.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub subcommand: &'static str,
    pub config: Vec<(String, String)>,
    /// `(role, path, sha256 hex)`.
    pub inputs: Vec<(String, String, String)>,
    pub seed: Option<u64>,
    started: Instant,
}

impl RunManifest {
    pub fn new(subcommand: &'static str) -> Self {
        Self {
            subcommand,
            config: Vec::new(),
            inputs: Vec::new(),
            seed: None,
            started: Instant::now(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.config.push((key.to_string(), value.to_string()));
    }

    /// Records the digest of an input and returns its bytes as text.
    pub fn read_input(&mut self, role: &str, path: &Path) -> Result<String, crate::CliError> {
        let bytes = std::fs::read(path).map_err(|e| crate::CliError::Io(path.display().to_string(), e))?;
        self.inputs
            .push((role.to_string(), path.display().to_string(), hex::encode(Sha256::digest(&bytes))));
        String::from_utf8(bytes).map_err(|_| crate::CliError::Input(format!("{}: not valid UTF-8", path.display())))
    }

    /// Key/value pairs in header order, ending with the wall time so far.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut out = vec![("subcommand".to_string(), self.subcommand.to_string())];
        for (k, v) in &self.config {
            out.push((format!("config.{k}"), v.clone()));
        }
        for (role, path, digest) in &self.inputs {
            out.push((format!("input.{role}"), format!("{path} sha256:{digest}")));
        }
        if let Some(seed) = self.seed {
            out.push(("root_seed".into(), seed.to_string()));
        }
        out.push(("version".into(), format!("relent {}", env!("CARGO_PKG_VERSION"))));
        out.push(("wall_time_s".into(), format!("{:.3}", self.started.elapsed().as_secs_f64())));
        out
    }

    pub fn header(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(s, "# {k} {v}");
        }
        s
    }
}
