//! JSON record of one CLI invocation.

use std::fs;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub command: String,
    /// Effective configuration in `section.key = value` form.
    pub config: String,
    pub seed: u64,
    pub force: bool,
    pub outputs: Vec<String>,
    /// Seconds since the Unix epoch.
    pub started: u64,
    pub wall_clock_s: f64,
    pub verdicts: Vec<Verdict>,
    pub warnings: Vec<String>,
    pub exit_code: i32,
    #[serde(skip)]
    clock: Option<Instant>,
}

impl RunManifest {
    pub fn start(command: &str, config: String, seed: u64, force: bool) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            seed,
            force,
            outputs: Vec::new(),
            started: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            wall_clock_s: 0.0,
            verdicts: Vec::new(),
            warnings: Vec::new(),
            exit_code: 0,
            clock: Some(Instant::now()),
        }
    }

    pub fn output(&mut self, name: impl Into<String>) {
        self.outputs.push(name.into());
    }

    pub fn verdict(&mut self, check: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict { check: check.into(), passed, detail: detail.into() });
    }

    pub fn warn(&mut self, w: impl Into<String>) {
        self.warnings.push(w.into());
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    /// Stamps the wall-clock time and writes the manifest to `path`.
    pub fn finish(&mut self, path: impl AsRef<Path>, exit_code: i32) -> Result<()> {
        self.exit_code = exit_code;
        if let Some(c) = self.clock {
            self.wall_clock_s = c.elapsed().as_secs_f64();
        }
        fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::start("verify", "grid.n1 = 8\n".into(), 3, false);
        m.output("verify.csv");
        m.verdict("embedding", true, "ratio 0.5");
        m.warn("gate");
        m.finish(dir.path().join("manifest.json"), 0).unwrap();
        let back = RunManifest::read(dir.path().join("manifest.json")).unwrap();
        assert_eq!(back.outputs, ["verify.csv"]);
        assert_eq!(back.verdicts.len(), 1);
        assert!(back.all_passed());
        assert!(back.wall_clock_s >= 0.0);
    }
}
