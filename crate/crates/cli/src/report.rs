use std::fmt;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::RunConfig;

/// Bad input: missing files, malformed records, out-of-range settings.
/// Maps to exit status 2.
#[derive(Debug)]
pub struct Invalid(pub String);

impl fmt::Display for Invalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

pub fn invalid(e: impl fmt::Display) -> anyhow::Error {
    anyhow::Error::new(Invalid(e.to_string()))
}

pub fn read_input(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))
}

/// Comment lines opening every report: tool version, command, master seed,
/// resolved config and command arguments.
pub fn header(command: &str, cfg: &RunConfig, args: &impl Serialize) -> String {
    let config = serde_json::to_string(cfg).expect("config serializes");
    let args = serde_json::to_string(args).expect("arguments serialize");
    format!(
        "# asrlab {}\n# command: {command}\n# seed: {}\n# config: {config}\n# args: {args}\n",
        env!("CARGO_PKG_VERSION"),
        cfg.seed
    )
}

pub fn write_report(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))
}
