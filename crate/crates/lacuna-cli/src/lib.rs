//! Experiment harness over `lacuna-core`: configuration, seeded function
//! families, the sweep / proposition / decomposition / covering / inequality
//! drivers, deterministic report emission, and the frozen baselines.

pub mod baselines;
pub mod config;
pub mod decomp;
pub mod families;
pub mod ineqrun;
pub mod props;
pub mod report;
pub mod stress;
pub mod sweep;
pub mod verify;

use std::path::Path;

/// Errors mapped onto process exit codes: config/IO problems exit 2,
/// failed checks exit 1.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Check(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Check(msg) => write!(f, "check failed: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Check(_) => 1,
        }
    }
}

pub fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| {
        CliError::Config(format!("cannot create output dir {}: {e}", dir.display()))
    })
}

pub fn write_timings(dir: &Path, name: &str, lines: &[String]) {
    // Timing is intentionally kept out of the CSV/JSON artifacts so repeated
    // runs stay byte-identical; failures to write the log are not fatal.
    let _ = std::fs::write(dir.join(format!("{name}_timings.log")), lines.join("\n") + "\n");
}
