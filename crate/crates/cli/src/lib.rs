//! `djcheck`: runs declarative verification scenarios against the
//! `dirac_jacobi` library and reports one verdict per check.

pub mod build;
pub mod run;
pub mod scenario;

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

pub use build::{build, Expect, Overrides, Plan, OPERATIONS};
pub use run::{execute, CheckResult, Outcome, Report};
pub use scenario::{parse_scenario, Scenario};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Syntax { path: PathBuf, message: String },
    #[error("{path}: {} validation error(s):\n  {}", .errors.len(), .errors.join("\n  "))]
    Invalid { path: PathBuf, errors: Vec<String> },
    #[error("no check named `{0}`")]
    UnknownCheck(String),
}

impl CliError {
    /// Every error here is a usage or validation problem.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// A scenario file read, parsed and validated.
pub struct Loaded {
    pub plan: Plan,
    pub digest: String,
}

pub fn load(path: &Path, overrides: &Overrides) -> Result<Loaded, CliError> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::Syntax {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let scenario = parse_scenario(&text).map_err(|e| CliError::Syntax {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let plan = build(&scenario, overrides).map_err(|errors| CliError::Invalid {
        path: path.to_path_buf(),
        errors,
    })?;
    Ok(Loaded {
        plan,
        digest: format!("sha256:{}", sha256_hex(&bytes)),
    })
}

/// Loads and runs a scenario; `only` restricts the run to the named checks.
pub fn run_scenario(path: &Path, overrides: &Overrides, only: &[String], timing: bool) -> Result<Report, CliError> {
    let loaded = load(path, overrides)?;
    if let Some(missing) = only.iter().find(|n| !loaded.plan.checks.iter().any(|c| &c.name == *n)) {
        return Err(CliError::UnknownCheck(missing.clone()));
    }
    Ok(execute(&loaded.plan, loaded.digest, only, timing))
}
