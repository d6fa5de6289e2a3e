//! Batch front end for `spinstat-core`: each subcommand runs one family of
//! checks and writes a JSON result envelope, plus a CSV table for sweeps.
//!
//! Exit codes: 0 when every check passes, 2 when a tolerance check fails,
//! 1 on usage or I/O errors.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::{Path, PathBuf};

pub use commands::{run, Outcome};
pub use config::{Command, Parameters, RunConfig};
pub use error::{CliError, CliResult};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_TOLERANCE: i32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub outcomes: Vec<Outcome>,
    pub written: Vec<PathBuf>,
}

impl RunSummary {
    pub fn pass(&self) -> bool {
        self.outcomes.iter().all(|o| o.envelope.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass() {
            EXIT_PASS
        } else {
            EXIT_TOLERANCE
        }
    }
}

/// Runs a config and writes its artifacts under `output_dir`. Every
/// artifact is computed before the first file is written.
pub fn run_config(config: &RunConfig, output_dir: &Path) -> CliResult<RunSummary> {
    let outcomes = run(config.subcommand, &config.parameters, config.seed)?;
    let mut encoded = Vec::with_capacity(outcomes.len());
    for o in &outcomes {
        let json = output::to_json(&o.envelope)?;
        let csv = o.table.as_ref().map(output::to_csv).transpose()?;
        encoded.push((o.stem.as_str(), json, csv));
    }
    let mut written = Vec::new();
    for (stem, json, csv) in encoded {
        if let Some(bytes) = csv {
            let path = output_dir.join(format!("{stem}.csv"));
            output::write_atomic(&path, &bytes)?;
            written.push(path);
        }
        let path = output_dir.join(format!("{stem}.json"));
        output::write_atomic(&path, &json)?;
        written.push(path);
    }
    Ok(RunSummary { outcomes, written })
}
