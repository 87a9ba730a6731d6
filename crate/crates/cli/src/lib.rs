//! Library side of the `stieltjes` command: configuration, execution and
//! output, shared by the binary and its tests.

// `!(a > b)` comparisons are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod run;

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

pub use config::{plan, Format, Mode, Overrides, Plan};
pub use output::{Cell, Table};
pub use run::execute;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_NON_CONVERGENCE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: io::Error },
    #[error("configuration has {} violation(s):\n  {}", .0.len(), .0.join("\n  "))]
    Schema(Vec<String>),
    #[error(transparent)]
    Lab(#[from] stieltjes_lab::LabError),
    #[error("cannot write output: {0}")]
    Write(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Schema(_) => EXIT_SCHEMA,
            CliError::Lab(_) | CliError::Write(_) => EXIT_RUNTIME,
        }
    }
}

/// Reads and validates a configuration file.
pub fn load(path: &Path, overrides: &Overrides) -> Result<Plan, CliError> {
    let text =
        fs::read_to_string(path).map_err(|source| CliError::Read { path: path.display().to_string(), source })?;
    plan(&text, overrides).map_err(CliError::Schema)
}

/// Runs `plan` and writes its table to the configured path, or stdout.
/// Returns the table; rows that failed carry a non-`ok` status.
pub fn run_and_write(plan: &Plan) -> Result<Table, CliError> {
    let table = execute(plan)?;
    match &plan.output {
        Some(path) => {
            let mut file = io::BufWriter::new(fs::File::create(path)?);
            table.write(&mut file, plan.format)?;
            file.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            table.write(&mut lock, plan.format)?;
        }
    }
    Ok(table)
}
