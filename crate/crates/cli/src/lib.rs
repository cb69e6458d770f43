//! Command-line sweeps over the `xyphase` library.
//!
//! [`Cli`] is the clap front end; [`execute`] runs a resolved
//! [`config::SweepConfig`] on a rayon pool and writes its CSV files.

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;

use clap::Parser;

use crate::commands::Output;
use crate::config::{CommandKind, SweepArgs, SweepConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "xyphase", version, about = "Geometric-phase sweeps of the XY chain under a linear quench")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: CommandKind,
    /// TOML file with the same keys as the long flags; flags win
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub args: SweepArgs,
}

impl Cli {
    pub fn resolve(self) -> Result<SweepConfig, CliError> {
        let args = match &self.config {
            Some(path) => self.args.or(SweepArgs::from_toml_file(path)?),
            None => self.args,
        };
        SweepConfig::resolve(self.command, args)
    }
}

/// Run and write every output file. A failed check is returned after the
/// files are on disk.
pub fn execute(config: &SweepConfig) -> Result<Output, CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Args(format!("thread pool: {e}")))?;
    let output = pool.install(|| commands::run(config))?;
    for (path, table) in &output.files {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        table.write_csv(BufWriter::new(File::create(path)?))?;
    }
    Ok(output)
}
