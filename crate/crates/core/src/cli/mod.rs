//! Manifest-driven front end: `acslm run` and `acslm explain`.

mod explain;
mod manifest;
mod report;
mod run;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use explain::{explain, explain_block};
pub use manifest::{
    bundled_dir, load, parse, resolve, Analysis, ConeProfileSpec, ConeSpec, EndSpec, GeometrySpec, GlueSpec, LoadedManifest, Manifest,
    ProbeSpec, TopologySpec, WeightsSpec,
};
pub use report::{tool_version, Block, BlockError, Report, Status};
pub use run::{run, RunOptions};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "acslm", version, about = "Moduli dimensions and numerics for asymptotically conical special Lagrangians")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a manifest (a path, or the name of a bundled manifest).
    Run {
        manifest: String,
        /// Report path; defaults to the manifest's `output`, else stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Base seed for randomized steps.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Record wall-clock per block (reports are then no longer byte-stable).
        #[arg(long)]
        timings: bool,
    },
    /// Render one block of a report as a table.
    Explain { report: PathBuf, block: String },
}

/// Runs a parsed command line; returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run { manifest, out, seed, timings } => {
            let path = resolve(&manifest)?;
            let loaded = load(&path)?;
            let report = run(&loaded, RunOptions { seed, timings })?;
            let text = report.to_json();
            match out.or_else(|| loaded.manifest.output.as_ref().map(|p| loaded.base.join(p))) {
                Some(p) => std::fs::write(&p, text)?,
                None => print!("{text}"),
            }
            for b in report.blocks.iter().filter(|b| b.status == Status::Failed) {
                let msg = b.error.as_ref().map(|e| e.message.as_str()).unwrap_or("");
                eprintln!("block {} failed: {msg}", b.id);
            }
            Ok(report.exit_code)
        }
        Command::Explain { report, block } => {
            let text = std::fs::read_to_string(&report)?;
            let rep: Report = serde_json::from_str(&text).map_err(|e| Error::validation("/", format!("not a report: {e}")))?;
            print!("{}", explain(&rep, &block)?);
            Ok(0)
        }
    }
}
