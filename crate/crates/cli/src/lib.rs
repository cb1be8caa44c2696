//! Command-line front end: scenario runs, method comparison, energy-efficiency
//! sweeps and breakdown reports.
//!
//! Exit status is 0 when everything succeeded, 2 when some applications
//! failed and 1 for usage or configuration errors.

pub mod ee;
pub mod estimate;
pub mod manifest;
pub mod report;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use actisim_core::library::{import_characterization_csv, load_library, save_library, PowerLibrary};
use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

pub use ee::{cmd_ee, EeArgs};
pub use estimate::{cmd_estimate, EstimateArgs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;

/// Whether every application of a run succeeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Partial,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => EXIT_OK,
            Outcome::Partial => EXIT_PARTIAL,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "actisim", version, about = "Activity-aware power estimation for FPGA dataflow systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate every application of a scenario and estimate its power.
    Estimate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        library: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Root seed recorded in the manifest and reused by `ee`.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Parallel applications; defaults to the application count.
        #[arg(long)]
        jobs: Option<usize>,
        /// Wall-clock timings file; defaults to `OUT/timings.json`.
        #[arg(long)]
        timings: Option<PathBuf>,
        /// Replace the output directory of a previous run.
        #[arg(long)]
        force: bool,
    },
    /// Energy-efficiency sweep over transmit power for an estimate run.
    Ee {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        params: PathBuf,
        /// `start:stop:step` in dBm.
        #[arg(long, default_value = ee::DEFAULT_PT_DBM, allow_hyphen_values = true)]
        pt_dbm: String,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed of the estimate manifest.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `n_samples` of the parameter file.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        timings: Option<PathBuf>,
    },
    /// Activity-weighted against cumulative totals, optionally against reference values.
    Compare {
        #[arg(long)]
        manifest: PathBuf,
        /// JSON with `applications[].reference_mw` in manifest order.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = report::Format::Table)]
        format: report::Format,
    },
    /// Per-instance or per-block-type power CSV.
    Report {
        #[arg(long)]
        manifest: PathBuf,
        /// Group contributions by block type.
        #[arg(long)]
        breakdown: bool,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Merge a characterization CSV into a power library.
    Import {
        #[arg(long)]
        csv: PathBuf,
        /// Library to extend; a new one is started when omitted.
        #[arg(long)]
        library: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

pub fn init_logging() {
    let env = env_logger::Env::new().filter_or("ACTISIM_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli.command) {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

pub fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Estimate {
            scenario,
            library,
            out,
            seed,
            jobs,
            timings,
            force,
        } => {
            let (manifest, outcome) = cmd_estimate(&EstimateArgs {
                scenario,
                library,
                out,
                seed,
                jobs,
                timings,
                force,
            })?;
            for app in &manifest.applications {
                match (&app.result, &app.error) {
                    (Some(r), _) => println!(
                        "{}  {}  activity-weighted {:.2} mW  cumulative {:.2} mW",
                        app.id, app.label, r.activity_weighted_mw, r.cumulative_mw
                    ),
                    (None, e) => println!("{}  {}  failed: {}", app.id, app.label, e.as_deref().unwrap_or("")),
                }
            }
            Ok(outcome)
        }
        Command::Ee {
            manifest,
            params,
            pt_dbm,
            out,
            seed,
            samples,
            timings,
        } => {
            let (m, outcome) = cmd_ee(&EeArgs {
                manifest,
                params,
                pt_dbm,
                out,
                seed,
                samples,
                timings,
            })?;
            println!(
                "{} curves for {} applications written to {}",
                2 * m.applications.len(),
                m.applications.len(),
                m.out_dir
            );
            Ok(outcome)
        }
        Command::Compare {
            manifest,
            reference,
            format,
        } => {
            let rows = report::compare_rows(&manifest, reference.as_deref())?;
            print!("{}", report::render_compare(&rows, format));
            Ok(Outcome::Success)
        }
        Command::Report {
            manifest,
            breakdown,
            out,
        } => {
            let bytes = if breakdown {
                report::breakdown_csv(&manifest)?
            } else {
                report::instances_csv(&manifest)?
            };
            match out {
                Some(path) => fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?,
                None => std::io::stdout().write_all(&bytes)?,
            }
            Ok(Outcome::Success)
        }
        Command::Import { csv, library, out } => {
            let base = match library {
                Some(path) => load_library(path)?,
                None => PowerLibrary::new(),
            };
            let (merged, warnings) = import_characterization_csv(&csv, &base)?;
            for w in &warnings {
                log::warn!("{}: {w}", csv.display());
            }
            save_library(&merged, &out)?;
            println!("{} records written to {}", merged.len(), out.display());
            Ok(Outcome::Success)
        }
    }
}
