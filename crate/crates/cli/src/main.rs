use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

mod commands;
mod gallery;
mod input;
mod report;

use commands::{Kind, Opts, RuthSource};
use input::{write_json, InputError, Loader};

/// Exact semi-direct products and splittings of higher vector bundles.
///
/// Exit status: 0 when every check passes, 1 on a failed check, 2 on unusable input.
#[derive(Parser, Debug)]
#[command(name = "hvb", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Truncation level of constructed bundles (default 2N + 3)
    #[arg(long, global = true)]
    level: Option<usize>,
    /// Highest m checked in RH2 (default 2N + 2)
    #[arg(long, global = true)]
    mcap: Option<usize>,
    /// Write the report as JSON to this path ("-" for stdout)
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Suppress the text report
    #[arg(long, short, global = true)]
    quiet: bool,
    /// Include wall time in the report
    #[arg(long, global = true)]
    timing: bool,
    /// Directory searched for relative input paths that do not exist as given
    #[arg(long, global = true, env = "HVB_FIXTURE_DIR", value_name = "DIR")]
    fixture_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Parse a document and run its validators
    Validate {
        #[arg(value_enum)]
        kind: Kind,
        path: PathBuf,
        /// Bundle the cleavage lives on
        #[arg(long, required_if_eq("kind", "cleavage"))]
        svb: Option<PathBuf>,
    },
    /// Build the semi-direct product of a representation and verify it
    BuildSdp {
        #[arg(required_unless_present = "builtin")]
        ruth: Option<PathBuf>,
        /// sign, trivial:<groupoid>, unit-chain or sweep:<k>
        #[arg(long, conflicts_with = "ruth")]
        builtin: Option<String>,
        #[arg(long, value_name = "PATH")]
        out_svb: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        out_cleavage: Option<PathBuf>,
    },
    /// Split a bundle with a cleavage back into a representation
    Split {
        svb: PathBuf,
        cleavage: PathBuf,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Run a gallery entry; without a name, list them
    Examples {
        name: Option<String>,
        /// Fixtures in the sweep entry
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
    /// Dimensions of the linear cochain cohomology
    Cohomology {
        svb: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
    },
}

fn run(cli: &Cli) -> Result<Option<report::Report>, InputError> {
    let o = Opts { level: cli.level, mcap: cli.mcap, loader: Loader { fixture_dir: cli.fixture_dir.clone() } };
    let rep = match &cli.cmd {
        Cmd::Validate { kind, path, svb } => commands::validate(&o, *kind, path, svb.as_deref())?,
        Cmd::BuildSdp { ruth, builtin, out_svb, out_cleavage } => {
            let src = match (ruth, builtin) {
                (Some(p), _) => RuthSource::Path(p),
                (None, Some(b)) => RuthSource::Builtin(b),
                (None, None) => unreachable!("clap requires one of them"),
            };
            commands::build(&o, src, out_svb.as_ref(), out_cleavage.as_ref())?
        }
        Cmd::Split { svb, cleavage, out } => commands::split(&o, svb, cleavage, out.as_ref())?,
        Cmd::Examples { name: None, .. } => {
            for (n, what) in gallery::ENTRIES {
                println!("{n:<20} {what}");
            }
            return Ok(None);
        }
        Cmd::Examples { name: Some(name), count } => gallery::run(name, *count)
            .ok_or_else(|| InputError::Invalid(format!("unknown example {name:?}; run `hvb examples` for the list")))?,
        Cmd::Cohomology { svb, max_degree } => commands::cohomology(&o, svb, *max_degree)?,
    };
    Ok(Some(rep))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let t0 = Instant::now();
    let mut rep = match run(&cli) {
        Ok(Some(rep)) => rep,
        Ok(None) => return ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.timing {
        rep.timing_ms = Some(t0.elapsed().as_millis() as u64);
    }
    if !cli.quiet {
        print!("{}", rep.to_text());
    }
    if let Some(p) = &cli.json {
        if let Err(e) = write_json(p, &rep) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if rep.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
