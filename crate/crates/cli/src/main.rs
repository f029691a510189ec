//! `lbkit`: build lower-bound instances, verify them against exact distance
//! computations, run CONGEST simulations and two-party reductions.

mod commands;
mod instance;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use instance::InstanceArgs;

#[derive(Parser, Debug)]
#[command(name = "lbkit", version, about = "CONGEST lower-bound instance toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build one instance and write its graph file.
    Build {
        #[command(flatten)]
        inst: InstanceArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check the construction's claimed properties on one or many inputs.
    Verify {
        #[command(flatten)]
        inst: InstanceArgs,
        #[command(flatten)]
        cases: CaseArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run a distributed program on one instance.
    Simulate {
        #[command(flatten)]
        inst: InstanceArgs,
        #[command(flatten)]
        sim: SimArgs,
        /// Node id of the BFS source.
        #[arg(long, default_value_t = 0)]
        source: usize,
        /// Diameter bound handed to flood-max (default n-1).
        #[arg(long)]
        dhat: Option<u64>,
        /// Also write the per-round, per-edge bit ledger as CSV.
        #[arg(long)]
        ledger_csv: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run the reference algorithm as an Alice/Bob protocol.
    Reduce {
        #[command(flatten)]
        inst: InstanceArgs,
        #[command(flatten)]
        sim: SimArgs,
        /// Constant of the Set-Disjointness bound, e.g. 1 or 1/4.
        #[arg(long, default_value = "1")]
        c_disj: String,
        /// Compare against the monolithic simulator.
        #[arg(long, num_args = 0..=1, default_missing_value = "true", default_value = "true")]
        check_equivalence: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Verify a grid of (k, P) values over random and forced inputs.
    Sweep {
        #[arg(long)]
        construction: lbkit::gadgets::Construction,
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u32>,
        #[arg(long = "p", value_delimiter = ',', default_value = "1")]
        p: Vec<u32>,
        #[arg(long)]
        shaved: bool,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        beta: Option<String>,
        #[arg(long)]
        x: Option<u32>,
        #[arg(long)]
        weighted: bool,
        #[command(flatten)]
        cases: CaseArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Probability of a 1 bit in random inputs.
        #[arg(long, default_value = "1/2")]
        density: String,
        /// Where the per-instance CSV goes (default: next to the report).
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Render one instance as Graphviz DOT.
    ExportDot {
        #[command(flatten)]
        inst: InstanceArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args, Debug, Clone)]
struct OutArgs {
    /// Output file; defaults to a file under $LBKIT_OUT_DIR, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct CaseArgs {
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Enumerate every input pair (input length at most 8).
    #[arg(long, num_args = 0..=1, default_missing_value = "true", default_value = "false")]
    exhaustive: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Algo {
    BfsLayers,
    FloodMax,
    ApspDiameter,
    SpannerCheck,
}

#[derive(Args, Debug, Clone)]
struct SimArgs {
    /// Program to run; simulate defaults to apsp-diameter, reduce picks
    /// the construction's reference program.
    #[arg(long, value_enum)]
    algo: Option<Algo>,
    /// Bits per edge per direction per round (default 2 ceil(log2 n) + 2).
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    max_rounds: Option<u64>,
}

/// A failure reported as a JSON object on stderr.
#[derive(Debug, Serialize)]
struct CliError {
    kind: &'static str,
    message: String,
}

impl CliError {
    fn new(kind: &'static str, message: impl Into<String>) -> Self {
        CliError {
            kind,
            message: message.into(),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        let kind = if e.downcast_ref::<lbkit::gadgets::GadgetError>().is_some() {
            "invalid-parameters"
        } else if e.downcast_ref::<lbkit::io::IoError>().is_some() {
            "bad-graph-file"
        } else if e.downcast_ref::<lbkit::sim::SimError>().is_some()
            || e.downcast_ref::<lbkit::reduction::ReductionError>().is_some()
        {
            "simulation"
        } else if e.downcast_ref::<std::io::Error>().is_some() {
            "io"
        } else {
            "invalid-input"
        };
        CliError::new(kind, format!("{e:#}"))
    }
}

fn fail(err: &CliError) -> ExitCode {
    let body = serde_json::json!({ "error": err });
    eprintln!("{body}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // help and version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::new("usage", e.to_string().trim_end())),
    };
    match commands::dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => fail(&e.into()),
    }
}

/// Resolves `--out`, falling back to `$LBKIT_OUT_DIR/<default_name>`.
fn out_path(out: &OutArgs, default_name: &str) -> Option<PathBuf> {
    out.out.clone().or_else(|| {
        std::env::var_os("LBKIT_OUT_DIR")
            .filter(|d| !d.is_empty())
            .map(|d| Path::new(&d).join(default_name))
    })
}

/// Writes to the resolved path, or stdout when there is none.
fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    use anyhow::Context;
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{text}") {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => other.context("writing stdout"),
            }
        }
    }
}
