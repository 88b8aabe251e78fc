use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::hrep::export_h_representation;
use super::report::{
    classify_report, corners_report, esq_report, greedy_report, region_report, Report, TOOL, VERSION,
};
use super::state_spec::{parse_state_spec, StateSpec};
use crate::error::{Error, Result};
use crate::esq::EsqBudget;
use crate::qstate::{build_state, MultipartyState};
use crate::region::{region_constants, RegionConstants};
use crate::sim::{decoupling_curve, DecouplingConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "qdistcomp", version, about = "Rate regions for multiparty quantum state compression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// State file.
    #[arg(long)]
    state: PathBuf,
    /// Report file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct Budget {
    /// Largest extension dimension tried.
    #[arg(long, default_value_t = 4)]
    d_e_max: usize,
    /// Random restarts per extension dimension.
    #[arg(long, default_value_t = 4)]
    restarts: usize,
    /// Descent steps per restart.
    #[arg(long, default_value_t = 200)]
    iterations: usize,
}

impl Budget {
    fn budget(&self, seed: u64) -> EsqBudget {
        EsqBudget { d_e_sweep: (1..=self.d_e_max).collect(), restarts: self.restarts, iterations: self.iterations, seed }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Region constants and vertices.
    Region {
        #[command(flatten)]
        common: Common,
        /// Also write the halfspace description.
        #[arg(long)]
        hrep_out: Option<PathBuf>,
        /// Also estimate the outer bound.
        #[arg(long)]
        outer: bool,
        #[command(flatten)]
        budget: Budget,
    },
    /// Corner point and protocol schedule for every sender order.
    Corners {
        #[command(flatten)]
        common: Common,
    },
    /// Minimum linear cost over the region.
    Greedy {
        #[command(flatten)]
        common: Common,
        /// One positive cost per sender, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        costs: Vec<f64>,
    },
    /// Upper bound on squashed entanglement.
    Esq {
        #[command(flatten)]
        common: Common,
        /// Parts, comma separated; `+` joins labels into one part. Defaults to the senders.
        #[arg(long, value_delimiter = ',')]
        parts: Vec<String>,
        #[command(flatten)]
        budget: Budget,
    },
    /// Place a rate point relative to the inner and outer bounds.
    Classify {
        #[command(flatten)]
        common: Common,
        /// One rate per sender, comma separated.
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        point: Vec<f64>,
        #[command(flatten)]
        budget: Budget,
    },
    /// Decoupling curve of one sender against the reference.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Sender label; defaults to the first sender.
        #[arg(long)]
        sender: Option<String>,
        /// Rates in qubits per copy, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        copies: usize,
        /// Project onto the typical subspace with this window.
        #[arg(long)]
        typical_delta: Option<f64>,
        /// Also write the curve as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Region { .. } => "region",
            Command::Corners { .. } => "corners",
            Command::Greedy { .. } => "greedy",
            Command::Esq { .. } => "esq",
            Command::Classify { .. } => "classify",
            Command::Simulate { .. } => "simulate",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Region { common, .. }
            | Command::Corners { common }
            | Command::Greedy { common, .. }
            | Command::Esq { common, .. }
            | Command::Classify { common, .. }
            | Command::Simulate { common, .. } => common,
        }
    }
}

struct Loaded {
    spec: StateSpec,
    state: MultipartyState,
    sha256: String,
}

impl Loaded {
    fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path)?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| Error::Parse { line: 1, msg: "state file is not UTF-8".into() })?;
        let spec = parse_state_spec(&text)?;
        let state = build_state(&spec)?;
        Ok(Loaded { spec, state, sha256: hex::encode(Sha256::digest(&bytes)) })
    }

    fn constants(&self) -> Result<RegionConstants> {
        region_constants(&self.state, &self.spec.reference)
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit<T: Serialize>(cmd: &Command, args: &[String], loaded: &Loaded, result: T) -> Result<()> {
    let common = cmd.common();
    let timestamp_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let report = Report {
        tool: TOOL,
        version: VERSION,
        command: cmd.name().to_string(),
        args: args.to_vec(),
        spec_sha256: loaded.sha256.clone(),
        seed: common.seed,
        timestamp_unix,
        result,
    };
    write_output(common.out.as_deref(), &report.to_json()?)
}

fn execute(cmd: &Command, args: &[String]) -> Result<()> {
    let common = cmd.common();
    let loaded = Loaded::read(&common.state)?;
    match cmd {
        Command::Region { hrep_out, outer, budget, .. } => {
            let rc = loaded.constants()?;
            let b = outer.then(|| budget.budget(common.seed));
            let report = region_report(&loaded.state, &rc, b.as_ref())?;
            if let Some(p) = hrep_out {
                fs::write(p, export_h_representation(&rc))?;
            }
            emit(cmd, args, &loaded, report)
        }
        Command::Corners { .. } => {
            let rc = loaded.constants()?;
            emit(cmd, args, &loaded, corners_report(&loaded.state, &rc)?)
        }
        Command::Greedy { costs, .. } => {
            let rc = loaded.constants()?;
            emit(cmd, args, &loaded, greedy_report(&rc, costs)?)
        }
        Command::Esq { parts, budget, .. } => {
            let parts = if parts.is_empty() { loaded.spec.senders() } else { parts.clone() };
            emit(cmd, args, &loaded, esq_report(&loaded.state, &parts, &budget.budget(common.seed))?)
        }
        Command::Classify { point, budget, .. } => {
            let rc = loaded.constants()?;
            emit(cmd, args, &loaded, classify_report(&loaded.state, &rc, point, &budget.budget(common.seed))?)
        }
        Command::Simulate { sender, grid, trials, copies, typical_delta, csv, .. } => {
            let sender = match sender {
                Some(s) => s.clone(),
                None => loaded.spec.senders()[0].clone(),
            };
            let mut cfg = DecouplingConfig::new(&sender, &loaded.spec.reference, *copies, grid.clone(), *trials, common.seed);
            cfg.typical_delta = *typical_delta;
            let curve = decoupling_curve(&loaded.state, &cfg)?;
            if let Some(p) = csv {
                fs::write(p, curve.to_csv())?;
            }
            emit(cmd, args, &loaded, curve)
        }
    }
}

/// Runs one command line (`argv[0]` is the program name) and returns the process exit code:
/// 0 on success, 2 for bad input, 3 for a broken internal invariant.
pub fn run_command<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    let args = argv.get(1..).unwrap_or_default().to_vec();
    match execute(&cli.command, &args) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_internal() { EXIT_INTERNAL } else { EXIT_VALIDATION }
        }
    }
}
