use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use ila_cli::config::SchemeConfig;
use ila_cli::drivers;
use ila_cli::report::{emit, Report};

/// Static checker, dual-semantics runner, and modswitch-inference driver
/// for ILA circuits.
#[derive(Parser)]
#[command(name = "ila", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Scheme configuration (JSON).
    #[arg(long)]
    scheme: PathBuf,
    /// Circuit file (.ila).
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Key/simulation seed for oracle modes.
    #[arg(long)]
    seed: Option<u64>,
    /// Trial count for randomized modes.
    #[arg(long, default_value_t = 1000)]
    trials: u32,
    /// Emit machine-readable JSON (diagnosis lines plus a report object).
    #[arg(long)]
    json: bool,
    /// Record per-assignment measured bounds (run mode).
    #[arg(long)]
    trace: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Statically typecheck a circuit (no key material involved).
    Check(Common),
    /// Typecheck, then run homomorphically and decrypt every variable.
    Run(Common),
    /// Run the cleartext message semantics on the declared inputs.
    RunMsg(Common),
    /// Infer modswitch placement and emit the rewritten circuit.
    InferMs {
        #[command(flatten)]
        common: Common,
        /// Output path for the rewritten circuit (stdout note otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep coefficient-modulus sizes comparing static and oracle depth.
    DepthProbe {
        #[command(flatten)]
        common: Common,
        /// Comma-separated q sizes in bits.
        #[arg(long, value_delimiter = ',', default_values_t = [25u32, 30, 35, 40, 45, 50, 55, 60])]
        q_bits: Vec<u32>,
        #[arg(long, default_value_t = 5)]
        probe_trials: u32,
        #[arg(long, default_value_t = 64)]
        max_depth: u32,
    },
    /// Value-overflow detection timing for TFHE addition chains.
    TfheOverflowProbe {
        #[command(flatten)]
        common: Common,
        /// Comma-separated exponents p (the chain has 2^p additions).
        #[arg(long, value_delimiter = ',', default_values_t = [2u32, 4, 6, 8, 10, 12])]
        p_values: Vec<u32>,
        /// Timing repetitions per point (median reported).
        #[arg(long, default_value_t = 5)]
        timing_runs: u32,
    },
    /// Randomized model-validity axiom harness.
    AxiomCheck(Common),
}

fn circuit_of(common: &Common) -> Result<&PathBuf> {
    common
        .circuit
        .as_ref()
        .ok_or_else(|| anyhow::anyhow!("this mode needs --circuit"))
}

fn dispatch(cli: Cli) -> Result<(Report, bool)> {
    match cli.command {
        Command::Check(c) => {
            let cfg = SchemeConfig::load(&c.scheme)?;
            Ok((drivers::cmd_check(&cfg, circuit_of(&c)?)?, c.json))
        }
        Command::Run(c) => {
            let cfg = SchemeConfig::load(&c.scheme)?;
            Ok((
                drivers::cmd_run(&cfg, circuit_of(&c)?, c.seed, c.trace)?,
                c.json,
            ))
        }
        Command::RunMsg(c) => {
            let cfg = SchemeConfig::load(&c.scheme)?;
            Ok((drivers::cmd_run_msg(&cfg, circuit_of(&c)?)?, c.json))
        }
        Command::InferMs { common: c, out } => {
            let cfg = SchemeConfig::load(&c.scheme)?;
            Ok((
                drivers::cmd_infer_ms(&cfg, circuit_of(&c)?, out.as_deref())?,
                c.json,
            ))
        }
        Command::DepthProbe {
            common: c,
            q_bits,
            probe_trials,
            max_depth,
        } => {
            let cfg = SchemeConfig::load(&c.scheme)?;
            Ok((
                drivers::cmd_depth_probe(&cfg, &q_bits, probe_trials, max_depth, c.seed)?,
                c.json,
            ))
        }
        Command::TfheOverflowProbe {
            common: c,
            p_values,
            timing_runs,
        } => {
            let cfg = SchemeConfig::load(&c.scheme)?;
            Ok((
                drivers::cmd_tfhe_overflow_probe(&cfg, &p_values, timing_runs)?,
                c.json,
            ))
        }
        Command::AxiomCheck(c) => {
            let cfg = SchemeConfig::load(&c.scheme)?;
            Ok((drivers::cmd_axiom_check(&cfg, c.seed, c.trials)?, c.json))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok((report, json)) => {
            let mut stdout = std::io::stdout().lock();
            if emit(&report, json, &mut stdout).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::from(u8::try_from(report.exit_code).unwrap_or(1))
        }
        Err(e) => {
            eprintln!("ila: error: {e:#}");
            ExitCode::from(1)
        }
    }
}
