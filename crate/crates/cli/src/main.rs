use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kinexp::harness::{cmd_run, cmd_spectrum, cmd_sweep, HarnessError, Job, Overrides};
use kinexp::integrator::ClampMode;
use kinexp::io::parse_mechanism;
use kinexp::kinetics::ReverseRateConvention;

/// Adaptive exponential integration of isobaric kinetics.
#[derive(Debug, Parser)]
#[command(name = "kinexp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate once, writing solution.csv and steps.csv.
    Run(Common),
    /// Tolerance sweep against a tight reference, writing sweep.csv.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Run sweep points on separate threads.
        #[arg(long)]
        parallel: bool,
    },
    /// Jacobian spectrum and normalized step cost along a run, writing spectrum.csv.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Compute eigenvalues at every N-th accepted step.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        spectrum_every: u64,
    },
    /// Parse a config and its mechanism (or a mechanism alone) and report.
    Validate {
        #[arg(long, required_unless_present = "mech")]
        config: Option<PathBuf>,
        #[arg(long)]
        mech: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Mechanism file, overriding the config's `mechanism` key.
    #[arg(long)]
    mech: Option<PathBuf>,
    /// Output directory, overriding `[output] dir` (default `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Step-size clamp: standard, piecewise (alias paper_literal).
    #[arg(long)]
    clamp_mode: Option<ClampMode>,
    /// Reverse rate constant: divide (b = f / Kc) or multiply (b = f * Kc).
    #[arg(long)]
    reverse_rate_convention: Option<ReverseRateConvention>,
    /// Accepted for reproducible scripts; the solver uses no randomness.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<(Job, PathBuf), HarnessError> {
        let overrides = Overrides {
            mechanism: self.mech.clone(),
            clamp_mode: self.clamp_mode,
            reverse_rate: self.reverse_rate_convention,
        };
        let job = Job::load(&self.config, &overrides)?;
        let out = self.out.clone().or_else(|| job.config.output.dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
        Ok((job, out))
    }
}

fn validate(config: Option<&Path>, mech: Option<&Path>) -> Result<(), HarnessError> {
    if let Some(config) = config {
        let overrides = Overrides { mechanism: mech.map(Path::to_path_buf), ..Default::default() };
        let job = Job::load(config, &overrides)?;
        println!(
            "ok: {} species, {} reactions, T0 = {} K, p = {} Pa, t_final = {} s",
            job.mechanism.species().len(),
            job.mechanism.reactions().len(),
            job.initial[0],
            job.config.pressure,
            job.config.t_final
        );
        return Ok(());
    }
    let path = mech.expect("clap requires --config or --mech");
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
    let m = parse_mechanism(&text).map_err(|source| HarnessError::Parse { path: path.to_path_buf(), source })?;
    println!("ok: {} species, {} reactions", m.species().len(), m.reactions().len());
    Ok(())
}

fn execute(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Run(common) => {
            let (job, out) = common.load()?;
            let res = cmd_run(&job, &out)?;
            println!(
                "t = {} s, T = {} K, {} accepted, {} rejected steps, {:.3} s; wrote {}",
                res.t,
                res.y[0],
                res.accepted_steps(),
                res.rejected_steps(),
                res.total_cpu_seconds(),
                out.display()
            );
        }
        Command::Sweep { common, parallel } => {
            let (job, out) = common.load()?;
            let rows = cmd_sweep(&job, parallel, &out)?;
            let failed = rows.iter().filter(|r| r.status != "ok").count();
            println!("{} sweep points ({} failed); wrote {}", rows.len(), failed, out.join("sweep.csv").display());
        }
        Command::Spectrum { common, spectrum_every } => {
            let (job, out) = common.load()?;
            let rows = cmd_spectrum(&job, spectrum_every as usize, &out)?;
            let failed = rows.iter().filter(|r| r.status.starts_with("failed")).count();
            println!("{} steps ({} spectrum failures); wrote {}", rows.len(), failed, out.join("spectrum.csv").display());
        }
        Command::Validate { config, mech } => validate(config.as_deref(), mech.as_deref())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
