use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{error, info};

use lambda_jcm::presets::PRESET_NAMES;
use lambda_jcm::sweep::{dump_phase_snapshot, run_sweep};
use lambda_jcm::{Result, Settings, SweepSpec};

#[derive(Parser)]
#[command(version, about = "Lambda-atom two-mode cavity dynamics and indicators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the scaled time and write indicator columns as CSV.
    Sweep(SweepArgs),
    /// List the built-in presets.
    Presets,
}

#[derive(Args)]
struct SweepArgs {
    /// Built-in parameter set (a-up, a-down, b-up, b-down, c-up, c-down).
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tau_start: Option<f64>,
    #[arg(long)]
    tau_end: Option<f64>,
    /// Number of samples, both endpoints included.
    #[arg(long)]
    tau_steps: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cross-check against the RK4 integrator at reduced scale first.
    #[arg(long)]
    verify: bool,
    /// Equal detuning on both transitions.
    #[arg(long, allow_negative_numbers = true)]
    detuning: Option<f64>,
    /// Drop the per-level free phase factors.
    #[arg(long)]
    no_free_phases: bool,
    /// Write the two-mode phase density at this tau instead of a series.
    #[arg(long)]
    phase_snapshot: Option<f64>,
    /// Phase mesh points per axis.
    #[arg(long)]
    m_pts: Option<usize>,
    /// Comma-separated subset of output columns.
    #[arg(long)]
    observables: Option<String>,
    #[arg(long)]
    n_max: Option<usize>,
}

fn settings(args: &SweepArgs) -> Result<Settings> {
    let mut s = match &args.config {
        Some(path) => Settings::read(path)?,
        None => Settings::default(),
    };
    if let Some(p) = &args.preset {
        s.set("preset", p.as_str());
    }
    let mut put = |key: &str, v: Option<String>| {
        if let Some(v) = v {
            s.set(key, v);
        }
    };
    put("tau_start", args.tau_start.map(|v| v.to_string()));
    put("tau_end", args.tau_end.map(|v| v.to_string()));
    put("tau_steps", args.tau_steps.map(|v| v.to_string()));
    put("out", args.out.as_ref().map(|p| p.display().to_string()));
    put("detuning", args.detuning.map(|v| v.to_string()));
    put("phase_snapshot", args.phase_snapshot.map(|v| v.to_string()));
    put("m_pts", args.m_pts.map(|v| v.to_string()));
    put("observables", args.observables.clone());
    put("n_max", args.n_max.map(|v| v.to_string()));
    if args.verify {
        s.set("verify", "true");
    }
    if args.no_free_phases {
        s.set("include_free_phases", "false");
    }
    Ok(s)
}

fn sweep(args: &SweepArgs) -> Result<()> {
    if args.preset.is_none() && args.config.is_none() {
        return Err(lambda_jcm::Error::Config(
            "need --preset or --config".into(),
        ));
    }
    let spec = SweepSpec::from_settings(&settings(args)?)?;
    match spec.phase_snapshot {
        Some(tau) => {
            dump_phase_snapshot(&spec, tau)?;
            info!(
                "phase density at tau = {tau} written to {}",
                spec.out.display()
            );
        }
        None => {
            let series = run_sweep(&spec)?;
            info!(
                "{} rows written to {}",
                series.rows.len(),
                spec.out.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep(args) => sweep(args),
        Command::Presets => {
            for name in PRESET_NAMES {
                println!("{name}");
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
