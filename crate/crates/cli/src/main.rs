use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use hynav::simulator::Outcome;
use hynav_cli::{audit_csv, audit_json, simulate, write_artifacts, Overrides, Scenario};

#[derive(Parser)]
#[command(name = "hynav", version, about = "Hybrid feedback navigation among convex obstacles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PipelineArg {
    Exact,
    Sensed,
}

#[derive(Subcommand)]
enum Command {
    /// Check workspace feasibility and parameter ranges.
    Validate { scenario: PathBuf },
    /// Simulate every initial state and write trajectories, audits and plots.
    Run {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        pipeline: PipelineArg,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Maximum integration step [s].
        #[arg(long)]
        dt: Option<f64>,
        /// Simulated time limit [s].
        #[arg(long)]
        tmax: Option<f64>,
        #[arg(long)]
        convergence_radius: Option<f64>,
        /// Seed for the sampling-based checks.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Audit a stored trajectory CSV.
    Audit { trajectory: PathBuf, scenario: PathBuf },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate { scenario } => {
            let sc = Scenario::load(&scenario)?;
            let report = sc.validate();
            println!("{}", serde_json::to_string_pretty(&report)?);
            for w in sc.sensor.check(&sc.params) {
                eprintln!("sensor warning: {w}");
            }
            if report.ok {
                Ok(ExitCode::SUCCESS)
            } else {
                for v in &report.violations {
                    eprintln!("violation: {v}");
                }
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Run {
            scenario,
            pipeline,
            out,
            dt,
            tmax,
            convergence_radius,
            seed,
        } => {
            let mut sc = Scenario::load(&scenario)?;
            Overrides {
                dt,
                t_max: tmax,
                convergence_radius,
                seed,
            }
            .apply(&mut sc);
            let report = sc.validate();
            if !report.ok {
                for v in &report.violations {
                    eprintln!("violation: {v}");
                }
                return Ok(ExitCode::FAILURE);
            }
            let sensed = matches!(pipeline, PipelineArg::Sensed);
            let runs = simulate(&sc, sensed);
            let artifacts = write_artifacts(&out, &sc, &runs)?;
            let mut all_converged = true;
            for (k, tr) in runs.iter().enumerate() {
                let status = match &tr.outcome {
                    Outcome::Converged { t_final } => format!("converged at t = {t_final:.3} s"),
                    Outcome::MaxTimeExceeded => {
                        all_converged = false;
                        "time limit reached".to_string()
                    }
                    Outcome::Fault(msg) => {
                        all_converged = false;
                        format!("fault: {msg}")
                    }
                };
                println!("run {k:03}: {status}, {} jumps -> {}", tr.jumps.len(), artifacts.trajectories[k].display());
            }
            info!(
                "plots: {} {}",
                artifacts.distance_plot.display(),
                artifacts.projection_plot.display()
            );
            Ok(if all_converged { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Audit { trajectory, scenario } => {
            let sc = Scenario::load(&scenario)?;
            let report = audit_csv(&trajectory, &sc)?;
            print!("{}", audit_json(&report)?);
            Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}
