//! Scenario loading, batch simulation and artifact output for the `hynav`
//! command-line tool.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rayon::prelude::*;

use hynav::simulator::{self, AuditReport, AuditTolerances, HybridTrajectory};

pub mod plot;
pub mod scenario;
pub mod trajectory;

pub use scenario::Scenario;

/// Command-line overrides applied on top of a scenario's `[sim]` table.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
    pub convergence_radius: Option<f64>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, scenario: &mut Scenario) {
        let sim = &mut scenario.sim;
        sim.dt_max = self.dt.unwrap_or(sim.dt_max);
        sim.t_max = self.t_max.unwrap_or(sim.t_max);
        sim.convergence_radius = self.convergence_radius.unwrap_or(sim.convergence_radius);
        sim.seed = self.seed.unwrap_or(sim.seed);
    }
}

/// Files produced by one `run` invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub trajectories: Vec<PathBuf>,
    pub audits: Vec<PathBuf>,
    pub distance_plot: PathBuf,
    pub projection_plot: PathBuf,
}

/// Simulates every initial state of the scenario in parallel. Each run
/// gets its own seed (`seed + index`), so results do not depend on
/// scheduling.
pub fn simulate(scenario: &Scenario, sensed: bool) -> Vec<HybridTrajectory> {
    let base = scenario.sim_config(sensed);
    scenario
        .initial
        .par_iter()
        .enumerate()
        .map(|(k, xi)| {
            let sim = simulator::SimConfig {
                seed: base.seed.wrapping_add(k as u64),
                ..base
            };
            simulator::run(&scenario.world, &scenario.params, &sim, *xi)
        })
        .collect()
}

/// Tolerances used for audits of this scenario.
pub fn tolerances(scenario: &Scenario) -> AuditTolerances {
    AuditTolerances {
        neighborhood: scenario.sim.event_tolerance,
        ..AuditTolerances::default()
    }
}

pub fn audit(traj: &HybridTrajectory, scenario: &Scenario) -> AuditReport {
    simulator::audit(traj, &scenario.world, &scenario.params, &tolerances(scenario))
}

/// Writes `bytes` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("")
    ));
    {
        let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}

pub fn audit_json(report: &AuditReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)? + "\n")
}

/// Writes CSVs, audits and both plots for a finished batch.
pub fn write_artifacts(out: &Path, scenario: &Scenario, runs: &[HybridTrajectory]) -> Result<RunArtifacts> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut trajectories = Vec::new();
    let mut audits = Vec::new();
    for (k, tr) in runs.iter().enumerate() {
        let mut buf = Vec::new();
        trajectory::write_csv(&tr.samples, &mut buf)?;
        let csv_path = out.join(format!("traj_{k:03}.csv"));
        write_atomic(&csv_path, &buf)?;
        trajectories.push(csv_path);

        let json_path = out.join(format!("audit_{k:03}.json"));
        write_atomic(&json_path, audit_json(&audit(tr, scenario))?.as_bytes())?;
        audits.push(json_path);
    }
    let distance_plot = out.join("distance.svg");
    write_atomic(&distance_plot, plot::distance_svg(runs, &scenario.world).as_bytes())?;
    let projection_plot = out.join("projection.svg");
    write_atomic(&projection_plot, plot::projection_svg(runs, &scenario.world).as_bytes())?;
    Ok(RunArtifacts {
        trajectories,
        audits,
        distance_plot,
        projection_plot,
    })
}

/// Re-audits a stored trajectory CSV against its scenario.
pub fn audit_csv(csv_path: &Path, scenario: &Scenario) -> Result<AuditReport> {
    let file = fs::File::open(csv_path).with_context(|| format!("opening {}", csv_path.display()))?;
    let samples = trajectory::read_csv(file, &scenario.world)?;
    let traj = HybridTrajectory::from_samples(samples, scenario.sim.convergence_radius);
    Ok(audit(&traj, scenario))
}
