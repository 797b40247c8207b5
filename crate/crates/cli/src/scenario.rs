//! TOML scenario files.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use hynav::controller::{ControllerParams, HybridState, Mode};
use hynav::sensor::SensorConfig;
use hynav::simulator::{Pipeline, SimConfig};
use hynav::world::{FeasibilityReport, Workspace, World};
use hynav::{ConvexShape, Vec3};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub world: WorldSpec,
    pub params: ParamsSpec,
    #[serde(default)]
    pub sensor: SensorSpec,
    #[serde(default)]
    pub sim: SimSpec,
    pub initial: Vec<InitialSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldSpec {
    #[serde(default)]
    pub workspace: WorkspaceSpec,
    pub robot_radius: f64,
    pub safety_margin: f64,
    #[serde(default)]
    pub obstacles: Vec<ShapeSpec>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum WorkspaceSpec {
    #[default]
    Unbounded,
    Box { min: [f64; 3], max: [f64; 3] },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ShapeSpec {
    Sphere { center: [f64; 3], radius: f64 },
    Polytope { vertices: Vec<[f64; 3]> },
    Box { min: [f64; 3], max: [f64; 3] },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub kappa_s: f64,
    pub kappa_r: f64,
    pub gamma: f64,
    /// Defaults to `gamma / 3`.
    pub gamma_a: Option<f64>,
    /// Defaults to `2 gamma / 3`.
    pub gamma_s: Option<f64>,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensorSpec {
    pub sensing_radius: f64,
    pub angular_resolution: usize,
}

impl Default for SensorSpec {
    fn default() -> Self {
        Self {
            sensing_radius: 1.0,
            angular_resolution: 4096,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSpec {
    pub dt_max: f64,
    pub event_tolerance: f64,
    pub convergence_radius: f64,
    pub t_max: f64,
    pub record_stride: usize,
    pub witness_samples: usize,
    pub seed: u64,
}

impl Default for SimSpec {
    fn default() -> Self {
        let d = SimConfig::default();
        Self {
            dt_max: d.dt_max,
            event_tolerance: d.event_tolerance,
            convergence_radius: d.convergence_radius,
            t_max: d.t_max,
            record_stride: d.record_stride,
            witness_samples: d.witness_samples,
            seed: d.seed,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub x: [f64; 3],
    /// Defaults to `x`.
    pub h: Option<[f64; 3]>,
    #[serde(default = "default_axis")]
    pub a: [f64; 3],
    #[serde(default)]
    pub m: u8,
    #[serde(default)]
    pub s: f64,
}

fn default_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

/// A parsed scenario with every quantity converted to library types.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub world: World,
    pub params: ControllerParams,
    pub sensor: SensorConfig,
    pub sim: SimConfig,
    pub initial: Vec<HybridState>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text)?;
        file.build()
    }

    pub fn validate(&self) -> FeasibilityReport {
        let p = &self.params;
        self.world.validate(p.gamma, p.gamma_a, p.gamma_s, p.epsilon)
    }

    /// Simulation settings for the requested pipeline.
    pub fn sim_config(&self, sensed: bool) -> SimConfig {
        SimConfig {
            pipeline: if sensed { Pipeline::Sensed(self.sensor) } else { Pipeline::Exact },
            ..self.sim
        }
    }
}

fn v(a: [f64; 3]) -> Vec3 {
    Vec3::from(a)
}

impl ScenarioFile {
    pub fn build(&self) -> Result<Scenario> {
        let w = &self.world;
        let workspace = match &w.workspace {
            WorkspaceSpec::Unbounded => Workspace::Unbounded,
            WorkspaceSpec::Box { min, max } => Workspace::Box { min: v(*min), max: v(*max) },
        };
        let obstacles = w
            .obstacles
            .iter()
            .enumerate()
            .map(|(k, o)| {
                match o {
                    ShapeSpec::Sphere { center, radius } => ConvexShape::sphere(v(*center), *radius),
                    ShapeSpec::Polytope { vertices } => {
                        ConvexShape::polytope(&vertices.iter().copied().map(v).collect::<Vec<_>>())
                    }
                    ShapeSpec::Box { min, max } => ConvexShape::aabb(v(*min), v(*max)),
                }
                .with_context(|| format!("obstacle {}", k + 1))
            })
            .collect::<Result<Vec<_>>>()?;
        let world = World::new(workspace, obstacles, w.robot_radius, w.safety_margin)?;

        let p = &self.params;
        let params = ControllerParams {
            kappa_s: p.kappa_s,
            kappa_r: p.kappa_r,
            gamma: p.gamma,
            gamma_a: p.gamma_a.unwrap_or(p.gamma / 3.0),
            gamma_s: p.gamma_s.unwrap_or(2.0 * p.gamma / 3.0),
            epsilon: p.epsilon,
            r_a: world.r_a(),
        };
        if !(params.kappa_s > 0.0 && params.kappa_r > 0.0) {
            bail!("gains kappa_s and kappa_r must be positive");
        }

        let s = &self.sim;
        if !(s.dt_max > 0.0 && s.event_tolerance > 0.0 && s.convergence_radius > 0.0 && s.t_max > 0.0) {
            bail!("dt_max, event_tolerance, convergence_radius and t_max must be positive");
        }
        let sim = SimConfig {
            dt_max: s.dt_max,
            event_tolerance: s.event_tolerance,
            convergence_radius: s.convergence_radius,
            t_max: s.t_max,
            pipeline: Pipeline::Exact,
            record_stride: s.record_stride.max(1),
            witness_samples: s.witness_samples,
            seed: s.seed,
        };
        let sensor = SensorConfig::new(self.sensor.sensing_radius, self.sensor.angular_resolution);

        if self.initial.is_empty() {
            bail!("at least one [[initial]] state is required");
        }
        let initial = self
            .initial
            .iter()
            .enumerate()
            .map(|(k, i)| {
                let x = v(i.x);
                let m = Mode::from_index(i.m).with_context(|| format!("initial state {k}: mode must be 0 or 1"))?;
                let a = v(i.a);
                if (a.norm() - 1.0).abs() > 1e-6 {
                    bail!("initial state {k}: axis a must be a unit vector");
                }
                if !world.free_space_contains(world.r_a(), &x) {
                    bail!("initial state {k}: x = {x:?} is closer than r_a to an obstacle");
                }
                Ok(HybridState::initial(x, i.h.map_or(x, v), a, m, i.s))
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(Scenario {
            world,
            params,
            sensor,
            sim,
            initial,
        })
    }
}
