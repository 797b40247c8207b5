//! Hybrid-time integration of the closed loop.
//!
//! Flow uses fixed-step RK4 on `x` with `(h, a, m)` frozen and `ṡ = 1`.
//! After every step the jump set of the current mode is tested; when the
//! step lands inside it, the step is bisected until the crossing is located
//! within `event_tolerance` in position. States in both the flow and jump
//! sets jump. The resulting arc is recorded over `(t, j)`.

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::controller::{self, ControllerParams, HybridState, Mode};
use crate::error::NavError;
use crate::geometry::Vec3;
use crate::sensor::{self, Sensor, SensorConfig};
use crate::world::World;

/// Longest chain of jumps allowed at a single instant before the run is
/// declared faulty. A legal arc has at most two (initial `L1`, then `L0`).
const MAX_JUMPS_PER_INSTANT: usize = 4;
const MAX_BISECTIONS: usize = 80;
const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pipeline {
    /// Membership tests on exact geometry.
    Exact,
    /// Membership tests from ray-cast boundary scans.
    Sensed(SensorConfig),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub dt_max: f64,
    pub event_tolerance: f64,
    pub convergence_radius: f64,
    pub t_max: f64,
    pub pipeline: Pipeline,
    /// Keep every `record_stride`-th flow sample (jumps and the final state
    /// are always kept).
    pub record_stride: usize,
    /// Exit-region samples per hit point for the ε-validity check.
    pub witness_samples: usize,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt_max: 1e-3,
            event_tolerance: 1e-6,
            convergence_radius: 1e-3,
            t_max: 60.0,
            pipeline: Pipeline::Exact,
            record_stride: 1,
            witness_samples: 10_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JumpKind {
    /// Move-to-target → obstacle-avoidance.
    L0,
    /// Obstacle-avoidance → move-to-target.
    L1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub j: usize,
    pub state: HybridState,
    /// Commanded velocity (NaN when the control is undefined at this state).
    pub u: Vec3,
    /// `d(x, O_W) − r_a`.
    pub gap: f64,
    pub nearest_index: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpRecord {
    pub t: f64,
    /// Jump counter before the jump.
    pub j: usize,
    pub kind: JumpKind,
    pub pre: HybridState,
    pub post: HybridState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Outcome {
    Converged { t_final: f64 },
    MaxTimeExceeded,
    Fault(String),
}

/// Result of the sampled search for an exit-region point at least `ε`
/// closer to the target than a new hit point.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonCheck {
    pub t: f64,
    pub j: usize,
    pub obstacle_index: Option<usize>,
    pub samples: usize,
    pub witness: Option<Vec3>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HybridTrajectory {
    pub samples: Vec<Sample>,
    pub jumps: Vec<JumpRecord>,
    pub outcome: Outcome,
    pub epsilon_checks: Vec<EpsilonCheck>,
}

impl HybridTrajectory {
    /// Rebuilds jumps and outcome from a recorded sample sequence (for
    /// example one read back from disk). Each increase of `j` between
    /// consecutive samples is one jump.
    pub fn from_samples(samples: Vec<Sample>, convergence_radius: f64) -> Self {
        let jumps = samples
            .windows(2)
            .filter(|w| w[1].j == w[0].j + 1)
            .map(|w| JumpRecord {
                t: w[0].t,
                j: w[0].j,
                kind: match w[0].state.m {
                    Mode::MoveToTarget => JumpKind::L0,
                    Mode::Avoidance => JumpKind::L1,
                },
                pre: w[0].state,
                post: w[1].state,
            })
            .collect();
        let outcome = match samples.last() {
            Some(s) if s.state.x.norm() <= convergence_radius => Outcome::Converged { t_final: s.t },
            _ => Outcome::MaxTimeExceeded,
        };
        Self {
            samples,
            jumps,
            outcome,
            epsilon_checks: Vec::new(),
        }
    }

    pub fn jump_times(&self) -> Vec<f64> {
        self.jumps.iter().map(|j| j.t).collect()
    }
}

/// Jump-set oracle used by the integrator.
enum Membership<'w> {
    Exact,
    Sensed { sensor: Sensor, world: &'w World },
}

impl Membership<'_> {
    fn in_jump_set(&self, state: &HybridState, world: &World, params: &ControllerParams) -> bool {
        match self {
            Membership::Exact => controller::in_jump_set(state, world, params),
            Membership::Sensed { sensor, world } => match state.m {
                Mode::MoveToTarget => {
                    let cloud = sensor.scan(&state.x, world);
                    sensor::sensed_jump_0(&cloud, params)
                }
                Mode::Avoidance => {
                    if state.untouched() {
                        return true;
                    }
                    let cloud = sensor.scan(&state.x, world);
                    sensor::sensed_jump_1(state, &cloud, params)
                }
            },
        }
    }
}

/// One RK4 step of length `dt` for `x`; `h`, `a`, `m` are unchanged and
/// `s` advances by `dt`.
pub fn flow_step(
    state: &HybridState,
    world: &World,
    params: &ControllerParams,
    dt: f64,
) -> Result<HybridState, NavError> {
    let f = |x: Vec3| controller::control(&HybridState { x, ..*state }, world, params);
    let x = state.x;
    let k1 = f(x)?;
    let k2 = f(x + k1 * (0.5 * dt))?;
    let k3 = f(x + k2 * (0.5 * dt))?;
    let k4 = f(x + k3 * dt)?;
    Ok(HybridState {
        x: x + (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0),
        s: state.s + dt,
        ..*state
    })
}

/// Locates a jump inside the step `prev → next` of length `dt`.
///
/// Returns the earliest bracketed state in the jump set together with its
/// time offset from `prev`, or `None` when `next` is not in the jump set.
pub fn detect_jump(
    prev: &HybridState,
    next: &HybridState,
    dt: f64,
    world: &World,
    params: &ControllerParams,
    event_tolerance: f64,
) -> Result<Option<(HybridState, f64)>, NavError> {
    refine_jump(prev, next, dt, world, params, event_tolerance, &Membership::Exact)
}

fn refine_jump(
    prev: &HybridState,
    next: &HybridState,
    dt: f64,
    world: &World,
    params: &ControllerParams,
    event_tolerance: f64,
    oracle: &Membership<'_>,
) -> Result<Option<(HybridState, f64)>, NavError> {
    if !oracle.in_jump_set(next, world, params) {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, dt);
    let (mut x_lo, mut st_hi) = (prev.x, *next);
    for _ in 0..MAX_BISECTIONS {
        if (st_hi.x - x_lo).norm() <= event_tolerance {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let st_mid = flow_step(prev, world, params, mid)?;
        if oracle.in_jump_set(&st_mid, world, params) {
            hi = mid;
            st_hi = st_mid;
        } else {
            lo = mid;
            x_lo = st_mid.x;
        }
    }
    Ok(Some((st_hi, hi)))
}

fn sample(t: f64, j: usize, state: HybridState, world: &World, params: &ControllerParams) -> Sample {
    let hit = world.nearest_obstacle(&state.x);
    Sample {
        t,
        j,
        state,
        u: controller::control(&state, world, params).unwrap_or(Vec3::repeat(f64::NAN)),
        gap: hit.map_or(f64::INFINITY, |h| h.distance - world.r_a()),
        nearest_index: hit.map(|h| h.obstacle_index),
    }
}

/// Samples the exit region of the obstacle engaged at hit point `h` for a
/// point at least `ε` closer to the target than `h`.
pub fn check_epsilon_witness(
    h: &Vec3,
    world: &World,
    params: &ControllerParams,
    samples: usize,
    rng: &mut impl Rng,
) -> (Option<usize>, usize, Option<Vec3>) {
    let Some(index) = world.nearest_obstacle(h).map(|hit| hit.obstacle_index) else {
        return (None, 0, None);
    };
    let Some(obstacle) = world.obstacle(index) else {
        // workspace boundary: avoidance never runs there
        return (Some(index), 0, None);
    };
    let (c, rho) = obstacle.bounding_sphere();
    let outer = rho + params.r_a + params.gamma;
    let target = h.norm() - params.epsilon;
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < samples && attempts < samples * 50 {
        attempts += 1;
        let u = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if u.norm_squared() > 1.0 {
            continue;
        }
        let y = c + u * outer;
        let d = obstacle.distance(&y);
        if d < params.r_a || d > params.r_a + params.gamma {
            continue;
        }
        accepted += 1;
        if y.norm() <= target && controller::in_exit_region(&y, world, params) {
            return (Some(index), accepted, Some(y));
        }
    }
    (Some(index), accepted, None)
}

/// Simulates the closed loop from `initial` until convergence, timeout or
/// a fault.
pub fn run(world: &World, params: &ControllerParams, sim: &SimConfig, initial: HybridState) -> HybridTrajectory {
    let oracle = match sim.pipeline {
        Pipeline::Exact => Membership::Exact,
        Pipeline::Sensed(cfg) => Membership::Sensed {
            sensor: Sensor::new(cfg),
            world,
        },
    };
    let mut rng = ChaCha8Rng::seed_from_u64(sim.seed);
    let stride = sim.record_stride.max(1);

    let mut samples = vec![sample(0.0, 0, initial, world, params)];
    let mut jumps = Vec::new();
    let mut epsilon_checks = Vec::new();
    let mut state = initial;
    let mut t = 0.0;
    let mut j = 0;
    let mut steps: usize = 0;

    let outcome = 'run: loop {
        let mut chained = 0;
        while oracle.in_jump_set(&state, world, params) {
            chained += 1;
            if chained > MAX_JUMPS_PER_INSTANT {
                break 'run Outcome::Fault(format!("jump chain at t = {t} did not settle"));
            }
            let post = match controller::jump_update(&state, world) {
                Ok(p) => p,
                Err(e) => break 'run Outcome::Fault(e.to_string()),
            };
            let kind = match state.m {
                Mode::MoveToTarget => JumpKind::L0,
                Mode::Avoidance => JumpKind::L1,
            };
            if kind == JumpKind::L0 && sim.witness_samples > 0 {
                let (obstacle_index, n, witness) =
                    check_epsilon_witness(&post.h, world, params, sim.witness_samples, &mut rng);
                if witness.is_none() {
                    warn!(
                        "no exit-region point {} closer than hit point {:?} found in {n} samples",
                        params.epsilon, post.h
                    );
                }
                epsilon_checks.push(EpsilonCheck {
                    t,
                    j,
                    obstacle_index,
                    samples: n,
                    witness,
                });
            }
            jumps.push(JumpRecord {
                t,
                j,
                kind,
                pre: state,
                post,
            });
            j += 1;
            state = post;
            samples.push(sample(t, j, state, world, params));
        }

        if state.x.norm() <= sim.convergence_radius {
            break Outcome::Converged { t_final: t };
        }
        if t >= sim.t_max {
            break Outcome::MaxTimeExceeded;
        }

        let dt = sim.dt_max;
        let next = match flow_step(&state, world, params, dt) {
            Ok(n) => n,
            Err(e) => break Outcome::Fault(e.to_string()),
        };
        let refined = match refine_jump(&state, &next, dt, world, params, sim.event_tolerance, &oracle) {
            Ok(r) => r,
            Err(e) => break Outcome::Fault(e.to_string()),
        };
        steps += 1;
        let keep = match refined {
            Some((hit, tau)) => {
                state = hit;
                t += tau;
                true
            }
            None => {
                state = next;
                t += dt;
                steps.is_multiple_of(stride) || state.x.norm() <= sim.convergence_radius || t >= sim.t_max
            }
        };
        let gap = world.gap(&state.x);
        if keep || gap < 0.0 {
            samples.push(sample(t, j, state, world, params));
        }
        if gap < 0.0 {
            break Outcome::Fault(format!("safety violated at t = {t}: gap {gap}"));
        }
    };

    let last = samples.last().expect("initial sample is always recorded");
    if last.t != t || last.j != j || last.state != state {
        samples.push(sample(t, j, state, world, params));
    }
    HybridTrajectory {
        samples,
        jumps,
        outcome,
        epsilon_checks,
    }
}

/// Thresholds used by [`audit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditTolerances {
    /// Lowest admissible gap to the `r_a`-dilated obstacles.
    pub min_gap: f64,
    /// Largest admissible `|aᵀ(x − h)|` during avoidance.
    pub hyperplane: f64,
    /// Slack on the `ε` decrease between consecutive hit points.
    pub progress: f64,
    /// Slack on the γ-band during avoidance.
    pub neighborhood: f64,
}

impl Default for AuditTolerances {
    fn default() -> Self {
        Self {
            min_gap: 0.0,
            hyperplane: 1e-4,
            progress: 1e-6,
            neighborhood: 1e-6,
        }
    }
}

/// Property checks over a finished trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub samples: usize,
    pub jumps: usize,
    pub l0_jumps: usize,
    pub l1_jumps: usize,
    /// Minimum of `d(x, O_W) − r_a` over all samples.
    pub min_gap: f64,
    pub safe: bool,
    /// Maximum `|aᵀ(x − h)|` over avoidance samples after the first `L0`.
    pub max_hyperplane_residual: f64,
    pub hyperplane_confined: bool,
    /// Avoidance-mode gap range after the first `L0`.
    pub avoidance_gap_min: f64,
    pub avoidance_gap_max: f64,
    pub neighborhood_confined: bool,
    /// `‖h‖` at each `L0` jump.
    pub hit_point_norms: Vec<f64>,
    /// Smallest `‖h_k‖ − ‖h_{k+1}‖`.
    pub min_hit_point_decrease: Option<f64>,
    pub progress: bool,
    pub alternating: bool,
    pub move_to_target_monotone: bool,
    pub converged: bool,
    pub pass: bool,
}

pub fn audit(traj: &HybridTrajectory, world: &World, params: &ControllerParams, tol: &AuditTolerances) -> AuditReport {
    let min_gap = traj
        .samples
        .iter()
        .map(|s| world.gap(&s.state.x))
        .fold(f64::INFINITY, f64::min);

    let first_l0 = traj
        .jumps
        .iter()
        .find(|jr| jr.kind == JumpKind::L0)
        .map(|jr| jr.j + 1);
    let avoiding = traj
        .samples
        .iter()
        .filter(|s| s.state.m == Mode::Avoidance && first_l0.is_some_and(|j0| s.j >= j0));
    let mut residual: f64 = 0.0;
    let (mut gmin, mut gmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in avoiding {
        residual = residual.max(s.state.a.dot(&(s.state.x - s.state.h)).abs());
        let g = world.gap(&s.state.x);
        gmin = gmin.min(g);
        gmax = gmax.max(g);
    }
    let neighborhood_confined = gmin == f64::INFINITY || (gmin >= 0.0 && gmax <= params.gamma + tol.neighborhood);

    let kinds: Vec<JumpKind> = traj.jumps.iter().map(|jr| jr.kind).collect();
    let rest = match kinds.first() {
        Some(JumpKind::L1) => &kinds[1..],
        _ => &kinds[..],
    };
    let alternating = rest.iter().enumerate().all(|(k, kind)| {
        *kind == if k % 2 == 0 { JumpKind::L0 } else { JumpKind::L1 }
    });

    let hit_point_norms: Vec<f64> = traj
        .jumps
        .iter()
        .filter(|jr| jr.kind == JumpKind::L0)
        .map(|jr| jr.post.h.norm())
        .collect();
    let min_hit_point_decrease = hit_point_norms
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.min(d))));
    let progress = min_hit_point_decrease.is_none_or(|d| d >= params.epsilon - tol.progress);

    let move_to_target_monotone = traj.samples.windows(2).all(|w| {
        let same_arc = w[0].j == w[1].j && w[0].state.m == Mode::MoveToTarget;
        !same_arc || w[1].state.x.norm() <= w[0].state.x.norm() + MONOTONE_SLACK
    });

    let l0_jumps = kinds.iter().filter(|k| **k == JumpKind::L0).count();
    let converged = matches!(traj.outcome, Outcome::Converged { .. });
    let safe = min_gap >= tol.min_gap;
    let hyperplane_confined = residual <= tol.hyperplane;
    let pass = safe
        && hyperplane_confined
        && neighborhood_confined
        && progress
        && alternating
        && move_to_target_monotone
        && converged;
    AuditReport {
        samples: traj.samples.len(),
        jumps: kinds.len(),
        l0_jumps,
        l1_jumps: kinds.len() - l0_jumps,
        min_gap,
        safe,
        max_hyperplane_residual: residual,
        hyperplane_confined,
        avoidance_gap_min: gmin,
        avoidance_gap_max: gmax,
        neighborhood_confined,
        hit_point_norms,
        min_hit_point_decrease,
        progress,
        alternating,
        move_to_target_monotone,
        converged,
        pass,
    }
}
