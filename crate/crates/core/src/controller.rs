//! Hybrid control law: velocity command, avoidance field, flow/jump set
//! membership and the jump update laws.
//!
//! All membership tests use non-strict distance comparisons so the closed
//! flow and jump sets contain their boundaries. When a state belongs to both
//! sets the simulator jumps.

use serde::{Deserialize, Serialize};

use crate::error::NavError;
use crate::geometry::{rotation_about, tangent_projector, Mat3, Segment, Vec3, GEOMETRY_TOLERANCE};
use crate::world::World;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    MoveToTarget,
    Avoidance,
}

impl Mode {
    pub fn index(self) -> u8 {
        match self {
            Mode::MoveToTarget => 0,
            Mode::Avoidance => 1,
        }
    }

    pub fn from_index(m: u8) -> Option<Self> {
        match m {
            0 => Some(Mode::MoveToTarget),
            1 => Some(Mode::Avoidance),
            _ => None,
        }
    }
}

/// Full controller state `ξ = (x, h, a, m, s)` plus the initial timer value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridState {
    /// Robot center.
    pub x: Vec3,
    /// Hit point.
    pub h: Vec3,
    /// Unit normal of the avoidance plane.
    pub a: Vec3,
    pub m: Mode,
    /// Timer: grows with flow time and by one at every jump.
    pub s: f64,
    /// Value of `s` at hybrid time (0, 0).
    pub s0: f64,
}

impl HybridState {
    /// Initial state with `s = s0`.
    pub fn initial(x: Vec3, h: Vec3, a: Vec3, m: Mode, s0: f64) -> Self {
        Self { x, h, a, m, s: s0, s0 }
    }

    /// Whether no flow or jump has happened yet.
    pub fn untouched(&self) -> bool {
        self.s == self.s0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerParams {
    pub kappa_s: f64,
    pub kappa_r: f64,
    pub gamma: f64,
    pub gamma_a: f64,
    pub gamma_s: f64,
    pub epsilon: f64,
    /// `r + r_s`.
    pub r_a: f64,
}

impl ControllerParams {
    /// Parameters with `γ_a = γ/3` and `γ_s = 2γ/3`.
    pub fn with_default_thresholds(kappa_s: f64, kappa_r: f64, gamma: f64, epsilon: f64, r_a: f64) -> Self {
        Self {
            kappa_s,
            kappa_r,
            gamma,
            gamma_a: gamma / 3.0,
            gamma_s: 2.0 * gamma / 3.0,
            epsilon,
            r_a,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.kappa_s > 0.0
            && self.kappa_r > 0.0
            && self.gamma_a > 0.0
            && self.gamma_a < self.gamma_s
            && self.gamma_s < self.gamma
            && self.epsilon > 0.0
            && self.r_a > 0.0
    }
}

/// Blend factor in `[−1, 1]`: 1 (push out) within `γ_a` of the dilated
/// obstacle, −1 (pull in) beyond `γ_s`, linear in between.
pub fn eta(d_surface: f64, params: &ControllerParams) -> f64 {
    eta_of_gap(d_surface - params.r_a, params)
}

/// [`eta`] expressed in terms of the gap `g = d(x, O_W) − r_a`.
pub fn eta_of_gap(g: f64, params: &ControllerParams) -> f64 {
    if g >= params.gamma_s {
        -1.0
    } else if g <= params.gamma_a {
        1.0
    } else {
        1.0 - (g - params.gamma_a) / (0.5 * (params.gamma_s - params.gamma_a))
    }
}

/// `[ηI + (1 − |η|)R(a)] P(a) x_π`, lying in the plane orthogonal to `a`.
pub fn avoidance_field(x: &Vec3, a: &Vec3, world: &World, params: &ControllerParams) -> Result<Vec3, NavError> {
    let hit = world
        .nearest_obstacle(x)
        .ok_or(NavError::DegenerateProjection(f64::INFINITY))?;
    let norm = hit.x_pi.norm();
    if norm < GEOMETRY_TOLERANCE {
        return Err(NavError::DegenerateProjection(norm));
    }
    let e = eta(hit.distance, params);
    let blend = Mat3::identity() * e + rotation_about(a)? * (1.0 - e.abs());
    Ok(blend * (tangent_projector(a)? * hit.x_pi))
}

/// Velocity command `u(ξ) = −κ_s(1 − m)x + κ_r m v(x, a)`.
pub fn control(state: &HybridState, world: &World, params: &ControllerParams) -> Result<Vec3, NavError> {
    match state.m {
        Mode::MoveToTarget => Ok(-params.kappa_s * state.x),
        Mode::Avoidance => Ok(params.kappa_r * avoidance_field(&state.x, &state.a, world, params)?),
    }
}

/// Some obstacle has `x` in its γ-band around the `r_a` dilation while the
/// segment from `x` to the target pierces the open dilation.
pub fn in_landing_region(x: &Vec3, world: &World, params: &ControllerParams) -> bool {
    // The workspace boundary never qualifies: the eroded workspace is convex
    // and contains the target, so the segment stays clear of it.
    let seg = Segment::new(*x, Vec3::zeros());
    world.obstacles().iter().any(|o| {
        let d = o.distance(x);
        d >= params.r_a && d <= params.r_a + params.gamma && o.segment_closer_than(&seg, params.r_a)
    })
}

fn in_neighborhood(gap: f64, params: &ControllerParams) -> bool {
    (0.0..=params.gamma).contains(&gap)
}

/// γ-band around the dilated obstacles, minus the landing region.
pub fn in_exit_region(x: &Vec3, world: &World, params: &ControllerParams) -> bool {
    in_neighborhood(world.gap(x), params) && !in_landing_region(x, world, params)
}

pub fn in_jump_set_0(x: &Vec3, world: &World, params: &ControllerParams) -> bool {
    world.gap(x) <= params.gamma_s && in_landing_region(x, world, params)
}

pub fn in_flow_set_0(x: &Vec3, world: &World, params: &ControllerParams) -> bool {
    world.gap(x) >= params.gamma_s || in_exit_region(x, world, params)
}

fn near_workspace_boundary(x: &Vec3, world: &World, params: &ControllerParams) -> bool {
    world.workspace().is_bounded()
        && world.workspace().boundary_distance(x) - params.r_a <= params.gamma
}

/// In the exit region and at least `ε` closer to the target than the hit point.
fn exit_with_progress(state: &HybridState, world: &World, params: &ControllerParams) -> bool {
    state.h.norm() - state.x.norm() >= params.epsilon && in_exit_region(&state.x, world, params)
}

pub fn in_jump_set_1(state: &HybridState, world: &World, params: &ControllerParams) -> bool {
    state.untouched()
        || world.gap(&state.x) >= params.gamma
        || near_workspace_boundary(&state.x, world, params)
        || exit_with_progress(state, world, params)
}

pub fn in_flow_set_1(state: &HybridState, world: &World, params: &ControllerParams) -> bool {
    !state.untouched()
        && world.gap(&state.x) <= params.gamma
        && !near_workspace_boundary(&state.x, world, params)
        && !exit_with_progress(state, world, params)
}

/// Flow set membership for the state's own mode.
pub fn in_flow_set(state: &HybridState, world: &World, params: &ControllerParams) -> bool {
    match state.m {
        Mode::MoveToTarget => in_flow_set_0(&state.x, world, params),
        Mode::Avoidance => in_flow_set_1(state, world, params),
    }
}

/// Jump set membership for the state's own mode.
pub fn in_jump_set(state: &HybridState, world: &World, params: &ControllerParams) -> bool {
    match state.m {
        Mode::MoveToTarget => in_jump_set_0(&state.x, world, params),
        Mode::Avoidance => in_jump_set_1(state, world, params),
    }
}

/// Unit vector orthogonal to `x`: the normalized `x × x_π` when defined,
/// otherwise the first canonical axis with a usable component orthogonal to `x`.
pub fn choose_axis(x: &Vec3, world: &World) -> Result<Vec3, NavError> {
    if x.norm() < GEOMETRY_TOLERANCE {
        return Err(NavError::ZeroState);
    }
    if let Some(hit) = world.nearest_obstacle(x) {
        let c = x.cross(&hit.x_pi);
        if c.norm() >= GEOMETRY_TOLERANCE {
            return Ok(c.normalize());
        }
    }
    Ok(fallback_axis(x))
}

fn fallback_axis(x: &Vec3) -> Vec3 {
    let xh = x.normalize();
    for k in 0..3 {
        let e = Vec3::ith(k, 1.0);
        let w = e - xh * e.dot(&xh);
        // some axis always keeps at least sqrt(2/3) after removing x
        if w.norm() >= 0.5 {
            return w.normalize();
        }
    }
    unreachable!("an orthogonal canonical component always exists")
}

/// Applies `L_0` (mode 0) or `L_1` (mode 1). `x` never changes.
pub fn jump_update(state: &HybridState, world: &World) -> Result<HybridState, NavError> {
    let mut next = *state;
    next.s = state.s + 1.0;
    match state.m {
        Mode::MoveToTarget => {
            next.h = state.x;
            next.a = choose_axis(&state.x, world)?;
            next.m = Mode::Avoidance;
        }
        Mode::Avoidance => {
            next.m = Mode::MoveToTarget;
        }
    }
    Ok(next)
}
