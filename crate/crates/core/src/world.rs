//! Workspace model: obstacles, robot radii, feasibility validation and
//! nearest-obstacle queries over the obstacle-occupied workspace.
//!
//! Obstacle index 0 is the workspace boundary (the complement of the
//! interior of a bounded workspace); indices `1..=b` are the convex
//! obstacles in the order they were given.

use serde::Serialize;

use crate::error::NavError;
use crate::geometry::{ConvexShape, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub enum Workspace {
    /// `O_0 = ∅`.
    Unbounded,
    /// Axis-aligned box; `O_0` is the complement of its interior.
    Box { min: Vec3, max: Vec3 },
}

impl Workspace {
    pub fn is_bounded(&self) -> bool {
        matches!(self, Workspace::Box { .. })
    }

    /// Distance from `x` to `O_0` (infinite when unbounded).
    pub fn boundary_distance(&self, x: &Vec3) -> f64 {
        match self {
            Workspace::Unbounded => f64::INFINITY,
            Workspace::Box { min, max } => {
                let mut d = f64::INFINITY;
                for k in 0..3 {
                    d = d.min(x[k] - min[k]).min(max[k] - x[k]);
                }
                d.max(0.0)
            }
        }
    }

    /// Closest point of `O_0` to `x`, ties going to the lowest axis and the
    /// lower face.
    pub fn boundary_projection(&self, x: &Vec3) -> Option<Vec3> {
        let Workspace::Box { min, max } = self else {
            return None;
        };
        let mut best = (f64::INFINITY, 0, 0.0);
        for k in 0..3 {
            for bound in [min[k], max[k]] {
                let d = (x[k] - bound).abs();
                let outside = x[k] <= min[k] || x[k] >= max[k];
                if outside {
                    return Some(*x);
                }
                if d < best.0 {
                    best = (d, k, bound);
                }
            }
        }
        let mut p = *x;
        p[best.1] = best.2;
        Some(p)
    }
}

/// Closest obstacle to a query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearestHit {
    /// 0 for the workspace boundary, `i ≥ 1` for obstacle `i`.
    pub obstacle_index: usize,
    pub distance: f64,
    /// Closest point on the obstacle-occupied workspace.
    pub projection: Vec3,
    /// `x − projection`.
    pub x_pi: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    /// Minimum separation between any two obstacles (infinite for fewer than two).
    pub min_pair_separation: f64,
    /// `d(0, O_W) − r`.
    pub d0: f64,
    /// `min(r̄/2 − r, d(0, O_W) − r)`.
    pub r_bar_s: f64,
    pub ok: bool,
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

/// Workspace, obstacles and robot radii. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    workspace: Workspace,
    obstacles: Vec<ConvexShape>,
    robot_radius: f64,
    safety_margin: f64,
}

impl World {
    pub fn new(
        workspace: Workspace,
        obstacles: Vec<ConvexShape>,
        robot_radius: f64,
        safety_margin: f64,
    ) -> Result<Self, NavError> {
        if !(robot_radius >= 0.0 && robot_radius.is_finite()) {
            return Err(NavError::InvalidShape(format!("robot radius {robot_radius}")));
        }
        if !(safety_margin > 0.0 && safety_margin.is_finite()) {
            return Err(NavError::InvalidShape(format!("safety margin {safety_margin}")));
        }
        if let Workspace::Box { min, max } = &workspace {
            ConvexShape::aabb(*min, *max)?;
        }
        Ok(Self {
            workspace,
            obstacles,
            robot_radius,
            safety_margin,
        })
    }

    pub fn workspace(&self) -> &Workspace {
        &self.workspace
    }

    /// Obstacles `1..=b` (slice position `i − 1`).
    pub fn obstacles(&self) -> &[ConvexShape] {
        &self.obstacles
    }

    /// Obstacle with 1-based index `i`.
    pub fn obstacle(&self, i: usize) -> Option<&ConvexShape> {
        i.checked_sub(1).and_then(|k| self.obstacles.get(k))
    }

    pub fn robot_radius(&self) -> f64 {
        self.robot_radius
    }

    pub fn safety_margin(&self) -> f64 {
        self.safety_margin
    }

    /// `r_a = r + r_s`.
    pub fn r_a(&self) -> f64 {
        self.robot_radius + self.safety_margin
    }

    /// Distance from `x` to obstacle `i` (0 = workspace boundary).
    pub fn distance_to(&self, i: usize, x: &Vec3) -> f64 {
        if i == 0 {
            self.workspace.boundary_distance(x)
        } else {
            self.obstacles[i - 1].distance(x)
        }
    }

    /// `d(x, O_W)`, infinite for an empty obstacle set.
    pub fn distance(&self, x: &Vec3) -> f64 {
        self.obstacles
            .iter()
            .map(|o| o.distance(x))
            .fold(self.workspace.boundary_distance(x), f64::min)
    }

    /// `d(x, O_W) − r_a`.
    pub fn gap(&self, x: &Vec3) -> f64 {
        self.distance(x) - self.r_a()
    }

    /// Nearest obstacle over `O_W`, ties going to the lowest index. `None`
    /// when the workspace is unbounded and there are no obstacles.
    pub fn nearest_obstacle(&self, x: &Vec3) -> Option<NearestHit> {
        let mut best: Option<(usize, f64)> = None;
        if self.workspace.is_bounded() {
            best = Some((0, self.workspace.boundary_distance(x)));
        }
        for (k, o) in self.obstacles.iter().enumerate() {
            let d = o.distance(x);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((k + 1, d));
            }
        }
        let (index, distance) = best?;
        let projection = if index == 0 {
            self.workspace
                .boundary_projection(x)
                .expect("index 0 only for bounded workspaces")
        } else {
            self.obstacles[index - 1].project(x)
        };
        Some(NearestHit {
            obstacle_index: index,
            distance,
            projection,
            x_pi: x - projection,
        })
    }

    /// `x ∈ W_y`: no obstacle closer than `y`.
    pub fn free_space_contains(&self, y: f64, x: &Vec3) -> bool {
        if self.workspace.is_bounded() && self.workspace.boundary_distance(x) < y {
            return false;
        }
        self.obstacles.iter().all(|o| o.distance(x) >= y)
    }

    /// Distance between obstacles `i` and `j` (0 = workspace boundary).
    pub fn obstacle_separation(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            (0, 0) => 0.0,
            (0, k) | (k, 0) => {
                let Workspace::Box { min, max } = &self.workspace else {
                    return f64::INFINITY;
                };
                let (lo, hi) = self.obstacles[k - 1].extent();
                let mut d = f64::INFINITY;
                for a in 0..3 {
                    d = d.min(lo[a] - min[a]).min(max[a] - hi[a]);
                }
                d.max(0.0)
            }
            (i, j) => self.obstacles[i - 1].pair_distance(&self.obstacles[j - 1]),
        }
    }

    /// Checks workspace feasibility and the parameter ranges
    /// `r_s ∈ (0, r̄_s)`, `0 < γ_a < γ_s < γ < r̄_s − r_s` and `ε > 0`.
    pub fn validate(&self, gamma: f64, gamma_a: f64, gamma_s: f64, epsilon: f64) -> FeasibilityReport {
        let r = self.robot_radius;
        let r_s = self.safety_margin;
        let first = if self.workspace.is_bounded() { 0 } else { 1 };
        let last = self.obstacles.len();
        let mut min_sep = f64::INFINITY;
        for i in first..=last {
            for j in (i + 1)..=last {
                min_sep = min_sep.min(self.obstacle_separation(i, j));
            }
        }
        let d0 = self.distance(&Vec3::zeros()) - r;
        let r_bar_s = (min_sep / 2.0 - r).min(d0);

        let mut violations = Vec::new();
        let mut warnings = Vec::new();
        if min_sep <= 2.0 * r {
            violations.push(format!(
                "Assumption 1: minimum obstacle separation {min_sep} must exceed 2r = {}",
                2.0 * r
            ));
        }
        if d0 <= 0.0 {
            violations.push(format!(
                "target clearance: d(0, O_W) - r = {d0} must be positive"
            ));
        }
        if !(r_s > 0.0 && r_s < r_bar_s) {
            violations.push(format!("safety margin r_s = {r_s} must lie in (0, {r_bar_s})"));
        }
        if !(gamma_a > 0.0 && gamma_a < gamma_s && gamma_s < gamma) {
            violations.push(format!(
                "thresholds must satisfy 0 < gamma_a ({gamma_a}) < gamma_s ({gamma_s}) < gamma ({gamma})"
            ));
        }
        if !(gamma > 0.0 && gamma < r_bar_s - r_s) {
            violations.push(format!(
                "gamma = {gamma} must lie in (0, r_bar_s - r_s) = (0, {})",
                r_bar_s - r_s
            ));
        }
        if !(epsilon > 0.0) {
            violations.push(format!("epsilon = {epsilon} must be positive"));
        }
        if gamma <= r_s {
            warnings.push(format!("gamma = {gamma} does not exceed r_s = {r_s}"));
        }
        FeasibilityReport {
            min_pair_separation: min_sep,
            d0,
            r_bar_s,
            ok: violations.is_empty(),
            violations,
            warnings,
        }
    }
}
