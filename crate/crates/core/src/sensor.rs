//! Ray-cast boundary sensing and the sensed versions of the mode-switch
//! tests.
//!
//! The sensor casts a fixed Fibonacci-sphere fan of rays from the robot
//! center and keeps the first boundary hit of each ray within the sensing
//! radius. First hits are visible by construction. Each point carries the
//! index of the obstacle it lies on, taken from the simulated ground truth.

use crate::controller::{ControllerParams, HybridState};
use crate::error::NavError;
use crate::geometry::{Segment, Vec3};
use crate::world::{Workspace, World};

/// Smallest accepted number of rays.
pub const MIN_ANGULAR_RESOLUTION: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorConfig {
    pub sensing_radius: f64,
    /// Total number of rays over the unit sphere.
    pub angular_resolution: usize,
}

impl SensorConfig {
    pub fn new(sensing_radius: f64, angular_resolution: usize) -> Self {
        Self {
            sensing_radius,
            angular_resolution,
        }
    }

    /// Problems with this configuration for the given controller parameters.
    pub fn check(&self, params: &ControllerParams) -> Vec<String> {
        let mut issues = Vec::new();
        if self.angular_resolution < MIN_ANGULAR_RESOLUTION {
            issues.push(format!(
                "angular_resolution {} is below {MIN_ANGULAR_RESOLUTION}",
                self.angular_resolution
            ));
        }
        if !(self.sensing_radius > params.r_a + params.gamma) {
            issues.push(format!(
                "sensing radius {} must exceed r_a + gamma = {}",
                self.sensing_radius,
                params.r_a + params.gamma
            ));
        }
        issues
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub point: Vec3,
    /// 0 for the workspace boundary, `i ≥ 1` for obstacle `i`.
    pub obstacle_index: usize,
}

/// Visible boundary points around a robot position.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCloud {
    pub points: Vec<BoundaryPoint>,
    pub robot_center: Vec3,
}

impl BoundaryCloud {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }
}

/// Deterministic, near-uniform unit directions (Fibonacci lattice).
pub fn fibonacci_directions(n: usize) -> Vec<Vec3> {
    let golden_angle = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden_angle * i as f64;
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

/// Ideal depth sensor over a fixed ray fan.
#[derive(Debug, Clone)]
pub struct Sensor {
    config: SensorConfig,
    directions: Vec<Vec3>,
}

impl Sensor {
    pub fn new(config: SensorConfig) -> Self {
        let directions = fibonacci_directions(config.angular_resolution);
        Self { config, directions }
    }

    pub fn config(&self) -> &SensorConfig {
        &self.config
    }

    pub fn directions(&self) -> &[Vec3] {
        &self.directions
    }

    /// Typical angle between neighbouring rays.
    pub fn angular_spacing(&self) -> f64 {
        (4.0 * std::f64::consts::PI / self.directions.len() as f64).sqrt()
    }

    /// Distance between neighbouring ray hits at the full sensing radius.
    pub fn chord_error(&self) -> f64 {
        self.config.sensing_radius * self.angular_spacing()
    }

    /// First boundary hit of every ray within the sensing radius.
    pub fn scan(&self, x: &Vec3, world: &World) -> BoundaryCloud {
        let range = self.config.sensing_radius;
        // obstacles whose bounding ball reaches the sensing ball
        let candidates: Vec<(usize, Vec3, f64)> = world
            .obstacles()
            .iter()
            .enumerate()
            .filter_map(|(k, o)| {
                let (c, rho) = o.bounding_sphere();
                ((c - x).norm() - rho <= range).then_some((k + 1, c, rho))
            })
            .collect();
        let walls = match world.workspace() {
            Workspace::Box { min, max } if world.workspace().boundary_distance(x) <= range => {
                Some((*min, *max))
            }
            _ => None,
        };

        let mut points = Vec::new();
        for dir in &self.directions {
            let mut best: Option<(f64, usize)> = None;
            if let Some((min, max)) = walls {
                if let Some(t) = wall_exit(x, dir, &min, &max) {
                    if t <= range {
                        best = Some((t, 0));
                    }
                }
            }
            for &(index, c, rho) in &candidates {
                let oc = c - x;
                let along = oc.dot(dir);
                if along < -rho || oc.norm_squared() - along * along > rho * rho {
                    continue;
                }
                let limit = best.map_or(range, |(t, _)| t);
                if let Some(t) = world.obstacles()[index - 1].ray_cast(x, dir, limit) {
                    if best.is_none_or(|(bt, _)| t < bt) {
                        best = Some((t, index));
                    }
                }
            }
            if let Some((t, index)) = best {
                points.push(BoundaryPoint {
                    point: x + dir * t,
                    obstacle_index: index,
                });
            }
        }
        BoundaryCloud {
            points,
            robot_center: *x,
        }
    }
}

/// Parameter where a ray from inside the box leaves it.
fn wall_exit(x: &Vec3, dir: &Vec3, min: &Vec3, max: &Vec3) -> Option<f64> {
    let mut t = f64::INFINITY;
    for k in 0..3 {
        if dir[k] > 0.0 {
            t = t.min((max[k] - x[k]) / dir[k]);
        } else if dir[k] < 0.0 {
            t = t.min((min[k] - x[k]) / dir[k]);
        }
    }
    t.is_finite().then_some(t.max(0.0))
}

/// Points on the obstacle that owns the closest cloud point (lowest index
/// on ties).
pub fn closest_obstacle_boundary(cloud: &BoundaryCloud) -> Result<BoundaryCloud, NavError> {
    let x = cloud.robot_center;
    let nearest = cloud
        .points
        .iter()
        .map(|p| ((p.point - x).norm(), p.obstacle_index))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .ok_or(NavError::EmptyCloud)?;
    Ok(BoundaryCloud {
        points: cloud
            .points
            .iter()
            .filter(|p| p.obstacle_index == nearest.1)
            .copied()
            .collect(),
        robot_center: x,
    })
}

/// `d(x, ∂O)` over the cloud; infinite when nothing is visible.
pub fn sensed_gap(cloud: &BoundaryCloud) -> f64 {
    cloud
        .points
        .iter()
        .map(|p| (p.point - cloud.robot_center).norm())
        .fold(f64::INFINITY, f64::min)
}

/// Whether a sensed point lies in the open `r_a`-dilation of the segment
/// from `x` to the target.
pub fn sensed_landing_test(subset: &BoundaryCloud, x: &Vec3, r_a: f64) -> bool {
    let seg = Segment::new(*x, Vec3::zeros());
    subset
        .points
        .iter()
        .any(|p| seg.distance_to_point(&p.point) < r_a)
}

/// Move-to-target jump test from a scan.
pub fn sensed_jump_0(cloud: &BoundaryCloud, params: &ControllerParams) -> bool {
    if sensed_gap(cloud) > params.r_a + params.gamma_s {
        return false;
    }
    match closest_obstacle_boundary(cloud) {
        Ok(subset) => sensed_landing_test(&subset, &cloud.robot_center, params.r_a),
        Err(_) => false,
    }
}

/// Obstacle-avoidance jump test from a scan.
pub fn sensed_jump_1(state: &HybridState, cloud: &BoundaryCloud, params: &ControllerParams) -> bool {
    if state.untouched() {
        return true;
    }
    if sensed_gap(cloud) > params.r_a + params.gamma {
        return true;
    }
    let near_wall = cloud.points.iter().any(|p| {
        p.obstacle_index == 0 && (p.point - cloud.robot_center).norm() <= params.r_a + params.gamma
    });
    if near_wall {
        return true;
    }
    let Ok(subset) = closest_obstacle_boundary(cloud) else {
        return true;
    };
    !sensed_landing_test(&subset, &state.x, params.r_a)
        && state.x.norm() <= state.h.norm() - params.epsilon
}
