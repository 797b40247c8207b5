//! Convex geometry kernel.
//!
//! Vectors and matrices are `nalgebra` values. Shapes are restricted to
//! spheres, convex polytopes and axis-aligned boxes; every query here is
//! closed-form or a finite feature enumeration, except the segment distance
//! to a polytope, which is a one-dimensional convex minimization.

mod polytope;
mod shape;

pub use polytope::{Face, Polytope};
pub use shape::ConvexShape;

use crate::error::NavError;

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;

/// Default absolute tolerance for geometric predicates.
pub const GEOMETRY_TOLERANCE: f64 = 1e-9;

/// Maximum accepted deviation of `‖a‖` from one for rotation axes.
pub const UNIT_AXIS_TOLERANCE: f64 = 1e-6;

/// Closed line segment between `p` and `q`. A degenerate segment (`p == q`)
/// behaves as a single point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub p: Vec3,
    pub q: Vec3,
}

impl Segment {
    pub fn new(p: Vec3, q: Vec3) -> Self {
        Self { p, q }
    }

    /// The point `λp + (1 − λ)q`.
    pub fn point(&self, lambda: f64) -> Vec3 {
        self.p * lambda + self.q * (1.0 - lambda)
    }

    pub fn length(&self) -> f64 {
        (self.q - self.p).norm()
    }

    /// Closest point of the segment to `x`.
    pub fn closest_point(&self, x: &Vec3) -> Vec3 {
        let d = self.q - self.p;
        let len2 = d.norm_squared();
        if len2 <= f64::MIN_POSITIVE {
            return self.p;
        }
        let t = ((x - self.p).dot(&d) / len2).clamp(0.0, 1.0);
        self.p + d * t
    }

    pub fn distance_to_point(&self, x: &Vec3) -> f64 {
        (x - self.closest_point(x)).norm()
    }

    /// Closest pair of points between two segments, `(on self, on other)`.
    pub fn closest_points(&self, other: &Segment) -> (Vec3, Vec3) {
        let d1 = self.q - self.p;
        let d2 = other.q - other.p;
        let r = self.p - other.p;
        let a = d1.norm_squared();
        let e = d2.norm_squared();
        let f = d2.dot(&r);
        let eps = f64::MIN_POSITIVE;

        let (s, t) = if a <= eps && e <= eps {
            (0.0, 0.0)
        } else if a <= eps {
            (0.0, (f / e).clamp(0.0, 1.0))
        } else {
            let c = d1.dot(&r);
            if e <= eps {
                ((-c / a).clamp(0.0, 1.0), 0.0)
            } else {
                let b = d1.dot(&d2);
                let denom = a * e - b * b;
                let mut s = if denom > 1e-14 * a * e {
                    ((b * f - c * e) / denom).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                let mut t = (b * s + f) / e;
                if t < 0.0 {
                    t = 0.0;
                    s = (-c / a).clamp(0.0, 1.0);
                } else if t > 1.0 {
                    t = 1.0;
                    s = ((b - c) / a).clamp(0.0, 1.0);
                }
                (s, t)
            }
        };
        (self.p + d1 * s, other.p + d2 * t)
    }

    pub fn distance_to_segment(&self, other: &Segment) -> f64 {
        let (a, b) = self.closest_points(other);
        (a - b).norm()
    }
}

/// Skew-symmetric matrix with `skew(v) * w == v × w`.
pub fn skew(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Rotation by π/2 about the unit axis `a`: `aaᵀ + skew(a)`.
pub fn rotation_about(a: &Vec3) -> Result<Mat3, NavError> {
    let n = a.norm();
    if (n - 1.0).abs() > UNIT_AXIS_TOLERANCE || !n.is_finite() {
        return Err(NavError::NonUnitAxis(n));
    }
    Ok(a * a.transpose() + skew(a))
}

/// Orthogonal projector onto the plane normal to `a`: `I − aaᵀ/‖a‖²`.
pub fn tangent_projector(a: &Vec3) -> Result<Mat3, NavError> {
    let n2 = a.norm_squared();
    if n2.sqrt() <= GEOMETRY_TOLERANCE || !n2.is_finite() {
        return Err(NavError::ZeroAxis);
    }
    Ok(Mat3::identity() - a * a.transpose() / n2)
}
