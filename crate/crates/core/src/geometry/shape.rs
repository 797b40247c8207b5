use super::{Polytope, Segment, Vec3, GEOMETRY_TOLERANCE};
use crate::error::NavError;

/// Interval width (in segment parameter) at which the 1D search stops.
const SEGMENT_SEARCH_TOLERANCE: f64 = 1e-10;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// A compact convex obstacle.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexShape {
    Sphere { center: Vec3, radius: f64 },
    ConvexPolytope(Polytope),
    HalfspaceBox { min: Vec3, max: Vec3 },
}

impl ConvexShape {
    pub fn sphere(center: Vec3, radius: f64) -> Result<Self, NavError> {
        if !(radius > 0.0 && radius.is_finite()) || !center.iter().all(|c| c.is_finite()) {
            return Err(NavError::InvalidShape(format!("sphere radius {radius}")));
        }
        Ok(Self::Sphere { center, radius })
    }

    pub fn polytope(vertices: &[Vec3]) -> Result<Self, NavError> {
        Self::polytope_with_tolerance(vertices, GEOMETRY_TOLERANCE)
    }

    pub fn polytope_with_tolerance(vertices: &[Vec3], tolerance: f64) -> Result<Self, NavError> {
        Polytope::from_points(vertices, tolerance).map(Self::ConvexPolytope)
    }

    pub fn aabb(min: Vec3, max: Vec3) -> Result<Self, NavError> {
        let ok = (0..3).all(|k| min[k].is_finite() && max[k].is_finite() && min[k] < max[k]);
        if !ok {
            return Err(NavError::InvalidShape(format!(
                "box min {min:?} must be below max {max:?}"
            )));
        }
        Ok(Self::HalfspaceBox { min, max })
    }

    /// Centroid of the shape (center for spheres and boxes).
    pub fn center(&self) -> Vec3 {
        match self {
            Self::Sphere { center, .. } => *center,
            Self::ConvexPolytope(p) => p.centroid(),
            Self::HalfspaceBox { min, max } => (min + max) * 0.5,
        }
    }

    /// A ball containing the shape.
    pub fn bounding_sphere(&self) -> (Vec3, f64) {
        match self {
            Self::Sphere { center, radius } => (*center, *radius),
            Self::ConvexPolytope(p) => {
                let c = p.centroid();
                let r = p
                    .vertices()
                    .iter()
                    .map(|v| (v - c).norm())
                    .fold(0.0, f64::max);
                (c, r)
            }
            Self::HalfspaceBox { min, max } => ((min + max) * 0.5, (max - min).norm() * 0.5),
        }
    }

    /// Axis-aligned extent `(lower, upper)`.
    pub fn extent(&self) -> (Vec3, Vec3) {
        match self {
            Self::Sphere { center, radius } => {
                let r = Vec3::repeat(*radius);
                (center - r, center + r)
            }
            Self::ConvexPolytope(p) => {
                let mut lo = Vec3::repeat(f64::INFINITY);
                let mut hi = Vec3::repeat(f64::NEG_INFINITY);
                for v in p.vertices() {
                    lo = lo.inf(v);
                    hi = hi.sup(v);
                }
                (lo, hi)
            }
            Self::HalfspaceBox { min, max } => (*min, *max),
        }
    }

    pub fn contains(&self, x: &Vec3) -> bool {
        self.distance(x) == 0.0
    }

    /// Closest point of the shape to `x`; `x` itself when `x` is inside.
    pub fn project(&self, x: &Vec3) -> Vec3 {
        match self {
            Self::Sphere { center, radius } => {
                let d = x - center;
                let n = d.norm();
                if n <= *radius {
                    *x
                } else {
                    center + d * (*radius / n)
                }
            }
            Self::ConvexPolytope(p) => p.project(x),
            Self::HalfspaceBox { min, max } => x.sup(min).inf(max),
        }
    }

    pub fn distance(&self, x: &Vec3) -> f64 {
        match self {
            Self::Sphere { center, radius } => ((x - center).norm() - radius).max(0.0),
            _ => (x - self.project(x)).norm(),
        }
    }

    /// Minimum distance from the points of `seg` to the shape.
    pub fn segment_distance(&self, seg: &Segment) -> f64 {
        match self {
            Self::Sphere { center, radius } => (seg.distance_to_point(center) - radius).max(0.0),
            _ => self.segment_search(seg, None).0,
        }
    }

    /// Whether `segment_distance(seg) < threshold`, stopping the search as
    /// soon as the answer is decided.
    pub fn segment_closer_than(&self, seg: &Segment, threshold: f64) -> bool {
        match self {
            Self::Sphere { .. } => self.segment_distance(seg) < threshold,
            _ => self.segment_search(seg, Some(threshold)).0 < threshold,
        }
    }

    /// Golden-section search of the convex map `λ ↦ distance(seg.point(λ))`.
    /// Returns `(min value, argmin λ)`. With a threshold, stops once the
    /// minimum is certainly below it or certainly not below it.
    fn segment_search(&self, seg: &Segment, threshold: Option<f64>) -> (f64, f64) {
        let f = |l: f64| self.distance(&seg.point(l));
        let lipschitz = seg.length();
        let (f0, f1) = (f(0.0), f(1.0));
        let (mut best, mut arg) = if f0 <= f1 { (f0, 0.0) } else { (f1, 1.0) };
        if let Some(t) = threshold {
            if best < t {
                return (best, arg);
            }
        }
        let (mut a, mut b) = (0.0_f64, 1.0_f64);
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        while b - a > SEGMENT_SEARCH_TOLERANCE {
            if fc <= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = f(d);
            }
            let (v, l) = if fc <= fd { (fc, c) } else { (fd, d) };
            if v < best {
                best = v;
                arg = l;
            }
            if let Some(t) = threshold {
                if best < t || best - lipschitz * (b - a) >= t {
                    break;
                }
            }
        }
        (best, arg)
    }

    /// Minimum distance between two shapes; zero when they intersect.
    pub fn pair_distance(&self, other: &ConvexShape) -> f64 {
        match (self, other) {
            (Self::Sphere { center: c1, radius: r1 }, Self::Sphere { center: c2, radius: r2 }) => {
                ((c1 - c2).norm() - r1 - r2).max(0.0)
            }
            (Self::Sphere { center, radius }, s) | (s, Self::Sphere { center, radius }) => {
                (s.distance(center) - radius).max(0.0)
            }
            (a, b) => a.as_polytope().distance_to(&b.as_polytope()),
        }
    }

    /// Polytope view of a non-sphere shape.
    fn as_polytope(&self) -> Polytope {
        match self {
            Self::ConvexPolytope(p) => p.clone(),
            Self::HalfspaceBox { min, max } => {
                let mut corners = Vec::with_capacity(8);
                for k in 0..8 {
                    corners.push(Vec3::new(
                        if k & 1 == 0 { min.x } else { max.x },
                        if k & 2 == 0 { min.y } else { max.y },
                        if k & 4 == 0 { min.z } else { max.z },
                    ));
                }
                Polytope::from_points(&corners, GEOMETRY_TOLERANCE)
                    .expect("a valid box always spans a volume")
            }
            Self::Sphere { .. } => unreachable!("spheres are handled analytically"),
        }
    }

    /// Smallest `t ∈ [0, max_t]` with `origin + t·dir` on the shape, for a
    /// unit `dir`. Returns `Some(0.0)` when the origin is inside.
    pub fn ray_cast(&self, origin: &Vec3, dir: &Vec3, max_t: f64) -> Option<f64> {
        let t = match self {
            Self::Sphere { center, radius } => {
                let oc = origin - center;
                let b = oc.dot(dir);
                let c = oc.norm_squared() - radius * radius;
                if c <= 0.0 {
                    return Some(0.0);
                }
                let disc = b * b - c;
                if disc < 0.0 || b > 0.0 {
                    return None;
                }
                // numerically stable smaller root of t² + 2bt + c
                c / (-b + disc.sqrt())
            }
            Self::ConvexPolytope(p) => p.clip_line(origin, dir, 0.0, max_t)?.0,
            Self::HalfspaceBox { min, max } => {
                let (mut lo, mut hi) = (0.0_f64, max_t);
                for k in 0..3 {
                    if dir[k].abs() <= f64::EPSILON {
                        if origin[k] < min[k] || origin[k] > max[k] {
                            return None;
                        }
                        continue;
                    }
                    let t1 = (min[k] - origin[k]) / dir[k];
                    let t2 = (max[k] - origin[k]) / dir[k];
                    lo = lo.max(t1.min(t2));
                    hi = hi.min(t1.max(t2));
                    if lo > hi {
                        return None;
                    }
                }
                lo
            }
        };
        (t <= max_t).then_some(t)
    }
}
