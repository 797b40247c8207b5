use super::{Segment, Vec3};
use crate::error::NavError;

/// A planar face of a polytope with outward unit normal. Points `y` of the
/// polytope satisfy `normal · y <= offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub normal: Vec3,
    pub offset: f64,
    /// Indices into [`Polytope::vertices`], counter-clockwise seen from outside.
    pub vertices: Vec<usize>,
}

/// Convex polytope stored as its own hull: vertex list, faces and edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    vertices: Vec<Vec3>,
    faces: Vec<Face>,
    edges: Vec<(usize, usize)>,
    centroid: Vec3,
}

impl Polytope {
    /// Builds the convex hull of `points`. Interior points, points strictly
    /// inside faces or edges and duplicates are dropped.
    pub fn from_points(points: &[Vec3], tolerance: f64) -> Result<Self, NavError> {
        if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(NavError::InvalidShape("non-finite polytope vertex".into()));
        }
        let mut pts: Vec<Vec3> = Vec::with_capacity(points.len());
        for p in points {
            if !pts.iter().any(|q| (q - p).norm() <= tolerance) {
                pts.push(*p);
            }
        }
        if pts.len() < 4 {
            return Err(NavError::InvalidShape(
                "polytope needs at least 4 distinct vertices".into(),
            ));
        }
        let scale = pts
            .iter()
            .map(|p| (p - pts[0]).norm())
            .fold(1.0_f64, f64::max);
        let tol = tolerance * scale;
        if !spans_volume(&pts, tol) {
            return Err(NavError::InvalidShape(
                "polytope vertices are not affinely independent".into(),
            ));
        }

        let planes = hull_planes(&pts, tol);
        let mut used = vec![usize::MAX; pts.len()];
        let mut vertices = Vec::new();
        let mut faces = Vec::with_capacity(planes.len());
        for (normal, offset) in planes {
            let on_plane: Vec<usize> = (0..pts.len())
                .filter(|&k| (normal.dot(&pts[k]) - offset).abs() <= tol)
                .collect();
            let ring = convex_ring(&pts, &on_plane, &normal, tol);
            let ring = ring
                .into_iter()
                .map(|k| {
                    if used[k] == usize::MAX {
                        used[k] = vertices.len();
                        vertices.push(pts[k]);
                    }
                    used[k]
                })
                .collect();
            faces.push(Face {
                normal,
                offset,
                vertices: ring,
            });
        }

        let mut edges = Vec::new();
        for f in &faces {
            let n = f.vertices.len();
            for k in 0..n {
                let (a, b) = (f.vertices[k], f.vertices[(k + 1) % n]);
                let e = (a.min(b), a.max(b));
                if !edges.contains(&e) {
                    edges.push(e);
                }
            }
        }
        let centroid = vertices.iter().sum::<Vec3>() / vertices.len() as f64;
        Ok(Self {
            vertices,
            faces,
            edges,
            centroid,
        })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        self.edges
            .iter()
            .map(|&(a, b)| Segment::new(self.vertices[a], self.vertices[b]))
    }

    pub fn centroid(&self) -> Vec3 {
        self.centroid
    }

    pub fn contains(&self, x: &Vec3, tol: f64) -> bool {
        self.faces.iter().all(|f| f.normal.dot(x) - f.offset <= tol)
    }

    /// Closest point of the polytope to `x` (`x` itself when inside).
    pub fn project(&self, x: &Vec3) -> Vec3 {
        let mut best = *x;
        let mut best_d2 = f64::INFINITY;
        let mut outside = false;
        for f in &self.faces {
            if f.normal.dot(x) - f.offset <= 0.0 {
                continue;
            }
            outside = true;
            let p = self.closest_on_face(f, x);
            let d2 = (x - p).norm_squared();
            if d2 < best_d2 {
                best_d2 = d2;
                best = p;
            }
        }
        if outside {
            best
        } else {
            *x
        }
    }

    fn closest_on_face(&self, f: &Face, x: &Vec3) -> Vec3 {
        let q = x - f.normal * (f.normal.dot(x) - f.offset);
        let n = f.vertices.len();
        let inside = (0..n).all(|k| {
            let a = self.vertices[f.vertices[k]];
            let b = self.vertices[f.vertices[(k + 1) % n]];
            (b - a).cross(&(q - a)).dot(&f.normal) >= 0.0
        });
        if inside {
            return q;
        }
        let mut best = q;
        let mut best_d2 = f64::INFINITY;
        for k in 0..n {
            let seg = Segment::new(
                self.vertices[f.vertices[k]],
                self.vertices[f.vertices[(k + 1) % n]],
            );
            let p = seg.closest_point(x);
            let d2 = (x - p).norm_squared();
            if d2 < best_d2 {
                best_d2 = d2;
                best = p;
            }
        }
        best
    }

    /// Parameter interval `[t_in, t_out]` of `origin + t·dir` inside the
    /// polytope, clipped to `[t_min, t_max]`.
    pub fn clip_line(&self, origin: &Vec3, dir: &Vec3, t_min: f64, t_max: f64) -> Option<(f64, f64)> {
        let (mut lo, mut hi) = (t_min, t_max);
        for f in &self.faces {
            let denom = f.normal.dot(dir);
            let num = f.offset - f.normal.dot(origin);
            if denom.abs() <= f64::EPSILON * dir.norm() {
                if num < 0.0 {
                    return None;
                }
                continue;
            }
            let t = num / denom;
            if denom < 0.0 {
                lo = lo.max(t);
            } else {
                hi = hi.min(t);
            }
            if lo > hi {
                return None;
            }
        }
        Some((lo, hi))
    }

    pub fn intersects_segment(&self, seg: &Segment) -> bool {
        self.clip_line(&seg.p, &(seg.q - seg.p), 0.0, 1.0).is_some()
    }

    /// Exact distance between two polytopes.
    pub fn distance_to(&self, other: &Polytope) -> f64 {
        let touching = self.edges().any(|e| other.intersects_segment(&e))
            || other.edges().any(|e| self.intersects_segment(&e));
        if touching {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for v in &self.vertices {
            best = best.min((v - other.project(v)).norm());
        }
        for v in &other.vertices {
            best = best.min((v - self.project(v)).norm());
        }
        for e in self.edges() {
            for g in other.edges() {
                best = best.min(e.distance_to_segment(&g));
            }
        }
        best
    }
}

fn spans_volume(pts: &[Vec3], tol: f64) -> bool {
    let p0 = pts[0];
    let Some(p1) = pts.iter().skip(1).max_by(|a, b| {
        (*a - p0).norm().total_cmp(&(*b - p0).norm())
    }) else {
        return false;
    };
    let axis = p1 - p0;
    if axis.norm() <= tol {
        return false;
    }
    let Some(p2) = pts.iter().max_by(|a, b| {
        axis.cross(&(*a - p0)).norm().total_cmp(&axis.cross(&(*b - p0)).norm())
    }) else {
        return false;
    };
    let normal = axis.cross(&(p2 - p0));
    if normal.norm() <= tol * axis.norm() {
        return false;
    }
    let normal = normal.normalize();
    pts.iter().any(|p| normal.dot(&(p - p0)).abs() > tol)
}

/// Supporting planes through at least three points, deduplicated. O(n⁴),
/// which is fine for hand-specified obstacles.
fn hull_planes(pts: &[Vec3], tol: f64) -> Vec<(Vec3, f64)> {
    let n = pts.len();
    let mut planes: Vec<(Vec3, f64)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let raw = (pts[j] - pts[i]).cross(&(pts[k] - pts[i]));
                let len = raw.norm();
                if len <= tol * (pts[j] - pts[i]).norm().max(1.0) {
                    continue;
                }
                let normal = raw / len;
                let offset = normal.dot(&pts[i]);
                let (mut above, mut below) = (false, false);
                for p in pts {
                    let s = normal.dot(p) - offset;
                    above |= s > tol;
                    below |= s < -tol;
                    if above && below {
                        break;
                    }
                }
                let candidate = match (above, below) {
                    (false, true) => (normal, offset),
                    (true, false) => (-normal, -offset),
                    _ => continue,
                };
                let dup = planes.iter().any(|(m, d)| {
                    (m - candidate.0).norm() <= 1e-7 && (d - candidate.1).abs() <= tol.max(1e-9)
                });
                if !dup {
                    planes.push(candidate);
                }
            }
        }
    }
    planes
}

/// Orders the coplanar points of a face counter-clockwise about `normal` and
/// drops points that lie on the polygon's edges.
fn convex_ring(pts: &[Vec3], idx: &[usize], normal: &Vec3, tol: f64) -> Vec<usize> {
    let center = idx.iter().map(|&k| pts[k]).sum::<Vec3>() / idx.len() as f64;
    let u = (pts[idx[0]] - center).normalize();
    let w = normal.cross(&u);
    let mut ring: Vec<(f64, usize)> = idx
        .iter()
        .map(|&k| {
            let d = pts[k] - center;
            (d.dot(&w).atan2(d.dot(&u)), k)
        })
        .collect();
    ring.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut ring: Vec<usize> = ring.into_iter().map(|(_, k)| k).collect();

    // remove collinear (non-vertex) points until stable
    loop {
        let n = ring.len();
        if n <= 3 {
            break;
        }
        let drop = (0..n).find(|&k| {
            let a = pts[ring[(k + n - 1) % n]];
            let b = pts[ring[k]];
            let c = pts[ring[(k + 1) % n]];
            (b - a).cross(&(c - b)).dot(normal) <= tol * (c - a).norm().max(1.0)
        });
        match drop {
            Some(k) => {
                ring.remove(k);
            }
            None => break,
        }
    }
    ring
}
