//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use hynav::{ConvexShape, Vec3};
use rand::Rng;

/// Closest point on triangle `abc` to `p` (Voronoi-region walk).
pub fn closest_on_triangle(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> Vec3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

fn in_tetrahedron(p: &Vec3, t: [&Vec3; 4]) -> bool {
    let m = hynav::Mat3::from_columns(&[t[1] - t[0], t[2] - t[0], t[3] - t[0]]);
    let Some(inv) = m.try_inverse() else {
        return false;
    };
    let l = inv * (p - t[0]);
    let eps = 1e-12;
    l.x >= -eps && l.y >= -eps && l.z >= -eps && l.sum() <= 1.0 + eps
}

/// Whether `p` lies in the convex hull of `pts`, by testing every vertex
/// tetrahedron.
pub fn hull_contains(pts: &[Vec3], p: &Vec3) -> bool {
    let n = pts.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    if in_tetrahedron(p, [&pts[i], &pts[j], &pts[k], &pts[l]]) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Closest point of the convex hull of `pts` to an outside point `p`: the
/// minimum over every vertex triangle.
pub fn hull_closest_point(pts: &[Vec3], p: &Vec3) -> Vec3 {
    let n = pts.len();
    let mut best = pts[0];
    let mut best_d = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let q = closest_on_triangle(p, &pts[i], &pts[j], &pts[k]);
                let d = (p - q).norm();
                if d < best_d {
                    best_d = d;
                    best = q;
                }
            }
        }
    }
    best
}

pub fn hull_distance(pts: &[Vec3], p: &Vec3) -> f64 {
    if hull_contains(pts, p) {
        0.0
    } else {
        (p - hull_closest_point(pts, p)).norm()
    }
}

/// Distance from a segment to a shape by dense sampling of the segment.
pub fn sampled_segment_distance(p: &Vec3, q: &Vec3, dist: impl Fn(&Vec3) -> f64, samples: usize) -> f64 {
    (0..=samples)
        .map(|k| {
            let l = k as f64 / samples as f64;
            dist(&(p * l + q * (1.0 - l)))
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn box_distance(min: &Vec3, max: &Vec3, p: &Vec3) -> f64 {
    let mut s = 0.0;
    for k in 0..3 {
        let e = (min[k] - p[k]).max(0.0).max(p[k] - max[k]);
        s += e * e;
    }
    s.sqrt()
}

pub fn random_in_ball(rng: &mut impl Rng, center: &Vec3, radius: f64) -> Vec3 {
    loop {
        let u = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if u.norm_squared() <= 1.0 {
            return center + u * radius;
        }
    }
}

pub fn random_unit(rng: &mut impl Rng) -> Vec3 {
    loop {
        let u = random_in_ball(rng, &Vec3::zeros(), 1.0);
        if u.norm() > 1e-3 {
            return u.normalize();
        }
    }
}

/// Random non-degenerate point set around `center` with `n` points.
pub fn random_cloud(rng: &mut impl Rng, center: &Vec3, size: f64, n: usize) -> Vec<Vec3> {
    (0..n).map(|_| random_in_ball(rng, center, size)).collect()
}

/// Random polytope hull; retries until the hull builds.
pub fn random_polytope(rng: &mut impl Rng, center: &Vec3, size: f64, n: usize) -> (Vec<Vec3>, ConvexShape) {
    loop {
        let pts = random_cloud(rng, center, size, n);
        if let Ok(shape) = ConvexShape::polytope(&pts) {
            return (pts, shape);
        }
    }
}
