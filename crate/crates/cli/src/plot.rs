//! Minimal SVG plots: obstacle distance over time and an orthographic view
//! of the trajectories.

use std::fmt::Write;

use hynav::controller::Mode;
use hynav::geometry::ConvexShape;
use hynav::simulator::HybridTrajectory;
use hynav::world::World;
use hynav::Vec3;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(points: impl Iterator<Item = (f64, f64)>) -> Self {
        let mut f = Frame {
            x0: f64::INFINITY,
            x1: f64::NEG_INFINITY,
            y0: f64::INFINITY,
            y1: f64::NEG_INFINITY,
        };
        for (x, y) in points.filter(|(x, y)| x.is_finite() && y.is_finite()) {
            f.x0 = f.x0.min(x);
            f.x1 = f.x1.max(x);
            f.y0 = f.y0.min(y);
            f.y1 = f.y1.max(y);
        }
        if f.x0 > f.x1 {
            (f.x0, f.x1, f.y0, f.y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if f.x1 - f.x0 < 1e-9 {
            f.x1 = f.x0 + 1.0;
        }
        if f.y1 - f.y0 < 1e-9 {
            f.y1 = f.y0 + 1.0;
        }
        f
    }

    fn equal_aspect(mut self) -> Self {
        let sx = (self.x1 - self.x0) / (WIDTH - 2.0 * MARGIN);
        let sy = (self.y1 - self.y0) / (HEIGHT - 2.0 * MARGIN);
        let s = sx.max(sy);
        let (cx, cy) = (0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1));
        let (hw, hh) = (0.5 * s * (WIDTH - 2.0 * MARGIN), 0.5 * s * (HEIGHT - 2.0 * MARGIN));
        (self.x0, self.x1, self.y0, self.y1) = (cx - hw, cx + hw, cy - hh, cy + hh);
        self
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        (
            MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN),
            HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN),
        )
    }

    fn scale(&self) -> f64 {
        (WIDTH - 2.0 * MARGIN) / (self.x1 - self.x0)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle">{title}</text>"#, WIDTH / 2.0);
}

fn axes(out: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let (l, b) = f.px(f.x0, f.y0);
    let (r, t) = f.px(f.x1, f.y1);
    let _ = writeln!(
        out,
        r#"<rect x="{l:.2}" y="{t:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        r - l,
        b - t
    );
    for k in 0..=4 {
        let fx = f.x0 + (f.x1 - f.x0) * k as f64 / 4.0;
        let fy = f.y0 + (f.y1 - f.y0) * k as f64 / 4.0;
        let (px, _) = f.px(fx, f.y0);
        let (_, py) = f.px(f.x0, fy);
        let _ = writeln!(out, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{fx:.2}</text>"#, b + 16.0);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{fy:.2}</text>"#, l - 4.0, py + 4.0);
    }
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{xlabel}</text>"#, (l + r) / 2.0, HEIGHT - 10.0);
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">{ylabel}</text>"#,
        (t + b) / 2.0,
        (t + b) / 2.0
    );
}

fn polyline(out: &mut String, f: &Frame, pts: &[(f64, f64)], color: &str, dash: bool) {
    if pts.len() < 2 {
        return;
    }
    let mut d = String::new();
    for (x, y) in pts {
        let (px, py) = f.px(*x, *y);
        let _ = write!(d, "{px:.2},{py:.2} ");
    }
    let dash = if dash { r#" stroke-dasharray="6 4""# } else { "" };
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
        d.trim_end()
    );
}

/// Distance from the robot center to the nearest obstacle against time,
/// one curve per run, with the `r_a` floor dashed.
pub fn distance_svg(runs: &[HybridTrajectory], world: &World) -> String {
    let r_a = world.r_a();
    let curves: Vec<Vec<(f64, f64)>> = runs
        .iter()
        .map(|tr| {
            tr.samples
                .iter()
                .filter(|s| s.gap.is_finite())
                .map(|s| (s.t, s.gap + r_a))
                .collect()
        })
        .collect();
    let f = Frame::new(curves.iter().flatten().copied().chain([(0.0, 0.0), (0.0, r_a)]));
    let mut out = String::new();
    header(&mut out, "Distance of the robot center to the obstacles");
    axes(&mut out, &f, "t [s]", "distance [m]");
    polyline(&mut out, &f, &[(f.x0, r_a), (f.x1, r_a)], "black", true);
    for (k, c) in curves.iter().enumerate() {
        polyline(&mut out, &f, c, PALETTE[k % PALETTE.len()], false);
    }
    out.push_str("</svg>\n");
    out
}

/// Orthographic view along `(1, 1, 1)`.
fn project(p: &Vec3) -> (f64, f64) {
    let e1 = Vec3::new(1.0, -1.0, 0.0).normalize();
    let e2 = Vec3::new(-1.0, -1.0, 2.0).normalize();
    (p.dot(&e1), p.dot(&e2))
}

fn hull_2d(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for pass in [pts.clone(), pts.into_iter().rev().collect()] {
        let start = hull.len();
        for p in pass {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Trajectories in an orthographic projection, red in move-to-target mode
/// and blue in avoidance mode, over the obstacle silhouettes.
pub fn projection_svg(runs: &[HybridTrajectory], world: &World) -> String {
    let silhouettes: Vec<Vec<(f64, f64)>> = world
        .obstacles()
        .iter()
        .map(|o| match o {
            ConvexShape::Sphere { center, radius } => {
                let c = project(center);
                (0..48)
                    .map(|k| {
                        let th = k as f64 / 48.0 * std::f64::consts::TAU;
                        (c.0 + radius * th.cos(), c.1 + radius * th.sin())
                    })
                    .collect()
            }
            ConvexShape::ConvexPolytope(p) => hull_2d(p.vertices().iter().map(project).collect()),
            ConvexShape::HalfspaceBox { min, max } => hull_2d(
                (0..8)
                    .map(|k| {
                        let pick = |bit: usize, i: usize| if k & bit == 0 { min[i] } else { max[i] };
                        project(&Vec3::new(pick(1, 0), pick(2, 1), pick(4, 2)))
                    })
                    .collect(),
            ),
        })
        .collect();
    let tracks: Vec<Vec<((f64, f64), Mode)>> = runs
        .iter()
        .map(|tr| tr.samples.iter().map(|s| (project(&s.state.x), s.state.m)).collect())
        .collect();
    let f = Frame::new(
        silhouettes
            .iter()
            .flatten()
            .copied()
            .chain(tracks.iter().flatten().map(|(p, _)| *p))
            .chain([(0.0, 0.0)]),
    )
    .equal_aspect();

    let mut out = String::new();
    header(&mut out, "Trajectories (red: move-to-target, blue: avoidance)");
    for s in &silhouettes {
        let mut d = String::new();
        for (x, y) in s {
            let (px, py) = f.px(*x, *y);
            let _ = write!(d, "{px:.2},{py:.2} ");
        }
        let _ = writeln!(
            out,
            r##"<polygon points="{}" fill="#cccccc" stroke="#555555"/>"##,
            d.trim_end()
        );
    }
    for track in &tracks {
        let mut k = 0;
        while k + 1 < track.len() {
            let mode = track[k + 1].1;
            let mut seg = vec![track[k].0];
            while k + 1 < track.len() && track[k + 1].1 == mode {
                seg.push(track[k + 1].0);
                k += 1;
            }
            if seg.len() == 1 {
                k += 1;
            }
            let color = match mode {
                Mode::MoveToTarget => "red",
                Mode::Avoidance => "blue",
            };
            polyline(&mut out, &f, &seg, color, false);
        }
        if let Some((p, _)) = track.first() {
            let (px, py) = f.px(p.0, p.1);
            let _ = writeln!(out, r#"<circle cx="{px:.2}" cy="{py:.2}" r="3" fill="black"/>"#);
        }
    }
    let (ox, oy) = f.px(0.0, 0.0);
    let r = (world.r_a() * f.scale()).max(2.0);
    let _ = writeln!(
        out,
        r#"<circle cx="{ox:.2}" cy="{oy:.2}" r="{r:.2}" fill="none" stroke="green"/>"#
    );
    out.push_str("</svg>\n");
    out
}
