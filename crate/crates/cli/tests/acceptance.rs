//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

#[path = "../../core/tests/common/mod.rs"]
mod oracle;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use hynav::controller::{self, HybridState, Mode};
use hynav::simulator::{self, HybridTrajectory, JumpKind, Outcome, SimConfig};
use hynav::world::World;
use hynav::{ConvexShape, Segment, Vec3};
use hynav_cli::{audit, simulate, Scenario};
use oracle::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn scenario(name: &str) -> Scenario {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name);
    Scenario::load(&path).unwrap_or_else(|e| panic!("{e:#}"))
}

const CORPUS: [&str; 3] = ["study1.toml", "study2.toml", "corridor.toml"];

struct Report {
    failures: usize,
}

impl Report {
    fn check(&mut self, id: u32, name: &str, ok: bool, detail: String) {
        println!("{} [{id}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failures += 1;
        }
    }
}

fn min_gap(tr: &HybridTrajectory, world: &World) -> f64 {
    tr.samples.iter().map(|s| world.gap(&s.state.x)).fold(f64::INFINITY, f64::min)
}

fn t_final(tr: &HybridTrajectory) -> Option<f64> {
    match tr.outcome {
        Outcome::Converged { t_final } => Some(t_final),
        _ => None,
    }
}

fn study1(r: &mut Report) -> Vec<f64> {
    let sc = scenario("study1.toml");
    let clock = Instant::now();
    let runs = simulate(&sc, false);
    let wall = clock.elapsed().as_secs_f64();
    let tr = &runs[0];
    let l0 = tr.jumps.iter().filter(|j| j.kind == JumpKind::L0).count();
    let l1 = tr.jumps.len() - l0;
    let gap = min_gap(tr, &sc.world);
    let tf = t_final(tr);
    let last = tr.samples.last().unwrap().state.x.norm();
    r.check(
        1,
        "single-obstacle reproduction",
        tf.is_some_and(|t| t <= 60.0) && last <= 1e-3 && gap >= 0.0 && l0 == 1 && l1 == 1 && wall < 5.0,
        format!("t_final={tf:?} |x|={last:.2e} min_gap={gap:.3e} L0={l0} L1={l1} wall={wall:.2}s"),
    );
    tr.jump_times()
}

fn study2(r: &mut Report) {
    let sc = scenario("study2.toml");
    let clock = Instant::now();
    let runs = simulate(&sc, false);
    let wall = clock.elapsed().as_secs_f64();
    let converged = runs.iter().filter(|t| t_final(t).is_some()).count();
    let gap = runs.iter().map(|t| min_gap(t, &sc.world)).fold(f64::INFINITY, f64::min);
    let clearance = gap + sc.world.r_a();
    r.check(
        2,
        "two-obstacle eight-start reproduction",
        runs.len() == 8 && converged == 8 && gap >= 0.0 && wall < 30.0,
        format!(
            "converged={converged}/{} min_gap={gap:.3e} min_center_distance={clearance:.4} (r_a={}) wall={wall:.2}s",
            runs.len(),
            sc.world.r_a()
        ),
    );
}

fn corpus_properties(r: &mut Report) {
    let mut residual: f64 = 0.0;
    let mut min_dec = f64::INFINITY;
    let mut pairs = 0;
    let mut progress_ok = true;
    for name in CORPUS {
        let sc = scenario(name);
        assert_eq!(sc.sim.dt_max, 1e-3);
        for tr in simulate(&sc, false) {
            let rep = audit(&tr, &sc);
            residual = residual.max(rep.max_hyperplane_residual);
            for w in rep.hit_point_norms.windows(2) {
                pairs += 1;
                let d = w[0] - w[1];
                min_dec = min_dec.min(d);
                progress_ok &= d >= sc.params.epsilon - 1e-6;
            }
        }
    }
    r.check(
        3,
        "hyperplane confinement",
        residual <= 1e-4,
        format!("max |a.(x-h)| = {residual:.3e} over {} scenarios", CORPUS.len()),
    );
    r.check(
        4,
        "hit-point progress",
        progress_ok && pairs > 0,
        format!("{pairs} consecutive hit-point pairs, smallest decrease {min_dec:.4}"),
    );
}

fn random_state(rng: &mut impl Rng, world: &World, m: Mode) -> HybridState {
    let r_a = world.r_a();
    let sample = |rng: &mut ChaCha8Rng| -> Vec3 {
        if rng.gen_bool(0.5) && !world.obstacles().is_empty() {
            let o = &world.obstacles()[rng.gen_range(0..world.obstacles().len())];
            let (c, rho) = o.bounding_sphere();
            random_in_ball(rng, &c, rho + r_a + 0.5)
        } else {
            random_in_ball(rng, &Vec3::zeros(), 6.0)
        }
    };
    let mut local = ChaCha8Rng::seed_from_u64(rng.gen());
    let free = |rng: &mut ChaCha8Rng| loop {
        let x = sample(rng);
        if world.free_space_contains(r_a, &x) && x.norm() > 1e-9 {
            break x;
        }
    };
    let x = free(&mut local);
    let h = free(&mut local);
    let s0 = local.gen_range(0.0..5.0);
    let s = if local.gen_bool(0.1) { s0 } else { s0 + local.gen_range(0.0..20.0) };
    HybridState {
        x,
        h,
        a: random_unit(&mut local),
        m,
        s,
        s0,
    }
}

fn set_cover(r: &mut Report) {
    let worlds: Vec<Scenario> = CORPUS.iter().map(|n| scenario(n)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut uncovered = [0usize; 2];
    for (k, m) in [Mode::MoveToTarget, Mode::Avoidance].into_iter().enumerate() {
        for i in 0..100_000 {
            let sc = &worlds[i % worlds.len()];
            let st = random_state(&mut rng, &sc.world, m);
            if !(controller::in_flow_set(&st, &sc.world, &sc.params) || controller::in_jump_set(&st, &sc.world, &sc.params)) {
                uncovered[k] += 1;
            }
        }
    }
    r.check(
        5,
        "flow and jump sets cover the state space",
        uncovered == [0, 0],
        format!("uncovered: mode 0 = {}/100000, mode 1 = {}/100000", uncovered[0], uncovered[1]),
    );
}

fn geometry_oracles(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 500;
    let (mut analytic, mut sampled): (f64, f64) = (0.0, 0.0);
    for _ in 0..n {
        let c = random_in_ball(&mut rng, &Vec3::zeros(), 3.0);
        let rad = rng.gen_range(0.1..2.0);
        let s = ConvexShape::sphere(c, rad).unwrap();
        let x = random_in_ball(&mut rng, &c, 3.0 * rad + 1.0);
        let q = random_in_ball(&mut rng, &c, 3.0 * rad + 1.0);
        let d = (x - c).norm();
        analytic = analytic.max((s.distance(&x) - (d - rad).max(0.0)).abs());
        if d > rad {
            analytic = analytic.max((s.project(&x) - (c + (x - c) * (rad / d))).norm());
        }
        let seg = Segment::new(x, q);
        analytic = analytic.max((s.segment_distance(&seg) - (seg.distance_to_point(&c) - rad).max(0.0)).abs());
    }
    let sphere_ok = analytic <= 1e-9;
    let sphere_err = analytic;

    analytic = 0.0;
    for _ in 0..n {
        let c = random_in_ball(&mut rng, &Vec3::zeros(), 3.0);
        let h = Vec3::new(rng.gen_range(0.05..1.5), rng.gen_range(0.05..1.5), rng.gen_range(0.05..1.5));
        let (lo, hi) = (c - h, c + h);
        let s = ConvexShape::aabb(lo, hi).unwrap();
        let x = random_in_ball(&mut rng, &c, 4.0);
        let q = random_in_ball(&mut rng, &c, 4.0);
        analytic = analytic.max((s.distance(&x) - box_distance(&lo, &hi, &x)).abs());
        let clamp = Vec3::new(x.x.clamp(lo.x, hi.x), x.y.clamp(lo.y, hi.y), x.z.clamp(lo.z, hi.z));
        analytic = analytic.max((s.project(&x) - clamp).norm());
        let brute = sampled_segment_distance(&x, &q, |p| box_distance(&lo, &hi, p), 8000);
        sampled = sampled.max((s.segment_distance(&Segment::new(x, q)) - brute).abs());
    }
    let box_ok = analytic <= 1e-9 && sampled <= 1e-3;
    let box_err = (analytic, sampled);

    analytic = 0.0;
    sampled = 0.0;
    for _ in 0..n {
        let c = random_in_ball(&mut rng, &Vec3::zeros(), 2.0);
        let (pts, s) = random_polytope(&mut rng, &c, 1.0, 8);
        let x = random_in_ball(&mut rng, &c, 2.5);
        let q = random_in_ball(&mut rng, &c, 2.5);
        let d = hull_distance(&pts, &x);
        analytic = analytic.max((s.distance(&x) - d).abs());
        if d > 0.0 {
            analytic = analytic.max((s.project(&x) - hull_closest_point(&pts, &x)).norm());
        }
        let brute = sampled_segment_distance(&x, &q, |p| hull_distance(&pts, p), 4000);
        sampled = sampled.max((s.segment_distance(&Segment::new(x, q)) - brute).abs());
    }
    let poly_ok = analytic <= 1e-9 && sampled <= 1e-3;
    r.check(
        6,
        "geometry oracle equivalence",
        sphere_ok && box_ok && poly_ok,
        format!(
            "{n} instances per class; sphere analytic {sphere_err:.1e}; box analytic {:.1e} sampled {:.1e}; polytope analytic {analytic:.1e} sampled {sampled:.1e}",
            box_err.0, box_err.1
        ),
    );
}

fn eta_checks(r: &mut Report) {
    let p = controller::ControllerParams::with_default_thresholds(1.0, 1.0, 0.4, 0.1, 0.25);
    let at = |g: f64| controller::eta_of_gap(g, &p);
    let mid = 0.5 * (p.gamma_a + p.gamma_s);
    let values = (at(p.gamma_a), at(mid), at(p.gamma_s));
    let breakpoints_ok = values.0 == 1.0 && values.1.abs() <= 1e-12 && values.2 == -1.0;
    let mut jump: f64 = 0.0;
    for g in [p.gamma_a, p.gamma_s] {
        let (below, above) = (g - 1e-14, g + 1e-14);
        jump = jump.max((at(below) - at(g)).abs()).max((at(above) - at(g)).abs());
    }
    r.check(
        7,
        "blend factor breakpoints and continuity",
        breakpoints_ok && jump <= 1e-12,
        format!("eta = {:?} at (gamma_a, mid, gamma_s); largest step across breakpoints {jump:.1e}", values),
    );
}

fn sensed_fidelity(r: &mut Report, exact_times: &[f64]) {
    let sc = scenario("study1.toml");
    let runs = simulate(&sc, true);
    let tr = &runs[0];
    let times = tr.jump_times();
    let dt = sc.sim.dt_max;
    let worst = exact_times
        .iter()
        .zip(&times)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    let ok = t_final(tr).is_some() && times.len() == exact_times.len() && worst <= 5.0 * dt;
    r.check(
        8,
        "sensed pipeline fidelity",
        ok && sc.sensor.angular_resolution >= 4096,
        format!(
            "rays={} converged={} switches exact={exact_times:?} sensed={times:?} max diff={worst:.2e}s (limit {:.0e})",
            sc.sensor.angular_resolution,
            t_final(tr).is_some(),
            5.0 * dt
        ),
    );
}

fn immediate_switch(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut total = 0;
    let mut good = 0;
    for name in CORPUS {
        let sc = scenario(name);
        let sim = SimConfig {
            t_max: 0.05,
            witness_samples: 0,
            ..sc.sim
        };
        for _ in 0..20 {
            let st = random_state(&mut rng, &sc.world, Mode::Avoidance);
            let st = HybridState { s: st.s0, ..st };
            let tr = simulator::run(&sc.world, &sc.params, &sim, st);
            total += 1;
            let first = tr.jumps.first();
            if first.is_some_and(|j| j.kind == JumpKind::L1 && j.t == 0.0 && j.j == 0)
                && tr.samples[1].t == 0.0
                && tr.samples[1].j == 1
            {
                good += 1;
            }
        }
    }
    r.check(
        9,
        "avoidance-mode start switches at (0, 0)",
        good == total,
        format!("{good}/{total} initial states jumped L1 before any flow"),
    );
}

fn main() -> ExitCode {
    let mut r = Report { failures: 0 };
    let exact_times = study1(&mut r);
    study2(&mut r);
    corpus_properties(&mut r);
    set_cover(&mut r);
    geometry_oracles(&mut r);
    eta_checks(&mut r);
    sensed_fidelity(&mut r, &exact_times);
    immediate_switch(&mut r);
    if r.failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria failed", r.failures);
        ExitCode::FAILURE
    }
}
