use hynav::controller::{ControllerParams, HybridState, Mode};
use hynav::sensor::SensorConfig;
use hynav::simulator::*;
use hynav::world::{Workspace, World};
use hynav::{ConvexShape, Vec3};
use proptest::prelude::*;

fn plate_world() -> World {
    let plate = ConvexShape::polytope(&[
        Vec3::new(1.6, -1.8, -0.8),
        Vec3::new(1.6, 0.35, -0.75),
        Vec3::new(1.65, 0.3, 0.8),
        Vec3::new(1.6, -1.75, 0.85),
        Vec3::new(1.9, -1.85, -0.7),
        Vec3::new(1.95, 0.3, -0.8),
        Vec3::new(1.9, 0.35, 0.75),
        Vec3::new(1.85, -1.8, 0.8),
    ])
    .unwrap();
    World::new(Workspace::Unbounded, vec![plate], 0.15, 0.1).unwrap()
}

fn params(w: &World) -> ControllerParams {
    ControllerParams::with_default_thresholds(1.0, 0.5, 0.4, 0.1, w.r_a())
}

fn start(x: [f64; 3]) -> HybridState {
    let x = Vec3::from(x);
    HybridState::initial(x, x, Vec3::z(), Mode::MoveToTarget, 0.0)
}

#[test]
fn radial_sphere_crossing_matches_closed_form() {
    let w = World::new(
        Workspace::Unbounded,
        vec![ConvexShape::sphere(Vec3::new(0.0, 3.0, 0.0), 1.0).unwrap()],
        0.15,
        0.05,
    )
    .unwrap();
    let p = ControllerParams::with_default_thresholds(2.0, 1.0, 0.3, 0.05, w.r_a());
    let sim = SimConfig { witness_samples: 0, ..SimConfig::default() };
    let traj = run(&w, &p, &sim, start([0.0, 8.0, 0.0]));
    let l0 = traj.jumps[0];
    // y(t) = 8 e^{−2t} reaches 3 + 1 + r_a + γ_s
    let y_star = 4.0 + w.r_a() + p.gamma_s;
    let t_star = (8.0 / y_star).ln() / 2.0;
    assert!((l0.pre.x.y - y_star).abs() <= sim.event_tolerance);
    assert!((l0.t - t_star).abs() <= 1e-6);
    assert!(matches!(traj.outcome, Outcome::Converged { .. }));
}

#[test]
fn plate_run_passes_audit() {
    let w = plate_world();
    let p = params(&w);
    let sim = SimConfig { record_stride: 10, ..SimConfig::default() };
    let traj = run(&w, &p, &sim, start([3.5, 0.15, 0.05]));
    let rep = audit(&traj, &w, &p, &AuditTolerances::default());
    assert!(rep.pass, "{rep:?}");
    assert_eq!((rep.l0_jumps, rep.l1_jumps), (1, 1));
    assert_eq!(traj.epsilon_checks.len(), 1);
    assert!(traj.epsilon_checks[0].witness.is_some());
    let t: Vec<f64> = traj.samples.iter().map(|s| s.t).collect();
    assert!(t.windows(2).all(|w| w[1] >= w[0]));
    assert!(traj.samples.windows(2).all(|s| s[1].j == s[0].j || s[1].j == s[0].j + 1));
}

#[test]
fn runs_are_deterministic() {
    let w = plate_world();
    let p = params(&w);
    let sim = SimConfig { record_stride: 25, ..SimConfig::default() };
    let a = run(&w, &p, &sim, start([3.4, 0.25, -0.1]));
    let b = run(&w, &p, &sim, start([3.4, 0.25, -0.1]));
    assert_eq!(a, b);
}

#[test]
fn sensed_switch_times_track_exact() {
    let w = plate_world();
    let p = params(&w);
    let exact = SimConfig { witness_samples: 0, ..SimConfig::default() };
    let sensed = SimConfig {
        pipeline: Pipeline::Sensed(SensorConfig::new(1.0, 4096)),
        ..exact
    };
    let a = run(&w, &p, &exact, start([3.5, 0.15, 0.05]));
    let b = run(&w, &p, &sensed, start([3.5, 0.15, 0.05]));
    assert_eq!(a.jumps.len(), b.jumps.len());
    for (x, y) in a.jump_times().iter().zip(b.jump_times()) {
        assert!((x - y).abs() <= 5.0 * exact.dt_max, "{x} vs {y}");
    }
}

#[test]
fn time_limit_is_reported() {
    let w = plate_world();
    let p = params(&w);
    let sim = SimConfig { t_max: 1.0, witness_samples: 0, ..SimConfig::default() };
    let traj = run(&w, &p, &sim, start([3.5, 0.15, 0.05]));
    assert_eq!(traj.outcome, Outcome::MaxTimeExceeded);
    assert!(!audit(&traj, &w, &p, &AuditTolerances::default()).pass);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn move_to_target_step_is_exponential(x in prop::array::uniform3(-5.0..5.0f64), k in 0.1..1.0f64, dt in 1e-4..1e-2f64) {
        let w = World::new(Workspace::Unbounded, vec![], 0.1, 0.1).unwrap();
        let p = ControllerParams::with_default_thresholds(k, 1.0, 0.3, 0.05, w.r_a());
        let st = start(x);
        let next = flow_step(&st, &w, &p, dt).unwrap();
        prop_assert!((next.x - st.x * (-k * dt).exp()).norm() <= 1e-10);
        prop_assert_eq!((next.h, next.a, next.m), (st.h, st.a, st.m));
    }

    #[test]
    fn avoidance_step_stays_in_plane(y in -0.5..0.3f64, z in -0.5..0.5f64, steps in 1usize..200) {
        let w = plate_world();
        let p = params(&w);
        let x = Vec3::new(2.45, y, z);
        let a = Vec3::new(0.3, 1.0, -0.2).cross(&x).normalize();
        let mut st = HybridState { s: 1.0, ..HybridState::initial(x, x, a, Mode::Avoidance, 0.0) };
        for _ in 0..steps {
            st = flow_step(&st, &w, &p, 1e-3).unwrap();
        }
        prop_assert!(st.a.dot(&(st.x - st.h)).abs() <= 1e-12);
    }

    #[test]
    fn avoidance_start_jumps_first(x in prop::array::uniform3(2.5..4.0f64)) {
        let w = plate_world();
        let p = params(&w);
        let x = Vec3::from(x);
        let st = HybridState::initial(x, x, Vec3::y(), Mode::Avoidance, 0.0);
        let sim = SimConfig { t_max: 0.01, witness_samples: 0, ..SimConfig::default() };
        let traj = run(&w, &p, &sim, st);
        let first = traj.jumps[0];
        prop_assert_eq!((first.t, first.j, first.kind), (0.0, 0, JumpKind::L1));
        prop_assert_eq!(traj.samples[1].t, 0.0);
    }
}
