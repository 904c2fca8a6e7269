mod common;

use std::f64::consts::PI;

use hele_shaw::curve::signed_area;
use hele_shaw::evolution::{run_observed, BieModel, UniformSpeed};
use hele_shaw::prelude::*;
use hele_shaw::spline::PeriodicSpline;
use proptest::prelude::*;

use common::ellipse;

fn forced(n: usize) -> (BoundaryCurve, BieModel) {
    let mut config = SimulationConfig::for_points(n);
    config.forcing = Forcing::oscillatory();
    (make_shape(&ShapeSpec::circle(n)).unwrap(), BieModel { config })
}

fn radii(curve: &BoundaryCurve) -> Vec<f64> {
    curve.points().iter().map(|p| p.norm()).collect()
}

#[test]
fn circle_forced_velocity_is_the_forcing() {
    let (curve, model) = forced(400);
    let v = normal_velocity(&curve, &model.config, 0.0).unwrap();
    let dev = v.iter().fold(0.0_f64, |m, x| m.max((x - 500.0).abs()));
    assert!(dev <= 0.5, "max |V - 500| = {dev}");

    let still = normal_velocity(&curve, &SimulationConfig::for_points(400), 0.0).unwrap();
    assert!(still.iter().all(|v| v.abs() < 1e-3));
}

#[test]
fn one_euler_step_of_forced_circle() {
    let (curve, model) = forced(400);
    let step = step_forward_euler(&model, &curve, 0.0, 1e-5).unwrap();
    for r in radii(&step.curve) {
        assert!((r - 1.005).abs() < 1e-6, "radius {r}");
    }
}

#[test]
fn one_rk2_step_matches_scalar_midpoint_rule() {
    let (curve, model) = forced(400);
    let (t, dt) = (3e-4, 2e-5);
    let start = radii(&curve)[0];
    let want = start + dt * model.config.forcing.value(t + 0.5 * dt);
    let step = step_rk2(&model, &curve, t, dt).unwrap();
    for r in radii(&step.curve) {
        assert!((r - want).abs() < 1e-6, "radius {r} vs {want}");
    }
}

#[test]
fn zero_step_is_identity() {
    let (curve, model) = forced(100);
    let step = step_forward_euler(&model, &curve, 0.0, 0.0).unwrap();
    assert_eq!(step.curve.points(), curve.points());
}

#[test]
fn uniform_speed_moves_every_node_exactly() {
    let curve = BoundaryCurve::new(ellipse(200, 2.0, 2.0)).unwrap();
    let model = UniformSpeed {
        value: 3.0,
        forcing: Forcing::None,
        stencil: None,
    };
    for rk in [false, true] {
        let step = if rk {
            step_rk2(&model, &curve, 0.0, 0.01).unwrap()
        } else {
            step_forward_euler(&model, &curve, 0.0, 0.01).unwrap()
        };
        for r in radii(&step.curve) {
            assert!((r - 2.03).abs() < 1e-9, "rk2={rk}: {r}");
        }
    }
}

#[test]
fn empty_run_returns_initial_state() {
    let curve = make_shape(&ShapeSpec::perturbed_circle(100, 1.0, 0.1, 3)).unwrap();
    let mut config = SimulationConfig::for_points(100);
    config.t_end = 0.0;
    let traj = run(&curve, &config).unwrap();
    assert!(traj.completed());
    assert_eq!(traj.snapshots.len(), 1);
    assert_eq!(traj.snapshots[0].points, curve.points());
    assert_eq!(traj.final_curve.points(), curve.points());
}

#[test]
fn perturbed_circle_starts_relaxing() {
    let curve = make_shape(&ShapeSpec::perturbed_circle(200, 1.0, 0.1, 3)).unwrap();
    let mut config = SimulationConfig::for_points(200);
    config.t_end = 5e-3;
    let mut spread = Vec::new();
    let traj = run_observed(
        &curve,
        &config,
        &BieModel {
            config: config.clone(),
        },
        |s| {
            spread.push(s.diagnostics.d_max - s.diagnostics.d_min);
        },
    )
    .unwrap();
    assert!(traj.completed());
    assert!(spread.windows(50).all(|w| w[49] < w[0]));
    let area0 = traj.history[0].area;
    let drift = (traj.history.last().unwrap().area - area0).abs() / area0;
    assert!(drift < 1e-3, "area drift {drift}");
}

#[test]
fn heart_conserves_area_over_a_thousand_steps() {
    let curve = make_shape(&ShapeSpec::heart(200)).unwrap();
    let mut config = SimulationConfig::for_points(200);
    config.t_end = 1e-2;
    let traj = run(&curve, &config).unwrap();
    assert!(traj.completed());
    assert_eq!(traj.steps_taken, 1000);
    let a0 = traj.history[0].area;
    let worst = traj
        .history
        .iter()
        .fold(0.0_f64, |m, d| m.max((d.area - a0).abs() / a0));
    assert!(worst <= 1e-2, "area drift {worst}");
}

#[test]
fn diagnostics_of_reference_shapes() {
    let d = diagnostics(&make_shape(&ShapeSpec::circle(400)).unwrap(), 0.0);
    assert!((d.area - PI).abs() < 2e-4);
    assert!(d.center[0].abs() < 1e-12 && d.center[1].abs() < 1e-12);
    assert!((d.d_min - 1.0).abs() < 1e-12 && (d.d_max - 1.0).abs() < 1e-12);

    let d = diagnostics(
        &make_shape(&ShapeSpec::perturbed_circle(400, 1.0, 0.1, 3)).unwrap(),
        0.0,
    );
    assert!((d.area - 3.15731).abs() < 1e-3, "area {}", d.area);
}

#[test]
fn remesh_fixed_point_on_equispaced_circle() {
    let curve = make_shape(&ShapeSpec::circle(400)).unwrap();
    let out = remesh(&curve).unwrap();
    for (p, q) in curve.points().iter().zip(out.points()) {
        assert!((p - q).norm() < 1e-10);
    }
}

#[test]
fn remesh_equalizes_nonuniform_circle() {
    let n = 400;
    let pts: Vec<Point> = (0..n)
        .map(|i| {
            let u = 2.0 * PI * i as f64 / n as f64;
            let t = u + 0.3 * u.sin();
            Point::new(t.cos(), t.sin())
        })
        .collect();
    let out = remesh(&BoundaryCurve::new(pts).unwrap()).unwrap();
    for (i, p) in out.points().iter().enumerate() {
        assert!((p.norm() - 1.0).abs() < 1e-8, "radius at {i}: {}", p.norm());
        let angle = p.y.atan2(p.x).rem_euclid(2.0 * PI);
        let want = 2.0 * PI * i as f64 / n as f64;
        let diff = (angle - want + PI).rem_euclid(2.0 * PI) - PI;
        assert!(diff.abs() < 1e-6, "angle at {i} off by {diff}");
    }
}

/// Area enclosed by the spline through the nodes, from a dense resampling.
/// The shoelace area of the nodes themselves carries an O(h²) chord deficit
/// that depends on the spacing, so it moves when nodes are redistributed.
fn curve_area(curve: &BoundaryCurve) -> f64 {
    let dense = PeriodicSpline::new(curve.points())
        .unwrap()
        .resample(20 * curve.len());
    signed_area(&dense)
}

#[test]
fn remesh_keeps_enclosed_area() {
    for spec in [
        ShapeSpec::perturbed_circle(400, 1.0, 0.1, 3),
        ShapeSpec::perturbed_circle(400, 1.0, 0.3, 5),
        ShapeSpec::heart(400),
    ] {
        let curve = make_shape(&spec).unwrap();
        let once = remesh(&curve).unwrap();
        let rel = (curve_area(&once) - curve_area(&curve)).abs() / curve_area(&curve);
        assert!(rel <= 1e-6, "{:?}: area change {rel:e}", spec.kind);
    }
}

#[test]
fn remesh_is_idempotent_on_smooth_curves() {
    let shapes = [
        make_shape(&ShapeSpec::perturbed_circle(400, 1.0, 0.1, 3)).unwrap(),
        BoundaryCurve::new(ellipse(400, 1.3, 1.0)).unwrap(),
    ];
    for curve in shapes {
        let once = remesh(&curve).unwrap();
        let twice = remesh(&once).unwrap();
        for (p, q) in once.points().iter().zip(twice.points()) {
            assert!((p - q).norm() <= 1e-8, "moved by {:e}", (p - q).norm());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn diagnostics_follow_translations(dx in -50.0..50.0f64, dy in -50.0..50.0f64, d1 in 0.0..0.3f64, d2 in 2u32..7) {
        let curve = make_shape(&ShapeSpec::perturbed_circle(120, 1.0, d1, d2)).unwrap();
        let shift = Point::new(dx, dy);
        let moved = curve.map_points(|p| p + shift).unwrap();
        let (a, b) = (diagnostics(&curve, 0.0), diagnostics(&moved, 0.0));
        let tol = 1e-12 * (1.0 + dx.abs() + dy.abs());
        prop_assert!((b.center[0] - a.center[0] - dx).abs() < tol);
        prop_assert!((b.center[1] - a.center[1] - dy).abs() < tol);
        prop_assert!((a.area - b.area).abs() < 1e2 * tol);
        prop_assert!((a.d_min - b.d_min).abs() < tol && (a.d_max - b.d_max).abs() < tol);
    }

    #[test]
    fn uniform_motion_law(r in 0.5..3.0f64, c in -2.0..2.0f64, n in 40usize..160) {
        let curve = BoundaryCurve::new(ellipse(n, r, r)).unwrap();
        let model = UniformSpeed { value: c, forcing: Forcing::None, stencil: None };
        let dt = 0.01;
        let step = step_forward_euler(&model, &curve, 0.0, dt).unwrap();
        for p in step.curve.points() {
            prop_assert!((p.norm() - (r + c * dt)).abs() < 1e-9);
        }
    }

    #[test]
    fn remesh_preserves_count_and_first_point(d1 in 0.0..0.3f64, d2 in 2u32..6, n in 60usize..200) {
        let curve = make_shape(&ShapeSpec::perturbed_circle(n, 1.0, d1, d2)).unwrap();
        let out = remesh(&curve).unwrap();
        prop_assert_eq!(out.len(), n);
        prop_assert_eq!(out.point(0), curve.point(0));
    }
}
