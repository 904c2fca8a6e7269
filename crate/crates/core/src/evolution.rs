//! Explicit time stepping of the free boundary, `dx/dt = Vₙ n`.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::assembly::{assemble, QuadratureRule};
use crate::curve::BoundaryCurve;
use crate::error::{Error, Result};
use crate::geometry::{build_charts, LocalChart, StencilParams};
use crate::solver::solve_dense;
use crate::spline::PeriodicSpline;
use crate::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stepper {
    ForwardEuler,
    Rk2,
}

impl std::str::FromStr for Stepper {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "forward_euler" | "euler" => Ok(Stepper::ForwardEuler),
            "rk2" | "midpoint" => Ok(Stepper::Rk2),
            other => Err(format!("unknown stepper {other:?}")),
        }
    }
}

impl Stepper {
    pub fn name(self) -> &'static str {
        match self {
            Stepper::ForwardEuler => "forward_euler",
            Stepper::Rk2 => "rk2",
        }
    }
}

/// Spatially uniform normal velocity `h(t)` added to the BIE solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Forcing {
    None,
    Cosine { amplitude: f64, omega: f64 },
}

impl Forcing {
    /// `h(t) = 500 cos(500πt)`.
    pub fn oscillatory() -> Self {
        Forcing::Cosine {
            amplitude: 500.0,
            omega: 500.0 * std::f64::consts::PI,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Forcing::None => 0.0,
            Forcing::Cosine { amplitude, omega } => amplitude * (omega * t).cos(),
        }
    }

    /// `∫_0^t h`.
    pub fn integral(&self, t: f64) -> f64 {
        match *self {
            Forcing::None => 0.0,
            Forcing::Cosine { amplitude, omega } => amplitude * (omega * t).sin() / omega,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    /// Stencil size; `None` picks the largest odd integer not above `√N`.
    pub k: Option<usize>,
    pub degree: usize,
    pub chart_tol: f64,
    pub max_chart_iters: usize,
    pub dt: f64,
    pub t_end: f64,
    pub b_rule: QuadratureRule,
    pub stepper: Stepper,
    pub forcing: Forcing,
    /// Remesh to equal arc length every this many steps; 0 disables.
    pub remesh_every: usize,
    /// Keep a snapshot every this many steps; 0 keeps only the first and last.
    pub snapshot_every: usize,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            k: None,
            degree: 6,
            chart_tol: 1e-12,
            max_chart_iters: 20,
            dt: 1e-5,
            t_end: 1e-3,
            b_rule: QuadratureRule::Simpson,
            stepper: Stepper::ForwardEuler,
            forcing: Forcing::None,
            remesh_every: 0,
            snapshot_every: 0,
        }
    }
}

impl SimulationConfig {
    /// Defaults with the stencil size fixed for an `n`-point cloud.
    pub fn for_points(n: usize) -> Self {
        let mut c = SimulationConfig::default();
        c.k = Some(StencilParams::sqrt_rule(n, c.degree).k);
        c
    }

    pub fn stencil(&self, n: usize) -> StencilParams {
        let mut p = match self.k {
            Some(k) => StencilParams::new(k, self.degree),
            None => StencilParams::sqrt_rule(n, self.degree),
        };
        p.chart_tol = self.chart_tol;
        p.max_chart_iters = self.max_chart_iters;
        p
    }

    /// Number of steps to reach `t_end`, rounded to the nearest integer.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        self.stencil(n).validate(n)?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidInput(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "t_end = {} must be non-negative",
                self.t_end
            )));
        }
        Ok(())
    }
}

/// Normal velocity with the geometry it was computed on.
#[derive(Debug, Clone)]
pub struct VelocityField {
    pub velocity: Vec<f64>,
    pub normals: Vec<Point>,
    pub curvature: Vec<f64>,
    /// Condition estimate of the solve, when there was one.
    pub condition_estimate: Option<f64>,
}

impl VelocityField {
    fn from_charts(charts: &[LocalChart], velocity: Vec<f64>, condition_estimate: Option<f64>) -> Self {
        VelocityField {
            velocity,
            normals: charts.iter().map(|c| c.normal).collect(),
            curvature: charts.iter().map(LocalChart::node_curvature).collect(),
            condition_estimate,
        }
    }
}

/// Source of the normal velocity. The BIE model is the physical one; other
/// models exist to exercise the stepping machinery in isolation.
pub trait VelocityModel: Sync {
    fn field(&self, curve: &BoundaryCurve, t: f64) -> Result<VelocityField>;
}

/// `Vₙ = A⁻¹ b + h(t)`.
#[derive(Debug, Clone)]
pub struct BieModel {
    pub config: SimulationConfig,
}

impl VelocityModel for BieModel {
    fn field(&self, curve: &BoundaryCurve, t: f64) -> Result<VelocityField> {
        let charts = build_charts(curve, &self.config.stencil(curve.len()))?;
        let system = assemble(curve, &charts, self.config.b_rule)?;
        let report = solve_dense(&system)?;
        let h = self.config.forcing.value(t);
        let velocity = report.velocity.iter().map(|v| v + h).collect();
        Ok(VelocityField::from_charts(
            &charts,
            velocity,
            Some(report.condition_estimate),
        ))
    }
}

/// Uniform normal speed `value + h(t)`, normals still from the GMLS charts.
#[derive(Debug, Clone)]
pub struct UniformSpeed {
    pub value: f64,
    pub forcing: Forcing,
    pub stencil: Option<StencilParams>,
}

impl VelocityModel for UniformSpeed {
    fn field(&self, curve: &BoundaryCurve, t: f64) -> Result<VelocityField> {
        let params = self
            .stencil
            .unwrap_or_else(|| StencilParams::sqrt_rule(curve.len(), 4));
        let charts = build_charts(curve, &params)?;
        let v = self.value + self.forcing.value(t);
        Ok(VelocityField::from_charts(&charts, vec![v; curve.len()], None))
    }
}

/// Normal velocity of `curve` at time `t` under the BIE model.
pub fn normal_velocity(curve: &BoundaryCurve, config: &SimulationConfig, t: f64) -> Result<Vec<f64>> {
    Ok(BieModel {
        config: config.clone(),
    }
    .field(curve, t)?
    .velocity)
}

fn advance(curve: &BoundaryCurve, field: &VelocityField, dt: f64, time: f64) -> Result<BoundaryCurve> {
    let moved: Vec<Point> = curve
        .points()
        .iter()
        .zip(field.velocity.iter().zip(&field.normals))
        .map(|(x, (v, n))| x + n * (dt * v))
        .collect();
    if let Some((i, j)) = first_crossing(&moved) {
        return Err(Error::SelfIntersection {
            time,
            reason: format!("segments {i} and {j} cross"),
        });
    }
    BoundaryCurve::new(moved).map_err(|e| Error::SelfIntersection {
        time,
        reason: e.to_string(),
    })
}

/// One accepted step: the new curve and the field evaluated at the start.
#[derive(Debug, Clone)]
pub struct Step {
    pub curve: BoundaryCurve,
    pub field: VelocityField,
}

pub fn step_forward_euler<M: VelocityModel + ?Sized>(
    model: &M,
    curve: &BoundaryCurve,
    t: f64,
    dt: f64,
) -> Result<Step> {
    let field = model.field(curve, t)?;
    let curve = advance(curve, &field, dt, t + dt)?;
    Ok(Step { curve, field })
}

/// Explicit midpoint rule: half step with the current field, full step with
/// the field (velocity and normals) re-solved at the midpoint.
pub fn step_rk2<M: VelocityModel + ?Sized>(
    model: &M,
    curve: &BoundaryCurve,
    t: f64,
    dt: f64,
) -> Result<Step> {
    let field = model.field(curve, t)?;
    let mid = advance(curve, &field, 0.5 * dt, t + 0.5 * dt)?;
    let mid_field = model.field(&mid, t + 0.5 * dt)?;
    let curve = advance(curve, &mid_field, dt, t + dt)?;
    Ok(Step { curve, field })
}

/// Redistribute the nodes equally in arc length along a periodic cubic
/// spline through the current nodes. The first node stays put and the count
/// is unchanged.
pub fn remesh(curve: &BoundaryCurve) -> Result<BoundaryCurve> {
    let spline = PeriodicSpline::new(curve.points())?;
    BoundaryCurve::new(spline.resample(curve.len()))
}

/// Scalar shape diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub time: f64,
    pub area: f64,
    pub perimeter: f64,
    /// Centroid of the nodes weighted by their trapezoid arc share.
    pub center: [f64; 2],
    /// Smallest and largest node distance from `center`.
    pub d_min: f64,
    pub d_max: f64,
}

pub fn diagnostics(curve: &BoundaryCurve, time: f64) -> Diagnostics {
    let pts = curve.points();
    let n = pts.len();
    let seg: Vec<f64> = (0..n).map(|i| (pts[(i + 1) % n] - pts[i]).norm()).collect();
    let perimeter: f64 = seg.iter().sum();
    let mut center = Point::zeros();
    for i in 0..n {
        center += pts[i] * (0.5 * (seg[i] + seg[(i + n - 1) % n]));
    }
    center /= perimeter;
    let (d_min, d_max) = pts.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), p| {
        let d = (p - center).norm();
        (lo.min(d), hi.max(d))
    });
    Diagnostics {
        time,
        area: curve.signed_area(),
        perimeter,
        center: [center.x, center.y],
        d_min,
        d_max,
    }
}

/// First pair of non-adjacent polygon edges that intersect.
pub fn first_crossing(points: &[Point]) -> Option<(usize, usize)> {
    let n = points.len();
    let bbox: Vec<(Point, Point)> = (0..n)
        .map(|i| {
            let (a, b) = (points[i], points[(i + 1) % n]);
            (a.inf(&b), a.sup(&b))
        })
        .collect();
    let cross = |o: Point, a: Point, b: Point| (a - o).perp(&(b - o));
    for i in 0..n {
        let (p1, p2) = (points[i], points[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (lo_i, hi_i) = bbox[i];
            let (lo_j, hi_j) = bbox[j];
            if lo_i.x > hi_j.x || lo_j.x > hi_i.x || lo_i.y > hi_j.y || lo_j.y > hi_i.y {
                continue;
            }
            let (q1, q2) = (points[j], points[(j + 1) % n]);
            let d1 = cross(q1, q2, p1);
            let d2 = cross(q1, q2, p2);
            let d3 = cross(p1, p2, q1);
            let d4 = cross(p1, p2, q2);
            if d1 * d2 <= 0.0 && d3 * d4 <= 0.0 && (d1 != 0.0 || d2 != 0.0) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Curve and fields at one time level.
#[derive(Debug, Clone)]
pub struct SimulationState {
    pub step: usize,
    pub time: f64,
    pub curve: BoundaryCurve,
    /// Field at this time level; absent only for the final state of a run
    /// that ended by failure.
    pub field: Option<VelocityField>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub time: f64,
    pub points: Vec<Point>,
    pub velocity: Vec<f64>,
    pub curvature: Vec<f64>,
}

#[derive(Debug)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub history: Vec<Diagnostics>,
    pub final_curve: BoundaryCurve,
    pub final_time: f64,
    pub steps_taken: usize,
    /// Set when the run stopped early; everything above is the trajectory up
    /// to the last accepted step.
    pub failure: Option<Error>,
    pub wall_seconds: f64,
}

impl Trajectory {
    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }
}

fn snapshot(time: f64, curve: &BoundaryCurve, field: Option<&VelocityField>) -> Snapshot {
    let n = curve.len();
    Snapshot {
        time,
        points: curve.points().to_vec(),
        velocity: field.map_or_else(|| vec![f64::NAN; n], |f| f.velocity.clone()),
        curvature: field.map_or_else(|| vec![f64::NAN; n], |f| f.curvature.clone()),
    }
}

/// Run the BIE model from `initial` to `config.t_end`.
pub fn run(initial: &BoundaryCurve, config: &SimulationConfig) -> Result<Trajectory> {
    let model = BieModel {
        config: config.clone(),
    };
    run_observed(initial, config, &model, |_| {})
}

/// Run `model`, calling `observer` at every time level after the field
/// there is known (and once more on the final curve without a field).
///
/// Invalid configuration is an `Err`; numerical failure mid-run is recorded
/// in [`Trajectory::failure`].
pub fn run_observed<M, F>(
    initial: &BoundaryCurve,
    config: &SimulationConfig,
    model: &M,
    mut observer: F,
) -> Result<Trajectory>
where
    M: VelocityModel + ?Sized,
    F: FnMut(&SimulationState),
{
    config.validate(initial.len())?;
    let started = Instant::now();
    let steps = config.steps();
    let mut curve = initial.clone();
    let mut snapshots = Vec::new();
    let mut history = vec![diagnostics(&curve, 0.0)];
    let mut failure = None;
    let mut taken = 0;

    for m in 0..steps {
        let t = m as f64 * config.dt;
        let result = match config.stepper {
            Stepper::ForwardEuler => step_forward_euler(model, &curve, t, config.dt),
            Stepper::Rk2 => step_rk2(model, &curve, t, config.dt),
        };
        let step = match result {
            Ok(s) => s,
            Err(e) => {
                log::warn!("run stopped at step {m}, t = {t:.6e}: {e}");
                failure = Some(e);
                break;
            }
        };
        let state = SimulationState {
            step: m,
            time: t,
            curve: curve.clone(),
            field: Some(step.field),
            diagnostics: *history.last().unwrap(),
        };
        observer(&state);
        if m == 0 || (config.snapshot_every > 0 && m % config.snapshot_every == 0) {
            snapshots.push(snapshot(t, &curve, state.field.as_ref()));
        }

        curve = step.curve;
        taken = m + 1;
        if config.remesh_every > 0 && taken % config.remesh_every == 0 {
            match remesh(&curve) {
                Ok(c) => curve = c,
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        history.push(diagnostics(&curve, taken as f64 * config.dt));
    }

    let final_time = taken as f64 * config.dt;
    let final_field = if failure.is_none() {
        match model.field(&curve, final_time) {
            Ok(f) => Some(f),
            Err(e) => {
                failure = Some(e);
                None
            }
        }
    } else {
        None
    };
    observer(&SimulationState {
        step: taken,
        time: final_time,
        curve: curve.clone(),
        field: final_field.clone(),
        diagnostics: *history.last().unwrap(),
    });
    snapshots.push(snapshot(final_time, &curve, final_field.as_ref()));

    Ok(Trajectory {
        snapshots,
        history,
        final_curve: curve,
        final_time,
        steps_taken: taken,
        failure,
        wall_seconds: started.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle(n: usize, r: f64) -> BoundaryCurve {
        BoundaryCurve::new(
            (0..n)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / n as f64;
                    Point::new(r * t.cos(), r * t.sin())
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn forcing_values() {
        let f = Forcing::oscillatory();
        assert_eq!(f.value(0.0), 500.0);
        assert!((f.value(2e-3) + 500.0).abs() < 1e-9);
        assert!((f.integral(1e-3) - 1.0 / PI).abs() < 1e-12);
        assert_eq!(Forcing::None.value(1.0), 0.0);
    }

    #[test]
    fn uniform_expansion_euler_and_rk2() {
        let c = circle(64, 1.0);
        let model = UniformSpeed {
            value: 1.0,
            forcing: Forcing::None,
            stencil: None,
        };
        for step in [step_forward_euler::<UniformSpeed>, step_rk2::<UniformSpeed>] {
            let s = step(&model, &c, 0.0, 0.01).unwrap();
            for p in s.curve.points() {
                assert!((p.norm() - 1.01).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn run_reaches_end_with_snapshots() {
        let c = circle(48, 1.0);
        let config = SimulationConfig {
            dt: 0.01,
            t_end: 0.1,
            snapshot_every: 5,
            ..SimulationConfig::default()
        };
        let model = UniformSpeed {
            value: 1.0,
            forcing: Forcing::None,
            stencil: None,
        };
        let mut seen = 0;
        let traj = run_observed(&c, &config, &model, |_| seen += 1).unwrap();
        assert!(traj.completed());
        assert_eq!(traj.steps_taken, 10);
        assert_eq!(seen, 11);
        assert_eq!(traj.snapshots.len(), 3);
        assert_eq!(traj.history.len(), 11);
        let d = traj.history.last().unwrap();
        assert!((d.d_min - 1.1).abs() < 1e-8 && (d.d_max - 1.1).abs() < 1e-8);
    }

    struct HalfInversion;

    impl VelocityModel for HalfInversion {
        fn field(&self, curve: &BoundaryCurve, t: f64) -> Result<VelocityField> {
            let n = curve.len();
            let mut f = UniformSpeed {
                value: 0.0,
                forcing: Forcing::None,
                stencil: None,
            }
            .field(curve, t)?;
            for (i, v) in f.velocity.iter_mut().enumerate() {
                *v = if i < n / 2 { -1.7 } else { 0.0 };
            }
            Ok(f)
        }
    }

    #[test]
    fn tangling_is_reported_not_panicked() {
        let c = circle(32, 1.0);
        let config = SimulationConfig {
            dt: 1.0,
            t_end: 3.0,
            ..SimulationConfig::default()
        };
        let traj = run_observed(&c, &config, &HalfInversion, |_| {}).unwrap();
        assert!(!traj.completed());
        assert_eq!(traj.steps_taken, 0);
        assert!(matches!(traj.failure, Some(Error::SelfIntersection { .. })));
    }

    #[test]
    fn diagnostics_of_circle() {
        let d = diagnostics(&circle(200, 2.0), 0.5);
        assert!((d.area - 4.0 * PI).abs() < 1e-2);
        assert!(d.center[0].abs() < 1e-12 && d.center[1].abs() < 1e-12);
        assert!((d.d_min - 2.0).abs() < 1e-12);
        assert_eq!(d.time, 0.5);
    }

    #[test]
    fn crossing_detection() {
        let square = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        assert_eq!(first_crossing(&square), None);
        let bow = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ];
        assert!(first_crossing(&bow).is_some());
    }

    #[test]
    fn remesh_keeps_count_and_first_point() {
        let pts: Vec<Point> = (0..60)
            .map(|k| {
                let t = 2.0 * PI * (k as f64 / 60.0).powf(1.3);
                Point::new(t.cos(), 0.5 * t.sin())
            })
            .collect();
        let c = BoundaryCurve::new(pts).unwrap();
        let r = remesh(&c).unwrap();
        assert_eq!(r.len(), 60);
        assert_eq!(r.point(0), c.point(0));
        let gaps: Vec<f64> = (0..60)
            .map(|i| (r.point(r.next(i)) - r.point(i)).norm())
            .collect();
        let (lo, hi) = gaps
            .iter()
            .fold((f64::MAX, 0.0_f64), |(a, b), g| (a.min(*g), b.max(*g)));
        assert!(hi / lo < 1.01, "{lo} {hi}");
    }
}
