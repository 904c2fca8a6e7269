//! Initial shapes, exact solutions, error metrics and convergence studies.

use std::f64::consts::PI;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curve::BoundaryCurve;
use crate::error::{Error, Result};
use crate::evolution::{run, run_observed, BieModel, Forcing, SimulationConfig};
use crate::geometry::{curvature_rmse, StencilParams};
use crate::output::{parse_control_points, read_control_points};
use crate::spline::PeriodicSpline;
use crate::Point;

/// Control points of the bundled humanoid outline.
pub const HUMANOID_CONTROL_POINTS: &str = include_str!("../data/humanoid.csv");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeKind {
    Circle,
    /// `r(θ) = r0 + D1 cos(D2 θ)`.
    PerturbedCircle {
        r0: f64,
        d1: f64,
        d2: u32,
    },
    /// `(sin θ, 1.5 cos θ − 0.4 cos 2θ − 0.1 cos 3θ − 0.1 cos 4θ)`.
    Heart,
    /// Periodic spline through a closed control polygon; `None` uses the
    /// bundled 25-point outline.
    Humanoid {
        control_points: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sampling {
    /// `θ_k = 2πk/N`.
    UniformAngle,
    /// `N` sorted angles drawn uniformly from `[0, 2π)`.
    UniformRandom { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    pub n_points: usize,
    pub sampling: Sampling,
}

impl ShapeSpec {
    pub fn circle(n_points: usize) -> Self {
        ShapeSpec {
            kind: ShapeKind::Circle,
            n_points,
            sampling: Sampling::UniformAngle,
        }
    }

    pub fn perturbed_circle(n_points: usize, r0: f64, d1: f64, d2: u32) -> Self {
        ShapeSpec {
            kind: ShapeKind::PerturbedCircle { r0, d1, d2 },
            n_points,
            sampling: Sampling::UniformAngle,
        }
    }

    pub fn heart(n_points: usize) -> Self {
        ShapeSpec {
            kind: ShapeKind::Heart,
            n_points,
            sampling: Sampling::UniformAngle,
        }
    }

    pub fn humanoid(n_points: usize) -> Self {
        ShapeSpec {
            kind: ShapeKind::Humanoid { control_points: None },
            n_points,
            sampling: Sampling::UniformAngle,
        }
    }

    pub fn with_sampling(mut self, sampling: Sampling) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < crate::curve::MIN_POINTS {
            return Err(Error::InvalidInput(format!(
                "n_points = {} is below {}",
                self.n_points,
                crate::curve::MIN_POINTS
            )));
        }
        if let ShapeKind::PerturbedCircle { r0, d1, d2 } = self.kind {
            if !(r0 > 0.0) || !(d1 >= 0.0) || d1 >= r0 {
                return Err(Error::InvalidInput(format!(
                    "perturbed circle needs r0 > 0 and 0 <= D1 < r0, got r0 = {r0}, D1 = {d1}"
                )));
            }
            if 4 * d2 as usize >= self.n_points {
                log::warn!(
                    "D2 = {d2} is at least N/4 = {}; the perturbation is under-resolved",
                    self.n_points / 4
                );
            }
        }
        Ok(())
    }
}

fn angles(n: usize, sampling: Sampling) -> Vec<f64> {
    match sampling {
        Sampling::UniformAngle => (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect(),
        Sampling::UniformRandom { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut th: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
            th.sort_by(f64::total_cmp);
            th
        }
    }
}

pub fn heart_point(theta: f64) -> Point {
    Point::new(
        theta.sin(),
        1.5 * theta.cos() - 0.4 * (2.0 * theta).cos() - 0.1 * (3.0 * theta).cos() - 0.1 * (4.0 * theta).cos(),
    )
}

pub fn perturbed_circle_point(theta: f64, r0: f64, d1: f64, d2: u32) -> Point {
    let r = r0 + d1 * (d2 as f64 * theta).cos();
    Point::new(r * theta.cos(), r * theta.sin())
}

/// Sample the initial curve described by `spec`, counterclockwise.
pub fn make_shape(spec: &ShapeSpec) -> Result<BoundaryCurve> {
    spec.validate()?;
    let n = spec.n_points;
    match &spec.kind {
        ShapeKind::Circle => BoundaryCurve::new(
            angles(n, spec.sampling)
                .into_iter()
                .map(|t| Point::new(t.cos(), t.sin()))
                .collect(),
        ),
        &ShapeKind::PerturbedCircle { r0, d1, d2 } => BoundaryCurve::new(
            angles(n, spec.sampling)
                .into_iter()
                .map(|t| perturbed_circle_point(t, r0, d1, d2))
                .collect(),
        ),
        // runs clockwise in θ
        ShapeKind::Heart => {
            BoundaryCurve::from_ordered(angles(n, spec.sampling).into_iter().map(heart_point).collect())
        }
        ShapeKind::Humanoid { control_points } => {
            let control = match control_points {
                Some(path) => read_control_points(path)?,
                None => parse_control_points(HUMANOID_CONTROL_POINTS, "bundled humanoid outline")?,
            };
            let control = BoundaryCurve::from_ordered(control)?;
            let spline = PeriodicSpline::new(control.points())?;
            BoundaryCurve::new(spline.resample(n))
        }
    }
}

/// `R(t) = 1 + sin(500πt)/π` for the forced unit circle.
pub fn exact_circle_radius(t: f64) -> f64 {
    1.0 + (500.0 * PI * t).sin() / PI
}

/// Radius of the circle with the area of `r0 + D1 cos(D2 θ)`.
pub fn steady_radius(r0: f64, d1: f64) -> f64 {
    (r0 * r0 + 0.5 * d1 * d1).sqrt()
}

/// Root-mean-square difference of nodal velocities.
pub fn velocity_error_l2(computed: &[f64], exact: &[f64]) -> Result<f64> {
    if computed.len() != exact.len() {
        return Err(Error::Dimension(format!(
            "{} computed values against {} exact",
            computed.len(),
            exact.len()
        )));
    }
    Ok(crate::geometry::rms_difference(computed, exact))
}

/// `max_i |‖x_i‖ − R| / R` for a curve meant to be the origin-centered circle of radius `R`.
pub fn relative_radius_error(curve: &BoundaryCurve, radius: f64) -> f64 {
    curve
        .points()
        .iter()
        .fold(0.0_f64, |m, p| m.max((p.norm() - radius).abs() / radius))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMetric {
    EKappa,
    EV,
    ER,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Points,
    TimeStep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub metric: ErrorMetric,
    pub axis_kind: Axis,
    /// Sorted ascending.
    pub axis: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `ln error` against `ln axis`.
    pub slope: f64,
    pub label: String,
}

impl ConvergenceReport {
    /// Sorts the data by axis value and fits the slope.
    pub fn new(
        metric: ErrorMetric,
        axis_kind: Axis,
        data: Vec<(f64, f64)>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let mut data = data;
        data.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (axis, errors): (Vec<f64>, Vec<f64>) = data.into_iter().unzip();
        let slope = loglog_slope(&axis, &errors)?;
        Ok(ConvergenceReport {
            metric,
            axis_kind,
            axis,
            errors,
            slope,
            label: label.into(),
        })
    }

    /// Convergence order: `−slope` against `N`, `slope` against `Δt`.
    pub fn order(&self) -> f64 {
        match self.axis_kind {
            Axis::Points => -self.slope,
            Axis::TimeStep => self.slope,
        }
    }

    /// Whether the error strictly improves with refinement.
    pub fn monotone(&self) -> bool {
        match self.axis_kind {
            Axis::Points => self.errors.windows(2).all(|w| w[1] < w[0]),
            Axis::TimeStep => self.errors.windows(2).all(|w| w[1] > w[0]),
        }
    }
}

/// Least-squares slope of `ln y` on `ln x`, skipping `y ≤ 10 ε`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, e)| **e > 10.0 * f64::EPSILON && **a > 0.0 && e.is_finite())
        .map(|(a, e)| (a.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} usable points for a slope, need at least 2",
            pts.len()
        )));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all axis values coincide".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(sxy / sxx)
}

fn require_three(len: usize, what: &str) -> Result<()> {
    if len < 3 {
        return Err(Error::InsufficientData(format!(
            "{what} needs at least 3 values, got {len}"
        )));
    }
    Ok(())
}

/// Median over `seeds` of the node-curvature RMS error on uniformly random
/// samples of the unit circle, for each `N`. Stencils follow
/// [`StencilParams::log_rule`].
pub fn curvature_convergence_study(
    n_values: &[usize],
    degree: usize,
    seeds: &[u64],
) -> Result<ConvergenceReport> {
    require_three(n_values.len(), "curvature study")?;
    if seeds.is_empty() {
        return Err(Error::InsufficientData(
            "curvature study needs at least one seed".into(),
        ));
    }
    let mut data = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let params = StencilParams::log_rule(n, degree);
        let mut errs = seeds
            .iter()
            .map(|&seed| {
                let curve =
                    make_shape(&ShapeSpec::circle(n).with_sampling(Sampling::UniformRandom { seed }))?;
                curvature_rmse(&curve, &vec![1.0; n], &params)
            })
            .collect::<Result<Vec<f64>>>()?;
        errs.sort_by(f64::total_cmp);
        let mid = errs.len() / 2;
        let median = if errs.len() % 2 == 1 {
            errs[mid]
        } else {
            0.5 * (errs[mid - 1] + errs[mid])
        };
        log::info!(
            "curvature study: N = {n}, k = {}, median e_kappa = {median:.3e}",
            params.k
        );
        data.push((n as f64, median));
    }
    ConvergenceReport::new(
        ErrorMetric::EKappa,
        Axis::Points,
        data,
        format!("degree {degree}"),
    )
}

/// Forced-circle velocity error at `template.t_end` for each `N`.
///
/// The template supplies `dt`, `t_end`, the stepper and the quadrature rule;
/// forcing is set to the oscillatory `h` and the stencil follows the `√N`
/// rule unless `template.k` is fixed.
pub fn spatial_convergence_study(
    template: &SimulationConfig,
    n_values: &[usize],
) -> Result<ConvergenceReport> {
    require_three(n_values.len(), "spatial study")?;
    let mut config = template.clone();
    config.forcing = Forcing::oscillatory();
    config.remesh_every = 0;
    let mut data = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let curve = make_shape(&ShapeSpec::circle(n))?;
        let traj = run(&curve, &config)?;
        if let Some(e) = traj.failure {
            return Err(e);
        }
        let last = traj
            .snapshots
            .last()
            .expect("run always records a final snapshot");
        let exact = vec![config.forcing.value(last.time); n];
        let err = velocity_error_l2(&last.velocity, &exact)?;
        log::info!(
            "spatial study ({}): N = {n}, e_V = {err:.3e}",
            config.b_rule.name()
        );
        data.push((n as f64, err));
    }
    ConvergenceReport::new(ErrorMetric::EV, Axis::Points, data, config.b_rule.name())
}

/// Largest relative radius error of the forced circle over every time level
/// up to `t_end`.
pub fn forced_circle_radius_error(n: usize, config: &SimulationConfig) -> Result<f64> {
    let mut config = config.clone();
    config.forcing = Forcing::oscillatory();
    let curve = make_shape(&ShapeSpec::circle(n))?;
    let model = BieModel {
        config: config.clone(),
    };
    let mut worst = 0.0_f64;
    let traj = run_observed(&curve, &config, &model, |s| {
        worst = worst.max(relative_radius_error(&s.curve, exact_circle_radius(s.time)));
    })?;
    match traj.failure {
        Some(e) => Err(e),
        None => Ok(worst),
    }
}

/// Forced-circle `e_R` for each `Δt` with `n` points.
pub fn temporal_convergence_study(
    template: &SimulationConfig,
    n: usize,
    dt_values: &[f64],
) -> Result<ConvergenceReport> {
    require_three(dt_values.len(), "temporal study")?;
    let mut data = Vec::with_capacity(dt_values.len());
    for &dt in dt_values {
        let mut config = template.clone();
        config.dt = dt;
        let err = forced_circle_radius_error(n, &config)?;
        log::info!(
            "temporal study ({}): dt = {dt:.3e}, e_R = {err:.3e}",
            config.stepper.name()
        );
        data.push((dt, err));
    }
    ConvergenceReport::new(ErrorMetric::ER, Axis::TimeStep, data, template.stepper.name())
}

/// Lag in `[min_lag, max_lag]` (in samples) maximizing the Pearson
/// correlation between `series[..m - lag]` and `series[lag..]`.
pub fn autocorrelation_peak(series: &[f64], min_lag: usize, max_lag: usize) -> Option<(usize, f64)> {
    let m = series.len();
    if min_lag > max_lag || max_lag + 2 > m {
        return None;
    }
    let pearson = |a: &[f64], b: &[f64]| {
        let n = a.len() as f64;
        let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
        let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
        for (x, y) in a.iter().zip(b) {
            sab += (x - ma) * (y - mb);
            saa += (x - ma) * (x - ma);
            sbb += (y - mb) * (y - mb);
        }
        if saa == 0.0 || sbb == 0.0 {
            f64::NAN
        } else {
            sab / (saa * sbb).sqrt()
        }
    };
    (min_lag..=max_lag)
        .map(|lag| (lag, pearson(&series[..m - lag], &series[lag..])))
        .filter(|(_, r)| r.is_finite())
        .max_by(|a, b| a.1.total_cmp(&b.1))
}
