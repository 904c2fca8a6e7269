//! Discrete single-layer system `A Vₙ = b`.
//!
//! Boundary segment `j` runs from node `j` to node `j + 1` and is
//! parameterized by chart `j` over `[0, Δs_j]`. Row `i` integrates the two
//! segments adjacent to node `i` with chart `i` over `[Δs_{−i}, Δs_i]`, where
//! the kernel splits into `ln|s|` (integrated exactly against the quadratic
//! interpolant of `Vₙ √(1+p′²)` through the three nodes) plus the smooth
//! remainder `ln(1 + p²/s²)`. Every other segment uses the composite
//! trapezoid rule on node values.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::BoundaryCurve;
use crate::error::{Error, Result};
use crate::geometry::LocalChart;
use crate::kernel::{diagonal_kernel_limit, grad_greens_dot_normal, greens, log_moments};
use crate::linalg::DenseMatrix;
use crate::Point;

/// Quadrature for the regular parts of `b`. `A` is always trapezoidal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    Trapezoid,
    Simpson,
}

impl QuadratureRule {
    pub fn name(self) -> &'static str {
        match self {
            QuadratureRule::Trapezoid => "trapezoid",
            QuadratureRule::Simpson => "simpson",
        }
    }
}

impl std::str::FromStr for QuadratureRule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "trapezoid" => Ok(QuadratureRule::Trapezoid),
            "simpson" => Ok(QuadratureRule::Simpson),
            other => Err(format!("unknown quadrature rule {other:?}")),
        }
    }
}

/// When `‖A·1‖∞ / ‖A‖∞` falls below this the curve is flagged as close to
/// logarithmic capacity one, where the single layer nearly annihilates
/// constants.
pub const CAPACITY_RATIO_WARN: f64 = 1e-2;

#[derive(Debug, Clone)]
pub struct BieSystem {
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
    /// Condition estimate of each node's GMLS normal equations.
    pub stencil_condition: Vec<f64>,
    /// `‖A·1‖∞ / ‖A‖∞`.
    pub capacity_ratio: f64,
}

impl BieSystem {
    pub fn len(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }

    pub fn near_capacity_one(&self) -> bool {
        self.capacity_ratio < CAPACITY_RATIO_WARN
    }
}

fn check_charts(curve: &BoundaryCurve, charts: &[LocalChart]) -> Result<()> {
    if charts.len() != curve.len() {
        return Err(Error::Dimension(format!(
            "{} charts for {} points",
            charts.len(),
            curve.len()
        )));
    }
    if let Some((i, c)) = charts
        .iter()
        .enumerate()
        .find(|(_, c)| !(c.ds_plus > 0.0 && c.ds_minus < 0.0))
    {
        return Err(Error::Tangled {
            index: i,
            ds_plus: c.ds_plus,
            ds_minus: c.ds_minus,
        });
    }
    Ok(())
}

/// Weights of `V_{i−1}, V_i, V_{i+1}` in `∫_{Δs_{−i}}^{Δs_i} ln|s| ψ̃(s) ds`,
/// where `ψ̃` interpolates `Vₙ √(1+p′²)` at `s = Δs_{−i}, 0, Δs_i`.
///
/// Multiply by `−1/2π` for the matrix contribution.
pub fn log_interpolation_weights(chart: &LocalChart) -> [f64; 3] {
    let (a, b) = (chart.ds_minus, chart.ds_plus);
    let m = log_moments(a, b);
    let (wm, w0, wp) = (chart.metric(a), chart.metric(0.0), chart.metric(b));
    let prev = wm * (-b * m.m1 + m.m2) / (a * (a - b));
    let this = w0 * (m.m0 - (a + b) / (a * b) * m.m1 + m.m2 / (a * b));
    let next = wp * (a * m.m1 - m.m2) / (b * (a - b));
    [prev, this, next]
}

/// Per-segment trapezoid end weights `√(1+p_j′(0)²) Δs_j / 2` and
/// `√(1+p_j′(Δs_j)²) Δs_j / 2`.
fn segment_end_weights(charts: &[LocalChart]) -> (Vec<f64>, Vec<f64>) {
    charts
        .iter()
        .map(|c| {
            let h = 0.5 * c.ds_plus;
            (c.metric(0.0) * h, c.metric(c.ds_plus) * h)
        })
        .unzip()
}

fn fill_a_row(
    i: usize,
    row: &mut [f64],
    points: &[Point],
    charts: &[LocalChart],
    start_w: &[f64],
    end_w: &[f64],
) {
    let n = points.len();
    let prev = (i + n - 1) % n;
    let next = (i + 1) % n;
    let xi = points[i];
    for j in 0..n {
        if j == i {
            row[j] = 0.0;
            continue;
        }
        let mut w = 0.0;
        if j != prev {
            w += start_w[j];
        }
        if j != next {
            w += end_w[(j + n - 1) % n];
        }
        row[j] = greens(xi, points[j]) * w;
    }

    let chart = &charts[i];
    let [wp, w0, wn] = log_interpolation_weights(chart);
    let c = -1.0 / (2.0 * PI);
    row[prev] += c * wp;
    row[i] += c * w0;
    row[next] += c * wn;

    // smooth remainder of the self segment pair, trapezoid in s (zero at s = 0)
    let (a, b) = (chart.ds_minus, chart.ds_plus);
    let ratio = |s: f64| {
        let q = chart.p(s) / s;
        (1.0 + q * q).ln()
    };
    row[prev] += ratio(a) * chart.metric(a) * a / (8.0 * PI);
    row[next] -= ratio(b) * chart.metric(b) * b / (8.0 * PI);
}

/// Dense `A` with the explicit singular, near-singular and trapezoid entries.
pub fn assemble_a(curve: &BoundaryCurve, charts: &[LocalChart]) -> Result<DenseMatrix> {
    check_charts(curve, charts)?;
    let n = curve.len();
    let points = curve.points();
    let (start_w, end_w) = segment_end_weights(charts);
    let mut a = DenseMatrix::zeros(n, n);
    a.as_rows_par()
        .enumerate()
        .for_each(|(i, row)| fill_a_row(i, row, points, charts, &start_w, &end_w));
    if let Some((row, col)) = a.first_non_finite() {
        return Err(Error::NonFinite { row, col });
    }
    Ok(a)
}

/// Geometry sampled at a segment midpoint, pre-multiplied by the metric:
/// `(position, normal, κ √(1+p′²))`.
#[derive(Clone, Copy)]
struct MidSample {
    pos: Point,
    normal: Point,
    weighted_kappa: f64,
}

fn mid_sample(chart: &LocalChart, s: f64) -> MidSample {
    MidSample {
        pos: chart.embed(s),
        normal: chart.normal_at(s),
        weighted_kappa: chart.curvature(s) * chart.metric(s),
    }
}

/// Right-hand side `b_i = −κ_i/2 − ∫ κ ∇G·n dS`.
pub fn assemble_b(curve: &BoundaryCurve, charts: &[LocalChart], rule: QuadratureRule) -> Result<Vec<f64>> {
    check_charts(curve, charts)?;
    let n = curve.len();
    let points = curve.points();
    let kappa: Vec<f64> = charts.iter().map(LocalChart::node_curvature).collect();
    let (start_w, end_w) = segment_end_weights(charts);
    let mids: Vec<MidSample> = match rule {
        QuadratureRule::Trapezoid => Vec::new(),
        QuadratureRule::Simpson => charts.iter().map(|c| mid_sample(c, 0.5 * c.ds_plus)).collect(),
    };

    let rhs: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let prev = (i + n - 1) % n;
            let next = (i + 1) % n;
            let xi = points[i];
            let chart = &charts[i];
            let (a, b) = (chart.ds_minus, chart.ds_plus);
            let f = |j: usize| kappa[j] * grad_greens_dot_normal(xi, points[j], charts[j].normal);
            let f_self = kappa[i] * diagonal_kernel_limit(chart) * chart.metric(0.0);
            let f_prev = f(prev) * chart.metric(a);
            let f_next = f(next) * chart.metric(b);

            // Trapezoid weights: far segments contribute their end weights,
            // the two self segments use chart i.
            let mut integral = 0.0;
            for j in 0..n {
                if j == i || j == prev || j == next {
                    continue;
                }
                integral += f(j) * (start_w[j] + end_w[(j + n - 1) % n]);
            }
            integral += f(next) * start_w[next];
            integral += f(prev) * end_w[(prev + n - 1) % n];

            match rule {
                QuadratureRule::Trapezoid => {
                    integral += -0.5 * a * (f_prev + f_self) + 0.5 * b * (f_self + f_next);
                }
                QuadratureRule::Simpson => {
                    // Simpson is a third of the trapezoid sum plus 4/6 h f(mid).
                    integral /= 3.0;
                    let g = |m: &MidSample| m.weighted_kappa * grad_greens_dot_normal(xi, m.pos, m.normal);
                    for j in 0..n {
                        if j == i || j == prev {
                            continue;
                        }
                        integral += 4.0 / 6.0 * charts[j].ds_plus * g(&mids[j]);
                    }
                    let lower = g(&mid_sample(chart, 0.5 * a));
                    let upper = g(&mid_sample(chart, 0.5 * b));
                    integral += -a / 6.0 * (f_prev + 4.0 * lower + f_self);
                    integral += b / 6.0 * (f_self + 4.0 * upper + f_next);
                }
            }
            -0.5 * kappa[i] - integral
        })
        .collect();

    if let Some(i) = rhs.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { row: i, col: 0 });
    }
    Ok(rhs)
}

/// Full system with diagnostics.
pub fn assemble(curve: &BoundaryCurve, charts: &[LocalChart], rule: QuadratureRule) -> Result<BieSystem> {
    let matrix = assemble_a(curve, charts)?;
    let rhs = assemble_b(curve, charts, rule)?;
    let ones = matrix.matvec(&vec![1.0; curve.len()]);
    let ones_norm = ones.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let a_norm = matrix.norm_inf();
    let capacity_ratio = if a_norm > 0.0 { ones_norm / a_norm } else { 0.0 };
    Ok(BieSystem {
        matrix,
        rhs,
        stencil_condition: charts.iter().map(|c| c.fit_condition).collect(),
        capacity_ratio,
    })
}
