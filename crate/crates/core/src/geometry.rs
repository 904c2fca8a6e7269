//! Local differential geometry of a point-cloud curve.
//!
//! Each node gets a chart `ι(s) = x + t s + n p(s)` where `p` is a polynomial
//! without constant term, fitted by least squares to the node's k-nearest
//! neighbours in the local tangent/normal frame. The frame starts from the
//! leading singular direction of the neighbour displacements and is refined
//! by rotating the tangent along the fitted slope until the linear
//! coefficient vanishes.

use rayon::prelude::*;
use thiserror::Error;

use crate::curve::BoundaryCurve;
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, LuFactors};
use crate::neighbors::k_nearest;
use crate::Point;

/// Above this slope a chart that exhausted its iterations is an error rather
/// than a flagged chart.
pub const HARD_ALPHA1_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilParams {
    /// Neighbour count, center included.
    pub k: usize,
    /// Polynomial degree `ℓ`.
    pub degree: usize,
    pub chart_tol: f64,
    pub max_chart_iters: usize,
}

impl StencilParams {
    pub fn new(k: usize, degree: usize) -> Self {
        StencilParams {
            k,
            degree,
            chart_tol: 1e-12,
            max_chart_iters: 20,
        }
    }

    /// `k` = largest odd integer not above `√n`, raised to the smallest odd
    /// integer ≥ `degree + 2` when that is larger.
    pub fn sqrt_rule(n: usize, degree: usize) -> Self {
        Self::new(odd_stencil((n as f64).sqrt(), n, degree), degree)
    }

    /// `k` = largest odd integer not above `2 ln n` (same floor as
    /// [`StencilParams::sqrt_rule`]). The stencil then spans a multiple of the
    /// `ln N / N` fill distance of uniformly random samples.
    pub fn log_rule(n: usize, degree: usize) -> Self {
        Self::new(odd_stencil(2.0 * (n as f64).ln(), n, degree), degree)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let mut problems = Vec::new();
        if self.degree < 2 {
            problems.push(format!("degree {} < 2", self.degree));
        }
        if self.k.is_multiple_of(2) {
            problems.push(format!("k = {} is not odd", self.k));
        }
        if self.k <= self.degree {
            problems.push(format!("k = {} must exceed degree {}", self.k, self.degree));
        }
        if self.k > n {
            problems.push(format!("k = {} exceeds point count {n}", self.k));
        }
        if !(self.chart_tol > 0.0) {
            problems.push("chart_tol must be positive".into());
        }
        if self.max_chart_iters == 0 {
            problems.push("max_chart_iters must be positive".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInput(problems.join(", ")))
        }
    }
}

fn odd_stencil(target: f64, n: usize, degree: usize) -> usize {
    let mut k = target.floor().max(1.0) as usize;
    if k.is_multiple_of(2) {
        k -= 1;
    }
    let mut floor = degree + 2;
    if floor.is_multiple_of(2) {
        floor += 1;
    }
    let mut k = k.max(floor);
    if k > n {
        k = if n % 2 == 1 { n } else { n - 1 };
    }
    k
}

/// Failure of a single least-squares fit.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum FitError {
    #[error("{distinct} distinct tangent coordinates, degree {degree} needs {}", .degree + 1)]
    TooFewDistinct { distinct: usize, degree: usize },
    #[error("rank-deficient normal equations at column {column}")]
    RankDeficient { column: usize },
    #[error("mismatched coordinate lengths")]
    Length,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmlsFit {
    /// `α_1 … α_ℓ`.
    pub coeffs: Vec<f64>,
    /// 1-norm condition estimate of the scaled normal-equation matrix.
    pub condition: f64,
}

/// Least-squares polynomial `p(s) = Σ_{r=1..ℓ} α_r s^r` through the origin.
///
/// Coordinates are divided by their largest magnitude before forming the
/// normal equations `ΦᵀΦ α = ΦᵀΨ`, which are solved with partial pivoting.
pub fn gmls_fit(tangent: &[f64], normal: &[f64], degree: usize) -> Result<GmlsFit, FitError> {
    if tangent.len() != normal.len() {
        return Err(FitError::Length);
    }
    let scale = tangent.iter().fold(0.0_f64, |m, s| m.max(s.abs()));
    let distinct = count_distinct(tangent, scale * 1e-12);
    if scale == 0.0 || distinct < degree + 1 {
        return Err(FitError::TooFewDistinct { distinct, degree });
    }

    let mut gram = DenseMatrix::zeros(degree, degree);
    let mut rhs = vec![0.0; degree];
    let mut powers = vec![0.0; 2 * degree + 1];
    for (&s, &y) in tangent.iter().zip(normal) {
        let u = s / scale;
        powers[0] = 1.0;
        for r in 1..powers.len() {
            powers[r] = powers[r - 1] * u;
        }
        for r in 0..degree {
            rhs[r] += powers[r + 1] * y;
            for q in 0..degree {
                gram[(r, q)] += powers[r + q + 2];
            }
        }
    }
    let lu = LuFactors::factor(&gram).map_err(|e| match e {
        Error::Singular { pivot } => FitError::RankDeficient { column: pivot },
        _ => FitError::RankDeficient { column: 0 },
    })?;
    let condition = lu.condition_estimate(gram.norm_1());
    if !(condition < 1e15) {
        return Err(FitError::RankDeficient { column: degree - 1 });
    }
    let scaled = lu.solve(&rhs);
    let mut coeffs = Vec::with_capacity(degree);
    let mut sp = 1.0;
    for c in scaled {
        sp *= scale;
        coeffs.push(c / sp);
    }
    Ok(GmlsFit { coeffs, condition })
}

fn count_distinct(values: &[f64], tol: f64) -> usize {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mut count = 0;
    let mut last = f64::NEG_INFINITY;
    for x in v {
        if count == 0 || x - last > tol {
            count += 1;
            last = x;
        }
    }
    count
}

/// Unit tangent `t` and normal `n` from the leading right-singular vector of
/// the stencil displacements. `n` is `t` rotated by −π/2 and `t` points
/// along `toward`.
pub fn svd_frame(displacements: &[Point], toward: Point) -> Option<(Point, Point)> {
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for d in displacements {
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    if sxx + syy == 0.0 {
        return None;
    }
    let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let mut t = Point::new(angle.cos(), angle.sin());
    if t.dot(&toward) < 0.0 {
        t = -t;
    }
    Some((t, rotate_cw(t)))
}

/// Local SVD frame at node `i` of a curve, from its `k` nearest neighbours.
pub fn local_svd_frame(curve: &BoundaryCurve, i: usize, k: usize) -> Result<(Point, Point)> {
    let x = curve.point(i);
    let disp: Vec<Point> = k_nearest(curve.points(), i, k)
        .into_iter()
        .map(|j| curve.point(j) - x)
        .collect();
    svd_frame(&disp, curve.point(curve.next(i)) - x).ok_or_else(|| Error::DegenerateStencil {
        index: i,
        reason: "all stencil points coincide".into(),
    })
}

/// `v` rotated by −π/2; maps a counterclockwise tangent to the outward normal.
pub fn rotate_cw(v: Point) -> Point {
    Point::new(v.y, -v.x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalChart {
    pub center_index: usize,
    /// Position of the node the chart is centered on.
    pub origin: Point,
    pub tangent: Point,
    pub normal: Point,
    /// `α_1 … α_ℓ`; `α_1 ≈ 0` after refinement.
    pub coeffs: Vec<f64>,
    /// `tᵀ(x_{i+1} − x_i) > 0`.
    pub ds_plus: f64,
    /// `tᵀ(x_{i−1} − x_i) < 0`.
    pub ds_minus: f64,
    /// Whether `|α_1|` reached the chart tolerance.
    pub converged: bool,
    /// Number of least-squares fits performed.
    pub fits: usize,
    pub fit_condition: f64,
}

impl LocalChart {
    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn alpha(&self, r: usize) -> f64 {
        self.coeffs.get(r - 1).copied().unwrap_or(0.0)
    }

    pub fn p(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, a| (acc + a) * s)
    }

    pub fn dp(&self, s: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (r, a)| acc * s + (r + 1) as f64 * a)
    }

    pub fn d2p(&self, s: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (r, a)| acc * s + ((r + 1) * r) as f64 * a)
    }

    /// `−p″(s) / (1 + p′(s)²)^{3/2}`; positive for convex boundaries.
    pub fn curvature(&self, s: f64) -> f64 {
        let d1 = self.dp(s);
        -self.d2p(s) / (1.0 + d1 * d1).powf(1.5)
    }

    /// Curvature at the chart's own node.
    pub fn node_curvature(&self) -> f64 {
        self.curvature(0.0)
    }

    /// Arc-length density `√(1 + p′(s)²)`.
    pub fn metric(&self, s: f64) -> f64 {
        let d1 = self.dp(s);
        (1.0 + d1 * d1).sqrt()
    }

    pub fn embed(&self, s: f64) -> Point {
        chart_embed(self, self.origin, s)
    }

    /// Outward unit normal of the chart curve at parameter `s`.
    pub fn normal_at(&self, s: f64) -> Point {
        let d1 = self.dp(s);
        (self.normal - self.tangent * d1) / (1.0 + d1 * d1).sqrt()
    }

    /// Largest parameter magnitude the chart is trusted on.
    pub fn trust_radius(&self) -> f64 {
        self.ds_plus.max(-self.ds_minus)
    }
}

/// `base + t s + n p(s)`.
pub fn chart_embed(chart: &LocalChart, base: Point, s: f64) -> Point {
    base + chart.tangent * s + chart.normal * chart.p(s)
}

/// Curvature of `chart` at parameter `s`.
pub fn curvature(chart: &LocalChart, s: f64) -> f64 {
    chart.curvature(s)
}

/// Chart failure before a node index is attached.
#[derive(Debug, Clone, PartialEq)]
pub enum ChartError {
    Coincident,
    Fit(FitError),
    NotConverged { alpha1: f64, fits: usize },
    Tangled { ds_plus: f64, ds_minus: f64 },
}

impl ChartError {
    fn at(self, index: usize) -> Error {
        match self {
            ChartError::Coincident => Error::DegenerateStencil {
                index,
                reason: "all stencil points coincide".into(),
            },
            ChartError::Fit(e) => Error::DegenerateStencil {
                index,
                reason: e.to_string(),
            },
            ChartError::NotConverged { alpha1, fits } => Error::ChartNotConverged {
                index,
                alpha1,
                iterations: fits,
            },
            ChartError::Tangled { ds_plus, ds_minus } => Error::Tangled {
                index,
                ds_plus,
                ds_minus,
            },
        }
    }
}

/// Iterated GMLS chart from explicit stencil data.
///
/// `stencil` holds the neighbour positions (the origin included), `next` and
/// `prev` the curve neighbours used for orientation and the `Δs` offsets.
pub fn chart_from_stencil(
    origin: Point,
    stencil: &[Point],
    next: Point,
    prev: Point,
    params: &StencilParams,
) -> Result<LocalChart, ChartError> {
    let disp: Vec<Point> = stencil.iter().map(|p| p - origin).collect();
    let (mut tangent, _) = svd_frame(&disp, next - origin).ok_or(ChartError::Coincident)?;

    let mut s = vec![0.0; disp.len()];
    let mut y = vec![0.0; disp.len()];
    let mut fits = 0;
    let (fit, normal, converged) = loop {
        let normal = rotate_cw(tangent);
        for (j, d) in disp.iter().enumerate() {
            s[j] = tangent.dot(d);
            y[j] = normal.dot(d);
        }
        let fit = gmls_fit(&s, &y, params.degree).map_err(ChartError::Fit)?;
        fits += 1;
        let alpha1 = fit.coeffs[0];
        if alpha1.abs() <= params.chart_tol {
            break (fit, normal, true);
        }
        if fits >= params.max_chart_iters {
            if alpha1.abs() > HARD_ALPHA1_LIMIT {
                return Err(ChartError::NotConverged { alpha1, fits });
            }
            break (fit, normal, false);
        }
        tangent = (tangent + normal * alpha1).normalize();
    };

    let ds_plus = tangent.dot(&(next - origin));
    let ds_minus = tangent.dot(&(prev - origin));
    if !(ds_plus > 0.0 && ds_minus < 0.0) {
        return Err(ChartError::Tangled { ds_plus, ds_minus });
    }
    Ok(LocalChart {
        center_index: 0,
        origin,
        tangent,
        normal,
        coeffs: fit.coeffs,
        ds_plus,
        ds_minus,
        converged,
        fits,
        fit_condition: fit.condition,
    })
}

/// Chart at node `i` of `curve`.
pub fn build_chart(curve: &BoundaryCurve, i: usize, params: &StencilParams) -> Result<LocalChart> {
    let stencil: Vec<Point> = k_nearest(curve.points(), i, params.k)
        .into_iter()
        .map(|j| curve.point(j))
        .collect();
    let mut chart = chart_from_stencil(
        curve.point(i),
        &stencil,
        curve.point(curve.next(i)),
        curve.point(curve.prev(i)),
        params,
    )
    .map_err(|e| e.at(i))?;
    chart.center_index = i;
    Ok(chart)
}

/// Charts at every node. Nodes are independent; the work is spread over the
/// rayon pool and the first failing index (lowest) is reported.
pub fn build_charts(curve: &BoundaryCurve, params: &StencilParams) -> Result<Vec<LocalChart>> {
    params.validate(curve.len())?;
    (0..curve.len())
        .into_par_iter()
        .map(|i| build_chart(curve, i, params))
        .collect()
}

/// Node curvatures `κ_i = κ_i(0)`.
pub fn node_curvatures(charts: &[LocalChart]) -> Vec<f64> {
    charts.iter().map(LocalChart::node_curvature).collect()
}

/// Root-mean-square deviation of GMLS node curvatures from `reference`.
pub fn curvature_rmse(curve: &BoundaryCurve, reference: &[f64], params: &StencilParams) -> Result<f64> {
    if reference.len() != curve.len() {
        return Err(Error::Dimension(format!(
            "{} reference curvatures for {} points",
            reference.len(),
            curve.len()
        )));
    }
    let charts = build_charts(curve, params)?;
    Ok(rms_difference(&node_curvatures(&charts), reference))
}

pub(crate) fn rms_difference(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(1) as f64;
    (a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / n).sqrt()
}
