//! Periodic cubic spline through a closed polygon, parameterized by
//! cumulative chord length, with arc-length evaluation and inversion.

use crate::error::{Error, Result};
use crate::Point;

const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Each knot interval is split into this many Gauss–Legendre panels when
/// measuring arc length.
const ARC_PANELS: usize = 4;

#[derive(Debug, Clone)]
pub struct PeriodicSpline {
    points: Vec<Point>,
    /// Second derivatives at the knots.
    second: Vec<Point>,
    /// Cumulative chord parameter, `knots[0] = 0`, length `n + 1`.
    knots: Vec<f64>,
    /// Cumulative arc length at the knots, length `n + 1`.
    arc: Vec<f64>,
}

/// Solve a cyclic tridiagonal system with constant structure per row:
/// `sub[k] x[k−1] + diag[k] x[k] + sup[k] x[k+1] = rhs[k]`, indices mod n.
fn solve_cyclic(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let corner_top = sub[0];
    let corner_bottom = sup[n - 1];
    let gamma = -diag[0];
    let mut bb = diag.to_vec();
    bb[0] -= gamma;
    bb[n - 1] -= corner_bottom * corner_top / gamma;

    let thomas = |r: &[f64]| {
        let mut c = vec![0.0; n];
        let mut x = vec![0.0; n];
        let mut beta = bb[0];
        x[0] = r[0] / beta;
        for k in 1..n {
            c[k] = sup[k - 1] / beta;
            beta = bb[k] - sub[k] * c[k];
            x[k] = (r[k] - sub[k] * x[k - 1]) / beta;
        }
        for k in (0..n - 1).rev() {
            x[k] -= c[k + 1] * x[k + 1];
        }
        x
    };

    let mut x = thomas(rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = corner_bottom;
    let z = thomas(&u);
    let fact = (x[0] + corner_top * x[n - 1] / gamma) / (1.0 + z[0] + corner_top * z[n - 1] / gamma);
    for (xi, zi) in x.iter_mut().zip(&z) {
        *xi -= fact * zi;
    }
    x
}

impl PeriodicSpline {
    /// Spline through `points` in order, closing back to the first point.
    pub fn new(points: &[Point]) -> Result<Self> {
        let n = points.len();
        if n < 3 {
            return Err(Error::Spline(format!("need at least 3 points, got {n}")));
        }
        let h: Vec<f64> = (0..n).map(|k| (points[(k + 1) % n] - points[k]).norm()).collect();
        if let Some(k) = h.iter().position(|&d| !(d > 0.0) || !d.is_finite()) {
            return Err(Error::Spline(format!("points {k} and {} coincide", (k + 1) % n)));
        }
        let mut knots = Vec::with_capacity(n + 1);
        knots.push(0.0);
        for d in &h {
            knots.push(knots.last().unwrap() + d);
        }

        let sub: Vec<f64> = (0..n).map(|k| h[(k + n - 1) % n]).collect();
        let diag: Vec<f64> = (0..n).map(|k| 2.0 * (h[(k + n - 1) % n] + h[k])).collect();
        let sup = h.clone();
        let component = |f: fn(&Point) -> f64| {
            let rhs: Vec<f64> = (0..n)
                .map(|k| {
                    let prev = (k + n - 1) % n;
                    let next = (k + 1) % n;
                    6.0 * ((f(&points[next]) - f(&points[k])) / h[k]
                        - (f(&points[k]) - f(&points[prev])) / h[prev])
                })
                .collect();
            solve_cyclic(&sub, &diag, &sup, &rhs)
        };
        let mx = component(|p| p.x);
        let my = component(|p| p.y);
        let second = mx.into_iter().zip(my).map(|(x, y)| Point::new(x, y)).collect();

        let mut spline = PeriodicSpline {
            points: points.to_vec(),
            second,
            knots,
            arc: Vec::new(),
        };
        let mut arc = Vec::with_capacity(n + 1);
        arc.push(0.0);
        for k in 0..n {
            let (lo, hi) = (spline.knots[k], spline.knots[k + 1]);
            arc.push(arc[k] + spline.speed_integral(k, lo, hi));
        }
        spline.arc = arc;
        Ok(spline)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total chord parameter length.
    pub fn period(&self) -> f64 {
        self.knots[self.points.len()]
    }

    /// Total arc length.
    pub fn arc_length(&self) -> f64 {
        self.arc[self.points.len()]
    }

    fn interval(&self, u: f64) -> (usize, f64) {
        let u = u.rem_euclid(self.period());
        let k = match self.knots.binary_search_by(|t| t.total_cmp(&u)) {
            Ok(k) => k,
            Err(k) => k - 1,
        };
        (k.min(self.points.len() - 1), u)
    }

    fn segment(&self, k: usize) -> (Point, Point, Point, Point, f64) {
        let n = self.points.len();
        let next = (k + 1) % n;
        (
            self.points[k],
            self.points[next],
            self.second[k],
            self.second[next],
            self.knots[k + 1] - self.knots[k],
        )
    }

    fn eval_in(&self, k: usize, u: f64) -> Point {
        let (p0, p1, m0, m1, h) = self.segment(k);
        let a = self.knots[k + 1] - u;
        let b = u - self.knots[k];
        m0 * (a * a * a / (6.0 * h))
            + m1 * (b * b * b / (6.0 * h))
            + (p0 / h - m0 * (h / 6.0)) * a
            + (p1 / h - m1 * (h / 6.0)) * b
    }

    fn deriv_in(&self, k: usize, u: f64) -> Point {
        let (p0, p1, m0, m1, h) = self.segment(k);
        let a = self.knots[k + 1] - u;
        let b = u - self.knots[k];
        -m0 * (a * a / (2.0 * h)) + m1 * (b * b / (2.0 * h)) - (p0 / h - m0 * (h / 6.0))
            + (p1 / h - m1 * (h / 6.0))
    }

    /// Position at chord parameter `u` (taken modulo the period).
    pub fn eval(&self, u: f64) -> Point {
        let (k, u) = self.interval(u);
        self.eval_in(k, u)
    }

    pub fn derivative(&self, u: f64) -> Point {
        let (k, u) = self.interval(u);
        self.deriv_in(k, u)
    }

    /// `∫_lo^hi |S′(u)| du` within knot interval `k`.
    fn speed_integral(&self, k: usize, lo: f64, hi: f64) -> f64 {
        let width = (hi - lo) / ARC_PANELS as f64;
        let mut total = 0.0;
        for panel in 0..ARC_PANELS {
            let mid = lo + (panel as f64 + 0.5) * width;
            let half = 0.5 * width;
            for (x, w) in GL_NODES.iter().zip(&GL_WEIGHTS) {
                total += w * half * self.deriv_in(k, mid + half * x).norm();
            }
        }
        total
    }

    /// Chord parameter at which the arc length from the first point equals
    /// `sigma` (taken modulo the total length).
    pub fn param_at_arc(&self, sigma: f64) -> f64 {
        let total = self.arc_length();
        let sigma = sigma.rem_euclid(total);
        let k = match self.arc.binary_search_by(|t| t.total_cmp(&sigma)) {
            Ok(k) => return self.knots[k.min(self.points.len())] % self.period(),
            Err(k) => (k - 1).min(self.points.len() - 1),
        };
        let target = sigma - self.arc[k];
        let (mut lo, mut hi) = (self.knots[k], self.knots[k + 1]);
        let seg_arc = self.arc[k + 1] - self.arc[k];
        let mut u = lo + (hi - lo) * target / seg_arc;
        for _ in 0..60 {
            let f = self.speed_integral(k, self.knots[k], u) - target;
            if f.abs() <= 1e-14 * total.max(1.0) {
                break;
            }
            if f > 0.0 {
                hi = u;
            } else {
                lo = u;
            }
            let speed = self.deriv_in(k, u).norm();
            let newton = u - f / speed;
            u = if speed > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        u
    }

    /// `n` points equally spaced in arc length, the first at the first knot.
    pub fn resample(&self, n: usize) -> Vec<Point> {
        let step = self.arc_length() / n as f64;
        let mut out: Vec<Point> = (0..n)
            .map(|m| self.eval(self.param_at_arc(m as f64 * step)))
            .collect();
        if let Some(first) = out.first_mut() {
            *first = self.points[0];
        }
        out
    }
}
