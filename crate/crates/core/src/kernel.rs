//! Free-space Laplace kernels in the plane and the closed-form moments of
//! `ln|s|` used for the singular self-interaction.

use std::f64::consts::PI;

use crate::geometry::LocalChart;
use crate::Point;

/// `G(x, y) = −ln‖x − y‖ / 2π`.
///
/// Coincident arguments give `+∞`; the self term has to go through
/// [`log_moments`] instead.
pub fn greens(x: Point, y: Point) -> f64 {
    -(x - y).norm().ln() / (2.0 * PI)
}

/// `∇G(x, y)·n_y = (x − y)·n_y / (2π ‖x − y‖²)`.
///
/// Coincident arguments give NaN; the on-curve limit is
/// [`diagonal_kernel_limit`].
pub fn grad_greens_dot_normal(x: Point, y: Point, n_y: Point) -> f64 {
    let d = x - y;
    d.dot(&n_y) / (2.0 * PI * d.norm_squared())
}

/// `lim_{s→0} ∇G(x_i, ι_i(s))·n̂(ι_i(s)) = α₂ / 2π`.
pub fn diagonal_kernel_limit(chart: &LocalChart) -> f64 {
    chart.alpha(2) / (2.0 * PI)
}

/// `m_j = ∫_a^b s^j ln|s| ds` for `j = 0, 1, 2` and `a < 0 < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMoments {
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
}

pub fn log_moments(a: f64, b: f64) -> LogMoments {
    debug_assert!(a < 0.0 && b > 0.0, "log moments need a < 0 < b, got [{a}, {b}]");
    let la = (-a).ln();
    let lb = b.ln();
    let (a2, b2) = (a * a, b * b);
    let (a3, b3) = (a2 * a, b2 * b);
    LogMoments {
        m0: -a * la + a + b * lb - b,
        m1: -0.5 * a2 * la + 0.25 * a2 + 0.5 * b2 * lb - 0.25 * b2,
        m2: -a3 * la / 3.0 + a3 / 9.0 + b3 * lb / 3.0 - b3 / 9.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greens_values() {
        assert_eq!(greens(Point::zeros(), Point::new(1.0, 0.0)), 0.0);
        let e = std::f64::consts::E;
        assert!((greens(Point::zeros(), Point::new(0.0, e)) + 1.0 / (2.0 * PI)).abs() < 1e-16);
        let g = greens(Point::zeros(), Point::new(3.0, 4.0));
        assert!((g - (-(5.0_f64).ln() / (2.0 * PI))).abs() < 1e-16);
        assert!((g + 0.25615).abs() < 1e-5);
        assert!(!greens(Point::new(1.0, 1.0), Point::new(1.0, 1.0)).is_finite());
    }

    #[test]
    fn double_layer_on_unit_circle_is_constant() {
        let x = Point::new(1.0, 0.0);
        for k in 1..12 {
            let th = 0.5 * k as f64;
            let y = Point::new(th.cos(), th.sin());
            let v = grad_greens_dot_normal(x, y, y);
            assert!((v + 1.0 / (4.0 * PI)).abs() < 1e-14, "theta {th}: {v}");
        }
    }

    #[test]
    fn double_layer_special_cases() {
        let v = grad_greens_dot_normal(Point::zeros(), Point::new(1.0, 0.0), Point::new(1.0, 0.0));
        assert!((v + 1.0 / (2.0 * PI)).abs() < 1e-16);
        let v = grad_greens_dot_normal(Point::zeros(), Point::new(1.0, 0.0), Point::new(0.0, 1.0));
        assert_eq!(v, 0.0);
        assert!(grad_greens_dot_normal(Point::zeros(), Point::zeros(), Point::new(1.0, 0.0)).is_nan());
    }

    #[test]
    fn symmetric_unit_moments() {
        let m = log_moments(-1.0, 1.0);
        assert!((m.m0 + 2.0).abs() < 1e-15);
        assert!(m.m1.abs() < 1e-15);
        assert!((m.m2 + 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn moments_as_right_end_shrinks() {
        let m = log_moments(-1.0, 1e-300);
        assert!((m.m0 + 1.0).abs() < 1e-12);
        assert!((m.m1 - 0.25).abs() < 1e-12);
        assert!((m.m2 + 1.0 / 9.0).abs() < 1e-12);
    }
}
