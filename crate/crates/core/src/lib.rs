//! Meshfree simulation of the two-dimensional Hele-Shaw free-boundary problem
//! with surface tension.
//!
//! The moving boundary is an ordered point cloud. Local geometry comes from
//! iterated generalized-moving-least-squares charts ([`geometry`]); the
//! single-layer boundary integral equation for the normal velocity is
//! discretized on those charts with the logarithmic singularity integrated in
//! closed form ([`assembly`]), solved densely ([`solver`]) and the boundary is
//! advanced in time ([`evolution`]). [`experiments`] holds the initial shapes,
//! exact solutions and convergence studies; [`config`] and [`output`] the
//! file-facing side used by the `hele-shaw` binary.
//!
//! ```no_run
//! use hele_shaw::prelude::*;
//!
//! let curve = make_shape(&ShapeSpec::circle(400)).unwrap();
//! let mut config = SimulationConfig::for_points(400);
//! config.forcing = Forcing::oscillatory();
//! let vn = normal_velocity(&curve, &config, 0.0).unwrap();
//! assert!((vn[0] - 500.0).abs() < 0.5);
//! ```

// Range checks are written as `!(x > 0.0)` on purpose so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod config;
pub mod curve;
pub mod error;
pub mod evolution;
pub mod experiments;
pub mod geometry;
pub mod kernel;
pub mod linalg;
pub mod neighbors;
pub mod output;
pub mod solver;
pub mod spline;

/// Planar position or direction.
pub type Point = nalgebra::Vector2<f64>;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::assembly::{assemble, assemble_a, assemble_b, BieSystem, QuadratureRule};
    pub use crate::curve::{order_and_orient, BoundaryCurve};
    pub use crate::error::{Error, Result};
    pub use crate::evolution::{
        diagnostics, normal_velocity, remesh, run, step_forward_euler, step_rk2, Diagnostics, Forcing,
        SimulationConfig, SimulationState, Stepper,
    };
    pub use crate::experiments::{
        exact_circle_radius, make_shape, steady_radius, velocity_error_l2, ConvergenceReport, Sampling,
        ShapeKind, ShapeSpec,
    };
    pub use crate::geometry::{build_chart, build_charts, LocalChart, StencilParams};
    pub use crate::solver::{solve_dense, SolveReport};
    pub use crate::Point;
}
