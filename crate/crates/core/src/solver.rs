//! Dense direct solve of the assembled system with conditioning diagnostics.

use crate::assembly::BieSystem;
use crate::error::{Error, Result};
use crate::linalg::LuFactors;

/// Above this 1-norm condition estimate the solve still returns, with a
/// warning attached.
pub const CONDITION_WARN: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Normal velocity `Vₙ` at every node.
    pub velocity: Vec<f64>,
    /// `‖A Vₙ − b‖∞`.
    pub residual_norm: f64,
    /// Hager–Higham estimate of `κ₁(A)`.
    pub condition_estimate: f64,
    pub pivot_growth: f64,
    pub warnings: Vec<String>,
}

impl SolveReport {
    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }
}

/// LU with partial pivoting. Singular matrices are reported with the
/// offending pivot column.
pub fn solve_dense(system: &BieSystem) -> Result<SolveReport> {
    let a = &system.matrix;
    if !a.is_square() || a.rows() != system.rhs.len() {
        return Err(Error::Dimension(format!(
            "matrix {}x{} with right-hand side of length {}",
            a.rows(),
            a.cols(),
            system.rhs.len()
        )));
    }
    if let Some((row, col)) = a.first_non_finite() {
        return Err(Error::NonFinite { row, col });
    }
    let lu = LuFactors::factor(a)?;
    let velocity = lu.solve(&system.rhs);
    let residual_norm = a
        .matvec(&velocity)
        .iter()
        .zip(&system.rhs)
        .fold(0.0_f64, |m, (ax, b)| m.max((ax - b).abs()));
    let condition_estimate = lu.condition_estimate(a.norm_1());

    let mut warnings = Vec::new();
    if condition_estimate > CONDITION_WARN {
        warnings.push(format!(
            "ill-conditioned system: cond_1 ~ {condition_estimate:.3e}"
        ));
    }
    if system.near_capacity_one() {
        warnings.push(format!(
            "curve close to capacity one: |A 1|/|A| = {:.3e}, cond_1 ~ {condition_estimate:.3e}",
            system.capacity_ratio
        ));
    }
    if let Some(i) = velocity.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { row: i, col: 0 });
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(SolveReport {
        velocity,
        residual_norm,
        condition_estimate,
        pivot_growth: lu.pivot_growth(),
        warnings,
    })
}
