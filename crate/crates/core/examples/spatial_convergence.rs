//! Velocity error of the forced circle against the number of points, for the
//! trapezoid and Simpson right-hand sides.

use hele_shaw::experiments::spatial_convergence_study;
use hele_shaw::prelude::*;

fn main() -> hele_shaw::Result<()> {
    for rule in [QuadratureRule::Trapezoid, QuadratureRule::Simpson] {
        let template = SimulationConfig {
            t_end: 1e-3,
            b_rule: rule,
            ..SimulationConfig::default()
        };
        let report = spatial_convergence_study(&template, &[100, 200, 400])?;
        println!("{}", rule.name());
        for (n, e) in report.axis.iter().zip(&report.errors) {
            println!("  N = {n:>4}  e_V = {e:.3e}");
        }
        println!("  order {:.2}", report.order());
    }
    Ok(())
}
