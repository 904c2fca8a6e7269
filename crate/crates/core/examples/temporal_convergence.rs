//! Radius error of the forced circle against the time step for forward Euler
//! and the midpoint rule.
//!
//! The stencil is widened to 33 neighbours: with the default 19 the largest
//! steps leave the explicit stability interval once the circle shrinks.

use hele_shaw::experiments::temporal_convergence_study;
use hele_shaw::prelude::*;

fn main() -> hele_shaw::Result<()> {
    for stepper in [Stepper::ForwardEuler, Stepper::Rk2] {
        let template = SimulationConfig {
            k: Some(33),
            t_end: 4e-3,
            stepper,
            forcing: Forcing::oscillatory(),
            ..SimulationConfig::default()
        };
        let report = temporal_convergence_study(&template, 400, &[4e-5, 2e-5, 1e-5])?;
        println!("{}", stepper.name());
        for (dt, e) in report.axis.iter().zip(&report.errors) {
            println!("  dt = {dt:.1e}  e_R = {e:.3e}");
        }
        println!("  order {:.2}", report.order());
    }
    Ok(())
}
