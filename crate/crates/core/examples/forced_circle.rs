//! A unit circle driven by the oscillating source h(t) = 500 cos(500 pi t).
//! The exact radius is 1 + sin(500 pi t) / pi; the computed one is printed
//! alongside it.

use hele_shaw::evolution::{run_observed, BieModel};
use hele_shaw::experiments::relative_radius_error;
use hele_shaw::prelude::*;

fn main() -> hele_shaw::Result<()> {
    let config = SimulationConfig {
        t_end: 4e-3,
        forcing: Forcing::oscillatory(),
        ..SimulationConfig::default()
    };
    let curve = make_shape(&ShapeSpec::circle(400))?;
    let model = BieModel {
        config: config.clone(),
    };
    println!("{:>10} {:>10} {:>10} {:>10}", "t", "R", "R exact", "e_R");
    let traj = run_observed(&curve, &config, &model, |s| {
        if s.step % 40 == 0 {
            let exact = exact_circle_radius(s.time);
            let r = s.curve.point(0).norm();
            println!(
                "{:>10.2e} {r:>10.6} {exact:>10.6} {:>10.2e}",
                s.time,
                relative_radius_error(&s.curve, exact)
            );
        }
    })?;
    println!("{} steps in {:.1} s", traj.steps_taken, traj.wall_seconds);
    Ok(())
}
