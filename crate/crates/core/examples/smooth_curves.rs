//! Unforced evolution of the heart and the humanoid outline. Both relax
//! toward a circle while the enclosed area stays put.
//!
//! A short run by default; pass a final time (about 1.0 for a nearly round
//! final shape) as the first argument.

use hele_shaw::prelude::*;

fn main() -> hele_shaw::Result<()> {
    let t_end: f64 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(0.1);
    for (name, spec) in [
        ("heart", ShapeSpec::heart(200)),
        ("humanoid", ShapeSpec::humanoid(200)),
    ] {
        let curve = make_shape(&spec)?;
        let config = SimulationConfig {
            dt: 3e-5,
            t_end,
            remesh_every: 10,
            ..SimulationConfig::for_points(200)
        };
        let traj = run(&curve, &config)?;
        let first = traj.history[0];
        let last = traj.history.last().copied().unwrap_or(first);
        println!(
            "{name}: t = {:.3}, {} steps, {:.1} s",
            last.time, traj.steps_taken, traj.wall_seconds
        );
        println!(
            "  (d_max - d_min) / d_max: {:.3} -> {:.3}",
            (first.d_max - first.d_min) / first.d_max,
            (last.d_max - last.d_min) / last.d_max
        );
        println!("  relative area change {:.2e}", last.area / first.area - 1.0);
    }
    Ok(())
}
