//! Relaxation of r = 1 + D1 cos(D2 theta) toward the circle of equal area.
//!
//! ```text
//! cargo run --release --example perturbed_circle -- 0.1 3 0.12
//! ```
//! Arguments: D1, D2 and the final time. Diagnostics go to
//! `perturbed_circle.csv` in the working directory.

use std::path::Path;

use hele_shaw::output::write_diagnostics;
use hele_shaw::prelude::*;

fn main() -> hele_shaw::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: f64| args.get(i).and_then(|a| a.parse().ok()).unwrap_or(default);
    let (d1, d2, t_end) = (arg(0, 0.1), arg(1, 3.0) as u32, arg(2, 0.12));

    let curve = make_shape(&ShapeSpec::perturbed_circle(400, 1.0, d1, d2))?;
    let config = SimulationConfig {
        t_end,
        remesh_every: if d1 > 0.2 { 10 } else { 0 },
        ..SimulationConfig::default()
    };
    let traj = run(&curve, &config)?;
    if let Some(e) = &traj.failure {
        eprintln!("stopped early: {e}");
    }

    let rs = steady_radius(1.0, d1);
    let every = (traj.history.len() / 12).max(1);
    println!("steady radius {rs:.6}");
    for d in traj.history.iter().step_by(every) {
        println!(
            "t = {:.4}  d_min = {:.6}  d_max = {:.6}  area = {:.6}",
            d.time, d.d_min, d.d_max, d.area
        );
    }
    let rows = write_diagnostics(Path::new("perturbed_circle.csv"), &traj.history)?;
    println!("wrote {rows} rows to perturbed_circle.csv");
    Ok(())
}
