//! Assemble the boundary-integral system for an ellipse, solve it and report
//! the solver diagnostics. `A.csv` and `b.csv` are written to the directory
//! given as the first argument (default `system_dump`).

use std::path::PathBuf;

use hele_shaw::output::dump_system;
use hele_shaw::prelude::*;

fn main() -> hele_shaw::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "system_dump".into()));
    let n = 200;
    let points: Vec<Point> = (0..n)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / n as f64;
            Point::new(1.5 * t.cos(), t.sin())
        })
        .collect();
    let curve = BoundaryCurve::new(points)?;
    let config = SimulationConfig::for_points(n);
    let charts = build_charts(&curve, &config.stencil(n))?;
    let system = assemble(&curve, &charts, QuadratureRule::Simpson)?;
    let report = solve_dense(&system)?;

    println!("N = {n}, k = {}", config.stencil(n).k);
    println!(
        "residual {:.2e}, condition ~ {:.2e}, pivot growth {:.2}",
        report.residual_norm, report.condition_estimate, report.pivot_growth
    );
    println!(
        "V_n at the tips {:+.4}, at the flat sides {:+.4}",
        report.velocity[0],
        report.velocity[n / 4]
    );
    for w in &report.warnings {
        println!("warning: {w}");
    }
    let (a, rows_a, b, rows_b) = dump_system(&dir, &system)?;
    println!(
        "wrote {} ({rows_a} entries) and {} ({rows_b} entries)",
        a.display(),
        b.display()
    );
    Ok(())
}
