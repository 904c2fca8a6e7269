//! Curvature error of the GMLS charts on randomly sampled unit circles.
//!
//! ```text
//! cargo run --release --example curvature_convergence
//! ```

use hele_shaw::experiments::curvature_convergence_study;

fn main() -> hele_shaw::Result<()> {
    let n_values = [100, 200, 400, 800, 1600];
    let seeds: Vec<u64> = (0..10).collect();
    for degree in [3, 4] {
        let report = curvature_convergence_study(&n_values, degree, &seeds)?;
        println!("degree {degree}");
        for (n, e) in report.axis.iter().zip(&report.errors) {
            println!("  N = {n:>5}  median e_kappa = {e:.3e}");
        }
        println!("  fitted order {:.2}\n", report.order());
    }
    Ok(())
}
