//! Equal arc-length redistribution of a badly spaced curve.

use hele_shaw::prelude::*;

fn spacing(curve: &BoundaryCurve) -> (f64, f64) {
    let pts = curve.points();
    let gaps: Vec<f64> = (0..pts.len())
        .map(|i| (pts[curve.next(i)] - pts[i]).norm())
        .collect();
    let lo = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = gaps.iter().copied().fold(0.0, f64::max);
    (lo, hi)
}

fn main() -> hele_shaw::Result<()> {
    let n = 300;
    // nodes bunched toward theta = 0
    let points: Vec<Point> = (0..n)
        .map(|i| {
            let u = std::f64::consts::TAU * i as f64 / n as f64;
            let t = u - 0.8 * u.sin();
            let r = 1.0 + 0.2 * (3.0 * t).cos();
            Point::new(r * t.cos(), r * t.sin())
        })
        .collect();
    let curve = BoundaryCurve::new(points)?;
    let even = remesh(&curve)?;
    let (lo, hi) = spacing(&curve);
    println!("before: gaps {lo:.4} .. {hi:.4}, area {:.6}", curve.signed_area());
    let (lo, hi) = spacing(&even);
    println!("after:  gaps {lo:.4} .. {hi:.4}, area {:.6}", even.signed_area());
    println!("first node kept: {}", curve.point(0) == even.point(0));
    Ok(())
}
