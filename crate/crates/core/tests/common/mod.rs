//! Reference computations that share no code with the library: adaptive
//! Gauss–Kronrod quadrature and Householder QR least squares.

#![allow(dead_code, clippy::excessive_precision)]

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One G7–K15 panel: `(kronrod, |kronrod − gauss|)`.
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, (k - g).abs() * h)
}

/// Global adaptive scheme: repeatedly bisect the panel with the largest
/// error estimate until the total estimate drops below `tol` or the panel
/// budget runs out.
fn adapt(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (k, e) = gk15(f, a, b);
    let mut panels = vec![(a, b, k, e)];
    for _ in 0..4000 {
        let total: f64 = panels.iter().map(|p| p.3).sum();
        if total <= tol {
            break;
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (k1, e1) = gk15(f, lo, mid);
        let (k2, e2) = gk15(f, mid, hi);
        panels.push((lo, mid, k1, e1));
        panels.push((mid, hi, k2, e2));
    }
    panels.iter().map(|p| p.2).sum()
}

/// `∫_a^b f` to absolute tolerance `tol`. Nodes never touch the endpoints,
/// so integrable endpoint singularities are fine.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    adapt(&f, a, b, tol)
}

/// `∫_a^b f`, split at each interior point of `breaks`.
pub fn integrate_split(f: impl Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64 {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.sort_by(f64::total_cmp);
    let mut edges = vec![a];
    edges.extend(cuts);
    edges.push(b);
    let share = tol / (edges.len() - 1) as f64;
    edges.windows(2).map(|w| adapt(&f, w[0], w[1], share)).sum()
}

/// Least-squares solution of the `m × n` row-major system `M x ≈ y` by
/// Householder QR.
pub fn qr_least_squares(m: usize, n: usize, matrix: &[f64], y: &[f64]) -> Vec<f64> {
    assert!(m >= n && matrix.len() == m * n && y.len() == m);
    let mut a = matrix.to_vec();
    let mut rhs = y.to_vec();
    for k in 0..n {
        let norm = (k..m).map(|i| a[i * n + k].powi(2)).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[k * n + k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|i| a[i * n + k]).collect();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        if vv == 0.0 {
            continue;
        }
        for j in k..n {
            let d: f64 = (k..m).map(|i| v[i - k] * a[i * n + j]).sum::<f64>() * 2.0 / vv;
            for i in k..m {
                a[i * n + j] -= d * v[i - k];
            }
        }
        let d: f64 = (k..m).map(|i| v[i - k] * rhs[i]).sum::<f64>() * 2.0 / vv;
        for i in k..m {
            rhs[i] -= d * v[i - k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = ((k + 1)..n).map(|j| a[k * n + j] * x[j]).sum();
        x[k] = (rhs[k] - s) / a[k * n + k];
    }
    x
}

/// Points `(a cos θ, b sin θ)` at `n` equal angle steps.
pub fn ellipse(n: usize, a: f64, b: f64) -> Vec<hele_shaw::Point> {
    (0..n)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            hele_shaw::Point::new(a * t.cos(), b * t.sin())
        })
        .collect()
}

#[test]
fn oracles_self_check() {
    let v = integrate(|x: f64| x.abs().ln(), -0.3, 0.7, 1e-14);
    let exact = 0.3 * 0.3f64.ln() - 0.3 + 0.7 * 0.7f64.ln() - 0.7;
    assert!((integrate_split(|x: f64| x.abs().ln(), -0.3, 0.7, &[0.0], 1e-14) - exact).abs() < 1e-13);
    assert!((v - exact).abs() < 1e-6);
    // y = 1 + 2x fitted exactly
    let m = [1.0, 0.0, 1.0, 1.0, 1.0, 2.0];
    let x = qr_least_squares(3, 2, &m, &[1.0, 3.0, 5.0]);
    assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 2.0).abs() < 1e-14);
}
