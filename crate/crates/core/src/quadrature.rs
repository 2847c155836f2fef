//! Gauss–Legendre and adaptive quadrature used throughout the crate.

use crate::error::{Result, SpectralError};

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
///
/// Newton iteration on the Legendre polynomial; standard construction,
/// accurate to machine precision for the small n used here (n <= 64).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Initial guess (Abramowitz-Stegun) then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Legendre polynomial P_n and its derivative at x (three-term recurrence).
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// n-point Gauss–Legendre approximation of ∫_a^b f.
pub fn integrate_gl<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (x, w) in nodes.iter().zip(weights.iter()) {
        sum += w * f(mid + half * x);
    }
    half * sum
}

/// Composite Gauss–Legendre over the panels delimited by `breaks`.
pub fn integrate_panels<F: Fn(f64) -> f64>(f: F, breaks: &[f64], nodes_per_panel: usize) -> f64 {
    debug_assert!(breaks.windows(2).all(|w| w[0] <= w[1]));
    let (nodes, weights) = gauss_legendre(nodes_per_panel);
    let mut sum = 0.0;
    for seg in breaks.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        if a == b {
            continue;
        }
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in nodes.iter().zip(weights.iter()) {
            s += w * f(mid + half * x);
        }
        sum += half * s;
    }
    sum
}

/// Splits [a, b] so that no panel is longer than `max_len`, keeping every
/// point of `forced` that falls inside as a panel boundary.
pub fn panel_breaks(a: f64, b: f64, forced: &[f64], max_len: f64) -> Vec<f64> {
    let mut pts = vec![a, b];
    for &p in forced {
        if p > a && p < b {
            pts.push(p);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut out = Vec::new();
    for seg in pts.windows(2) {
        let (lo, hi) = (seg[0], seg[1]);
        let m = ((hi - lo) / max_len).ceil().max(1.0) as usize;
        for k in 0..m {
            out.push(lo + (hi - lo) * k as f64 / m as f64);
        }
    }
    out.push(b);
    out
}

/// Adaptive Gauss–Legendre bisection with absolute tolerance `tol`.
///
/// Panels are accepted when an 8-point and a 16-point estimate agree; all
/// nodes are interior, so endpoint-limit mismatches of half-open piecewise
/// integrands cost nothing.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let coarse = gauss_legendre(8);
    let fine = gauss_legendre(16);
    adaptive_gl(f, a, b, tol, 46, &coarse, &fine)
}

fn gl_on<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in rule.0.iter().zip(rule.1.iter()) {
        s += w * f(mid + half * x);
    }
    half * s
}

fn adaptive_gl<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
    coarse: &(Vec<f64>, Vec<f64>),
    fine: &(Vec<f64>, Vec<f64>),
) -> Result<f64> {
    let lo = gl_on(f, a, b, coarse);
    let hi = gl_on(f, a, b, fine);
    if (hi - lo).abs() <= tol {
        return Ok(hi);
    }
    if depth == 0 {
        return Err(SpectralError::QuadratureNoConvergence);
    }
    let m = 0.5 * (a + b);
    let half_tol = 0.5 * tol;
    let l = adaptive_gl(f, a, m, half_tol, depth - 1, coarse, fine)?;
    let r = adaptive_gl(f, m, b, half_tol, depth - 1, coarse, fine)?;
    Ok(l + r)
}
