//! Gauss–Legendre quadrature on complex line segments with node-doubling
//! refinement. Integrands are holomorphic along the paths used in this crate,
//! so GL converges spectrally and doubling gives a reliable error estimate.

use crate::C64;
use std::sync::OnceLock;

/// Nodes and weights for n-point Gauss–Legendre on [-1, 1].
fn gl_rule(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        // Newton on P_n from the Chebyshev-like initial guess.
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // Evaluate P_n and P_n' by the three-term recurrence.
            let (mut p0, mut p1) = (1.0_f64, x);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0_f64, x);
        for j in 2..=n {
            let jf = j as f64;
            let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
            p0 = p1;
            p1 = p2;
        }
        let dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn cached_rule(n: usize) -> &'static Vec<(f64, f64)> {
    static RULES: OnceLock<std::sync::Mutex<std::collections::HashMap<usize, &'static Vec<(f64, f64)>>>> =
        OnceLock::new();
    let map = RULES.get_or_init(|| std::sync::Mutex::new(std::collections::HashMap::new()));
    let mut guard = map.lock().unwrap();
    guard
        .entry(n)
        .or_insert_with(|| Box::leak(Box::new(gl_rule(n))))
}

/// Nodes and weights of the n-point rule on [-1, 1] (cached).
pub fn nodes(n: usize) -> &'static [(f64, f64)] {
    cached_rule(n)
}

/// ∫ f over the straight segment a→b with n-point GL.
pub fn segment<F: FnMut(C64) -> C64>(a: C64, b: C64, n: usize, f: &mut F) -> C64 {
    let mid = (a + b) * 0.5;
    let half = (b - a) * 0.5;
    let mut acc = C64::new(0.0, 0.0);
    for &(x, w) in cached_rule(n).iter() {
        acc += f(mid + half * x) * w;
    }
    acc * half
}

/// Adaptive: double the node count until two successive estimates agree to
/// `tol` (absolute + relative mix); when doubling stalls (integrand with a
/// nearby pole), bisect the segment and recurse. Returns (value, achieved
/// difference).
pub fn segment_adaptive<F: FnMut(C64) -> C64>(
    a: C64,
    b: C64,
    tol: f64,
    f: &mut F,
) -> (C64, f64) {
    segment_adaptive_depth(a, b, tol, f, 0)
}

fn segment_adaptive_depth<F: FnMut(C64) -> C64>(
    a: C64,
    b: C64,
    tol: f64,
    f: &mut F,
    depth: usize,
) -> (C64, f64) {
    let mut n = 16;
    let mut prev = segment(a, b, n, f);
    loop {
        n *= 2;
        let cur = segment(a, b, n, f);
        let diff = (cur - prev).norm();
        if diff <= tol * (1.0 + cur.norm()) {
            return (cur, diff);
        }
        if n >= 256 {
            if depth >= 24 {
                return (cur, diff);
            }
            let mid = (a + b) * 0.5;
            let (v1, d1) = segment_adaptive_depth(a, mid, tol, f, depth + 1);
            let (v2, d2) = segment_adaptive_depth(mid, b, tol, f, depth + 1);
            return (v1 + v2, d1.max(d2));
        }
        prev = cur;
    }
}

/// Integrate along a polyline, adaptively per segment.
pub fn polyline_adaptive<F: FnMut(C64) -> C64>(points: &[C64], tol: f64, f: &mut F) -> (C64, f64) {
    let mut acc = C64::new(0.0, 0.0);
    let mut worst = 0.0_f64;
    for w in points.windows(2) {
        let (v, d) = segment_adaptive(w[0], w[1], tol, f);
        acc += v;
        worst = worst.max(d);
    }
    (acc, worst)
}
