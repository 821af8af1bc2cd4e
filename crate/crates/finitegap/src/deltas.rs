//! Placement of apparent singularities for the finite-gap family (all pairs
//! r = 2, s = 0): the stationarity system
//!
//! ```text
//! 2 Σ_{j′≠j} (℘′(δ_j−δ_{j′}) + ℘′(δ_j+δ_{j′})) + Σ_i (l_i+1/2)² ℘′(δ_j+ω_i) = 0
//! ```
//!
//! is solved as the gradient of the objective Φ by damped Newton iteration,
//! and for M = 1 the positions are also available as roots of a closed-form
//! sextic in b₁ = ℘(δ₁).

use crate::elliptic::PeriodLattice;
use crate::error::{Error, Result};
use crate::numerics::poly::Poly;
use crate::numerics::{linalg, roots};
use crate::{par, C64};

/// A stationary configuration of singularity positions.
#[derive(Debug, Clone)]
pub struct DeltaSolution {
    pub deltas: Vec<C64>,
    /// Left sides of the stationarity system at the solution.
    pub residuals: Vec<C64>,
    /// Φ value at the solution.
    pub objective: C64,
}

/// Seeding strategy for [`solve_deltas`].
#[derive(Debug, Clone)]
pub enum Seed {
    /// Grid search over the real domain 0 < δ₁ < … < δ_M < ω₁ with
    /// δ_j + δ_k < ω₁; requires ω₁ ∈ ℝ₊ and ω₃ ∈ iℝ₊.
    Auto,
    Explicit(Vec<C64>),
}

/// Φ(δ₁..δ_M) = 2 Σ_{j<k} (℘(δ_j−δ_k)+℘(δ_j+δ_k)) + Σ_j Σ_i (l_i+1/2)² ℘(δ_j+ω_i).
pub fn phi_objective(lat: &PeriodLattice, l: [u32; 4], deltas: &[C64]) -> Result<C64> {
    let mut phi = C64::new(0.0, 0.0);
    for (j, &dj) in deltas.iter().enumerate() {
        for &dk in deltas.iter().take(j) {
            phi += (lat.wp(dj - dk)? + lat.wp(dj + dk)?) * 2.0;
        }
        for i in 0..=3usize {
            let w = l[i] as f64 + 0.5;
            phi += lat.wp(dj + lat.omega(i))? * (w * w);
        }
    }
    Ok(phi)
}

/// Gradient components of Φ — the left sides of the stationarity system.
pub fn phi_gradient(lat: &PeriodLattice, l: [u32; 4], deltas: &[C64]) -> Result<Vec<C64>> {
    let mut grad = Vec::with_capacity(deltas.len());
    for (j, &dj) in deltas.iter().enumerate() {
        let mut g = C64::new(0.0, 0.0);
        for (k, &dk) in deltas.iter().enumerate() {
            if k != j {
                g += (lat.wp_prime(dj - dk)? + lat.wp_prime(dj + dk)?) * 2.0;
            }
        }
        for i in 0..=3usize {
            let w = l[i] as f64 + 0.5;
            g += lat.wp_prime(dj + lat.omega(i))? * (w * w);
        }
        grad.push(g);
    }
    Ok(grad)
}

fn phi_hessian(lat: &PeriodLattice, l: [u32; 4], deltas: &[C64]) -> Result<Vec<C64>> {
    let m = deltas.len();
    let wp2 = |z: C64| -> Result<C64> {
        let p = lat.wp(z)?;
        Ok(p * p * 6.0 - lat.g2() * 0.5)
    };
    let mut h = vec![C64::new(0.0, 0.0); m * m];
    for (j, &dj) in deltas.iter().enumerate() {
        let mut diag = C64::new(0.0, 0.0);
        for (k, &dk) in deltas.iter().enumerate() {
            if k != j {
                let minus = wp2(dj - dk)?;
                let plus = wp2(dj + dk)?;
                diag += (minus + plus) * 2.0;
                h[j * m + k] = (plus - minus) * 2.0;
            }
        }
        for i in 0..=3usize {
            let w = l[i] as f64 + 0.5;
            diag += wp2(dj + lat.omega(i))? * (w * w);
        }
        h[j * m + j] = diag;
    }
    Ok(h)
}

/// Per-component magnitude scale of the stationarity system, used for the
/// residual acceptance threshold.
fn gradient_scale(lat: &PeriodLattice, l: [u32; 4], deltas: &[C64]) -> f64 {
    let mut scale = 1.0_f64;
    for (j, &dj) in deltas.iter().enumerate() {
        let mut s = 0.0;
        for (k, &dk) in deltas.iter().enumerate() {
            if k != j {
                s += 2.0
                    * (lat.wp_prime(dj - dk).map(|v| v.norm()).unwrap_or(0.0)
                        + lat.wp_prime(dj + dk).map(|v| v.norm()).unwrap_or(0.0));
            }
        }
        for i in 0..=3usize {
            let w = l[i] as f64 + 0.5;
            s += w * w * lat.wp_prime(dj + lat.omega(i)).map(|v| v.norm()).unwrap_or(0.0);
        }
        scale = scale.max(s);
    }
    scale
}

const RESIDUAL_REL: f64 = 1e-8;

/// Solve the stationarity system by damped Newton from the given seed.
/// Deterministic for a fixed seed.
pub fn solve_deltas(
    lat: &PeriodLattice,
    l: [u32; 4],
    m: usize,
    seed: Seed,
) -> Result<DeltaSolution> {
    assert!(m >= 1, "M must be positive");
    let start = match seed {
        Seed::Explicit(s) => {
            assert_eq!(s.len(), m, "seed length must equal M");
            s
        }
        Seed::Auto => auto_seed(lat, l, m)?,
    };
    newton_from(lat, l, &start)
}

fn auto_seed(lat: &PeriodLattice, l: [u32; 4], m: usize) -> Result<Vec<C64>> {
    let w1 = lat.omega1();
    let w3 = lat.omega3();
    if !(w1.im.abs() < 1e-12 * w1.re.abs() && w1.re > 0.0)
        || !(w3.re.abs() < 1e-12 * w3.im.abs() && w3.im > 0.0)
    {
        return Err(Error::ConstraintViolation(
            "AUTO seeding requires a real rectangular lattice (omega1 real, omega3 imaginary)"
                .into(),
        ));
    }
    let n = match m {
        1 => 200,
        2 => 60,
        _ => 14,
    };
    let mut best: Option<(f64, Vec<C64>)> = None;
    let mut stack = vec![Vec::<f64>::new()];
    while let Some(partial) = stack.pop() {
        if partial.len() == m {
            let deltas: Vec<C64> = partial.iter().map(|&t| C64::new(t, 0.0)).collect();
            if let Ok(phi) = phi_objective(lat, l, &deltas) {
                if best.as_ref().map_or(true, |(b, _)| phi.re < *b) {
                    best = Some((phi.re, deltas));
                }
            }
            continue;
        }
        let lo = partial.last().cloned().unwrap_or(0.0);
        for k in 1..n {
            let t = w1.re * (k as f64) / (n as f64);
            if t <= lo + w1.re / (n as f64) * 0.5 {
                continue;
            }
            // Enforce the pairwise constraint δ_j + δ_k < ω₁.
            if partial.iter().any(|&p| p + t >= w1.re) || 2.0 * t >= 2.0 * w1.re {
                continue;
            }
            let mut next = partial.clone();
            next.push(t);
            stack.push(next);
        }
    }
    best.map(|(_, d)| d).ok_or_else(|| {
        Error::ConstraintViolation("no admissible grid point found in the real domain".into())
    })
}

fn newton_from(lat: &PeriodLattice, l: [u32; 4], start: &[C64]) -> Result<DeltaSolution> {
    let m = start.len();
    let mut deltas = start.to_vec();
    let mut grad = phi_gradient(lat, l, &deltas).map_err(|_| {
        Error::ConstraintViolation("seed collides with a singular configuration".into())
    })?;
    let norm = |g: &[C64]| g.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let mut gn = norm(&grad);
    let mut last = gn;
    for _ in 0..120 {
        let scale = gradient_scale(lat, l, &deltas);
        if gn <= 0.3 * RESIDUAL_REL * scale {
            break;
        }
        let hess = phi_hessian(lat, l, &deltas)?;
        let rhs: Vec<C64> = grad.iter().map(|&g| -g).collect();
        let step = linalg::solve(m, &hess, &rhs).ok_or(Error::NoConvergence {
            context: "delta Newton: singular Hessian",
            iters: 0,
            residual: gn,
        })?;
        let mut accepted = false;
        let mut t = 1.0;
        for _ in 0..24 {
            let trial: Vec<C64> = deltas
                .iter()
                .zip(&step)
                .map(|(&d, &s)| d + s * t)
                .collect();
            if let Ok(g2) = phi_gradient(lat, l, &trial) {
                let n2 = norm(&g2);
                if n2 < (1.0 - 0.2 * t) * gn {
                    deltas = trial;
                    grad = g2;
                    gn = n2;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        last = gn;
    }
    let scale = gradient_scale(lat, l, &deltas);
    if gn > RESIDUAL_REL * scale {
        return Err(Error::NoConvergence {
            context: "delta Newton",
            iters: 120,
            residual: last,
        });
    }
    // Admissibility of the converged configuration.
    let tol = lat.precision().max(1e-9);
    for (j, &dj) in deltas.iter().enumerate() {
        for i in 0..=3usize {
            if lat.is_lattice_point(dj - lat.omega(i), tol) {
                return Err(Error::ConstraintViolation(format!(
                    "delta_{j} converged onto half-period omega_{i}"
                )));
            }
        }
        for (k, &dk) in deltas.iter().enumerate().take(j) {
            if lat.is_lattice_point(dj - dk, tol) || lat.is_lattice_point(dj + dk, tol) {
                return Err(Error::ConstraintViolation(format!(
                    "delta_{j} and delta_{k} collide"
                )));
            }
        }
    }
    Ok(DeltaSolution {
        residuals: grad,
        objective: phi_objective(lat, l, &deltas)?,
        deltas,
    })
}

/// Convenience sweep: Newton from a canonical grid of (complex) seeds inside
/// the quarter cell; solutions are deduplicated by their ℘(δ) multisets
/// (which determine the potential) and reported in lexicographic order of
/// those multisets.
pub fn enumerate_branches(lat: &PeriodLattice, l: [u32; 4], m: usize) -> Vec<DeltaSolution> {
    let n = match m {
        1 => 11,
        2 => 5,
        _ => 3,
    };
    // Seed components cover a fundamental domain for (℘(δ), ±δ): one full
    // period in the ω₁ direction, half a period in the ω₃ direction.
    let mut seeds = Vec::new();
    let mut counters = vec![(1usize, 1usize); m];
    loop {
        let seed: Vec<C64> = counters
            .iter()
            .map(|&(a, b)| {
                lat.omega1() * (2.0 * a as f64 / (n as f64 + 1.0))
                    + lat.omega3() * (b as f64 / (n as f64 + 1.0))
            })
            .collect();
        seeds.push(seed);
        // Odometer over the per-component grid.
        let mut idx = 0;
        loop {
            if idx == m {
                break;
            }
            counters[idx].0 += 1;
            if counters[idx].0 > n {
                counters[idx].0 = 1;
                counters[idx].1 += 1;
                if counters[idx].1 > n {
                    counters[idx].1 = 1;
                    idx += 1;
                    continue;
                }
            }
            break;
        }
        if idx == m {
            break;
        }
    }

    let sols = par::map_collect(seeds, |seed| newton_from(lat, l, &seed).ok());
    let mut branches: Vec<(Vec<(f64, f64)>, DeltaSolution)> = Vec::new();
    for sol in sols.into_iter().flatten() {
        let mut key: Vec<(f64, f64)> = sol
            .deltas
            .iter()
            .filter_map(|&d| lat.wp(d).ok())
            .map(|w| (w.re, w.im))
            .collect();
        if key.len() != sol.deltas.len() {
            continue;
        }
        key.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let dup = branches.iter().any(|(k, _)| {
            k.len() == key.len()
                && k.iter()
                    .zip(&key)
                    .all(|(a, b)| (a.0 - b.0).abs() + (a.1 - b.1).abs() < 1e-6)
        });
        if !dup {
            branches.push((key, sol));
        }
    }
    branches.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    branches.into_iter().map(|(_, s)| s).collect()
}

/// The closed-form sextic f₀(b₁) whose roots away from {e_i} are the
/// apparent-singularity values b₁ = ℘(δ₁) for M = 1. Returned monic, in
/// descending degree.
pub fn apparency_polynomial_m1(lat: &PeriodLattice, l: [u32; 4]) -> Vec<C64> {
    let e = [lat.e(1), lat.e(2), lat.e(3)];
    let one = C64::new(1.0, 0.0);
    // W(b) = 4b³ − g₂ b − g₃
    let w = Poly::from_ascending(vec![-lat.g3(), -lat.g2(), C64::new(0.0, 0.0), C64::new(4.0, 0.0)]);
    let l0w = (2.0 * l[0] as f64 + 1.0).powi(2);
    let mut f = w.mul(&w).scale(C64::new(l0w, 0.0));
    for i in 0..3 {
        let (j, k) = match i {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let li = (2.0 * l[i + 1] as f64 + 1.0).powi(2);
        let fac = (e[i] - e[j]) * (e[i] - e[k]) * (16.0 * li);
        let q = Poly::linear(e[j]).mul(&Poly::linear(e[k]));
        f = f.sub(&q.mul(&q).scale(fac));
    }
    let _ = one;
    f.monic().descending()
}

/// Roots of the M = 1 apparency sextic with roots within 1e-8 of any e_i
/// discarded (those positions are excluded half-period collisions).
pub fn apparency_roots_m1(lat: &PeriodLattice, l: [u32; 4]) -> Vec<C64> {
    let poly = Poly::from_descending(&apparency_polynomial_m1(lat, l));
    roots::roots(&poly)
        .into_iter()
        .filter(|&b| (1..=3).all(|i| (b - lat.e(i)).norm() > 1e-8))
        .collect()
}
