//! Polynomial roots by the Durand–Kerner (Weierstrass) simultaneous
//! iteration with Newton polishing. Degrees in this crate stay small (the
//! apparency sextic, spectral polynomials of degree ≤ 7, Bethe numerators),
//! where the method is reliable and branch-free.

use super::poly::Poly;
use crate::C64;

/// All complex roots of `p`, unordered, with multiplicity.
pub fn roots(p: &Poly) -> Vec<C64> {
    let mut q = p.monic();
    q.trim_relative(1e-300);
    let n = q.degree();
    if n == 0 {
        return vec![];
    }
    // Initial guesses on a non-symmetric circle scaled by the coefficient
    // (Cauchy-style) bound.
    let radius = 1.0
        + q.coeffs[..n]
            .iter()
            .map(|c| c.norm())
            .fold(0.0_f64, f64::max);
    let mut zs: Vec<C64> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
            C64::from_polar(radius.min(1e6).max(0.5), th)
        })
        .collect();

    for _ in 0..400 {
        let mut max_step = 0.0_f64;
        for i in 0..n {
            let mut denom = C64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= zs[i] - zs[j];
                }
            }
            if denom.norm() == 0.0 {
                // Coincident iterates: nudge.
                zs[i] += C64::new(1e-8, 2e-8);
                continue;
            }
            let step = q.eval(zs[i]) / denom;
            zs[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-15 * radius.max(1.0) {
            break;
        }
    }

    // Newton polish; near multiple roots Newton stalls at ~sqrt(eps), which
    // is what clustering tolerance downstream expects.
    let dq = q.derivative();
    for z in zs.iter_mut() {
        for _ in 0..30 {
            let d = dq.eval(*z);
            if d.norm() == 0.0 {
                break;
            }
            let step = q.eval(*z) / d;
            *z -= step;
            if step.norm() < 1e-16 * (1.0 + z.norm()) {
                break;
            }
        }
    }
    zs
}

/// The root with the largest distance to its nearest neighbor (ties broken
/// by magnitude, then lexicographically) — a well-conditioned anchor for
/// integrals that start at a branch point.
pub fn most_separated(rts: &[C64]) -> Option<C64> {
    if rts.len() == 1 {
        return Some(rts[0]);
    }
    rts.iter()
        .map(|&r| {
            let sep = rts
                .iter()
                .filter(|&&s| (s - r).norm() > 0.0)
                .map(|&s| (s - r).norm())
                .fold(f64::MAX, f64::min);
            (sep, r)
        })
        .max_by(|a, b| {
            (a.0, a.1.norm(), a.1.re, a.1.im)
                .partial_cmp(&(b.0, b.1.norm(), b.1.re, b.1.im))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .map(|(_, r)| r)
}

/// Cluster a root list: roots within `tol` of each other merge into one entry
/// (centroid) with multiplicity.
pub fn cluster(rts: &[C64], tol: f64) -> Vec<(C64, usize)> {
    let mut out: Vec<(C64, usize)> = Vec::new();
    for &r in rts {
        if let Some((c, m)) = out
            .iter_mut()
            .find(|(c, m)| (*c - r).norm() < tol * (1.0 + (*m as f64)))
        {
            let mf = *m as f64;
            *c = (*c * mf + r) / (mf + 1.0);
            *m += 1;
        } else {
            out.push((r, 1));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn sextic_with_known_roots() {
        let want = [
            c(1.0, 0.0),
            c(-2.0, 1.0),
            c(0.5, -0.5),
            c(3.0, 0.0),
            c(0.0, 2.0),
            c(-1.0, -1.0),
        ];
        let mut p = Poly::constant(c(2.0, -1.0));
        for &r in &want {
            p = p.mul(&Poly::linear(r));
        }
        let got = roots(&p);
        assert_eq!(got.len(), 6);
        for &w in &want {
            let best = got.iter().map(|&g| (g - w).norm()).fold(f64::MAX, f64::min);
            assert!(best < 1e-9, "root {w} missed by {best:e}");
        }
    }

    #[test]
    fn double_root_clusters() {
        let p = Poly::linear(c(1.0, 1.0))
            .mul(&Poly::linear(c(1.0, 1.0)))
            .mul(&Poly::linear(c(-2.0, 0.0)));
        let cl = cluster(&roots(&p), 1e-5);
        assert_eq!(cl.len(), 2);
        assert!(cl.iter().any(|&(_, m)| m == 2));
    }
}
