//! Explicit Painlevé VI solution families in elliptic form: evaluation of
//! b₁ = ℘(δ₁) on τ-grids, the map between Hermite–Krichever data and
//! (b₁, μ₁), and verification of the elliptic-form equation
//!
//! ```text
//! δ₁″(τ) = −(1/8π²) Σ_i (l_i+1/2)² ℘′(δ₁+ω_i)
//! ```
//!
//! by numerical differentiation in τ, always on the lattice with half-periods
//! (1/2, τ/2).

use crate::elliptic::{PeriodLattice, SignHint};
use crate::error::{Error, Result};
use crate::C64;
use std::f64::consts::PI;

/// Solution family tag. The first two carry monodromy constants (C₁, C₃);
/// the Riccati degenerations carry (D₁, D₃).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum P6Family {
    /// l = (0,0,0,0), generic constants — Hitchin's solution.
    Hitchin,
    /// l = (1,0,0,0), generic constants.
    L0One,
    /// l = 0 degeneration with μ₁ = 0.
    Riccati0,
    /// l = 0 degeneration with μ₁ = 1/(2(b₁−e_i)).
    RiccatiI(usize),
    /// l₀ = 1 degeneration from the cubic in μ₁.
    Riccati0L01,
    /// l₀ = 1 degeneration with μ₁ = (2b₁+e_i)/(2(b₁²+e_ib₁+e_i²−g₂/4)).
    RiccatiIL01(usize),
}

impl P6Family {
    pub fn l(&self) -> [u32; 4] {
        match self {
            P6Family::Hitchin | P6Family::Riccati0 | P6Family::RiccatiI(_) => [0, 0, 0, 0],
            _ => [1, 0, 0, 0],
        }
    }
}

/// A Painlevé VI solution family with its constants.
#[derive(Debug, Clone, Copy)]
pub struct P6SolutionSpec {
    pub family: P6Family,
    pub c1: C64,
    pub c3: C64,
}

impl P6SolutionSpec {
    pub fn new(family: P6Family, c1: C64, c3: C64) -> Result<Self> {
        match family {
            P6Family::RiccatiI(i) | P6Family::RiccatiIL01(i) if !(1..=3).contains(&i) => {
                return Err(Error::InvalidSpec(format!(
                    "Riccati half-period index {i} out of range"
                )))
            }
            _ => {}
        }
        Ok(P6SolutionSpec { family, c1, c3 })
    }

    pub fn l(&self) -> [u32; 4] {
        self.family.l()
    }
}

/// One evaluated point of a solution.
#[derive(Debug, Clone)]
pub struct P6Point {
    pub tau: C64,
    pub b1: C64,
    /// Continuous branch of ℘⁻¹(b₁); see [`P6Path`] for grid tracking.
    pub delta1: C64,
    pub lambda: C64,
    pub t: C64,
    /// (κ₀, κ₁, κ_t, κ_∞).
    pub kappas: [f64; 4],
}

/// (κ₀, κ₁, κ_t, κ_∞) = (l₁+1/2, l₂+1/2, l₃+1/2, l₀+1/2).
pub fn kappa_map(l: [u32; 4]) -> [f64; 4] {
    [
        l[1] as f64 + 0.5,
        l[2] as f64 + 0.5,
        l[3] as f64 + 0.5,
        l[0] as f64 + 0.5,
    ]
}

/// Lattice with half-periods (1/2, τ/2).
pub fn tau_lattice(tau: C64) -> Result<PeriodLattice> {
    PeriodLattice::new(C64::new(0.5, 0.0), tau * 0.5, 1e-12)
}

/// b₁(τ) by the family's closed form.
pub fn p6_b1(spec: &P6SolutionSpec, lat: &PeriodLattice) -> Result<C64> {
    let (w1, w3) = (lat.omega1(), lat.omega3());
    let (h1, h3) = (lat.eta(1), lat.eta(3));
    let (c1, c3) = (spec.c1, spec.c3);
    let tol = 1e-12;
    match spec.family {
        P6Family::Hitchin => {
            // ℘(C₃ω₁−C₁ω₃) − ℘′(C₃ω₁−C₁ω₃)/(2(ζ(C₁ω₃−C₃ω₁) − C₁η₃ + C₃η₁))
            let arg = w1 * c3 - w3 * c1;
            let denom = lat.zeta(-arg)? - h3 * c1 + h1 * c3;
            if denom.norm() < tol {
                return Err(Error::DenominatorVanishes);
            }
            Ok(lat.wp(arg)? - lat.wp_prime(arg)? / (denom * 2.0))
        }
        P6Family::L0One => {
            let omega = w3 * c1 - w1 * c3;
            let eta = h3 * c1 - h1 * c3;
            let z = lat.zeta(omega)? - eta;
            let p = lat.wp(omega)?;
            let pp = lat.wp_prime(omega)?;
            let num = p * 2.0 * z.powu(3) + pp * 3.0 * z * z + (p * p * 6.0 - lat.g2()) * z
                + p * pp;
            let den = (z.powu(3) - p * 3.0 * z - pp) * 2.0;
            if den.norm() < tol * (1.0 + num.norm()) {
                return Err(Error::DenominatorVanishes);
            }
            Ok(num / den)
        }
        P6Family::Riccati0 => {
            let den = w3 * c1 - w1 * c3;
            if den.norm() < tol {
                return Err(Error::DenominatorVanishes);
            }
            Ok(-(h3 * c1 - h1 * c3) / den)
        }
        P6Family::RiccatiI(i) => {
            let ei = lat.e(i);
            let omega = w3 * c1 - w1 * c3;
            let eta = h3 * c1 - h1 * c3;
            let den = omega * ei + eta;
            if den.norm() < tol {
                return Err(Error::DenominatorVanishes);
            }
            Ok((omega * (lat.g2() * 0.25 - ei * ei * 2.0) + eta * ei) / den)
        }
        P6Family::Riccati0L01 => {
            let omega = w3 * c1 - w1 * c3;
            let eta = h3 * c1 - h1 * c3;
            let den = omega * (lat.g2() * omega * omega - eta * eta * 12.0);
            if den.norm() < tol {
                return Err(Error::DenominatorVanishes);
            }
            Ok((eta.powu(3) * 4.0 + lat.g2() * omega * omega * eta - lat.g3() * omega.powu(3) * 2.0)
                / den)
        }
        P6Family::RiccatiIL01(i) => {
            let ei = lat.e(i);
            let omega = w3 * c1 - w1 * c3;
            let eta = h3 * c1 - h1 * c3;
            let q = ei * ei * 6.0 - lat.g2();
            let den = q * omega - eta * ei * 6.0;
            if den.norm() < tol {
                return Err(Error::DenominatorVanishes);
            }
            Ok((omega * ei * lat.g2() * -0.5 + eta * q) / den)
        }
    }
}

/// Evaluate the family at one τ with a fresh ℘-inversion for δ₁.
pub fn p6_solution_eval(spec: &P6SolutionSpec, tau: C64) -> Result<P6Point> {
    let lat = tau_lattice(tau)?;
    let b1 = p6_b1(spec, &lat)?;
    let delta1 = lat.wp_inverse(b1, SignHint::Plus)?;
    point_from(spec, &lat, tau, b1, delta1)
}

fn point_from(
    spec: &P6SolutionSpec,
    lat: &PeriodLattice,
    tau: C64,
    b1: C64,
    delta1: C64,
) -> Result<P6Point> {
    let (e1, e2, e3) = (lat.e(1), lat.e(2), lat.e(3));
    Ok(P6Point {
        tau,
        b1,
        delta1,
        lambda: (b1 - e1) / (e2 - e1),
        t: (e3 - e1) / (e2 - e1),
        kappas: kappa_map(spec.l()),
    })
}

/// Branch-continuous evaluation along a τ-path: δ₁ follows the nearest
/// preimage from the previous point.
pub struct P6Path {
    spec: P6SolutionSpec,
    prev: Option<C64>,
}

impl P6Path {
    pub fn new(spec: P6SolutionSpec) -> Self {
        P6Path { spec, prev: None }
    }

    pub fn eval(&mut self, tau: C64) -> Result<P6Point> {
        let lat = tau_lattice(tau)?;
        let b1 = p6_b1(&self.spec, &lat)?;
        let delta1 = match self.prev {
            None => lat.wp_inverse(b1, SignHint::Plus)?,
            Some(prev) => {
                let d = lat.wp_inverse_near(b1, prev)?;
                let cell = lat.omega1().norm() + lat.omega3().norm();
                if (d - prev).norm() > 0.5 * cell {
                    return Err(Error::BranchJumpDetected {
                        step: (d - prev).norm(),
                    });
                }
                d
            }
        };
        self.prev = Some(delta1);
        point_from(&self.spec, &lat, tau, b1, delta1)
    }
}

/// Relative residual of the elliptic-form equation at τ: fourth-order
/// 5-point central second difference of the branch-tracked δ₁(τ), against
/// the closed-form right side.
pub fn p6_residual(spec: &P6SolutionSpec, tau: C64, h: f64) -> Result<f64> {
    let step = C64::new(h, 0.0);
    let mut path = P6Path::new(*spec);
    let mut d = Vec::with_capacity(5);
    for k in -2i32..=2 {
        d.push(path.eval(tau + step * k as f64)?.delta1);
    }
    let second = (-d[0] + d[1] * 16.0 - d[2] * 30.0 + d[3] * 16.0 - d[4]) / (12.0 * h * h);
    let lat = tau_lattice(tau)?;
    let l = spec.l();
    let mut rhs = C64::new(0.0, 0.0);
    for i in 0..=3usize {
        let w = l[i] as f64 + 0.5;
        rhs += lat.wp_prime(d[2] + lat.omega(i))? * (w * w);
    }
    rhs /= C64::new(-8.0 * PI * PI, 0.0);
    Ok((second - rhs).norm() / rhs.norm().max(1e-300))
}

/// Invert the Hermite–Krichever data into (b₁, μ₁). Supported l-families:
/// (0,0,0,0) and (1,0,0,0).
pub fn hk_to_p6(
    lat: &PeriodLattice,
    alpha: C64,
    kappa: C64,
    l: [u32; 4],
) -> Result<(C64, C64)> {
    let p = lat.wp(alpha)?;
    let pp = lat.wp_prime(alpha)?;
    let tol = 1e-12;
    match l {
        [0, 0, 0, 0] => {
            if pp.norm() < tol || kappa.norm() < tol {
                return Err(Error::DenominatorVanishes);
            }
            Ok((p - pp / (kappa * 2.0), -kappa / pp))
        }
        [1, 0, 0, 0] => {
            let den_b = (kappa.powu(3) - p * 3.0 * kappa + pp) * 2.0;
            let den_mu = -pp * 2.0 * kappa.powu(3) + (p * p * 12.0 - lat.g2()) * kappa * kappa
                - p * pp * 6.0 * kappa
                + pp * pp;
            if den_b.norm() < tol || den_mu.norm() < tol {
                return Err(Error::DenominatorVanishes);
            }
            let b1 = (p * 2.0 * kappa.powu(3) - pp * 3.0 * kappa * kappa
                + (p * p * 6.0 - lat.g2()) * kappa
                - p * pp)
                / den_b;
            let mu1 = (kappa.powu(3) - p * 3.0 * kappa + pp) * 2.0 * kappa / den_mu;
            Ok((b1, mu1))
        }
        other => Err(Error::UnsupportedLFamily(other)),
    }
}

/// Forward closed forms (℘(α), ℘′(α), κ, Q) from (b₁, μ₁) for l = 0.
pub fn p6_forward_l0(lat: &PeriodLattice, b1: C64, mu1: C64) -> (C64, C64, C64, C64) {
    let q = mu1
        * 2.0
        * (mu1 * 2.0 * (lat.e(1) - b1) + 1.0)
        * ((lat.e(2) - b1) * 2.0 * mu1 + 1.0)
        * (mu1 * 2.0 * (lat.e(3) - b1) + 1.0);
    let sq = (-q).sqrt();
    let wp_alpha = b1 - (mu1 * 2.0).inv();
    let wp_alpha_prime = -sq / (mu1 * mu1 * 2.0);
    let kappa = sq / (mu1 * 2.0);
    (wp_alpha, wp_alpha_prime, kappa, q)
}

/// Forward closed forms for l = (1,0,0,0).
pub fn p6_forward_l01(lat: &PeriodLattice, b1: C64, mu1: C64) -> (C64, C64, C64, C64) {
    let g2 = lat.g2();
    let cubic = lat.weierstrass_cubic(b1);
    let denom = cubic * 2.0 * mu1.powu(3) - (b1 * b1 * 12.0 - g2) * mu1 * mu1 + 4.0;
    let mut q = -denom;
    for i in 1..=3 {
        let ei = lat.e(i);
        q *= (b1 * b1 + ei * b1 + ei * ei - g2 * 0.25) * 2.0 * mu1 - b1 * 2.0 - ei;
    }
    let sq = (-q).sqrt();
    let wp_alpha = (cubic * 2.0 * b1 * mu1.powu(3)
        + (b1.powu(3) * -24.0 + g2 * b1 * 4.0 + lat.g3() * 3.0) * mu1 * mu1
        + (b1 * b1 * 24.0 - g2 * 2.0) * mu1
        - b1 * 8.0)
        / denom;
    let wp_alpha_prime =
        (cubic * mu1.powu(3) - (b1 * b1 * 12.0 - g2) * mu1 * mu1 + b1 * 12.0 * mu1 - 4.0) * -4.0
            * sq
            / (denom * denom);
    let kappa = mu1 * 2.0 * sq / denom;
    (wp_alpha, wp_alpha_prime, kappa, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kappa_map_values() {
        assert_eq!(kappa_map([0, 0, 0, 0]), [0.5, 0.5, 0.5, 0.5]);
        assert_eq!(kappa_map([1, 0, 0, 0]), [0.5, 0.5, 0.5, 1.5]);
        // κ_∞ depends only on l₀
        assert_eq!(kappa_map([3, 1, 2, 0])[3], 3.5);
    }

    #[test]
    fn hk_roundtrip_l0() {
        let lat = tau_lattice(c(0.2, 1.3)).unwrap();
        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..12 {
            let b1 = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let mu1 = c(rng.gen_range(-1.0..1.0), rng.gen_range(0.1..1.0));
            let (wa, wap, kap, _q) = p6_forward_l0(&lat, b1, mu1);
            // invert using the closed forms directly
            let mu_back = -kap / wap;
            let b_back = wa - wap / (kap * 2.0);
            assert!((mu_back - mu1).norm() < 1e-10 * (1.0 + mu1.norm()));
            assert!((b_back - b1).norm() < 1e-10 * (1.0 + b1.norm()));
        }
    }

    #[test]
    fn hk_roundtrip_l01() {
        let lat = tau_lattice(c(-0.1, 1.1)).unwrap();
        let g2 = lat.g2();
        let mut rng = StdRng::seed_from_u64(22);
        for _ in 0..12 {
            let b1 = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let mu1 = c(rng.gen_range(-1.0..1.0), rng.gen_range(0.1..1.0));
            let (wa, wap, kap, _q) = p6_forward_l01(&lat, b1, mu1);
            let den_b = (kap.powu(3) - wa * 3.0 * kap + wap) * 2.0;
            let b_back = (wa * 2.0 * kap.powu(3) - wap * 3.0 * kap * kap
                + (wa * wa * 6.0 - g2) * kap
                - wa * wap)
                / den_b;
            let den_mu = -wap * 2.0 * kap.powu(3) + (wa * wa * 12.0 - g2) * kap * kap
                - wa * wap * 6.0 * kap
                + wap * wap;
            let mu_back = (kap.powu(3) - wa * 3.0 * kap + wap) * 2.0 * kap / den_mu;
            assert!(
                (b_back - b1).norm() < 1e-8 * (1.0 + b1.norm()),
                "b1={b1} back={b_back}"
            );
            assert!(
                (mu_back - mu1).norm() < 1e-8 * (1.0 + mu1.norm()),
                "mu1={mu1} back={mu_back}"
            );
        }
    }

    #[test]
    fn hk_to_p6_matches_forward() {
        let lat = tau_lattice(c(0.15, 1.4)).unwrap();
        let b1 = c(0.42, -0.31);
        let mu1 = c(0.8, 0.37);
        for l in [[0u32, 0, 0, 0], [1, 0, 0, 0]] {
            let (wa, wap, kap, _) = if l[0] == 0 {
                p6_forward_l0(&lat, b1, mu1)
            } else {
                p6_forward_l01(&lat, b1, mu1)
            };
            // recover α from ℘(α) with the sign of ℘′ fixed by the forward value
            let alpha = lat
                .wp_inverse(wa, SignHint::Plus)
                .or_else(|_| lat.wp_inverse(wa, SignHint::Minus))
                .unwrap();
            let alpha = if (lat.wp_prime(alpha).unwrap() - wap).norm()
                < (lat.wp_prime(alpha).unwrap() + wap).norm()
            {
                alpha
            } else {
                -alpha
            };
            let (b_back, mu_back) = hk_to_p6(&lat, alpha, kap, l).unwrap();
            assert!((b_back - b1).norm() < 1e-8 * (1.0 + b1.norm()), "l={l:?}");
            assert!((mu_back - mu1).norm() < 1e-8 * (1.0 + mu1.norm()), "l={l:?}");
        }
    }

    #[test]
    fn unsupported_family_rejected() {
        let lat = tau_lattice(c(0.0, 1.0)).unwrap();
        assert!(matches!(
            hk_to_p6(&lat, c(0.3, 0.2), c(1.0, 0.0), [0, 1, 0, 0]),
            Err(Error::UnsupportedLFamily(_))
        ));
    }

    #[test]
    fn hitchin_residual_small() {
        let spec = P6SolutionSpec::new(P6Family::Hitchin, c(0.3, 0.0), c(0.4, 0.1)).unwrap();
        let r = p6_residual(&spec, c(0.2, 1.1), 1e-3).unwrap();
        assert!(r < 1e-5, "residual {r}");
    }

    #[test]
    fn riccati_residuals_small() {
        for family in [
            P6Family::Riccati0,
            P6Family::RiccatiI(1),
            P6Family::RiccatiI(2),
            P6Family::RiccatiI(3),
            P6Family::Riccati0L01,
            P6Family::RiccatiIL01(2),
            P6Family::L0One,
        ] {
            let spec = P6SolutionSpec::new(family, c(0.27, 0.05), c(0.51, 0.13)).unwrap();
            let r = p6_residual(&spec, c(0.13, 1.2), 4e-3).unwrap();
            assert!(r < 1e-5, "family {family:?}: residual {r}");
        }
    }

    #[test]
    fn residual_is_fourth_order_in_h() {
        let spec = P6SolutionSpec::new(P6Family::Hitchin, c(0.3, 0.0), c(0.4, 0.1)).unwrap();
        let tau = c(0.17, 1.3);
        let r1 = p6_residual(&spec, tau, 2.4e-2).unwrap();
        let r2 = p6_residual(&spec, tau, 1.2e-2).unwrap();
        let ratio = r2 / r1;
        assert!(
            (0.02..0.13).contains(&ratio),
            "expected ~1/16 Richardson ratio, got {ratio} ({r1:e} -> {r2:e})"
        );
    }

    #[test]
    fn hitchin_degenerates_to_riccati() {
        let (d1, d3) = (c(0.7, 0.1), c(0.33, -0.2));
        let tau = c(0.21, 1.05);
        let lat = tau_lattice(tau).unwrap();
        // μ₁ = 0 branch
        let r0 = P6SolutionSpec::new(P6Family::Riccati0, d1, d3).unwrap();
        let want = p6_b1(&r0, &lat).unwrap();
        let mut errs = Vec::new();
        for cs in [1e-3, 1e-4] {
            let h = P6SolutionSpec::new(P6Family::Hitchin, d1 * cs, d3 * cs).unwrap();
            errs.push((p6_b1(&h, &lat).unwrap() - want).norm());
        }
        assert!(errs[0] < 1e-1);
        // at least first order; the μ₁ = 0 branch loses its linear term and
        // lands at second order
        let order = errs[0] / errs[1];
        assert!((4.0..400.0).contains(&order), "convergence in C: {errs:?}");
        // μ₁ = 1/(2(b₁−e_i)) branches
        for (i, shift) in [
            (1usize, (c(0.0, 0.0), c(-1.0, 0.0))),
            (2, (c(-1.0, 0.0), c(1.0, 0.0))),
            (3, (c(1.0, 0.0), c(0.0, 0.0))),
        ] {
            let ri = P6SolutionSpec::new(P6Family::RiccatiI(i), d1, d3).unwrap();
            let want = p6_b1(&ri, &lat).unwrap();
            let mut errs = Vec::new();
            for cs in [1e-3, 1e-4] {
                let h = P6SolutionSpec::new(
                    P6Family::Hitchin,
                    shift.0 + d1 * cs,
                    shift.1 + d3 * cs,
                )
                .unwrap();
                errs.push((p6_b1(&h, &lat).unwrap() - want).norm());
            }
            let order = errs[0] / errs[1];
            assert!(
                (4.0..400.0).contains(&order),
                "i={i}: convergence in C: {errs:?}"
            );
        }
    }
}
