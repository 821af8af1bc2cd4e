//! Numerical kernel for the Weierstrass functions ℘, ℘′, ℘″, ζ, σ, the
//! co-functions σ_i, ℘_i, the translated-sigma kernel Φ_i(x,α) and ℘-inversion
//! on an arbitrary nondegenerate lattice.
//!
//! Evaluation strategy: arguments are reduced into a fundamental cell first
//! (tracking quasi-periodicity factors), then the Laurent/Taylor series around
//! the origin with cached Eisenstein-recursion coefficients is used, preceded
//! by argument halvings and followed by the matching duplication steps when
//! the reduced argument sits too far out in the cell. Invariants g₂, g₃ come
//! from the rapidly convergent Eisenstein q-expansions on the lattice-reduced
//! basis. Target relative accuracy is 1e-12 on the fundamental cell.

use crate::error::{Error, Result};
use crate::C64;
use std::f64::consts::PI;

/// Which function [`PeriodLattice::eval`] computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EllipticKind {
    /// ℘(z)
    P,
    /// ℘′(z)
    PPrime,
    /// ℘″(z), returned as 6℘² − g₂/2
    PSecond,
    /// ζ(z)
    Zeta,
    /// σ(z)
    Sigma,
    /// co-sigma σ_i(z) = exp(−η_i z) σ(z+ω_i)/σ(ω_i), i ∈ {1,2,3}
    SigmaI(usize),
    /// co-℘ ℘_i(z) = σ_i(z)/σ(z), with ℘_i(z)² = ℘(z) − e_i
    WpI(usize),
}

/// Sign hint for [`PeriodLattice::wp_inverse`]: the returned preimage t has
/// sign(Re ℘′(t)) equal to the hint, falling back to sign(Im ℘′(t)) when the
/// real part is below tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignHint {
    Plus,
    Minus,
}

impl SignHint {
    fn as_f64(self) -> f64 {
        match self {
            SignHint::Plus => 1.0,
            SignHint::Minus => -1.0,
        }
    }
}

/// A period lattice 2ω₁ℤ ⊕ 2ω₃ℤ with the derived constants e_i, η_i, g₂, g₃
/// and cached evaluation state. Immutable after construction; all evaluation
/// methods are pure.
#[derive(Debug, Clone)]
pub struct PeriodLattice {
    omega1: C64,
    omega3: C64,
    omega2: C64,
    e: [C64; 3],
    eta: [C64; 3],
    g2: C64,
    g3: C64,
    precision: f64,
    /// Laurent coefficients c_k of ℘ (k = 2..), coeffs[j] = c_{j+2}.
    coeffs: Vec<C64>,
    /// Lattice-reduced basis vectors (full periods) and their integer
    /// coordinates in the (2ω₁, 2ω₃) basis.
    red_u: C64,
    red_v: C64,
    u_int: (i64, i64),
    v_int: (i64, i64),
    /// Row-major inverses for coordinate extraction.
    inv_uv: [f64; 4],
    inv_base: [f64; 4],
    /// Distance from the origin to the nearest nonzero lattice point.
    rmin: f64,
    /// σ(ω_i), cached for the co-sigma definition.
    sigma_omega: [C64; 3],
}

const KMAX: usize = 30;
const SERIES_RADIUS: f64 = 0.42;
const MAX_HALVINGS: u32 = 8;

fn inv2x2(a: C64, b: C64) -> Option<[f64; 4]> {
    // Columns (Re a, Im a), (Re b, Im b).
    let det = a.re * b.im - a.im * b.re;
    if det == 0.0 {
        return None;
    }
    Some([b.im / det, -b.re / det, -a.im / det, a.re / det])
}

fn coords(inv: &[f64; 4], z: C64) -> (f64, f64) {
    (
        inv[0] * z.re + inv[1] * z.im,
        inv[2] * z.re + inv[3] * z.im,
    )
}

/// Fractional part in [-1/2, 1/2) with ties resolved toward -1/2; also
/// returns the removed integer.
fn frac_half(a: f64) -> (f64, i64) {
    let k = (a + 0.5).floor();
    (a - k, k as i64)
}

#[derive(Debug, Clone, Copy)]
struct RawValues {
    p: C64,
    pp: C64,
    zeta: C64,
    sigma: C64,
}

impl PeriodLattice {
    /// Construct the lattice with half-periods (ω₁, ω₃).
    ///
    /// Requires Im(ω₃/ω₁) > precision and precision ∈ (0, 1e-4].
    pub fn new(omega1: C64, omega3: C64, precision: f64) -> Result<Self> {
        if !(precision > 0.0 && precision <= 1e-4) {
            return Err(Error::InvalidPrecision(precision));
        }
        let ratio = omega3 / omega1;
        if !(ratio.im > precision) {
            return Err(Error::DegenerateLattice {
                imag_ratio: ratio.im,
            });
        }

        // Lattice (Gauss) reduction of the period basis.
        let (mut u, mut v) = (omega1 * 2.0, omega3 * 2.0);
        let (mut u_int, mut v_int) = ((1i64, 0i64), (0i64, 1i64));
        if u.norm() > v.norm() {
            std::mem::swap(&mut u, &mut v);
            std::mem::swap(&mut u_int, &mut v_int);
        }
        for _ in 0..64 {
            let mu = ((v * u.conj()).re / u.norm_sqr()).round();
            if mu != 0.0 {
                v -= u * mu;
                v_int = (v_int.0 - mu as i64 * u_int.0, v_int.1 - mu as i64 * u_int.1);
            }
            if u.norm() <= v.norm() {
                break;
            }
            std::mem::swap(&mut u, &mut v);
            std::mem::swap(&mut u_int, &mut v_int);
        }
        // Orient so Im(v/u) > 0 (v -> -v leaves the lattice unchanged).
        if (v / u).im < 0.0 {
            v = -v;
            v_int = (-v_int.0, -v_int.1);
        }
        let rmin = [u, v, u + v, u - v]
            .iter()
            .map(|w| w.norm())
            .fold(f64::MAX, f64::min);

        // Invariants from the Eisenstein q-series on the reduced basis.
        let tau = v / u;
        let q = (C64::new(0.0, 2.0 * PI) * tau).exp();
        let (mut e4, mut e6) = (C64::new(1.0, 0.0), C64::new(1.0, 0.0));
        let mut qn = q;
        for n in 1..100_000u64 {
            let nf = n as f64;
            let term = qn / (C64::new(1.0, 0.0) - qn);
            let t4 = term * (240.0 * nf * nf * nf);
            let t6 = term * (504.0 * nf * nf * nf * nf * nf);
            e4 += t4;
            e6 -= t6;
            if t4.norm() + t6.norm() < 1e-19 * (e4.norm() + e6.norm()) {
                break;
            }
            qn *= q;
        }
        let half_u = u * 0.5;
        let pi_w = C64::new(PI, 0.0) / half_u;
        let g2 = pi_w.powu(4) * e4 / 12.0;
        let g3 = pi_w.powu(6) * e6 / 216.0;

        // Laurent coefficients c_k: c2 = g2/20, c3 = g3/28,
        // c_k = 3/((2k+1)(k-3)) Σ_{m=2}^{k-2} c_m c_{k-m}.
        let mut coeffs = vec![C64::new(0.0, 0.0); KMAX - 1];
        coeffs[0] = g2 / 20.0;
        coeffs[1] = g3 / 28.0;
        for k in 4..=KMAX {
            let mut s = C64::new(0.0, 0.0);
            for m in 2..=(k - 2) {
                s += coeffs[m - 2] * coeffs[k - m - 2];
            }
            coeffs[k - 2] = s * (3.0 / (((2 * k + 1) * (k - 3)) as f64));
        }

        let inv_uv = inv2x2(u, v).ok_or(Error::DegenerateLattice {
            imag_ratio: ratio.im,
        })?;
        let inv_base = inv2x2(omega1 * 2.0, omega3 * 2.0).ok_or(Error::DegenerateLattice {
            imag_ratio: ratio.im,
        })?;

        let mut lat = PeriodLattice {
            omega1,
            omega3,
            omega2: -omega1 - omega3,
            e: [C64::new(0.0, 0.0); 3],
            eta: [C64::new(0.0, 0.0); 3],
            g2,
            g3,
            precision,
            coeffs,
            red_u: u,
            red_v: v,
            u_int,
            v_int,
            inv_uv,
            inv_base,
            rmin,
            sigma_omega: [C64::new(0.0, 0.0); 3],
        };

        // e_i = ℘(ω_i): periodic, reduction is safe without η.
        let omegas = [lat.omega1, lat.omega2, lat.omega3];
        for (i, &w) in omegas.iter().enumerate() {
            let (zr, _, _) = lat.reduce_full(w);
            lat.e[i] = lat.raw_eval(zr).p;
        }

        // η for the reduced basis by direct short-argument evaluation, then
        // transported to (η₁, η₃) through the unimodular basis change.
        let h_u = lat.raw_eval(u * 0.5).zeta * 2.0;
        let h_v = lat.raw_eval(v * 0.5).zeta * 2.0;
        // 2ω₁ = p·u + q·v with integers from inverting the reduction matrix.
        let det = lat.u_int.0 * lat.v_int.1 - lat.u_int.1 * lat.v_int.0;
        debug_assert!(det == 1 || det == -1);
        let detf = det as f64;
        // (u_int, v_int) rows map (2ω₁,2ω₃)->(u,v); invert for the reverse.
        let p1 = lat.v_int.1 as f64 / detf;
        let q1 = -(lat.u_int.1 as f64) / detf;
        let p3 = -(lat.v_int.0 as f64) / detf;
        let q3 = lat.u_int.0 as f64 / detf;
        let eta1 = (h_u * p1 + h_v * q1) * 0.5;
        let eta3 = (h_u * p3 + h_v * q3) * 0.5;
        lat.eta = [eta1, -eta1 - eta3, eta3];

        for i in 0..3 {
            lat.sigma_omega[i] = {
                let (zr, m1, m3) = lat.reduce_full(omegas[i]);
                lat.sigma_from_reduced(zr, m1, m3)
            };
        }

        lat.validate()?;
        Ok(lat)
    }

    fn validate(&self) -> Result<()> {
        let tol = (self.precision).max(1e-12) * 100.0;
        let scale = self.omega1.norm().max(self.omega3.norm());
        let esum = (self.e[0] + self.e[1] + self.e[2]).norm();
        let etasum = (self.eta[0] + self.eta[1] + self.eta[2]).norm();
        let legendre = (self.eta[0] * self.omega3 - self.eta[2] * self.omega1
            - C64::new(0.0, PI / 2.0))
        .norm();
        if esum > tol * (1.0 + self.g2.norm()) || etasum > tol / scale || legendre > tol {
            return Err(Error::NoConvergence {
                context: "lattice invariant validation",
                iters: 0,
                residual: esum.max(etasum).max(legendre),
            });
        }
        Ok(())
    }

    pub fn omega(&self, i: usize) -> C64 {
        match i {
            0 => C64::new(0.0, 0.0),
            1 => self.omega1,
            2 => self.omega2,
            3 => self.omega3,
            _ => panic!("half-period index out of range"),
        }
    }

    pub fn omega1(&self) -> C64 {
        self.omega1
    }

    pub fn omega3(&self) -> C64 {
        self.omega3
    }

    /// e_i = ℘(ω_i) for i ∈ {1,2,3}.
    pub fn e(&self, i: usize) -> C64 {
        self.e[i - 1]
    }

    /// η_i = ζ(ω_i) for i ∈ {1,2,3}.
    pub fn eta(&self, i: usize) -> C64 {
        self.eta[i - 1]
    }

    pub fn g2(&self) -> C64 {
        self.g2
    }

    pub fn g3(&self) -> C64 {
        self.g3
    }

    pub fn precision(&self) -> f64 {
        self.precision
    }

    /// Laurent coefficients c_k of ℘ at the origin (k = 2.., so
    /// ℘(z) = z⁻² + Σ_k coeffs[k−2] z^{2k−2}).
    pub fn laurent_coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// 4z³ − g₂z − g₃ evaluated at z.
    pub fn weierstrass_cubic(&self, z: C64) -> C64 {
        ((z * 4.0 * z - self.g2) * z) - self.g3
    }

    /// Reduce z by the lattice-reduced basis; returns (w, m1, m3) with
    /// z = w + 2 m1 ω₁ + 2 m3 ω₃ and w in the reduced cell.
    fn reduce_full(&self, z: C64) -> (C64, i64, i64) {
        let (a, b) = coords(&self.inv_uv, z);
        let (_, ka) = frac_half(a);
        let (_, kb) = frac_half(b);
        let w = z - self.red_u * (ka as f64) - self.red_v * (kb as f64);
        let m1 = ka * self.u_int.0 + kb * self.v_int.0;
        let m3 = ka * self.u_int.1 + kb * self.v_int.1;
        (w, m1, m3)
    }

    /// Reduce z into the fundamental cell in the (2ω₁, 2ω₃) basis with
    /// coefficients in [-1/2, 1/2), ties toward -1/2 (the deterministic
    /// convention used for ℘-inversion and α-normalization).
    pub fn reduce_to_cell(&self, z: C64) -> (C64, i64, i64) {
        let (a, b) = coords(&self.inv_base, z);
        let (_, ka) = frac_half(a);
        let (_, kb) = frac_half(b);
        (
            z - self.omega1 * (2.0 * ka as f64) - self.omega3 * (2.0 * kb as f64),
            ka,
            kb,
        )
    }

    /// Distance from z to the nearest lattice point.
    pub fn dist_to_lattice(&self, z: C64) -> f64 {
        let (w, _, _) = self.reduce_full(z);
        let mut best = w.norm();
        for di in [-1.0, 0.0, 1.0] {
            for dj in [-1.0, 0.0, 1.0] {
                best = best.min((w - self.red_u * di - self.red_v * dj).norm());
            }
        }
        best
    }

    pub fn is_lattice_point(&self, z: C64, tol: f64) -> bool {
        self.dist_to_lattice(z) <= tol
    }

    /// Series + duplication evaluation of (℘, ℘′, ζ, σ) at a cell-reduced
    /// argument. No quasi-periodicity corrections are applied here.
    fn raw_eval(&self, z: C64) -> RawValues {
        if z.norm() == 0.0 {
            let inf = C64::new(f64::INFINITY, 0.0);
            return RawValues {
                p: inf,
                pp: inf,
                zeta: inf,
                sigma: C64::new(0.0, 0.0),
            };
        }
        let target = SERIES_RADIUS * self.rmin;
        let mut halvings = 0u32;
        while z.norm() / f64::powi(2.0, halvings as i32) > target && halvings < MAX_HALVINGS {
            halvings += 1;
        }
        let w = z / f64::powi(2.0, halvings as i32);

        // Laurent/Taylor series at w.
        let w2 = w * w;
        let mut p = C64::new(0.0, 0.0);
        let mut pp = C64::new(0.0, 0.0);
        let mut zeta = C64::new(0.0, 0.0);
        let mut logsig = C64::new(0.0, 0.0);
        let mut wpow = w2; // w^{2k-2} for k=2 is w^2
        for (j, &c) in self.coeffs.iter().enumerate() {
            let k = (j + 2) as f64;
            p += c * wpow;
            pp += c * wpow / w * (2.0 * k - 2.0);
            zeta -= c * wpow * w / (2.0 * k - 1.0);
            logsig -= c * wpow * w2 / ((2.0 * k - 1.0) * 2.0 * k);
            wpow *= w2;
        }
        p += w2.inv();
        pp += -2.0 * (w2 * w).inv();
        zeta += w.inv();
        let mut vals = RawValues {
            p,
            pp,
            zeta,
            sigma: w * logsig.exp(),
        };

        for _ in 0..halvings {
            let u = vals.p;
            let v = vals.pp;
            let w2nd = u * u * 6.0 - self.g2 * 0.5;
            let half_ratio = w2nd / (v * 2.0);
            vals = RawValues {
                p: half_ratio * half_ratio - u * 2.0,
                pp: -v + u * 3.0 * w2nd / v - w2nd.powu(3) / (v.powu(3) * 4.0),
                zeta: vals.zeta * 2.0 + half_ratio,
                sigma: -vals.sigma.powu(4) * v,
            };
        }
        vals
    }

    fn sigma_from_reduced(&self, w: C64, m1: i64, m3: i64) -> C64 {
        let raw = self.raw_eval(w).sigma;
        if m1 == 0 && m3 == 0 {
            return raw;
        }
        let l = self.omega1 * (2.0 * m1 as f64) + self.omega3 * (2.0 * m3 as f64);
        let eta_l = self.eta[0] * (2.0 * m1 as f64) + self.eta[2] * (2.0 * m3 as f64);
        let parity = m1 + m3 + m1 * m3;
        let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
        raw * sign * (eta_l * (w + l * 0.5)).exp()
    }

    /// Evaluate one of the Weierstrass family functions at z.
    pub fn eval(&self, kind: EllipticKind, z: C64) -> Result<C64> {
        let (w, m1, m3) = self.reduce_full(z);
        let near_pole = w.norm() <= self.precision;
        match kind {
            EllipticKind::P | EllipticKind::PPrime | EllipticKind::PSecond
            | EllipticKind::Zeta
            | EllipticKind::WpI(_)
                if near_pole =>
            {
                return Err(Error::PoleAtLatticePoint {
                    tol: self.precision,
                })
            }
            _ => {}
        }
        Ok(match kind {
            EllipticKind::P => self.raw_eval(w).p,
            EllipticKind::PPrime => self.raw_eval(w).pp,
            EllipticKind::PSecond => {
                let p = self.raw_eval(w).p;
                p * p * 6.0 - self.g2 * 0.5
            }
            EllipticKind::Zeta => {
                self.raw_eval(w).zeta
                    + self.eta[0] * (2.0 * m1 as f64)
                    + self.eta[2] * (2.0 * m3 as f64)
            }
            EllipticKind::Sigma => self.sigma_from_reduced(w, m1, m3),
            EllipticKind::SigmaI(i) => {
                assert!((1..=3).contains(&i), "co-sigma index must be 1..=3");
                let wi = self.omega(match i {
                    1 => 1,
                    2 => 2,
                    _ => 3,
                });
                (-self.eta[i - 1] * z).exp() * self.sigma(z + wi)? / self.sigma_omega[i - 1]
            }
            EllipticKind::WpI(i) => {
                assert!((1..=3).contains(&i), "co-wp index must be 1..=3");
                self.eval(EllipticKind::SigmaI(i), z)? / self.sigma(z)?
            }
        })
    }

    pub fn wp(&self, z: C64) -> Result<C64> {
        self.eval(EllipticKind::P, z)
    }

    pub fn wp_prime(&self, z: C64) -> Result<C64> {
        self.eval(EllipticKind::PPrime, z)
    }

    pub fn zeta(&self, z: C64) -> Result<C64> {
        self.eval(EllipticKind::Zeta, z)
    }

    pub fn sigma(&self, z: C64) -> Result<C64> {
        self.eval(EllipticKind::Sigma, z)
    }

    /// Taylor coefficients of ℘ at z up to `order`, so that
    /// ℘(z+h) = Σ_k jet[k] h^k. Built from (℘, ℘′) via the differential
    /// equation ℘″ = 6℘² − g₂/2 — derivatives of any order in closed form.
    pub fn wp_jet(&self, z: C64, order: usize) -> Result<Vec<C64>> {
        let mut jet = vec![C64::new(0.0, 0.0); order + 1];
        jet[0] = self.wp(z)?;
        if order >= 1 {
            jet[1] = self.wp_prime(z)?;
        }
        for k in 0..order.saturating_sub(1) {
            let mut conv = C64::new(0.0, 0.0);
            for i in 0..=k {
                conv += jet[i] * jet[k - i];
            }
            let mut rhs = conv * 6.0;
            if k == 0 {
                rhs -= self.g2 * 0.5;
            }
            jet[k + 2] = rhs / (((k + 1) * (k + 2)) as f64);
        }
        Ok(jet)
    }

    /// Derivatives [℘, ℘′, ℘″, ...] at z up to `order`.
    pub fn wp_derivatives(&self, z: C64, order: usize) -> Result<Vec<C64>> {
        let jet = self.wp_jet(z, order)?;
        let mut fact = 1.0;
        Ok(jet
            .into_iter()
            .enumerate()
            .map(|(k, c)| {
                if k > 0 {
                    fact *= k as f64;
                }
                c * fact
            })
            .collect())
    }

    /// The ansatz kernel Φ_i(x,α) = σ(x+ω_i−α)/σ(x+ω_i) · exp(ζ(α)x) and its
    /// x-derivatives, via the logarithmic-derivative recursion
    /// Φ^{(j+1)} = Σ_m C(j,m) Φ^{(m)} L^{(j−m)} with
    /// L = ζ(x+ω_i−α) − ζ(x+ω_i) + ζ(α).
    pub fn phi_kernel(&self, i: usize, x: C64, alpha: C64, deriv_order: usize) -> Result<C64> {
        assert!(i <= 3, "translation index must be 0..=3");
        if self.is_lattice_point(alpha, self.precision) {
            return Err(Error::AlphaOnLattice);
        }
        let wi = self.omega(i);
        if self.is_lattice_point(x + wi, self.precision) {
            return Err(Error::PoleAtLatticePoint {
                tol: self.precision,
            });
        }
        let zeta_alpha = self.zeta(alpha)?;
        let phi0 = self.sigma(x + wi - alpha)? / self.sigma(x + wi)? * (zeta_alpha * x).exp();
        if deriv_order == 0 {
            return Ok(phi0);
        }
        let n = deriv_order;
        // L^{(k)}: k = 0 is L itself, k >= 1 uses ζ^{(k)} = −℘^{(k−1)}.
        let da = self.wp_derivatives(x + wi - alpha, n.saturating_sub(1))?;
        let db = self.wp_derivatives(x + wi, n.saturating_sub(1))?;
        let mut l = vec![C64::new(0.0, 0.0); n];
        l[0] = self.zeta(x + wi - alpha)? - self.zeta(x + wi)? + zeta_alpha;
        for k in 1..n {
            l[k] = -da[k - 1] + db[k - 1];
        }
        // Pascal triangle up to row n-1.
        let mut binom: Vec<Vec<f64>> = vec![vec![1.0]];
        for j in 1..n {
            let prev = &binom[j - 1];
            let mut row = vec![1.0];
            for t in 1..j {
                row.push(prev[t - 1] + prev[t]);
            }
            row.push(1.0);
            binom.push(row);
        }
        let mut phi = vec![phi0];
        for j in 0..n {
            let mut next = C64::new(0.0, 0.0);
            for m in 0..=j {
                next += phi[m] * l[j - m] * binom[j][m];
            }
            phi.push(next);
        }
        Ok(phi[n])
    }

    /// Invert ℘: find t in the fundamental cell with ℘(t) = w and the sign of
    /// ℘′(t) matching `sign_hint` (Re-part convention, Im fallback).
    pub fn wp_inverse(&self, w: C64, sign_hint: SignHint) -> Result<C64> {
        // Half-period shortcut: w at a branch point.
        for i in 1..=3 {
            if (w - self.e(i)).norm() < self.precision * (1.0 + w.norm()) {
                let (t, _, _) = self.reduce_to_cell(self.omega(i));
                return Ok(t);
            }
        }
        let mut seeds: Vec<(f64, C64)> = Vec::new();
        let n = 24;
        for a in 0..n {
            for b in 0..n {
                let s = (a as f64 + 0.5) / n as f64 - 0.5;
                let t = (b as f64 + 0.5) / n as f64 - 0.5;
                let z = self.omega1 * (2.0 * s) + self.omega3 * (2.0 * t);
                if self.dist_to_lattice(z) < 0.05 * self.rmin {
                    continue;
                }
                if let Ok(p) = self.wp(z) {
                    seeds.push(((p - w).norm(), z));
                }
            }
        }
        seeds.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let tol = self.precision * (1.0 + w.norm());
        let mut last_res = f64::MAX;
        for &(_, seed) in seeds.iter().take(6) {
            let mut t = seed;
            for _ in 0..80 {
                let p = match self.wp(t) {
                    Ok(v) => v,
                    Err(_) => break,
                };
                let dp = match self.wp_prime(t) {
                    Ok(v) => v,
                    Err(_) => break,
                };
                if dp.norm() == 0.0 {
                    break;
                }
                let step = (p - w) / dp;
                t -= step;
                if step.norm() < 1e-16 * (1.0 + t.norm()) {
                    break;
                }
            }
            if let Ok(p) = self.wp(t) {
                let res = (p - w).norm();
                last_res = last_res.min(res);
                if res <= tol {
                    return Ok(self.normalize_preimage(t, sign_hint)?);
                }
            }
        }
        Err(Error::NoConvergence {
            context: "wp_inverse Newton from seed grid",
            iters: 80,
            residual: last_res,
        })
    }

    /// Newton refinement of ℘(t)=w from an explicit starting point; used for
    /// branch-continuous inversion along parameter paths.
    pub fn wp_inverse_near(&self, w: C64, start: C64) -> Result<C64> {
        let mut t = start;
        for _ in 0..80 {
            let p = self.wp(t)?;
            let dp = self.wp_prime(t)?;
            if dp.norm() == 0.0 {
                break;
            }
            let step = (p - w) / dp;
            t -= step;
            if step.norm() < 1e-16 * (1.0 + t.norm()) {
                break;
            }
        }
        let res = (self.wp(t)? - w).norm();
        if res <= self.precision.max(1e-10) * (1.0 + w.norm()) {
            Ok(t)
        } else {
            Err(Error::NoConvergence {
                context: "wp_inverse_near Newton",
                iters: 80,
                residual: res,
            })
        }
    }

    fn normalize_preimage(&self, t: C64, sign_hint: SignHint) -> Result<C64> {
        let (mut t, _, _) = self.reduce_to_cell(t);
        let dp = self.wp_prime(t)?;
        let s = if dp.re.abs() >= self.precision * (1.0 + dp.norm()) {
            dp.re.signum()
        } else {
            dp.im.signum()
        };
        if s != sign_hint.as_f64() && dp.norm() > self.precision {
            let (tn, _, _) = self.reduce_to_cell(-t);
            t = tn;
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn square() -> PeriodLattice {
        PeriodLattice::new(C64::new(1.0, 0.0), C64::new(0.0, 1.0), 1e-12).unwrap()
    }

    fn skew() -> PeriodLattice {
        PeriodLattice::new(C64::new(1.1, -0.2), C64::new(0.4, 0.9), 1e-12).unwrap()
    }

    fn rand_cell(lat: &PeriodLattice, rng: &mut StdRng) -> C64 {
        loop {
            let s: f64 = rng.gen_range(-0.5..0.5);
            let t: f64 = rng.gen_range(-0.5..0.5);
            let z = lat.omega1() * (2.0 * s) + lat.omega3() * (2.0 * t);
            if lat.dist_to_lattice(z) > 0.05 {
                return z;
            }
        }
    }

    #[test]
    fn square_lattice_symmetry() {
        let lat = square();
        assert!(lat.e(2).norm() < 1e-12, "e2 = {}", lat.e(2));
        assert!(lat.g3().norm() < 1e-12, "g3 = {}", lat.g3());
        // classical lemniscatic value g2 = Γ(1/4)^8 / (256 π²) for ω₁ = 1
        let gamma_quarter = 3.625_609_908_221_908_3_f64;
        let g2_ref = gamma_quarter.powi(8) / (256.0 * PI * PI);
        assert!(
            (lat.g2().re - g2_ref).abs() < 1e-11 * g2_ref,
            "g2 = {}, ref = {}",
            lat.g2().re,
            g2_ref
        );
    }

    #[test]
    fn wp_at_half_periods_gives_e() {
        for lat in [square(), skew()] {
            for i in 1..=3 {
                let p = lat.wp(lat.omega(i)).unwrap();
                assert!((p - lat.e(i)).norm() < 1e-11 * (1.0 + lat.e(i).norm()));
            }
        }
    }

    #[test]
    fn sum_rules_and_legendre() {
        for lat in [square(), skew()] {
            assert!((lat.e(1) + lat.e(2) + lat.e(3)).norm() < 1e-12 * (1.0 + lat.g2().norm()));
            assert!((lat.eta(1) + lat.eta(2) + lat.eta(3)).norm() < 1e-12);
            let leg = lat.eta(1) * lat.omega3() - lat.eta(3) * lat.omega1();
            assert!((leg - C64::new(0.0, PI / 2.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn parity_at_random_points() {
        let mut rng = StdRng::seed_from_u64(7);
        for lat in [square(), skew()] {
            for _ in 0..200 {
                let z = rand_cell(&lat, &mut rng);
                let scale = 1.0 + lat.wp(z).unwrap().norm();
                assert!((lat.wp(-z).unwrap() - lat.wp(z).unwrap()).norm() < 1e-12 * scale);
                assert!(
                    (lat.zeta(-z).unwrap() + lat.zeta(z).unwrap()).norm()
                        < 1e-12 * (1.0 + lat.zeta(z).unwrap().norm())
                );
                assert!(
                    (lat.sigma(-z).unwrap() + lat.sigma(z).unwrap()).norm()
                        < 1e-12 * (1.0 + lat.sigma(z).unwrap().norm())
                );
            }
        }
    }

    #[test]
    fn sigma_quasi_periodicity() {
        let mut rng = StdRng::seed_from_u64(8);
        for lat in [square(), skew()] {
            for _ in 0..100 {
                let z = rand_cell(&lat, &mut rng);
                for i in 1..=3 {
                    let lhs = lat.sigma(z + lat.omega(i) * 2.0).unwrap();
                    let rhs = -lat.sigma(z).unwrap()
                        * (lat.eta(i) * 2.0 * (z + lat.omega(i))).exp();
                    assert!(
                        (lhs - rhs).norm() < 1e-11 * (1.0 + lhs.norm()),
                        "i={i} z={z} lhs={lhs} rhs={rhs}"
                    );
                }
            }
        }
    }

    #[test]
    fn differential_identity() {
        let mut rng = StdRng::seed_from_u64(9);
        for lat in [square(), skew()] {
            for _ in 0..200 {
                let z = rand_cell(&lat, &mut rng);
                let p = lat.wp(z).unwrap();
                let pp = lat.wp_prime(z).unwrap();
                let lhs = pp * pp;
                let rhs = (p - lat.e(1)) * (p - lat.e(2)) * (p - lat.e(3)) * 4.0;
                assert!((lhs - rhs).norm() < 1e-11 * (1.0 + lhs.norm()));
            }
        }
    }

    #[test]
    fn zeta_derivative_is_minus_wp() {
        let lat = skew();
        let mut rng = StdRng::seed_from_u64(10);
        for _ in 0..50 {
            let z = rand_cell(&lat, &mut rng);
            let h = 1e-6;
            let fd = (lat.zeta(z + C64::new(h, 0.0)).unwrap()
                - lat.zeta(z - C64::new(h, 0.0)).unwrap())
                / (2.0 * h);
            let want = -lat.wp(z).unwrap();
            assert!((fd - want).norm() < 1e-7 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn co_wp_squares_to_wp_minus_e() {
        let lat = skew();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..60 {
            let z = rand_cell(&lat, &mut rng);
            for i in 1..=3 {
                let wi = lat.eval(EllipticKind::WpI(i), z).unwrap();
                let want = lat.wp(z).unwrap() - lat.e(i);
                assert!((wi * wi - want).norm() < 1e-10 * (1.0 + want.norm()));
            }
        }
    }

    #[test]
    fn wp_second_consistency() {
        let lat = square();
        let z = C64::new(0.31, 0.17);
        let jet = lat.wp_jet(z, 5).unwrap();
        let h = C64::new(1e-4, 5e-5);
        let direct = lat.wp(z + h).unwrap();
        let mut series = C64::new(0.0, 0.0);
        let mut hp = C64::new(1.0, 0.0);
        for c in &jet {
            series += c * hp;
            hp *= h;
        }
        assert!((direct - series).norm() < 1e-12 * (1.0 + direct.norm()));
    }

    #[test]
    fn phi_kernel_shift_law() {
        let lat = skew();
        let alpha = C64::new(0.23, 0.11);
        let x = C64::new(0.4, 0.2);
        for i in 0..=3 {
            for k in 0..=2 {
                for j in [1usize, 3] {
                    let shifted = lat
                        .phi_kernel(i, x + lat.omega(j) * 2.0, alpha, k)
                        .unwrap();
                    let base = lat.phi_kernel(i, x, alpha, k).unwrap();
                    let factor = (-lat.eta(j) * 2.0 * alpha
                        + lat.omega(j) * 2.0 * lat.zeta(alpha).unwrap())
                    .exp();
                    assert!(
                        (shifted - base * factor).norm() < 1e-10 * (1.0 + shifted.norm()),
                        "i={i} j={j} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn phi_kernel_residue_at_origin() {
        let lat = square();
        let alpha = C64::new(0.37, 0.21);
        // x Φ₀(x,α) → σ(−α) = −σ(α) as x → 0.
        let x = C64::new(1e-7, 0.0);
        let val = lat.phi_kernel(0, x, alpha, 0).unwrap() * x;
        let want = -lat.sigma(alpha).unwrap();
        assert!((val - want).norm() < 1e-6 * (1.0 + want.norm()));
    }

    #[test]
    fn phi_kernel_derivative_matches_finite_difference() {
        let lat = square();
        let alpha = C64::new(0.29, 0.13);
        let x = C64::new(0.41, 0.23);
        let h = 1e-5;
        for k in 1..=3usize {
            let fd = (lat.phi_kernel(0, x + C64::new(h, 0.0), alpha, k - 1).unwrap()
                - lat.phi_kernel(0, x - C64::new(h, 0.0), alpha, k - 1).unwrap())
                / (2.0 * h);
            let direct = lat.phi_kernel(0, x, alpha, k).unwrap();
            assert!(
                (fd - direct).norm() < 1e-6 * (1.0 + direct.norm()),
                "k={k} fd={fd} direct={direct}"
            );
        }
    }

    #[test]
    fn wp_inverse_roundtrip() {
        let lat = square();
        let t0 = C64::new(0.37, 0.11);
        let w = lat.wp(t0).unwrap();
        let t = lat.wp_inverse(w, SignHint::Plus).unwrap();
        assert!((lat.wp(t).unwrap() - w).norm() < 1e-10 * (1.0 + w.norm()));
        // preimage matches t0 up to lattice translation and parity
        let d1 = lat.dist_to_lattice(t - t0);
        let d2 = lat.dist_to_lattice(t + t0);
        assert!(d1.min(d2) < 1e-9);
    }

    #[test]
    fn wp_inverse_at_branch_point() {
        let lat = square();
        let t = lat.wp_inverse(lat.e(1), SignHint::Plus).unwrap();
        assert!(lat.dist_to_lattice(t - lat.omega1()).min(lat.dist_to_lattice(t + lat.omega1())) < 1e-9);
    }

    #[test]
    fn wp_inverse_generic_forward_check() {
        let lat = square();
        let w = C64::new(5.0, 2.0);
        for hint in [SignHint::Plus, SignHint::Minus] {
            let t = lat.wp_inverse(w, hint).unwrap();
            assert!((lat.wp(t).unwrap() - w).norm() < 1e-10 * (1.0 + w.norm()));
            let dp = lat.wp_prime(t).unwrap();
            let s = if dp.re.abs() >= 1e-12 * (1.0 + dp.norm()) {
                dp.re.signum()
            } else {
                dp.im.signum()
            };
            assert_eq!(s, hint.as_f64());
        }
    }

    #[test]
    fn pole_rejection() {
        let lat = square();
        assert!(matches!(
            lat.wp(C64::new(0.0, 0.0)),
            Err(Error::PoleAtLatticePoint { .. })
        ));
        assert!(matches!(
            lat.zeta(lat.omega1() * 2.0),
            Err(Error::PoleAtLatticePoint { .. })
        ));
        // sigma is entire
        assert!(lat.sigma(C64::new(0.0, 0.0)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn degenerate_lattice_rejected() {
        assert!(matches!(
            PeriodLattice::new(C64::new(1.0, 0.0), C64::new(2.0, 0.0), 1e-12),
            Err(Error::DegenerateLattice { .. })
        ));
        assert!(matches!(
            PeriodLattice::new(C64::new(1.0, 0.0), C64::new(0.0, 1.0), 1e-3),
            Err(Error::InvalidPrecision(_))
        ));
    }
}
