//! The potential v(x), its three equivalent equation forms (algebraic in
//! z = ℘(x), elliptic, and gauge-transformed), parameter translation between
//! them, and the Frobenius test for apparent singularities.

use crate::elliptic::PeriodLattice;
use crate::error::{Error, Result};
use crate::numerics::poly::{div_trunc, inv_trunc, mul_trunc};
use crate::C64;

/// One pair of apparent singular points x = ±δ with exponent data r and
/// accessory strength s.
#[derive(Debug, Clone)]
pub struct SingularPair {
    pub delta: C64,
    pub r: u32,
    pub s: C64,
}

/// The potential
/// v(x) = Σ_i l_i(l_i+1)℘(x+ω_i)
///      + Σ_j (r_j/2)(r_j/2+1)(℘(x−δ_j)+℘(x+δ_j)) + s_j/(℘(x)−℘(δ_j)).
#[derive(Debug, Clone)]
pub struct PotentialSpec {
    pub lat: PeriodLattice,
    pub l: [u32; 4],
    pub pairs: Vec<SingularPair>,
}

/// Constants of the algebraic form of the equation in z = ℘(x):
/// f″ + (Σ (1/2−l_i)/(z−e_i) + Σ −r_j/(z−b_j)) f′
///   + [N(N−2l₀−1)z + p + Σ o_j/(z−b_j)] / (4 Π(z−e_i)) f = 0.
#[derive(Debug, Clone)]
pub struct AlgebraicForm {
    pub e: [C64; 3],
    pub b: Vec<C64>,
    pub n: u32,
    pub p: C64,
    pub o: Vec<C64>,
    pub s_tilde: Vec<C64>,
    pub c_g: C64,
}

/// Local data of a second-order equation at a regular singular point:
/// f″ + Σ p_j (x−a)^{j−1} f′ + Σ q_j (x−a)^{j−2} f = 0, with exponents
/// alpha1 and alpha1 + n.
#[derive(Debug, Clone)]
pub struct LocalExpansion {
    pub p_series: Vec<C64>,
    pub q_series: Vec<C64>,
    pub alpha1: C64,
    pub n: u32,
}

impl PotentialSpec {
    pub fn new(lat: PeriodLattice, l: [u32; 4], pairs: Vec<SingularPair>) -> Result<Self> {
        let tol = lat.precision().max(1e-10);
        for (j, pj) in pairs.iter().enumerate() {
            if pj.r == 0 {
                return Err(Error::InvalidSpec(format!("pair {j}: r must be positive")));
            }
            for i in 0..=3 {
                if lat.is_lattice_point(pj.delta - lat.omega(i), tol) {
                    return Err(Error::InvalidSpec(format!(
                        "pair {j}: delta collides with half-period omega_{i}"
                    )));
                }
            }
            for (k, pk) in pairs.iter().enumerate().take(j) {
                if lat.is_lattice_point(pj.delta - pk.delta, tol)
                    || lat.is_lattice_point(pj.delta + pk.delta, tol)
                {
                    return Err(Error::InvalidSpec(format!(
                        "pairs {k},{j}: delta_j ± delta_k on the lattice"
                    )));
                }
            }
        }
        Ok(PotentialSpec { lat, l, pairs })
    }

    /// Treibich–Verdier part plus apparent-singularity pairs at x.
    pub fn potential_eval(&self, x: C64) -> Result<C64> {
        let lat = &self.lat;
        let tol = lat.precision().max(1e-12);
        let mut v = C64::new(0.0, 0.0);
        for i in 0..=3usize {
            let li = self.l[i] as f64;
            if self.l[i] > 0 {
                if lat.is_lattice_point(x + lat.omega(i), tol) {
                    return Err(Error::PoleAtSingularity);
                }
                v += lat.wp(x + lat.omega(i))? * (li * (li + 1.0));
            }
        }
        for pair in &self.pairs {
            if lat.is_lattice_point(x - pair.delta, tol)
                || lat.is_lattice_point(x + pair.delta, tol)
            {
                return Err(Error::PoleAtSingularity);
            }
            let half_r = pair.r as f64 / 2.0;
            v += (lat.wp(x - pair.delta)? + lat.wp(x + pair.delta)?) * (half_r * (half_r + 1.0));
            if pair.s.norm() > 0.0 {
                // At lattice points ℘(x) → ∞ and the s-term vanishes.
                if lat.is_lattice_point(x, tol) {
                    continue;
                }
                v += pair.s / (lat.wp(x)? - lat.wp(pair.delta)?);
            }
        }
        Ok(v)
    }

    /// Taylor jet of v at x (coefficients of h^k for v(x+h)).
    pub fn potential_jet(&self, x: C64, order: usize) -> Result<Vec<C64>> {
        use crate::numerics::poly::inv_trunc;
        let lat = &self.lat;
        let ord = order + 1;
        let mut v = vec![C64::new(0.0, 0.0); ord];
        for i in 0..=3usize {
            let li = self.l[i] as f64;
            if self.l[i] > 0 {
                let jet = lat.wp_jet(x + lat.omega(i), order)?;
                for k in 0..ord {
                    v[k] += jet[k] * (li * (li + 1.0));
                }
            }
        }
        if !self.pairs.is_empty() {
            let zjet = lat.wp_jet(x, order)?;
            for pair in &self.pairs {
                let half_r = pair.r as f64 / 2.0;
                let jm = lat.wp_jet(x - pair.delta, order)?;
                let jp = lat.wp_jet(x + pair.delta, order)?;
                for k in 0..ord {
                    v[k] += (jm[k] + jp[k]) * (half_r * (half_r + 1.0));
                }
                if pair.s.norm() > 0.0 {
                    let mut den = zjet.clone();
                    den[0] -= lat.wp(pair.delta)?;
                    let inv = inv_trunc(&den, ord);
                    for k in 0..ord {
                        v[k] += inv[k] * pair.s;
                    }
                }
            }
        }
        Ok(v)
    }

    /// Constants of the algebraic form for H-eigenvalue E.
    pub fn algebraic_form(&self, e_val: C64) -> Result<AlgebraicForm> {
        let lat = &self.lat;
        let (g2, g3) = (lat.g2(), lat.g3());
        let e = [lat.e(1), lat.e(2), lat.e(3)];
        let b: Vec<C64> = self
            .pairs
            .iter()
            .map(|p| lat.wp(p.delta))
            .collect::<Result<_>>()?;
        let l = self.l.map(|v| v as f64);
        let r: Vec<f64> = self.pairs.iter().map(|p| p.r as f64).collect();
        let n = self.l.iter().sum::<u32>() + self.pairs.iter().map(|p| p.r).sum::<u32>();

        let sum_br: C64 = b.iter().zip(&r).map(|(&bi, &ri)| bi * ri).sum();
        let sum_br2: C64 = b.iter().zip(&r).map(|(&bi, &ri)| bi * ri * ri).sum();
        let sum_r: f64 = r.iter().sum();
        let c_g = -sum_br2 * 0.5 + sum_br * (2.0 * sum_r);

        let mut o = Vec::with_capacity(b.len());
        let mut s_tilde = Vec::with_capacity(b.len());
        for (j, pair) in self.pairs.iter().enumerate() {
            let bj = b[j];
            let cubic = lat.weierstrass_cubic(bj);
            let mut cross = C64::new(0.0, 0.0);
            for (k, _) in self.pairs.iter().enumerate() {
                if k != j {
                    cross += C64::new(r[k], 0.0) / (bj - b[k]);
                }
            }
            let brace_common = (bj * bj * 12.0 - g2) * (r[j] / 8.0) + cubic * 0.5 * cross;
            let tv_part = ((bj - e[1]) * (bj - e[2]) * l[1]
                + (bj - e[0]) * (bj - e[2]) * l[2]
                + (bj - e[0]) * (bj - e[1]) * l[3])
                * 2.0;
            o.push(-pair.s + (brace_common + tv_part) * r[j]);
            s_tilde.push(pair.s - brace_common * r[j]);
        }

        let mut p = e_val + e[0] * l[1] * l[1] + e[1] * l[2] * l[2] + e[2] * l[3] * l[3]
            - (e[2] * (l[1] * l[2]) + e[0] * (l[2] * l[3]) + e[1] * (l[3] * l[1])) * 2.0
            - sum_br2 * 0.5
            + sum_br * (2.0 * sum_r);
        for (j, _) in self.pairs.iter().enumerate() {
            for i in 0..3 {
                p += (e[i] + b[j]) * (2.0 * l[i + 1] * r[j]);
            }
        }
        let _ = g3;
        Ok(AlgebraicForm {
            e,
            b,
            n,
            p,
            o,
            s_tilde,
            c_g,
        })
    }

    /// Taylor data of the gauge form (H_g − E − C_g) f_g = 0 at x = δ_j,
    /// through order n = r_j + 1: the candidate for the Frobenius test.
    pub fn local_expansion(&self, pair_idx: usize, e_val: C64) -> Result<LocalExpansion> {
        let lat = &self.lat;
        let form = self.algebraic_form(e_val)?;
        let pair = &self.pairs[pair_idx];
        let n = pair.r + 1;
        let ord = (n + 1) as usize;
        let delta = pair.delta;

        let zero = C64::new(0.0, 0.0);
        // ℘ jet at δ_j and the shifted jets.
        let wj = lat.wp_jet(delta, ord + 1)?;
        let wp_series: Vec<C64> = wj[..=ord].to_vec();
        let wp_prime_series: Vec<C64> = (0..=ord)
            .map(|k| wj[k + 1] * ((k + 1) as f64))
            .collect();

        // h·p(x) and h²·q(x) as truncated series in h = x − δ_j.
        let mut hp = vec![zero; ord];
        let mut h2q = vec![zero; ord];

        let r_total: f64 = self.pairs.iter().map(|p| p.r as f64).sum();
        let l0 = self.l[0] as f64;

        // E + C_g contributes at h² (q-series convention divides by h²).
        h2q[2] += e_val + form.c_g;
        // −(l₀+R)(l₀+1−R)℘(x)
        let coef = -(l0 + r_total) * (l0 + 1.0 - r_total);
        for k in 0..ord - 2 {
            h2q[k + 2] += wp_series[k] * coef;
        }
        // −Σ l_i(l_i+1)℘(x+ω_i), i = 1..3
        for i in 1..=3usize {
            let li = self.l[i] as f64;
            if self.l[i] > 0 {
                let jet = lat.wp_jet(delta + lat.omega(i), ord)?;
                for k in 0..ord - 2 {
                    h2q[k + 2] -= jet[k] * (li * (li + 1.0));
                }
            }
        }

        for (k, other) in self.pairs.iter().enumerate() {
            let rk = other.r as f64;
            if k == pair_idx {
                // ℘(x) − b_j = h·u(h) with u invertible.
                let u: Vec<C64> = (0..ord).map(|m| wp_series[m + 1]).collect();
                let inv_u = inv_trunc(&u, ord);
                // h·p += −r_j ℘′/u
                let term = mul_trunc(&wp_prime_series, &inv_u, ord);
                for m in 0..ord {
                    hp[m] -= term[m] * rk;
                }
                // h²·q += −s̃_j h / u
                let mut shifted = vec![zero; ord];
                for m in 0..ord - 1 {
                    shifted[m + 1] = inv_u[m];
                }
                for m in 0..ord {
                    h2q[m] -= shifted[m] * form.s_tilde[k];
                }
            } else {
                // ℘(x) − b_k is invertible at δ_j.
                let mut den = wp_series.clone();
                den[0] -= form.b[k];
                let term = div_trunc(&wp_prime_series, &den, ord);
                for m in 0..ord - 1 {
                    hp[m + 1] -= term[m] * rk;
                }
                let inv_den = inv_trunc(&den, ord);
                for m in 0..ord - 2 {
                    h2q[m + 2] -= inv_den[m] * form.s_tilde[k];
                }
            }
        }

        Ok(LocalExpansion {
            p_series: hp,
            q_series: h2q,
            alpha1: zero,
            n,
        })
    }

    /// Frobenius residual at pair `pair_idx` for eigenvalue E; zero iff the
    /// pair is apparent there.
    pub fn apparency_residual(&self, pair_idx: usize, e_val: C64) -> Result<C64> {
        frobenius_residual(&self.local_expansion(pair_idx, e_val)?)
    }
}

/// The obstruction Σ_{j′=0}^{n−1} {(α₁+j′)p_{n−j′} + q_{n−j′}} c_{j′} with
/// the c_j generated by the indicial recursion; the singular point is
/// apparent exactly when this vanishes.
pub fn frobenius_residual(le: &LocalExpansion) -> Result<C64> {
    let n = le.n as usize;
    let p0 = le.p_series.first().cloned().unwrap_or_default();
    let q0 = le.q_series.first().cloned().unwrap_or_default();
    let scale = 1.0 + p0.norm() + q0.norm() + le.alpha1.norm();
    let f = |t: C64| t * t + (p0 - C64::new(1.0, 0.0)) * t + q0;
    if f(le.alpha1).norm() > 1e-8 * scale || f(le.alpha1 + C64::new(n as f64, 0.0)).norm() > 1e-8 * scale {
        // report the observed root gap
        let disc = ((p0 - C64::new(1.0, 0.0)).powu(2) - q0 * 4.0).sqrt();
        return Err(Error::ResonanceMismatch {
            expected: le.n,
            observed: (disc.re, disc.im),
        });
    }
    let pk = |k: usize| le.p_series.get(k).cloned().unwrap_or_default();
    let qk = |k: usize| le.q_series.get(k).cloned().unwrap_or_default();

    let mut c = vec![C64::new(1.0, 0.0)];
    for j in 1..n {
        let mut s = C64::new(0.0, 0.0);
        for (jp, cj) in c.iter().enumerate() {
            let a = le.alpha1 + C64::new(jp as f64, 0.0);
            s += (a * pk(j - jp) + qk(j - jp)) * cj;
        }
        let fj = f(le.alpha1 + C64::new(j as f64, 0.0));
        c.push(-s / fj);
    }
    let mut residual = C64::new(0.0, 0.0);
    for (jp, cj) in c.iter().enumerate() {
        let a = le.alpha1 + C64::new(jp as f64, 0.0);
        residual += (a * pk(n - jp) + qk(n - jp)) * cj;
    }
    Ok(residual)
}

/// The unique accessory value p for which x = ±δ₁ is apparent in the
/// M = 1, r₁ = 1 gauge equation, as an explicit polynomial in (b₁, μ₁).
pub fn p6_apparency_p(lat: &PeriodLattice, l: [u32; 4], b1: C64, mu1: C64) -> Result<C64> {
    for i in 1..=3 {
        if (b1 - lat.e(i)).norm() < lat.precision().max(1e-12) * (1.0 + b1.norm()) {
            return Err(Error::B1AtBranchPoint);
        }
    }
    let cubic = lat.weierstrass_cubic(b1);
    let lf = l.map(|v| v as f64);
    let mut bracket = -mu1 * mu1;
    for i in 1..=3usize {
        bracket += mu1 * (lf[i] + 0.5) / (b1 - lat.e(i));
    }
    let l123 = lf[1] + lf[2] + lf[3];
    Ok(cubic * bracket - b1 * ((l123 - lf[0]) * (l123 + lf[0] + 1.0)))
}

/// Translate (b₁, μ₁) into the s-parameter of the single r = 1 pair so that
/// the gauge form of the resulting spec is the M = 1, r₁ = 1 equation with
/// first-order coefficient μ₁ (inverts the s̃ relation).
pub fn p6_pair_from_mu(lat: &PeriodLattice, l: [u32; 4], b1: C64, mu1: C64) -> Result<SingularPair> {
    let delta = lat.wp_inverse(b1, crate::elliptic::SignHint::Plus)?;
    let cubic = lat.weierstrass_cubic(b1);
    let mut lsum = C64::new(0.0, 0.0);
    for i in 1..=3usize {
        lsum += C64::new(l[i] as f64 / 2.0, 0.0) / (b1 - lat.e(i));
    }
    let s_tilde = (lsum - mu1) * cubic;
    // s = s̃ + r²(12b² − g₂)/8 for a single pair with r = 1.
    let s = s_tilde + (b1 * b1 * 12.0 - lat.g2()) / 8.0;
    Ok(SingularPair { delta, r: 1, s })
}

/// The H-eigenvalue E for the M = 1, r₁ = 1 spec determined by (b₁, μ₁) with
/// the accessory parameter fixed by apparency: E = Ẽ − C_g where
/// p(Ẽ) solves the displayed relation and C_g = 3b₁/2.
pub fn p6_eigenvalue(lat: &PeriodLattice, l: [u32; 4], b1: C64, mu1: C64) -> Result<C64> {
    let p = p6_apparency_p(lat, l, b1, mu1)?;
    let lf = l.map(|v| v as f64);
    let e = [lat.e(1), lat.e(2), lat.e(3)];
    let mut e_tilde = p
        + (e[2] * (lf[1] * lf[2]) + e[0] * (lf[2] * lf[3]) + e[1] * (lf[3] * lf[1])) * 2.0;
    for i in 0..3 {
        e_tilde -= (e[i] * lf[i + 1] + (e[i] + b1) * 2.0) * lf[i + 1];
    }
    Ok(e_tilde - b1 * 1.5)
}
