//! The even doubly-periodic solution Ξ of the third-order product equation
//!
//! ```text
//! Ξ‴ − 4(v−E)Ξ′ − 2v′Ξ = 0
//! ```
//!
//! constructed at fixed E for general (r, s) specs, and as a polynomial
//! family in E for the finite-gap specs (all r = 2, s = 0), together with the
//! spectral constant Q.
//!
//! The construction substitutes z = ℘(x) and (℘′)² = 4z³−g₂z−g₃, turning the
//! equation into a rational identity in z whose numerator coefficients give a
//! linear system, affine in E, for the ansatz coefficients. The fixed-E route
//! takes a numerical nullspace; the family route recovers the polynomial
//! nullvector from cofactor determinants sampled in E and interpolated.

use crate::elliptic::PeriodLattice;
use crate::error::{Error, Result};
use crate::model::PotentialSpec;
use crate::numerics::poly::{inv_trunc, mul_trunc, Poly};
use crate::numerics::rational::Rational;
use crate::numerics::{linalg, roots};
use crate::{par, C64};

/// Apparency tolerance: |residual| < 1e-8·(1+|E|).
fn apparency_tol(e_val: C64) -> f64 {
    1e-8 * (1.0 + e_val.norm())
}

/// Label of one unknown coefficient in the expansion of Ξ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    /// The constant c₀.
    C0,
    /// b^{(i)}_j multiplying ℘(x+ω_i)^{l_i−j}.
    B(usize, usize),
    /// d^{(i′)}_j multiplying (℘(x)−b_{i′})^{−(r_{i′}−j)}.
    D(usize, usize),
}

/// The Ξ ansatz basis and the pencil A(E) = A₀ + E·A₁ of the linear system.
struct XiSystem {
    slots: Vec<Slot>,
    rows: usize,
    a0: Vec<C64>,
    a1: Vec<C64>,
}

pub(crate) fn wp_shift_rational(lat: &PeriodLattice, i: usize) -> Rational {
    // ℘(x+ω_i) = e_i + (e_i−e_j)(e_i−e_k)/(z−e_i) for i = 1..3; ℘(x) = z.
    if i == 0 {
        return Rational::from_poly(Poly::from_ascending(vec![
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ]));
    }
    let (j, k) = match i {
        1 => (2, 3),
        2 => (1, 3),
        _ => (1, 2),
    };
    let ei = lat.e(i);
    let a = (ei - lat.e(j)) * (ei - lat.e(k));
    Rational::constant(ei).add(&Rational::new(Poly::constant(a), vec![(ei, 1)]))
}

fn potential_rational(spec: &PotentialSpec) -> Result<Rational> {
    let lat = &spec.lat;
    let mut v = Rational::zero();
    for i in 0..=3usize {
        let li = spec.l[i] as f64;
        if spec.l[i] > 0 {
            v = v.add(&wp_shift_rational(lat, i).scale(C64::new(li * (li + 1.0), 0.0)));
        }
    }
    for pair in &spec.pairs {
        let b = lat.wp(pair.delta)?;
        let wp2 = b * b * 6.0 - lat.g2() * 0.5;
        let cubic = lat.weierstrass_cubic(b);
        let half_r = pair.r as f64 / 2.0;
        let w = half_r * (half_r + 1.0);
        // ℘(x−δ)+℘(x+δ) = 2b + ℘″(δ)/(z−b) + ℘′(δ)²/(z−b)²
        let pairsum = Rational::constant(b * 2.0)
            .add(&Rational::new(Poly::constant(wp2), vec![(b, 1)]))
            .add(&Rational::new(Poly::constant(cubic), vec![(b, 2)]));
        v = v.add(&pairsum.scale(C64::new(w, 0.0)));
        if pair.s.norm() > 0.0 {
            v = v.add(&Rational::new(Poly::constant(pair.s), vec![(b, 1)]));
        }
    }
    let mut v = v;
    v.normalize();
    Ok(v)
}

impl XiSystem {
    fn build(spec: &PotentialSpec) -> Result<XiSystem> {
        let lat = &spec.lat;
        let mut slots = vec![Slot::C0];
        let mut basis = vec![Rational::constant(C64::new(1.0, 0.0))];
        for i in 0..=3usize {
            if spec.l[i] > 0 {
                let base = wp_shift_rational(lat, i);
                for j in 0..spec.l[i] as usize {
                    let pow = spec.l[i] as usize - j;
                    let mut f = Rational::constant(C64::new(1.0, 0.0));
                    for _ in 0..pow {
                        f = f.mul(&base);
                    }
                    f.normalize();
                    slots.push(Slot::B(i, j));
                    basis.push(f);
                }
            }
        }
        for (ip, pair) in spec.pairs.iter().enumerate() {
            let b = lat.wp(pair.delta)?;
            for j in 0..pair.r as usize {
                let pow = pair.r as usize - j;
                slots.push(Slot::D(ip, j));
                basis.push(Rational::new(
                    Poly::constant(C64::new(1.0, 0.0)),
                    vec![(b, pow)],
                ));
            }
        }

        let v = potential_rational(spec)?;
        let v_z = v.derivative();
        let w_poly = Rational::from_poly(Poly::from_ascending(vec![
            -lat.g3(),
            -lat.g2(),
            C64::new(0.0, 0.0),
            C64::new(4.0, 0.0),
        ]));
        let w1 = Rational::from_poly(Poly::from_ascending(vec![
            -lat.g2(),
            C64::new(0.0, 0.0),
            C64::new(12.0, 0.0),
        ]));
        let w2 = Rational::from_poly(Poly::from_ascending(vec![
            C64::new(0.0, 0.0),
            C64::new(24.0, 0.0),
        ]));

        // R_m(z) = W φ‴ + (3/2) W′ φ″ + (W″/2 − 4v) φ′ − 2 v_z φ  +  E·(4 φ′).
        let mut parts0 = Vec::new();
        let mut parts1 = Vec::new();
        for f in &basis {
            let mut f1 = f.derivative();
            f1.normalize();
            let mut f2 = f1.derivative();
            f2.normalize();
            let mut f3 = f2.derivative();
            f3.normalize();
            let mut r0 = w_poly.mul(&f3);
            r0 = r0.add(&w1.mul(&f2).scale(C64::new(1.5, 0.0)));
            r0 = r0.add(&w2.scale(C64::new(0.5, 0.0)).sub(&v.scale(C64::new(4.0, 0.0))).mul(&f1));
            r0 = r0.sub(&v_z.mul(f).scale(C64::new(2.0, 0.0)));
            r0.normalize();
            let mut r1 = f1.scale(C64::new(4.0, 0.0));
            r1.normalize();
            parts0.push(r0);
            parts1.push(r1);
        }

        let all: Vec<&Rational> = parts0.iter().chain(parts1.iter()).collect();
        let cover = Rational::union_cover(&all);
        let p0: Vec<Poly> = parts0.iter().map(|r| r.clear_with_cover(&cover)).collect();
        let p1: Vec<Poly> = parts1.iter().map(|r| r.clear_with_cover(&cover)).collect();
        let rows = p0
            .iter()
            .chain(p1.iter())
            .map(|p| p.coeffs.len())
            .max()
            .unwrap_or(1);
        let cols = basis.len();
        let mut a0 = vec![C64::new(0.0, 0.0); rows * cols];
        let mut a1 = vec![C64::new(0.0, 0.0); rows * cols];
        for m in 0..cols {
            for (k, &c) in p0[m].coeffs.iter().enumerate() {
                a0[k * cols + m] = c;
            }
            for (k, &c) in p1[m].coeffs.iter().enumerate() {
                a1[k * cols + m] = c;
            }
        }
        Ok(XiSystem {
            slots,
            rows,
            a0,
            a1,
        })
    }

    fn cols(&self) -> usize {
        self.slots.len()
    }

    fn matrix_at(&self, e_val: C64) -> Vec<C64> {
        self.a0
            .iter()
            .zip(&self.a1)
            .map(|(&m0, &m1)| m0 + m1 * e_val)
            .collect()
    }
}

/// Ξ at a fixed eigenvalue E: the nullspace coefficients in the ansatz
/// basis, the constant Q, and the observed nullspace dimension.
#[derive(Debug, Clone)]
pub struct XiFixed {
    pub spec: PotentialSpec,
    pub e_val: C64,
    pub c0: C64,
    /// b_coeffs[i][j] multiplies ℘(x+ω_i)^{l_i−j}.
    pub b_coeffs: [Vec<C64>; 4],
    /// d_coeffs[i′][j] multiplies (℘(x)−b_{i′})^{−(r_{i′}−j)}.
    pub d_coeffs: Vec<Vec<C64>>,
    pub q: C64,
    pub even_dim: usize,
}

/// Singular-value threshold counting the nullspace (relative to ‖A‖).
const NULLSPACE_REL_TOL: f64 = 1e-9;

/// Construct Ξ at fixed E. Every singular pair must be apparent at this E.
pub fn build_xi_fixed(spec: &PotentialSpec, e_val: C64) -> Result<XiFixed> {
    for j in 0..spec.pairs.len() {
        let res = spec.apparency_residual(j, e_val)?;
        if res.norm() > apparency_tol(e_val) {
            return Err(Error::NotApparent {
                pair: j,
                residual: res.norm(),
            });
        }
    }
    let sys = XiSystem::build(spec)?;
    let a = sys.matrix_at(e_val);
    let ns = linalg::nullspace(sys.rows, sys.cols(), &a, NULLSPACE_REL_TOL);
    let even_dim = ns.basis.len();
    if even_dim == 0 {
        return Err(Error::EmptyNullspace);
    }
    // Deterministic scale: largest-magnitude coefficient set to exactly 1.
    let v = ns.basis.last().unwrap().clone();
    let imax = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let v: Vec<C64> = v.iter().map(|&c| c / v[imax]).collect();

    let mut fixed = XiFixed {
        spec: spec.clone(),
        e_val,
        c0: C64::new(0.0, 0.0),
        b_coeffs: [vec![], vec![], vec![], vec![]],
        d_coeffs: vec![vec![]; spec.pairs.len()],
        q: C64::new(0.0, 0.0),
        even_dim,
    };
    for i in 0..4 {
        fixed.b_coeffs[i] = vec![C64::new(0.0, 0.0); spec.l[i] as usize];
    }
    for (ip, pair) in spec.pairs.iter().enumerate() {
        fixed.d_coeffs[ip] = vec![C64::new(0.0, 0.0); pair.r as usize];
    }
    for (slot, &val) in sys.slots.iter().zip(&v) {
        match *slot {
            Slot::C0 => fixed.c0 = val,
            Slot::B(i, j) => fixed.b_coeffs[i][j] = val,
            Slot::D(ip, j) => fixed.d_coeffs[ip][j] = val,
        }
    }
    fixed.q = fixed.q_from_const()?;
    Ok(fixed)
}

impl XiFixed {
    /// Ξ(x).
    pub fn eval(&self, x: C64) -> Result<C64> {
        Ok(self.x_jet(x, 0)?[0])
    }

    /// Taylor jet of Ξ at x to the given order.
    pub fn x_jet(&self, x: C64, order: usize) -> Result<Vec<C64>> {
        xi_jet_from_coeffs(
            &self.spec,
            x,
            order,
            self.c0,
            &self.b_coeffs,
            &self.d_coeffs,
        )
    }

    /// Q from its defining expression at a probe point.
    fn q_from_const(&self) -> Result<C64> {
        let probe = probe_point(&self.spec);
        self.q_at(probe)
    }

    /// Q evaluated from Ξ and v at one point (constant in x; exposed for the
    /// constancy checks).
    pub fn q_at(&self, x: C64) -> Result<C64> {
        let jet = self.x_jet(x, 2)?;
        let v = self.spec.potential_eval(x)?;
        let xi = jet[0];
        let xi1 = jet[1];
        let xi2 = jet[2] * 2.0;
        Ok(xi * xi * (self.e_val - v) + xi * xi2 * 0.5 - xi1 * xi1 * 0.25)
    }

    /// Residual of the third-order product equation at x, normalized by the
    /// coefficient scale.
    pub fn ode_residual(&self, x: C64) -> Result<C64> {
        let jet = self.x_jet(x, 3)?;
        let vjet = self.spec.potential_jet(x, 1)?;
        let xi1 = jet[1];
        let xi3 = jet[3] * 6.0;
        Ok(xi3 - (vjet[0] - self.e_val) * xi1 * 4.0 - vjet[1] * jet[0] * 2.0)
    }

    /// Ξ(0): finite exactly when l₀ = 0.
    pub fn eval_at_zero(&self) -> Result<C64> {
        if self.spec.l[0] > 0 {
            return Err(Error::PoleAtSingularity);
        }
        let lat = &self.spec.lat;
        let mut acc = self.c0;
        for i in 1..4usize {
            let li = self.spec.l[i] as usize;
            for (j, &coeff) in self.b_coeffs[i].iter().enumerate() {
                acc += coeff * lat.e(i).powu((li - j) as u32);
            }
        }
        Ok(acc)
    }

    /// Ξ as a rational function of z = ℘(x).
    pub fn rational(&self) -> Result<Rational> {
        xi_rational(&self.spec, self.c0, &self.b_coeffs, &self.d_coeffs)
    }
}

pub(crate) fn xi_rational(
    spec: &PotentialSpec,
    c0: C64,
    b_coeffs: &[Vec<C64>; 4],
    d_coeffs: &[Vec<C64>],
) -> Result<Rational> {
    let lat = &spec.lat;
    let mut acc = Rational::constant(c0);
    for i in 0..4usize {
        let li = spec.l[i] as usize;
        if li > 0 {
            let base = wp_shift_rational(lat, i);
            let mut pows: Vec<Rational> = Vec::with_capacity(li);
            let mut cur = Rational::constant(C64::new(1.0, 0.0));
            for _ in 0..li {
                cur = cur.mul(&base);
                cur.normalize();
                pows.push(cur.clone());
            }
            for (j, &coeff) in b_coeffs[i].iter().enumerate() {
                acc = acc.add(&pows[li - j - 1].scale(coeff));
            }
        }
    }
    for (ip, pair) in spec.pairs.iter().enumerate() {
        let b = lat.wp(pair.delta)?;
        let r = pair.r as usize;
        for (j, &coeff) in d_coeffs[ip].iter().enumerate() {
            acc = acc.add(&Rational::new(Poly::constant(coeff), vec![(b, r - j)]));
        }
    }
    acc.normalize();
    Ok(acc)
}

fn probe_point(spec: &PotentialSpec) -> C64 {
    let lat = &spec.lat;
    let mut t = 0.2643;
    loop {
        let x = lat.omega1() * t + lat.omega3() * (t * 0.7318);
        let clear = spec
            .pairs
            .iter()
            .all(|p| lat.dist_to_lattice(x - p.delta).min(lat.dist_to_lattice(x + p.delta)) > 0.05)
            && (0..=3).all(|i| lat.dist_to_lattice(x + lat.omega(i)) > 0.05);
        if clear {
            return x;
        }
        t += 0.0917;
    }
}

fn xi_jet_from_coeffs(
    spec: &PotentialSpec,
    x: C64,
    order: usize,
    c0: C64,
    b_coeffs: &[Vec<C64>; 4],
    d_coeffs: &[Vec<C64>],
) -> Result<Vec<C64>> {
    let lat = &spec.lat;
    let ord = order + 1;
    let mut acc = vec![C64::new(0.0, 0.0); ord];
    acc[0] = c0;
    for i in 0..4usize {
        if spec.l[i] > 0 {
            let jet = lat.wp_jet(x + lat.omega(i), order)?;
            // powers l_i − j, building downward products
            let mut pow_jet = vec![C64::new(0.0, 0.0); ord];
            pow_jet[0] = C64::new(1.0, 0.0);
            let li = spec.l[i] as usize;
            let mut pows = Vec::with_capacity(li);
            for _ in 0..li {
                pow_jet = mul_trunc(&pow_jet, &jet, ord);
                pows.push(pow_jet.clone());
            }
            for (j, coeff) in b_coeffs[i].iter().enumerate() {
                let p = &pows[li - j - 1];
                for k in 0..ord {
                    acc[k] += p[k] * coeff;
                }
            }
        }
    }
    if !spec.pairs.is_empty() {
        let zjet = lat.wp_jet(x, order)?;
        for (ip, pair) in spec.pairs.iter().enumerate() {
            let b = lat.wp(pair.delta)?;
            let mut den = zjet.clone();
            den[0] -= b;
            if den[0].norm() < 1e-12 {
                return Err(Error::PoleAtSingularity);
            }
            let inv = inv_trunc(&den, ord);
            let r = pair.r as usize;
            let mut inv_pow = vec![C64::new(0.0, 0.0); ord];
            inv_pow[0] = C64::new(1.0, 0.0);
            let mut inv_pows = Vec::with_capacity(r);
            for _ in 0..r {
                inv_pow = mul_trunc(&inv_pow, &inv, ord);
                inv_pows.push(inv_pow.clone());
            }
            for (j, coeff) in d_coeffs[ip].iter().enumerate() {
                let p = &inv_pows[r - j - 1];
                for k in 0..ord {
                    acc[k] += p[k] * coeff;
                }
            }
        }
    }
    Ok(acc)
}

/// The polynomial-in-E family of Ξ for a finite-gap spec (all r = 2, s = 0)
/// whose deltas satisfy the stationarity system.
#[derive(Debug, Clone)]
pub struct XiFamily {
    pub spec: PotentialSpec,
    /// Genus: degree of the monic constant coefficient c₀(E).
    pub g: usize,
    /// Constant coefficient in the paired form
    /// Ξ = c₀(E) + Σ b^{(i)}_j(E)℘(x+ω_i)^{l_i−j} + Σ d^{(i′)}(E)(℘(x+δ)+℘(x−δ)).
    pub c0: Poly,
    pub b_polys: [Vec<Poly>; 4],
    pub d_polys: Vec<Poly>,
    /// Monic spectral polynomial of degree 2g+1.
    pub q_poly: Poly,
    /// a(E) = Σ_i a^{(i)}_0(E) + 2 Σ_{i′} d^{(i′)}(E) (degree ≤ g−1).
    pub a_poly: Poly,
    /// c(E): constant term in the ℘-derivative basis (monic, degree g).
    pub c_poly: Poly,
}

/// Construct the Ξ family. The deltas must satisfy the stationarity residual
/// test; all pairs must have r = 2, s = 0.
pub fn build_xi_family(spec: &PotentialSpec) -> Result<XiFamily> {
    for pair in &spec.pairs {
        if pair.r != 2 || pair.s.norm() > 0.0 {
            return Err(Error::InvalidSpec(
                "family construction requires all pairs r = 2, s = 0".into(),
            ));
        }
    }
    let deltas: Vec<C64> = spec.pairs.iter().map(|p| p.delta).collect();
    if !deltas.is_empty() {
        let grad = crate::deltas::phi_gradient(&spec.lat, spec.l, &deltas)?;
        let scale = grad
            .iter()
            .map(|g| g.norm())
            .fold(1.0, f64::max)
            .max(spec.lat.g2().norm());
        let worst = grad.iter().map(|g| g.norm()).fold(0.0, f64::max);
        if worst > 1e-7 * scale {
            return Err(Error::DeltasNotApparent(worst));
        }
    }

    let sys = XiSystem::build(spec)?;
    let cols = sys.cols();

    // Pivot rows at a probe energy: Gaussian elimination with partial
    // pivoting identifies cols−1 independent rows.
    let probe_e = C64::new(0.7391, 0.4117) * (1.0 + spec.lat.g2().norm().sqrt());
    let sel = select_rows(&sys.matrix_at(probe_e), sys.rows, cols).ok_or_else(|| {
        Error::DegenerateFamily("could not find independent rows at the probe energy".into())
    })?;

    // Cofactor interpolation: each det has degree ≤ cols−1; sample and
    // interpolate, then escalate once to confirm stabilization. Stability is
    // judged by values at probe energies (coefficient-level comparison is
    // noise-edge brittle for trailing coefficients).
    let emax = (1..=3).map(|i| spec.lat.e(i).norm()).fold(1.0, f64::max);
    let radius = 10.0 * emax;
    let mut count = cols + 2;
    let mut polys = cofactor_polys(&sys, &sel, count, radius);
    let probe_es = [
        C64::new(0.313 * radius, 0.11 * radius),
        C64::new(-0.77 * radius, 0.057 * radius),
        C64::new(0.04 * radius, -0.61 * radius),
    ];
    loop {
        count += 4;
        let refined = cofactor_polys(&sys, &sel, count, radius);
        let scale = |ps: &[Poly]| -> f64 {
            ps.iter()
                .flat_map(|p| {
                    probe_es
                        .iter()
                        .map(|&ee| p.eval(ee).norm())
                        .collect::<Vec<_>>()
                })
                .fold(1e-300, f64::max)
        };
        let s = scale(&refined).max(scale(&polys));
        let stable = polys.iter().zip(&refined).all(|(a, b)| {
            probe_es
                .iter()
                .all(|&ee| (a.eval(ee) - b.eval(ee)).norm() < 1e-8 * s)
        });
        polys = refined;
        if stable || count > cols + 14 {
            if !stable {
                return Err(Error::DegenerateFamily(
                    "interpolated coefficients failed to stabilize".into(),
                ));
            }
            break;
        }
    }

    let scale = polys.iter().map(|p| p.max_coeff_norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::DegenerateFamily("cofactor vector vanished".into()));
    }
    for p in polys.iter_mut() {
        *p = p.scale(C64::new(1.0 / scale, 0.0));
        p.trim_relative(1e-10);
    }

    // Common-divisor removal: roots shared by every coefficient polynomial.
    deflate_common_roots(&mut polys, 1e-7);

    // Validation at fresh energies.
    let a_fresh = |e: C64| -> f64 {
        let mat = sys.matrix_at(e);
        let vvec: Vec<C64> = polys.iter().map(|p| p.eval(e)).collect();
        let vnorm = vvec.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let mut worst = 0.0_f64;
        for r in 0..sys.rows {
            let mut acc = C64::new(0.0, 0.0);
            for m in 0..cols {
                acc += mat[r * cols + m] * vvec[m];
            }
            worst = worst.max(acc.norm());
        }
        let mnorm = mat.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        worst / (mnorm * vnorm).max(1e-300)
    };
    for probe in [C64::new(0.311, 0.822), C64::new(-1.73, 0.4)] {
        let r = a_fresh(probe * radius * 0.09);
        if r > 1e-7 {
            return Err(Error::DegenerateFamily(format!(
                "family residual {r:e} at validation energy"
            )));
        }
    }

    // Unpack into labeled polynomials.
    let mut c0_raw = Poly::zero();
    let mut b_polys: [Vec<Poly>; 4] = [vec![], vec![], vec![], vec![]];
    for i in 0..4 {
        b_polys[i] = vec![Poly::zero(); spec.l[i] as usize];
    }
    let mut d0 = vec![Poly::zero(); spec.pairs.len()];
    let mut d1 = vec![Poly::zero(); spec.pairs.len()];
    for (slot, poly) in sys.slots.iter().zip(&polys) {
        match *slot {
            Slot::C0 => c0_raw = poly.clone(),
            Slot::B(i, j) => b_polys[i][j] = poly.clone(),
            Slot::D(ip, 0) => d0[ip] = poly.clone(),
            Slot::D(ip, 1) => d1[ip] = poly.clone(),
            Slot::D(..) => unreachable!("family pairs have r = 2"),
        }
    }

    // Pair form: d^{(i′)}(E) = d₀(E)/℘′(δ)², with the simple-pole coefficient
    // tied to it through ℘″(δ) (the (x−δ)⁻¹ part of Ξ must cancel).
    let lat = &spec.lat;
    let mut d_polys = Vec::with_capacity(spec.pairs.len());
    for (ip, pair) in spec.pairs.iter().enumerate() {
        let b = lat.wp(pair.delta)?;
        let cubic = lat.weierstrass_cubic(b);
        let wp2 = b * b * 6.0 - lat.g2() * 0.5;
        let dp = d0[ip].scale(cubic.inv());
        let residual = d1[ip].sub(&dp.scale(wp2));
        if residual.max_coeff_norm() > 1e-7 * (1.0 + d1[ip].max_coeff_norm()) {
            return Err(Error::DegenerateFamily(format!(
                "pair {ip}: simple-pole coefficient does not cancel"
            )));
        }
        d_polys.push(dp);
    }

    // Fx1 constant: c₀ = c₀_raw − 2 Σ b_{i′} d^{(i′)}(E).
    let mut c0 = c0_raw.clone();
    for (ip, pair) in spec.pairs.iter().enumerate() {
        let b = lat.wp(pair.delta)?;
        c0 = c0.sub(&d_polys[ip].scale(b * 2.0));
    }
    let g = c0.degree();
    // Monic normalization of c₀ rescales the whole family.
    let lead = *c0.coeffs.last().ok_or(Error::EmptyNullspace)?;
    let s = lead.inv();
    c0 = c0.scale(s);
    for bp in b_polys.iter_mut().flatten() {
        *bp = bp.scale(s);
    }
    for dp in d_polys.iter_mut() {
        *dp = dp.scale(s);
    }
    for (i, bps) in b_polys.iter().enumerate() {
        for (j, bp) in bps.iter().enumerate() {
            if !bp.is_zero() && bp.degree() >= g {
                return Err(Error::DegenerateFamily(format!(
                    "deg b^{{({i})}}_{j} = {} exceeds g−1 = {}",
                    bp.degree(),
                    g as i64 - 1
                )));
            }
        }
    }
    for (ip, dp) in d_polys.iter().enumerate() {
        if !dp.is_zero() && dp.degree() >= g {
            return Err(Error::DegenerateFamily(format!(
                "deg d^{{({ip})}} = {} exceeds g−1 = {}",
                dp.degree(),
                g as i64 - 1
            )));
        }
    }

    // a(E) and c(E) through the ℘-derivative basis.
    let conv = WpPowerConversion::new(lat, spec.l.iter().cloned().max().unwrap_or(0) as usize);
    let mut a_poly = Poly::zero();
    let mut c_poly = c0.clone();
    for i in 0..4usize {
        let li = spec.l[i] as usize;
        for (j, bp) in b_polys[i].iter().enumerate() {
            let n = li - j;
            a_poly = a_poly.add(&bp.scale(conv.deriv_coeff(n, 0)));
            c_poly = c_poly.add(&bp.scale(conv.constant(n)));
        }
    }
    for dp in &d_polys {
        a_poly = a_poly.add(&dp.scale(C64::new(2.0, 0.0)));
    }

    let mut fam = XiFamily {
        spec: spec.clone(),
        g,
        c0,
        b_polys,
        d_polys,
        q_poly: Poly::zero(),
        a_poly,
        c_poly,
    };

    // Q(E): interpolate the pointwise constant through 2g+2 energies.
    let qn = 2 * g + 2;
    let nodes: Vec<C64> = (0..qn)
        .map(|k| {
            let th = std::f64::consts::PI * (k as f64 + 0.5) / qn as f64;
            C64::new(th.cos() * radius * 0.31, 0.17 * radius * th.sin())
        })
        .collect();
    let vals: Vec<Result<C64>> = par::map_slice(&nodes, |&e| fam.q_pointwise(e));
    let mut okvals = Vec::with_capacity(qn);
    for v in vals {
        okvals.push(v?);
    }
    let mut q_poly = Poly::interpolate(&nodes, &okvals);
    q_poly.trim_relative(1e-9);
    if q_poly.degree() != 2 * g + 1 {
        return Err(Error::DegenerateFamily(format!(
            "deg Q = {} but expected {}",
            q_poly.degree(),
            2 * g + 1
        )));
    }
    let lead = *q_poly.coeffs.last().unwrap();
    if (lead - C64::new(1.0, 0.0)).norm() > 1e-6 {
        return Err(Error::DegenerateFamily(format!(
            "Q leading coefficient {lead} is not monic"
        )));
    }
    fam.q_poly = q_poly.scale(lead.inv());
    Ok(fam)
}

fn select_rows(mat: &[C64], rows: usize, cols: usize) -> Option<Vec<usize>> {
    let mut work = mat.to_vec();
    let mut row_ids: Vec<usize> = (0..rows).collect();
    let mut selected = Vec::new();
    let mut r0 = 0;
    for col in 0..cols {
        if selected.len() == cols - 1 {
            break;
        }
        // Find pivot in this column at or below r0.
        let (mut best, mut best_v) = (usize::MAX, 0.0);
        for r in r0..rows {
            let v = work[r * cols + col].norm();
            if v > best_v {
                best_v = v;
                best = r;
            }
        }
        if best == usize::MAX || best_v < 1e-12 {
            continue;
        }
        work.swap(r0 * cols + 0, best * cols + 0);
        for c in 1..cols {
            work.swap(r0 * cols + c, best * cols + c);
        }
        row_ids.swap(r0, best);
        selected.push(row_ids[r0]);
        let pivot = work[r0 * cols + col];
        for r in (r0 + 1)..rows {
            let f = work[r * cols + col] / pivot;
            for c in col..cols {
                let sub = work[r0 * cols + c] * f;
                work[r * cols + c] -= sub;
            }
        }
        r0 += 1;
    }
    if selected.len() == cols - 1 {
        Some(selected)
    } else {
        None
    }
}

fn cofactor_polys(sys: &XiSystem, sel: &[usize], count: usize, radius: f64) -> Vec<Poly> {
    let cols = sys.cols();
    let nodes: Vec<C64> = (0..count)
        .map(|k| {
            let t = std::f64::consts::PI * (k as f64 + 0.5) / count as f64;
            C64::new(radius * t.cos(), 0.0)
        })
        .collect();
    let samples: Vec<Vec<C64>> = par::map_slice(&nodes, |&e| {
        let mat = sys.matrix_at(e);
        let mut vals = Vec::with_capacity(cols);
        for skip in 0..cols {
            // det of sel-rows with column `skip` removed
            let mut sub = Vec::with_capacity((cols - 1) * (cols - 1));
            for &r in sel {
                for c in 0..cols {
                    if c != skip {
                        sub.push(mat[r * cols + c]);
                    }
                }
            }
            let m = linalg::to_cmat(cols - 1, cols - 1, &sub);
            let det = m.lu().determinant();
            let sign = if skip % 2 == 0 { 1.0 } else { -1.0 };
            vals.push(C64::new(det.re, det.im) * sign);
        }
        vals
    });
    (0..cols)
        .map(|m| {
            let vals: Vec<C64> = samples.iter().map(|s| s[m]).collect();
            let mut p = Poly::interpolate(&nodes, &vals);
            p.trim_relative(1e-11);
            p
        })
        .collect()
}

fn deflate_common_roots(polys: &mut [Poly], tol: f64) {
    loop {
        // Candidate roots from every nonzero polynomial: a shared root is
        // simple in at least one of them generically, and only the
        // simple-root copies locate it to full precision.
        let mut candidates: Vec<C64> = Vec::new();
        for p in polys.iter() {
            if !p.is_zero() && p.degree() > 0 {
                candidates.extend(roots::roots(p));
            }
        }
        if candidates.is_empty() {
            return;
        }
        let mut deflated = false;
        for r in candidates {
            let shared = polys.iter().all(|p| {
                p.is_zero()
                    || p.degree() == 0 && p.max_coeff_norm() == 0.0
                    || p.eval(r).norm() < tol * p.max_coeff_norm() * (1.0 + r.norm()).powi(p.degree() as i32)
            });
            let nontrivial = polys.iter().any(|p| !p.is_zero() && p.degree() > 0);
            if shared && nontrivial {
                let all_const = polys
                    .iter()
                    .filter(|p| !p.is_zero())
                    .all(|p| p.degree() == 0);
                if all_const {
                    return;
                }
                for p in polys.iter_mut() {
                    if !p.is_zero() && p.degree() > 0 {
                        *p = p.deflate(r);
                    } else if !p.is_zero() {
                        // constant sharing a root means it is noise-level zero
                        *p = Poly::zero();
                    }
                }
                deflated = true;
                break;
            }
        }
        if !deflated {
            return;
        }
    }
}

/// Conversion of ℘-powers into the even-derivative basis:
/// ℘ⁿ = Σ_{j=0}^{n−1} t_{n,j} (d/dx)^{2j}℘ + t_{n,const}.
pub struct WpPowerConversion {
    /// table[n][j] for j < n, table[n][n] = constant part (n = 1..=nmax).
    table: Vec<Vec<C64>>,
}

impl WpPowerConversion {
    pub fn new(lat: &PeriodLattice, nmax: usize) -> Self {
        let nmax = nmax.max(1);
        // Laurent of ℘ in u = x²: ℘ = u⁻¹ (1 + Σ_{k≥2} c_k u^k) — coefficients
        // of u^{m−1} for ℘, tracked to order nmax.
        let ord = nmax + 1;
        let mut base = vec![C64::new(0.0, 0.0); ord + 1];
        base[0] = C64::new(1.0, 0.0);
        for (j, &ck) in lat.laurent_coeffs().iter().enumerate() {
            let k = j + 2;
            if k <= ord {
                base[k] = ck;
            }
        }
        // ℘ⁿ = u⁻ⁿ hₙ(u), hₙ = baseⁿ.
        let mut powers = Vec::with_capacity(nmax);
        let mut h = base.clone();
        powers.push(h.clone());
        for _ in 1..nmax {
            h = mul_trunc(&h, &base, ord + 1);
            powers.push(h.clone());
        }
        // (d/dx)^{2j}℘ in u-Laurent: u^{-(j+1)}·(2j+1)! + Σ_k c_k D(k,j) u^{k−1−j}
        // where D(k,j) = (2k−2)(2k−3)···(2k−2j−1).
        let deriv_coeff = |k: usize, j: usize| -> f64 {
            let mut acc = 1.0;
            for t in 0..(2 * j as i64) {
                acc *= (2 * k as i64 - 2 - t) as f64;
            }
            acc
        };
        let mut table = Vec::with_capacity(nmax + 1);
        table.push(vec![]);
        for n in 1..=nmax {
            // Unknowns t_0..t_{n−1}, t_const. Match coefficients of
            // u^{−n}, u^{−n+1}, …, u⁰ (n+1 relations), solving triangularly
            // from the deepest pole down.
            let mut t = vec![C64::new(0.0, 0.0); n + 1];
            // residual Laurent coefficients of ℘ⁿ − Σ t_j (d/dx)^{2j}℘,
            // indexed by power u^{−n+m}, m = 0..=n.
            let mut resid: Vec<C64> = (0..=n).map(|m| powers[n - 1][m]).collect();
            for j in (0..n).rev() {
                // (d/dx)^{2j}℘ has leading coefficient (2j+1)! at u^{−(j+1)},
                // i.e. at m = n−1−j.
                let m_lead = n - 1 - j;
                let fact: f64 = (1..=(2 * j + 1)).map(|v| v as f64).product();
                let tj = resid[m_lead] / fact;
                t[j] = tj;
                // Subtract its contributions to the remaining coefficients:
                // at u^{k−1−j} for k ≥ 2, i.e. m = n + k − 2 − j... only m ≤ n.
                resid[m_lead] = C64::new(0.0, 0.0);
                for (idx, &ck) in lat.laurent_coeffs().iter().enumerate() {
                    let k = idx + 2;
                    // u^{k−1−j} sits at residual index m = n + k − 1 − j.
                    let m = n + k - 1 - j;
                    if m <= n {
                        resid[m] -= tj * ck * deriv_coeff(k, j);
                    }
                }
            }
            t[n] = resid[n];
            table.push(t);
        }
        WpPowerConversion { table }
    }

    /// Coefficient of (d/dx)^{2j}℘ in ℘ⁿ.
    pub fn deriv_coeff(&self, n: usize, j: usize) -> C64 {
        self.table[n][j]
    }

    /// Constant part of ℘ⁿ in the derivative basis.
    pub fn constant(&self, n: usize) -> C64 {
        self.table[n][n]
    }
}

impl XiFamily {
    fn fixed_coeffs(&self, e_val: C64) -> (C64, [Vec<C64>; 4], Vec<Vec<C64>>) {
        // Evaluate the family at E in the raw (Fx0) basis used by the jet
        // evaluator: d₀ = d(E)·℘′(δ)², d₁ = d(E)·℘″(δ), constant picks up
        // +2b·d(E).
        let lat = &self.spec.lat;
        let mut c0 = self.c0.eval(e_val);
        let mut b: [Vec<C64>; 4] = [vec![], vec![], vec![], vec![]];
        for i in 0..4 {
            b[i] = self.b_polys[i].iter().map(|p| p.eval(e_val)).collect();
        }
        let mut d = Vec::new();
        for (ip, pair) in self.spec.pairs.iter().enumerate() {
            let bp = lat.wp(pair.delta).expect("delta off lattice");
            let cubic = lat.weierstrass_cubic(bp);
            let wp2 = bp * bp * 6.0 - lat.g2() * 0.5;
            let dv = self.d_polys[ip].eval(e_val);
            c0 += dv * bp * 2.0;
            d.push(vec![dv * cubic, dv * wp2]);
        }
        (c0, b, d)
    }

    /// Ξ(x, E).
    pub fn eval(&self, x: C64, e_val: C64) -> Result<C64> {
        Ok(self.x_jet(x, e_val, 0)?[0])
    }

    /// Taylor jet of Ξ(·, E) at x.
    pub fn x_jet(&self, x: C64, e_val: C64, order: usize) -> Result<Vec<C64>> {
        let (c0, b, d) = self.fixed_coeffs(e_val);
        xi_jet_from_coeffs(&self.spec, x, order, c0, &b, &d)
    }

    /// Ξ(0, E): finite exactly when l₀ = 0 (the pair terms vanish at the
    /// lattice, the shifted ℘-powers are finite).
    pub fn eval_at_zero(&self, e_val: C64) -> Result<C64> {
        if self.spec.l[0] > 0 {
            return Err(Error::PoleAtSingularity);
        }
        let lat = &self.spec.lat;
        let (c0, b, _) = self.fixed_coeffs(e_val);
        let mut acc = c0;
        for i in 1..4usize {
            let li = self.spec.l[i] as usize;
            if li > 0 {
                let e_i = lat.e(i);
                for (j, &coeff) in b[i].iter().enumerate() {
                    acc += coeff * e_i.powu((li - j) as u32);
                }
            }
        }
        Ok(acc)
    }

    /// Q(E) from the interpolated spectral polynomial.
    pub fn q_eval(&self, e_val: C64) -> C64 {
        self.q_poly.eval(e_val)
    }

    /// Q at E from its defining pointwise expression (used to build and to
    /// cross-check the polynomial).
    pub fn q_pointwise(&self, e_val: C64) -> Result<C64> {
        let x = probe_point(&self.spec);
        let jet = self.x_jet(x, e_val, 2)?;
        let v = self.spec.potential_eval(x)?;
        Ok(jet[0] * jet[0] * (e_val - v) + jet[0] * (jet[2] * 2.0) * 0.5 - jet[1] * jet[1] * 0.25)
    }

    /// Residual of the product equation at (x, E).
    pub fn ode_residual(&self, x: C64, e_val: C64) -> Result<C64> {
        let jet = self.x_jet(x, e_val, 3)?;
        let vjet = self.spec.potential_jet(x, 1)?;
        Ok(jet[3] * 6.0 - (vjet[0] - e_val) * jet[1] * 4.0 - vjet[1] * jet[0] * 2.0)
    }

    /// Ξ(·, E) as a rational function of z = ℘(x).
    pub fn rational_at(&self, e_val: C64) -> Result<Rational> {
        let (c0, b, d) = self.fixed_coeffs(e_val);
        xi_rational(&self.spec, c0, &b, &d)
    }

    /// Fixed-E view with the same normalization conventions as
    /// [`build_xi_fixed`] is not imposed; coefficients come scaled by the
    /// family's monic-c₀ convention.
    pub fn at_energy(&self, e_val: C64) -> XiFixed {
        let (c0, b_coeffs, d_coeffs) = self.fixed_coeffs(e_val);
        XiFixed {
            spec: self.spec.clone(),
            e_val,
            c0,
            b_coeffs,
            d_coeffs,
            q: self.q_eval(e_val),
            even_dim: 1,
        }
    }
}
