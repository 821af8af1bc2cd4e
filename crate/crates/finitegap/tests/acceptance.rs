//! Acceptance suite: every verification criterion runs at its pinned
//! tolerance and prints one pass/fail line. Reference lattice ω₁ = 1, ω₃ = i
//! unless a criterion says otherwise.

mod common;

use common::LatticeOracle;
use finitegap::elliptic::{EllipticKind, PeriodLattice};
use finitegap::golden::{self, FiniteGapGolden};
use finitegap::model::{frobenius_residual, LocalExpansion, PotentialSpec, SingularPair};
use finitegap::monodromy::{
    hk_extract, hyperelliptic_exponent, periodicity_signs, reduction_check, Eigenfunction,
    XiSource,
};
use finitegap::painleve::{
    hk_to_p6, p6_b1, p6_residual, tau_lattice, P6Family, P6SolutionSpec,
};
use finitegap::spectral::{a_expansion, apply_a_on_eigenfunction, kdv_recursion_residual};
use finitegap::xi::{build_xi_family, build_xi_fixed};
use finitegap::{model, C64};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn lat() -> PeriodLattice {
    PeriodLattice::new(c(1.0, 0.0), c(0.0, 1.0), 1e-12).unwrap()
}

fn eps() -> C64 {
    c(0.0, 0.01)
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "[{}] criterion {criterion}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn rand_cell_point(lat: &PeriodLattice, rng: &mut StdRng, clearance: f64) -> C64 {
    loop {
        let s: f64 = rng.gen_range(-0.5..0.5);
        let t: f64 = rng.gen_range(-0.5..0.5);
        let z = lat.omega1() * (2.0 * s) + lat.omega3() * (2.0 * t);
        if lat.dist_to_lattice(z) > clearance {
            return z;
        }
    }
}

/// Criterion 1: elliptic kernel identities at 1e-12 over 10³ random points
/// and lattice-sum oracle agreement at 1e-10 over 10² points.
#[test]
fn criterion_1_elliptic_kernel() {
    let lat = lat();
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst_ident = 0.0_f64;
    for _ in 0..1000 {
        let z = rand_cell_point(&lat, &mut rng, 0.05);
        let p = lat.wp(z).unwrap();
        let pp = lat.wp_prime(z).unwrap();
        let ident = (pp * pp
            - (p - lat.e(1)) * (p - lat.e(2)) * (p - lat.e(3)) * 4.0)
            .norm()
            / (1.0 + pp.norm_sqr());
        worst_ident = worst_ident.max(ident);
        for i in 1..=3usize {
            let lhs = lat.sigma(z + lat.omega(i) * 2.0).unwrap();
            let rhs = -lat.sigma(z).unwrap() * (lat.eta(i) * 2.0 * (z + lat.omega(i))).exp();
            worst_ident = worst_ident.max((lhs - rhs).norm() / (1.0 + lhs.norm()));
        }
    }
    let legendre = (lat.eta(1) * lat.omega3() - lat.eta(3) * lat.omega1()
        - c(0.0, std::f64::consts::PI / 2.0))
    .norm();
    let esum = (lat.e(1) + lat.e(2) + lat.e(3)).norm() / lat.g2().norm();
    let etasum = (lat.eta(1) + lat.eta(2) + lat.eta(3)).norm();
    worst_ident = worst_ident.max(legendre).max(esum).max(etasum);

    let oracle = LatticeOracle::new(c(1.0, 0.0), c(0.0, 1.0), 40);
    let mut worst_oracle = 0.0_f64;
    for _ in 0..100 {
        let z = rand_cell_point(&lat, &mut rng, 0.08);
        let rel = |a: C64, b: C64| (a - b).norm() / (1.0 + b.norm());
        worst_oracle = worst_oracle
            .max(rel(lat.wp(z).unwrap(), oracle.wp(z)))
            .max(rel(lat.wp_prime(z).unwrap(), oracle.wp_prime(z)))
            .max(rel(lat.zeta(z).unwrap(), oracle.zeta(z)))
            .max(rel(lat.sigma(z).unwrap(), oracle.sigma(z)));
    }
    report(
        "1",
        worst_ident < 1e-12 && worst_oracle < 1e-10,
        &format!("identities {worst_ident:.2e} (< 1e-12), oracle {worst_oracle:.2e} (< 1e-10)"),
    );
}

fn poly_match(got: &finitegap::numerics::Poly, want: &finitegap::numerics::Poly, tol: f64) -> f64 {
    let scale = want.max_coeff_norm().max(1.0);
    if got.coeffs.len() != want.coeffs.len() {
        return f64::INFINITY;
    }
    let worst = got
        .coeffs
        .iter()
        .zip(&want.coeffs)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let _ = tol;
    worst / scale
}

/// Criterion 2: §5.1 golden family, Ξ and Q coefficient match at 1e-9.
#[test]
fn criterion_2_s51_family() {
    let lat = lat();
    let mut worst = 0.0_f64;
    for i in 1..=3usize {
        let g = golden::s51(&lat, i).unwrap();
        let fam = build_xi_family(&g.spec).unwrap();
        assert_eq!(fam.g, 1, "genus for i={i}");
        worst = worst
            .max(poly_match(&fam.c0, &g.c0_expected, 1e-9))
            .max(poly_match(&fam.d_polys[0], &g.d_expected[0], 1e-9))
            .max(poly_match(&fam.q_poly, g.q_expected.as_ref().unwrap(), 1e-9));
    }
    report("2", worst < 1e-9, &format!("coefficient mismatch {worst:.2e} (< 1e-9)"));
}

/// Criterion 3: §5.2 both branches (1e-8) and §5.3 (1e-7) spectral
/// polynomials with the right genera.
#[test]
fn criterion_3_s52_s53_families() {
    let lat = lat();
    let mut worst52 = 0.0_f64;
    for g in [
        golden::s52a(&lat, golden::pick_root(&golden::s52_quartic_roots(&lat))).unwrap(),
        golden::s52b(&lat, 1.0).unwrap(),
        golden::s52b(&lat, -1.0).unwrap(),
    ] {
        let fam = build_xi_family(&g.spec).unwrap();
        assert_eq!(fam.g, g.genus, "{}", g.name);
        worst52 = worst52.max(poly_match(&fam.q_poly, g.q_expected.as_ref().unwrap(), 1e-8));
        worst52 = worst52.max(poly_match(&fam.c0, &g.c0_expected, 1e-8));
    }
    let g53 = golden::s53(&lat, golden::pick_root(&golden::s53_roots(&lat))).unwrap();
    let fam = build_xi_family(&g53.spec).unwrap();
    assert_eq!(fam.g, 2, "5.3 genus");
    let worst53 = poly_match(&fam.q_poly, g53.q_expected.as_ref().unwrap(), 1e-7)
        .max(poly_match(&fam.c0, &g53.c0_expected, 1e-7))
        .max(poly_match(&fam.b_polys[0][0], &g53.b_expected[0][0], 1e-7))
        .max(poly_match(&fam.b_polys[0][1], &g53.b_expected[0][1], 1e-7))
        .max(poly_match(&fam.d_polys[0], &g53.d_expected[0], 1e-7));
    report(
        "3",
        worst52 < 1e-8 && worst53 < 1e-7,
        &format!("5.2 mismatch {worst52:.2e} (< 1e-8), 5.3 mismatch {worst53:.2e} (< 1e-7)"),
    );
}

fn hk_grid(fam_radius: f64, n: usize) -> Vec<C64> {
    (0..n)
        .map(|k| {
            let t = (k as f64 + 0.5) / n as f64;
            c(fam_radius * (2.0 * t - 1.0), 0.8 + 0.5 * t)
        })
        .collect()
}

fn goldens_with_hk(lat: &PeriodLattice) -> Vec<FiniteGapGolden> {
    vec![
        golden::s51(lat, 1).unwrap(),
        golden::s51(lat, 2).unwrap(),
        golden::s51(lat, 3).unwrap(),
        golden::s52a(lat, golden::pick_root(&golden::s52_quartic_roots(lat))).unwrap(),
        golden::s52b(lat, 1.0).unwrap(),
        golden::s53(lat, golden::pick_root(&golden::s53_roots(lat))).unwrap(),
    ]
}

/// Criterion 4: numerically extracted (℘(α), κ) match the closed forms at
/// 1e-6 relative on 20-point grids.
#[test]
fn criterion_4_hk_extraction() {
    let lat = lat();
    let mut worst = 0.0_f64;
    for g in goldens_with_hk(&lat) {
        let fam = build_xi_family(&g.spec).unwrap();
        let hk_form = g.hk.as_ref().unwrap();
        for e in hk_grid(5.0, 20) {
            let src = XiSource::Family(&fam, e);
            let hk = hk_extract(&src, eps()).unwrap();
            let wp_alpha = hk.wp_alpha(&lat).unwrap();
            let want = hk_form.wp_alpha(e);
            worst = worst.max((wp_alpha - want).norm() / (1.0 + want.norm()));
            let want_k2 = hk_form.kappa_sq(e);
            worst = worst.max((hk.kappa * hk.kappa - want_k2).norm() / (1.0 + want_k2.norm()));
        }
    }
    report("4", worst < 1e-6, &format!("worst HK mismatch {worst:.2e} (< 1e-6)"));
}

/// Criterion 5: |HK factor − (−1)^{q_k}·hyperelliptic factor| < 1e-6·|factor|
/// for k ∈ {1,3} on the same grids, all golden families.
#[test]
fn criterion_5_route_equality() {
    let lat = lat();
    let mut worst = 0.0_f64;
    for g in goldens_with_hk(&lat) {
        let fam = build_xi_family(&g.spec).unwrap();
        let (s1, s3) = periodicity_signs(&fam, g.e0, eps()).unwrap();
        for e in hk_grid(4.0, 10) {
            let src = XiSource::Family(&fam, e);
            let lam = Eigenfunction::new(src, eps()).unwrap();
            for (k, sk) in [(1usize, s1), (3usize, s3)] {
                let direct = lam.period_factor(k).unwrap();
                let expo = hyperelliptic_exponent(&fam, e, g.e0, k).unwrap();
                let via = expo.exp() * sk;
                worst = worst.max((direct - via).norm() / direct.norm());
            }
        }
    }
    report("5", worst < 1e-6, &format!("worst route mismatch {worst:.2e} (< 1e-6)"));
}

/// Criterion 6: commuting operator (AΛ/Λ)² + Q(E) at 1e-6·(1+|Q|) on the
/// grids, and KdV recursion residual below 1e-7·scale at 100 probe points.
#[test]
fn criterion_6_commuting_operator_and_kdv() {
    let lat = lat();
    let mut worst_a = 0.0_f64;
    let mut worst_kdv = 0.0_f64;
    let mut rng = StdRng::seed_from_u64(6);
    for g in goldens_with_hk(&lat) {
        let fam = build_xi_family(&g.spec).unwrap();
        for e in hk_grid(3.5, 6) {
            let src = XiSource::Family(&fam, e);
            let lam = Eigenfunction::new(src, eps()).unwrap();
            let x = lat.omega1() * 0.31 + lat.omega3() * 0.22;
            let (l, lp) = lam.eval(x).unwrap();
            let a_action = apply_a_on_eigenfunction(&fam, e, x, l, lp).unwrap();
            let q = fam.q_eval(e);
            let resid = ((a_action / l) * (a_action / l) + q).norm() / (1.0 + q.norm());
            worst_a = worst_a.max(resid);
        }
        let sd = a_expansion(&fam);
        let deltas: Vec<C64> = g.spec.pairs.iter().map(|p| p.delta).collect();
        let mut probes = 0;
        while probes < 100 {
            let x = rand_cell_point(&lat, &mut rng, 0.05);
            if deltas
                .iter()
                .any(|&d| lat.dist_to_lattice(x - d).min(lat.dist_to_lattice(x + d)) < 0.05)
            {
                continue;
            }
            probes += 1;
            let v = g.spec.potential_eval(x).unwrap();
            let scale = (1.0 + v.norm())
                * sd.a_reprs
                    .iter()
                    .map(|a| {
                        a.constant.norm()
                            + a.b.iter().flatten().map(|b| b.norm()).sum::<f64>()
                            + a.d.iter().map(|d| d.norm()).sum::<f64>()
                    })
                    .fold(1.0, f64::max);
            for j in 0..=sd.g {
                let r = kdv_recursion_residual(&sd, &g.spec, j, x).unwrap();
                worst_kdv = worst_kdv.max(r.norm() / scale);
            }
        }
    }
    report(
        "6",
        worst_a < 1e-6 && worst_kdv < 1e-7,
        &format!("A-action {worst_a:.2e} (< 1e-6), KdV {worst_kdv:.2e} (< 1e-7)"),
    );
}

/// Criterion 7: reduction identities at 1e-6 for §5.1 and §5.2 (both kinds),
/// and the Prop 4.11 asymptotic ratios within 1% at |E| = 1e4.
#[test]
fn criterion_7_reduction_and_asymptotics() {
    let lat = lat();
    let mut worst = 0.0_f64;
    for g in [
        golden::s51(&lat, 1).unwrap(),
        golden::s52a(&lat, golden::pick_root(&golden::s52_quartic_roots(&lat))).unwrap(),
        golden::s52b(&lat, 1.0).unwrap(),
    ] {
        let fam = build_xi_family(&g.spec).unwrap();
        let grid = hk_grid(4.0, 10);
        let (reports, _) = reduction_check(&fam, &grid, false, eps()).unwrap();
        for r in reports {
            worst = worst
                .max(r.first_kind_residual.norm())
                .max(r.second_kind_residual.norm());
        }
    }

    // Asymptotics on the §5.1 family: N₀ = 4M + Σ l_i(l_i+1) = 4.
    let g = golden::s51(&lat, 1).unwrap();
    let fam = build_xi_family(&g.spec).unwrap();
    let e_big = c(9000.0, 4359.0); // |E| ≈ 1e4 along a ray off the real axis
    let src = XiSource::Family(&fam, e_big);
    let hk = hk_extract(&src, eps()).unwrap();
    let n0 = 4.0;
    let wp_alpha = hk.wp_alpha(&lat).unwrap();
    let ratio1 = (wp_alpha * n0 * n0 / (e_big * -4.0) - 1.0).norm();
    let ratio2 = (hk.kappa / (-e_big).sqrt() / (1.0 - 2.0 / n0) - 1.0).norm();
    report(
        "7",
        worst < 1e-6 && ratio1 < 0.01 && ratio2 < 0.01,
        &format!(
            "reduction residuals {worst:.2e} (< 1e-6), asymptotic offsets {ratio1:.2e}, {ratio2:.2e} (< 1e-2)"
        ),
    );
}

/// Criterion 8: Painlevé VI residual < 1e-5 for all six families at 10
/// random τ with Im τ ∈ [0.8, 2]; Hitchin → Riccati limits converge at
/// (at least) first order in C.
#[test]
fn criterion_8_painleve() {
    let mut rng = StdRng::seed_from_u64(8);
    let mut worst = 0.0_f64;
    let families = [
        P6Family::Hitchin,
        P6Family::L0One,
        P6Family::Riccati0,
        P6Family::RiccatiI(1),
        P6Family::RiccatiI(2),
        P6Family::RiccatiI(3),
    ];
    for family in families {
        let spec = P6SolutionSpec::new(family, c(0.3, 0.0), c(0.4, 0.1)).unwrap();
        for _ in 0..10 {
            let tau = c(rng.gen_range(-0.4..0.4), rng.gen_range(0.8..2.0));
            let r = p6_residual(&spec, tau, 4e-3).unwrap();
            worst = worst.max(r);
        }
    }

    // Degeneration limits at C = 1e-3, 1e-4.
    let (d1, d3) = (c(0.7, 0.1), c(0.33, -0.2));
    let tau = c(0.21, 1.05);
    let tl = tau_lattice(tau).unwrap();
    let mut order_ok = true;
    let mut detail = String::new();
    let targets: [(P6Family, (C64, C64)); 4] = [
        (P6Family::Riccati0, (c(0.0, 0.0), c(0.0, 0.0))),
        (P6Family::RiccatiI(1), (c(0.0, 0.0), c(-1.0, 0.0))),
        (P6Family::RiccatiI(2), (c(-1.0, 0.0), c(1.0, 0.0))),
        (P6Family::RiccatiI(3), (c(1.0, 0.0), c(0.0, 0.0))),
    ];
    for (fam, shift) in targets {
        let want = p6_b1(&P6SolutionSpec::new(fam, d1, d3).unwrap(), &tl).unwrap();
        let mut errs = [0.0f64; 2];
        for (k, cs) in [1e-3, 1e-4].into_iter().enumerate() {
            let h = P6SolutionSpec::new(P6Family::Hitchin, shift.0 + d1 * cs, shift.1 + d3 * cs)
                .unwrap();
            errs[k] = (p6_b1(&h, &tl).unwrap() - want).norm();
        }
        let ratio = errs[0] / errs[1];
        detail.push_str(&format!("{fam:?}: {:.1e}->{:.1e}; ", errs[0], errs[1]));
        if !(4.0..1e4).contains(&ratio) || errs[1] > 1e-3 {
            order_ok = false;
        }
    }
    report(
        "8",
        worst < 1e-5 && order_ok,
        &format!("worst residual {worst:.2e} (< 1e-5); degenerations {detail}"),
    );
}

/// Criterion 9: the Frobenius residual classifier agrees with a brute-force
/// log-ansatz series solver on 100 random local expansions, gaps n ∈ 1..=4.
#[test]
fn criterion_9_apparency_oracle_equivalence() {
    let mut rng = StdRng::seed_from_u64(9);
    let mut agree = 0usize;
    let mut total = 0usize;
    for _ in 0..100 {
        let n = rng.gen_range(1..=4u32);
        let alpha1 = c(rng.gen_range(-3..3) as f64, 0.0);
        let ord = n as usize + 1;
        let mut p_series: Vec<C64> = (0..ord)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let mut q_series: Vec<C64> = (0..ord)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        // force the indicial polynomial to have roots alpha1, alpha1 + n
        let a2 = alpha1 + c(n as f64, 0.0);
        p_series[0] = c(1.0, 0.0) - alpha1 - a2;
        q_series[0] = alpha1 * a2;
        // half the samples get an exactly-apparent configuration by tuning
        // the top q-coefficient so the residual vanishes
        let make_apparent = rng.gen_bool(0.5);
        let le = LocalExpansion {
            p_series: p_series.clone(),
            q_series: q_series.clone(),
            alpha1,
            n,
        };
        if make_apparent {
            let r = frobenius_residual(&le).unwrap();
            // residual is linear in q_n with unit coefficient via c₀ = 1
            q_series[n as usize] -= r;
        }
        let le = LocalExpansion {
            p_series: p_series.clone(),
            q_series: q_series.clone(),
            alpha1,
            n,
        };
        let residual = frobenius_residual(&le).unwrap();
        let impl_apparent = residual.norm() < 1e-9;

        // independent oracle: solve the ODE with the ansatz
        // f = Σ c_j x^{α₁+j} + L·log(x)·Σ d_j x^{α₂+j} and report L = d₀.
        let oracle_log_coeff = common::log_ansatz_coefficient(&p_series, &q_series, alpha1, n);
        let oracle_apparent = oracle_log_coeff.norm() < 1e-9;
        total += 1;
        if impl_apparent == oracle_apparent {
            agree += 1;
        }
    }
    report(
        "9",
        agree == total,
        &format!("classification agreement {agree}/{total}"),
    );
}

/// Criterion 10: the two-dimensional example returns even_dim = 2; golden
/// finite-gap families return even_dim = 1 at generic E.
#[test]
fn criterion_10_dimension_detection() {
    let lat = lat();
    // the l₀ = 1, M = 2, r = 1 example with b = ∓√(g₂/12)
    let b1 = -(lat.g2() / 12.0).sqrt();
    let b2 = -b1;
    let s_for = |b: C64, other: C64| {
        (b * b * 12.0 - lat.g2()) / 8.0 + lat.weierstrass_cubic(b) * 0.5 / (b - other)
    };
    let d1 = lat.wp_inverse(b1, finitegap::elliptic::SignHint::Plus).unwrap();
    let d2 = lat.wp_inverse(b2, finitegap::elliptic::SignHint::Plus).unwrap();
    let spec = PotentialSpec::new(
        lat.clone(),
        [1, 0, 0, 0],
        vec![
            SingularPair { delta: d1, r: 1, s: s_for(b1, b2) },
            SingularPair { delta: d2, r: 1, s: s_for(b2, b1) },
        ],
    )
    .unwrap();
    let xi = build_xi_fixed(&spec, c(0.0, 0.0)).unwrap();
    let twodim_ok = xi.even_dim == 2;

    let mut generic_ok = true;
    for g in goldens_with_hk(&lat) {
        let fixed = build_xi_fixed(&g.spec, c(0.739, 1.114)).unwrap();
        if fixed.even_dim != 1 {
            generic_ok = false;
        }
    }
    report(
        "10",
        twodim_ok && generic_ok,
        &format!("two-dim example even_dim ok = {twodim_ok}, generic families one-dim = {generic_ok}"),
    );
}

/// Isomonodromy consistency (spec invariant): along a Hitchin solution, the
/// extracted monodromy data matches the constants (C₁, C₃) at every τ.
#[test]
fn isomonodromy_consistency_along_hitchin() {
    let (c1, c3) = (c(0.3, 0.0), c(0.4, 0.1));
    let spec = P6SolutionSpec::new(P6Family::Hitchin, c1, c3).unwrap();
    for tau in [c(0.1, 1.0), c(-0.2, 1.4)] {
        let tl = tau_lattice(tau).unwrap();
        let alpha = tl.omega1() * c3 - tl.omega3() * c1;
        let kappa = tl.zeta(-alpha).unwrap() - tl.eta(3) * c1 + tl.eta(1) * c3;
        let (b1, mu1) = hk_to_p6(&tl, alpha, kappa, [0, 0, 0, 0]).unwrap();
        // matches the closed-form evaluation
        let b1_direct = p6_b1(&spec, &tl).unwrap();
        assert!((b1 - b1_direct).norm() < 1e-9 * (1.0 + b1.norm()));
        // feed through the M = 1, r = 1 machinery and re-extract
        let pair = model::p6_pair_from_mu(&tl, [0, 0, 0, 0], b1, mu1).unwrap();
        let e_val = model::p6_eigenvalue(&tl, [0, 0, 0, 0], b1, mu1).unwrap();
        let pspec = PotentialSpec::new(tl.clone(), [0, 0, 0, 0], vec![pair]).unwrap();
        let xi = build_xi_fixed(&pspec, e_val).unwrap();
        let src = XiSource::Fixed(&xi);
        let hk = hk_extract(&src, c(0.0, 0.004)).unwrap();
        let wp_alpha_out = hk.wp_alpha(&tl).unwrap();
        let wp_alpha_in = tl.wp(alpha).unwrap();
        assert!(
            (wp_alpha_out - wp_alpha_in).norm() < 1e-6 * (1.0 + wp_alpha_in.norm()),
            "tau={tau}: wp(alpha) {wp_alpha_out} vs {wp_alpha_in}"
        );
        // the monodromy exponents match ±(C₁, C₃) mod 2
        let close_mod2 = |a: C64, b: C64| {
            let d = a - b;
            (d.re / 2.0 - (d.re / 2.0).round()).abs() < 1e-6 && d.im.abs() < 1e-6
        };
        let plus = close_mod2(hk.m1, c1) && close_mod2(hk.m3, c3);
        let minus = close_mod2(hk.m1, -c1) && close_mod2(hk.m3, -c3);
        assert!(plus || minus, "tau={tau}: m=({}, {}) vs C=({c1}, {c3})", hk.m1, hk.m3);
    }
}
