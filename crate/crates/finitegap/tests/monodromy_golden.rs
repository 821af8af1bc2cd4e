//! Monodromy pipeline against the closed forms of the worked families:
//! eigenfunction consistency, Hermite–Krichever extraction, the two
//! independent monodromy routes, Bethe roots and the reduction identities.

mod common;

use finitegap::elliptic::PeriodLattice;
use finitegap::golden;
use finitegap::monodromy::{
    bethe_roots, hk_extract, hyperelliptic_exponent, periodicity_signs, reduction_check,
    Eigenfunction, XiSource,
};
use finitegap::xi::build_xi_family;
use finitegap::C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn lat() -> PeriodLattice {
    PeriodLattice::new(c(1.0, 0.0), c(0.0, 1.0), 1e-12).unwrap()
}

fn eps() -> C64 {
    c(0.0, 0.01)
}

/// E-grid avoiding the real axis (where the golden spectra live).
fn grid(n: usize, radius: f64) -> Vec<C64> {
    (0..n)
        .map(|k| {
            let t = (k as f64 + 0.5) / n as f64;
            c(radius * (2.0 * t - 1.0), 0.9 + 0.4 * t)
        })
        .collect()
}

#[test]
fn eigenfunction_solves_schroedinger_51() {
    let lat = lat();
    let g = golden::s51(&lat, 1).unwrap();
    let fam = build_xi_family(&g.spec).unwrap();
    let e_val = c(1.3, 0.8);
    let src = XiSource::Family(&fam, e_val);
    let lam = Eigenfunction::new(src, eps()).unwrap();

    // Λ″/Λ − (v − E) ≈ 0 via the closed-form second logarithmic derivative.
    for t in [0.23, 0.51, 0.74] {
        let x = lat.omega1() * t + lat.omega3() * (0.29 * t + 0.07);
        let jet = src.xi_jet(x, 2).unwrap();
        let (xi, xi1, xi2) = (jet[0], jet[1], jet[2] * 2.0);
        let q = src.q();
        let second_log = xi2 / xi * 0.5 - (xi1 / xi) * (xi1 / xi) * 0.25 - q / (xi * xi);
        let v = g.spec.potential_eval(x).unwrap();
        let want = v - e_val;
        assert!(
            (second_log - want).norm() < 1e-8 * (1.0 + want.norm()),
            "t={t}: {second_log} vs {want}"
        );
    }

    // Wronskian Λ(−x)·dΛ(x)/dx − Λ(x)·d[Λ(−x)]/dx = 2√(−Q), constant in x;
    // d[Λ(−x)]/dx = −Λ′(−x) with Λ′ the pointwise derivative eval returns.
    let sq = src.sqrt_minus_q().unwrap();
    for t in [0.31, 0.57] {
        let x = lat.omega1() * t + lat.omega3() * (0.21 * t + 0.05);
        let (lp, lpd) = lam.eval(x).unwrap();
        let (lm, lmd) = lam.eval(-x).unwrap();
        let w = lm * lpd + lp * lmd;
        assert!(
            (w - sq * 2.0).norm() < 1e-7 * (1.0 + sq.norm()),
            "t={t}: wronskian {w} vs {}",
            sq * 2.0
        );
    }
}

#[test]
fn hk_extraction_matches_51_closed_form() {
    let lat = lat();
    for i in 1..=3usize {
        let g = golden::s51(&lat, i).unwrap();
        let fam = build_xi_family(&g.spec).unwrap();
        let hk_form = g.hk.as_ref().unwrap();
        for e_val in grid(6, 5.0) {
            let src = XiSource::Family(&fam, e_val);
            let hk = hk_extract(&src, eps()).unwrap();
            let wp_alpha = hk.wp_alpha(&lat).unwrap();
            let want = hk_form.wp_alpha(e_val);
            assert!(
                (wp_alpha - want).norm() < 1e-6 * (1.0 + want.norm()),
                "i={i} E={e_val}: wp(alpha) {wp_alpha} vs {want}"
            );
            let want_k2 = hk_form.kappa_sq(e_val);
            let got_k2 = hk.kappa * hk.kappa;
            assert!(
                (got_k2 - want_k2).norm() < 1e-6 * (1.0 + want_k2.norm()),
                "i={i} E={e_val}: kappa² {got_k2} vs {want_k2}"
            );
        }
    }
}

#[test]
fn monodromy_route_equality_51() {
    let lat = lat();
    let g = golden::s51(&lat, 1).unwrap();
    let fam = build_xi_family(&g.spec).unwrap();
    let (s1, s3) = periodicity_signs(&fam, g.e0, eps()).unwrap();
    for e_val in grid(5, 4.0) {
        let src = XiSource::Family(&fam, e_val);
        let lam = Eigenfunction::new(src, eps()).unwrap();
        for (k, sk) in [(1usize, s1), (3usize, s3)] {
            let direct = lam.period_factor(k).unwrap();
            let expo = hyperelliptic_exponent(&fam, e_val, g.e0, k).unwrap();
            let via_integral = expo.exp() * sk;
            assert!(
                (direct - via_integral).norm() < 1e-6 * direct.norm(),
                "k={k} E={e_val}: {direct} vs {via_integral}"
            );
        }
    }
}

#[test]
fn parity_flips_monodromy_data() {
    // Extracting from Λ(−x) negates (m₁, m₃) mod 2 and maps α → −α.
    let lat = lat();
    let g = golden::s51(&lat, 1).unwrap();
    let fam = build_xi_family(&g.spec).unwrap();
    let e_val = c(2.1, 1.2);
    let src = XiSource::Family(&fam, e_val);
    let lam = Eigenfunction::new(src, eps()).unwrap();
    let hk = hk_extract(&src, eps()).unwrap();
    // Λ(−x) has period factors equal to the inverses.
    for (k, idx) in [(1usize, 0usize), (3, 1)] {
        let f = lam.period_factor(k).unwrap();
        let finv = f.inv();
        assert!(
            (f * finv - c(1.0, 0.0)).norm() < 1e-12,
            "sanity"
        );
        // exp(iπ(−m)) = 1/exp(iπm)
        let m = if idx == 0 { hk.m1 } else { hk.m3 };
        let want = (C64::new(0.0, std::f64::consts::PI) * -m).exp();
        assert!(
            (finv - want).norm() < 1e-6 * want.norm(),
            "k={k}: inverse factor {finv} vs {want}"
        );
    }
}

#[test]
fn path_independence_under_node_doubling() {
    // The period integrals converge: doubling quadrature nodes moves the
    // exponent by < 1e-8 relative (the adaptive loop enforces a tighter
    // tolerance internally; this pins the observable).
    let lat = lat();
    let g = golden::s51(&lat, 2).unwrap();
    let fam = build_xi_family(&g.spec).unwrap();
    let e_val = c(-1.7, 1.1);
    let src = XiSource::Family(&fam, e_val);
    let lam = Eigenfunction::new(src, eps()).unwrap();
    let f_a = lam.period_factor(1).unwrap();
    // a second eigenfunction with a different eps offset must give the same factor
    let lam_b = Eigenfunction::new(src, c(0.0, 0.017)).unwrap();
    let f_b = lam_b.period_factor(1).unwrap();
    assert!(
        (f_a - f_b).norm() < 1e-8 * f_a.norm(),
        "{f_a} vs {f_b}"
    );
}

#[test]
fn bethe_roots_51() {
    let lat = lat();
    let g = golden::s51(&lat, 1).unwrap();
    let fam = build_xi_family(&g.spec).unwrap();
    let e_val = c(1.9, 1.3);
    let src = XiSource::Family(&fam, e_val);
    let bethe = bethe_roots(&src, eps()).unwrap();
    // l = 2M + Σl_i = 2 roots
    assert_eq!(bethe.t.len(), 2);
    // zeros of Ξ: Ξ(t_j) = 0
    for &tj in &bethe.t {
        let xi = fam.eval(tj, e_val).unwrap();
        assert!(xi.norm() < 1e-7 * (1.0 + e_val.norm()), "Xi(t_j) = {xi}");
    }
    // α ≡ Σ t_j − Σ l_iω_i mod lattice, against hk_extract
    let hk = hk_extract(&src, eps()).unwrap();
    let alpha = hk.alpha.unwrap();
    let sum: C64 = bethe.t.iter().sum();
    assert!(
        lat.dist_to_lattice(sum - alpha) < 1e-6,
        "sum t_j = {sum}, alpha = {alpha}"
    );
}

#[test]
fn reduction_identities_51() {
    let lat = lat();
    let g = golden::s51(&lat, 1).unwrap();
    let fam = build_xi_family(&g.spec).unwrap();
    let grid = grid(8, 4.0);
    let (reports, fit) = reduction_check(&fam, &grid, true, eps()).unwrap();
    for r in &reports {
        assert!(
            r.first_kind_residual.norm() < 1e-6,
            "E={}: first-kind residual {}",
            r.e,
            r.first_kind_residual
        );
        assert!(
            r.second_kind_residual.norm() < 1e-6,
            "E={}: second-kind residual {}",
            r.e,
            r.second_kind_residual
        );
    }
    // ξ = ℘(α) for §5.1 is a degree-(2,1) rational function of E.
    let fit = fit.unwrap();
    assert_eq!(fit.degrees[0], 2, "P1 degree");
    assert_eq!(fit.degrees[1], 1, "P2 degree");
    assert!(fit.max_residual < 1e-8);
}
