//! Complex dense linear algebra wrappers around nalgebra: SVD-based
//! nullspaces with singular-value reporting, and square solves.

use crate::C64;
use nalgebra::{Complex, DMatrix, DVector};

pub type CMat = DMatrix<Complex<f64>>;
pub type CVec = DVector<Complex<f64>>;

pub fn to_cmat(rows: usize, cols: usize, data: &[C64]) -> CMat {
    CMat::from_fn(rows, cols, |i, j| {
        let z = data[i * cols + j];
        Complex::new(z.re, z.im)
    })
}

fn from_col(v: &CVec) -> Vec<C64> {
    v.iter().map(|z| C64::new(z.re, z.im)).collect()
}

/// Nullspace report for a rectangular system.
pub struct Nullspace {
    /// Right-singular vectors for singular values below the cut, one Vec per
    /// nullspace direction, each of unit norm.
    pub basis: Vec<Vec<C64>>,
    /// All singular values, descending.
    pub singular_values: Vec<f64>,
    /// The threshold actually used (rel_tol * largest singular value).
    pub cut: f64,
}

/// Numerical nullspace of an m×n matrix (row-major data) at relative
/// singular-value tolerance `rel_tol`. Wide systems are padded with zero rows
/// so the thin SVD still exposes every right-singular direction.
pub fn nullspace(rows: usize, cols: usize, data: &[C64], rel_tol: f64) -> Nullspace {
    let eff_rows = rows.max(cols);
    let mut padded;
    let data = if rows < cols {
        padded = data.to_vec();
        padded.resize(eff_rows * cols, C64::new(0.0, 0.0));
        &padded[..]
    } else {
        data
    };
    let a = to_cmat(eff_rows, cols, data);
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let mut sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    let cut = rel_tol * smax.max(1e-300);
    let mut basis = Vec::new();
    for (k, &s) in sv.iter().enumerate() {
        if s <= cut {
            basis.push(from_col(&vt.row(k).transpose().map(|z| z.conj())));
        }
    }
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Nullspace {
        basis,
        singular_values: sv,
        cut,
    }
}

/// Solve the square system A x = b (row-major A). Returns None when the LU
/// factorization is singular to working precision.
pub fn solve(n: usize, a: &[C64], b: &[C64]) -> Option<Vec<C64>> {
    let m = to_cmat(n, n, a);
    let rhs = CVec::from_fn(n, |i, _| Complex::new(b[i].re, b[i].im));
    m.lu().solve(&rhs).map(|x| from_col(&x))
}

/// Least-squares solve of an overdetermined system via SVD.
pub fn lstsq(rows: usize, cols: usize, a: &[C64], b: &[C64]) -> Option<Vec<C64>> {
    let m = to_cmat(rows, cols, a);
    let rhs = CVec::from_fn(rows, |i, _| Complex::new(b[i].re, b[i].im));
    let svd = m.svd(true, true);
    svd.solve(&rhs, 1e-13).ok().map(|x| from_col(&x))
}
