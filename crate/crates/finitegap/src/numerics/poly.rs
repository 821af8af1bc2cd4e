//! Dense complex polynomials with ascending-degree coefficient storage.
//! Public interfaces of the crate report coefficients in descending degree;
//! conversion happens at the boundary.

use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    /// coeffs[k] multiplies z^k; invariant: last entry nonzero unless empty.
    pub coeffs: Vec<C64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn constant(c: C64) -> Self {
        let mut p = Poly { coeffs: vec![c] };
        p.trim(0.0);
        p
    }

    pub fn from_ascending(coeffs: Vec<C64>) -> Self {
        let mut p = Poly { coeffs };
        p.trim(0.0);
        p
    }

    pub fn from_descending(coeffs: &[C64]) -> Self {
        Poly::from_ascending(coeffs.iter().rev().cloned().collect())
    }

    /// Monomial (z - root).
    pub fn linear(root: C64) -> Self {
        Poly {
            coeffs: vec![-root, C64::new(1.0, 0.0)],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn descending(&self) -> Vec<C64> {
        self.coeffs.iter().rev().cloned().collect()
    }

    /// Drop trailing coefficients with magnitude <= tol (absolute).
    pub fn trim(&mut self, tol: f64) {
        while let Some(c) = self.coeffs.last() {
            if c.norm() <= tol {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    /// Trim relative to the largest coefficient.
    pub fn trim_relative(&mut self, rel: f64) {
        let scale = self.max_coeff_norm();
        if scale > 0.0 {
            self.trim(rel * scale);
        }
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::from_ascending(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, &c)| c * ((k + 1) as f64))
                .collect(),
        )
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly::from_ascending(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[k] += c;
        }
        for (k, &c) in other.coeffs.iter().enumerate() {
            out[k] += c;
        }
        Poly::from_ascending(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_ascending(out)
    }

    /// Synthetic division by (z - root); returns the quotient and discards the
    /// remainder (callers deflate only at verified roots).
    pub fn deflate(&self, root: C64) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let n = self.coeffs.len() - 1;
        let mut q = vec![C64::new(0.0, 0.0); n];
        let mut carry = self.coeffs[n];
        for k in (0..n).rev() {
            q[k] = carry;
            carry = self.coeffs[k] + root * carry;
        }
        Poly::from_ascending(q)
    }

    /// Normalize to a monic polynomial (leading coefficient 1).
    pub fn monic(&self) -> Poly {
        match self.coeffs.last() {
            Some(&lead) if lead.norm() > 0.0 => self.scale(lead.inv()),
            _ => self.clone(),
        }
    }

    /// Interpolating polynomial through (nodes[k], values[k]) by Newton
    /// divided differences. Nodes must be pairwise distinct.
    pub fn interpolate(nodes: &[C64], values: &[C64]) -> Poly {
        assert_eq!(nodes.len(), values.len());
        let n = nodes.len();
        if n == 0 {
            return Poly::zero();
        }
        let mut dd = values.to_vec();
        for level in 1..n {
            for k in (level..n).rev() {
                dd[k] = (dd[k] - dd[k - 1]) / (nodes[k] - nodes[k - level]);
            }
        }
        // Horner-style rebuild of the Newton form.
        let mut p = Poly::constant(dd[n - 1]);
        for k in (0..n - 1).rev() {
            p = p.mul(&Poly::linear(nodes[k])).add(&Poly::constant(dd[k]));
        }
        p
    }
}

/// Truncated power-series product to `order` coefficients (0..order-1 powers).
pub fn mul_trunc(a: &[C64], b: &[C64], order: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); order];
    for (i, &x) in a.iter().enumerate().take(order) {
        for (j, &y) in b.iter().enumerate().take(order - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Truncated reciprocal of a series with nonzero constant term.
pub fn inv_trunc(a: &[C64], order: usize) -> Vec<C64> {
    assert!(!a.is_empty() && a[0].norm() > 0.0, "series not invertible");
    let mut out = vec![C64::new(0.0, 0.0); order];
    out[0] = a[0].inv();
    for k in 1..order {
        let mut s = C64::new(0.0, 0.0);
        for j in 1..=k.min(a.len() - 1) {
            s += a[j] * out[k - j];
        }
        out[k] = -s / a[0];
    }
    out
}

/// Truncated series quotient a/b.
pub fn div_trunc(a: &[C64], b: &[C64], order: usize) -> Vec<C64> {
    mul_trunc(a, &inv_trunc(b, order), order)
}
