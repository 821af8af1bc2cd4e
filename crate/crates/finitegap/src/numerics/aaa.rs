//! AAA-style barycentric rational interpolation with greedy support-point
//! selection, used to recover the transformation polynomials of the
//! hyperelliptic-to-elliptic reduction from grid samples.

use super::linalg;
use super::poly::Poly;
use crate::{C64, Error, Result};

pub struct RationalFit {
    pub numerator: Poly,
    /// Monic denominator.
    pub denominator: Poly,
    pub max_residual: f64,
    pub support: Vec<C64>,
}

/// Fit f on the given nodes to relative tolerance `tol`, escalating the
/// degree (support size) up to `max_support`.
pub fn fit(nodes: &[C64], values: &[C64], tol: f64, max_support: usize) -> Result<RationalFit> {
    let n = nodes.len();
    assert_eq!(n, values.len());
    let fscale = values.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);

    let mut support: Vec<usize> = Vec::new();
    let mut weights: Vec<C64> = Vec::new();
    // Current approximation values at all nodes; start from the mean.
    let mean = values.iter().sum::<C64>() / (n as f64);
    let mut approx: Vec<C64> = vec![mean; n];

    for _ in 0..max_support.min(n.saturating_sub(2)) {
        // Greedy pick: largest residual among non-support nodes.
        let (mut best, mut best_r) = (usize::MAX, -1.0);
        for i in 0..n {
            if support.contains(&i) {
                continue;
            }
            let r = (values[i] - approx[i]).norm();
            if r > best_r {
                best_r = r;
                best = i;
            }
        }
        if best_r <= tol * fscale {
            break;
        }
        support.push(best);

        // Loewner matrix over the complement.
        let rest: Vec<usize> = (0..n).filter(|i| !support.contains(i)).collect();
        let m = support.len();
        let mut a = vec![C64::new(0.0, 0.0); rest.len() * m];
        for (r_i, &i) in rest.iter().enumerate() {
            for (c_j, &j) in support.iter().enumerate() {
                a[r_i * m + c_j] = (values[i] - values[j]) / (nodes[i] - nodes[j]);
            }
        }
        let ns = linalg::nullspace(rest.len(), m, &a, 1.0); // smallest right-singular vector
        // rel_tol = 1.0 admits every direction; the basis is ordered by
        // ascending singular value from the bottom, so take the last entry.
        weights = ns
            .basis
            .last()
            .cloned()
            .ok_or_else(|| Error::FitIllConditioned("empty weight nullspace".into()))?;

        // Refresh approximation.
        for i in 0..n {
            if let Some(pos) = support.iter().position(|&s| s == i) {
                let _ = pos;
                approx[i] = values[i];
            } else {
                let (mut num, mut den) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
                for (c_j, &j) in support.iter().enumerate() {
                    let w = weights[c_j] / (nodes[i] - nodes[j]);
                    num += w * values[j];
                    den += w;
                }
                approx[i] = num / den;
            }
        }
        let worst = (0..n)
            .map(|i| (values[i] - approx[i]).norm())
            .fold(0.0, f64::max);
        if worst <= tol * fscale {
            break;
        }
    }

    let worst = (0..n)
        .map(|i| (values[i] - approx[i]).norm())
        .fold(0.0, f64::max);
    if worst > tol * fscale {
        return Err(Error::FitIllConditioned(format!(
            "residual {worst:e} above tolerance with {} support points",
            support.len()
        )));
    }

    // Barycentric -> coefficient form.
    let mut num = Poly::zero();
    let mut den = Poly::zero();
    for (c_j, &j) in support.iter().enumerate() {
        let mut prod = Poly::constant(C64::new(1.0, 0.0));
        for &k in support.iter() {
            if k != j {
                prod = prod.mul(&Poly::linear(nodes[k]));
            }
        }
        num = num.add(&prod.scale(weights[c_j] * values[j]));
        den = den.add(&prod.scale(weights[c_j]));
    }
    num.trim_relative(1e-12);
    den.trim_relative(1e-12);
    let lead = *den.coeffs.last().ok_or_else(|| {
        Error::FitIllConditioned("denominator collapsed to zero".into())
    })?;
    Ok(RationalFit {
        numerator: num.scale(lead.inv()),
        denominator: den.scale(lead.inv()),
        max_residual: worst / fscale,
        support: support.iter().map(|&i| nodes[i]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn recovers_rational_function() {
        // f = (z^2 + 1) / (z - 3)
        let f = |z: C64| (z * z + c(1.0, 0.0)) / (z - c(3.0, 0.0));
        let nodes: Vec<C64> = (0..24)
            .map(|k| c(-2.0 + 0.2 * k as f64, 0.37))
            .collect();
        let vals: Vec<C64> = nodes.iter().map(|&z| f(z)).collect();
        let fit = fit(&nodes, &vals, 1e-10, 10).unwrap();
        assert_eq!(fit.denominator.degree(), 1);
        assert_eq!(fit.numerator.degree(), 2);
        let z = c(0.123, 0.9);
        let got = fit.numerator.eval(z) / fit.denominator.eval(z);
        assert!((got - f(z)).norm() < 1e-9);
    }
}
