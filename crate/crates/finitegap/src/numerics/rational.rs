//! Rational functions of one complex variable with factored denominators.
//! Denominator roots come from a fixed finite set of centers (branch points
//! e_i, pole positions b_j), so root bookkeeping is by value with a small
//! matching tolerance and degrees stay exact.

use super::poly::Poly;
use crate::C64;

const ROOT_MATCH: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Rational {
    pub num: Poly,
    /// Distinct denominator roots with multiplicities.
    pub den: Vec<(C64, usize)>,
}

impl Rational {
    pub fn zero() -> Self {
        Rational {
            num: Poly::zero(),
            den: vec![],
        }
    }

    pub fn from_poly(num: Poly) -> Self {
        Rational { num, den: vec![] }
    }

    pub fn constant(c: C64) -> Self {
        Rational::from_poly(Poly::constant(c))
    }

    /// num / Π (z - roots[k])^mult[k]
    pub fn new(num: Poly, den: Vec<(C64, usize)>) -> Self {
        let mut r = Rational { num, den };
        r.merge_den();
        r
    }

    fn merge_den(&mut self) {
        let mut merged: Vec<(C64, usize)> = Vec::new();
        for &(c, m) in &self.den {
            if m == 0 {
                continue;
            }
            if let Some(e) = merged.iter_mut().find(|(c2, _)| (*c2 - c).norm() < ROOT_MATCH) {
                e.1 += m;
            } else {
                merged.push((c, m));
            }
        }
        self.den = merged;
    }

    pub fn eval(&self, z: C64) -> C64 {
        let mut d = C64::new(1.0, 0.0);
        for &(c, m) in &self.den {
            d *= (z - c).powu(m as u32);
        }
        self.num.eval(z) / d
    }

    pub fn scale(&self, s: C64) -> Rational {
        Rational {
            num: self.num.scale(s),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Rational) -> Rational {
        let mut den = self.den.clone();
        den.extend_from_slice(&other.den);
        Rational::new(self.num.mul(&other.num), den)
    }

    pub fn add(&self, other: &Rational) -> Rational {
        // Common denominator: max multiplicity per root.
        let mut den: Vec<(C64, usize)> = self.den.clone();
        for &(c, m) in &other.den {
            if let Some(e) = den.iter_mut().find(|(c2, _)| (*c2 - c).norm() < ROOT_MATCH) {
                e.1 = e.1.max(m);
            } else {
                den.push((c, m));
            }
        }
        let lift = |r: &Rational| -> Poly {
            let mut p = r.num.clone();
            for &(c, m) in &den {
                let have = r
                    .den
                    .iter()
                    .find(|(c2, _)| (*c2 - c).norm() < ROOT_MATCH)
                    .map(|&(_, m2)| m2)
                    .unwrap_or(0);
                for _ in have..m {
                    p = p.mul(&Poly::linear(c));
                }
            }
            p
        };
        Rational::new(lift(self).add(&lift(other)), den)
    }

    pub fn sub(&self, other: &Rational) -> Rational {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// d/dz. Uses (N/D)' = [N' Π(z-c_i) - N Σ_i m_i Π_{j≠i}(z-c_j)] / (D Π(z-c_i)).
    pub fn derivative(&self) -> Rational {
        if self.den.is_empty() {
            return Rational::from_poly(self.num.derivative());
        }
        let mut all = Poly::constant(C64::new(1.0, 0.0));
        for &(c, _) in &self.den {
            all = all.mul(&Poly::linear(c));
        }
        let mut num = self.num.derivative().mul(&all);
        for (i, &(ci, mi)) in self.den.iter().enumerate() {
            let mut part = Poly::constant(C64::new(-(mi as f64), 0.0));
            for (j, &(cj, _)) in self.den.iter().enumerate() {
                if j != i {
                    part = part.mul(&Poly::linear(cj));
                }
            }
            let _ = ci;
            num = num.add(&self.num.mul(&part));
        }
        let mut den = self.den.clone();
        for e in den.iter_mut() {
            e.1 += 1;
        }
        let mut r = Rational::new(num, den);
        r.normalize();
        r
    }

    /// Cancel numerator zeros against denominator roots (within tolerance
    /// scaled by the numerator size) and trim noise coefficients.
    pub fn normalize(&mut self) {
        let scale = self.num.max_coeff_norm().max(1e-300);
        self.num.trim(1e-14 * scale);
        let mut den_out: Vec<(C64, usize)> = Vec::new();
        for &(c, m) in &self.den {
            let mut left = m;
            while left > 0 {
                let v = self.num.eval(c);
                // Magnitude of the numerator near c at the coefficient scale.
                if v.norm() < 1e-10 * scale * (1.0 + c.norm()).powi(self.num.degree() as i32) {
                    self.num = self.num.deflate(c);
                    left -= 1;
                } else {
                    break;
                }
            }
            if left > 0 {
                den_out.push((c, left));
            }
        }
        self.den = den_out;
    }

    /// Multiply by Π (z - c)^{cover(c)} for a multiplicity cover that
    /// dominates this denominator, returning the resulting polynomial.
    pub fn clear_with_cover(&self, cover: &[(C64, usize)]) -> Poly {
        let mut p = self.num.clone();
        for &(c, m) in cover {
            let have = self
                .den
                .iter()
                .find(|(c2, _)| (*c2 - c).norm() < ROOT_MATCH)
                .map(|&(_, m2)| m2)
                .unwrap_or(0);
            assert!(have <= m, "cover does not dominate denominator");
            for _ in have..m {
                p = p.mul(&Poly::linear(c));
            }
        }
        p
    }

    /// The union cover (max multiplicities) of the denominators of `rs`.
    pub fn union_cover(rs: &[&Rational]) -> Vec<(C64, usize)> {
        let mut cover: Vec<(C64, usize)> = Vec::new();
        for r in rs {
            for &(c, m) in &r.den {
                if let Some(e) = cover.iter_mut().find(|(c2, _)| (*c2 - c).norm() < ROOT_MATCH) {
                    e.1 = e.1.max(m);
                } else {
                    cover.push((c, m));
                }
            }
        }
        cover
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn derivative_of_simple_pole() {
        // d/dz 1/(z-a) = -1/(z-a)^2
        let r = Rational::new(Poly::constant(c(1.0, 0.0)), vec![(c(0.5, 0.2), 1)]);
        let d = r.derivative();
        let z = c(1.3, -0.4);
        let want = -((z - c(0.5, 0.2)).powu(2)).inv();
        assert!((d.eval(z) - want).norm() < 1e-13);
    }

    #[test]
    fn add_cancels_to_polynomial() {
        // z/(z-1) - 1/(z-1) = 1 + ... actually (z-1)/(z-1) = 1
        let a = Rational::new(Poly::from_ascending(vec![c(0.0, 0.0), c(1.0, 0.0)]), vec![(c(1.0, 0.0), 1)]);
        let b = Rational::new(Poly::constant(c(-1.0, 0.0)), vec![(c(1.0, 0.0), 1)]);
        let mut s = a.add(&b);
        s.normalize();
        assert!(s.den.is_empty());
        assert!((s.eval(c(2.0, 1.0)) - c(1.0, 0.0)).norm() < 1e-13);
    }
}
