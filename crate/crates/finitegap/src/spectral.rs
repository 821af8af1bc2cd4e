//! The E-expansion Ξ(x,E) = Σ a_{g−i}(x) Eⁱ, the stationary-hierarchy
//! recursion a‴_j − 4v a′_j − 2v′ a_j + 4a′_{j+1} = 0 that the expansion
//! coefficients satisfy, and the closed-form action of the commuting
//! odd-order operator A on eigenfunctions.

use crate::error::Result;
use crate::model::PotentialSpec;
use crate::numerics::poly::mul_trunc;
use crate::xi::XiFamily;
use crate::C64;

/// One coefficient a_j(x) in the ℘-basis: constant + shifted-℘ powers +
/// symmetric pair terms.
#[derive(Debug, Clone)]
pub struct ACoefficient {
    pub constant: C64,
    /// b[i][jj] multiplies ℘(x+ω_i)^{l_i−jj}.
    pub b: [Vec<C64>; 4],
    /// d[i′] multiplies ℘(x+δ_{i′}) + ℘(x−δ_{i′}).
    pub d: Vec<C64>,
}

/// The full expansion: a_reprs[j] is a_j(x), j = 0..=g, a₀ ≡ 1.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub g: usize,
    pub a_reprs: Vec<ACoefficient>,
}

/// Read the a_j(x) off the family's coefficient polynomials.
pub fn a_expansion(fam: &XiFamily) -> SpectralData {
    let g = fam.g;
    let poly_coeff = |p: &crate::numerics::poly::Poly, k: usize| -> C64 {
        p.coeffs.get(k).cloned().unwrap_or_default()
    };
    let mut a_reprs = Vec::with_capacity(g + 1);
    for j in 0..=g {
        // a_j multiplies E^{g−j}.
        let k = g - j;
        let mut b: [Vec<C64>; 4] = [vec![], vec![], vec![], vec![]];
        for i in 0..4 {
            b[i] = fam.b_polys[i].iter().map(|p| poly_coeff(p, k)).collect();
        }
        a_reprs.push(ACoefficient {
            constant: poly_coeff(&fam.c0, k),
            b,
            d: fam.d_polys.iter().map(|p| poly_coeff(p, k)).collect(),
        });
    }
    SpectralData { g, a_reprs }
}

impl ACoefficient {
    /// Taylor jet of a_j at x.
    pub fn x_jet(&self, spec: &PotentialSpec, x: C64, order: usize) -> Result<Vec<C64>> {
        let lat = &spec.lat;
        let ord = order + 1;
        let mut acc = vec![C64::new(0.0, 0.0); ord];
        acc[0] = self.constant;
        for i in 0..4usize {
            let li = spec.l[i] as usize;
            if li > 0 {
                let jet = lat.wp_jet(x + lat.omega(i), order)?;
                let mut pow = vec![C64::new(0.0, 0.0); ord];
                pow[0] = C64::new(1.0, 0.0);
                let mut pows = Vec::with_capacity(li);
                for _ in 0..li {
                    pow = mul_trunc(&pow, &jet, ord);
                    pows.push(pow.clone());
                }
                for (jj, coeff) in self.b[i].iter().enumerate() {
                    for k in 0..ord {
                        acc[k] += pows[li - jj - 1][k] * coeff;
                    }
                }
            }
        }
        for (ip, pair) in spec.pairs.iter().enumerate() {
            if self.d.get(ip).map(|c| c.norm()).unwrap_or(0.0) > 0.0 {
                let jm = lat.wp_jet(x - pair.delta, order)?;
                let jp = lat.wp_jet(x + pair.delta, order)?;
                for k in 0..ord {
                    acc[k] += (jm[k] + jp[k]) * self.d[ip];
                }
            }
        }
        Ok(acc)
    }
}

impl SpectralData {
    /// Σ a_{g−i}(x) Eⁱ — must reproduce Ξ(x,E).
    pub fn reconstruct(&self, spec: &PotentialSpec, x: C64, e_val: C64) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        let mut epow = C64::new(1.0, 0.0);
        for i in 0..=self.g {
            let a = &self.a_reprs[self.g - i];
            acc += a.x_jet(spec, x, 0)?[0] * epow;
            epow *= e_val;
        }
        Ok(acc)
    }
}

/// Left side of a‴_j − 4v a′_j − 2v′ a_j + 4a′_{j+1} at x (convention
/// a_{g+1} ≡ 0); vanishes identically for a valid family.
pub fn kdv_recursion_residual(
    sd: &SpectralData,
    spec: &PotentialSpec,
    j: usize,
    x: C64,
) -> Result<C64> {
    assert!(j <= sd.g, "index must lie in 0..=g");
    let aj = sd.a_reprs[j].x_jet(spec, x, 3)?;
    let vjet = spec.potential_jet(x, 1)?;
    let mut res = aj[3] * 6.0 - vjet[0] * aj[1] * 4.0 - vjet[1] * aj[0] * 2.0;
    if j + 1 <= sd.g {
        let anext = sd.a_reprs[j + 1].x_jet(spec, x, 1)?;
        res += anext[1] * 4.0;
    }
    Ok(res)
}

/// The action AΛ of the commuting operator on an H-eigenfunction, through
/// the telescoped closed form Ξ(x,E)Λ′ − ½Ξ′(x,E)Λ. The pair (Λ, Λ′) comes
/// from the caller (monodromy module); the defining relation A² + Q(H) = 0
/// turns into (AΛ/Λ)² = −Q(E).
pub fn apply_a_on_eigenfunction(
    fam: &XiFamily,
    e_val: C64,
    x: C64,
    lam: C64,
    lam_prime: C64,
) -> Result<C64> {
    let jet = fam.x_jet(x, e_val, 1)?;
    Ok(jet[0] * lam_prime - jet[1] * lam * 0.5)
}
