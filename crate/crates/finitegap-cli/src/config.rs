//! Run configuration: JSON schema mirroring the library's domain types, with
//! complex numbers as [re, im] pairs. CLI flags override file values; the
//! FINGAP_PRECISION environment variable overrides both.

use anyhow::{bail, Context, Result};
use finitegap::elliptic::PeriodLattice;
use finitegap::model::{PotentialSpec, SingularPair};
use num_complex::Complex64 as C64;
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: Option<LatticeConfig>,
    pub potential: Option<PotentialConfig>,
    pub precision: Option<f64>,
    pub output: Option<OutputConfig>,
    /// Free-form task block; subcommands read the fields they need.
    pub task: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub omega1: [f64; 2],
    pub omega3: [f64; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub l: [u32; 4],
    #[serde(default)]
    pub pairs: Vec<PairConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairConfig {
    pub delta: [f64; 2],
    pub r: u32,
    #[serde(default)]
    pub s: [f64; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_format")]
    pub format: String,
    pub path: Option<String>,
}

fn default_format() -> String {
    "json".into()
}

impl RunConfig {
    pub fn load(path: Option<&str>) -> Result<Self> {
        match path {
            None => Ok(RunConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {p}"))?;
                serde_json::from_str(&text).with_context(|| format!("parsing config {p}"))
            }
        }
    }

    pub fn precision(&self) -> Result<f64> {
        if let Ok(v) = std::env::var("FINGAP_PRECISION") {
            return v
                .parse::<f64>()
                .context("FINGAP_PRECISION must be a float");
        }
        Ok(self.precision.unwrap_or(1e-12))
    }

    pub fn lattice(&self, omega1: Option<C64>, omega3: Option<C64>) -> Result<PeriodLattice> {
        let (w1, w3) = match (&self.lattice, omega1, omega3) {
            (_, Some(a), Some(b)) => (a, b),
            (Some(lc), _, _) => (
                C64::new(lc.omega1[0], lc.omega1[1]),
                C64::new(lc.omega3[0], lc.omega3[1]),
            ),
            _ => (C64::new(1.0, 0.0), C64::new(0.0, 1.0)),
        };
        Ok(PeriodLattice::new(w1, w3, self.precision()?)?)
    }

    pub fn potential(&self, lat: &PeriodLattice) -> Result<PotentialSpec> {
        let Some(pc) = &self.potential else {
            bail!("config has no potential block");
        };
        let pairs = pc
            .pairs
            .iter()
            .map(|p| SingularPair {
                delta: C64::new(p.delta[0], p.delta[1]),
                r: p.r,
                s: C64::new(p.s[0], p.s[1]),
            })
            .collect();
        Ok(PotentialSpec::new(lat.clone(), pc.l, pairs)?)
    }
}

/// Parse a complex number given as "re,im" or "a+bi"/"a-bi" (also plain "a"
/// and "bi").
pub fn parse_complex(s: &str) -> Result<C64> {
    let t = s.trim();
    if let Some((re, im)) = t.split_once(',') {
        return Ok(C64::new(
            re.trim().parse().context("real part")?,
            im.trim().parse().context("imaginary part")?,
        ));
    }
    if let Some(body) = t.strip_suffix(['i', 'I']) {
        // find the split between real and imaginary parts: the last +/- not
        // part of an exponent
        let chars: Vec<char> = body.chars().collect();
        for k in (1..chars.len()).rev() {
            if (chars[k] == '+' || chars[k] == '-')
                && chars[k - 1] != 'e'
                && chars[k - 1] != 'E'
            {
                let re: f64 = body[..k].parse().context("real part")?;
                let imtxt = &body[k..];
                let im: f64 = if imtxt == "+" {
                    1.0
                } else if imtxt == "-" {
                    -1.0
                } else {
                    imtxt.parse().context("imaginary part")?
                };
                return Ok(C64::new(re, im));
            }
        }
        let im: f64 = if body.is_empty() { 1.0 } else { body.parse().context("imaginary part")? };
        return Ok(C64::new(0.0, im));
    }
    Ok(C64::new(t.parse().context("real number")?, 0.0))
}

/// Parse a semicolon-separated list of complex numbers.
pub fn parse_complex_list(s: &str) -> Result<Vec<C64>> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(parse_complex)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0.4,0.1").unwrap(), C64::new(0.4, 0.1));
        assert_eq!(parse_complex("0.4+0.1i").unwrap(), C64::new(0.4, 0.1));
        assert_eq!(parse_complex("0.4-0.1i").unwrap(), C64::new(0.4, -0.1));
        assert_eq!(parse_complex("-2.5").unwrap(), C64::new(-2.5, 0.0));
        assert_eq!(parse_complex("1.5i").unwrap(), C64::new(0.0, 1.5));
        assert_eq!(parse_complex("1e-3+2e-4i").unwrap(), C64::new(1e-3, 2e-4));
    }
}
