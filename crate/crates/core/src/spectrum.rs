//! Dynamical spectrum summaries: the ℓ-adic part `Z_ℓ ≅ Π Z_p` together with
//! the finite cyclic factor picked up when passing from `σ` to the sequence.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coincidence::spectral_verdict;
use crate::derive::height_one_substitution;
use crate::error::{Error, Result};
use crate::kolakoski::EvenParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// The hull of the two-letter substitution `σ`.
    Sigma,
    /// The hull of `Kol(2m,2n)` itself.
    Kolakoski,
}

impl std::str::FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigma" => Ok(Level::Sigma),
            "kolakoski" => Ok(Level::Kolakoski),
            _ => Err(Error::InvalidParameters(format!("unknown level {s:?}, expected sigma or kolakoski"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub level: Level,
    pub ell: u32,
    /// Distinct primes of `ℓ = m + n`, increasing.
    pub ladic_part: Vec<u64>,
    pub cyclic_factor_order: u32,
    pub pure_point: bool,
}

impl fmt::Display for SpectrumReport {
    /// Writes the group as e.g. `Z_2 × Z_3 × Z/2Z`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.ladic_part.iter().map(|p| format!("Z_{p}")).collect();
        if self.cyclic_factor_order > 1 {
            parts.push(format!("Z/{}Z", self.cyclic_factor_order));
        }
        f.write_str(&parts.join(" × "))
    }
}

/// Distinct prime factors by trial division.
pub fn distinct_primes(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Order of the cyclic factor `F`.
pub fn cyclic_factor_order(params: EvenParams, level: Level) -> u32 {
    let ell = params.ell();
    match level {
        Level::Sigma => {
            if ell % 2 == 1 {
                2
            } else {
                1
            }
        }
        Level::Kolakoski => match ell % 4 {
            1 | 3 => 4,
            2 => 2,
            _ => 1,
        },
    }
}

/// Spectrum summary; `pure_point` comes from the coincidence-matrix verdict
/// on `θ` or `θ̃`.
pub fn spectrum_report(params: EvenParams, level: Level) -> Result<SpectrumReport> {
    let sub = height_one_substitution(params)?.sub;
    let verdict = spectral_verdict(&sub)?;
    Ok(SpectrumReport {
        level,
        ell: params.ell(),
        ladic_part: distinct_primes(params.ell() as u64),
        cyclic_factor_order: cyclic_factor_order(params, level),
        pure_point: verdict.pure_point,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(m: u32, n: u32, level: Level) -> SpectrumReport {
        spectrum_report(EvenParams::new(m, n).unwrap(), level).unwrap()
    }

    #[test]
    fn examples() {
        let r = report(2, 1, Level::Kolakoski);
        assert_eq!((r.ladic_part.clone(), r.cyclic_factor_order, r.pure_point), (vec![3], 4, true));
        assert_eq!(r.to_string(), "Z_3 × Z/4Z");
        assert_eq!(report(4, 2, Level::Kolakoski).to_string(), "Z_2 × Z_3 × Z/2Z");
        assert_eq!(report(5, 3, Level::Kolakoski).to_string(), "Z_2");
        assert_eq!(report(2, 1, Level::Sigma).cyclic_factor_order, 2);
        assert_eq!(report(5, 3, Level::Sigma).cyclic_factor_order, 1);
    }

    #[test]
    fn primes() {
        assert_eq!(distinct_primes(1), Vec::<u64>::new());
        assert_eq!(distinct_primes(12), vec![2, 3]);
        assert_eq!(distinct_primes(97), vec![97]);
        assert_eq!(distinct_primes(30), vec![2, 3, 5]);
    }

    #[test]
    fn level_parses() {
        assert_eq!("sigma".parse::<Level>().unwrap(), Level::Sigma);
        assert!("kol".parse::<Level>().is_err());
    }
}
