//! ℓ-adic addresses. A finite Hensel digit string `t_0 … t_r` (least
//! significant first) names the cylinder `K_{t_0…t_r}` of `Z_ℓ`, whose trace
//! on `Z` is the coset `ℓ^{r+1} Z + Σ t_i ℓ^i`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model_set::LatticeCoset;
use crate::substitution::Substitution;
use crate::word::Letter;

/// Largest `v` with `ell^v | t`.
pub fn valuation(t: i64, ell: u64) -> Result<u32> {
    if ell < 2 {
        return Err(Error::InvalidParameters(format!("base {ell} must be at least 2")));
    }
    if t == 0 {
        return Err(Error::Domain("the valuation of 0 is infinite".into()));
    }
    let ell = ell as i128;
    let mut t = t as i128;
    let mut v = 0;
    while t % ell == 0 {
        t /= ell;
        v += 1;
    }
    Ok(v)
}

/// `|t|_ℓ = ℓ^{-v(t)}`, with `|0|_ℓ = 0`.
pub fn metric_abs(t: i64, ell: u64) -> Result<BigRational> {
    if t == 0 {
        if ell < 2 {
            return Err(Error::InvalidParameters(format!("base {ell} must be at least 2")));
        }
        return Ok(BigRational::zero());
    }
    let v = valuation(t, ell)?;
    Ok(BigRational::new(BigInt::one(), BigInt::from(ell).pow(v)))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LAdicAddress {
    pub ell: u64,
    /// `t_0, t_1, …`, least significant first.
    pub digits: Vec<u64>,
}

impl LAdicAddress {
    pub fn new(ell: u64, digits: Vec<u64>) -> Result<Self> {
        if ell < 2 {
            return Err(Error::InvalidParameters(format!("base {ell} must be at least 2")));
        }
        if let Some(&t) = digits.iter().find(|&&t| t >= ell) {
            return Err(Error::OutOfRange(format!("digit {t} is not below {ell}")));
        }
        Ok(LAdicAddress { ell, digits })
    }

    /// The whole of `Z_ℓ`.
    pub fn root(ell: u64) -> Self {
        LAdicAddress { ell, digits: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn child(&self, t: u64) -> Self {
        let mut digits = self.digits.clone();
        digits.push(t);
        LAdicAddress { ell: self.ell, digits }
    }

    /// `Σ t_i ℓ^i`.
    pub fn value(&self) -> u64 {
        self.digits.iter().rev().fold(0, |acc, &t| acc * self.ell + t)
    }

    pub fn coset(&self) -> Result<LatticeCoset> {
        LatticeCoset::new(self.ell, self.digits.len() as u32, self.value())
    }

    /// Haar measure `ℓ^{-(r+1)}` of the cylinder.
    pub fn measure(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.ell).pow(self.digits.len() as u32))
    }
}

impl fmt::Display for LAdicAddress {
    /// Digits run together for `ℓ <= 10`, dot-separated otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.digits.iter().map(u64::to_string).collect();
        f.write_str(&parts.join(if self.ell <= 10 { "" } else { "." }))
    }
}

/// Hensel digits `t_0 … t_r` of `s` (so `r + 1` of them), least
/// significant first: `(6, 3, 1)` gives `02`.
pub fn hensel_digits(s: u64, ell: u64, r: u32) -> Result<LAdicAddress> {
    if ell < 2 {
        return Err(Error::InvalidParameters(format!("base {ell} must be at least 2")));
    }
    let len = r + 1;
    let bound = (ell as u128).checked_pow(len);
    if bound.is_some_and(|b| s as u128 >= b) {
        return Err(Error::OutOfRange(format!("{s} needs more than {len} digits in base {ell}")));
    }
    let mut digits = Vec::with_capacity(len as usize);
    let mut rest = s;
    for _ in 0..len {
        digits.push(rest % ell);
        rest /= ell;
    }
    Ok(LAdicAddress { ell, digits })
}

/// The letter sitting on every position of the cylinder, if there is one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellLetter {
    Single(Letter),
    Mixed,
}

impl CellLetter {
    pub fn letter(self) -> Option<Letter> {
        match self {
            CellLetter::Single(x) => Some(x),
            CellLetter::Mixed => None,
        }
    }
}

/// `ϱ^{r+1}(x)_s` for all letters `x`, where `s` is the address value.
/// Appending a digit `t` adds it as the new most significant digit, so the
/// child map is `x ↦ parent(ϱ(x)_t)`.
pub(crate) fn column_map(sub: &Substitution, addr: &LAdicAddress) -> Vec<Letter> {
    let mut phi: Vec<Letter> = sub.alphabet().letters().collect();
    for &t in &addr.digits {
        phi = child_map(sub, &phi, t as usize);
    }
    phi
}

pub(crate) fn child_map(sub: &Substitution, phi: &[Letter], t: usize) -> Vec<Letter> {
    sub.alphabet().letters().map(|x| phi[sub.image(x)[t].index()]).collect()
}

pub(crate) fn classify(phi: &[Letter]) -> CellLetter {
    match phi.split_first() {
        Some((&x, rest)) if rest.iter().all(|&y| y == x) => CellLetter::Single(x),
        _ => CellLetter::Mixed,
    }
}

pub fn cell_letter(sub: &Substitution, addr: &LAdicAddress) -> Result<CellLetter> {
    let ell = sub.require_constant_length()? as u64;
    if ell != addr.ell {
        return Err(Error::InvalidParameters(format!("address base {} but substitution length {ell}", addr.ell)));
    }
    Ok(classify(&column_map(sub, addr)))
}
