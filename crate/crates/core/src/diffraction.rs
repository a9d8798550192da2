//! Fourier–Bohr amplitudes of weighted limit-periodic sequences.
//!
//! A coset `ℓ^r Z + s` has Fourier transform `ℓ^{-r} e^{-2πi f s}` on
//! `f ∈ ℓ^{-r} Z` and zero elsewhere, so the amplitude of a letter set is a
//! sum over its cosets, and the cosets not yet found bound the error.
//! Frequencies stay exact; only the final sums use floating point.

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::derive::{height_one_substitution, DerivedSubstitution};
use crate::error::{Error, Result};
use crate::kolakoski::EvenParams;
use crate::model_set::{coset_partition, CosetDecomposition, LatticeCoset};
use crate::spectrum::{cyclic_factor_order, distinct_primes, Level};
use crate::substitution::Substitution;
use crate::word::Letter;

/// `e^{-2πi num/den}`, exact at multiples of a quarter turn. The argument is
/// reduced modulo `den` before any trigonometry.
pub fn unit_phase(num: i128, den: i128) -> Complex64 {
    assert!(den > 0, "denominator must be positive");
    let r = num.rem_euclid(den);
    if (4 * r) % den == 0 {
        return match 4 * r / den {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, -1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, 1.0),
        };
    }
    let angle = -std::f64::consts::TAU * (r as f64 / den as f64);
    Complex64::new(angle.cos(), angle.sin())
}

/// `e^{-2πi f n}` for an exact frequency `f`.
pub fn phase_at(f: Rational64, n: i128) -> Complex64 {
    unit_phase(*f.numer() as i128 * n, *f.denom() as i128)
}

/// Complex scattering strength per letter, plus the atomic strengths the
/// block weights were built from, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringAssignment {
    pub weights: Vec<Complex64>,
    pub atomic: Option<(Complex64, Complex64)>,
}

impl ScatteringAssignment {
    pub fn new(weights: Vec<Complex64>) -> Result<Self> {
        if weights.iter().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
            return Err(Error::InvalidParameters("scattering weights must be finite".into()));
        }
        Ok(ScatteringAssignment { weights, atomic: None })
    }

    /// Weight 1 on `letter`, 0 elsewhere.
    pub fn indicator(size: usize, letter: Letter) -> Self {
        let mut weights = vec![Complex64::zero(); size];
        weights[letter.index()] = Complex64::new(1.0, 0.0);
        ScatteringAssignment { weights, atomic: None }
    }

    pub fn weight(&self, letter: Letter) -> Complex64 {
        self.weights[letter.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutocorrelationEstimate {
    pub z: i64,
    pub value: Complex64,
    pub n: usize,
}

/// `(1/(N-|z|)) Σ conj(ν(u_k)) ν(u_{k+z})` over the pairs inside the prefix.
pub fn autocorrelation(prefix: &[Letter], weights: &ScatteringAssignment, z: i64) -> Result<AutocorrelationEstimate> {
    let n = prefix.len();
    let shift = z.unsigned_abs() as usize;
    if shift >= n {
        return Err(Error::OutOfRange(format!("shift {z} needs a prefix longer than {n}")));
    }
    let nu = |k: usize| weights.weight(prefix[k]);
    let sum: Complex64 = if z >= 0 {
        (0..n - shift).map(|k| nu(k).conj() * nu(k + shift)).sum()
    } else {
        (shift..n).map(|k| nu(k).conj() * nu(k - shift)).sum()
    };
    Ok(AutocorrelationEstimate { z, value: sum / (n - shift) as f64, n })
}

/// Coefficients `(α_i, β_i)` with `c_i(κ) = α_i c_p + β_i c_q`, where
/// `α_i = Σ_{j : x_j = p} e^{-2πiκj}` runs over the atoms of letter `i`.
pub fn block_phase_sums(derived: &DerivedSubstitution, kappa: Rational64) -> Vec<(Complex64, Complex64)> {
    let p = derived.params.kol().p;
    derived
        .block_expansion
        .iter()
        .map(|atoms| {
            let mut acc = (Complex64::zero(), Complex64::zero());
            for (j, &x) in atoms.iter().enumerate() {
                let e = phase_at(kappa, j as i128);
                if x == p {
                    acc.0 += e;
                } else {
                    acc.1 += e;
                }
            }
            acc
        })
        .collect()
}

/// Block-letter weights `c_i(κ) = Σ_j c'_{x_j} e^{-2πiκj}` at atomic
/// frequency `κ`.
pub fn block_weights(
    derived: &DerivedSubstitution,
    c_p: Complex64,
    c_q: Complex64,
    kappa: Rational64,
) -> ScatteringAssignment {
    let weights = block_phase_sums(derived, kappa).into_iter().map(|(a, b)| c_p * a + c_q * b).collect();
    ScatteringAssignment { weights, atomic: Some((c_p, c_q)) }
}

/// `ℓ^{-r} e^{-2πi f s}` if `f ℓ^r` is an integer, else 0.
pub fn fourier_coset(coset: &LatticeCoset, f: Rational64) -> Complex64 {
    let modulus = coset.modulus() as i128;
    if modulus % *f.denom() as i128 != 0 {
        return Complex64::zero();
    }
    phase_at(f, coset.residue as i128) / modulus as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct BraggPeak {
    /// Frequency in the units of the sequence the amplitude refers to.
    pub frequency: (i64, i64),
    pub amplitude: Complex64,
    pub intensity: f64,
    pub truncation_error: f64,
}

impl BraggPeak {
    fn new(f: Rational64, amplitude: Complex64, truncation_error: f64) -> Self {
        BraggPeak { frequency: (*f.numer(), *f.denom()), amplitude, intensity: amplitude.norm_sqr(), truncation_error }
    }

    pub fn frequency(&self) -> Rational64 {
        Rational64::new(self.frequency.0, self.frequency.1)
    }

    /// Whether `|amplitude|` exceeds the truncation bound.
    pub fn is_certified(&self) -> bool {
        self.amplitude.norm() > self.truncation_error && self.amplitude.norm() > 1e-12
    }
}

/// Amplitude `Σ_i c_i Σ_{cosets of i} ω̂(f)` with error `Σ_i |c_i| ρ_i`,
/// where `ρ_i` is the residual density of letter `i`.
pub fn bragg_amplitude(decs: &[CosetDecomposition], weights: &ScatteringAssignment, f: Rational64) -> BraggPeak {
    let mut amplitude = Complex64::zero();
    let mut error = 0.0;
    for d in decs {
        let c = weights.weight(d.letter);
        if c.is_zero() {
            continue;
        }
        let sum: Complex64 = d.cosets.iter().map(|coset| fourier_coset(coset, f)).sum();
        amplitude += c * sum;
        error += c.norm() * d.residual_density.to_f64().unwrap_or(f64::INFINITY);
    }
    BraggPeak::new(f, amplitude, error)
}

/// Brute-force `(1/N) Σ_{n<N} ν(u_n) e^{-2πi f n}`.
pub fn exponential_sum(prefix: &[Letter], weights: &ScatteringAssignment, f: Rational64) -> Complex64 {
    exponential_sum_by(prefix.len(), |n| weights.weight(prefix[n]), f)
}

/// Same estimator over an arbitrary weight sequence.
pub fn exponential_sum_by(n: usize, nu: impl Fn(usize) -> Complex64, f: Rational64) -> Complex64 {
    if n == 0 {
        return Complex64::zero();
    }
    let sum: Complex64 = (0..n).map(|k| nu(k) * phase_at(f, k as i128)).sum();
    sum / n as f64
}

/// Symbolic Bragg support `{k / (2^ε ℓ^s)}` of `Kol(2m,2n)` in atomic
/// units, with `2^ε` ranging over the divisors of `ord(F)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportDescriptor {
    pub ell: u64,
    pub primes: Vec<u64>,
    pub cyclic_factor_order: u32,
    pub max_epsilon: u32,
    pub description: String,
}

pub fn bragg_support(params: EvenParams) -> SupportDescriptor {
    let ell = params.ell() as u64;
    let order = cyclic_factor_order(params, Level::Kolakoski);
    let description = if order > 1 {
        format!("{{k/({order}·{ell}^s) : k in Z, s >= 0}}")
    } else {
        format!("{{k/{ell}^s : k in Z, s >= 0}}")
    };
    SupportDescriptor {
        ell,
        primes: distinct_primes(ell),
        cyclic_factor_order: order,
        max_epsilon: order.trailing_zeros(),
        description,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportGcd {
    /// Gcd of occurrence differences per letter; 0 if the letter occurs at
    /// most once in the prefix.
    pub gcds: Vec<u64>,
    /// Some gcd shares a factor with `ℓ`, so the support is coarser than
    /// the generic `ℓ`-adic one.
    pub refined: bool,
}

pub fn effective_support_gcd(sub: &Substitution, n: usize) -> Result<SupportGcd> {
    let ell = sub.require_constant_length()? as u64;
    let seed = sub.default_seed().ok_or_else(|| Error::InvalidSubstitution("no prefix-stable letter".into()))?;
    Ok(support_gcd_of(&sub.fixed_point_prefix(seed, n)?, sub.size(), ell))
}

/// Per-letter gcd of occurrence differences in an arbitrary word.
pub fn support_gcd_of(w: &[Letter], size: usize, ell: u64) -> SupportGcd {
    let mut first: Vec<Option<usize>> = vec![None; size];
    let mut gcds = vec![0u64; size];
    for (k, x) in w.iter().enumerate() {
        match first[x.index()] {
            None => first[x.index()] = Some(k),
            Some(f) => gcds[x.index()] = gcds[x.index()].gcd(&((k - f) as u64)),
        }
    }
    let refined = gcds.iter().any(|&g| g > 1 && g.gcd(&ell) > 1);
    SupportGcd { gcds, refined }
}

/// A peak of `Kol(2m,2n)` in atomic units.
#[derive(Debug, Clone, PartialEq)]
pub struct KolakoskiPeak {
    /// Frequency `κ ∈ [0, 1)` on the integer positions of the sequence.
    pub peak: BraggPeak,
    /// The block frequency `4κ mod 1` it is computed from.
    pub block_frequency: (i64, i64),
}

/// Amplitude of `Kol(2m,2n)` at atomic frequency `κ`:
/// `A(κ) = (1/4) A_block(4κ mod 1)` with block weights `c_i(κ)`.
pub fn kolakoski_amplitude(
    derived: &DerivedSubstitution,
    decs: &[CosetDecomposition],
    c_p: Complex64,
    c_q: Complex64,
    kappa: Rational64,
) -> KolakoskiPeak {
    let weights = block_weights(derived, c_p, c_q, kappa);
    let f = (kappa * 4).fract();
    let f = if f < Rational64::zero() { f + 1 } else { f };
    let block = bragg_amplitude(decs, &weights, f);
    KolakoskiPeak {
        peak: BraggPeak::new(kappa, block.amplitude / 4.0, block.truncation_error / 4.0),
        block_frequency: (*f.numer(), *f.denom()),
    }
}

/// Reduced `k / ℓ^s` in `[0, 1)` for `s <= max_denom`, increasing.
pub fn block_frequencies(ell: u64, max_denom: u32) -> Result<Vec<Rational64>> {
    let big = ell
        .checked_pow(max_denom)
        .filter(|&v| v <= (1 << 24))
        .ok_or_else(|| Error::OutOfRange(format!("{ell}^{max_denom} frequencies is too many")))?;
    Ok((0..big as i64).map(|k| Rational64::new(k, big as i64)).collect())
}

/// All certified peaks `κ = (f + t)/4`, `t = 0..3`, over block frequencies
/// `f = k/ℓ^s` with `s <= max_denom`, using cosets up to `max_depth`.
pub fn diffraction_spectrum(
    params: EvenParams,
    c_p: Complex64,
    c_q: Complex64,
    max_depth: u32,
    max_denom: u32,
) -> Result<Vec<KolakoskiPeak>> {
    let derived = height_one_substitution(params)?;
    let partition = coset_partition(&derived.sub, max_depth)?;
    let mut peaks = Vec::new();
    for f in block_frequencies(params.ell() as u64, max_denom)? {
        for t in 0..4 {
            let kappa = (f + t) / 4;
            let peak = kolakoski_amplitude(&derived, &partition.letters, c_p, c_q, kappa);
            if peak.peak.is_certified() {
                peaks.push(peak);
            }
        }
    }
    peaks.sort_by_key(|a| a.peak.frequency());
    Ok(peaks)
}

/// Atomic sequence `Kol(2m,2n)` weighted by `(c_p, c_q)`, as the
/// exponential-sum oracle for [`kolakoski_amplitude`].
pub fn kolakoski_exponential_sum(
    values: &[u32],
    p: u32,
    c_p: Complex64,
    c_q: Complex64,
    kappa: Rational64,
) -> Complex64 {
    exponential_sum_by(values.len(), |k| if values[k] == p { c_p } else { c_q }, kappa)
}
