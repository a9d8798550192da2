//! Letter positions of a constant-length fixed point as unions of lattice
//! cosets `ℓ^r Z + s`.
//!
//! If `u = ϱ(u)` has constant length `ℓ`, then `u_{ℓ^r q + s} = ϱ^r(u_q)_s`,
//! so `ℓ^r Z + s` lies inside `U_i = {k : u_k = i}` as soon as column `s` of
//! `ϱ^r` is constantly `i`. Such cylinders exhaust `U_i` up to a residual of
//! density zero in the limit.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kolakoski::EvenParams;
use crate::matrix::left_eigenvector;
use crate::spectrum::{cyclic_factor_order, distinct_primes, Level};
use crate::substitution::Substitution;
use crate::word::Letter;

/// Largest number of open residues kept while refining a decomposition.
pub const MAX_OPEN_RESIDUES: usize = 1 << 24;

/// The coset `ℓ^level Z + residue`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LatticeCoset {
    pub ell: u64,
    pub level: u32,
    pub residue: u64,
}

impl LatticeCoset {
    pub fn new(ell: u64, level: u32, residue: u64) -> Result<Self> {
        let modulus = checked_modulus(ell, level)?;
        Ok(LatticeCoset { ell, level, residue: residue % modulus })
    }

    pub fn modulus(&self) -> u64 {
        self.ell.pow(self.level)
    }

    pub fn density(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.modulus()))
    }

    pub fn contains(&self, k: i64) -> bool {
        k.rem_euclid(self.modulus() as i64) as u64 == self.residue
    }

    /// Base-`ℓ` digits of the residue, most significant first, padded to
    /// `level` digits.
    pub fn digits(&self) -> Vec<usize> {
        let mut d = vec![0; self.level as usize];
        let mut s = self.residue;
        for slot in d.iter_mut().rev() {
            *slot = (s % self.ell) as usize;
            s /= self.ell;
        }
        d
    }

    /// Whether the two cosets share an element.
    pub fn meets(&self, other: &LatticeCoset) -> bool {
        let (a, b) = if self.level <= other.level { (self, other) } else { (other, self) };
        b.residue % a.modulus() == a.residue
    }
}

impl fmt::Display for LatticeCoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.modulus(), self.residue) {
            (1, _) => write!(f, "Z"),
            (m, 0) => write!(f, "{m}Z"),
            (m, s) => write!(f, "{m}Z+{s}"),
        }
    }
}

fn checked_modulus(ell: u64, level: u32) -> Result<u64> {
    ell.checked_pow(level)
        .filter(|&m| m <= i64::MAX as u64)
        .ok_or_else(|| Error::OutOfRange(format!("{ell}^{level} does not fit in 63 bits")))
}

/// One term `ℓ U_source + offset` of the recursion for `U_target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IfsBranch {
    pub source: Letter,
    pub offset: usize,
}

/// `U_i = ⋃ { ℓ U_j + k : ϱ(j)_k = i }` for every letter `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IfsSystem {
    pub ell: usize,
    pub branches: Vec<Vec<IfsBranch>>,
}

impl IfsSystem {
    pub fn branch_count(&self) -> usize {
        self.branches.iter().map(Vec::len).sum()
    }

    /// One line per letter, e.g. `U_a1 = 3 U_a1 ∪ 3 U_a1 + 2 ∪ 3 U_b1`.
    pub fn render(&self, sub: &Substitution) -> String {
        let mut out = String::new();
        for (i, branches) in self.branches.iter().enumerate() {
            let terms: Vec<String> = branches
                .iter()
                .map(|b| {
                    let base = format!("{} U_{}", self.ell, sub.label(b.source));
                    if b.offset == 0 {
                        base
                    } else {
                        format!("{base} + {}", b.offset)
                    }
                })
                .collect();
            out.push_str(&format!("U_{} = {}\n", sub.label(Letter::from(i)), terms.join(" ∪ ")));
        }
        out
    }
}

pub fn ifs_system(sub: &Substitution) -> Result<IfsSystem> {
    let ell = sub.require_constant_length()?;
    let mut branches = vec![Vec::new(); sub.size()];
    for source in sub.alphabet().letters() {
        for (offset, &target) in sub.image(source).iter().enumerate() {
            branches[target.index()].push(IfsBranch { source, offset });
        }
    }
    Ok(IfsSystem { ell, branches })
}

/// Normalised Perron–Frobenius left eigenvector of the substitution matrix.
///
/// For non-constant length the eigenvalue is read off the length vector,
/// which must then be a right eigenvector (as for `A ↦ A^m B^m, B ↦ A^n B^n`).
pub fn letter_frequencies(sub: &Substitution) -> Result<Vec<BigRational>> {
    if !sub.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let m = sub.matrix();
    let lambda = match sub.constant_length() {
        Some(ell) => ell as i64,
        None => {
            let lengths: Vec<i64> = sub.lengths().iter().map(|&l| l as i64).collect();
            let image: Vec<i64> = (0..m.dim()).map(|i| (0..m.dim()).map(|j| m.get(i, j) * lengths[j]).sum()).collect();
            let lambda = image[0] / lengths[0];
            if image.iter().zip(&lengths).any(|(&a, &l)| a != lambda * l) {
                return Err(Error::NotConstantLength);
            }
            lambda
        }
    };
    left_eigenvector(&m, lambda)
}

/// State of an unresolved residue: `phi[x] = ϱ^r(x)_s`.
#[derive(Debug, Clone)]
struct Open {
    residue: u64,
    phi: Vec<Letter>,
}

fn constant(phi: &[Letter]) -> Option<Letter> {
    let first = *phi.first()?;
    phi.iter().all(|&x| x == first).then_some(first)
}

/// Breadth-first refinement of `Z` into maximal constant-column cosets.
/// `keep` decides whether an open residue is still worth refining.
fn refine(
    sub: &Substitution,
    max_depth: u32,
    mut emit: impl FnMut(LatticeCoset, Letter),
    keep: impl Fn(&[Letter]) -> bool,
) -> Result<Vec<u64>> {
    let ell = sub.require_constant_length()? as u64;
    checked_modulus(ell, max_depth)?;
    let mut open = vec![Open { residue: 0, phi: sub.alphabet().letters().collect() }];
    for level in 0..=max_depth {
        let mut next = Vec::new();
        for o in open {
            if let Some(x) = constant(&o.phi) {
                emit(LatticeCoset { ell, level, residue: o.residue }, x);
                continue;
            }
            if !keep(&o.phi) {
                continue;
            }
            if level == max_depth {
                next.push(o);
                continue;
            }
            let step = ell.pow(level);
            for d in 0..ell as usize {
                let phi = sub.alphabet().letters().map(|x| o.phi[sub.image(x)[d].index()]).collect();
                next.push(Open { residue: o.residue + step * d as u64, phi });
            }
        }
        if next.len() > MAX_OPEN_RESIDUES {
            return Err(Error::OutOfRange(format!("more than {MAX_OPEN_RESIDUES} open residues at level {level}")));
        }
        open = next;
    }
    let mut left: Vec<u64> = open.into_iter().map(|o| o.residue).collect();
    left.sort_unstable();
    Ok(left)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetDecomposition {
    pub letter: Letter,
    pub label: String,
    pub ell: u64,
    pub depth: u32,
    /// Sorted by level, then residue.
    pub cosets: Vec<LatticeCoset>,
    pub frequency: BigRational,
    pub covered_density: BigRational,
    pub residual_density: BigRational,
}

impl CosetDecomposition {
    pub fn contains(&self, k: i64) -> bool {
        self.cosets.iter().any(|c| c.contains(k))
    }

    pub fn is_disjoint(&self) -> bool {
        self.cosets.iter().enumerate().all(|(i, a)| self.cosets[i + 1..].iter().all(|b| !a.meets(b)))
    }
}

/// All maximal cosets of level at most `max_depth` inside `U_letter`.
pub fn coset_decomposition(sub: &Substitution, letter: Letter, max_depth: u32) -> Result<CosetDecomposition> {
    sub.alphabet().check(letter)?;
    let freq = letter_frequencies(sub)?;
    let mut cosets = Vec::new();
    refine(
        sub,
        max_depth,
        |c, x| {
            if x == letter {
                cosets.push(c)
            }
        },
        |phi| phi.contains(&letter),
    )?;
    Ok(decomposition(sub, letter, max_depth, cosets, freq[letter.index()].clone()))
}

fn decomposition(
    sub: &Substitution,
    letter: Letter,
    depth: u32,
    mut cosets: Vec<LatticeCoset>,
    frequency: BigRational,
) -> CosetDecomposition {
    cosets.sort_by_key(|c| (c.level, c.residue));
    let covered: BigRational = cosets.iter().map(LatticeCoset::density).fold(BigRational::zero(), |a, b| a + b);
    CosetDecomposition {
        letter,
        label: sub.label(letter).to_string(),
        ell: sub.constant_length().unwrap_or(0) as u64,
        depth,
        cosets,
        residual_density: &frequency - &covered,
        covered_density: covered,
        frequency,
    }
}

/// Decompositions of every letter at a common depth, plus the residues
/// modulo `ℓ^depth` left open. Together they partition `Z/ℓ^depth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetPartition {
    pub depth: u32,
    pub letters: Vec<CosetDecomposition>,
    pub open: Vec<u64>,
}

impl CosetPartition {
    /// Total density of the cosets plus the open residues; always 1.
    pub fn total_density(&self) -> BigRational {
        let ell = self.letters.first().map_or(1, |d| d.ell);
        let open = BigRational::new(BigInt::from(self.open.len()), BigInt::from(ell).pow(self.depth));
        self.letters.iter().fold(open, |acc, d| acc + &d.covered_density)
    }
}

pub fn coset_partition(sub: &Substitution, max_depth: u32) -> Result<CosetPartition> {
    let freq = letter_frequencies(sub)?;
    let mut by_letter: BTreeMap<Letter, Vec<LatticeCoset>> =
        sub.alphabet().letters().map(|x| (x, Vec::new())).collect();
    let open = refine(sub, max_depth, |c, x| by_letter.get_mut(&x).expect("letter").push(c), |_| true)?;
    let letters = by_letter
        .into_iter()
        .map(|(x, cosets)| decomposition(sub, x, max_depth, cosets, freq[x.index()].clone()))
        .collect();
    Ok(CosetPartition { depth: max_depth, letters, open })
}

/// Column `s` of `ϱ^r`, computed directly from the iterated images.
pub fn column_of_power(sub: &Substitution, level: u32, residue: u64) -> Result<Vec<Letter>> {
    sub.alphabet().letters().map(|x| Ok(sub.apply_n(&[x], level as usize)?[residue as usize])).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub position: usize,
    pub coset: LatticeCoset,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrefixCheck {
    pub prefix_length: usize,
    pub positions_checked: usize,
    pub violations: Vec<Violation>,
    /// Share of the prefix carrying the letter.
    pub empirical_frequency: f64,
    /// Share of the prefix covered by the cosets.
    pub covered_fraction: f64,
    /// `empirical_frequency - covered_fraction`, to compare with the
    /// residual density.
    pub frequency_gap: f64,
    pub residual_density: f64,
}

/// Checks every coset position below `n` against the fixed point of the
/// default seed.
pub fn verify_cosets_against_prefix(sub: &Substitution, dec: &CosetDecomposition, n: usize) -> Result<PrefixCheck> {
    let seed = sub.default_seed().ok_or_else(|| Error::InvalidSubstitution("no prefix-stable letter".into()))?;
    let u = sub.fixed_point_prefix(seed, n)?;
    let mut covered = vec![false; n];
    let mut violations = Vec::new();
    let mut checked = 0;
    for c in &dec.cosets {
        let mut k = c.residue as usize;
        while k < n {
            checked += 1;
            covered[k] = true;
            if u[k] != dec.letter {
                violations.push(Violation { position: k, coset: *c, found: sub.label(u[k]).to_string() });
            }
            k += c.modulus() as usize;
        }
    }
    let count = u.iter().filter(|&&x| x == dec.letter).count();
    let denom = n.max(1) as f64;
    let empirical = count as f64 / denom;
    let covered = covered.iter().filter(|&&b| b).count() as f64 / denom;
    Ok(PrefixCheck {
        prefix_length: n,
        positions_checked: checked,
        violations,
        empirical_frequency: empirical,
        covered_fraction: covered,
        frequency_gap: empirical - covered,
        residual_density: dec.residual_density.to_f64().unwrap_or(f64::NAN),
    })
}

/// The cut-and-project data behind the model-set description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutProjectDescriptor {
    pub physical: String,
    pub ell: u64,
    /// Primes `p` with `Z_ℓ ≅ Π Z_p`.
    pub internal_primes: Vec<u64>,
    pub cyclic_factor_order: Option<u32>,
    pub internal: String,
    pub lattice: String,
}

/// Scheme `Z ← Z × Z_ℓ → Z_ℓ` with `Γ = {(z, z)}`, valid for any
/// constant-length substitution of length `ell`.
pub fn substitution_scheme(ell: u64) -> CutProjectDescriptor {
    CutProjectDescriptor {
        physical: "Z".into(),
        ell,
        internal_primes: distinct_primes(ell),
        cyclic_factor_order: None,
        internal: format!("Z_{ell}"),
        lattice: "{(z, z) : z in Z}".into(),
    }
}

/// Scheme for `Kol(2m,2n)`: the internal group gains the cyclic factor `F`.
pub fn cut_project_descriptor(params: EvenParams) -> CutProjectDescriptor {
    let ell = params.ell() as u64;
    let primes = distinct_primes(ell);
    let order = cyclic_factor_order(params, Level::Kolakoski);
    let mut parts: Vec<String> = primes.iter().map(|p| format!("Z_{p}")).collect();
    let (cyclic, lattice) = if order > 1 {
        parts.push(format!("Z/{order}Z"));
        (Some(order), format!("{{(z, z, z mod {order}) : z in Z}}"))
    } else {
        (None, "{(z, z) : z in Z}".into())
    };
    CutProjectDescriptor {
        physical: "Z".into(),
        ell,
        internal_primes: primes,
        cyclic_factor_order: cyclic,
        internal: parts.join(" × "),
        lattice,
    }
}
