//! Height, coincidences and the coincidence matrix of a constant-length
//! substitution.
//!
//! A column index `j < ℓ^k` of `ϱ^k` is kept as its base-`ℓ` digit path
//! `d_1 … d_k` (most significant first), so that
//! `ϱ^k(x)_j = ϱ(… ϱ(ϱ(x)_{d_1})_{d_2} …)_{d_k}`.

use std::collections::{HashMap, HashSet, VecDeque};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{PatternMatrix, Polynomial, SquareMatrix};
use crate::substitution::Substitution;
use crate::word::Letter;

/// Longest fixed-point prefix examined by [`position_gcd`] and [`height`].
pub const MAX_PREFIX: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionGcd {
    pub gcd: u64,
    pub depth: u32,
    /// Whether the value was unchanged between `depth - 1` and `depth`.
    pub stable: bool,
}

/// Gcd of the return positions `i > 0` with `u_i = u_0` in the fixed point
/// `u` seeded by `seed`, over the prefix of length `ℓ^depth`.
pub fn position_gcd(sub: &Substitution, seed: Letter, depth: u32) -> Result<PositionGcd> {
    let ell = sub.require_constant_length()?;
    let len = |d: u32| (ell as u64).checked_pow(d).map(|v| v.min(MAX_PREFIX as u64) as usize);
    let n = len(depth).unwrap_or(MAX_PREFIX);
    let u = sub.fixed_point_prefix(seed, n)?;
    let gcd_upto = |n: usize| -> u64 { (1..n).filter(|&i| u[i] == seed).fold(0u64, |g, i| g.gcd(&(i as u64))) };
    let g = gcd_upto(n);
    if g == 0 {
        return Err(Error::NoReturn(sub.label(seed).to_string()));
    }
    let prev = if depth == 0 { 0 } else { gcd_upto(len(depth - 1).unwrap_or(n)) };
    Ok(PositionGcd { gcd: g, depth, stable: prev == g })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightResult {
    /// Gcd of the return positions of `u_0`.
    pub g: u64,
    pub h: u64,
    pub depth_used: u32,
    pub stable: bool,
}

/// Largest divisor of `g` coprime to `ell`.
pub fn coprime_part(mut g: u64, ell: u64) -> u64 {
    loop {
        let d = g.gcd(&ell);
        if d == 1 {
            return g;
        }
        g /= d;
    }
}

/// Height `h = max{k : gcd(k, ℓ) = 1, k | gcd{i : u_i = u_0}}` of a
/// primitive constant-length substitution, using the fixed point of
/// [`Substitution::default_seed`].
///
/// The gcd `g` is exact: `n | g` holds iff the automaton on pairs
/// (letter, position mod `n`) never reaches `(u_0, a)` with `a != 0`, and
/// `g` divides the first return position, so only its divisors are tried.
/// `depth_used` is the number of base-`ℓ` digits of that first return.
pub fn height(sub: &Substitution) -> Result<HeightResult> {
    let ell = sub.require_constant_length()?;
    if !sub.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let seed = sub.default_seed().ok_or_else(|| Error::InvalidSubstitution("no prefix-stable letter".into()))?;
    if ell == 1 {
        // Primitive of length 1 means a single letter a -> a: u is constant.
        return Ok(HeightResult { g: 1, h: 1, depth_used: 0, stable: true });
    }
    let first = first_return(sub, seed)?;
    let mut divisors: Vec<u64> = (1..=first).filter(|d| first % d == 0).collect();
    divisors.reverse();
    let g = divisors.into_iter().find(|&n| returns_divisible_by(sub, seed, n)).unwrap_or(1);
    let mut depth_used = 0;
    let mut x = first;
    while x > 0 {
        x /= ell as u64;
        depth_used += 1;
    }
    Ok(HeightResult { g, h: coprime_part(g, ell as u64), depth_used, stable: true })
}

fn first_return(sub: &Substitution, seed: Letter) -> Result<u64> {
    let ell = sub.require_constant_length()?;
    let mut size = ell;
    loop {
        let u = sub.fixed_point_prefix(seed, size)?;
        if let Some(i) = (1..u.len()).find(|&i| u[i] == seed) {
            return Ok(i as u64);
        }
        if size >= MAX_PREFIX {
            return Err(Error::NoReturn(sub.label(seed).to_string()));
        }
        size = size.saturating_mul(ell).min(MAX_PREFIX);
    }
}

/// Whether every `i` with `u_i = u_0` is a multiple of `n`.
fn returns_divisible_by(sub: &Substitution, seed: Letter, n: u64) -> bool {
    let ell = sub.constant_length().expect("constant length") as u64;
    let r = sub.size();
    let state = |x: Letter, a: u64| x.index() * n as usize + a as usize;
    let mut seen = vec![false; r * n as usize];
    let mut stack = vec![(seed, 0u64)];
    seen[state(seed, 0)] = true;
    while let Some((x, a)) = stack.pop() {
        if x == seed && a != 0 {
            return false;
        }
        for (j, &y) in sub.image(x).iter().enumerate() {
            let b = (ell * a + j as u64) % n;
            if !seen[state(y, b)] {
                seen[state(y, b)] = true;
                stack.push((y, b));
            }
        }
    }
    true
}

/// A column of `ϱ^k` on which the listed letters agree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoincidenceCertificate {
    pub k: usize,
    /// Base-`ℓ` digits of the column index, most significant first.
    pub digits: Vec<usize>,
    pub letter: Letter,
}

impl CoincidenceCertificate {
    /// The letter reached from `start` along the digit path.
    pub fn replay(&self, sub: &Substitution, start: Letter) -> Letter {
        follow(sub, start, &self.digits)
    }

    /// Checks that every letter of the alphabet ends at `letter`.
    pub fn verify_full(&self, sub: &Substitution) -> bool {
        sub.alphabet().letters().all(|x| self.replay(sub, x) == self.letter)
    }

    /// Column index as a decimal string (it may exceed `u64`).
    pub fn column_index(&self, ell: usize) -> String {
        let mut v = num_bigint::BigUint::from(0u32);
        for &d in &self.digits {
            v = v * ell + d;
        }
        v.to_string()
    }
}

fn follow(sub: &Substitution, start: Letter, digits: &[usize]) -> Letter {
    digits.iter().fold(start, |x, &d| sub.image(x)[d])
}

/// Shortest digit path on which `s` and `t` coincide (breadth-first search
/// over unordered pairs, columns tried in increasing order, so ties go to
/// the lexicographically smallest path). `None` when no such path exists.
pub fn pairwise_coincidence(sub: &Substitution, s: Letter, t: Letter) -> Result<Option<CoincidenceCertificate>> {
    let ell = sub.require_constant_length()?;
    sub.alphabet().check(s)?;
    sub.alphabet().check(t)?;
    if s == t {
        return Ok(Some(CoincidenceCertificate { k: 0, digits: Vec::new(), letter: s }));
    }
    let key = |a: Letter, b: Letter| if a <= b { (a, b) } else { (b, a) };
    let start = key(s, t);
    let mut parent: HashMap<(Letter, Letter), ((Letter, Letter), usize)> = HashMap::new();
    let mut seen: HashSet<(Letter, Letter)> = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(state) = queue.pop_front() {
        for j in 0..ell {
            let next = key(sub.image(state.0)[j], sub.image(state.1)[j]);
            if !seen.insert(next) {
                continue;
            }
            parent.insert(next, (state, j));
            if next.0 == next.1 {
                let mut digits = Vec::new();
                let mut cur = next;
                while cur != start {
                    let (p, d) = parent[&cur];
                    digits.push(d);
                    cur = p;
                }
                digits.reverse();
                return Ok(Some(CoincidenceCertificate { k: digits.len(), digits, letter: next.0 }));
            }
            queue.push_back(next);
        }
    }
    Ok(None)
}

/// Coincidence built inductively from pairwise ones: keep the set of letters
/// seen in the current column and merge its two smallest members with a
/// pairwise certificate until one letter is left. Requires height 1.
pub fn full_coincidence(sub: &Substitution) -> Result<Option<CoincidenceCertificate>> {
    sub.require_constant_length()?;
    let h = height(sub)?;
    if h.h != 1 {
        return Err(Error::HeightNotOne(h.h));
    }
    let mut column: Vec<Letter> = sub.alphabet().letters().collect();
    let mut digits = Vec::new();
    let mut cache: HashMap<(Letter, Letter), Option<CoincidenceCertificate>> = HashMap::new();
    while column.len() > 1 {
        let (a, b) = (column[0], column[1]);
        let cert = match cache.get(&(a, b)) {
            Some(c) => c.clone(),
            None => {
                let c = pairwise_coincidence(sub, a, b)?;
                cache.insert((a, b), c.clone());
                c
            }
        };
        let Some(cert) = cert else { return Ok(None) };
        digits.extend_from_slice(&cert.digits);
        let mut next: Vec<Letter> = column.iter().map(|&x| follow(sub, x, &cert.digits)).collect();
        next.sort_unstable();
        next.dedup();
        column = next;
    }
    let letter = column[0];
    Ok(Some(CoincidenceCertificate { k: digits.len(), digits, letter }))
}

/// Shortest coincidence overall: breadth-first search over the set of
/// letters in a column, starting from the whole alphabet. The state space
/// has at most `2^r` elements.
pub fn minimal_coincidence(sub: &Substitution) -> Result<Option<CoincidenceCertificate>> {
    let ell = sub.require_constant_length()?;
    let r = sub.size();
    if r > 24 {
        return Err(Error::OutOfRange(format!("{r} letters is too many for a subset search")));
    }
    let full: u32 = if r == 32 { u32::MAX } else { (1u32 << r) - 1 };
    if r == 1 {
        return Ok(Some(CoincidenceCertificate { k: 0, digits: Vec::new(), letter: Letter(0) }));
    }
    let mut parent: HashMap<u32, (u32, usize)> = HashMap::new();
    let mut queue = VecDeque::from([full]);
    parent.insert(full, (full, usize::MAX));
    while let Some(set) = queue.pop_front() {
        for j in 0..ell {
            let mut next = 0u32;
            for x in 0..r {
                if set >> x & 1 == 1 {
                    next |= 1 << sub.image(Letter::from(x))[j].index();
                }
            }
            if parent.contains_key(&next) {
                continue;
            }
            parent.insert(next, (set, j));
            if next.count_ones() == 1 {
                let mut digits = Vec::new();
                let mut cur = next;
                while cur != full {
                    let (p, d) = parent[&cur];
                    digits.push(d);
                    cur = p;
                }
                digits.reverse();
                let letter = Letter(next.trailing_zeros());
                return Ok(Some(CoincidenceCertificate { k: digits.len(), digits, letter }));
            }
            queue.push_back(next);
        }
    }
    Ok(None)
}

/// Ordering of unordered letter pairs: `(11), (22), …, (rr)`, then
/// `(12), (13), …, (1r), (23), …`.
pub fn pair_order(r: usize) -> Vec<(Letter, Letter)> {
    let diag = (0..r).map(|i| (Letter::from(i), Letter::from(i)));
    let off = (0..r).flat_map(|i| (i + 1..r).map(move |j| (Letter::from(i), Letter::from(j))));
    diag.chain(off).collect()
}

/// The `r(r+1)/2`-square coincidence matrix together with its pair order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoincidenceMatrix {
    pub pair_order: Vec<(Letter, Letter)>,
    pub matrix: SquareMatrix,
}

impl CoincidenceMatrix {
    pub fn index_of(&self, a: Letter, b: Letter) -> usize {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.pair_order.iter().position(|&p| p == key).expect("pair in order")
    }

    pub fn pair_labels(&self, sub: &Substitution) -> Vec<String> {
        self.pair_order.iter().map(|&(a, b)| format!("({},{})", sub.label(a), sub.label(b))).collect()
    }
}

/// `C_(st)(uv)` counts the columns `j` with `{ϱ(s)_j, ϱ(t)_j} = {u, v}`.
pub fn coincidence_matrix(sub: &Substitution) -> Result<CoincidenceMatrix> {
    let ell = sub.require_constant_length()?;
    let order = pair_order(sub.size());
    let index: HashMap<(Letter, Letter), usize> = order.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut c = SquareMatrix::zeros(order.len());
    for (row, &(s, t)) in order.iter().enumerate() {
        for j in 0..ell {
            let (u, v) = (sub.image(s)[j], sub.image(t)[j]);
            let col = index[&if u <= v { (u, v) } else { (v, u) }];
            c.set(row, col, c.get(row, col) + 1);
        }
    }
    Ok(CoincidenceMatrix { pair_order: order, matrix: c })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralVerdict {
    pub pure_point: bool,
    pub length: usize,
    /// Smallest `k` such that `C^k` has a strictly positive column, with
    /// that column's index in the pair order.
    pub positive_column: Option<(usize, usize)>,
    pub char_poly: Polynomial,
    /// Multiplicity of `ℓ` as a root of `char_poly`.
    pub multiplicity: usize,
}

/// Pure point test with two independent routes: a strictly positive column
/// in a power of `C` (sufficient), and simplicity of the eigenvalue `ℓ` in
/// the exact characteristic polynomial of `C` (the verdict). Rejects
/// substitutions of height other than 1.
pub fn spectral_verdict(sub: &Substitution) -> Result<SpectralVerdict> {
    let ell = sub.require_constant_length()?;
    let h = height(sub)?;
    if h.h != 1 {
        return Err(Error::HeightNotOne(h.h));
    }
    let c = coincidence_matrix(sub)?;
    let char_poly = c.matrix.characteristic_polynomial();
    let multiplicity = char_poly.root_multiplicity(ell as i64);
    let positive_column = first_positive_column_power(&c.matrix.pattern(), positive_column_bound(sub));
    let pure_point = multiplicity == 1;
    if positive_column.is_some() && !pure_point {
        return Err(Error::Inconsistent(format!(
            "C^k has a positive column but {ell} has multiplicity {multiplicity}"
        )));
    }
    Ok(SpectralVerdict { pure_point, length: ell, positive_column, char_poly, multiplicity })
}

fn positive_column_bound(sub: &Substitution) -> usize {
    let r = sub.size();
    let ell = sub.constant_length().unwrap_or(1);
    // For θ̃ (r = m + 1) and θ (r = m + n - 1) the inductive bounds are
    // 3m and 2(m + n - 2); both are below 3 * ell and r^2 covers the rest.
    (r * r).max(3 * ell).max(1)
}

/// Smallest `k <= max_k` for which the pattern power has a positive column.
/// Stops early once the sequence of patterns repeats.
pub fn first_positive_column_power(base: &PatternMatrix, max_k: usize) -> Option<(usize, usize)> {
    let mut seen = HashSet::new();
    let mut p = base.clone();
    for k in 1..=max_k {
        if let Some(&col) = p.positive_columns().first() {
            return Some((k, col));
        }
        if !seen.insert(p.clone()) {
            return None;
        }
        p = p.product(base);
    }
    None
}
