//! Generalised Kolakoski sequences `Kol(p, q)`.
//!
//! `Kol(p, q)` is the sequence over `{p, q}` that starts with `p` and equals
//! its own sequence of run lengths. It is produced here in two independent
//! ways: by run-length self-generation ([`KolakoskiStream`]) and by
//! alternately applying `σ0: q ↦ p^q, p ↦ p^p` on even positions and
//! `σ1: q ↦ q^q, p ↦ q^p` on odd positions
//! ([`kolakoski_prefix_by_substitution`]). Positions are counted from 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::substitution::Substitution;
use crate::word::{Alphabet, Letter, Word};

/// The pair `(p, q)` of a `Kol(p, q)` sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KolParams {
    pub p: u32,
    pub q: u32,
}

impl KolParams {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidParameters("p and q must be positive".into()));
        }
        if p == q {
            return Err(Error::InvalidParameters(format!("p = q = {p}; the letters must differ")));
        }
        Ok(KolParams { p, q })
    }

    /// `Kol(2m, 2n)`.
    pub fn even(m: u32, n: u32) -> Result<Self> {
        EvenParams::new(m, n).map(EvenParams::kol)
    }

    /// The mirrored pair `(q, p)`.
    pub fn swapped(self) -> Self {
        KolParams { p: self.q, q: self.p }
    }

    /// `Some((m, n))` when `p = 2m`, `q = 2n` with `m > n`.
    pub fn halves(self) -> Option<EvenParams> {
        if self.p.is_multiple_of(2) && self.q.is_multiple_of(2) {
            EvenParams::new(self.p / 2, self.q / 2).ok()
        } else {
            None
        }
    }

    /// Letter written by run number `i` (runs alternate `p, q, p, ...`).
    #[inline]
    fn run_letter(self, i: usize) -> u32 {
        if i.is_multiple_of(2) {
            self.p
        } else {
            self.q
        }
    }

    pub fn alphabet(self) -> Alphabet {
        Alphabet::new([self.p.to_string(), self.q.to_string()]).expect("p != q")
    }
}

/// `(m, n)` with `m > n >= 1`, describing `Kol(2m, 2n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EvenParams {
    pub m: u32,
    pub n: u32,
}

impl EvenParams {
    pub fn new(m: u32, n: u32) -> Result<Self> {
        if n == 0 || m <= n {
            return Err(Error::InvalidParameters(format!("need m > n >= 1, got m = {m}, n = {n}")));
        }
        Ok(EvenParams { m, n })
    }

    pub fn kol(self) -> KolParams {
        KolParams { p: 2 * self.m, q: 2 * self.n }
    }

    /// `m + n`, the common length of the derived substitutions.
    pub fn ell(self) -> u32 {
        self.m + self.n
    }
}

/// Which half of the bi-infinite sequence a stream produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// `Kol(p, q)`, to the right of the seamline.
    Right,
    /// The left half, read outward from the seamline; this is `Kol(q, p)`.
    Left,
}

/// Lazily generated `Kol(p, q)` letters, via run-length self-generation.
#[derive(Debug, Clone)]
pub struct KolakoskiStream {
    params: KolParams,
    side: Side,
    seq: Vec<u32>,
    run: usize,
    pos: usize,
}

impl KolakoskiStream {
    pub fn new(params: KolParams, side: Side) -> Self {
        let params = match side {
            Side::Right => params,
            Side::Left => params.swapped(),
        };
        KolakoskiStream { params, side, seq: Vec::new(), run: 0, pos: 0 }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    fn extend(&mut self) {
        let letter = self.params.run_letter(self.run);
        // Run i has length seq[i]. When seq[i] is not yet written the run
        // itself starts at position i, so its length is its own letter.
        let len = self.seq.get(self.run).copied().unwrap_or(letter);
        self.seq.extend(std::iter::repeat_n(letter, len as usize));
        self.run += 1;
    }
}

impl Iterator for KolakoskiStream {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        while self.pos >= self.seq.len() {
            self.extend();
        }
        let v = self.seq[self.pos];
        self.pos += 1;
        Some(v)
    }
}

/// First `n` letters of `Kol(p, q)`.
pub fn kolakoski_prefix(params: KolParams, n: usize) -> Result<Vec<u32>> {
    let params = KolParams::new(params.p, params.q)?;
    Ok(KolakoskiStream::new(params, Side::Right).take(n).collect())
}

/// The pair `(σ0, σ1)` over the alphabet `[p, q]`.
pub fn kolakoski_substitutions(params: KolParams) -> Result<(Substitution, Substitution)> {
    let params = KolParams::new(params.p, params.q)?;
    let alphabet = params.alphabet();
    let (p, q) = (Letter(0), Letter(1));
    let block = |l: Letter, k: u32| -> Word { std::iter::repeat_n(l, k as usize).collect() };
    let s0 = Substitution::new("sigma0", alphabet.clone(), vec![block(p, params.p), block(p, params.q)])?;
    let s1 = Substitution::new("sigma1", alphabet, vec![block(q, params.p), block(q, params.q)])?;
    Ok((s0, s1))
}

/// First `n` letters of `Kol(p, q)` by alternating substitution, starting
/// from the seed `p` (or `p q` when `p = 1`, since `σ0(1) = 1` does not
/// grow).
pub fn kolakoski_prefix_by_substitution(params: KolParams, n: usize) -> Result<Vec<u32>> {
    let (s0, s1) = kolakoski_substitutions(params)?;
    let values = [params.p, params.q];
    let mut w: Vec<Letter> = if params.p == 1 { vec![Letter(0), Letter(1)] } else { vec![Letter(0)] };
    while w.len() < n {
        let mut next = Vec::with_capacity(w.len() * 2);
        for (i, &l) in w.iter().enumerate() {
            let s = if i % 2 == 0 { &s0 } else { &s1 };
            next.extend_from_slice(s.image(l));
            if next.len() >= n {
                break;
            }
        }
        w = next;
    }
    w.truncate(n);
    Ok(w.into_iter().map(|l| values[l.index()]).collect())
}

/// The iterates `seed, σ(seed), ...` of the alternating substitution, as
/// strings of letter values; `count` words.
pub fn kolakoski_iterates(params: KolParams, count: usize) -> Result<Vec<Vec<u32>>> {
    let (s0, s1) = kolakoski_substitutions(params)?;
    let values = [params.p, params.q];
    let mut w: Vec<Letter> = if params.p == 1 { vec![Letter(0), Letter(1)] } else { vec![Letter(0)] };
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(w.iter().map(|l| values[l.index()]).collect());
        w = w
            .iter()
            .enumerate()
            .flat_map(|(i, &l)| if i % 2 == 0 { s0.image(l).iter() } else { s1.image(l).iter() })
            .copied()
            .collect();
    }
    Ok(out)
}

/// Both halves of the bi-infinite `Kol(p, q)`, `n` letters each.
///
/// The left word is read outward from the seamline, so it equals the
/// `Kol(q, p)` prefix; reverse it to print the sequence in its natural order.
pub fn kolakoski_bi_prefix(params: KolParams, n: usize) -> Result<(Vec<u32>, Vec<u32>)> {
    let params = KolParams::new(params.p, params.q)?;
    let left = KolakoskiStream::new(params, Side::Left).take(n).collect();
    let right = KolakoskiStream::new(params, Side::Right).take(n).collect();
    Ok((left, right))
}

/// Lengths of all runs of `w`, in order. The last entry describes the final
/// run as far as `w` shows it, which may be a truncated run.
pub fn run_length_encode<T: PartialEq>(w: &[T]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < w.len() {
        let mut j = i + 1;
        while j < w.len() && w[j] == w[i] {
            j += 1;
        }
        out.push(j - i);
        i = j;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelfEncodingReport {
    pub ok: bool,
    /// Index of the first run whose length differs from the letter there.
    pub first_mismatch: Option<usize>,
    /// Number of positions compared (complete runs only).
    pub compared: usize,
}

/// Compares the complete runs of `w` with `w` itself.
pub fn check_self_encoding(w: &[u32]) -> SelfEncodingReport {
    let mut runs = run_length_encode(w);
    // The final run may continue beyond the prefix.
    runs.pop();
    let compared = runs.len().min(w.len());
    let first_mismatch = (0..compared).find(|&i| runs[i] as u64 != w[i] as u64);
    SelfEncodingReport { ok: first_mismatch.is_none(), first_mismatch, compared }
}

/// Generates the `n`-letter prefix of `Kol(p, q)` and checks that it is its
/// own run-length encoding on the overlap.
pub fn verify_self_encoding(params: KolParams, n: usize) -> Result<SelfEncodingReport> {
    Ok(check_self_encoding(&kolakoski_prefix(params, n)?))
}

/// The four-letter substitution over `{p, p̃, q, q̃}` that marks even
/// positions (the tilde letters), for `Kol(2m, 2n)`. Its matrix is
/// `[[m,m,0,0],[0,0,m,m],[n,n,0,0],[0,0,n,n]]`.
pub fn parity_substitution(params: EvenParams) -> Result<Substitution> {
    let params = EvenParams::new(params.m, params.n)?;
    let (p, q) = (2 * params.m, 2 * params.n);
    let tilde = |v: u32| format!("{v}\u{303}");
    let alphabet = Alphabet::new([p.to_string(), tilde(p), q.to_string(), tilde(q)])?;
    let (lp, lpt, lq, lqt) = (Letter(0), Letter(1), Letter(2), Letter(3));
    let pair = |a: Letter, b: Letter, k: u32| -> Word { (0..k).flat_map(|_| [a, b]).collect() };
    let rules =
        vec![pair(lp, lpt, params.m), pair(lq, lqt, params.m), pair(lp, lpt, params.n), pair(lq, lqt, params.n)];
    Substitution::new(format!("parity({p},{q})"), alphabet, rules)
}

/// Renders Kolakoski letters: concatenated when all are single digits,
/// space separated otherwise.
pub fn render_values(w: &[u32]) -> String {
    if w.iter().all(|&v| v < 10) {
        w.iter().map(|v| char::from(b'0' + *v as u8)).collect()
    } else {
        w.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{Polynomial, SquareMatrix};
    use proptest::prelude::*;

    fn kp(p: u32, q: u32) -> KolParams {
        KolParams::new(p, q).unwrap()
    }

    #[test]
    fn classical_prefix() {
        assert_eq!(render_values(&kolakoski_prefix(kp(2, 1), 10).unwrap()), "2211212212");
    }

    #[test]
    fn iteration_chain() {
        let it: Vec<String> = kolakoski_iterates(kp(2, 1), 5).unwrap().iter().map(|w| render_values(w)).collect();
        assert_eq!(it, ["2", "22", "2211", "221121", "221121221"]);
    }

    #[test]
    fn kol_4_2_prefix() {
        assert_eq!(render_values(&kolakoski_prefix(kp(4, 2), 16).unwrap()), "4444222244442222");
    }

    #[test]
    fn equal_letters_rejected() {
        assert!(matches!(kolakoski_prefix(KolParams { p: 2, q: 2 }, 5), Err(Error::InvalidParameters(_))));
        assert!(KolParams::new(3, 3).is_err());
        assert!(EvenParams::new(1, 2).is_err());
    }

    #[test]
    fn bi_infinite_halves() {
        let (left, right) = kolakoski_bi_prefix(kp(2, 1), 14).unwrap();
        assert_eq!(render_values(&right), "22112122122112");
        let mut natural = left.clone();
        natural.reverse();
        assert_eq!(render_values(&natural), "11221221211221");
        let (l0, r0) = kolakoski_bi_prefix(kp(2, 1), 0).unwrap();
        assert!(l0.is_empty() && r0.is_empty());
    }

    #[test]
    fn run_lengths() {
        let w: Vec<u32> = "22112122122112".bytes().map(|b| (b - b'0') as u32).collect();
        assert_eq!(run_length_encode(&w), vec![2, 2, 1, 1, 2, 1, 2, 2, 1]);
        assert_eq!(run_length_encode(&[4, 4, 4, 4]), vec![4]);
        assert_eq!(run_length_encode(&kolakoski_prefix(kp(4, 2), 16).unwrap()), vec![4, 4, 4, 4]);
        assert!(run_length_encode::<u32>(&[]).is_empty());
    }

    #[test]
    fn self_encoding_and_negative_control() {
        assert!(verify_self_encoding(kp(2, 1), 100_000).unwrap().ok);
        assert!(verify_self_encoding(kp(4, 2), 100_000).unwrap().ok);
        let mut w = kolakoski_prefix(kp(2, 1), 1000).unwrap();
        w[40] = 3 - w[40];
        let r = check_self_encoding(&w);
        assert!(!r.ok);
        assert!(r.first_mismatch.unwrap() <= 40);
    }

    #[test]
    fn parity_footnote() {
        let s = parity_substitution(EvenParams::new(2, 1).unwrap()).unwrap();
        let expected = "4 -> 4 4\u{303} 4 4\u{303}\n\
                        4\u{303} -> 2 2\u{303} 2 2\u{303}\n\
                        2 -> 4 4\u{303}\n\
                        2\u{303} -> 2 2\u{303}\n";
        assert_eq!(s.to_text(), expected);
        let m = SquareMatrix::from_rows(&[[2, 2, 0, 0], [0, 0, 2, 2], [1, 1, 0, 0], [0, 0, 1, 1]]).unwrap();
        assert_eq!(s.matrix(), m);
        assert_eq!(s.matrix().characteristic_polynomial(), Polynomial::from_roots(&[0, 0, 0, 3]));
        assert_eq!(s.primitivity_witness(), Some(2));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn two_generators_agree(p in 1u32..9, q in 1u32..9, n in 0usize..20_000) {
            prop_assume!(p != q);
            let a = kolakoski_prefix(kp(p, q), n).unwrap();
            let b = kolakoski_prefix_by_substitution(kp(p, q), n).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn stream_restarts_identically(p in 1u32..7, q in 1u32..7, n in 0usize..2000) {
            prop_assume!(p != q);
            let a: Vec<u32> = KolakoskiStream::new(kp(p, q), Side::Left).take(n).collect();
            let b: Vec<u32> = KolakoskiStream::new(kp(p, q), Side::Left).take(n).collect();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(a, kolakoski_prefix(kp(q, p), n).unwrap());
        }
    }

    #[test]
    fn generators_agree_at_a_million() {
        for (p, q) in [(2, 1), (1, 2), (4, 2), (3, 1)] {
            let a = kolakoski_prefix(kp(p, q), 1_000_000).unwrap();
            let b = kolakoski_prefix_by_substitution(kp(p, q), 1_000_000).unwrap();
            assert!(a == b, "Kol({p},{q})");
        }
    }
}
