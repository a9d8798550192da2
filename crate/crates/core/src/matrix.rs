//! Exact integer matrices.
//!
//! Everything here is exact. The characteristic polynomial is computed
//! modulo a set of 61-bit primes (Hessenberg reduction over each prime
//! field) and lifted to the integers by the Chinese remainder theorem; the
//! number of primes is chosen from a bound on the coefficients, so the lift
//! is the true polynomial, not a guess.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense square matrix with exact integer entries, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SquareMatrix {
    dim: usize,
    entries: Vec<i64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        SquareMatrix { dim, entries: vec![0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in rows {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::InvalidParameters(format!("row of length {} in a {dim}x{dim} matrix", r.len())));
            }
            entries.extend_from_slice(r);
        }
        Ok(SquareMatrix { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn row_sums(&self) -> Vec<i64> {
        (0..self.dim).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Product, or `None` on i64 overflow.
    pub fn checked_mul(&self, rhs: &Self) -> Option<Self> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let v = a.checked_mul(rhs.get(k, j))?;
                    let idx = i * n + j;
                    out.entries[idx] = out.entries[idx].checked_add(v)?;
                }
            }
        }
        Some(out)
    }

    pub fn checked_pow(&self, k: u32) -> Option<Self> {
        let mut acc = Self::identity(self.dim);
        for _ in 0..k {
            acc = acc.checked_mul(self)?;
        }
        Some(acc)
    }

    pub fn is_positive(&self) -> bool {
        self.entries.iter().all(|&v| v > 0)
    }

    /// Largest absolute row sum; bounds every eigenvalue modulus.
    pub fn inf_norm(&self) -> u64 {
        (0..self.dim).map(|i| self.row(i).iter().map(|v| v.unsigned_abs()).sum::<u64>()).max().unwrap_or(0)
    }

    pub fn pattern(&self) -> PatternMatrix {
        let mut p = PatternMatrix::new(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                if self.get(i, j) != 0 {
                    p.set(i, j);
                }
            }
        }
        p
    }

    /// Characteristic polynomial `det(xI - A)` with exact integer
    /// coefficients.
    pub fn characteristic_polynomial(&self) -> Polynomial {
        let n = self.dim;
        if n == 0 {
            return Polynomial::one();
        }
        // |c_k| <= binom(n, k) * rho^k, so the sum of all |c_k| is at most
        // (1 + rho)^n. The residues must determine values in
        // [-bound, bound].
        let rho = self.inf_norm();
        let bound = BigInt::from(rho + 1).pow(n as u32);
        let needed = bound * 2u32 + 1u32;

        let mut modulus = BigInt::one();
        let mut coeffs: Vec<BigInt> = vec![BigInt::zero(); n + 1];
        let mut primes = PrimeSource::new();
        while modulus < needed {
            let p = primes.next_prime();
            let residues = charpoly_mod(self, p);
            // Incremental CRT: x = coeffs mod modulus, x = r mod p.
            let pb = BigInt::from(p);
            let inv = mod_inverse_big(&(&modulus % &pb), &pb);
            for (c, &r) in coeffs.iter_mut().zip(residues.iter()) {
                let diff = (BigInt::from(r) - (&*c % &pb)).mod_floor(&pb);
                let t = (diff * &inv).mod_floor(&pb);
                *c += &modulus * t;
            }
            modulus *= pb;
        }
        let half = &modulus / 2u32;
        for c in coeffs.iter_mut() {
            if *c > half {
                *c -= &modulus;
            }
        }
        Polynomial::new(coeffs)
    }
}

impl Mul for &SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: &SquareMatrix) -> SquareMatrix {
        self.checked_mul(rhs).expect("matrix entry overflow")
    }
}

impl fmt::Display for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Deterministic supply of primes just below 2^61.
struct PrimeSource {
    next: u64,
}

impl PrimeSource {
    fn new() -> Self {
        PrimeSource { next: (1u64 << 61) - 1 }
    }

    fn next_prime(&mut self) -> u64 {
        loop {
            let c = self.next;
            self.next -= 2;
            if is_prime_u64(c) {
                return c;
            }
        }
    }
}

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &WITNESSES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn mod_inverse_big(a: &BigInt, p: &BigInt) -> BigInt {
    let e = a.extended_gcd(p);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(p)
}

/// Coefficients (low to high) of `det(xI - A)` modulo the prime `p`.
fn charpoly_mod(a: &SquareMatrix, p: u64) -> Vec<u64> {
    let n = a.dim();
    let reduce = |v: i64| -> u64 { v.rem_euclid(p as i64) as u64 };
    let mut h: Vec<Vec<u64>> = (0..n).map(|i| a.row(i).iter().map(|&v| reduce(v)).collect()).collect();
    let sub = |x: u64, y: u64| if x >= y { x - y } else { x + p - y };
    let add = |x: u64, y: u64| {
        let s = x + y;
        if s >= p {
            s - p
        } else {
            s
        }
    };

    // Similarity transform to upper Hessenberg form.
    for m in 1..n.saturating_sub(1) {
        let Some(piv) = (m..n).find(|&i| h[i][m - 1] != 0) else { continue };
        if piv != m {
            h.swap(piv, m);
            for row in h.iter_mut() {
                row.swap(piv, m);
            }
        }
        let inv = powmod(h[m][m - 1], p - 2, p);
        for i in m + 1..n {
            let u = mulmod(h[i][m - 1], inv, p);
            if u == 0 {
                continue;
            }
            let (top, bottom) = h.split_at_mut(i);
            for (x, &y) in bottom[0].iter_mut().zip(&top[m]) {
                *x = sub(*x, mulmod(u, y, p));
            }
            for row in h.iter_mut() {
                let t = mulmod(u, row[i], p);
                row[m] = add(row[m], t);
            }
        }
    }

    // Recurrence on leading principal minors of xI - H.
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for m in 1..=n {
        let prev = &polys[m - 1];
        let diag = h[m - 1][m - 1];
        let mut pm = vec![0u64; m + 1];
        for (k, &c) in prev.iter().enumerate() {
            pm[k + 1] = add(pm[k + 1], c);
            pm[k] = sub(pm[k], mulmod(diag, c, p));
        }
        let mut t = 1u64;
        for i in 1..m {
            t = mulmod(t, h[m - i][m - i - 1], p);
            let coef = mulmod(t, h[m - i - 1][m - 1], p);
            if coef == 0 {
                continue;
            }
            for (k, &c) in polys[m - i - 1].iter().enumerate() {
                pm[k] = sub(pm[k], mulmod(coef, c, p));
            }
        }
        polys.push(pm);
    }
    polys.pop().unwrap()
}

/// Polynomial with exact integer coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<BigInt>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        Polynomial { coeffs }
    }

    pub fn one() -> Self {
        Polynomial { coeffs: vec![BigInt::one()] }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Monic polynomial `prod (x - r)` over the given roots.
    pub fn from_roots(roots: &[i64]) -> Self {
        let mut p = Self::one();
        for &r in roots {
            let mut next = vec![BigInt::zero(); p.coeffs.len() + 1];
            for (k, c) in p.coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            p = Self::new(next);
        }
        p
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Synthetic division by `(x - r)`: quotient and remainder.
    pub fn divide_linear(&self, r: &BigInt) -> (Polynomial, BigInt) {
        let n = self.coeffs.len();
        if n == 1 {
            return (Polynomial::new(vec![BigInt::zero()]), self.coeffs[0].clone());
        }
        let mut q = vec![BigInt::zero(); n - 1];
        let mut carry = BigInt::zero();
        for k in (0..n).rev() {
            let v = &self.coeffs[k] + &carry * r;
            if k == 0 {
                return (Polynomial::new(q), v);
            }
            q[k - 1] = v.clone();
            carry = v;
        }
        unreachable!()
    }

    /// Multiplicity of `r` as a root.
    pub fn root_multiplicity(&self, r: i64) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let r = BigInt::from(r);
        let mut p = self.clone();
        let mut mult = 0;
        loop {
            let (q, rem) = p.divide_linear(&r);
            if !rem.is_zero() || p.degree() == 0 {
                return mult;
            }
            mult += 1;
            p = q;
        }
    }

    /// Multiset of integer roots, found among divisors of the lowest
    /// nonzero coefficient.
    pub fn integer_roots(&self) -> Vec<i64> {
        let mut roots = Vec::new();
        let zero_mult = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        roots.extend(std::iter::repeat_n(0, zero_mult));
        let Some(c0) = self.coeffs.get(zero_mult).and_then(|c| c.abs().to_i64()) else {
            return roots;
        };
        if c0 == 0 {
            return roots;
        }
        let mut d = 1i64;
        while d * d <= c0 {
            if c0 % d == 0 {
                for cand in [d, -d, c0 / d, -(c0 / d)] {
                    if !roots.contains(&cand) {
                        let m = self.root_multiplicity(cand);
                        roots.extend(std::iter::repeat_n(cand, m));
                    }
                }
            }
            d += 1;
        }
        roots.sort_unstable();
        roots
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() && !(self.is_zero() && k == 0) {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let show_coeff = !a.is_one() || k == 0;
            if show_coeff {
                write!(f, "{a}")?;
            }
            match k {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

/// Zero pattern of a nonnegative matrix, rows stored as bitsets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PatternMatrix {
    dim: usize,
    words: usize,
    bits: Vec<u64>,
}

impl PatternMatrix {
    pub fn new(dim: usize) -> Self {
        let words = dim.div_ceil(64).max(1);
        PatternMatrix { dim, words, bits: vec![0; dim * words] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    /// Boolean product: pattern of `A * B` for nonnegative `A`, `B`.
    pub fn product(&self, rhs: &PatternMatrix) -> PatternMatrix {
        let mut out = PatternMatrix::new(self.dim);
        for i in 0..self.dim {
            for k in 0..self.dim {
                if self.get(i, k) {
                    let src = rhs.row(k).to_vec();
                    let dst = &mut out.bits[i * self.words..(i + 1) * self.words];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d |= s;
                    }
                }
            }
        }
        out
    }

    pub fn all_positive(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| self.get(i, j)))
    }

    /// Columns whose entries are all nonzero.
    pub fn positive_columns(&self) -> Vec<usize> {
        (0..self.dim).filter(|&j| (0..self.dim).all(|i| self.get(i, j))).collect()
    }
}

/// Normalised solution `f` of `f A = lambda f` with `sum f = 1`, provided the
/// left eigenspace is one dimensional.
pub fn left_eigenvector(a: &SquareMatrix, lambda: i64) -> Result<Vec<BigRational>> {
    let n = a.dim();
    // Rows: (A^T - lambda I) f = 0, then sum f = 1.
    let mut rows: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut r: Vec<BigRational> = (0..n)
                .map(|j| {
                    let v = a.get(j, i) - if i == j { lambda } else { 0 };
                    BigRational::from_integer(v.into())
                })
                .collect();
            r.push(BigRational::zero());
            r
        })
        .collect();
    let mut norm = vec![BigRational::one(); n];
    norm.push(BigRational::one());
    rows.push(norm);

    let cols = n;
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..cols {
        let Some(p) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else { continue };
        rows.swap(pivot_row, p);
        let inv = rows[pivot_row][col].recip();
        for v in rows[pivot_row].iter_mut() {
            *v *= &inv;
        }
        let prow = rows[pivot_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != pivot_row && !row[col].is_zero() {
                let factor = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= &factor * pv;
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    if pivots.len() != n {
        return Err(Error::Domain(format!("eigenspace of {lambda} is not one dimensional")));
    }
    if rows[n..].iter().any(|r| !r[n].is_zero()) {
        return Err(Error::Domain(format!("{lambda} is not an eigenvalue")));
    }
    Ok((0..n).map(|i| rows[i][n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Faddeev-LeVerrier over the rationals; independent of the modular path.
    fn charpoly_oracle(a: &SquareMatrix) -> Vec<BigRational> {
        let n = a.dim();
        let to_q = |m: &SquareMatrix| -> Vec<Vec<BigRational>> {
            m.rows().into_iter().map(|r| r.into_iter().map(|v| BigRational::from_integer(v.into())).collect()).collect()
        };
        let aq = to_q(a);
        let mul = |x: &Vec<Vec<BigRational>>, y: &Vec<Vec<BigRational>>| {
            let mut out = vec![vec![BigRational::zero(); n]; n];
            for i in 0..n {
                for k in 0..n {
                    for j in 0..n {
                        out[i][j] += &x[i][k] * &y[k][j];
                    }
                }
            }
            out
        };
        let mut c = vec![BigRational::zero(); n + 1];
        c[n] = BigRational::one();
        let mut mk = vec![vec![BigRational::zero(); n]; n];
        for k in 1..=n {
            let mut next = mul(&aq, &mk);
            for (i, row) in next.iter_mut().enumerate() {
                row[i] += &c[n - k + 1];
            }
            mk = next;
            let am = mul(&aq, &mk);
            let tr: BigRational = (0..n).map(|i| am[i][i].clone()).sum();
            c[n - k] = -tr / BigRational::from_integer((k as i64).into());
        }
        c
    }

    #[test]
    fn charpoly_matches_faddeev_leverrier() {
        let mats = [
            vec![vec![2, 1, 0], vec![0, 1, 2], vec![1, 1, 1]],
            vec![vec![0, -3, 5, 1], vec![7, 2, -2, 0], vec![1, 1, 1, 1], vec![4, 0, -6, 3]],
            vec![vec![0, 0, 0], vec![0, 0, 0], vec![0, 0, 0]],
            vec![vec![0, 1], vec![1, 0]],
        ];
        for rows in mats {
            let a = SquareMatrix::from_rows(&rows).unwrap();
            let got = a.characteristic_polynomial();
            let want = charpoly_oracle(&a);
            let got_q: Vec<BigRational> = (0..=a.dim())
                .map(|k| BigRational::from_integer(got.coeffs().get(k).cloned().unwrap_or_default()))
                .collect();
            assert_eq!(got_q, want, "matrix {rows:?}");
        }
    }

    #[test]
    fn charpoly_of_substitution_matrix() {
        let m = SquareMatrix::from_rows(&[[2, 1, 0], [0, 1, 2], [1, 1, 1]]).unwrap();
        let p = m.characteristic_polynomial();
        // trace 4, determinant 0, principal 2x2 minors sum to 3.
        assert_eq!(p, Polynomial::from_i64(&[0, 3, -4, 1]));
        assert_eq!(p.root_multiplicity(3), 1);
        assert_eq!(p.integer_roots(), vec![0, 1, 3]);
    }

    #[test]
    fn polynomial_helpers() {
        let p = Polynomial::from_roots(&[0, 0, 1, 1, 2, 3]);
        assert_eq!(p.root_multiplicity(1), 2);
        assert_eq!(p.root_multiplicity(0), 2);
        assert_eq!(p.root_multiplicity(5), 0);
        assert_eq!(p.integer_roots(), vec![0, 0, 1, 1, 2, 3]);
        assert_eq!(Polynomial::from_roots(&[0, 3]).to_string(), "x^2 - 3x");
    }

    #[test]
    fn large_charpoly_is_exact() {
        // Row-stochastic-like 0/1 pattern with row sums 3; the value at 3
        // must vanish exactly.
        let n = 40;
        let mut a = SquareMatrix::zeros(n);
        for i in 0..n {
            for d in [0, 7, 13] {
                let j = (i * 5 + d) % n;
                a.set(i, j, a.get(i, j) + 1);
            }
        }
        let p = a.characteristic_polynomial();
        assert_eq!(p.degree(), n);
        assert!(p.eval(&BigInt::from(3)).is_zero());
    }

    #[test]
    fn miller_rabin() {
        assert!(is_prime_u64((1 << 61) - 1));
        assert!(!is_prime_u64((1 << 61) - 3));
        assert!(is_prime_u64(2) && is_prime_u64(97) && !is_prime_u64(561));
    }

    #[test]
    fn pattern_powers() {
        let m = SquareMatrix::from_rows(&[[0, 1], [1, 1]]).unwrap();
        let p = m.pattern();
        assert!(!p.all_positive());
        assert!(p.product(&p).all_positive());
        assert_eq!(p.positive_columns(), vec![1]);
    }

    #[test]
    fn left_eigenvector_uniform() {
        let m = SquareMatrix::from_rows(&[[2, 1, 0], [0, 1, 2], [1, 1, 1]]).unwrap();
        let f = left_eigenvector(&m, 3).unwrap();
        let third = BigRational::new(1.into(), 3.into());
        assert_eq!(f, vec![third.clone(), third.clone(), third]);
        assert!(left_eigenvector(&m, 2).is_err());
    }
}
