//! Substitutions derived from `Kol(2m, 2n)`.
//!
//! With `A = pp` and `B = qq` the sequence is generated by the two-letter
//! substitution `σ: A ↦ A^m B^m, B ↦ A^n B^n`, whose length vector
//! `(2m, 2n)` is a right eigenvector of its matrix. Numbering the letters of
//! the two images and cutting the result into blocks of `m + n` gives
//! constant-length substitutions; pairing letters once more gives `θ`
//! (`n > 1`) and `θ̃` (`n = 1`), whose letters each stand for four atoms of
//! `Kol(2m, 2n)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kolakoski::EvenParams;
use crate::substitution::Substitution;
use crate::word::{Alphabet, Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivedKind {
    BlockedSigma,
    Numbered,
    Theta,
    ThetaTilde,
}

impl DerivedKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DerivedKind::BlockedSigma => "blocked-sigma",
            DerivedKind::Numbered => "numbered",
            DerivedKind::Theta => "theta",
            DerivedKind::ThetaTilde => "theta-tilde",
        }
    }
}

/// A substitution derived from `(m, n)`, with the atomic content of each
/// letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedSubstitution {
    pub kind: DerivedKind,
    pub params: EvenParams,
    pub sub: Substitution,
    /// Per letter (alphabet order), the atoms `2m` / `2n` it stands for.
    pub block_expansion: Vec<Vec<u32>>,
}

impl DerivedSubstitution {
    /// Atoms of `letter`.
    pub fn expansion(&self, letter: Letter) -> &[u32] {
        &self.block_expansion[letter.index()]
    }

    /// Replaces every letter of `w` by its atoms.
    pub fn expand(&self, w: &[Letter]) -> Vec<u32> {
        w.iter().flat_map(|&l| self.expansion(l).iter().copied()).collect()
    }
}

fn word(alphabet: &Alphabet, labels: &[String]) -> Word {
    labels.iter().map(|l| alphabet.letter(l).expect("label in alphabet")).collect()
}

/// `σ: A ↦ A^m B^m, B ↦ A^n B^n` with `A = pp`, `B = qq`.
pub fn block_substitution(params: EvenParams) -> Result<DerivedSubstitution> {
    let EvenParams { m, n } = EvenParams::new(params.m, params.n)?;
    let alphabet = Alphabet::new(["A", "B"])?;
    let img = |k: u32| -> Word {
        std::iter::repeat_n(Letter(0), k as usize).chain(std::iter::repeat_n(Letter(1), k as usize)).collect()
    };
    let sub = Substitution::new(format!("sigma({m},{n})"), alphabet, vec![img(m), img(n)])?;
    Ok(DerivedSubstitution {
        kind: DerivedKind::BlockedSigma,
        params,
        sub,
        block_expansion: vec![vec![2 * m; 2], vec![2 * n; 2]],
    })
}

/// The numbered constant-length substitution before any letters are
/// identified. Alphabet order: `A1..Am B1..Bm A(m+1)..A(m+n) B(m+1)..B(m+n)`.
pub fn numbered_substitution_unreduced(params: EvenParams) -> Result<DerivedSubstitution> {
    let EvenParams { m, n } = EvenParams::new(params.m, params.n)?;
    let (mu, nu) = (m as usize, n as usize);
    let ell = mu + nu;
    let first: Vec<String> = (1..=mu).map(|i| format!("A{i}")).chain((1..=mu).map(|i| format!("B{i}"))).collect();
    let second: Vec<String> =
        (mu + 1..=ell).map(|i| format!("A{i}")).chain((mu + 1..=ell).map(|i| format!("B{i}"))).collect();
    let labels: Vec<String> = first.iter().chain(&second).cloned().collect();
    let alphabet = Alphabet::new(labels.clone())?;

    let image_of_block = |copies_first: usize, copies_second: usize| -> Vec<String> {
        let mut v = Vec::new();
        for _ in 0..copies_first {
            v.extend_from_slice(&first);
        }
        for _ in 0..copies_second {
            v.extend_from_slice(&second);
        }
        v
    };
    let first_img = image_of_block(mu, mu);
    let second_img = image_of_block(nu, nu);

    let mut rules = Vec::with_capacity(labels.len());
    for (k, _) in first.iter().enumerate() {
        rules.push(word(&alphabet, &first_img[k * ell..(k + 1) * ell]));
    }
    for (k, _) in second.iter().enumerate() {
        rules.push(word(&alphabet, &second_img[k * ell..(k + 1) * ell]));
    }
    let block_expansion =
        labels.iter().map(|l| if l.starts_with('A') { vec![2 * m; 2] } else { vec![2 * n; 2] }).collect();
    let sub = Substitution::new(format!("numbered({m},{n})"), alphabet, rules)?;
    Ok(DerivedSubstitution { kind: DerivedKind::Numbered, params, sub, block_expansion })
}

/// The numbered substitution of constant length `m + n` with `A(m+1)`
/// identified with `A1` (both letters have the same image).
pub fn numbered_substitution(params: EvenParams) -> Result<DerivedSubstitution> {
    let full = numbered_substitution_unreduced(params)?;
    let keep = full.sub.letter("A1")?;
    let drop = full.sub.letter(&format!("A{}", params.m + 1))?;
    identify(full, keep, drop)
}

/// Merges `drop` into `keep`. The two letters must have equal images.
fn identify(d: DerivedSubstitution, keep: Letter, drop: Letter) -> Result<DerivedSubstitution> {
    let sub = &d.sub;
    if sub.image(keep) != sub.image(drop) || d.expansion(keep) != d.expansion(drop) {
        return Err(Error::Inconsistent(format!(
            "cannot identify `{}` with `{}`: different images",
            sub.label(keep),
            sub.label(drop)
        )));
    }
    let remap = |l: Letter| -> Letter {
        let l = if l == drop { keep } else { l };
        if l.index() > drop.index() {
            Letter(l.0 - 1)
        } else {
            l
        }
    };
    let labels: Vec<String> =
        sub.alphabet().letters().filter(|&l| l != drop).map(|l| sub.label(l).to_string()).collect();
    let rules: Vec<Word> = sub
        .alphabet()
        .letters()
        .filter(|&l| l != drop)
        .map(|l| sub.image(l).iter().map(|&x| remap(x)).collect())
        .collect();
    let block_expansion =
        sub.alphabet().letters().filter(|&l| l != drop).map(|l| d.block_expansion[l.index()].clone()).collect();
    let sub = Substitution::new(sub.name(), Alphabet::new(labels)?, rules)?;
    Ok(DerivedSubstitution { kind: d.kind, params: d.params, sub, block_expansion })
}

/// Paired substitution before `a1 = b1` is identified: alphabet
/// `a1..am b1..bn`, `a1..am ↦ (a1..am)^m (b1..bn)^m`,
/// `b1..bn ↦ (a1..am)^n (b1..bn)^n`, cut into blocks of `m + n`.
fn paired(params: EvenParams) -> Result<DerivedSubstitution> {
    let EvenParams { m, n } = params;
    let (mu, nu) = (m as usize, n as usize);
    let ell = mu + nu;
    let a: Vec<String> = (1..=mu).map(|i| format!("a{i}")).collect();
    let b: Vec<String> = (1..=nu).map(|i| format!("b{i}")).collect();
    let alphabet = Alphabet::new(a.iter().chain(&b).cloned())?;
    let block = |ca: usize, cb: usize| -> Vec<String> {
        let mut v = Vec::new();
        for _ in 0..ca {
            v.extend_from_slice(&a);
        }
        for _ in 0..cb {
            v.extend_from_slice(&b);
        }
        v
    };
    let a_img = block(mu, mu);
    let b_img = block(nu, nu);
    let mut rules = Vec::new();
    for k in 0..mu {
        rules.push(word(&alphabet, &a_img[k * ell..(k + 1) * ell]));
    }
    for k in 0..nu {
        rules.push(word(&alphabet, &b_img[k * ell..(k + 1) * ell]));
    }

    // a_k pairs letters 2k-1, 2k of A^m B^m (each A = pp, B = qq); b_k
    // likewise inside A^n B^n.
    let (p, q) = (2 * m, 2 * n);
    let atoms = |half: usize, k: usize| -> Vec<u32> {
        [2 * k, 2 * k + 1].iter().flat_map(|&i| if i < half { [p, p] } else { [q, q] }).collect()
    };
    let block_expansion = (0..mu).map(|k| atoms(mu, k)).chain((0..nu).map(|k| atoms(nu, k))).collect();
    let sub = Substitution::new(String::new(), alphabet, rules)?;
    Ok(DerivedSubstitution { kind: DerivedKind::Theta, params, sub, block_expansion })
}

/// `θ` for `n > 1`, over `a1..am b2..bn`.
pub fn theta(params: EvenParams) -> Result<DerivedSubstitution> {
    let params = EvenParams::new(params.m, params.n)?;
    if params.n < 2 {
        return Err(Error::InvalidParameters("theta needs n > 1; use theta_tilde for n = 1".into()));
    }
    let d = paired(params)?;
    let keep = d.sub.letter("a1")?;
    let drop = d.sub.letter("b1")?;
    let mut d = identify(d, keep, drop)?;
    d.sub = d.sub.with_name(format!("theta({},{})", params.m, params.n));
    d.kind = DerivedKind::Theta;
    Ok(d)
}

/// `θ̃` for `n = 1`, over `a1..am b1`.
pub fn theta_tilde(m: u32) -> Result<DerivedSubstitution> {
    let params = EvenParams::new(m, 1)?;
    let mut d = paired(params)?;
    d.sub = d.sub.with_name(format!("theta~({m})"));
    d.kind = DerivedKind::ThetaTilde;
    Ok(d)
}

/// `θ` or `θ̃`, whichever applies to `(m, n)`.
pub fn height_one_substitution(params: EvenParams) -> Result<DerivedSubstitution> {
    if params.n == 1 {
        theta_tilde(params.m)
    } else {
        theta(params)
    }
}

pub fn derive(kind: DerivedKind, params: EvenParams) -> Result<DerivedSubstitution> {
    match kind {
        DerivedKind::BlockedSigma => block_substitution(params),
        DerivedKind::Numbered => numbered_substitution(params),
        DerivedKind::Theta => theta(params),
        DerivedKind::ThetaTilde => {
            if params.n != 1 {
                return Err(Error::InvalidParameters("theta-tilde needs n = 1".into()));
            }
            theta_tilde(params.m)
        }
    }
}
