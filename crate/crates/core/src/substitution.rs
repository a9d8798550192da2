//! Substitution rules over a finite alphabet.
//!
//! Two serialisations are supported. The text form has one rule per line,
//!
//! ```text
//! # name: theta~(2)
//! a1 -> a1 a2 a1
//! a2 -> a2 b1 b1
//! b1 -> a1 a2 b1
//! ```
//!
//! where the rule order fixes the alphabet order. The JSON form is
//! `{"name": .., "alphabet": [..], "rules": {"a1": ["a1", ..], ..}}`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::word::{Alphabet, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Substitution {
    name: String,
    alphabet: Alphabet,
    rules: Vec<Word>,
}

impl Substitution {
    pub fn new(name: impl Into<String>, alphabet: Alphabet, rules: Vec<Word>) -> Result<Self> {
        if rules.len() != alphabet.len() {
            return Err(Error::InvalidSubstitution(format!(
                "{} rules for an alphabet of {} letters",
                rules.len(),
                alphabet.len()
            )));
        }
        for (i, img) in rules.iter().enumerate() {
            if img.is_empty() {
                return Err(Error::InvalidSubstitution(format!(
                    "image of `{}` is empty",
                    alphabet.label(Letter::from(i))
                )));
            }
            for &l in img.iter() {
                alphabet.check(l)?;
            }
        }
        Ok(Substitution { name: name.into(), alphabet, rules })
    }

    /// Builds a substitution from `(label, image labels)` pairs; the pair
    /// order fixes the alphabet order.
    pub fn from_labels<S: AsRef<str>>(name: &str, rules: &[(S, &[S])]) -> Result<Self> {
        let alphabet = Alphabet::new(rules.iter().map(|(l, _)| l.as_ref().to_string()))?;
        let images = rules
            .iter()
            .map(|(_, img)| img.iter().map(|t| alphabet.letter(t.as_ref())).collect())
            .collect::<Result<Vec<Word>>>()?;
        Substitution::new(name, alphabet, images)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn image(&self, l: Letter) -> &Word {
        &self.rules[l.index()]
    }

    pub fn rules(&self) -> &[Word] {
        &self.rules
    }

    pub fn letter(&self, label: &str) -> Result<Letter> {
        self.alphabet.letter(label)
    }

    pub fn label(&self, l: Letter) -> &str {
        self.alphabet.label(l)
    }

    /// Image of a word: the concatenation of the letter images.
    pub fn apply(&self, w: &[Letter]) -> Result<Word> {
        let mut out = Word::new();
        for &l in w {
            self.alphabet.check(l)?;
            out.extend_from_slice(self.image(l));
        }
        Ok(out)
    }

    /// `self` applied `k` times.
    pub fn apply_n(&self, w: &[Letter], k: usize) -> Result<Word> {
        let mut cur = Word::from(w.to_vec());
        for _ in 0..k {
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }

    /// The composite `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Substitution) -> Result<Substitution> {
        if self.alphabet != other.alphabet {
            return Err(Error::InvalidSubstitution("alphabets differ".into()));
        }
        let rules = other.rules.iter().map(|img| self.apply(img)).collect::<Result<_>>()?;
        Substitution::new(format!("{}∘{}", self.name, other.name), self.alphabet.clone(), rules)
    }

    /// Entry `(i, j)` counts the occurrences of `j` in the image of `i`.
    pub fn matrix(&self) -> SquareMatrix {
        let r = self.size();
        let mut m = SquareMatrix::zeros(r);
        for (i, img) in self.rules.iter().enumerate() {
            for &l in img.iter() {
                m.set(i, l.index(), m.get(i, l.index()) + 1);
            }
        }
        m
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.rules.iter().map(|w| w.len()).collect()
    }

    /// The common image length, if all images have the same length.
    pub fn constant_length(&self) -> Option<usize> {
        let l = self.rules[0].len();
        self.rules.iter().all(|w| w.len() == l).then_some(l)
    }

    pub(crate) fn require_constant_length(&self) -> Result<usize> {
        self.constant_length().ok_or(Error::NotConstantLength)
    }

    /// Whether some power of the substitution matrix is strictly positive.
    /// Checks powers up to Wielandt's bound `(r-1)^2 + 1`.
    pub fn is_primitive(&self) -> bool {
        self.primitivity_witness().is_some()
    }

    /// Smallest `k` with `M^k > 0`, if any.
    pub fn primitivity_witness(&self) -> Option<usize> {
        let r = self.size();
        let bound = (r - 1) * (r - 1) + 1;
        let base = self.matrix().pattern();
        let mut p = base.clone();
        for k in 1..=bound {
            if p.all_positive() {
                return Some(k);
            }
            p = p.product(&base);
        }
        None
    }

    /// Whether the image of `seed` starts with `seed`.
    pub fn is_prefix_stable(&self, seed: Letter) -> bool {
        self.alphabet.contains(seed) && self.image(seed)[0] == seed
    }

    /// First prefix-stable letter in alphabet order.
    pub fn default_seed(&self) -> Option<Letter> {
        self.alphabet.letters().find(|&l| self.is_prefix_stable(l))
    }

    /// First `n` letters of the one-sided fixed point starting with `seed`.
    pub fn fixed_point_prefix(&self, seed: Letter, n: usize) -> Result<Word> {
        self.alphabet.check(seed)?;
        if !self.is_prefix_stable(seed) {
            return Err(Error::SeedNotPrefixStable {
                seed: self.label(seed).to_string(),
                first: self.label(self.image(seed)[0]).to_string(),
            });
        }
        let mut w = Word::from(vec![seed]);
        if self.image(seed).len() == 1 {
            // seed ↦ seed: the fixed point is constant.
            return Ok(std::iter::repeat_n(seed, n).collect());
        }
        while w.len() < n {
            // Only the part that can still matter is expanded.
            let mut next = Word::new();
            for &l in w.iter() {
                next.extend_from_slice(self.image(l));
                if next.len() >= n {
                    break;
                }
            }
            w = next;
        }
        w.truncate(n);
        Ok(w)
    }

    /// Canonical text serialisation, one `label -> image` line per letter.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, img) in self.rules.iter().enumerate() {
            out.push_str(self.alphabet.label(Letter::from(i)));
            out.push_str(" -> ");
            out.push_str(&self.alphabet.render(img));
            out.push('\n');
        }
        out
    }

    /// Parses the text rule format. Blank lines and `#` comments are
    /// skipped; a `# name: ...` comment sets the name.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut name = String::from("unnamed");
        let mut heads: Vec<(usize, String)> = Vec::new();
        let mut bodies: Vec<Vec<String>> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(n) = comment.trim().strip_prefix("name:") {
                    name = n.trim().to_string();
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| Error::Parse { line: lineno + 1, message: "expected `letter -> letters`".into() })?;
            let lhs = lhs.trim();
            if lhs.is_empty() || lhs.contains(char::is_whitespace) {
                return Err(Error::Parse { line: lineno + 1, message: format!("bad letter `{lhs}`") });
            }
            heads.push((lineno + 1, lhs.to_string()));
            bodies.push(rhs.split_whitespace().map(str::to_string).collect());
        }
        let alphabet = Alphabet::new(heads.iter().map(|(_, l)| l.clone()))?;
        let rules = heads
            .iter()
            .zip(&bodies)
            .map(|((line, _), body)| {
                body.iter()
                    .map(|t| {
                        alphabet
                            .letter(t)
                            .map_err(|_| Error::Parse { line: *line, message: format!("unknown letter `{t}`") })
                    })
                    .collect::<Result<Word>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Substitution::new(name, alphabet, rules)
    }

    pub fn to_json(&self) -> SubstitutionJson {
        SubstitutionJson {
            name: self.name.clone(),
            alphabet: self.alphabet.labels().to_vec(),
            rules: self
                .rules
                .iter()
                .enumerate()
                .map(|(i, img)| {
                    (
                        self.alphabet.label(Letter::from(i)).to_string(),
                        img.iter().map(|&l| self.alphabet.label(l).to_string()).collect(),
                    )
                })
                .collect(),
        }
    }

    pub fn from_json(j: &SubstitutionJson) -> Result<Self> {
        let alphabet = Alphabet::new(j.alphabet.iter().cloned())?;
        if j.rules.len() != alphabet.len() {
            return Err(Error::InvalidSubstitution("rules and alphabet disagree".into()));
        }
        let rules = alphabet
            .labels()
            .iter()
            .map(|l| {
                let img = j.rules.get(l).ok_or_else(|| Error::InvalidSubstitution(format!("no rule for `{l}`")))?;
                img.iter().map(|t| alphabet.letter(t)).collect::<Result<Word>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Substitution::new(j.name.clone(), alphabet, rules)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Serde mirror of the JSON substitution form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstitutionJson {
    #[serde(default)]
    pub name: String,
    pub alphabet: Vec<String>,
    pub rules: BTreeMap<String, Vec<String>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn theta_tilde_2() -> Substitution {
        Substitution::from_text("a1 -> a1 a2 a1\na2 -> a2 b1 b1\nb1 -> a1 a2 b1\n").unwrap()
    }

    fn sigma(m: usize, n: usize) -> Substitution {
        let a = Alphabet::new(["A", "B"]).unwrap();
        let img = |k: usize| Word::from_ids(std::iter::repeat_n(0, k).chain(std::iter::repeat_n(1, k)));
        Substitution::new("sigma", a, vec![img(m), img(n)]).unwrap()
    }

    #[test]
    fn apply_examples() {
        let t = theta_tilde_2();
        let a1 = t.letter("a1").unwrap();
        assert_eq!(t.alphabet().render(&t.apply(&[a1]).unwrap()), "a1 a2 a1");
        assert!(t.apply(&[]).unwrap().is_empty());
        assert!(matches!(t.apply(&[Letter(7)]), Err(Error::UnknownLetter { id: 7, size: 3 })));
    }

    #[test]
    fn matrix_examples() {
        assert_eq!(sigma(3, 2).matrix(), SquareMatrix::from_rows(&[[3, 3], [2, 2]]).unwrap());
        assert_eq!(theta_tilde_2().matrix(), SquareMatrix::from_rows(&[[2, 1, 0], [0, 1, 2], [1, 1, 1]]).unwrap());
        let id = Substitution::from_text("a -> a\nb -> b").unwrap();
        assert_eq!(id.matrix(), SquareMatrix::identity(2));
        assert!(!id.is_primitive());
    }

    #[test]
    fn lengths_and_constant_length() {
        let s = sigma(2, 1);
        assert_eq!(s.lengths(), vec![4, 2]);
        assert_eq!(s.constant_length(), None);
        assert_eq!(theta_tilde_2().constant_length(), Some(3));
        let single = Substitution::from_text("a -> a").unwrap();
        assert_eq!(single.lengths(), vec![1]);
        assert_eq!(single.constant_length(), Some(1));
    }

    #[test]
    fn sigma_is_primitive() {
        for m in 1..6 {
            for n in 1..6 {
                assert!(sigma(m, n).is_primitive());
            }
        }
    }

    #[test]
    fn fixed_point_examples() {
        let t = theta_tilde_2();
        let a1 = t.letter("a1").unwrap();
        let w = t.fixed_point_prefix(a1, 9).unwrap();
        assert_eq!(t.alphabet().render(&w), "a1 a2 a1 a2 b1 b1 a1 a2 a1");
        assert!(t.fixed_point_prefix(a1, 0).unwrap().is_empty());

        let s = sigma(2, 1);
        let w = s.fixed_point_prefix(Letter(0), 6).unwrap();
        assert_eq!(s.alphabet().render(&w), "A A B B A A");

        let err = t.fixed_point_prefix(t.letter("b1").unwrap(), 3).unwrap_err();
        assert!(matches!(err, Error::SeedNotPrefixStable { .. }));
    }

    #[test]
    fn text_and_json_forms() {
        let t = theta_tilde_2().with_name("tt2");
        let text = t.to_text();
        assert_eq!(text, "a1 -> a1 a2 a1\na2 -> a2 b1 b1\nb1 -> a1 a2 b1\n");
        assert_eq!(Substitution::from_text(&format!("# name: tt2\n{text}")).unwrap(), t);
        let j = serde_json::to_string(&t.to_json()).unwrap();
        let back: SubstitutionJson = serde_json::from_str(&j).unwrap();
        assert_eq!(Substitution::from_json(&back).unwrap(), t);

        assert!(matches!(Substitution::from_text("a -> a b"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(Substitution::from_text("a a b"), Err(Error::Parse { .. })));
        assert!(Substitution::from_text("a ->").is_err());
    }

    fn arb_substitution() -> impl Strategy<Value = Substitution> {
        (1usize..5).prop_flat_map(|r| {
            prop::collection::vec(prop::collection::vec(0..r, 1..5), r).prop_map(move |rules| {
                let alphabet = Alphabet::new((0..r).map(|i| format!("x{i}"))).unwrap();
                Substitution::new("arb", alphabet, rules.into_iter().map(Word::from_ids).collect()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn morphism_law(s in arb_substitution(), u in prop::collection::vec(0usize..5, 0..8), v in prop::collection::vec(0usize..5, 0..8)) {
            let r = s.size();
            let u = Word::from_ids(u.into_iter().map(|x| x % r));
            let v = Word::from_ids(v.into_iter().map(|x| x % r));
            let whole = s.apply(&u.concat(&v)).unwrap();
            prop_assert_eq!(whole, s.apply(&u).unwrap().concat(&s.apply(&v).unwrap()));
        }

        #[test]
        fn composition_law(s in arb_substitution()) {
            let ss = s.compose(&s).unwrap();
            let m = s.matrix();
            prop_assert_eq!(ss.matrix(), &m * &m);
        }

        #[test]
        fn row_sums_are_lengths(s in arb_substitution()) {
            let sums: Vec<usize> = s.matrix().row_sums().into_iter().map(|v| v as usize).collect();
            prop_assert_eq!(sums, s.lengths());
        }

        #[test]
        fn fixed_point_prefixes_nest(n in 0usize..200, extra in 0usize..200) {
            let t = theta_tilde_2();
            let short = t.fixed_point_prefix(Letter(0), n).unwrap();
            let long = t.fixed_point_prefix(Letter(0), n + extra).unwrap();
            prop_assert_eq!(&long.0[..n], &short.0[..]);
        }

        #[test]
        fn text_round_trip(s in arb_substitution()) {
            let back = Substitution::from_text(&s.to_text()).unwrap();
            prop_assert_eq!(back.rules(), s.rules());
        }
    }
}
