//! Letters, alphabets and finite words.

use std::fmt;
use std::ops::{Deref, Index};
use std::slice::SliceIndex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A letter, identified by its dense index inside an [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Letter(pub u32);

impl Letter {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for Letter {
    fn from(i: usize) -> Self {
        Letter(i as u32)
    }
}

/// An ordered list of distinct letter labels. Ids are `0..len()`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Alphabet {
    labels: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidSubstitution("empty alphabet".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || l.chars().any(char::is_whitespace) {
                return Err(Error::InvalidSubstitution(format!(
                    "label `{l}` must be nonempty and contain no whitespace"
                )));
            }
            if labels[..i].contains(l) {
                return Err(Error::InvalidSubstitution(format!("duplicate label `{l}`")));
            }
        }
        Ok(Alphabet { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, letter: Letter) -> &str {
        &self.labels[letter.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn letter(&self, label: &str) -> Result<Letter> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(Letter::from)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.labels.len()).map(Letter::from)
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter.index() < self.labels.len()
    }

    pub fn check(&self, letter: Letter) -> Result<()> {
        if self.contains(letter) {
            Ok(())
        } else {
            Err(Error::UnknownLetter { id: letter.index(), size: self.len() })
        }
    }

    /// Parses a whitespace separated list of labels.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        s.split_whitespace().map(|t| self.letter(t)).collect()
    }

    /// Space separated labels of `w`.
    pub fn render(&self, w: &[Letter]) -> String {
        let mut out = String::new();
        for (i, &l) in w.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(self.label(l));
        }
        out
    }
}

/// A finite word. May be empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn from_ids<I: IntoIterator<Item = usize>>(ids: I) -> Self {
        ids.into_iter().map(Letter::from).collect()
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l)
    }

    pub fn extend_from_slice(&mut self, w: &[Letter]) {
        self.0.extend_from_slice(w)
    }

    pub fn truncate(&mut self, n: usize) {
        self.0.truncate(n)
    }

    pub fn into_vec(self) -> Vec<Letter> {
        self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl Deref for Word {
    type Target = [Letter];
    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl<I: SliceIndex<[Letter]>> Index<I> for Word {
    type Output = I::Output;
    fn index(&self, i: I) -> &I::Output {
        &self.0[i]
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<T: IntoIterator<Item = Letter>>(iter: T) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl IntoIterator for Word {
    type Item = Letter;
    type IntoIter = std::vec::IntoIter<Letter>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a Word {
    type Item = &'a Letter;
    type IntoIter = std::slice::Iter<'a, Letter>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "#{}", l.0)?;
        }
        Ok(())
    }
}
