//! Generator alphabets, words, and the marked-group capability.
//!
//! Every concrete group in this crate (free groups, weighted lattices,
//! the Heisenberg group, Sol lattices, the lamplighter-style wreath product
//! and crystallographic groups) implements [`MarkedGroup`]: an identity, a
//! right-multiplication rule for signed generator letters and, through the
//! element type itself, a canonical key. Elements are immutable normal-form
//! values, so the key of an element is the element.

use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("letter index {index} is outside an alphabet of {size} generators")]
    UnknownLetter { index: usize, size: usize },
    #[error("cannot parse letter `{0}`")]
    BadLetter(String),
}

/// A signed generator: `a` is `Letter::pos(0)`, `a⁻¹` is `Letter::neg(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub gen: u16,
    pub inverse: bool,
}

impl Letter {
    pub const fn pos(gen: u16) -> Self {
        Letter { gen, inverse: false }
    }

    pub const fn neg(gen: u16) -> Self {
        Letter { gen, inverse: true }
    }

    pub fn new(index: usize, sign: i8) -> Self {
        assert!(sign == 1 || sign == -1, "letter sign must be ±1");
        Letter { gen: index as u16, inverse: sign < 0 }
    }

    pub fn index(self) -> usize {
        self.gen as usize
    }

    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    #[must_use]
    pub fn inv(self) -> Self {
        Letter { gen: self.gen, inverse: !self.inverse }
    }
}

fn default_name(index: usize) -> String {
    if index < 26 {
        ((b'a' + index as u8) as char).to_string()
    } else {
        format!("g{index}")
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", default_name(self.index()))?;
        if self.inverse {
            write!(f, "-")?;
        }
        Ok(())
    }
}

/// Generator labels. Letters are `(index, ±1)` with index in `0..len()`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenAlphabet {
    names: Vec<String>,
}

impl GenAlphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        GenAlphabet { names: names.into_iter().map(Into::into).collect() }
    }

    /// `a, b, c, …` for `k` generators.
    pub fn standard(k: usize) -> Self {
        GenAlphabet { names: (0..k).map(default_name).collect() }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// All `2k` letters in the fixed order `a, a⁻¹, b, b⁻¹, …`.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.names.len() as u16).flat_map(|g| [Letter::pos(g), Letter::neg(g)])
    }

    pub fn check(&self, letter: Letter) -> Result<(), GroupError> {
        if letter.index() < self.names.len() {
            Ok(())
        } else {
            Err(GroupError::UnknownLetter { index: letter.index(), size: self.names.len() })
        }
    }

    /// Parses `a`, `a-`, `A` (upper case is the inverse) or `a^-1`.
    pub fn parse_letter(&self, token: &str) -> Result<Letter, GroupError> {
        let (base, inverse) = if let Some(b) = token.strip_suffix("^-1") {
            (b.to_string(), true)
        } else if let Some(b) = token.strip_suffix('-') {
            (b.to_string(), true)
        } else if token.len() == 1 && token.chars().all(|c| c.is_ascii_uppercase()) {
            (token.to_ascii_lowercase(), true)
        } else {
            (token.to_string(), false)
        };
        let index = self.names.iter().position(|n| *n == base).ok_or_else(|| GroupError::BadLetter(token.to_string()))?;
        Ok(Letter { gen: index as u16, inverse })
    }

    /// Whitespace-separated letters, e.g. `"a b- a"`.
    pub fn parse_word(&self, text: &str) -> Result<Word, GroupError> {
        text.split_whitespace().map(|t| self.parse_letter(t)).collect()
    }

    pub fn letter_name(&self, letter: Letter) -> String {
        let base = self.names.get(letter.index()).cloned().unwrap_or_else(|| default_name(letter.index()));
        if letter.inverse {
            format!("{base}-")
        } else {
            base
        }
    }

    pub fn format_word(&self, w: &Word) -> String {
        w.letters().iter().map(|&l| self.letter_name(l)).collect::<Vec<_>>().join(" ")
    }
}

/// A finite sequence of signed letters. Weights, when any, live in the group.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// `letter^exp`, with negative exponents giving the inverse letter.
    pub fn power(letter: Letter, exp: i64) -> Self {
        let l = if exp < 0 { letter.inv() } else { letter };
        Word(vec![l; exp.unsigned_abs() as usize])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn push(&mut self, letter: Letter) {
        self.0.push(letter);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    /// Reverse the word and invert every letter.
    #[must_use]
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    #[must_use]
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Cancel adjacent `x x⁻¹` pairs.
    #[must_use]
    pub fn freely_reduced(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Apply a letter substitution (used for automorphisms that permute letters).
    #[must_use]
    pub fn map_letters(&self, f: impl Fn(Letter) -> Letter) -> Word {
        Word(self.0.iter().map(|&l| f(l)).collect())
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Word {
        Word(self.0[range].to_vec())
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for Word {
    type Err = GroupError;

    /// Parses with the default names `a, b, c, …`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GenAlphabet::standard(26).parse_word(s)
    }
}

/// A group together with a finite symmetric generating set.
///
/// The element type is its own canonical key: two elements are equal exactly
/// when they represent the same group element.
pub trait MarkedGroup {
    type Element: Clone + Eq + Hash + Ord + fmt::Debug + fmt::Display + Serialize;

    fn alphabet(&self) -> &GenAlphabet;

    fn identity(&self) -> Self::Element;

    /// Right multiplication `g · letter`.
    fn mul_letter(&self, g: &Self::Element, letter: Letter) -> Self::Element;

    /// Weight of a letter in the word metric; `1` for ordinary generating sets.
    fn weight(&self, _letter: Letter) -> u64 {
        1
    }

    fn is_weighted(&self) -> bool {
        false
    }

    fn mul_word(&self, g: &Self::Element, w: &Word) -> Result<Self::Element, GroupError> {
        let alphabet = self.alphabet();
        let mut cur = g.clone();
        for &l in w.letters() {
            alphabet.check(l)?;
            cur = self.mul_letter(&cur, l);
        }
        Ok(cur)
    }

    /// Product of the letters of `w`, in order, starting from the identity.
    fn evaluate(&self, w: &Word) -> Result<Self::Element, GroupError> {
        self.mul_word(&self.identity(), w)
    }

    /// Total weight of a word.
    fn word_weight(&self, w: &Word) -> u64 {
        w.letters().iter().map(|&l| self.weight(l)).sum()
    }
}

/// Reduced word of a free group, the canonical form of its element.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct FreeElement(pub Vec<Letter>);

impl fmt::Display for FreeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        write!(f, "{}", Word::new(self.0.clone()))
    }
}

/// The free group `F_k` on its basis.
#[derive(Debug, Clone)]
pub struct FreeGroup {
    alphabet: GenAlphabet,
}

impl FreeGroup {
    pub fn new(rank: usize) -> Self {
        FreeGroup { alphabet: GenAlphabet::standard(rank) }
    }

    pub fn rank(&self) -> usize {
        self.alphabet.len()
    }
}

impl MarkedGroup for FreeGroup {
    type Element = FreeElement;

    fn alphabet(&self) -> &GenAlphabet {
        &self.alphabet
    }

    fn identity(&self) -> FreeElement {
        FreeElement::default()
    }

    fn mul_letter(&self, g: &FreeElement, letter: Letter) -> FreeElement {
        let mut v = g.0.clone();
        if v.last() == Some(&letter.inv()) {
            v.pop();
        } else {
            v.push(letter);
        }
        FreeElement(v)
    }
}

/// `ℤⁿ` on its standard basis, elements as coordinate vectors.
#[derive(Debug, Clone)]
pub struct FreeAbelian {
    alphabet: GenAlphabet,
}

impl FreeAbelian {
    pub fn new(rank: usize) -> Self {
        FreeAbelian { alphabet: GenAlphabet::standard(rank) }
    }
}

/// Lattice point, rendered as `(x,y,…)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<i64>);

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl MarkedGroup for FreeAbelian {
    type Element = Point;

    fn alphabet(&self) -> &GenAlphabet {
        &self.alphabet
    }

    fn identity(&self) -> Point {
        Point(vec![0; self.alphabet.len()])
    }

    fn mul_letter(&self, g: &Point, letter: Letter) -> Point {
        let mut v = g.0.clone();
        v[letter.index()] += letter.sign();
        Point(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_inverse_examples() {
        let ab: Word = "a b".parse().unwrap();
        assert_eq!(ab.inverse().to_string(), "b- a-");
        assert_eq!(Word::empty().inverse(), Word::empty());
        assert_eq!(ab.inverse().inverse(), ab);
    }

    #[test]
    fn evaluate_empty_and_inverse() {
        let z2 = FreeAbelian::new(2);
        assert_eq!(z2.evaluate(&Word::empty()).unwrap(), z2.identity());
        let w: Word = "a a b- a".parse().unwrap();
        assert_eq!(z2.evaluate(&w.concat(&w.inverse())).unwrap(), z2.identity());
        assert_eq!(z2.evaluate(&w).unwrap(), Point(vec![3, -1]));
    }

    #[test]
    fn unknown_letter_is_rejected() {
        let z2 = FreeAbelian::new(2);
        let w = Word::new(vec![Letter::pos(2)]);
        assert_eq!(z2.evaluate(&w), Err(GroupError::UnknownLetter { index: 2, size: 2 }));
    }

    #[test]
    fn parse_letter_forms() {
        let alpha = GenAlphabet::standard(2);
        assert_eq!(alpha.parse_letter("a").unwrap(), Letter::pos(0));
        assert_eq!(alpha.parse_letter("b-").unwrap(), Letter::neg(1));
        assert_eq!(alpha.parse_letter("B").unwrap(), Letter::neg(1));
        assert_eq!(alpha.parse_letter("a^-1").unwrap(), Letter::neg(0));
        assert!(alpha.parse_letter("c").is_err());
        assert_eq!(alpha.format_word(&"a b-".parse().unwrap()), "a b-");
    }

    #[test]
    fn free_group_reduces() {
        let f2 = FreeGroup::new(2);
        let w: Word = "a b b- a-".parse().unwrap();
        assert_eq!(f2.evaluate(&w).unwrap(), f2.identity());
        assert_eq!(Word::new(vec![Letter::pos(0), Letter::neg(0)]).freely_reduced(), Word::empty());
    }

    #[test]
    fn letters_are_ordered_and_involutive() {
        let alpha = GenAlphabet::standard(2);
        let ls: Vec<Letter> = alpha.letters().collect();
        assert_eq!(ls, vec![Letter::pos(0), Letter::neg(0), Letter::pos(1), Letter::neg(1)]);
        for l in ls {
            assert_eq!(l.inv().inv(), l);
            assert_ne!(l.inv(), l);
        }
    }
}
