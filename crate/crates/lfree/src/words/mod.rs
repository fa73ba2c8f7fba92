//! Words in free products of cyclic groups, and Leinert-set checks.
//!
//! A [`GroupPresentation`] is a list of cyclic factors, each either infinite
//! (`Z`) or finite of order `k >= 2` (`C<k>`). Elements of the free product
//! are kept in reduced normal form: a sequence of syllables with nonzero
//! exponents, adjacent syllables from distinct factors, and exponents of a
//! finite factor of order `k` normalized into `1..k`. Equality of reduced
//! words is therefore literal equality of syllable sequences.

use serde::Serialize;
use std::fmt;
use thiserror::Error;

mod folding;
mod leinert;
mod wordlist;

pub use leinert::{
    leinert_bounded, leinert_exact, verify_witness, LeinertMethod, LeinertStatus, LeinertVerdict,
};
pub use wordlist::{parse_word_list, WordList, WordListEntry};

pub(crate) use folding::subgroup_rank;

/// Errors from parsing, word arithmetic, and Leinert checks.
#[derive(Debug, Error)]
pub enum WordError {
    #[error("group presentation needs at least one factor")]
    EmptyPresentation,
    #[error("bad factor spec `{spec}`: expected `Z` or `C<k>` with k >= 2, optionally `name:`-prefixed")]
    BadFactorSpec { spec: String },
    #[error("factor names must be distinct lowercase ascii letters, got `{name}`")]
    BadFactorName { name: String },
    #[error("unknown generator symbol `{symbol}`")]
    UnknownSymbol { symbol: char },
    #[error("factor index {index} out of range for presentation with {count} factors")]
    FactorOutOfRange { index: usize, count: usize },
    #[error("word list is empty")]
    EmptyWordList,
    #[error("word list has no `group:` header line")]
    MissingGroupHeader,
    #[error("word set contains a duplicate: `{word}`")]
    DuplicateWord { word: String },
    #[error("word set is empty")]
    EmptyWordSet,
    #[error("search depth must be at least 1")]
    InvalidDepth,
    #[error("exact Leinert check requires a free group (all factors infinite)")]
    FiniteOrderFactor,
    #[error("exact Leinert check needs at least two words")]
    TooFewWords,
    #[error(
        "set is not Leinert but no witness of at most {cap} letter pairs exists; \
         rerun the bounded search with a larger depth to extract one"
    )]
    WitnessSearchExhausted { cap: usize },
}

/// Order of one cyclic factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FactorOrder {
    /// Infinite cyclic, `Z`.
    Infinite,
    /// Finite cyclic of the given order, at least 2.
    Finite(u32),
}

/// One cyclic factor: a single-letter generator name plus its order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Factor {
    name: char,
    order: FactorOrder,
}

impl Factor {
    /// Infinite cyclic factor generated by `name`.
    pub fn infinite(name: char) -> Self {
        Factor { name, order: FactorOrder::Infinite }
    }

    /// Finite cyclic factor of order `k` generated by `name`.
    pub fn finite(name: char, k: u32) -> Self {
        Factor { name, order: FactorOrder::Finite(k) }
    }

    pub fn name(&self) -> char {
        self.name
    }

    pub fn order(&self) -> FactorOrder {
        self.order
    }
}

/// A free product of cyclic groups, one generator per factor.
///
/// Generator names are lowercase ascii letters; the uppercase letter denotes
/// the inverse generator in word syntax.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupPresentation {
    factors: Vec<Factor>,
}

impl GroupPresentation {
    pub fn new(factors: Vec<Factor>) -> Result<Self, WordError> {
        if factors.is_empty() {
            return Err(WordError::EmptyPresentation);
        }
        let mut seen = [false; 26];
        for f in &factors {
            if !f.name.is_ascii_lowercase() {
                return Err(WordError::BadFactorName { name: f.name.to_string() });
            }
            let slot = (f.name as u8 - b'a') as usize;
            if seen[slot] {
                return Err(WordError::BadFactorName { name: f.name.to_string() });
            }
            seen[slot] = true;
            if let FactorOrder::Finite(k) = f.order {
                if k < 2 {
                    return Err(WordError::BadFactorSpec { spec: format!("C{k}") });
                }
            }
        }
        Ok(GroupPresentation { factors })
    }

    /// Free group of the given rank with generators `a, b, c, ...`.
    pub fn free(rank: usize) -> Self {
        assert!(rank >= 1 && rank <= 26, "free rank must be in 1..=26");
        let factors = (0..rank)
            .map(|i| Factor::infinite((b'a' + i as u8) as char))
            .collect();
        GroupPresentation { factors }
    }

    /// Parses a comma-separated factor spec such as `Z,Z` or `Z,C2`.
    ///
    /// Each entry is `Z` or `C<k>`, optionally prefixed `name:` to pick the
    /// generator letter; unnamed factors take the first free letter in
    /// alphabetical order.
    pub fn parse(spec: &str) -> Result<Self, WordError> {
        let mut parsed: Vec<(Option<char>, FactorOrder)> = Vec::new();
        for raw in spec.split(',') {
            let entry = raw.trim();
            if entry.is_empty() {
                return Err(WordError::BadFactorSpec { spec: raw.to_string() });
            }
            let (name, body) = match entry.split_once(':') {
                Some((n, b)) => {
                    let n = n.trim();
                    let mut chars = n.chars();
                    let c = chars.next().ok_or(WordError::BadFactorName { name: n.to_string() })?;
                    if chars.next().is_some() {
                        return Err(WordError::BadFactorName { name: n.to_string() });
                    }
                    (Some(c), b.trim())
                }
                None => (None, entry),
            };
            let order = if body == "Z" {
                FactorOrder::Infinite
            } else if let Some(num) = body.strip_prefix('C') {
                let k: u32 = num
                    .parse()
                    .map_err(|_| WordError::BadFactorSpec { spec: entry.to_string() })?;
                if k < 2 {
                    return Err(WordError::BadFactorSpec { spec: entry.to_string() });
                }
                FactorOrder::Finite(k)
            } else {
                return Err(WordError::BadFactorSpec { spec: entry.to_string() });
            };
            parsed.push((name, order));
        }
        let mut taken = [false; 26];
        for (name, _) in parsed.iter().flat_map(|(n, o)| n.map(|c| (c, o))) {
            if !name.is_ascii_lowercase() {
                return Err(WordError::BadFactorName { name: name.to_string() });
            }
            taken[(name as u8 - b'a') as usize] = true;
        }
        let mut factors = Vec::with_capacity(parsed.len());
        for (name, order) in parsed {
            let name = match name {
                Some(c) => c,
                None => {
                    let slot = taken
                        .iter()
                        .position(|t| !t)
                        .ok_or(WordError::BadFactorName { name: "*".into() })?;
                    taken[slot] = true;
                    (b'a' + slot as u8) as char
                }
            };
            factors.push(Factor { name, order });
        }
        GroupPresentation::new(factors)
    }

    /// Renders the presentation string this parses from, e.g. "Z,C3".
    pub fn spec_string(&self) -> String {
        let default_names: Vec<char> =
            (0..self.factors.len()).map(|i| (b'a' + i as u8) as char).collect();
        self.factors
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let body = match f.order {
                    FactorOrder::Infinite => "Z".to_string(),
                    FactorOrder::Finite(k) => format!("C{k}"),
                };
                if f.name == default_names[i] {
                    body
                } else {
                    format!("{}:{}", f.name, body)
                }
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn factor(&self, index: usize) -> Result<&Factor, WordError> {
        self.factors
            .get(index)
            .ok_or(WordError::FactorOutOfRange { index, count: self.factors.len() })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// True when every factor is infinite cyclic.
    pub fn is_free_group(&self) -> bool {
        self.factors.iter().all(|f| f.order == FactorOrder::Infinite)
    }

    fn index_of(&self, name: char) -> Option<usize> {
        self.factors.iter().position(|f| f.name == name)
    }

    /// Reduces `exp` for the given factor; `None` means the syllable vanishes.
    fn normalize_exponent(&self, factor: usize, exp: i64) -> Option<i64> {
        match self.factors[factor].order {
            FactorOrder::Infinite => (exp != 0).then_some(exp),
            FactorOrder::Finite(k) => {
                let r = exp.rem_euclid(k as i64);
                (r != 0).then_some(r)
            }
        }
    }

    /// Letters needed to spell one syllable geodesically.
    fn syllable_length(&self, s: &Syllable) -> u64 {
        match self.factors[s.factor].order {
            FactorOrder::Infinite => s.exponent.unsigned_abs(),
            FactorOrder::Finite(k) => {
                let e = s.exponent as u64;
                e.min(k as u64 - e)
            }
        }
    }

    /// The single-generator word for factor `index`.
    pub fn generator(&self, index: usize) -> Result<ReducedWord, WordError> {
        self.factor(index)?;
        Ok(ReducedWord { syllables: vec![Syllable { factor: index, exponent: 1 }] })
    }

    /// Parses word syntax: lowercase letter = generator, uppercase = inverse,
    /// ascii whitespace ignored, empty input = identity.
    pub fn parse_word(&self, text: &str) -> Result<ReducedWord, WordError> {
        let mut stack: Vec<Syllable> = Vec::new();
        for ch in text.chars() {
            if ch.is_ascii_whitespace() {
                continue;
            }
            let (name, exp) = if ch.is_ascii_lowercase() {
                (ch, 1)
            } else if ch.is_ascii_uppercase() {
                (ch.to_ascii_lowercase(), -1)
            } else {
                return Err(WordError::UnknownSymbol { symbol: ch });
            };
            let factor = self.index_of(name).ok_or(WordError::UnknownSymbol { symbol: ch })?;
            self.push_syllable(&mut stack, factor, exp);
        }
        Ok(ReducedWord { syllables: stack })
    }

    /// Like [`Self::parse_word`] but also accepts the token `1` for the
    /// identity, the spelling used in word lists and reports where an empty
    /// field would be invisible.
    pub fn parse_word_token(&self, text: &str) -> Result<ReducedWord, WordError> {
        if text.trim() == "1" {
            Ok(ReducedWord::identity())
        } else {
            self.parse_word(text)
        }
    }

    /// Renders a word as a non-empty token: the identity becomes `1`.
    pub fn render_token(&self, word: &ReducedWord) -> String {
        if word.is_identity() {
            "1".to_string()
        } else {
            self.render(word)
        }
    }

    /// Renders a word back to parseable syntax; the identity is `""`.
    pub fn render(&self, word: &ReducedWord) -> String {
        let mut out = String::new();
        for s in &word.syllables {
            let name = self.factors[s.factor].name;
            if s.exponent >= 0 {
                for _ in 0..s.exponent {
                    out.push(name);
                }
            } else {
                let upper = name.to_ascii_uppercase();
                for _ in 0..(-s.exponent) {
                    out.push(upper);
                }
            }
        }
        out
    }

    fn push_syllable(&self, stack: &mut Vec<Syllable>, factor: usize, exp: i64) {
        let mut exp = exp;
        if let Some(top) = stack.last() {
            if top.factor == factor {
                exp += top.exponent;
                stack.pop();
            }
        }
        if let Some(e) = self.normalize_exponent(factor, exp) {
            stack.push(Syllable { factor, exponent: e });
        }
    }

    /// Product of two reduced words, reduced at the junction.
    pub fn multiply(&self, left: &ReducedWord, right: &ReducedWord) -> ReducedWord {
        let mut stack = left.syllables.clone();
        for s in &right.syllables {
            self.push_syllable(&mut stack, s.factor, s.exponent);
        }
        ReducedWord { syllables: stack }
    }

    /// Group inverse.
    pub fn inverse(&self, word: &ReducedWord) -> ReducedWord {
        let syllables = word
            .syllables
            .iter()
            .rev()
            .map(|s| Syllable {
                factor: s.factor,
                exponent: self
                    .normalize_exponent(s.factor, -s.exponent)
                    .expect("inverse of a nonzero exponent is nonzero"),
            })
            .collect();
        ReducedWord { syllables }
    }

    /// Geodesic word length: letters needed to spell the element.
    pub fn geodesic_len(&self, word: &ReducedWord) -> u64 {
        word.syllables.iter().map(|s| self.syllable_length(s)).sum()
    }

    /// Checks that a word is a valid reduced word over this presentation.
    ///
    /// Words built through this presentation always pass; the check guards
    /// words that cross presentation boundaries.
    pub fn validate(&self, word: &ReducedWord) -> Result<(), WordError> {
        let mut prev: Option<usize> = None;
        for s in &word.syllables {
            self.factor(s.factor)?;
            let normalized = self.normalize_exponent(s.factor, s.exponent);
            if normalized != Some(s.exponent) || prev == Some(s.factor) {
                return Err(WordError::BadFactorSpec {
                    spec: format!("unreduced syllable in {:?}", word),
                });
            }
            prev = Some(s.factor);
        }
        Ok(())
    }
}

/// One maximal run of a single generator inside a reduced word.
///
/// `exponent` is nonzero; for a finite factor of order `k` it lies in `1..k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Syllable {
    pub factor: usize,
    pub exponent: i64,
}

/// An element of the free product in reduced normal form.
///
/// Ordering is lexicographic on syllables; it exists to make iteration over
/// word-keyed maps deterministic and carries no group meaning.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ReducedWord {
    syllables: Vec<Syllable>,
}

impl ReducedWord {
    /// The empty word.
    pub fn identity() -> Self {
        ReducedWord { syllables: Vec::new() }
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn num_syllables(&self) -> usize {
        self.syllables.len()
    }

    /// Builds a word from raw syllables, reducing as needed.
    pub fn from_syllables<I>(pres: &GroupPresentation, syllables: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = (usize, i64)>,
    {
        let mut stack = Vec::new();
        for (factor, exp) in syllables {
            pres.factor(factor)?;
            pres.push_syllable(&mut stack, factor, exp);
        }
        Ok(ReducedWord { syllables: stack })
    }
}

impl fmt::Display for ReducedWord {
    /// Presentation-free display: `factor^exp` pairs, `e` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "e");
        }
        for (i, s) in self.syllables.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "g{}^{}", s.factor, s.exponent)?;
        }
        Ok(())
    }
}
