//! Tokenization, feature domains and character n-gram extraction.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Training and scoring parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeliParams {
    /// Longest character n-gram used.
    pub n_max: usize,
    /// Features whose relative frequency is below this are not stored.
    pub cutoff: f64,
    /// Score given to a feature missing from a language model.
    pub penalty: f64,
    /// Whether the whole-word feature domain is trained and consulted.
    pub use_words: bool,
}

impl Default for HeliParams {
    fn default() -> Self {
        HeliParams {
            n_max: 6,
            cutoff: 0.000_000_5,
            penalty: 7.0,
            use_words: true,
        }
    }
}

impl HeliParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_max == 0 {
            return Err(Error::InvalidParams("n_max must be at least 1".into()));
        }
        if !(self.cutoff > 0.0 && self.cutoff < 1.0) {
            return Err(Error::InvalidParams(format!(
                "cutoff must lie strictly between 0 and 1, got {}",
                self.cutoff
            )));
        }
        if !(self.penalty >= 0.0 && self.penalty.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "penalty must be a non-negative number, got {}",
                self.penalty
            )));
        }
        Ok(())
    }

    /// Largest score a stored feature can have: `-log10(cutoff)`.
    pub fn max_score(&self) -> f64 {
        -self.cutoff.log10()
    }

    /// A warning when unseen features could outscore (score lower than)
    /// features that survived the cutoff.
    pub fn penalty_warning(&self) -> Option<String> {
        (self.penalty <= self.max_score()).then(|| {
            format!(
                "penalty {} does not exceed -log10(cutoff) = {:.4}; unseen features may score better than seen ones",
                self.penalty,
                self.max_score()
            )
        })
    }

    /// Feature domains in backoff order: word (if enabled), then n_max down to 1.
    pub fn backoff_order(&self) -> impl Iterator<Item = FeatureDomain> + '_ {
        self.use_words
            .then_some(FeatureDomain::Word)
            .into_iter()
            .chain((1..=self.n_max).rev().map(FeatureDomain::Ngram))
    }

    /// Feature domains in storage order: word (if enabled), then 1 up to n_max.
    pub fn domains(&self) -> impl Iterator<Item = FeatureDomain> + '_ {
        self.use_words
            .then_some(FeatureDomain::Word)
            .into_iter()
            .chain((1..=self.n_max).map(FeatureDomain::Ngram))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureDomain {
    Word,
    Ngram(usize),
}

impl FeatureDomain {
    /// Slot in a per-language domain table: 0 is the word domain, `n` is n-grams of length `n`.
    pub fn slot(self) -> usize {
        match self {
            FeatureDomain::Word => 0,
            FeatureDomain::Ngram(n) => n,
        }
    }
}

impl fmt::Display for FeatureDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureDomain::Word => f.write_str("word"),
            FeatureDomain::Ngram(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for FeatureDomain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "word" {
            return Ok(FeatureDomain::Word);
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(FeatureDomain::Ngram(n)),
            _ => Err(Error::InvalidArgument(format!(
                "unknown feature domain {s:?}"
            ))),
        }
    }
}

/// Lowercases `text` and returns its maximal runs of alphabetic characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphabetic())
        .filter(|w| !w.is_empty())
        .map(str::to_owned)
        .collect()
}

/// The word with one space of boundary padding on each side.
pub fn pad(word: &str) -> String {
    let mut padded = String::with_capacity(word.len() + 2);
    padded.push(' ');
    padded.push_str(word);
    padded.push(' ');
    padded
}

/// All character n-grams of the padded word, in order and with repetition.
pub fn extract_ngrams(word: &str, n: usize) -> Vec<String> {
    let padded = pad(word);
    ngram_slices(&padded, n).map(str::to_owned).collect()
}

/// Borrowing variant of [`extract_ngrams`] operating on an already padded word.
pub fn ngram_slices(padded: &str, n: usize) -> impl Iterator<Item = &str> + '_ {
    let mut bounds: Vec<usize> = padded.char_indices().map(|(i, _)| i).collect();
    bounds.push(padded.len());
    let windows = if n == 0 {
        0
    } else {
        bounds.len().saturating_sub(n)
    };
    (0..windows).map(move |i| &padded[bounds[i]..bounds[i + n]])
}
