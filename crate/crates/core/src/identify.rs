//! HeLI scoring.
//!
//! Every word of a sentence carries equal weight. A word is scored in the
//! most specific feature domain that at least one candidate language knows
//! anything about: the whole word first, then character n-grams from the
//! longest down to unigrams. Within a domain a language's word score is the
//! mean over the word's features of the stored score, with the penalty
//! standing in for features the language has never seen. The sentence score
//! is the mean of its word scores and the lowest score wins.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::ModelSet;
use crate::ngram::{ngram_slices, pad, tokenize, FeatureDomain};
use crate::registry::{LanguageCode, LanguageRegistry};

/// Added to the score of every non-CJK language when a text is mostly CJK.
pub const CJK_PENALTY: f64 = 1000.0;

const CJK_RANGES: [(u32, u32); 7] = [
    (0x1100, 0x11FF), // Hangul Jamo
    (0x3040, 0x309F), // Hiragana
    (0x30A0, 0x30FF), // Katakana
    (0x3130, 0x318F), // Hangul Compatibility Jamo
    (0x3400, 0x4DBF), // CJK Unified Ideographs Extension A
    (0x4E00, 0x9FFF), // CJK Unified Ideographs
    (0xAC00, 0xD7AF), // Hangul Syllables
];

pub fn is_cjk_char(c: char) -> bool {
    let c = c as u32;
    CJK_RANGES.iter().any(|&(lo, hi)| (lo..=hi).contains(&c))
}

/// Share of non-whitespace characters that belong to CJK blocks.
pub fn cjk_ratio(text: &str) -> f64 {
    let (mut cjk, mut total) = (0usize, 0usize);
    for c in text.chars().filter(|c| !c.is_whitespace()) {
        total += 1;
        if is_cjk_char(c) {
            cjk += 1;
        }
    }
    if total == 0 {
        0.0
    } else {
        cjk as f64 / total as f64
    }
}

/// When more than half of `text` is CJK, pushes every non-CJK language far
/// out of reach. Languages missing from the registry count as non-CJK.
pub fn apply_cjk_sanity(
    scores: &mut [(LanguageCode, f64)],
    text: &str,
    registry: &LanguageRegistry,
) {
    if cjk_ratio(text) > 0.5 {
        for (code, score) in scores.iter_mut() {
            if !registry.get(code.as_str()).is_some_and(|l| l.cjk) {
                *score += CJK_PENALTY;
            }
        }
    }
}

/// Scores closer than this to the minimum count as tied with it.
pub const TIE_EPSILON: f64 = 1e-12;

/// Index of the first entry whose score is within [`TIE_EPSILON`] of the
/// minimum. Entries are in registry order, so ties go to the first registered.
fn argmin(scores: &[(LanguageCode, f64)]) -> usize {
    let min = scores.iter().map(|(_, s)| *s).fold(f64::INFINITY, f64::min);
    scores
        .iter()
        .position(|(_, s)| *s <= min + TIE_EPSILON)
        .unwrap_or(0)
}

#[derive(Debug, Clone, Copy)]
struct Posting {
    model: u32,
    score: f64,
}

/// A set of candidate languages, kept in registry order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidates {
    members: Vec<usize>,
    /// Position of each model in `members`, or `usize::MAX` when excluded.
    slot: Vec<usize>,
}

impl Candidates {
    fn from_models(mut members: Vec<usize>, model_count: usize) -> Self {
        members.sort_unstable();
        members.dedup();
        let mut slot = vec![usize::MAX; model_count];
        for (i, &m) in members.iter().enumerate() {
            slot[m] = i;
        }
        Candidates { members, slot }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn position(&self, model: usize) -> Option<usize> {
        self.slot.get(model).copied().filter(|&s| s != usize::MAX)
    }
}

/// Per-candidate scores of one word and the domain they were computed in.
#[derive(Debug, Clone, PartialEq)]
pub struct WordScores {
    /// `None` when no candidate has any feature of the word.
    pub domain: Option<FeatureDomain>,
    /// Aligned with the candidate set.
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub winner: LanguageCode,
    pub score: f64,
    /// One entry per candidate, in registry order. Lower is better.
    pub scores: Vec<(LanguageCode, f64)>,
    /// Domain used for each word of the tokenized sentence.
    pub domain_trace: Vec<Option<FeatureDomain>>,
}

impl Prediction {
    pub fn score_of(&self, code: &str) -> Option<f64> {
        self.scores
            .iter()
            .find(|(c, _)| c.as_str() == code)
            .map(|(_, s)| *s)
    }
}

/// Character shares of the languages identified in a multi-line text.
#[derive(Debug, Clone, PartialEq)]
pub struct LanguageShares {
    /// Languages that won at least one line, in registry order.
    pub shares: Vec<(LanguageCode, f64)>,
    /// The relevant language with the largest share, if it reaches the minimum.
    pub dominant: Option<LanguageCode>,
}

impl LanguageShares {
    pub fn share_of(&self, code: &str) -> f64 {
        self.shares
            .iter()
            .find(|(c, _)| c.as_str() == code)
            .map_or(0.0, |(_, s)| *s)
    }
}

/// A model set prepared for scoring. Immutable and shareable across threads.
#[derive(Debug)]
pub struct Identifier {
    set: ModelSet,
    codes: Vec<LanguageCode>,
    relevant: Vec<bool>,
    /// Feature -> languages that store it, one table per domain slot.
    index: Vec<HashMap<Box<str>, Vec<Posting>>>,
    by_code: HashMap<LanguageCode, usize>,
}

impl Identifier {
    pub fn new(set: ModelSet) -> Self {
        let mut index: Vec<HashMap<Box<str>, Vec<Posting>>> =
            vec![HashMap::new(); set.params.n_max + 1];
        for (m, model) in set.models().iter().enumerate() {
            for domain in set.params.domains() {
                let table = &mut index[domain.slot()];
                for (feature, &score) in &model.domain(domain).scores {
                    table
                        .entry(feature.as_str().into())
                        .or_default()
                        .push(Posting {
                            model: m as u32,
                            score,
                        });
                }
            }
        }
        let codes: Vec<LanguageCode> = set.models().iter().map(|m| m.language.clone()).collect();
        let relevant = codes
            .iter()
            .map(|c| set.registry.is_relevant(c.as_str()))
            .collect();
        let by_code = codes
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect();
        Identifier {
            set,
            codes,
            relevant,
            index,
            by_code,
        }
    }

    pub fn model_set(&self) -> &ModelSet {
        &self.set
    }

    pub fn registry(&self) -> &LanguageRegistry {
        &self.set.registry
    }

    /// Codes of all modelled languages in registry order.
    pub fn languages(&self) -> &[LanguageCode] {
        &self.codes
    }

    pub fn all_candidates(&self) -> Candidates {
        Candidates::from_models((0..self.codes.len()).collect(), self.codes.len())
    }

    /// Candidate set from explicit codes. Every code must have a model.
    pub fn candidates<'a>(&self, codes: impl IntoIterator<Item = &'a str>) -> Result<Candidates> {
        let members = codes
            .into_iter()
            .map(|c| self.model_index(c))
            .collect::<Result<Vec<_>>>()?;
        if members.is_empty() {
            return Err(Error::InvalidArgument("candidate set is empty".into()));
        }
        Ok(Candidates::from_models(members, self.codes.len()))
    }

    /// `allowed_relevant` together with every non-relevant modelled language.
    pub fn restricted_candidates<'a>(
        &self,
        allowed_relevant: impl IntoIterator<Item = &'a str>,
    ) -> Result<Candidates> {
        let mut members = Vec::new();
        for code in allowed_relevant {
            let m = self.model_index(code)?;
            if !self.relevant[m] {
                return Err(Error::InvalidArgument(format!(
                    "{code} is not a relevant language"
                )));
            }
            members.push(m);
        }
        members.extend((0..self.codes.len()).filter(|&m| !self.relevant[m]));
        if members.is_empty() {
            return Err(Error::InvalidArgument(
                "restricted candidate set is empty".into(),
            ));
        }
        Ok(Candidates::from_models(members, self.codes.len()))
    }

    fn model_index(&self, code: &str) -> Result<usize> {
        self.by_code.get(code).copied().ok_or_else(|| {
            if self.set.registry.contains(code) {
                Error::InvalidArgument(format!("language {code} has no trained model"))
            } else {
                Error::UnknownLanguage(code.to_owned())
            }
        })
    }

    pub fn candidate_codes(&self, candidates: &Candidates) -> Vec<LanguageCode> {
        candidates
            .members
            .iter()
            .map(|&m| self.codes[m].clone())
            .collect()
    }

    /// Scores one (lowercased, non-empty) word against the candidates.
    pub fn score_word(&self, word: &str, candidates: &Candidates) -> WordScores {
        let params = &self.set.params;
        let padded = pad(word);
        let mut postings: Vec<Option<&Vec<Posting>>> = Vec::new();
        for domain in params.backoff_order() {
            let table = &self.index[domain.slot()];
            postings.clear();
            match domain {
                FeatureDomain::Word => postings.push(table.get(padded.as_str())),
                FeatureDomain::Ngram(n) => {
                    postings.extend(ngram_slices(&padded, n).map(|g| table.get(g)))
                }
            }
            let usable = postings.iter().flatten().any(|list| {
                list.iter()
                    .any(|p| candidates.position(p.model as usize).is_some())
            });
            if !usable {
                continue;
            }
            let mut sums = vec![0.0; candidates.len()];
            let mut hits = vec![0usize; candidates.len()];
            for list in postings.iter().flatten() {
                for p in list.iter() {
                    if let Some(pos) = candidates.position(p.model as usize) {
                        sums[pos] += p.score;
                        hits[pos] += 1;
                    }
                }
            }
            let count = postings.len();
            let scores = sums
                .iter()
                .zip(&hits)
                .map(|(&sum, &hit)| (sum + (count - hit) as f64 * params.penalty) / count as f64)
                .collect();
            return WordScores {
                domain: Some(domain),
                scores,
            };
        }
        WordScores {
            domain: None,
            scores: vec![params.penalty; candidates.len()],
        }
    }

    pub fn identify(&self, sentence: &str, candidates: &Candidates) -> Prediction {
        let penalty = self.set.params.penalty;
        let words = tokenize(sentence);
        let mut totals = vec![0.0; candidates.len()];
        let mut domain_trace = Vec::with_capacity(words.len());
        for word in &words {
            let ws = self.score_word(word, candidates);
            for (t, s) in totals.iter_mut().zip(&ws.scores) {
                *t += s;
            }
            domain_trace.push(ws.domain);
        }
        let mut scores: Vec<(LanguageCode, f64)> = candidates
            .members
            .iter()
            .zip(totals)
            .map(|(&m, total)| {
                let score = if words.is_empty() {
                    penalty
                } else {
                    total / words.len() as f64
                };
                (self.codes[m].clone(), score)
            })
            .collect();
        apply_cjk_sanity(&mut scores, sentence, &self.set.registry);

        let best = argmin(&scores);
        Prediction {
            winner: scores[best].0.clone(),
            score: scores[best].1,
            scores,
            domain_trace,
        }
    }

    /// Identifies against every modelled language.
    pub fn identify_all(&self, sentence: &str) -> Prediction {
        self.identify(sentence, &self.all_candidates())
    }

    /// Identifies with the relevant languages limited to `allowed_relevant`;
    /// all non-relevant languages stay in play.
    pub fn identify_restricted<'a>(
        &self,
        sentence: &str,
        allowed_relevant: impl IntoIterator<Item = &'a str>,
    ) -> Result<Prediction> {
        let candidates = self.restricted_candidates(allowed_relevant)?;
        Ok(self.identify(sentence, &candidates))
    }

    /// Identifies each line of `text` and reports each winning language's
    /// share of the characters. Blank lines and lines without any letters
    /// are ignored.
    pub fn identify_set(
        &self,
        text: &str,
        candidates: &Candidates,
        min_share: f64,
    ) -> Result<LanguageShares> {
        if !(min_share > 0.0 && min_share <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "minimum share must lie in (0, 1], got {min_share}"
            )));
        }
        let mut chars = vec![0usize; self.codes.len()];
        let mut total = 0usize;
        for line in text.lines() {
            let line = line.strip_suffix('\r').unwrap_or(line);
            if line.trim().is_empty() || !line.chars().any(char::is_alphabetic) {
                continue;
            }
            let winner = self.identify(line, candidates).winner;
            let len = line.chars().count();
            chars[self.by_code[&winner]] += len;
            total += len;
        }
        let shares: Vec<(LanguageCode, f64)> = chars
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(m, &c)| (self.codes[m].clone(), c as f64 / total as f64))
            .collect();
        let mut dominant: Option<&(LanguageCode, f64)> = None;
        for entry in shares
            .iter()
            .filter(|(c, _)| self.relevant[self.by_code[c]])
        {
            if dominant.is_none_or(|d| entry.1 > d.1) {
                dominant = Some(entry);
            }
        }
        let dominant = dominant
            .filter(|(_, share)| *share >= min_share)
            .map(|(c, _)| c.clone());
        Ok(LanguageShares { shares, dominant })
    }

    /// The winning language of every word of `sentence`, each word scored on its own.
    pub fn word_winners(&self, sentence: &str, candidates: &Candidates) -> Vec<LanguageCode> {
        tokenize(sentence)
            .iter()
            .map(|w| self.identify(w, candidates).winner)
            .collect()
    }
}
