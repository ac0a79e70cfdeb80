//! Brute-force reference scorer.
//!
//! Trains from raw sentences with explicit substring enumeration and scores
//! by walking the backoff chain one domain at a time, recomputing every mean
//! from scratch. Shares no code with the library beyond std.

use std::collections::HashMap;

#[derive(Debug, Clone, Copy)]
pub struct OracleParams {
    pub n_max: usize,
    pub cutoff: f64,
    pub penalty: f64,
    pub use_words: bool,
}

#[derive(Debug, Clone)]
pub struct OracleModel {
    pub code: String,
    pub words: HashMap<String, f64>,
    /// `grams[n - 1]` holds n-grams of length n.
    pub grams: Vec<HashMap<String, f64>>,
}

pub fn tokenize(text: &str) -> Vec<String> {
    let mut words = Vec::new();
    let mut current = String::new();
    for c in text.to_lowercase().chars() {
        if c.is_alphabetic() {
            current.push(c);
        } else if !current.is_empty() {
            words.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        words.push(current);
    }
    words
}

pub fn substrings(word: &str, n: usize) -> Vec<String> {
    let mut chars = vec![' '];
    chars.extend(word.chars());
    chars.push(' ');
    let mut out = Vec::new();
    for start in 0..chars.len() {
        if start + n <= chars.len() {
            out.push(chars[start..start + n].iter().collect());
        }
    }
    out
}

/// Ten significant digits, the precision scores are stored with.
fn round_sig10(x: f64) -> f64 {
    let r: f64 = format!("{x:.9e}").parse().unwrap();
    r + 0.0
}

fn scores_from_counts(counts: HashMap<String, u64>, cutoff: f64) -> HashMap<String, f64> {
    let total: u64 = counts.values().sum();
    let mut out = HashMap::new();
    for (feature, count) in counts {
        let rel = count as f64 / total as f64;
        if rel >= cutoff {
            out.insert(feature, round_sig10(-rel.log10()));
        }
    }
    out
}

pub fn train(code: &str, sentences: &[String], p: OracleParams) -> OracleModel {
    let mut word_counts: HashMap<String, u64> = HashMap::new();
    let mut gram_counts: Vec<HashMap<String, u64>> = vec![HashMap::new(); p.n_max];
    for sentence in sentences {
        for word in tokenize(sentence) {
            if p.use_words {
                *word_counts.entry(format!(" {word} ")).or_default() += 1;
            }
            for n in 1..=p.n_max {
                for g in substrings(&word, n) {
                    *gram_counts[n - 1].entry(g).or_default() += 1;
                }
            }
        }
    }
    OracleModel {
        code: code.to_owned(),
        words: scores_from_counts(word_counts, p.cutoff),
        grams: gram_counts
            .into_iter()
            .map(|c| scores_from_counts(c, p.cutoff))
            .collect(),
    }
}

/// Per-candidate scores of one word.
pub fn score_word(models: &[&OracleModel], word: &str, p: OracleParams) -> Vec<f64> {
    if p.use_words {
        let padded = format!(" {word} ");
        if models.iter().any(|m| m.words.contains_key(&padded)) {
            return models
                .iter()
                .map(|m| *m.words.get(&padded).unwrap_or(&p.penalty))
                .collect();
        }
    }
    for n in (1..=p.n_max).rev() {
        let grams = substrings(word, n);
        if grams.is_empty() {
            continue;
        }
        let usable = models
            .iter()
            .any(|m| grams.iter().any(|g| m.grams[n - 1].contains_key(g)));
        if !usable {
            continue;
        }
        return models
            .iter()
            .map(|m| {
                let sum: f64 = grams
                    .iter()
                    .map(|g| *m.grams[n - 1].get(g).unwrap_or(&p.penalty))
                    .sum();
                sum / grams.len() as f64
            })
            .collect();
    }
    vec![p.penalty; models.len()]
}

pub fn score_sentence(models: &[&OracleModel], sentence: &str, p: OracleParams) -> Vec<f64> {
    let words = tokenize(sentence);
    if words.is_empty() {
        return vec![p.penalty; models.len()];
    }
    let mut totals = vec![0.0; models.len()];
    for word in &words {
        for (t, s) in totals.iter_mut().zip(score_word(models, word, p)) {
            *t += s;
        }
    }
    totals.iter().map(|t| t / words.len() as f64).collect()
}

/// First candidate within 1e-12 of the minimum.
pub fn winner(scores: &[f64]) -> usize {
    let min = scores.iter().cloned().fold(f64::INFINITY, f64::min);
    scores.iter().position(|&s| s <= min + 1e-12).unwrap()
}
