//! Seeded generators for randomized tests.

use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::Rng;

use super::oracle::OracleParams;

/// A small random identification problem.
#[derive(Debug, Clone)]
pub struct Instance {
    pub codes: Vec<String>,
    pub corpora: Vec<Vec<String>>,
    pub params: OracleParams,
    pub sentences: Vec<String>,
    pub candidate_sets: Vec<Vec<usize>>,
}

const INSTANCE_CODES: [&str; 5] = ["aaa", "bbb", "ccc", "ddd", "eee"];
const INSTANCE_LETTERS: [char; 8] = ['a', 'b', 'c', 'd', 'e', 'ä', 'õ', 'ш'];

fn random_word<R: Rng>(rng: &mut R, letters: &[char]) -> String {
    let len = rng.random_range(1..=8);
    (0..len).map(|_| *letters.choose(rng).unwrap()).collect()
}

/// At most five languages, words of at most eight characters, n_max of at most four.
pub fn random_instance<R: Rng>(rng: &mut R) -> Instance {
    let n_langs = rng.random_range(1..=5);
    let codes: Vec<String> = INSTANCE_CODES[..n_langs]
        .iter()
        .map(|c| c.to_string())
        .collect();
    let params = OracleParams {
        n_max: rng.random_range(1..=4),
        cutoff: *[1e-6, 0.01, 0.05, 0.1, 0.2].choose(rng).unwrap(),
        penalty: *[7.0, 3.0, 5.5, 10.0].choose(rng).unwrap(),
        use_words: rng.random_bool(0.7),
    };
    let mut vocab: Vec<String> = Vec::new();
    let corpora: Vec<Vec<String>> = (0..n_langs)
        .map(|_| {
            let k = rng.random_range(3..=INSTANCE_LETTERS.len());
            let letters: Vec<char> = INSTANCE_LETTERS.choose_multiple(rng, k).cloned().collect();
            let n_sentences = rng.random_range(0..=6);
            (0..n_sentences)
                .map(|_| {
                    let n_words = rng.random_range(1..=5);
                    let words: Vec<String> =
                        (0..n_words).map(|_| random_word(rng, &letters)).collect();
                    vocab.extend(words.iter().cloned());
                    words.join(" ")
                })
                .collect()
        })
        .collect();
    let sentences = (0..6)
        .map(|_| {
            let n_words = rng.random_range(0..=5);
            let mut parts = Vec::new();
            for _ in 0..n_words {
                let w = if !vocab.is_empty() && rng.random_bool(0.6) {
                    vocab.choose(rng).unwrap().clone()
                } else {
                    random_word(rng, &INSTANCE_LETTERS)
                };
                parts.push(if rng.random_bool(0.2) {
                    w.to_uppercase()
                } else {
                    w
                });
            }
            let sep = if rng.random_bool(0.3) { ", 1 " } else { " " };
            parts.join(sep)
        })
        .collect();
    let candidate_sets = (0..3)
        .map(|i| {
            if i == 0 {
                (0..n_langs).collect()
            } else {
                let mut set: Vec<usize> = (0..n_langs).filter(|_| rng.random_bool(0.5)).collect();
                if set.is_empty() {
                    set.push(rng.random_range(0..n_langs));
                }
                set
            }
        })
        .collect();
    Instance {
        codes,
        corpora,
        params,
        sentences,
        candidate_sets,
    }
}

/// A made-up language: a private syllable inventory and a vocabulary built from it.
#[derive(Debug, Clone)]
pub struct SynthLanguage {
    pub code: String,
    syllables: Vec<String>,
    pub vocab: Vec<String>,
}

const CONSONANTS: [char; 17] = [
    'b', 'c', 'd', 'f', 'g', 'h', 'j', 'k', 'l', 'm', 'n', 'p', 'r', 's', 't', 'v', 'z',
];
const VOWELS: [char; 9] = ['a', 'e', 'i', 'o', 'u', 'ä', 'ö', 'õ', 'ü'];

impl SynthLanguage {
    fn coin_word<R: Rng>(&self, rng: &mut R) -> String {
        let n = rng.random_range(1..=3);
        (0..n)
            .map(|_| self.syllables.choose(rng).unwrap().as_str())
            .collect()
    }

    /// A sentence of 4 to 10 words; each word is new with probability `novel_rate`,
    /// otherwise drawn from the vocabulary with a bias towards its head.
    pub fn sentence<R: Rng>(&self, rng: &mut R, novel_rate: f64) -> String {
        let n_words = rng.random_range(4..=10);
        let words: Vec<String> = (0..n_words)
            .map(|_| {
                if rng.random_bool(novel_rate) {
                    self.coin_word(rng)
                } else {
                    let u: f64 = rng.random();
                    self.vocab[(u * u * self.vocab.len() as f64) as usize].clone()
                }
            })
            .collect();
        let mut s = words.join(" ");
        if let Some(first) = s.chars().next() {
            let upper: String = first.to_uppercase().collect();
            s.replace_range(..first.len_utf8(), &upper);
        }
        s.push('.');
        s
    }

    /// `count` distinct sentences not contained in `exclude`.
    pub fn distinct_sentences<R: Rng>(
        &self,
        rng: &mut R,
        count: usize,
        novel_rate: f64,
        exclude: &HashSet<String>,
    ) -> Vec<String> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        while out.len() < count {
            let s = self.sentence(rng, novel_rate);
            if !exclude.contains(&s) && seen.insert(s.clone()) {
                out.push(s);
            }
        }
        out
    }
}

/// Languages with pairwise disjoint vocabularies (syllable inventories may overlap).
pub fn synth_languages<R: Rng>(rng: &mut R, count: usize, vocab_size: usize) -> Vec<SynthLanguage> {
    let all_syllables: Vec<String> = CONSONANTS
        .iter()
        .flat_map(|c| VOWELS.iter().map(move |v| format!("{c}{v}")))
        .collect();
    let mut taken: HashSet<String> = HashSet::new();
    (0..count)
        .map(|i| {
            let code = format!(
                "s{}{}",
                (b'a' + (i / 26) as u8) as char,
                (b'a' + (i % 26) as u8) as char
            );
            let syllables: Vec<String> = all_syllables.choose_multiple(rng, 14).cloned().collect();
            let mut lang = SynthLanguage {
                code,
                syllables,
                vocab: Vec::new(),
            };
            while lang.vocab.len() < vocab_size {
                let w = lang.coin_word(rng);
                if taken.insert(w.clone()) {
                    lang.vocab.push(w);
                }
            }
            lang
        })
        .collect()
}
