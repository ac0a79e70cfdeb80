//! Sentence-per-line corpora.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::registry::LanguageCode;
use crate::util::{numbered_lines, read_utf8};

/// Layout of a corpus file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    /// One sentence per line.
    Plain,
    /// `number<TAB>sentence` per line, as in the Leipzig collection.
    Indexed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub language: LanguageCode,
    pub sentences: Vec<String>,
    pub source: String,
}

impl Corpus {
    /// Builds an in-memory corpus. Sentences containing line breaks are
    /// split, and blank lines are dropped.
    pub fn from_sentences<I, S>(language: LanguageCode, sentences: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let sentences = sentences
            .into_iter()
            .flat_map(|s| {
                s.as_ref()
                    .split(['\n', '\r'])
                    .filter(|l| !l.trim().is_empty())
                    .map(str::to_owned)
                    .collect::<Vec<_>>()
            })
            .collect();
        Corpus {
            language,
            sentences,
            source: "<memory>".to_owned(),
        }
    }

    pub fn load(
        path: impl AsRef<Path>,
        language: LanguageCode,
        format: CorpusFormat,
    ) -> Result<Self> {
        let path = path.as_ref();
        let text = read_utf8(path)?;
        let mut sentences = Vec::new();
        for (lineno, line) in numbered_lines(&text) {
            if line.trim().is_empty() {
                continue;
            }
            let sentence = match format {
                CorpusFormat::Plain => line,
                CorpusFormat::Indexed => match line.split_once('\t') {
                    Some((_, sentence)) => sentence,
                    None => {
                        return Err(Error::parse(path, lineno, "indexed line has no tab"));
                    }
                },
            };
            if !sentence.trim().is_empty() {
                sentences.push(sentence.to_owned());
            }
        }
        Ok(Corpus {
            language,
            sentences,
            source: path.display().to_string(),
        })
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Shuffles deterministically under `seed` and splits off a development
    /// set of `round_half_up(n * dev_fraction)` sentences. Returns `(train, dev)`.
    pub fn split_train_dev(&self, dev_fraction: f64, seed: u64) -> Result<(Corpus, Corpus)> {
        if !(0.0..=1.0).contains(&dev_fraction) {
            return Err(Error::InvalidArgument(format!(
                "dev fraction must lie in [0, 1], got {dev_fraction}"
            )));
        }
        let mut shuffled = self.sentences.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let dev_len = dev_size(shuffled.len(), dev_fraction);
        let train = shuffled.split_off(dev_len);
        let part = |sentences, tag: &str| Corpus {
            language: self.language.clone(),
            sentences,
            source: format!("{}#{tag}", self.source),
        };
        Ok((part(train, "train"), part(shuffled, "dev")))
    }
}

fn dev_size(n: usize, fraction: f64) -> usize {
    ((n as f64 * fraction + 0.5).floor() as usize).min(n)
}
