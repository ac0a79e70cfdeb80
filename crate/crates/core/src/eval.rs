//! Confusion matrices and the three shared-task scores.
//!
//! * Track 1: macro-F1 over the relevant languages.
//! * Track 2: micro-F1 over sentences that are relevant in gold or in prediction.
//! * Track 3: macro-F1 over every registered language.
//!
//! A language with no gold sentences has recall 1, and precision 1 unless
//! something was predicted as it, in which case precision is 0. More
//! generally a zero denominator makes precision or recall 1.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::registry::{LanguageCode, LanguageRegistry};
use crate::util::{numbered_lines, read_utf8, write_file};

pub const CONFUSION_FILE: &str = "confusion.tsv";
pub const PER_LANGUAGE_FILE: &str = "per_language.tsv";
pub const TRACKS_FILE: &str = "tracks.tsv";

/// Gold × predicted sentence counts, indexed in registry order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    registry: LanguageRegistry,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new(registry: LanguageRegistry) -> Self {
        let n = registry.len();
        ConfusionMatrix {
            registry,
            counts: vec![0; n * n],
        }
    }

    /// Counts aligned gold/predicted label pairs.
    pub fn from_labels<G, P>(golds: &[G], preds: &[P], registry: LanguageRegistry) -> Result<Self>
    where
        G: AsRef<str>,
        P: AsRef<str>,
    {
        if golds.len() != preds.len() {
            return Err(Error::InvalidArgument(format!(
                "{} gold labels but {} predictions",
                golds.len(),
                preds.len()
            )));
        }
        let mut cm = Self::new(registry);
        for (g, p) in golds.iter().zip(preds) {
            cm.add(g.as_ref(), p.as_ref(), 1)?;
        }
        Ok(cm)
    }

    pub fn registry(&self) -> &LanguageRegistry {
        &self.registry
    }

    fn n(&self) -> usize {
        self.registry.len()
    }

    pub fn add(&mut self, gold: &str, predicted: &str, count: u64) -> Result<()> {
        let g = self.registry.index_of(gold)?;
        let p = self.registry.index_of(predicted)?;
        let n = self.n();
        self.counts[g * n + p] += count;
        Ok(())
    }

    pub fn get(&self, gold: &str, predicted: &str) -> u64 {
        match (
            self.registry.position(gold),
            self.registry.position(predicted),
        ) {
            (Some(g), Some(p)) => self.at(g, p),
            _ => 0,
        }
    }

    fn at(&self, g: usize, p: usize) -> u64 {
        self.counts[g * self.n() + p]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn gold_total(&self, code: &str) -> u64 {
        self.registry
            .position(code)
            .map_or(0, |g| (0..self.n()).map(|p| self.at(g, p)).sum())
    }

    pub fn predicted_total(&self, code: &str) -> u64 {
        self.registry
            .position(code)
            .map_or(0, |p| (0..self.n()).map(|g| self.at(g, p)).sum())
    }

    /// Non-zero cells as `(gold, predicted, count)` in registry order.
    pub fn cells(&self) -> impl Iterator<Item = (&LanguageCode, &LanguageCode, u64)> {
        let n = self.n();
        let langs = self.registry.languages();
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(i, &c)| (&langs[i / n].code, &langs[i % n].code, c))
    }

    /// Languages with a non-zero row or column, in registry order.
    fn active(&self) -> Vec<usize> {
        let n = self.n();
        (0..n)
            .filter(|&i| (0..n).any(|j| self.at(i, j) > 0 || self.at(j, i) > 0))
            .collect()
    }

    pub fn prf(&self, code: &str) -> Result<Prf> {
        let i = self.registry.index_of(code)?;
        Ok(self.prf_at(i))
    }

    fn prf_at(&self, i: usize) -> Prf {
        let n = self.n();
        let tp = self.at(i, i);
        let fp: u64 = (0..n).filter(|&g| g != i).map(|g| self.at(g, i)).sum();
        let fn_: u64 = (0..n).filter(|&p| p != i).map(|p| self.at(i, p)).sum();
        Prf::from_counts(tp, fp, fn_)
    }

    /// Macro-F1 over the relevant languages, absent ones included.
    pub fn track1(&self) -> f64 {
        let f1s: Vec<f64> = (0..self.n())
            .filter(|&i| self.registry.languages()[i].relevant)
            .map(|i| self.prf_at(i).f1)
            .collect();
        mean(&f1s)
    }

    /// Micro-F1 over sentences that are relevant in gold or prediction.
    pub fn track2(&self) -> f64 {
        let relevant: Vec<bool> = self.registry.iter().map(|l| l.relevant).collect();
        let (mut tp, mut fp, mut fn_) = (0u64, 0u64, 0u64);
        for g in 0..self.n() {
            for p in 0..self.n() {
                let c = self.at(g, p);
                if g == p {
                    if relevant[g] {
                        tp += c;
                    }
                } else {
                    if relevant[p] {
                        fp += c;
                    }
                    if relevant[g] {
                        fn_ += c;
                    }
                }
            }
        }
        Prf::from_counts(tp, fp, fn_).f1
    }

    /// Macro-F1 over all registered languages.
    pub fn track3(&self) -> f64 {
        let f1s: Vec<f64> = (0..self.n()).map(|i| self.prf_at(i).f1).collect();
        mean(&f1s)
    }

    pub fn scores(&self) -> TrackScores {
        TrackScores {
            track1: self.track1(),
            track2: self.track2(),
            track3: self.track3(),
            per_language: self
                .registry
                .iter()
                .enumerate()
                .map(|(i, l)| (l.code.clone(), self.prf_at(i)))
                .collect(),
        }
    }

    /// Confusion matrix as TSV: rows gold, columns predicted, zero cells blank.
    /// Only languages with a non-zero row or column are shown.
    pub fn to_tsv(&self) -> String {
        let active = self.active();
        let langs = self.registry.languages();
        let mut out = String::from("gold\\predicted");
        for &j in &active {
            out.push('\t');
            out.push_str(langs[j].code.as_str());
        }
        out.push('\n');
        for &i in &active {
            out.push_str(langs[i].code.as_str());
            for &j in &active {
                out.push('\t');
                let c = self.at(i, j);
                if c > 0 {
                    let _ = write!(out, "{c}");
                }
            }
            out.push('\n');
        }
        out
    }

    /// Reads a matrix written by [`to_tsv`](Self::to_tsv).
    pub fn parse_tsv(text: &str, registry: LanguageRegistry, origin: &Path) -> Result<Self> {
        let mut cm = Self::new(registry);
        let mut lines = numbered_lines(text).filter(|(_, l)| !l.is_empty());
        let Some((_, header)) = lines.next() else {
            return Ok(cm);
        };
        let columns: Vec<&str> = header.split('\t').skip(1).collect();
        for col in &columns {
            cm.registry
                .index_of(col)
                .map_err(|e| Error::parse(origin, 1, e.to_string()))?;
        }
        for (lineno, line) in lines {
            let mut fields = line.split('\t');
            let gold = fields.next().unwrap_or_default();
            let cells: Vec<&str> = fields.collect();
            if cells.len() != columns.len() {
                return Err(Error::parse(
                    origin,
                    lineno,
                    format!("expected {} cells, found {}", columns.len(), cells.len()),
                ));
            }
            for (col, cell) in columns.iter().zip(cells) {
                if cell.is_empty() {
                    continue;
                }
                let count: u64 = cell
                    .parse()
                    .map_err(|_| Error::parse(origin, lineno, format!("bad count {cell:?}")))?;
                cm.add(gold, col, count)
                    .map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
            }
        }
        Ok(cm)
    }

    pub fn load_tsv(path: impl AsRef<Path>, registry: LanguageRegistry) -> Result<Self> {
        let path = path.as_ref();
        Self::parse_tsv(&read_utf8(path)?, registry, path)
    }
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn from_counts(tp: u64, fp: u64, fn_: u64) -> Self {
        let ratio = |num: u64, den: u64| {
            if den == 0 {
                1.0
            } else {
                num as f64 / den as f64
            }
        };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        // with tp > 0 the harmonic mean reduces to a single division of counts
        let f1 = if tp > 0 {
            (2 * tp) as f64 / (2 * tp + fp + fn_) as f64
        } else if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf {
            precision,
            recall,
            f1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackScores {
    pub track1: f64,
    pub track2: f64,
    pub track3: f64,
    pub per_language: Vec<(LanguageCode, Prf)>,
}

impl TrackScores {
    /// The three scores, one `name<TAB>value` line each.
    pub fn tracks_tsv(&self) -> String {
        format!(
            "track1_relevant_macro_f1\t{}\ntrack2_relevant_micro_f1\t{}\ntrack3_macro_f1\t{}\n",
            self.track1, self.track2, self.track3
        )
    }

    pub fn per_language_tsv(&self, registry: &LanguageRegistry) -> String {
        let mut out = String::from("language\trelevant\tprecision\trecall\tf1\n");
        for (code, prf) in &self.per_language {
            let _ = writeln!(
                out,
                "{code}\t{}\t{}\t{}\t{}",
                u8::from(registry.is_relevant(code.as_str())),
                prf.precision,
                prf.recall,
                prf.f1
            );
        }
        out
    }
}

/// Writes `confusion.tsv`, `per_language.tsv` and `tracks.tsv` into `dir`.
pub fn write_report(
    cm: &ConfusionMatrix,
    scores: &TrackScores,
    dir: impl AsRef<Path>,
) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(&dir.join(CONFUSION_FILE), &cm.to_tsv())?;
    write_file(
        &dir.join(PER_LANGUAGE_FILE),
        &scores.per_language_tsv(cm.registry()),
    )?;
    write_file(&dir.join(TRACKS_FILE), &scores.tracks_tsv())
}

/// Reads gold or predicted labels: either one code per line, or tab-separated
/// rows whose last field is the code (`sentence<TAB>code`). Rows where the
/// last field is not a code (such as `index<TAB>code<TAB>score` identifier
/// output) take the second field instead.
pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let text = read_utf8(path)?;
    parse_labels(&text, path)
}

pub fn parse_labels(text: &str, origin: &Path) -> Result<Vec<String>> {
    let mut labels = Vec::new();
    for (lineno, line) in numbered_lines(text) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let label = match fields.as_slice() {
            [only] => only.trim(),
            [.., last] if LanguageCode::new(last.trim()).is_ok() => last.trim(),
            [_, second, ..] => second.trim(),
            [] => unreachable!(),
        };
        LanguageCode::new(label).map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
        labels.push(label.to_owned());
    }
    Ok(labels)
}
