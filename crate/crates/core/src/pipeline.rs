//! Web-corpus cleaning funnel.
//!
//! Starting from the extracted text of crawled pages:
//!
//! 1. keep pages where some relevant language owns at least `min_share` of
//!    the text, and label each page with its most prominent relevant language;
//! 2. split pages into lines and deduplicate them, a line remembering every
//!    page language it was seen under;
//! 3. re-identify each line with only its remembered relevant languages (plus
//!    all non-relevant ones) allowed, keeping lines still won by a relevant
//!    language;
//! 4. split lines into sentences and deduplicate those the same way;
//! 5. label each sentence with the relevant language winning an absolute
//!    majority of its words, dropping sentences without one.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use base64::Engine as _;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::identify::Identifier;
use crate::registry::LanguageCode;
use crate::util::{numbered_lines, read_utf8, write_file};

const SENTENCE_TERMINATORS: [char; 4] = ['.', '!', '?', '…'];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Page {
    pub url: String,
    pub text: String,
    pub page_language: Option<LanguageCode>,
}

impl Page {
    pub fn new(url: impl Into<String>, text: impl Into<String>) -> Self {
        Page {
            url: url.into(),
            text: text.into(),
            page_language: None,
        }
    }
}

/// A line or sentence with the relevant languages it may be written in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledLine {
    pub text: String,
    pub known_languages: BTreeSet<LanguageCode>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LabeledSentence {
    pub text: String,
    pub language: LanguageCode,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PipelineReport {
    pub pages_in: usize,
    pub pages_retained: usize,
    pub lines_total: usize,
    pub lines_unique: usize,
    pub lines_retained: usize,
    pub sentences_extracted: usize,
    pub sentences_unique: usize,
    pub sentences_labeled: usize,
}

impl PipelineReport {
    pub fn rows(&self) -> [(&'static str, usize); 8] {
        [
            ("pages_in", self.pages_in),
            ("pages_retained", self.pages_retained),
            ("lines_total", self.lines_total),
            ("lines_unique", self.lines_unique),
            ("lines_retained", self.lines_retained),
            ("sentences_extracted", self.sentences_extracted),
            ("sentences_unique", self.sentences_unique),
            ("sentences_labeled", self.sentences_labeled),
        ]
    }

    /// Every stage keeps at most what the previous one produced.
    pub fn is_monotone(&self) -> bool {
        self.pages_retained <= self.pages_in
            && self.lines_unique <= self.lines_total
            && self.lines_retained <= self.lines_unique
            && self.sentences_unique <= self.sentences_extracted
            && self.sentences_labeled <= self.sentences_unique
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (name, count) in self.rows() {
            let _ = writeln!(out, "{name}\t{count}");
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    /// Smallest character share of a relevant language for a page to be kept.
    pub min_share: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { min_share: 0.02 }
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .filter(|l| !l.trim().is_empty())
}

/// Stage 1: keeps pages with a dominant relevant language and records it.
pub fn stage1_filter_pages(pages: Vec<Page>, id: &Identifier, min_share: f64) -> Result<Vec<Page>> {
    let candidates = id.all_candidates();
    let labeled = pages
        .into_par_iter()
        .map(|mut page| {
            let shares = id.identify_set(&page.text, &candidates, min_share)?;
            page.page_language = shares.dominant;
            Ok(page)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(labeled
        .into_iter()
        .filter(|p| p.page_language.is_some())
        .collect())
}

/// Number of non-blank lines over all pages.
pub fn count_lines(pages: &[Page]) -> usize {
    pages.iter().map(|p| content_lines(&p.text).count()).sum()
}

/// Merges items with identical text, uniting their languages. Keeps first-occurrence order.
pub fn dedup_labeled(items: impl IntoIterator<Item = LabeledLine>) -> Vec<LabeledLine> {
    let mut out: Vec<LabeledLine> = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for item in items {
        match seen.get(&item.text) {
            Some(&i) => out[i].known_languages.extend(item.known_languages),
            None => {
                seen.insert(item.text.clone(), out.len());
                out.push(item);
            }
        }
    }
    out
}

/// Stage 2: unique non-blank lines, each labeled with all of its pages' languages.
pub fn stage2_dedup_lines(pages: &[Page]) -> Result<Vec<LabeledLine>> {
    let mut lines = Vec::new();
    for page in pages {
        let language = page.page_language.as_ref().ok_or_else(|| {
            Error::InvalidArgument(format!("page {} has no page language", page.url))
        })?;
        for line in content_lines(&page.text) {
            lines.push(LabeledLine {
                text: line.to_owned(),
                known_languages: BTreeSet::from([language.clone()]),
            });
        }
    }
    Ok(dedup_labeled(lines))
}

/// Stage 3: restricted re-identification of every line. A kept line's
/// languages narrow to the relevant languages that actually won text.
pub fn stage3_filter_lines(
    lines: Vec<LabeledLine>,
    id: &Identifier,
    min_share: f64,
) -> Result<Vec<LabeledLine>> {
    let registry = id.registry();
    let filtered = lines
        .into_par_iter()
        .map(|line| {
            let candidates =
                id.restricted_candidates(line.known_languages.iter().map(LanguageCode::as_str))?;
            let shares = id.identify_set(&line.text, &candidates, min_share)?;
            let winners: BTreeSet<LanguageCode> = shares
                .shares
                .into_iter()
                .filter(|(code, share)| *share > 0.0 && registry.is_relevant(code.as_str()))
                .map(|(code, _)| code)
                .collect();
            Ok((!winners.is_empty()).then_some(LabeledLine {
                text: line.text,
                known_languages: winners,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(filtered.into_iter().flatten().collect())
}

/// Splits a line after each run of sentence-final punctuation that is
/// followed by whitespace or the end of the line. Fragments are trimmed and
/// dropped when they contain no letters.
pub fn extract_sentences(line: &str) -> Vec<String> {
    let chars: Vec<(usize, char)> = line.char_indices().collect();
    let mut pieces = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        if !SENTENCE_TERMINATORS.contains(&chars[i].1) {
            i += 1;
            continue;
        }
        let mut j = i;
        while j < chars.len() && SENTENCE_TERMINATORS.contains(&chars[j].1) {
            j += 1;
        }
        if j == chars.len() || chars[j].1.is_whitespace() {
            let end = chars.get(j).map_or(line.len(), |&(b, _)| b);
            pieces.push(&line[start..end]);
            start = end;
        }
        i = j;
    }
    pieces.push(&line[start..]);
    pieces
        .into_iter()
        .map(str::trim)
        .filter(|s| s.chars().any(char::is_alphabetic))
        .map(str::to_owned)
        .collect()
}

/// Stage 4: sentences of one line, each inheriting the line's languages.
pub fn stage4_extract_sentences(line: &LabeledLine) -> Vec<LabeledLine> {
    extract_sentences(&line.text)
        .into_iter()
        .map(|text| LabeledLine {
            text,
            known_languages: line.known_languages.clone(),
        })
        .collect()
}

/// The language winning strictly more than half of the votes, if any.
pub fn absolute_majority(votes: &[LanguageCode]) -> Option<&LanguageCode> {
    let mut counts: HashMap<&LanguageCode, usize> = HashMap::new();
    for v in votes {
        *counts.entry(v).or_default() += 1;
    }
    counts
        .into_iter()
        .find(|&(_, c)| 2 * c > votes.len())
        .map(|(code, _)| code)
}

/// Stage 5: per-word restricted identification and absolute-majority labeling.
pub fn stage5_label_sentences(
    sentences: Vec<LabeledLine>,
    id: &Identifier,
) -> Result<Vec<LabeledSentence>> {
    let registry = id.registry();
    let labeled = sentences
        .into_par_iter()
        .map(|sentence| {
            let candidates = id
                .restricted_candidates(sentence.known_languages.iter().map(LanguageCode::as_str))?;
            let winners = id.word_winners(&sentence.text, &candidates);
            Ok(absolute_majority(&winners)
                .filter(|code| registry.is_relevant(code.as_str()))
                .cloned()
                .map(|language| LabeledSentence {
                    text: sentence.text,
                    language,
                }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(labeled.into_iter().flatten().collect())
}

/// Runs all five stages and counts what survives each of them.
pub fn run_pipeline(
    pages: Vec<Page>,
    id: &Identifier,
    config: &PipelineConfig,
) -> Result<(Vec<LabeledSentence>, PipelineReport)> {
    let mut report = PipelineReport {
        pages_in: pages.len(),
        ..PipelineReport::default()
    };
    let pages = stage1_filter_pages(pages, id, config.min_share)?;
    report.pages_retained = pages.len();
    report.lines_total = count_lines(&pages);

    let lines = stage2_dedup_lines(&pages)?;
    report.lines_unique = lines.len();

    let lines = stage3_filter_lines(lines, id, config.min_share)?;
    report.lines_retained = lines.len();

    let sentences: Vec<LabeledLine> = lines.iter().flat_map(stage4_extract_sentences).collect();
    report.sentences_extracted = sentences.len();
    let sentences = dedup_labeled(sentences);
    report.sentences_unique = sentences.len();

    let labeled = stage5_label_sentences(sentences, id)?;
    report.sentences_labeled = labeled.len();
    Ok((labeled, report))
}

/// Reads pages from a `url<TAB>base64(text)` file or from a directory of
/// `.txt` files (the file name stands in for the URL, read in name order).
pub fn read_pages(path: impl AsRef<Path>) -> Result<Vec<Page>> {
    let path = path.as_ref();
    if path.is_dir() {
        let entries = std::fs::read_dir(path).map_err(|e| Error::io(path, e))?;
        let mut files = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(path, e))?;
            let p = entry.path();
            if p.is_file() && p.extension().is_some_and(|e| e == "txt") {
                files.push(p);
            }
        }
        files.sort();
        files
            .into_iter()
            .map(|p| {
                let url = p
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                Ok(Page::new(url, read_utf8(&p)?))
            })
            .collect()
    } else {
        let text = read_utf8(path)?;
        let mut pages = Vec::new();
        for (lineno, line) in numbered_lines(&text) {
            if line.trim().is_empty() {
                continue;
            }
            let (url, encoded) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(path, lineno, "expected url<TAB>base64(text)"))?;
            let bytes = base64::engine::general_purpose::STANDARD
                .decode(encoded.trim())
                .map_err(|e| Error::parse(path, lineno, format!("bad base64: {e}")))?;
            let text = String::from_utf8(bytes).map_err(|e| {
                Error::parse(
                    path,
                    lineno,
                    format!(
                        "page text is not UTF-8 (byte {})",
                        e.utf8_error().valid_up_to()
                    ),
                )
            })?;
            pages.push(Page::new(url, text));
        }
        Ok(pages)
    }
}

/// Encodes pages in the `url<TAB>base64(text)` format.
pub fn pages_to_tsv(pages: &[Page]) -> String {
    let mut out = String::new();
    for page in pages {
        let encoded = base64::engine::general_purpose::STANDARD.encode(page.text.as_bytes());
        let _ = writeln!(out, "{}\t{encoded}", page.url);
    }
    out
}

pub fn sentences_to_tsv(sentences: &[LabeledSentence]) -> String {
    let mut out = String::new();
    for s in sentences {
        let _ = writeln!(out, "{}\t{}", s.text, s.language);
    }
    out
}

pub fn write_sentences(sentences: &[LabeledSentence], path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &sentences_to_tsv(sentences))
}

pub fn write_report(report: &PipelineReport, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &report.to_tsv())
}
