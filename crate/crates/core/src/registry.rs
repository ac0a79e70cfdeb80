//! Language codes and the registry of candidate languages.
//!
//! A registry is a TSV file with one `code<TAB>name<TAB>relevant` entry per
//! line and an optional fourth `cjk` column. Both flags are written as `0`
//! or `1`; lines starting with `#` are comments. Entry order matters: it is
//! the tie-break order used everywhere a decision between equally scored
//! languages has to be made.

use std::borrow::Borrow;
use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::util::{numbered_lines, read_utf8, write_file};

/// Languages flagged as CJK when a registry line has no explicit `cjk` column.
pub const DEFAULT_CJK_CODES: [&str; 5] = ["cmn", "wuu", "jpn", "kor", "yue"];

const DEFAULT_REGISTRY: &str = include_str!("../data/registry.tsv");

/// A three-letter lowercase language code such as `vro` or `fin`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LanguageCode(String);

impl LanguageCode {
    pub fn new(code: &str) -> Result<Self> {
        if code.len() == 3 && code.bytes().all(|b| b.is_ascii_lowercase()) {
            Ok(LanguageCode(code.to_owned()))
        } else {
            Err(Error::InvalidCode(code.to_owned()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl FromStr for LanguageCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LanguageCode::new(s)
    }
}

impl fmt::Display for LanguageCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for LanguageCode {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for LanguageCode {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Language {
    pub code: LanguageCode,
    pub name: String,
    /// Whether the language is one of the scored (relevant) languages.
    pub relevant: bool,
    /// Whether the language is written in a CJK script.
    pub cjk: bool,
}

impl Language {
    pub fn new(code: LanguageCode, name: impl Into<String>, relevant: bool) -> Self {
        let cjk = DEFAULT_CJK_CODES.contains(&code.as_str());
        Language {
            code,
            name: name.into(),
            relevant,
            cjk,
        }
    }
}

/// Ordered set of languages with O(1) lookup by code.
#[derive(Debug, Clone, Default)]
pub struct LanguageRegistry {
    entries: Vec<Language>,
    index: HashMap<LanguageCode, usize>,
}

impl PartialEq for LanguageRegistry {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl Eq for LanguageRegistry {}

impl LanguageRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_languages(languages: impl IntoIterator<Item = Language>) -> Result<Self> {
        let mut registry = Self::new();
        for language in languages {
            registry.push(language)?;
        }
        Ok(registry)
    }

    /// The shipped registry: the 29 relevant Uralic languages followed by a
    /// starter set of non-relevant languages.
    pub fn default_uli() -> Self {
        Self::parse(DEFAULT_REGISTRY, Path::new("<default registry>"))
            .expect("bundled registry is well formed")
    }

    pub fn push(&mut self, language: Language) -> Result<()> {
        if self.index.contains_key(&language.code) {
            return Err(Error::DuplicateLanguage(language.code.to_string()));
        }
        self.index.insert(language.code.clone(), self.entries.len());
        self.entries.push(language);
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = read_utf8(path)?;
        Self::parse(&text, path)
    }

    /// Parses registry TSV. `origin` is only used in error messages.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut registry = Self::new();
        for (lineno, line) in numbered_lines(text) {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 && fields.len() != 4 {
                return Err(Error::parse(
                    origin,
                    lineno,
                    format!(
                        "expected 3 or 4 tab-separated columns, found {}",
                        fields.len()
                    ),
                ));
            }
            let code = LanguageCode::new(fields[0].trim())
                .map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
            let flag = |s: &str, what: &str| match s.trim() {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(Error::parse(
                    origin,
                    lineno,
                    format!("{what} flag must be 0 or 1, found {other:?}"),
                )),
            };
            let mut language = Language::new(code, fields[1].trim(), flag(fields[2], "relevant")?);
            if let Some(cjk) = fields.get(3) {
                language.cjk = flag(cjk, "cjk")?;
            }
            registry
                .push(language)
                .map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
        }
        Ok(registry)
    }

    /// Serializes to registry TSV. The `cjk` column is only written where it
    /// differs from the default CJK list.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for lang in &self.entries {
            out.push_str(&format!(
                "{}\t{}\t{}",
                lang.code,
                lang.name,
                u8::from(lang.relevant)
            ));
            if lang.cjk != DEFAULT_CJK_CODES.contains(&lang.code.as_str()) {
                out.push_str(&format!("\t{}", u8::from(lang.cjk)));
            }
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_file(path.as_ref(), &self.to_tsv())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Language> {
        self.entries.iter()
    }

    pub fn languages(&self) -> &[Language] {
        &self.entries
    }

    pub fn position(&self, code: &str) -> Option<usize> {
        self.index.get(code).copied()
    }

    pub fn contains(&self, code: &str) -> bool {
        self.index.contains_key(code)
    }

    pub fn get(&self, code: &str) -> Option<&Language> {
        self.position(code).map(|i| &self.entries[i])
    }

    /// Like [`get`](Self::get) but unregistered codes are an error.
    pub fn lookup(&self, code: &str) -> Result<&Language> {
        self.get(code)
            .ok_or_else(|| Error::UnknownLanguage(code.to_owned()))
    }

    pub fn index_of(&self, code: &str) -> Result<usize> {
        self.position(code)
            .ok_or_else(|| Error::UnknownLanguage(code.to_owned()))
    }

    pub fn is_relevant(&self, code: &str) -> bool {
        self.get(code).is_some_and(|l| l.relevant)
    }

    pub fn relevant(&self) -> impl Iterator<Item = &Language> {
        self.entries.iter().filter(|l| l.relevant)
    }

    pub fn non_relevant(&self) -> impl Iterator<Item = &Language> {
        self.entries.iter().filter(|l| !l.relevant)
    }
}

impl<'a> IntoIterator for &'a LanguageRegistry {
    type Item = &'a Language;
    type IntoIter = std::slice::Iter<'a, Language>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}
