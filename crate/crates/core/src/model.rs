//! Per-language feature models: training with a relative-frequency cutoff
//! and the on-disk model directory.
//!
//! A model directory holds `manifest.tsv` and one `models/<code>.<domain>.tsv`
//! file per language and feature domain. Model files contain
//! `feature<TAB>score` lines sorted by feature, where the score is the
//! negative base-10 logarithm of the feature's relative frequency.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::ngram::{ngram_slices, pad, tokenize, FeatureDomain, HeliParams};
use crate::registry::{Language, LanguageCode, LanguageRegistry};
use crate::util::{numbered_lines, read_utf8, write_file};

pub const MANIFEST_FILE: &str = "manifest.tsv";
pub const MODELS_DIR: &str = "models";

/// Scores are kept at 10 significant digits so that a model written to disk
/// and read back is bit-identical to the one in memory.
pub fn quantize_score(score: f64) -> f64 {
    let q: f64 = format!("{score:.9e}")
        .parse()
        .expect("formatted float parses");
    // -log10(1) is -0.0
    if q == 0.0 {
        0.0
    } else {
        q
    }
}

/// Features of one domain and their scores.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DomainModel {
    pub scores: HashMap<String, f64>,
    /// Number of feature occurrences seen in training, before the cutoff.
    pub total: u64,
}

impl DomainModel {
    fn from_counts(counts: HashMap<String, u64>, cutoff: f64) -> Self {
        let total: u64 = counts.values().sum();
        let scores = counts
            .into_iter()
            .filter_map(|(feature, count)| {
                let relative = count as f64 / total as f64;
                (relative >= cutoff).then(|| (feature, quantize_score(-relative.log10())))
            })
            .collect();
        DomainModel { scores, total }
    }

    pub fn get(&self, feature: &str) -> Option<f64> {
        self.scores.get(feature).copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    fn sorted(&self) -> Vec<(&str, f64)> {
        let mut rows: Vec<(&str, f64)> =
            self.scores.iter().map(|(f, s)| (f.as_str(), *s)).collect();
        rows.sort_unstable_by(|a, b| a.0.cmp(b.0));
        rows
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageModel {
    pub language: LanguageCode,
    /// Indexed by [`FeatureDomain::slot`]; the word slot stays empty when
    /// word features are disabled.
    domains: Vec<DomainModel>,
}

impl LanguageModel {
    pub fn empty(language: LanguageCode, params: &HeliParams) -> Self {
        LanguageModel {
            language,
            domains: vec![DomainModel::default(); params.n_max + 1],
        }
    }

    pub fn domain(&self, domain: FeatureDomain) -> &DomainModel {
        &self.domains[domain.slot()]
    }

    pub fn domain_mut(&mut self, domain: FeatureDomain) -> &mut DomainModel {
        &mut self.domains[domain.slot()]
    }

    /// Counts features over `corpus` and applies the cutoff.
    pub fn train(corpus: &Corpus, params: &HeliParams) -> Self {
        let mut counts: Vec<HashMap<String, u64>> = vec![HashMap::new(); params.n_max + 1];
        let mut bump = |slot: usize, feature: &str| {
            let map = &mut counts[slot];
            match map.get_mut(feature) {
                Some(c) => *c += 1,
                None => {
                    map.insert(feature.to_owned(), 1);
                }
            }
        };
        for sentence in &corpus.sentences {
            for word in tokenize(sentence) {
                let padded = pad(&word);
                if params.use_words {
                    bump(FeatureDomain::Word.slot(), &padded);
                }
                for n in 1..=params.n_max {
                    for gram in ngram_slices(&padded, n) {
                        bump(n, gram);
                    }
                }
            }
        }
        let domains = counts
            .into_iter()
            .map(|c| DomainModel::from_counts(c, params.cutoff))
            .collect();
        LanguageModel {
            language: corpus.language.clone(),
            domains,
        }
    }
}

/// Trained models for a set of languages sharing one parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSet {
    pub params: HeliParams,
    pub registry: LanguageRegistry,
    /// Sorted by registry position.
    models: Vec<LanguageModel>,
}

impl ModelSet {
    /// Assembles a model set, checking that every model is registered and
    /// appears once. Models are reordered into registry order.
    pub fn new(
        params: HeliParams,
        registry: LanguageRegistry,
        mut models: Vec<LanguageModel>,
    ) -> Result<Self> {
        params.validate()?;
        let mut seen = HashSet::new();
        for model in &models {
            registry.index_of(model.language.as_str())?;
            if !seen.insert(model.language.clone()) {
                return Err(Error::DuplicateLanguage(model.language.to_string()));
            }
            if model.domains.len() != params.n_max + 1 {
                return Err(Error::InvalidParams(format!(
                    "model for {} has {} domain slots, expected {}",
                    model.language,
                    model.domains.len(),
                    params.n_max + 1
                )));
            }
        }
        models.sort_by_key(|m| registry.position(m.language.as_str()));
        Ok(ModelSet {
            params,
            registry,
            models,
        })
    }

    pub fn models(&self) -> &[LanguageModel] {
        &self.models
    }

    pub fn model(&self, code: &str) -> Option<&LanguageModel> {
        self.models.iter().find(|m| m.language.as_str() == code)
    }

    pub fn languages(&self) -> impl Iterator<Item = &Language> {
        self.models
            .iter()
            .map(|m| self.registry.get(m.language.as_str()).expect("validated"))
    }

    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        save_models(self, dir.as_ref())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        load_models(dir.as_ref())
    }
}

/// Trains one model per corpus. Languages are trained in parallel.
pub fn train_models(
    corpora: &[Corpus],
    params: HeliParams,
    registry: LanguageRegistry,
) -> Result<ModelSet> {
    params.validate()?;
    if let Some(warning) = params.penalty_warning() {
        log::warn!("{warning}");
    }
    let mut seen = HashSet::new();
    for corpus in corpora {
        registry.index_of(corpus.language.as_str())?;
        if !seen.insert(&corpus.language) {
            return Err(Error::DuplicateLanguage(corpus.language.to_string()));
        }
    }
    let models = corpora
        .par_iter()
        .map(|c| LanguageModel::train(c, &params))
        .collect();
    ModelSet::new(params, registry, models)
}

fn model_file_name(code: &LanguageCode, domain: FeatureDomain) -> String {
    format!("{MODELS_DIR}/{code}.{domain}.tsv")
}

pub fn save_models(set: &ModelSet, dir: &Path) -> Result<()> {
    let models_dir = dir.join(MODELS_DIR);
    std::fs::create_dir_all(&models_dir).map_err(|e| Error::io(&models_dir, e))?;

    let p = &set.params;
    let mut manifest = String::from("# heli model set\n");
    let _ = writeln!(manifest, "param\tn_max\t{}", p.n_max);
    let _ = writeln!(manifest, "param\tcutoff\t{}", p.cutoff);
    let _ = writeln!(manifest, "param\tpenalty\t{}", p.penalty);
    let _ = writeln!(manifest, "param\tuse_words\t{}", u8::from(p.use_words));
    for lang in &set.registry {
        let _ = writeln!(
            manifest,
            "language\t{}\t{}\t{}\t{}",
            lang.code,
            lang.name,
            u8::from(lang.relevant),
            u8::from(lang.cjk)
        );
    }

    for model in &set.models {
        for domain in p.domains() {
            let file = model_file_name(&model.language, domain);
            let dm = model.domain(domain);
            let mut body = String::new();
            for (feature, score) in dm.sorted() {
                let _ = writeln!(body, "{feature}\t{score}");
            }
            write_file(&dir.join(&file), &body)?;
            let _ = writeln!(
                manifest,
                "model\t{}\t{}\t{}\t{}",
                model.language, domain, dm.total, file
            );
        }
    }
    write_file(&dir.join(MANIFEST_FILE), &manifest)
}

pub fn load_models(dir: &Path) -> Result<ModelSet> {
    let manifest_path = dir.join(MANIFEST_FILE);
    if !manifest_path.is_file() {
        return Err(Error::MissingManifest(dir.to_path_buf()));
    }
    let text = read_utf8(&manifest_path)?;
    let bad = |line: usize, msg: String| Error::parse(&manifest_path, line, msg);

    let mut n_max = None;
    let mut cutoff = None;
    let mut penalty = None;
    let mut use_words = None;
    let mut registry = LanguageRegistry::new();
    let mut entries: Vec<(usize, LanguageCode, FeatureDomain, u64, PathBuf)> = Vec::new();

    for (lineno, line) in numbered_lines(&text) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        match (fields[0], fields.len()) {
            ("param", 3) => {
                let value = fields[2];
                let num = |v: &str| {
                    v.parse::<f64>()
                        .map_err(|_| bad(lineno, format!("bad number {v:?}")))
                };
                match fields[1] {
                    "n_max" => {
                        n_max = Some(
                            value
                                .parse::<usize>()
                                .map_err(|_| bad(lineno, format!("bad n_max {value:?}")))?,
                        )
                    }
                    "cutoff" => cutoff = Some(num(value)?),
                    "penalty" => penalty = Some(num(value)?),
                    "use_words" => {
                        use_words = Some(match value {
                            "0" => false,
                            "1" => true,
                            _ => return Err(bad(lineno, format!("bad use_words {value:?}"))),
                        })
                    }
                    other => return Err(bad(lineno, format!("unknown parameter {other:?}"))),
                }
            }
            ("language", 5) => {
                let code = LanguageCode::new(fields[1]).map_err(|e| bad(lineno, e.to_string()))?;
                let flag = |v: &str| match v {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    _ => Err(bad(lineno, format!("bad flag {v:?}"))),
                };
                let mut lang = Language::new(code, fields[2], flag(fields[3])?);
                lang.cjk = flag(fields[4])?;
                registry
                    .push(lang)
                    .map_err(|e| bad(lineno, e.to_string()))?;
            }
            ("model", 5) => {
                let code = LanguageCode::new(fields[1]).map_err(|e| bad(lineno, e.to_string()))?;
                let domain: FeatureDomain = fields[2]
                    .parse()
                    .map_err(|e: Error| bad(lineno, e.to_string()))?;
                let total = fields[3]
                    .parse::<u64>()
                    .map_err(|_| bad(lineno, format!("bad total {:?}", fields[3])))?;
                entries.push((lineno, code, domain, total, PathBuf::from(fields[4])));
            }
            _ => return Err(bad(lineno, format!("unrecognized manifest line {line:?}"))),
        }
    }

    let missing = |what: &str| bad(0, format!("manifest lacks parameter {what}"));
    let params = HeliParams {
        n_max: n_max.ok_or_else(|| missing("n_max"))?,
        cutoff: cutoff.ok_or_else(|| missing("cutoff"))?,
        penalty: penalty.ok_or_else(|| missing("penalty"))?,
        use_words: use_words.ok_or_else(|| missing("use_words"))?,
    };
    params.validate()?;
    let score_bound = quantize_score(params.max_score());

    let mut models: Vec<LanguageModel> = Vec::new();
    let mut by_code: HashMap<LanguageCode, usize> = HashMap::new();
    for (lineno, code, domain, total, file) in entries {
        registry
            .index_of(code.as_str())
            .map_err(|e| bad(lineno, e.to_string()))?;
        if domain.slot() > params.n_max || (domain == FeatureDomain::Word && !params.use_words) {
            return Err(bad(
                lineno,
                format!("domain {domain} not allowed by parameters"),
            ));
        }
        let idx = *by_code.entry(code.clone()).or_insert_with(|| {
            models.push(LanguageModel::empty(code.clone(), &params));
            models.len() - 1
        });
        let path = dir.join(&file);
        let scores = read_model_file(&path, score_bound)?;
        let slot = models[idx].domain_mut(domain);
        if slot.total != 0 || !slot.scores.is_empty() {
            return Err(bad(
                lineno,
                format!("duplicate model entry for {code}.{domain}"),
            ));
        }
        *slot = DomainModel { scores, total };
    }

    ModelSet::new(params, registry, models)
}

fn read_model_file(path: &Path, score_bound: f64) -> Result<HashMap<String, f64>> {
    let text = read_utf8(path)?;
    let mut scores = HashMap::new();
    let mut previous: Option<&str> = None;
    for (lineno, line) in numbered_lines(&text) {
        let Some((feature, score)) = line.split_once('\t') else {
            return Err(Error::parse(path, lineno, "expected feature<TAB>score"));
        };
        let score: f64 = score
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad score {score:?}")))?;
        if !(0.0..=score_bound).contains(&score) {
            return Err(Error::parse(
                path,
                lineno,
                format!("score {score} outside [0, {score_bound}]"),
            ));
        }
        if previous.is_some_and(|p| p >= feature) {
            return Err(Error::parse(
                path,
                lineno,
                "features are not in sorted order",
            ));
        }
        previous = Some(feature);
        scores.insert(feature.to_owned(), score);
    }
    Ok(scores)
}
