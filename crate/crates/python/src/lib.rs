//! Python bindings: `import pyheli`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use heli::eval::ConfusionMatrix;
use heli::pipeline::{self, PipelineConfig};
use heli::{Corpus, HeliParams, LanguageCode, LanguageRegistry, ModelSet, Page};
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: heli::Error) -> PyErr {
    match e {
        heli::Error::Io { .. } | heli::Error::MissingManifest(_) => {
            PyOSError::new_err(e.to_string())
        }
        other => PyValueError::new_err(other.to_string()),
    }
}

type Shares = (Vec<(String, f64)>, Option<String>);
type PipelineOutput = (Vec<(String, String)>, Vec<(&'static str, usize)>);

fn code(c: &str) -> PyResult<LanguageCode> {
    LanguageCode::new(c).map_err(py_err)
}

/// Lowercased words of `text`, split at every non-letter.
#[pyfunction]
fn tokenize(text: &str) -> Vec<String> {
    heli::tokenize(text)
}

/// Character n-grams of a word padded with one space on each side.
#[pyfunction]
fn extract_ngrams(word: &str, n: usize) -> Vec<String> {
    heli::extract_ngrams(word, n)
}

/// Share of non-whitespace characters that are Chinese, Japanese or Korean.
#[pyfunction]
fn cjk_ratio(text: &str) -> f64 {
    heli::cjk_ratio(text)
}

/// Sentences of one line, as used by the corpus pipeline.
#[pyfunction]
fn extract_sentences(line: &str) -> Vec<String> {
    pipeline::extract_sentences(line)
}

/// An ordered set of languages, each flagged relevant or not.
#[pyclass(frozen, from_py_object, name = "Registry")]
#[derive(Clone)]
struct PyRegistry {
    inner: LanguageRegistry,
}

#[pymethods]
impl PyRegistry {
    /// The built-in registry.
    #[staticmethod]
    fn default() -> Self {
        PyRegistry {
            inner: LanguageRegistry::default_uli(),
        }
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PyRegistry {
            inner: LanguageRegistry::load(path).map_err(py_err)?,
        })
    }

    /// Parses `code<TAB>name<TAB>relevant[<TAB>cjk]` lines.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyRegistry {
            inner: LanguageRegistry::parse(text, "<string>".as_ref()).map_err(py_err)?,
        })
    }

    fn codes(&self) -> Vec<String> {
        self.inner.iter().map(|l| l.code.to_string()).collect()
    }

    fn relevant(&self) -> Vec<String> {
        self.inner.relevant().map(|l| l.code.to_string()).collect()
    }

    fn is_relevant(&self, code: &str) -> bool {
        self.inner.is_relevant(code)
    }

    fn to_tsv(&self) -> String {
        self.inner.to_tsv()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __contains__(&self, code: &str) -> bool {
        self.inner.contains(code)
    }

    fn __repr__(&self) -> String {
        format!(
            "Registry({} languages, {} relevant)",
            self.inner.len(),
            self.inner.relevant().count()
        )
    }
}

/// Result of identifying one sentence.
#[pyclass(frozen, get_all, name = "Prediction")]
struct PyPrediction {
    winner: String,
    score: f64,
    /// `(code, score)` for every candidate in registry order; lower is better.
    scores: Vec<(String, f64)>,
    /// Feature domain used for each word (`"word"`, `"1"`..`"n"`), or None.
    domains: Vec<Option<String>>,
}

impl From<heli::Prediction> for PyPrediction {
    fn from(p: heli::Prediction) -> Self {
        PyPrediction {
            winner: p.winner.to_string(),
            score: p.score,
            scores: p
                .scores
                .into_iter()
                .map(|(c, s)| (c.to_string(), s))
                .collect(),
            domains: p
                .domain_trace
                .into_iter()
                .map(|d| d.map(|d| d.to_string()))
                .collect(),
        }
    }
}

#[pymethods]
impl PyPrediction {
    fn __repr__(&self) -> String {
        format!("Prediction(winner={:?}, score={})", self.winner, self.score)
    }
}

/// A trained model set ready for identification.
#[pyclass(frozen, name = "Identifier")]
struct PyIdentifier {
    inner: heli::Identifier,
}

#[pymethods]
impl PyIdentifier {
    /// Trains from `{code: [sentence, ...]}`.
    #[staticmethod]
    #[pyo3(signature = (corpora, registry=None, n_max=6, cutoff=0.0000005, penalty=7.0, use_words=true))]
    fn train(
        py: Python<'_>,
        corpora: BTreeMap<String, Vec<String>>,
        registry: Option<PyRegistry>,
        n_max: usize,
        cutoff: f64,
        penalty: f64,
        use_words: bool,
    ) -> PyResult<Self> {
        let params = HeliParams {
            n_max,
            cutoff,
            penalty,
            use_words,
        };
        let registry = registry.map_or_else(LanguageRegistry::default_uli, |r| r.inner);
        let corpora = corpora
            .into_iter()
            .map(|(c, s)| Ok(Corpus::from_sentences(code(&c)?, s)))
            .collect::<PyResult<Vec<_>>>()?;
        let set = py
            .detach(|| heli::train_models(&corpora, params, registry))
            .map_err(py_err)?;
        Ok(PyIdentifier {
            inner: heli::Identifier::new(set),
        })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PyIdentifier {
            inner: heli::Identifier::new(ModelSet::load(path).map_err(py_err)?),
        })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.model_set().save(path).map_err(py_err)
    }

    fn languages(&self) -> Vec<String> {
        self.inner
            .languages()
            .iter()
            .map(|c| c.to_string())
            .collect()
    }

    fn registry(&self) -> PyRegistry {
        PyRegistry {
            inner: self.inner.registry().clone(),
        }
    }

    /// Identifies a sentence against all languages, or only `candidates`.
    #[pyo3(signature = (sentence, candidates=None))]
    fn identify(&self, sentence: &str, candidates: Option<Vec<String>>) -> PyResult<PyPrediction> {
        let p = match candidates {
            None => self.inner.identify_all(sentence),
            Some(codes) => {
                let cands = self
                    .inner
                    .candidates(codes.iter().map(String::as_str))
                    .map_err(py_err)?;
                self.inner.identify(sentence, &cands)
            }
        };
        Ok(p.into())
    }

    /// Candidates are `allowed_relevant` plus every non-relevant language.
    fn identify_restricted(
        &self,
        sentence: &str,
        allowed_relevant: Vec<String>,
    ) -> PyResult<PyPrediction> {
        self.inner
            .identify_restricted(sentence, allowed_relevant.iter().map(String::as_str))
            .map(Into::into)
            .map_err(py_err)
    }

    /// Identifies many sentences in parallel, keeping their order.
    fn identify_many(&self, py: Python<'_>, sentences: Vec<String>) -> Vec<PyPrediction> {
        use rayon::prelude::*;
        let predictions: Vec<heli::Prediction> = py.detach(|| {
            sentences
                .par_iter()
                .map(|s| self.inner.identify_all(s))
                .collect()
        });
        predictions.into_iter().map(Into::into).collect()
    }

    /// Per-language character shares of a multi-line text and the dominant
    /// relevant language, if its share reaches `min_share`.
    #[pyo3(signature = (text, min_share=0.02))]
    fn identify_set(&self, text: &str, min_share: f64) -> PyResult<Shares> {
        let shares = self
            .inner
            .identify_set(text, &self.inner.all_candidates(), min_share)
            .map_err(py_err)?;
        Ok((
            shares
                .shares
                .into_iter()
                .map(|(c, s)| (c.to_string(), s))
                .collect(),
            shares.dominant.map(|c| c.to_string()),
        ))
    }
}

/// Track scores for aligned gold and predicted labels.
///
/// Returns `{"track1": .., "track2": .., "track3": .., "per_language": {code: (p, r, f1)}}`.
#[pyfunction]
#[pyo3(signature = (gold, predicted, registry=None))]
fn evaluate(
    py: Python<'_>,
    gold: Vec<String>,
    predicted: Vec<String>,
    registry: Option<PyRegistry>,
) -> PyResult<Py<PyAny>> {
    if gold.len() != predicted.len() {
        return Err(PyValueError::new_err(format!(
            "{} gold labels but {} predictions",
            gold.len(),
            predicted.len()
        )));
    }
    let registry = registry.map_or_else(LanguageRegistry::default_uli, |r| r.inner);
    let cm = ConfusionMatrix::from_labels(&gold, &predicted, registry).map_err(py_err)?;
    let scores = cm.scores();
    let out = pyo3::types::PyDict::new(py);
    out.set_item("track1", scores.track1)?;
    out.set_item("track2", scores.track2)?;
    out.set_item("track3", scores.track3)?;
    let per = pyo3::types::PyDict::new(py);
    for (code, prf) in &scores.per_language {
        per.set_item(code.as_str(), (prf.precision, prf.recall, prf.f1))?;
    }
    out.set_item("per_language", per)?;
    out.set_item("confusion", cm.to_tsv())?;
    Ok(out.into_any().unbind())
}

/// Runs the page-to-sentence pipeline over `[(url, text), ...]`.
///
/// Returns `(sentences, report)`: `[(sentence, code), ...]` and per-stage counts.
#[pyfunction]
#[pyo3(signature = (pages, identifier, min_share=0.02))]
fn run_pipeline(
    py: Python<'_>,
    pages: Vec<(String, String)>,
    identifier: &PyIdentifier,
    min_share: f64,
) -> PyResult<PipelineOutput> {
    let pages: Vec<Page> = pages.into_iter().map(|(u, t)| Page::new(u, t)).collect();
    let config = PipelineConfig { min_share };
    let (sentences, report) = py
        .detach(|| heli::run_pipeline(pages, &identifier.inner, &config))
        .map_err(py_err)?;
    Ok((
        sentences
            .into_iter()
            .map(|s| (s.text, s.language.to_string()))
            .collect(),
        report.rows().to_vec(),
    ))
}

#[pymodule]
fn pyheli(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(tokenize, m)?)?;
    m.add_function(wrap_pyfunction!(extract_ngrams, m)?)?;
    m.add_function(wrap_pyfunction!(cjk_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(extract_sentences, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    m.add_class::<PyRegistry>()?;
    m.add_class::<PyIdentifier>()?;
    m.add_class::<PyPrediction>()?;
    Ok(())
}
