//! Character n-gram language identification in the HeLI style.
//!
//! * [`registry`] and [`corpus`]: language codes and sentence corpora.
//! * [`ngram`] and [`model`]: features, training and the model directory.
//! * [`identify`]: scoring, CJK handling, restricted and set identification.
//! * [`stream`]: parallel, order-preserving identification of line streams.
//! * [`eval`]: confusion matrices and the three shared-task scores.
//! * [`pipeline`]: the page → line → sentence cleaning funnel.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod identify;
pub mod model;
pub mod ngram;
pub mod pipeline;
pub mod registry;
pub mod stream;
mod util;

pub use corpus::{Corpus, CorpusFormat};
pub use error::{Error, Result};
pub use eval::{ConfusionMatrix, Prf, TrackScores};
pub use identify::{
    apply_cjk_sanity, cjk_ratio, Candidates, Identifier, LanguageShares, Prediction, WordScores,
};
pub use model::{train_models, DomainModel, LanguageModel, ModelSet};
pub use ngram::{extract_ngrams, tokenize, FeatureDomain, HeliParams};
pub use pipeline::{
    run_pipeline, LabeledLine, LabeledSentence, Page, PipelineConfig, PipelineReport,
};
pub use registry::{Language, LanguageCode, LanguageRegistry};
pub use stream::{identify_stream, StreamOptions, StreamStats};
