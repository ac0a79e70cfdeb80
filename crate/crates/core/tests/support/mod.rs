#![allow(dead_code)]

pub mod crawl;
pub mod oracle;
pub mod synth;

use heli::{
    train_models, Corpus, HeliParams, Identifier, Language, LanguageCode, LanguageRegistry,
};

use oracle::OracleParams;
use synth::{Instance, SynthLanguage};

pub fn heli_params(p: OracleParams) -> HeliParams {
    HeliParams {
        n_max: p.n_max,
        cutoff: p.cutoff,
        penalty: p.penalty,
        use_words: p.use_words,
    }
}

pub fn instance_identifier(inst: &Instance) -> Identifier {
    let registry = LanguageRegistry::from_languages(
        inst.codes
            .iter()
            .map(|c| Language::new(LanguageCode::new(c).unwrap(), c.clone(), true)),
    )
    .unwrap();
    let corpora: Vec<Corpus> = inst
        .codes
        .iter()
        .zip(&inst.corpora)
        .map(|(c, s)| Corpus::from_sentences(LanguageCode::new(c).unwrap(), s))
        .collect();
    Identifier::new(train_models(&corpora, heli_params(inst.params), registry).unwrap())
}

/// Registry over synthetic languages; the first `relevant` are relevant.
pub fn synth_registry(languages: &[SynthLanguage], relevant: usize) -> LanguageRegistry {
    LanguageRegistry::from_languages(languages.iter().enumerate().map(|(i, l)| {
        Language::new(
            LanguageCode::new(&l.code).unwrap(),
            l.code.clone(),
            i < relevant,
        )
    }))
    .unwrap()
}

pub fn synth_corpus(language: &SynthLanguage, sentences: &[String]) -> Corpus {
    Corpus::from_sentences(LanguageCode::new(&language.code).unwrap(), sentences)
}
