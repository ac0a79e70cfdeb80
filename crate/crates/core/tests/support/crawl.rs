//! A hand-traced six-page crawl and a generator of random crawls.

use heli::{
    train_models, Corpus, HeliParams, Identifier, Language, LanguageCode, LanguageRegistry, Page,
    PipelineReport,
};
use rand::seq::IndexedRandom;
use rand::Rng;

use super::synth::SynthLanguage;

fn code(c: &str) -> LanguageCode {
    LanguageCode::new(c).unwrap()
}

/// vep and vro are relevant, fin and eng are not. Every word of the fixture
/// belongs to exactly one training vocabulary. In the vro corpus "ma" and
/// "elä" are frequent (score ≈ 0.505); every fin word occurs once (score 1).
pub fn fixture_identifier() -> Identifier {
    let registry = LanguageRegistry::from_languages([
        Language::new(code("vep"), "Veps", true),
        Language::new(code("vro"), "Võro", true),
        Language::new(code("fin"), "Finnish", false),
        Language::new(code("eng"), "English", false),
    ])
    .unwrap();
    let corpora = [
        (
            "vep",
            vec!["mö elädam kodis", "kirjutam tarinoid", "sid mal vepsän"],
        ),
        (
            "vro",
            vec![
                "ma elä",
                "ma elä",
                "ma elä",
                "ma elä",
                "ma elä",
                "kodon kirota jutte",
                "võro maal sääl",
            ],
        ),
        (
            "fin",
            vec![
                "minä asun suomessa täällä",
                "kirjoitan tarinoita kotona",
                "hyvä ja on",
            ],
        ),
        ("eng", vec!["the house is big", "we write stories at home"]),
    ];
    let corpora: Vec<Corpus> = corpora
        .iter()
        .map(|(c, s)| Corpus::from_sentences(code(c), s))
        .collect();
    Identifier::new(train_models(&corpora, HeliParams::default(), registry).unwrap())
}

pub const LINE_A: &str = "Mö elädam kodis. Mö kirjutam tarinoid.";
pub const LINE_B: &str = "Sid mal vepsän kodis!";
pub const LINE_SHARED: &str = "Kodis mal elädam.";
pub const LINE_C: &str = "Ma elä kodon. Ma kirota jutte.";
pub const LINE_D: &str = "Võro maal sääl kodon!";
pub const LINE_F: &str = "Minä asun suomessa ja kirjoitan tarinoita kotona.";
pub const LINE_H: &str = "Hyvä on täällä.";
pub const LINE_SPLIT: &str = "Ma elä suomessa täällä.";
pub const LINE_D2: &str = "Võro maal sääl kodon! 20:35 .";

pub fn fixture_pages() -> Vec<Page> {
    let p = |url: &str, lines: &[&str]| Page::new(url, lines.join("\n"));
    vec![
        // pure vep
        p("p1", &[LINE_A, LINE_B, LINE_SHARED]),
        // vro page sharing one line with p1
        p("p2", &[LINE_C, LINE_SHARED, LINE_D]),
        // Finnish with a sliver of vep below the 2% threshold
        p(
            "p3",
            &[
                LINE_F,
                "Hyvä on täällä ja minä kirjoitan tarinoita kotona.",
                "Minä asun kotona ja kirjoitan tarinoita suomessa.",
                "Täällä on hyvä ja minä asun suomessa kotona.",
                "Kirjoitan tarinoita ja asun täällä suomessa.",
                "Mal.",
            ],
        ),
        // mostly Finnish, but enough vep to keep it
        p("p4", &[LINE_F, "", LINE_H, LINE_B]),
        // no relevant language at all
        p("p5", &["We write stories at home.", "The house is big."]),
        // vro page repeating a p2 line, with a 2-2 split line and a letterless fragment
        p("p6", &[LINE_C, LINE_SPLIT, LINE_D2]),
    ]
}

pub fn fixture_report() -> PipelineReport {
    PipelineReport {
        pages_in: 6,
        pages_retained: 4,
        lines_total: 12,
        lines_unique: 9,
        lines_retained: 7,
        sentences_extracted: 9,
        sentences_unique: 8,
        sentences_labeled: 7,
    }
}

/// Expected stage-5 output in order.
pub fn fixture_sentences() -> Vec<(&'static str, &'static str)> {
    vec![
        ("Mö elädam kodis.", "vep"),
        ("Mö kirjutam tarinoid.", "vep"),
        ("Sid mal vepsän kodis!", "vep"),
        ("Kodis mal elädam.", "vep"),
        ("Ma elä kodon.", "vro"),
        ("Ma kirota jutte.", "vro"),
        ("Võro maal sääl kodon!", "vro"),
    ]
}

/// Random pages mixing sentences of several synthetic languages, with
/// repeated lines across pages.
pub fn random_crawl<R: Rng>(rng: &mut R, languages: &[SynthLanguage]) -> Vec<Page> {
    let mut pool: Vec<String> = Vec::new();
    let n_pages = rng.random_range(0..=12);
    (0..n_pages)
        .map(|i| {
            let n_lines = rng.random_range(0..=8);
            let main = languages.choose(rng).unwrap();
            let lines: Vec<String> = (0..n_lines)
                .map(|_| {
                    if !pool.is_empty() && rng.random_bool(0.25) {
                        return pool.choose(rng).unwrap().clone();
                    }
                    let lang = if rng.random_bool(0.7) {
                        main
                    } else {
                        languages.choose(rng).unwrap()
                    };
                    let n_sentences = rng.random_range(1..=3);
                    let mut line: Vec<String> =
                        (0..n_sentences).map(|_| lang.sentence(rng, 0.1)).collect();
                    if rng.random_bool(0.1) {
                        line.push("12:30 .".into());
                    }
                    let line = line.join(" ");
                    pool.push(line.clone());
                    line
                })
                .collect();
            Page::new(format!("page{i}"), lines.join("\n"))
        })
        .collect()
}
