mod support;

use heli::model::quantize_score;
use heli::{train_models, Corpus, HeliParams, LanguageCode, ModelSet};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use support::synth::random_instance;

fn corpora(codes: &[String], sentences: &[Vec<String>], times: usize) -> Vec<Corpus> {
    codes
        .iter()
        .zip(sentences)
        .map(|(c, s)| {
            let repeated: Vec<&String> = s
                .iter()
                .flat_map(|x| std::iter::repeat_n(x, times))
                .collect();
            Corpus::from_sentences(LanguageCode::new(c).unwrap(), repeated)
        })
        .collect()
}

fn registry_for(codes: &[String]) -> heli::LanguageRegistry {
    heli::LanguageRegistry::from_languages(
        codes
            .iter()
            .map(|c| heli::Language::new(LanguageCode::new(c).unwrap(), c.clone(), true)),
    )
    .unwrap()
}

#[test]
fn replication_leaves_scores_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let inst = random_instance(&mut rng);
        let params = support::heli_params(inst.params);
        let reg = registry_for(&inst.codes);
        let once =
            train_models(&corpora(&inst.codes, &inst.corpora, 1), params, reg.clone()).unwrap();
        let twice = train_models(&corpora(&inst.codes, &inst.corpora, 2), params, reg).unwrap();
        for (a, b) in once.models().iter().zip(twice.models()) {
            for d in params.domains() {
                assert_eq!(a.domain(d).scores, b.domain(d).scores);
                assert_eq!(2 * a.domain(d).total, b.domain(d).total);
            }
        }
    }
}

#[test]
fn cutoff_is_monotone_and_bounds_scores() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let inst = random_instance(&mut rng);
        let reg = registry_for(&inst.codes);
        let cs = corpora(&inst.codes, &inst.corpora, 1);
        let train = |cutoff: f64| {
            let params = HeliParams {
                cutoff,
                ..support::heli_params(inst.params)
            };
            train_models(&cs, params, reg.clone()).unwrap()
        };
        let tiny = train(1e-12);
        let loose = train(0.05);
        let strict = train(0.2);
        for ((t, l), s) in tiny
            .models()
            .iter()
            .zip(loose.models())
            .zip(strict.models())
        {
            for d in tiny.params.domains() {
                // every observed feature survives a vanishing cutoff
                if t.domain(d).total > 0 {
                    assert!(!t.domain(d).is_empty());
                }
                for f in s.domain(d).scores.keys() {
                    assert!(l.domain(d).scores.contains_key(f));
                }
                for f in l.domain(d).scores.keys() {
                    assert!(t.domain(d).scores.contains_key(f));
                }
                for (set, cutoff) in [(&loose, 0.05_f64), (&strict, 0.2)] {
                    let bound = quantize_score(-cutoff.log10());
                    let m = set.model(t.language.as_str()).unwrap();
                    for s in m.domain(d).scores.values() {
                        assert!((0.0..=bound).contains(s));
                    }
                }
            }
        }
    }
}

#[test]
fn save_load_is_bit_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let inst = random_instance(&mut rng);
        let set = train_models(
            &corpora(&inst.codes, &inst.corpora, 1),
            support::heli_params(inst.params),
            registry_for(&inst.codes),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        set.save(dir.path()).unwrap();
        let loaded = ModelSet::load(dir.path()).unwrap();
        assert_eq!(loaded, set);
        for (a, b) in set.models().iter().zip(loaded.models()) {
            for d in set.params.domains() {
                for (f, s) in &a.domain(d).scores {
                    assert_eq!(s.to_bits(), b.domain(d).get(f).unwrap().to_bits());
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn saved_files_are_sorted(sentences in proptest::collection::vec("[a-zõäöü ]{1,20}", 1..8)) {
        let codes = vec!["vro".to_string()];
        let set = train_models(&corpora(&codes, &[sentences], 1), HeliParams::default(), registry_for(&codes)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        set.save(dir.path()).unwrap();
        for d in set.params.domains() {
            let text = std::fs::read_to_string(dir.path().join(format!("models/vro.{d}.tsv"))).unwrap();
            let features: Vec<&str> = text.lines().map(|l| l.split('\t').next().unwrap()).collect();
            let mut sorted = features.clone();
            sorted.sort();
            prop_assert_eq!(features, sorted);
        }
        prop_assert_eq!(ModelSet::load(dir.path()).unwrap(), set);
    }
}
