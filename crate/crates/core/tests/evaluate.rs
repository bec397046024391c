use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use titleval_core::report::ReportFormat;
use titleval_core::{
    evaluate, render, AnnotatedField, EmbeddingMatrix, EntityMention, Error, EvalRecord, Metric, MetricConfig,
};

fn record(id: &str, reference: &str, hyps: &[(&str, &str)]) -> EvalRecord {
    EvalRecord {
        id: id.into(),
        source: AnnotatedField::from_text(&format!("we study {reference} in depth")),
        reference_title: AnnotatedField::from_text(reference),
        hypotheses: hyps
            .iter()
            .map(|(s, h)| (s.to_string(), AnnotatedField::from_text(h)))
            .collect(),
    }
}

fn hand_scored() -> Vec<EvalRecord> {
    vec![
        record("a", "neural title generation", &[("sys", "title generation")]),
        record("b", "graph neural networks", &[("sys", "graph kernels")]),
        record("c", "machine translation", &[("sys", "machine translation")]),
    ]
}

fn lexical_config() -> MetricConfig {
    MetricConfig {
        metrics: vec![Metric::Rouge, Metric::Meteor],
        ..MetricConfig::default()
    }
}

#[test]
fn hand_scored_fixture() {
    let report = evaluate(&hand_scored(), &lexical_config()).unwrap();
    let close = |col: &str, want: f64| {
        let got = report.value("sys", col).unwrap();
        assert!((got - want).abs() < 1e-9, "{col}: {got} vs {want}");
    };
    close("ROUGE-1", (0.8 + 0.4 + 1.0) / 3.0 * 100.0);
    close("ROUGE-2", (2.0 / 3.0 + 0.0 + 1.0) / 3.0 * 100.0);
    close("ROUGE-L", (0.8 + 0.4 + 1.0) / 3.0 * 100.0);
    // Each record: F_mean = 10PR/(R+9P), times 1 - 0.5 (chunks/m)^3.
    let a = 20.0 / 29.0 * (1.0 - 0.5 / 8.0);
    let b = 10.0 / 29.0 * 0.5;
    let c = 1.0 - 0.5 / 8.0;
    close("METEOR", (a + b + c) / 3.0 * 100.0);
    assert_eq!(report.record_count, 3);
}

fn identity_corpus() -> Vec<EvalRecord> {
    let titles = [
        "BERT for Scientific Title Generation",
        "Graph Neural Networks on ACL Anthology",
        "Evaluating PEGASUS Summaries",
    ];
    titles
        .iter()
        .enumerate()
        .map(|(i, title)| {
            let mut field = AnnotatedField::from_text(title);
            let tokens = field.tokens.clone().unwrap();
            let toks = tokens.tokens();
            field.entities = Some(vec![EntityMention::from_tokens(&toks[..1], (0, 1))]);
            let rows = |seed: usize| -> Vec<Vec<f32>> {
                (0..toks.len())
                    .map(|k| (0..6).map(|d| ((k * 7 + d * 3 + seed) % 11) as f32 - 5.0).collect())
                    .collect()
            };
            field.embeddings = vec![
                EmbeddingMatrix::new("bert-base-uncased", rows(1)),
                EmbeddingMatrix::new("allenai/scibert_scivocab_uncased", rows(2)),
            ];
            let mut hypotheses = IndexMap::new();
            hypotheses.insert("copy".to_string(), field.clone());
            EvalRecord {
                id: format!("id{i}"),
                source: AnnotatedField::from_text(&format!("Abstract mentioning {title}")),
                reference_title: field,
                hypotheses,
            }
        })
        .collect()
}

#[test]
fn identical_titles_score_100_except_meteor() {
    let config = MetricConfig {
        metrics: Metric::ALL.to_vec(),
        ..MetricConfig::default()
    };
    let report = evaluate(&identity_corpus(), &config).unwrap();
    for (col, value) in report.columns.iter().zip(&report.values[0]) {
        let v = value.unwrap();
        if col == "METEOR" {
            assert!(v < 100.0 && v > 90.0, "{v}");
        } else {
            assert!((v - 100.0).abs() < 1e-9, "{col}: {v}");
        }
    }
}

#[test]
fn record_order_does_not_change_the_report() {
    let mut corpus = hand_scored();
    corpus.extend(identity_corpus().into_iter().map(|mut r| {
        let h = r.hypotheses.swap_remove("copy").unwrap();
        r.hypotheses.insert("sys".into(), h);
        r
    }));
    let config = lexical_config();
    let base = render(&evaluate(&corpus, &config).unwrap(), ReportFormat::Json).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        corpus.shuffle(&mut rng);
        let again = render(&evaluate(&corpus, &config).unwrap(), ReportFormat::Json).unwrap();
        assert_eq!(base, again);
    }
}

#[test]
fn truncation_matches_pre_truncated_corpus() {
    let corpus = hand_scored();
    let config = MetricConfig {
        truncate_hyp: Some(1),
        ..lexical_config()
    };
    let truncated: Vec<EvalRecord> = corpus
        .iter()
        .map(|r| EvalRecord {
            hypotheses: r.hypotheses.iter().map(|(k, v)| (k.clone(), v.truncated(1))).collect(),
            ..r.clone()
        })
        .collect();
    let a = evaluate(&corpus, &config).unwrap();
    let b = evaluate(&truncated, &lexical_config()).unwrap();
    assert_eq!(a.values, b.values);
    assert_ne!(a.config_fingerprint, b.config_fingerprint);
}

#[test]
fn systems_are_sorted_and_selectable() {
    let corpus = vec![
        record("a", "x y z", &[("zeta", "x y"), ("alpha", "z")]),
        record("b", "p q", &[("zeta", "p"), ("alpha", "q")]),
    ];
    let report = evaluate(&corpus, &lexical_config()).unwrap();
    assert_eq!(report.systems, ["alpha", "zeta"]);

    let only = MetricConfig {
        systems: Some(vec!["zeta".into()]),
        ..lexical_config()
    };
    assert_eq!(evaluate(&corpus, &only).unwrap().systems, ["zeta"]);
}

#[test]
fn missing_inputs_are_reported() {
    let mut corpus = hand_scored();
    corpus[1].hypotheses.clear();
    assert!(matches!(
        evaluate(&corpus, &lexical_config()),
        Err(Error::MissingHypothesis { ref record, .. }) if record == "b"
    ));

    let config = MetricConfig {
        metrics: vec![Metric::MoverScore],
        ..MetricConfig::default()
    };
    let err = evaluate(&hand_scored(), &config).unwrap_err();
    assert!(err.to_string().contains("moverscore"), "{err}");

    let config = MetricConfig {
        systems: Some(vec!["ghost".into()]),
        ..lexical_config()
    };
    assert!(evaluate(&hand_scored(), &config).is_err());
    assert!(evaluate(&[], &lexical_config()).is_err());
}
