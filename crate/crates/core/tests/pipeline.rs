mod common;

use lexred_core::corpus::{read_gray, Family};
use lexred_core::pipeline::{evaluate_stores, Method, Reducer};
use lexred_core::selector::Mlp;
use lexred_core::store::FeatureRecord;
use lexred_core::{Error, FeatureStore, SelectorModel, CONCAT_DIM};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn concat(store: &FeatureStore, i: usize) -> Vec<f64> {
    store.records()[i].values.iter().map(|&v| v as f64).collect()
}

fn recall_at(reducer: &Reducer, store: &FeatureStore, q: usize, n: usize, method: Method) -> f64 {
    let label = store.label_of(q);
    let reduced = reducer
        .reduce_features(&store.records()[q].id, &concat(store, q), n, method)
        .unwrap();
    let hits = reduced.entries.iter().filter(|e| e.label == label).count();
    hits as f64 / reducer.lexicon().class_count(label) as f64
}

#[test]
fn contour_queries_route_better_than_zoning() {
    let dir = tempfile::tempdir().unwrap();
    let run = common::quickstart(dir.path(), 42);
    let reducer = Reducer::new(&run.train, &run.model).unwrap();
    let mut checked = 0;
    for q in 0..run.test.len() {
        if Family::of_label(run.test.label_of(q)) != Some(Family::Contour) {
            continue;
        }
        let a = recall_at(&reducer, &run.test, q, 20, Method::Adaptive);
        let z = recall_at(&reducer, &run.test, q, 20, Method::FixedZoning);
        assert!(a >= z, "{}: {a} < {z}", run.test.records()[q].id);
        checked += 1;
    }
    assert_eq!(checked, 25);
    let q = run.test.position("contour01/002").unwrap();
    assert_eq!(recall_at(&reducer, &run.test, q, 20, Method::Adaptive), 1.0);
    assert_eq!(recall_at(&reducer, &run.test, q, 20, Method::FixedZoning), 0.25);
}

#[test]
fn full_ranking_and_identity_retrieval() {
    let dir = tempfile::tempdir().unwrap();
    let run = common::quickstart(dir.path(), 42);
    let reducer = Reducer::new(&run.train, &run.model).unwrap();
    let n = run.train.len();
    for q in (0..run.test.len()).step_by(5) {
        for method in Method::ALL {
            let reduced = reducer
                .reduce_features(&run.test.records()[q].id, &concat(&run.test, q), n, method)
                .unwrap();
            assert_eq!(reduced.entries.len(), n);
            assert_eq!(reduced.degree_of_reduction(), 0.0);
            assert!(reduced.entries.windows(2).all(|w| w[0].distance <= w[1].distance));
            assert_eq!(recall_at(&reducer, &run.test, q, n, method), 1.0);
            assert_eq!(reduced.chosen_descriptor.is_some(), method == Method::Adaptive);
            if method == Method::Adaptive {
                let predicted = run.model.predict(&concat(&run.test, q)).unwrap().descriptor;
                assert_eq!(reduced.chosen_descriptor, Some(predicted));
            }
        }
    }

    // A lexicon image fed back in as a raw query finds itself at distance 0.
    let mut found = 0;
    for id in ["grid04/000", "contour07/003", "blocks09/005", "grid04/001", "contour07/004", "blocks09/006"] {
        let Some(i) = run.train.position(id) else { continue };
        found += 1;
        let raw = read_gray(&dir.path().join("corpus").join(format!("{id}.png"))).unwrap();
        for method in Method::ALL {
            let reduced = reducer.reduce_image("query", &raw, 1, method).unwrap();
            assert_eq!(reduced.entries.len(), 1);
            assert_eq!(reduced.entries[0].distance, 0.0);
            // Shapes sharing an outline can tie exactly under Fourier; the
            // lowest id among the zero-distance entries then comes first.
            let full = reducer.reduce_image("query", &raw, n, method).unwrap();
            let zero: Vec<&str> = full
                .entries
                .iter()
                .take_while(|e| e.distance == 0.0)
                .map(|e| e.id.as_str())
                .collect();
            assert!(zero.contains(&id), "{method}");
            assert_eq!(reduced.entries[0].id, zero[0]);
            if method != Method::FixedFourier {
                assert_eq!(zero, vec![run.train.records()[i].id.as_str()], "{method}");
            }
        }
    }
    assert!(found >= 3);
}

fn random_lexicon(n: usize, seed: u64) -> FeatureStore {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let records = (0..n)
        .map(|i| FeatureRecord {
            id: format!("w{i:04}"),
            label: (i % 25) as u32,
            values: (0..CONCAT_DIM).map(|_| rng.gen_range(0.0f32..1.0)).collect(),
        })
        .collect();
    FeatureStore::from_records((0..25).map(|c| format!("c{c}")).collect(), records).unwrap()
}

fn blank_model(lexicon: &FeatureStore) -> SelectorModel {
    SelectorModel::new(Mlp::zeros(CONCAT_DIM, 4, 3), lexicon.norm_stats())
}

#[test]
fn fifty_of_a_thousand() {
    let lexicon = random_lexicon(1000, 1);
    let model = blank_model(&lexicon);
    let reducer = Reducer::new(&lexicon, &model).unwrap();
    let query = vec![0.5; CONCAT_DIM];
    for method in Method::ALL {
        let reduced = reducer.reduce_features("q", &query, 50, method).unwrap();
        assert_eq!(reduced.entries.len(), 50);
        assert_eq!(reduced.degree_of_reduction(), 0.95);
    }
    assert!(matches!(
        reducer.reduce_features("q", &query, 0, Method::Adaptive),
        Err(Error::InvalidConfig(_))
    ));
}

#[test]
fn mismatched_artifacts_are_rejected() {
    let lexicon = random_lexicon(60, 1);
    let other = random_lexicon(60, 2);
    let foreign = blank_model(&other);
    assert!(matches!(Reducer::new(&lexicon, &foreign), Err(Error::Incompatible(_))));

    let mut params = blank_model(&lexicon);
    params.descriptor_params.contour_points += 1;
    let err = Reducer::new(&lexicon, &params).err().unwrap();
    assert!(matches!(err, Error::Incompatible(_)));
    assert!(err.to_string().starts_with("incompatible artifacts"));

    let narrow = SelectorModel::new(Mlp::zeros(10, 4, 3), lexicon.norm_stats().slice(0..10));
    assert!(matches!(Reducer::new(&lexicon, &narrow), Err(Error::Incompatible(_))));
}

#[test]
fn single_class_corpus_scores_perfectly() {
    let lexicon = random_lexicon(40, 3);
    let records: Vec<FeatureRecord> = lexicon
        .records()
        .iter()
        .map(|r| FeatureRecord { label: 0, ..r.clone() })
        .collect();
    let (train, test) = records.split_at(30);
    let train = FeatureStore::from_records(vec!["only".into()], train.to_vec()).unwrap();
    let test = FeatureStore::from_records(vec!["only".into()], test.to_vec()).unwrap();
    let model = blank_model(&train);
    let eval = evaluate_stores(&train, &test, &model, &[Method::FixedFourier], &[1, 10, 30]).unwrap();
    assert_eq!(eval.mean_dcg(Method::FixedFourier), 1.0);
    assert_eq!(eval.summary(Method::FixedFourier).n_queries, 10);
}

#[test]
fn unknown_test_labels_are_reported_not_scored() {
    let lexicon = random_lexicon(50, 4);
    let mut records = random_lexicon(10, 5).records().to_vec();
    records[3].label = 1;
    let labels = vec!["c0".to_string(), "never_seen".to_string()];
    for r in &mut records {
        r.label = r.label.min(1);
    }
    let test = FeatureStore::from_records(labels, records).unwrap();
    let model = blank_model(&lexicon);
    let eval = evaluate_stores(&lexicon, &test, &model, &Method::ALL, &[1, 50]).unwrap();
    let unevaluable = test.records().iter().filter(|r| r.label == 1).count();
    assert_eq!(eval.unevaluable.len(), unevaluable);
    assert_eq!(eval.summary(Method::Adaptive).n_queries, 10 - unevaluable);
    assert!(unevaluable > 0);
}

#[test]
fn evaluation_writes_every_table() {
    let dir = tempfile::tempdir().unwrap();
    common::quickstart(dir.path(), 42);
    let out = dir.path().join("eval");
    let table = std::fs::read_to_string(out.join("dcg_table.csv")).unwrap();
    let rows: Vec<&str> = table.lines().collect();
    assert_eq!(rows[0], "method,mean_dcg,n_queries,n_unevaluable");
    assert_eq!(rows.len(), 6);
    for row in &rows[1..] {
        let dcg: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&dcg));
    }
    for m in Method::ALL {
        for prefix in ["pr", "dor"] {
            assert!(out.join(format!("{prefix}_{}.csv", m.name())).is_file());
        }
    }
    let overlay = std::fs::read_to_string(out.join("fig7_overlay.csv")).unwrap();
    assert!(overlay.starts_with("n,recall_adaptive,recall_concat\n"));
}
