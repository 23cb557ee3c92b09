use std::path::Path;
use std::process::{Command, Output};

use lexred_core::selector::Mlp;
use lexred_core::store::FeatureRecord;
use lexred_core::{FeatureStore, Raster, SelectorModel, CONCAT_DIM};

fn lexred(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lexred")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = lexred(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn quickstart(root: &Path, config: &Path) {
    let corpus = root.join("corpus");
    let features = root.join("features");
    let cfg = ["--config", s(config)];
    ok(&[&["synth", "--out", s(&corpus)], &cfg[..]].concat());
    ok(&["extract", "--manifest", s(&corpus.join("manifest.csv")), "--out", s(&features)]);
    ok(&["compat", "--store", s(&features.join("train.lxfs")), "--out", s(&root.join("labels.csv"))]);
    ok(&[
        &[
            "train",
            "--store",
            s(&features.join("train.lxfs")),
            "--labels",
            s(&root.join("labels.csv")),
            "--out",
            s(&root.join("selector.lxrd")),
        ],
        &cfg[..],
    ]
    .concat());
    ok(&[
        "evaluate",
        "--lexicon",
        s(&features.join("train.lxfs")),
        "--test",
        s(&features.join("test.lxfs")),
        "--model",
        s(&root.join("selector.lxrd")),
        "--out",
        s(&root.join("eval")),
    ]);
}

#[test]
fn quickstart_writes_all_metric_tables_reproducibly() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let config = a.path().join("run.conf");
    std::fs::write(&config, "# shared by synth and train\nseed = 42\n").unwrap();
    quickstart(a.path(), &config);
    quickstart(b.path(), &config);

    let eval = a.path().join("eval");
    for name in ["dcg_table.csv", "pr_adaptive.csv", "dor_adaptive.csv", "fig7_overlay.csv"] {
        let text = std::fs::read_to_string(eval.join(name)).unwrap();
        assert!(text.lines().count() > 1, "{name} is empty");
        let other = std::fs::read(b.path().join("eval").join(name)).unwrap();
        assert_eq!(text.as_bytes(), other, "{name} differs between runs");
    }
    for name in ["labels.csv", "sorted_cm.csv", "train_report.csv", "selector.lxrd"] {
        assert_eq!(
            std::fs::read(a.path().join(name)).unwrap(),
            std::fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
    let table = std::fs::read_to_string(eval.join("dcg_table.csv")).unwrap();
    assert_eq!(table.lines().count(), 6);
}

#[test]
fn usage_errors_exit_1() {
    let out = lexred(&["evaluate", "--lexicon", "a", "--test", "b", "--out", "c"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--model") && err.contains("Usage"), "{err}");

    let out = lexred(&["synth", "--out", "x", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));

    assert_eq!(lexred(&[]).status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    std::fs::write(&conf, "colour = blue\n").unwrap();
    let out = lexred(&["synth", "--out", s(dir.path()), "--config", s(&conf)]);
    assert_eq!(out.status.code(), Some(1));

    let out = lexred(&["synth", "--out", s(dir.path()), "--families", "grid,triangles"]);
    assert_eq!(out.status.code(), Some(1));

    assert_eq!(lexred(&["--help"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    let out = lexred(&["extract", "--manifest", s(&missing), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));

    let junk = dir.path().join("junk.lxfs");
    std::fs::write(&junk, b"definitely not a store").unwrap();
    let out = lexred(&["compat", "--store", s(&junk), "--out", s(&dir.path().join("l.csv"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn command_line_overrides_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("c.conf");
    std::fs::write(&conf, "classes_per_family = 2\nsamples-per-class = 4\nfamilies = grid\n").unwrap();
    let out = dir.path().join("corpus");
    let text = ok(&["synth", "--config", s(&conf), "--out", s(&out), "--samples-per-class", "5"]);
    assert!(text.contains("wrote 10 images in 2 classes"), "{text}");
}

fn lexicon_of(n: usize, dir: &Path) -> (String, String) {
    let records = (0..n)
        .map(|i| FeatureRecord {
            id: format!("word{i:04}"),
            label: (i % 20) as u32,
            values: (0..CONCAT_DIM)
                .map(|k| ((i * 7919 + k * 104_729) % 1000) as f32 / 1000.0)
                .collect(),
        })
        .collect();
    let store = FeatureStore::from_records((0..20).map(|c| format!("w{c}")).collect(), records).unwrap();
    let model = SelectorModel::new(Mlp::zeros(CONCAT_DIM, 4, 3), store.norm_stats());
    let (lex, mdl) = (dir.join("lexicon.lxfs"), dir.join("model.lxrd"));
    store.write(&lex).unwrap();
    model.save(&mdl).unwrap();
    (s(&lex).to_string(), s(&mdl).to_string())
}

#[test]
fn reduce_prints_n_entries_and_reduction() {
    let dir = tempfile::tempdir().unwrap();
    let (lex, model) = lexicon_of(1000, dir.path());
    let query = dir.path().join("query.png");
    Raster::from_fn(30, 24, |x, y| (4..26).contains(&x) && (3..21).contains(&y) && (x + y) % 7 != 0)
        .pad(3)
        .to_gray()
        .save(&query)
        .unwrap();
    let text = ok(&["reduce", "--lexicon", &lex, "--model", &model, "--query", s(&query), "--n", "50"]);
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with(|c: char| c.is_ascii_digit())).collect();
    assert_eq!(rows.len(), 50);
    assert!(text.contains("descriptor: loci"), "{text}");
    assert!(text.trim_end().ends_with("degree of reduction: 0.95"), "{text}");

    let text = ok(&[
        "reduce", "--lexicon", &lex, "--model", &model, "--query", s(&query), "--n", "1000", "--method", "zoning",
    ]);
    assert!(text.trim_end().ends_with("degree of reduction: 0"));

    let out = lexred(&["reduce", "--lexicon", &lex, "--model", &model, "--query", s(&query), "--n", "1001"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn ingested_manifest_elsewhere_uses_absolute_paths() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("scans");
    for (label, k) in [("alpha", 3usize), ("beta", 5)] {
        std::fs::create_dir_all(data.join(label)).unwrap();
        for i in 0..4 {
            Raster::from_fn(20 + i, 16 + k, |x, y| (x * k + y) % 9 < 5)
                .pad(2)
                .to_gray()
                .save(data.join(label).join(format!("{i}.png")))
                .unwrap();
        }
    }
    std::fs::write(data.join("broken.png"), b"not an image").unwrap();
    let manifest = dir.path().join("elsewhere").join("m.csv");
    std::fs::create_dir_all(manifest.parent().unwrap()).unwrap();
    let out = lexred(&["ingest", "--dir", s(&data), "--out", s(&manifest), "--labels", "folder"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("broken.png"));
    let text = std::fs::read_to_string(&manifest).unwrap();
    assert_eq!(text.lines().count(), 9);
    ok(&["extract", "--manifest", s(&manifest), "--out", s(&dir.path().join("f"))]);
    let train = FeatureStore::read(&dir.path().join("f/train.lxfs")).unwrap();
    let test = FeatureStore::read(&dir.path().join("f/test.lxfs")).unwrap();
    assert_eq!(train.len() + test.len(), 8);
}
