use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use lexred_core::corpus::{ingest, read_gray, synthesize, Family, LabelRule, Source, Split, SynthConfig};
use lexred_core::pipeline::{extract_split, train_selector, validate_grid, ExperimentConfig, Method, Reducer};
use lexred_core::{evaluate, label_training_set, CompatLabels, CorpusManifest, FeatureStore, SelectorModel, TrainParams};

use crate::args::*;
use crate::UsageError;

fn beside(path: &Path, name: &str) -> PathBuf {
    path.parent().unwrap_or(Path::new(".")).join(name)
}

fn parse_list<T>(text: &str, what: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(s).ok_or_else(|| UsageError(format!("invalid {what} {s:?}")).into()))
        .collect()
}

pub fn synth(a: SynthArgs) -> Result<()> {
    let families = parse_list(&a.families, "family", |s| Family::ALL.into_iter().find(|f| f.name() == s))?;
    let config = SynthConfig {
        families,
        classes_per_family: a.classes_per_family,
        samples_per_class: a.samples_per_class,
        seed: a.seed,
        train_ratio: a.train_ratio,
    };
    let manifest = synthesize(&config, &a.out)?;
    println!(
        "wrote {} images in {} classes to {}",
        manifest.entries.len(),
        manifest.labels().len(),
        a.out.display()
    );
    Ok(())
}

pub fn ingest_dir(a: IngestArgs) -> Result<()> {
    let rule = match a.labels.as_str() {
        "folder" => LabelRule::FolderName,
        "auto" => LabelRule::Auto,
        table => LabelRule::Manifest(table.into()),
    };
    let outcome = ingest(&a.dir, &rule, a.train_ratio, a.seed)?;
    for d in &outcome.diagnostics {
        eprintln!("skipped {}: {}", d.path.display(), d.reason);
    }
    let out = a.out.unwrap_or_else(|| a.dir.join("manifest.csv"));
    let mut manifest = outcome.manifest;
    // Entry paths are relative to the scanned directory; keep them so only
    // when the manifest lives there.
    if out.parent() != Some(a.dir.as_path()) {
        let root = std::path::absolute(&a.dir)?;
        for e in &mut manifest.entries {
            e.path = root.join(&e.path);
        }
    }
    manifest.write_csv(&out)?;
    println!(
        "{} entries, {} labels, {} skipped -> {}",
        manifest.entries.len(),
        manifest.labels().len(),
        outcome.diagnostics.len(),
        out.display()
    );
    Ok(())
}

pub fn extract(a: ExtractArgs) -> Result<()> {
    let manifest = CorpusManifest::read_csv(&a.manifest)?;
    let base = beside(&a.manifest, "");
    std::fs::create_dir_all(&a.out)?;
    for (split, name) in [(Split::Train, "train.lxfs"), (Split::Test, "test.lxfs")] {
        let (store, diagnostics) = extract_split(&manifest, &base, split, Source::Ingested)?;
        for d in &diagnostics {
            eprintln!("skipped {}: {}", d.path.display(), d.reason);
        }
        let path = a.out.join(name);
        store.write(&path)?;
        println!("{split}: {} samples -> {}", store.len(), path.display());
    }
    Ok(())
}

pub fn compat(a: CompatArgs) -> Result<()> {
    let store = FeatureStore::read(&a.store)?;
    let labels = label_training_set(&store)?;
    labels.write_csv(&a.out)?;
    let curves = a.curves.unwrap_or_else(|| beside(&a.out, "sorted_cm.csv"));
    labels.write_sorted_curves_csv(&curves)?;
    let counts = labels.best_counts();
    println!(
        "best descriptor counts: loci {} fourier {} zoning {}",
        counts[0], counts[1], counts[2]
    );
    Ok(())
}

pub fn train(a: TrainArgs) -> Result<()> {
    let store = FeatureStore::read(&a.store)?;
    let labels = CompatLabels::read_csv(&a.labels)?;
    let params = TrainParams {
        hidden: a.hidden,
        batch_size: a.batch_size,
        learning_rate: a.learning_rate,
        max_epochs: a.max_epochs,
        patience: a.patience,
        holdout_fraction: a.holdout,
    };
    let (model, report) = train_selector(&store, &labels, a.seed, &params)?;
    model.save(&a.out)?;
    let report_path = a.report.unwrap_or_else(|| beside(&a.out, "train_report.csv"));
    report.write_csv(&report_path)?;
    println!(
        "{} epochs, holdout accuracy {:.3} ({} samples), train accuracy {:.3}",
        report.epochs_run, report.holdout_accuracy, report.holdout_size, report.train_accuracy
    );
    Ok(())
}

pub fn reduce(a: ReduceArgs) -> Result<()> {
    let method: Method = a.method.parse().map_err(|_| UsageError(format!("unknown method {:?}", a.method)))?;
    let lexicon = FeatureStore::read(&a.lexicon)?;
    let model = SelectorModel::load(&a.model)?;
    if a.n == 0 || a.n > lexicon.len() {
        bail!(UsageError(format!("--n must be in 1..={}", lexicon.len())));
    }
    let reducer = Reducer::new(&lexicon, &model)?;
    let raw = read_gray(&a.query)?;
    let id = a.query.display().to_string();
    let reduced = reducer.reduce_image(&id, &raw, a.n, method)?;
    if let Some(d) = reduced.chosen_descriptor {
        println!("descriptor: {d}");
    }
    println!("rank,id,label,distance");
    for (i, e) in reduced.entries.iter().enumerate() {
        println!("{},{},{},{}", i + 1, e.id, e.label, e.distance);
    }
    println!("degree of reduction: {}", reduced.degree_of_reduction());
    Ok(())
}

pub fn evaluate_run(a: EvaluateArgs) -> Result<()> {
    let methods = parse_list(&a.methods, "method", |s| s.parse::<Method>().ok())?;
    let n_grid = match &a.grid {
        Some(g) => Some(parse_list(g, "cutoff", |s| s.parse::<usize>().ok())?),
        None => None,
    };
    if let Some(g) = &n_grid {
        let size = FeatureStore::read(&a.lexicon)
            .with_context(|| format!("reading {}", a.lexicon.display()))?
            .len();
        validate_grid(g, size).map_err(|e| UsageError(e.to_string()))?;
    }
    let eval = evaluate(&ExperimentConfig {
        lexicon: a.lexicon,
        test: a.test,
        model: a.model,
        methods,
        n_grid,
        out_dir: a.out.clone(),
    })?;
    for m in &eval.methods {
        println!("{:>12}  mean dcg {:.4}", m.name(), eval.mean_dcg(*m));
    }
    if !eval.unevaluable.is_empty() {
        println!("{} unevaluable queries", eval.unevaluable.len());
    }
    println!("metrics -> {}", a.out.display());
    Ok(())
}
