//! End-to-end lexicon reduction and the evaluation harness.

mod config;
mod evaluate;
mod reduce;

use std::path::Path;

use rayon::prelude::*;

pub use config::parse_key_values;
pub use evaluate::{
    default_grid, evaluate, evaluate_stores, validate_grid, Evaluation, ExperimentConfig,
    MethodSummary, QueryResult,
};
pub use reduce::{Method, ReducedEntry, ReducedLexicon, Reducer};

use crate::compat::CompatLabels;
use crate::corpus::{CorpusManifest, Diagnostic, ShapeImage, Source, Split};
use crate::descriptors::{extract_all, DescriptorId};
use crate::error::{Error, Result};
use crate::selector::{train, SelectorModel, TrainParams, TrainingReport};
use crate::store::FeatureStore;

/// Preprocesses and extracts every manifest entry of `split`. Images that
/// fail are returned as diagnostics instead of aborting the run.
pub fn extract_split(
    manifest: &CorpusManifest,
    base: &Path,
    split: Split,
    source: Source,
) -> Result<(FeatureStore, Vec<Diagnostic>)> {
    let entries: Vec<_> = manifest.split(split).collect();
    let results: Vec<_> = entries
        .par_iter()
        .map(|e| {
            ShapeImage::load(e, base, source)
                .and_then(|img| extract_all(&img).map(|f| (img.label, f)))
                .map_err(|err| Diagnostic {
                    path: e.path.clone(),
                    reason: err.to_string(),
                })
        })
        .collect();
    let mut items = Vec::new();
    let mut diagnostics = Vec::new();
    for r in results {
        match r {
            Ok(item) => items.push(item),
            Err(d) => diagnostics.push(d),
        }
    }
    Ok((FeatureStore::from_features(items)?, diagnostics))
}

/// Pairs each stored sample with its compatibility label, in store order.
pub fn training_rows(store: &FeatureStore, labels: &CompatLabels) -> Result<(Vec<Vec<f64>>, Vec<DescriptorId>)> {
    let by_id: std::collections::HashMap<&str, DescriptorId> = labels
        .records
        .iter()
        .map(|r| (r.image_id.as_str(), r.best))
        .collect();
    let mut xs = Vec::with_capacity(store.len());
    let mut ys = Vec::with_capacity(store.len());
    for rec in store.records() {
        let best = by_id.get(rec.id.as_str()).ok_or_else(|| {
            Error::Incompatible(format!("no compatibility label for training sample {}", rec.id))
        })?;
        xs.push(rec.values.iter().map(|&v| v as f64).collect());
        ys.push(*best);
    }
    Ok((xs, ys))
}

/// Trains the selector on a training store and its compatibility labels.
pub fn train_selector(
    store: &FeatureStore,
    labels: &CompatLabels,
    seed: u64,
    params: &TrainParams,
) -> Result<(SelectorModel, TrainingReport)> {
    let (xs, ys) = training_rows(store, labels)?;
    train(&xs, &ys, seed, params)
}
