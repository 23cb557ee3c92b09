//! Labeled shape corpora: ingestion, preprocessing, and seeded synthesis.

mod ingest;
mod manifest;
mod preprocess;
pub mod synth;

use std::path::Path;

use image::GrayImage;

pub use ingest::{ingest, Diagnostic, IngestOutcome, LabelRule, LABELS_FILE};
pub use manifest::{stratified_split, CorpusManifest, ManifestEntry, Split, DEFAULT_TRAIN_RATIO};
pub use preprocess::{
    binarize, keep_largest_component, label_components, otsu_threshold, preprocess, MIN_SIDE,
};
pub use synth::{synthesize, Family, SynthConfig};

use crate::error::{Error, Result};
use crate::raster::Raster;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Ingested,
    Synthetic,
}

/// A preprocessed subword body: one tight-cropped ink component.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeImage {
    pub id: String,
    pub label: String,
    pub source: Source,
    pub raster: Raster,
}

impl ShapeImage {
    pub fn from_gray(
        id: impl Into<String>,
        label: impl Into<String>,
        source: Source,
        raw: &GrayImage,
    ) -> Result<Self> {
        Ok(ShapeImage {
            id: id.into(),
            label: label.into(),
            source,
            raster: preprocess(raw)?,
        })
    }

    /// Loads and preprocesses the image behind a manifest entry.
    pub fn load(entry: &ManifestEntry, base: &Path, source: Source) -> Result<Self> {
        let raw = read_gray(&base.join(&entry.path))?;
        Self::from_gray(entry.id.clone(), entry.label.clone(), source, &raw)
    }
}

pub fn read_gray(path: &Path) -> Result<GrayImage> {
    image::open(path)
        .map(|img| img.into_luma8())
        .map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })
}
