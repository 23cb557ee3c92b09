//! Lexicon reduction for isolated subword shapes with per-query descriptor
//! selection.
//!
//! Each training shape is scored under three global descriptors
//! (characteristic loci, contour Fourier magnitudes and 8x8 zoning) by how well
//! that descriptor retrieves its own class from the training set, measured
//! with normalized DCG. A small feedforward network learns to predict the
//! winning descriptor from the concatenated features, and at query time the
//! predicted descriptor alone is used to rank the lexicon and keep the `n`
//! nearest entries.

mod binio;
pub mod compat;
pub mod corpus;
pub mod descriptors;
pub mod error;
pub mod pipeline;
pub mod raster;
pub mod retrieval;
pub mod selector;
pub mod store;

pub use compat::{label_training_set, CompatLabels, CompatibilityRecord};
pub use corpus::{CorpusManifest, ShapeImage, Split};
pub use descriptors::{extract_all, DescriptorId, ExtractedFeatures, FeatureVector, CONCAT_DIM};
pub use error::{Error, Result};
pub use pipeline::{evaluate, ExperimentConfig, Method, Reducer};
pub use raster::Raster;
pub use retrieval::{dcg, degree_of_reduction, precision_recall, RetrievalIndex, RetrievalList};
pub use selector::{SelectorModel, TrainParams};
pub use store::{FeatureBlock, FeatureStore, NormStats};
