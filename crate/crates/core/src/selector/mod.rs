//! Predicts the most compatible descriptor for an image from its
//! concatenated features.

mod mlp;
mod model;
mod train;

pub use mlp::{softmax, Forward, Mlp};
pub use model::{Prediction, SelectorModel, MODEL_MAGIC, MODEL_VERSION};
pub use train::{train, TrainParams, TrainingReport};

/// Selector accuracy observed on a 1000-class corpus of scanned printed
/// subwords. A reference point only; synthetic corpora land elsewhere.
pub const REFERENCE_SELECTOR_ACCURACY: f64 = 0.715;
