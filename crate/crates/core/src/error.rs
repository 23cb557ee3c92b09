use std::path::PathBuf;

use thiserror::Error;

use crate::descriptors::DescriptorId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("blank image")]
    BlankImage,

    #[error("degenerate shape: largest component is {width}x{height}, need at least 8x8")]
    DegenerateShape { width: usize, height: usize },

    #[error("degenerate contour: boundary has {0} pixels, need at least 8")]
    DegenerateContour(usize),

    #[error("query class absent from lexicon")]
    ClassAbsent,

    #[error("dimension mismatch: expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty lexicon")]
    EmptyLexicon,

    #[error("no images found in {0}")]
    EmptyDirectory(PathBuf),

    #[error("duplicate sample id {0:?}")]
    DuplicateId(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("descriptor {0} never appears as a training label; cannot learn a 3-way decision")]
    MissingClass(DescriptorId),

    #[error("non-finite input value at index {0}")]
    NonFinite(usize),

    #[error("not a selector model")]
    NotAModel,

    #[error("not a feature store")]
    NotAStore,

    #[error("{kind} version mismatch: file has version {found}, this build reads version {expected}")]
    VersionMismatch {
        kind: &'static str,
        found: u32,
        expected: u32,
    },

    #[error("truncated {0} file")]
    Truncated(&'static str),

    #[error("incompatible artifacts: {0}")]
    Incompatible(String),

    #[error("malformed {what}: {detail}")]
    Malformed { what: &'static str, detail: String },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn malformed(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Malformed {
            what,
            detail: detail.into(),
        }
    }
}
