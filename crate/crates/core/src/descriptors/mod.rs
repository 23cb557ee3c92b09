//! The three global shape descriptors and their fixed concatenation.

mod fourier;
mod loci;
mod zoning;

use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};

pub use fourier::{
    fourier_features, resample_closed, trace_boundary, CONTOUR_POINTS, FOURIER_DIM, HARMONICS,
    MIN_CONTOUR,
};
pub use loci::{loci_code, loci_features, LOCI_CAP, LOCI_DIM};
pub use zoning::{zone_span, zoning_features, ZONING_DIM, ZONING_GRID};

use crate::corpus::ShapeImage;
use crate::error::{Error, Result};
use crate::raster::Raster;

/// Length of the Loci ‖ Fourier ‖ Zoning concatenation.
pub const CONCAT_DIM: usize = LOCI_DIM + FOURIER_DIM + ZONING_DIM;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DescriptorId {
    Loci = 0,
    Fourier = 1,
    Zoning = 2,
}

impl DescriptorId {
    /// All descriptors in their fixed order, which is also the tie-break order.
    pub const ALL: [DescriptorId; 3] = [DescriptorId::Loci, DescriptorId::Fourier, DescriptorId::Zoning];

    pub fn code(self) -> u32 {
        self as u32
    }

    pub fn from_code(code: u32) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn dim(self) -> usize {
        match self {
            DescriptorId::Loci => LOCI_DIM,
            DescriptorId::Fourier => FOURIER_DIM,
            DescriptorId::Zoning => ZONING_DIM,
        }
    }

    /// Position of this descriptor's block inside the concatenated vector.
    pub fn concat_range(self) -> std::ops::Range<usize> {
        match self {
            DescriptorId::Loci => 0..LOCI_DIM,
            DescriptorId::Fourier => LOCI_DIM..LOCI_DIM + FOURIER_DIM,
            DescriptorId::Zoning => LOCI_DIM + FOURIER_DIM..CONCAT_DIM,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DescriptorId::Loci => "loci",
            DescriptorId::Fourier => "fourier",
            DescriptorId::Zoning => "zoning",
        }
    }
}

impl fmt::Display for DescriptorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DescriptorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::malformed("descriptor id", s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    pub descriptor: DescriptorId,
    pub image_id: String,
    pub values: Vec<f64>,
}

impl FeatureVector {
    fn new(descriptor: DescriptorId, image_id: &str, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), descriptor.dim(), "{descriptor} dimension");
        FeatureVector {
            descriptor,
            image_id: image_id.to_string(),
            values,
        }
    }
}

/// Parameters every extractor in this build is pinned to. Stores and models
/// carry a digest of this block so mismatched artifacts are refused.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DescriptorParams {
    pub loci_dim: u32,
    pub loci_cap: u32,
    pub contour_points: u32,
    pub harmonics: u32,
    pub zoning_grid: u32,
}

impl DescriptorParams {
    pub const CURRENT: DescriptorParams = DescriptorParams {
        loci_dim: LOCI_DIM as u32,
        loci_cap: LOCI_CAP as u32,
        contour_points: CONTOUR_POINTS as u32,
        harmonics: HARMONICS as u32,
        zoning_grid: ZONING_GRID as u32,
    };

    pub const ENCODED_LEN: usize = 20;

    pub fn to_bytes(&self) -> [u8; Self::ENCODED_LEN] {
        let mut out = [0u8; Self::ENCODED_LEN];
        let fields = [
            self.loci_dim,
            self.loci_cap,
            self.contour_points,
            self.harmonics,
            self.zoning_grid,
        ];
        for (chunk, v) in out.chunks_exact_mut(4).zip(fields) {
            chunk.copy_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8; Self::ENCODED_LEN]) -> Self {
        let f = |i: usize| u32::from_le_bytes(bytes[i * 4..i * 4 + 4].try_into().unwrap());
        DescriptorParams {
            loci_dim: f(0),
            loci_cap: f(1),
            contour_points: f(2),
            harmonics: f(3),
            zoning_grid: f(4),
        }
    }

    pub fn digest(&self) -> u64 {
        let hash = Sha256::digest(self.to_bytes());
        u64::from_le_bytes(hash[..8].try_into().unwrap())
    }
}

/// All three descriptors of one image.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtractedFeatures {
    pub image_id: String,
    pub loci: FeatureVector,
    pub fourier: FeatureVector,
    pub zoning: FeatureVector,
}

impl ExtractedFeatures {
    pub fn get(&self, d: DescriptorId) -> &FeatureVector {
        match d {
            DescriptorId::Loci => &self.loci,
            DescriptorId::Fourier => &self.fourier,
            DescriptorId::Zoning => &self.zoning,
        }
    }

    /// Loci ‖ Fourier ‖ Zoning.
    pub fn concatenated(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(CONCAT_DIM);
        v.extend_from_slice(&self.loci.values);
        v.extend_from_slice(&self.fourier.values);
        v.extend_from_slice(&self.zoning.values);
        v
    }
}

pub fn extract(raster: &Raster, image_id: &str, d: DescriptorId) -> Result<FeatureVector> {
    let values = match d {
        DescriptorId::Loci => loci_features(raster),
        DescriptorId::Fourier => fourier_features(raster)?,
        DescriptorId::Zoning => zoning_features(raster),
    };
    Ok(FeatureVector::new(d, image_id, values))
}

pub fn extract_loci(image: &ShapeImage) -> FeatureVector {
    FeatureVector::new(DescriptorId::Loci, &image.id, loci_features(&image.raster))
}

pub fn extract_fourier(image: &ShapeImage) -> Result<FeatureVector> {
    extract(&image.raster, &image.id, DescriptorId::Fourier)
}

pub fn extract_zoning(image: &ShapeImage) -> FeatureVector {
    FeatureVector::new(DescriptorId::Zoning, &image.id, zoning_features(&image.raster))
}

pub fn extract_all(image: &ShapeImage) -> Result<ExtractedFeatures> {
    Ok(ExtractedFeatures {
        image_id: image.id.clone(),
        loci: extract_loci(image),
        fourier: extract_fourier(image)?,
        zoning: extract_zoning(image),
    })
}
