use std::fmt;
use std::str::FromStr;

use image::GrayImage;

use crate::corpus::{ShapeImage, Source};
use crate::descriptors::{extract_all, DescriptorId, CONCAT_DIM};
use crate::error::{Error, Result};
use crate::retrieval::{RetrievalIndex, RetrievalList};
use crate::selector::SelectorModel;
use crate::store::{FeatureBlock, FeatureStore};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Adaptive,
    FixedLoci,
    FixedFourier,
    FixedZoning,
    Concatenated,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::FixedLoci,
        Method::FixedFourier,
        Method::FixedZoning,
        Method::Concatenated,
        Method::Adaptive,
    ];

    pub fn fixed(d: DescriptorId) -> Method {
        match d {
            DescriptorId::Loci => Method::FixedLoci,
            DescriptorId::Fourier => Method::FixedFourier,
            DescriptorId::Zoning => Method::FixedZoning,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Adaptive => "adaptive",
            Method::FixedLoci => "loci",
            Method::FixedFourier => "fourier",
            Method::FixedZoning => "zoning",
            Method::Concatenated => "concatenated",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReducedEntry {
    pub id: String,
    pub label: String,
    pub distance: f64,
}

/// The `n` lexicon entries closest to a query.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedLexicon {
    pub query_id: String,
    pub method: Method,
    pub n: usize,
    pub entries: Vec<ReducedEntry>,
    /// Set for [`Method::Adaptive`] only.
    pub chosen_descriptor: Option<DescriptorId>,
    pub lexicon_size: usize,
}

impl ReducedLexicon {
    pub fn degree_of_reduction(&self) -> f64 {
        crate::retrieval::degree_of_reduction(self.lexicon_size, self.entries.len())
    }
}

/// A lexicon plus selector, ready to answer reduction queries.
pub struct Reducer<'a> {
    lexicon: &'a FeatureStore,
    model: &'a SelectorModel,
    // Loci, Fourier, Zoning, Concatenated.
    indexes: Vec<RetrievalIndex<'a>>,
}

impl<'a> Reducer<'a> {
    /// Fails with [`Error::Incompatible`] unless the model was trained against
    /// this lexicon's descriptor parameters and normalization statistics.
    pub fn new(lexicon: &'a FeatureStore, model: &'a SelectorModel) -> Result<Self> {
        if model.descriptor_params.digest() != lexicon.params().digest() {
            return Err(Error::Incompatible(
                "model and lexicon use different descriptor parameters".into(),
            ));
        }
        if model.input_dim() != CONCAT_DIM {
            return Err(Error::Incompatible(format!(
                "model expects {} inputs, lexicon provides {CONCAT_DIM}",
                model.input_dim()
            )));
        }
        let stats = lexicon.norm_stats();
        if stats.to_f32_precision() != model.norm {
            return Err(Error::Incompatible(
                "model normalization statistics do not match this lexicon".into(),
            ));
        }
        let blocks = DescriptorId::ALL
            .iter()
            .map(|&d| FeatureBlock::Single(d))
            .chain([FeatureBlock::Concatenated]);
        let indexes = blocks
            .map(|b| RetrievalIndex::new(lexicon, b, &stats))
            .collect::<Result<_>>()?;
        Ok(Reducer {
            lexicon,
            model,
            indexes,
        })
    }

    pub fn lexicon(&self) -> &'a FeatureStore {
        self.lexicon
    }

    /// Block searched by `method` for this query, and the selector's pick
    /// when adaptive.
    pub fn route(&self, method: Method, concatenated: &[f64]) -> Result<(FeatureBlock, Option<DescriptorId>)> {
        Ok(match method {
            Method::Adaptive => {
                let d = self.model.predict(concatenated)?.descriptor;
                (FeatureBlock::Single(d), Some(d))
            }
            Method::FixedLoci => (FeatureBlock::Single(DescriptorId::Loci), None),
            Method::FixedFourier => (FeatureBlock::Single(DescriptorId::Fourier), None),
            Method::FixedZoning => (FeatureBlock::Single(DescriptorId::Zoning), None),
            Method::Concatenated => (FeatureBlock::Concatenated, None),
        })
    }

    fn index(&self, block: FeatureBlock) -> &RetrievalIndex<'a> {
        match block {
            FeatureBlock::Single(d) => &self.indexes[d.index()],
            FeatureBlock::Concatenated => &self.indexes[3],
        }
    }

    /// Full ranking of the lexicon for a query given by its concatenated features.
    pub fn rank(
        &self,
        query_id: &str,
        query_label: &str,
        concatenated: &[f64],
        method: Method,
    ) -> Result<(RetrievalList, Option<DescriptorId>)> {
        if concatenated.len() != CONCAT_DIM {
            return Err(Error::DimensionMismatch {
                expected: CONCAT_DIM,
                got: concatenated.len(),
            });
        }
        let (block, chosen) = self.route(method, concatenated)?;
        let list = self
            .index(block)
            .rank(query_id, query_label, &concatenated[block.range()])?;
        Ok((list, chosen))
    }

    pub fn reduce_features(
        &self,
        query_id: &str,
        concatenated: &[f64],
        n: usize,
        method: Method,
    ) -> Result<ReducedLexicon> {
        if n == 0 {
            return Err(Error::InvalidConfig("reduced lexicon size must be at least 1".into()));
        }
        let (list, chosen) = self.rank(query_id, "", concatenated, method)?;
        let records = self.lexicon.records();
        let entries = list
            .ranked
            .iter()
            .take(n)
            .map(|e| ReducedEntry {
                id: records[e.index].id.clone(),
                label: self.lexicon.label_of(e.index).to_string(),
                distance: e.distance,
            })
            .collect();
        Ok(ReducedLexicon {
            query_id: query_id.to_string(),
            method,
            n,
            entries,
            chosen_descriptor: chosen,
            lexicon_size: self.lexicon.len(),
        })
    }

    /// Preprocesses a raw query image, extracts its features and reduces.
    pub fn reduce_image(&self, query_id: &str, raw: &GrayImage, n: usize, method: Method) -> Result<ReducedLexicon> {
        let image = ShapeImage::from_gray(query_id, "", Source::Ingested, raw)?;
        let features = extract_all(&image)?;
        self.reduce_features(query_id, &features.concatenated(), n, method)
    }
}
