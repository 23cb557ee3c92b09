use crate::descriptors::FeatureVector;
use crate::error::{Error, Result};
use crate::store::{FeatureBlock, FeatureStore, NormStats};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankedEntry {
    /// Position of the sample in the lexicon store.
    pub index: usize,
    pub distance: f64,
}

/// A full ranking of the lexicon for one query.
#[derive(Clone, Debug, PartialEq)]
pub struct RetrievalList {
    pub query_id: String,
    pub ranked: Vec<RankedEntry>,
    /// `relevance[i]` is true iff `ranked[i]` shares the query's label.
    pub relevance: Vec<bool>,
    /// Lexicon members sharing the query's label (C).
    pub class_size: usize,
}

impl RetrievalList {
    pub fn len(&self) -> usize {
        self.ranked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }

    pub fn ids<'s>(&self, store: &'s FeatureStore) -> Vec<&'s str> {
        self.ranked
            .iter()
            .map(|e| store.records()[e.index].id.as_str())
            .collect()
    }
}

/// A lexicon block with its features z-scored once up front.
pub struct RetrievalIndex<'a> {
    store: &'a FeatureStore,
    block: FeatureBlock,
    stats: NormStats,
    normalized: Vec<f64>,
}

impl<'a> RetrievalIndex<'a> {
    /// `stats` covers the full concatenated vector; the block's slice is used.
    pub fn new(store: &'a FeatureStore, block: FeatureBlock, stats: &NormStats) -> Result<Self> {
        if store.is_empty() {
            return Err(Error::EmptyLexicon);
        }
        let stats = stats.slice(block.range());
        let dim = block.dim();
        let mut normalized = Vec::with_capacity(store.len() * dim);
        for i in 0..store.len() {
            normalized.extend(stats.apply(store.block(i, block)));
        }
        Ok(RetrievalIndex {
            store,
            block,
            stats,
            normalized,
        })
    }

    pub fn store(&self) -> &'a FeatureStore {
        self.store
    }

    pub fn block(&self) -> FeatureBlock {
        self.block
    }

    /// Ranks the whole lexicon by Euclidean distance to `query`. Query values
    /// are first rounded to the store's f32 precision. Equal distances are
    /// ordered by sample id.
    pub fn rank(&self, query_id: &str, query_label: &str, query: &[f64]) -> Result<RetrievalList> {
        let dim = self.block.dim();
        if query.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: query.len(),
            });
        }
        let rounded: Vec<f64> = query.iter().map(|&v| v as f32 as f64).collect();
        let q = self.stats.apply(&rounded);

        let mut ranked: Vec<RankedEntry> = self
            .normalized
            .chunks_exact(dim)
            .enumerate()
            .map(|(index, row)| {
                let sq: f64 = row.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum();
                RankedEntry {
                    index,
                    distance: sq.sqrt(),
                }
            })
            .collect();
        // Records are stored in id order, so index order is id order.
        ranked.sort_by(|a, b| a.distance.total_cmp(&b.distance).then(a.index.cmp(&b.index)));

        let label = self.store.label_index(query_label);
        let records = self.store.records();
        let relevance: Vec<bool> = ranked
            .iter()
            .map(|e| Some(records[e.index].label) == label)
            .collect();
        let class_size = relevance.iter().filter(|&&g| g).count();
        Ok(RetrievalList {
            query_id: query_id.to_string(),
            ranked,
            relevance,
            class_size,
        })
    }
}

/// One-shot ranking of `query` against `lexicon`, z-scoring with the
/// lexicon's own statistics.
pub fn rank(query: &FeatureVector, query_label: &str, lexicon: &FeatureStore) -> Result<RetrievalList> {
    let index = RetrievalIndex::new(lexicon, FeatureBlock::Single(query.descriptor), &lexicon.norm_stats())?;
    index.rank(&query.image_id, query_label, &query.values)
}
