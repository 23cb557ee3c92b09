//! Immutable per-split feature store and its binary file format.
//!
//! Layout (little-endian): magic `LXFS`, u32 version, u32 dims for loci,
//! fourier, zoning and the concatenation, u64 descriptor-parameter digest,
//! the label table (u32 count, then u32-length-prefixed UTF-8 strings), u32
//! record count, then per record: id string, u32 label index, the three
//! descriptor blocks and the concatenated block as f32.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use crate::binio::{put_f32s, put_str, put_u32, put_u64, ByteReader};
use crate::descriptors::{DescriptorId, DescriptorParams, ExtractedFeatures, CONCAT_DIM};
use crate::error::{Error, Result};

pub const STORE_MAGIC: &[u8; 4] = b"LXFS";
pub const STORE_VERSION: u32 = 1;
/// Lower bound applied to every per-dimension standard deviation.
pub const STD_FLOOR: f64 = 1e-8;

/// Which slice of the stored features a search runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FeatureBlock {
    Single(DescriptorId),
    Concatenated,
}

impl FeatureBlock {
    pub fn range(self) -> std::ops::Range<usize> {
        match self {
            FeatureBlock::Single(d) => d.concat_range(),
            FeatureBlock::Concatenated => 0..CONCAT_DIM,
        }
    }

    pub fn dim(self) -> usize {
        self.range().len()
    }
}

impl fmt::Display for FeatureBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureBlock::Single(d) => d.fmt(f),
            FeatureBlock::Concatenated => f.write_str("concatenated"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureRecord {
    pub id: String,
    pub label: u32,
    /// Loci ‖ Fourier ‖ Zoning.
    pub values: Vec<f32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureStore {
    labels: Vec<String>,
    records: Vec<FeatureRecord>,
    params: DescriptorParams,
}

impl FeatureStore {
    /// Builds a store from `(label, features)` pairs. Records are kept sorted
    /// by sample id and labels sorted lexicographically.
    pub fn from_features(items: Vec<(String, ExtractedFeatures)>) -> Result<Self> {
        let labels: Vec<String> = items
            .iter()
            .map(|(l, _)| l.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: HashMap<&str, u32> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i as u32))
            .collect();
        let records = items
            .iter()
            .map(|(label, f)| FeatureRecord {
                id: f.image_id.clone(),
                label: index[label.as_str()],
                values: f.concatenated().into_iter().map(|v| v as f32).collect(),
            })
            .collect();
        Self::from_records(labels, records)
    }

    pub fn from_records(labels: Vec<String>, mut records: Vec<FeatureRecord>) -> Result<Self> {
        records.sort_by(|a, b| a.id.cmp(&b.id));
        for pair in records.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::DuplicateId(pair[0].id.clone()));
            }
        }
        for r in &records {
            if r.values.len() != CONCAT_DIM {
                return Err(Error::DimensionMismatch {
                    expected: CONCAT_DIM,
                    got: r.values.len(),
                });
            }
            if r.label as usize >= labels.len() {
                return Err(Error::malformed("feature store", format!("label index {}", r.label)));
            }
        }
        Ok(FeatureStore {
            labels,
            records,
            params: DescriptorParams::CURRENT,
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn records(&self) -> &[FeatureRecord] {
        &self.records
    }

    pub fn params(&self) -> DescriptorParams {
        self.params
    }

    pub fn label_of(&self, i: usize) -> &str {
        &self.labels[self.records[i].label as usize]
    }

    pub fn label_index(&self, label: &str) -> Option<u32> {
        self.labels.iter().position(|l| l == label).map(|i| i as u32)
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.records.binary_search_by(|r| r.id.as_str().cmp(id)).ok()
    }

    pub fn block(&self, i: usize, block: FeatureBlock) -> &[f32] {
        &self.records[i].values[block.range()]
    }

    /// Number of stored samples carrying `label`.
    pub fn class_count(&self, label: &str) -> usize {
        match self.label_index(label) {
            Some(l) => self.records.iter().filter(|r| r.label == l).count(),
            None => 0,
        }
    }

    pub fn norm_stats(&self) -> NormStats {
        NormStats::fit(self.records.iter().map(|r| r.values.as_slice()), CONCAT_DIM)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(STORE_MAGIC);
        put_u32(&mut out, STORE_VERSION);
        for d in DescriptorId::ALL {
            put_u32(&mut out, d.dim() as u32);
        }
        put_u32(&mut out, CONCAT_DIM as u32);
        put_u64(&mut out, self.params.digest());
        put_u32(&mut out, self.labels.len() as u32);
        for l in &self.labels {
            put_str(&mut out, l);
        }
        put_u32(&mut out, self.records.len() as u32);
        for r in &self.records {
            put_str(&mut out, &r.id);
            put_u32(&mut out, r.label);
            for d in DescriptorId::ALL {
                put_f32s(&mut out, &r.values[d.concat_range()]);
            }
            put_f32s(&mut out, &r.values);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 || &bytes[..4] != STORE_MAGIC {
            return Err(Error::NotAStore);
        }
        let mut r = ByteReader::new(&bytes[4..], "feature store");
        let version = r.u32()?;
        if version != STORE_VERSION {
            return Err(Error::VersionMismatch {
                kind: "feature store",
                found: version,
                expected: STORE_VERSION,
            });
        }
        for d in DescriptorId::ALL {
            let dim = r.u32()? as usize;
            if dim != d.dim() {
                return Err(Error::Incompatible(format!(
                    "store has {d} dimension {dim}, this build uses {}",
                    d.dim()
                )));
            }
        }
        let concat = r.u32()? as usize;
        if concat != CONCAT_DIM {
            return Err(Error::DimensionMismatch {
                expected: CONCAT_DIM,
                got: concat,
            });
        }
        let digest = r.u64()?;
        if digest != DescriptorParams::CURRENT.digest() {
            return Err(Error::Incompatible(
                "feature store was extracted with different descriptor parameters".into(),
            ));
        }
        let n_labels = r.u32()? as usize;
        let labels = (0..n_labels).map(|_| r.string()).collect::<Result<Vec<_>>>()?;
        let n_records = r.u32()? as usize;
        let mut records = Vec::with_capacity(n_records.min(1 << 20));
        for _ in 0..n_records {
            let id = r.string()?;
            let label = r.u32()?;
            let mut blocks = Vec::with_capacity(CONCAT_DIM);
            for d in DescriptorId::ALL {
                blocks.extend(r.f32s(d.dim())?);
            }
            let values = r.f32s(CONCAT_DIM)?;
            if blocks.iter().map(|v| v.to_bits()).ne(values.iter().map(|v| v.to_bits())) {
                return Err(Error::malformed(
                    "feature store",
                    format!("record {id}: concatenated block disagrees with descriptor blocks"),
                ));
            }
            records.push(FeatureRecord { id, label, values });
        }
        r.finish()?;
        Self::from_records(labels, records)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

/// Per-dimension mean and population standard deviation (floored).
#[derive(Clone, Debug, PartialEq)]
pub struct NormStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl NormStats {
    pub fn fit<'a, T>(rows: impl Iterator<Item = &'a [T]> + Clone, dim: usize) -> Self
    where
        T: Copy + Into<f64> + 'a,
    {
        let mut mean = vec![0.0; dim];
        let mut n = 0usize;
        for row in rows.clone() {
            assert_eq!(row.len(), dim);
            for (m, &v) in mean.iter_mut().zip(row) {
                *m += v.into();
            }
            n += 1;
        }
        if n == 0 {
            return NormStats {
                mean,
                std: vec![1.0; dim],
            };
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        let mut var = vec![0.0; dim];
        for row in rows {
            for ((s, &v), m) in var.iter_mut().zip(row).zip(&mean) {
                let d = v.into() - m;
                *s += d * d;
            }
        }
        let std = var
            .into_iter()
            .map(|s| (s / n as f64).sqrt().max(STD_FLOOR))
            .collect();
        NormStats { mean, std }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> NormStats {
        NormStats {
            mean: self.mean[range.clone()].to_vec(),
            std: self.std[range].to_vec(),
        }
    }

    /// z-scores `values`.
    pub fn apply<T: Copy + Into<f64>>(&self, values: &[T]) -> Vec<f64> {
        values
            .iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(&v, (m, s))| (v.into() - m) / s)
            .collect()
    }

    /// The same statistics rounded through f32, as persisted in model files.
    pub fn to_f32_precision(&self) -> NormStats {
        let r = |v: &Vec<f64>| v.iter().map(|&x| x as f32 as f64).collect();
        NormStats {
            mean: r(&self.mean),
            std: r(&self.std),
        }
    }
}
