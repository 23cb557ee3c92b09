//! Per-sample descriptor compatibility: how well each descriptor retrieves a
//! training sample's classmates from the training set itself.

use std::path::Path;

use rayon::prelude::*;

use crate::descriptors::DescriptorId;
use crate::error::{Error, Result};
use crate::retrieval::{dcg, RetrievalIndex};
use crate::store::{FeatureBlock, FeatureStore};

#[derive(Clone, Debug, PartialEq)]
pub struct CompatibilityRecord {
    pub image_id: String,
    /// Indexed by [`DescriptorId::index`].
    pub cm: [f64; 3],
    pub best: DescriptorId,
}

/// Argmax over the three scores; ties go to the earlier descriptor.
pub fn best_descriptor(cm: &[f64; 3]) -> DescriptorId {
    let mut best = DescriptorId::Loci;
    for d in DescriptorId::ALL {
        if cm[d.index()] > cm[best.index()] {
            best = d;
        }
    }
    best
}

/// Retrieval indexes for all three descriptors over one training store.
pub struct CompatScorer<'a> {
    store: &'a FeatureStore,
    indexes: Vec<RetrievalIndex<'a>>,
}

impl<'a> CompatScorer<'a> {
    pub fn new(store: &'a FeatureStore) -> Result<Self> {
        let stats = store.norm_stats();
        let indexes = DescriptorId::ALL
            .iter()
            .map(|&d| RetrievalIndex::new(store, FeatureBlock::Single(d), &stats))
            .collect::<Result<_>>()?;
        Ok(CompatScorer { store, indexes })
    }

    /// DCG of retrieving stored sample `sample` (itself included) with `descriptor`.
    pub fn compute_cm(&self, sample: usize, descriptor: DescriptorId) -> Result<f64> {
        let block = FeatureBlock::Single(descriptor);
        let query: Vec<f64> = self.store.block(sample, block).iter().map(|&v| v as f64).collect();
        let rec = &self.store.records()[sample];
        let list = self.indexes[descriptor.index()].rank(&rec.id, self.store.label_of(sample), &query)?;
        dcg(&list.relevance, list.class_size)
    }

    pub fn record(&self, sample: usize) -> Result<CompatibilityRecord> {
        let mut cm = [0.0; 3];
        for d in DescriptorId::ALL {
            cm[d.index()] = self.compute_cm(sample, d)?;
        }
        Ok(CompatibilityRecord {
            image_id: self.store.records()[sample].id.clone(),
            cm,
            best: best_descriptor(&cm),
        })
    }
}

/// Convenience wrapper for a single score.
pub fn compute_cm(store: &FeatureStore, sample: usize, descriptor: DescriptorId) -> Result<f64> {
    CompatScorer::new(store)?.compute_cm(sample, descriptor)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompatLabels {
    /// One record per stored sample, in store (id) order.
    pub records: Vec<CompatibilityRecord>,
}

impl CompatLabels {
    /// CM values per descriptor sorted in descending order.
    pub fn sorted_curves(&self) -> [Vec<f64>; 3] {
        DescriptorId::ALL.map(|d| {
            let mut v: Vec<f64> = self.records.iter().map(|r| r.cm[d.index()]).collect();
            v.sort_by(|a, b| b.total_cmp(a));
            v
        })
    }

    /// How many samples each descriptor is best for.
    pub fn best_counts(&self) -> [usize; 3] {
        let mut counts = [0; 3];
        for r in &self.records {
            counts[r.best.index()] += 1;
        }
        counts
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv_writer(path)?;
        w.write_record(["image_id", "cm_loci", "cm_fourier", "cm_zoning", "best"])?;
        for r in &self.records {
            w.write_record([
                r.image_id.clone(),
                r.cm[0].to_string(),
                r.cm[1].to_string(),
                r.cm[2].to_string(),
                r.best.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let mut records = Vec::new();
        for row in r.records() {
            let row = row?;
            if row.len() != 5 {
                return Err(Error::malformed("labels file", format!("row {row:?}")));
            }
            let num = |i: usize| -> Result<f64> {
                row[i]
                    .parse()
                    .map_err(|_| Error::malformed("labels file", format!("bad score {:?}", &row[i])))
            };
            records.push(CompatibilityRecord {
                image_id: row[0].to_string(),
                cm: [num(1)?, num(2)?, num(3)?],
                best: row[4].parse()?,
            });
        }
        Ok(CompatLabels { records })
    }

    /// The sorted-CM curves as `descriptor,rank,cm` rows.
    pub fn write_sorted_curves_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv_writer(path)?;
        w.write_record(["descriptor", "rank", "cm"])?;
        for (d, curve) in DescriptorId::ALL.iter().zip(self.sorted_curves()) {
            for (rank, cm) in curve.iter().enumerate() {
                w.write_record([d.to_string(), (rank + 1).to_string(), cm.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?)
}

/// Scores every training sample under every descriptor and picks its best.
pub fn label_training_set(store: &FeatureStore) -> Result<CompatLabels> {
    let scorer = CompatScorer::new(store)?;
    let records = (0..store.len())
        .into_par_iter()
        .map(|i| scorer.record(i))
        .collect::<Result<Vec<_>>>()?;
    Ok(CompatLabels { records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptors::CONCAT_DIM;
    use crate::store::FeatureRecord;

    fn store(points: &[(u32, [f32; 3])]) -> FeatureStore {
        let records = points
            .iter()
            .enumerate()
            .map(|(i, &(label, xyz))| {
                let mut values = vec![0.0f32; CONCAT_DIM];
                for d in DescriptorId::ALL {
                    values[d.concat_range().start] = xyz[d.index()];
                }
                FeatureRecord {
                    id: format!("s{i:02}"),
                    label,
                    values,
                }
            })
            .collect();
        FeatureStore::from_records(vec!["a".into(), "b".into(), "c".into()], records).unwrap()
    }

    #[test]
    fn tie_goes_to_earlier_descriptor() {
        assert_eq!(best_descriptor(&[0.5, 0.5, 0.5]), DescriptorId::Loci);
        assert_eq!(best_descriptor(&[0.2, 0.7, 0.7]), DescriptorId::Fourier);
        assert_eq!(best_descriptor(&[0.2, 0.1, 0.7]), DescriptorId::Zoning);
    }

    #[test]
    fn singleton_class_is_fully_compatible() {
        let s = store(&[(0, [0.0, 0.0, 0.0]), (1, [5.0, 1.0, 2.0]), (1, [5.1, 9.0, 2.0]), (2, [0.1, 0.1, 0.1])]);
        let labels = label_training_set(&s).unwrap();
        assert_eq!(labels.records[0].cm, [1.0, 1.0, 1.0]);
    }

    #[test]
    fn separable_descriptor_saturates() {
        // Loci separates the classes, Fourier interleaves them.
        let s = store(&[
            (0, [0.0, 0.0, 1.0]),
            (0, [0.1, 2.0, 1.0]),
            (1, [5.0, 1.0, 1.0]),
            (1, [5.1, 3.0, 1.0]),
        ]);
        let scorer = CompatScorer::new(&s).unwrap();
        for i in 0..4 {
            assert_eq!(scorer.compute_cm(i, DescriptorId::Loci).unwrap(), 1.0);
            assert!(scorer.compute_cm(i, DescriptorId::Fourier).unwrap() < 1.0);
        }
        assert_eq!(compute_cm(&s, 0, DescriptorId::Loci).unwrap(), 1.0);
    }

    #[test]
    fn labels_csv_round_trip() {
        let s = store(&[(0, [0.0, 0.3, 1.0]), (0, [0.1, 2.0, 1.0]), (1, [5.0, 1.0, 7.0])]);
        let labels = label_training_set(&s).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("labels.csv");
        labels.write_csv(&p).unwrap();
        assert!(std::fs::read_to_string(&p)
            .unwrap()
            .starts_with("image_id,cm_loci,cm_fourier,cm_zoning,best\n"));
        assert_eq!(CompatLabels::read_csv(&p).unwrap(), labels);

        let curves = dir.path().join("sorted_cm.csv");
        labels.write_sorted_curves_csv(&curves).unwrap();
        let text = std::fs::read_to_string(&curves).unwrap();
        assert_eq!(text.lines().count(), 1 + 3 * 3);
    }
}
