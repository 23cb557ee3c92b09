use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Fraction of each corpus assigned to the training split unless configured otherwise.
pub const DEFAULT_TRAIN_RATIO: f64 = 0.75;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Split {
    Train,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Test => "test",
        })
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            other => Err(Error::malformed("manifest", format!("unknown split {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    pub id: String,
    /// Relative paths are resolved against the manifest's directory.
    pub path: PathBuf,
    pub label: String,
    pub split: Split,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CorpusManifest {
    pub entries: Vec<ManifestEntry>,
    /// Seed the split was drawn with, when known.
    pub seed: Option<u64>,
}

impl CorpusManifest {
    /// Builds a manifest from `(id, path, label)` triples, sorted by path, with
    /// a stratified split.
    pub fn build(
        mut items: Vec<(String, PathBuf, String)>,
        train_ratio: f64,
        seed: u64,
    ) -> Result<Self> {
        items.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        let mut seen = HashSet::new();
        for (id, _, _) in &items {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        let labels: Vec<&str> = items.iter().map(|(_, _, l)| l.as_str()).collect();
        let splits = stratified_split(&labels, train_ratio, seed)?;
        let entries = items
            .into_iter()
            .zip(splits)
            .map(|((id, path, label), split)| ManifestEntry {
                id,
                path,
                label,
                split,
            })
            .collect();
        Ok(CorpusManifest {
            entries,
            seed: Some(seed),
        })
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(move |e| e.split == split)
    }

    pub fn labels(&self) -> Vec<&str> {
        let mut l: Vec<&str> = self.entries.iter().map(|e| e.label.as_str()).collect();
        l.sort_unstable();
        l.dedup();
        l
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)?;
        w.write_record(["id", "path", "label", "split"])?;
        for e in &self.entries {
            let p = e.path.to_string_lossy();
            let split = e.split.to_string();
            w.write_record([e.id.as_str(), p.as_ref(), e.label.as_str(), split.as_str()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let headers = r.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["id", "path", "label", "split"] {
            return Err(Error::malformed(
                "manifest",
                format!("expected header id,path,label,split, found {headers:?}"),
            ));
        }
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for rec in r.records() {
            let rec = rec?;
            let id = rec[0].to_string();
            if !seen.insert(id.clone()) {
                return Err(Error::DuplicateId(id));
            }
            entries.push(ManifestEntry {
                id,
                path: PathBuf::from(&rec[1]),
                label: rec[2].to_string(),
                split: rec[3].parse()?,
            });
        }
        Ok(CorpusManifest {
            entries,
            seed: None,
        })
    }
}

/// Assigns train/test per entry, stratified by label.
///
/// Every label keeps at least one training sample. The overall training count
/// is `round(ratio * len)`, apportioned across labels by largest remainder;
/// it can only exceed that target when there are more labels than training
/// slots.
pub fn stratified_split(labels: &[&str], train_ratio: f64, seed: u64) -> Result<Vec<Split>> {
    if !(train_ratio > 0.0 && train_ratio <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "train ratio must lie in (0, 1], got {train_ratio}"
        )));
    }
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        groups.entry(l).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let target = (train_ratio * labels.len() as f64).round() as usize;
    let mut quotas: Vec<usize> = Vec::with_capacity(groups.len());
    let mut fractions: Vec<(f64, usize)> = Vec::new();
    for (g, members) in groups.values().enumerate() {
        let exact = train_ratio * members.len() as f64;
        let base = (exact.floor() as usize).clamp(1, members.len());
        quotas.push(base);
        if base < members.len() {
            fractions.push((exact - exact.floor(), g));
        }
    }
    // Random order first so that equal remainders are broken by the seed.
    fractions.shuffle(&mut rng);
    fractions.sort_by(|a, b| b.0.total_cmp(&a.0));
    let assigned: usize = quotas.iter().sum();
    for &(_, g) in fractions.iter().take(target.saturating_sub(assigned)) {
        quotas[g] += 1;
    }

    let mut splits = vec![Split::Test; labels.len()];
    for (members, quota) in groups.into_values().zip(quotas) {
        let mut members = members;
        members.shuffle(&mut rng);
        for &i in &members[..quota] {
            splits[i] = Split::Train;
        }
    }
    Ok(splits)
}
