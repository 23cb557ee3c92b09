use std::collections::HashMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use walkdir::WalkDir;

use super::manifest::CorpusManifest;
use super::read_gray;
use crate::error::{Error, Result};

/// Optional per-directory label table consulted by [`LabelRule::Auto`].
pub const LABELS_FILE: &str = "labels.csv";

const IMAGE_EXTENSIONS: &[&str] = &["png", "bmp", "pgm", "pbm", "ppm", "pnm"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LabelRule {
    /// Label is the name of the image's parent folder.
    FolderName,
    /// Labels come from a CSV table with header `path,label`, paths relative
    /// to the ingested directory.
    Manifest(PathBuf),
    /// Use `labels.csv` in the directory when present, folder names otherwise.
    Auto,
}

/// A file that was found but could not be ingested.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: PathBuf,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct IngestOutcome {
    /// Paths are relative to the ingested directory.
    pub manifest: CorpusManifest,
    pub diagnostics: Vec<Diagnostic>,
}

fn read_label_table(path: &Path) -> Result<HashMap<PathBuf, String>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut table = HashMap::new();
    for rec in r.records() {
        let rec = rec?;
        if rec.len() < 2 {
            return Err(Error::malformed("label table", format!("short row {rec:?}")));
        }
        table.insert(PathBuf::from(&rec[0]), rec[1].to_string());
    }
    Ok(table)
}

fn sample_id(rel: &Path) -> String {
    let stem = rel.with_extension("");
    stem.components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join("/")
}

/// Scans `dir` recursively for raster images and assembles a split manifest.
pub fn ingest(dir: &Path, rule: &LabelRule, train_ratio: f64, seed: u64) -> Result<IngestOutcome> {
    let table = match rule {
        LabelRule::Manifest(p) => Some(read_label_table(p)?),
        LabelRule::Auto if dir.join(LABELS_FILE).is_file() => {
            Some(read_label_table(&dir.join(LABELS_FILE))?)
        }
        _ => None,
    };

    let mut files = Vec::new();
    for entry in WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| std::io::Error::other(e.to_string()))?;
        if !entry.file_type().is_file() {
            continue;
        }
        let is_image = entry
            .path()
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()));
        if is_image {
            let rel = entry.path().strip_prefix(dir).unwrap_or(entry.path()).to_path_buf();
            files.push(rel);
        }
    }
    if files.is_empty() {
        return Err(Error::EmptyDirectory(dir.to_path_buf()));
    }

    let checked: Vec<std::result::Result<(String, PathBuf, String), Diagnostic>> = files
        .par_iter()
        .map(|rel| {
            let label = match &table {
                Some(t) => t.get(rel).cloned(),
                None => rel
                    .parent()
                    .and_then(|p| p.file_name())
                    .map(|n| n.to_string_lossy().into_owned()),
            };
            let Some(label) = label else {
                return Err(Diagnostic {
                    path: rel.clone(),
                    reason: "no label".into(),
                });
            };
            read_gray(&dir.join(rel)).map_err(|e| Diagnostic {
                path: rel.clone(),
                reason: e.to_string(),
            })?;
            Ok((sample_id(rel), rel.clone(), label))
        })
        .collect();

    let mut items = Vec::new();
    let mut diagnostics = Vec::new();
    for c in checked {
        match c {
            Ok(item) => items.push(item),
            Err(d) => diagnostics.push(d),
        }
    }
    if items.is_empty() {
        return Err(Error::EmptyDirectory(dir.to_path_buf()));
    }
    Ok(IngestOutcome {
        manifest: CorpusManifest::build(items, train_ratio, seed)?,
        diagnostics,
    })
}
