#![allow(dead_code)]

use std::path::{Path, PathBuf};

use lexred_core::compat::CompatLabels;
use lexred_core::corpus::{synthesize, Source, Split, SynthConfig};
use lexred_core::pipeline::{default_grid, evaluate, extract_split, train_selector, ExperimentConfig, Method};
use lexred_core::selector::TrainingReport;
use lexred_core::{label_training_set, FeatureStore, SelectorModel, TrainParams};
use lexred_core::pipeline::Evaluation;

pub struct Quickstart {
    pub root: PathBuf,
    pub train: FeatureStore,
    pub test: FeatureStore,
    pub labels: CompatLabels,
    pub model: SelectorModel,
    pub report: TrainingReport,
    pub eval: Evaluation,
}

/// synth -> extract -> compat -> train -> evaluate, with every artifact on disk.
pub fn quickstart(root: &Path, seed: u64) -> Quickstart {
    let corpus = root.join("corpus");
    let cfg = SynthConfig {
        seed,
        ..SynthConfig::default()
    };
    let manifest = synthesize(&cfg, &corpus).unwrap();
    let (train, d1) = extract_split(&manifest, &corpus, Split::Train, Source::Synthetic).unwrap();
    let (test, d2) = extract_split(&manifest, &corpus, Split::Test, Source::Synthetic).unwrap();
    assert!(d1.is_empty() && d2.is_empty(), "{d1:?} {d2:?}");
    let features = root.join("features");
    std::fs::create_dir_all(&features).unwrap();
    train.write(&features.join("train.lxfs")).unwrap();
    test.write(&features.join("test.lxfs")).unwrap();

    let labels = label_training_set(&train).unwrap();
    labels.write_csv(&root.join("labels.csv")).unwrap();
    labels.write_sorted_curves_csv(&root.join("sorted_cm.csv")).unwrap();

    let (model, report) = train_selector(&train, &labels, seed, &TrainParams::default()).unwrap();
    model.save(&root.join("selector.lxrd")).unwrap();
    report.write_csv(&root.join("train_report.csv")).unwrap();

    let eval = evaluate(&ExperimentConfig {
        lexicon: features.join("train.lxfs"),
        test: features.join("test.lxfs"),
        model: root.join("selector.lxrd"),
        methods: Method::ALL.to_vec(),
        n_grid: Some(default_grid(train.len())),
        out_dir: root.join("eval"),
    })
    .unwrap();
    Quickstart {
        root: root.to_path_buf(),
        train,
        test,
        labels,
        model,
        report,
        eval,
    }
}

/// Naive flood-fill labeling with 8-connectivity; returns component areas in
/// discovery order.
pub fn flood_fill_areas(r: &lexred_core::Raster) -> Vec<usize> {
    let (w, h) = (r.width(), r.height());
    let mut seen = vec![false; w * h];
    let mut areas = Vec::new();
    for start in 0..w * h {
        if seen[start] || !r.pixels()[start] {
            continue;
        }
        let mut stack = vec![start];
        seen[start] = true;
        let mut area = 0;
        while let Some(i) = stack.pop() {
            area += 1;
            let (x, y) = ((i % w) as isize, (i / w) as isize);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                        continue;
                    }
                    let j = ny as usize * w + nx as usize;
                    if r.pixels()[j] && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        areas.push(area);
    }
    areas
}

/// Brute-force characteristic loci: walk every ray pixel by pixel.
pub fn loci_oracle(r: &lexred_core::Raster) -> Vec<f64> {
    let (w, h) = (r.width() as isize, r.height() as isize);
    let mut hist = vec![0usize; 81];
    let mut bg = 0;
    for y in 0..h {
        for x in 0..w {
            if r.get(x as usize, y as usize) {
                continue;
            }
            bg += 1;
            let count = |dx: isize, dy: isize| {
                let (mut cx, mut cy) = (x, y);
                let mut prev = false;
                let mut runs = 0;
                loop {
                    cx += dx;
                    cy += dy;
                    if cx < 0 || cy < 0 || cx >= w || cy >= h {
                        break;
                    }
                    let ink = r.get(cx as usize, cy as usize);
                    if ink && !prev {
                        runs += 1;
                    }
                    prev = ink;
                }
                runs.min(2)
            };
            let code = count(0, -1) * 27 + count(0, 1) * 9 + count(-1, 0) * 3 + count(1, 0);
            hist[code] += 1;
        }
    }
    if bg == 0 {
        return vec![0.0; 81];
    }
    hist.iter().map(|&c| c as f64 / bg as f64).collect()
}

/// Double-loop zoning oracle.
pub fn zoning_oracle(r: &lexred_core::Raster) -> Vec<f64> {
    let (w, h) = (r.width(), r.height());
    let (qw, qh) = (w / 8, h / 8);
    let mut out = Vec::new();
    for row in 0..8 {
        let y0 = row * qh;
        let y1 = if row == 7 { h } else { y0 + qh };
        for col in 0..8 {
            let x0 = col * qw;
            let x1 = if col == 7 { w } else { x0 + qw };
            let mut ink = 0;
            let mut total = 0;
            for y in y0..y1 {
                for x in x0..x1 {
                    total += 1;
                    if r.get(x, y) {
                        ink += 1;
                    }
                }
            }
            out.push(ink as f64 / total as f64);
        }
    }
    out
}

/// Closed-form normalized DCG: sum of G_i / log2(max(i, 2)) over the ideal.
pub fn dcg_oracle(g: &[bool], c: usize) -> f64 {
    let gain: f64 = g
        .iter()
        .enumerate()
        .filter(|(_, &x)| x)
        .map(|(i, _)| 1.0 / ((i + 1).max(2) as f64).log2())
        .sum();
    let ideal: f64 = (1..=c).map(|i| 1.0 / (i.max(2) as f64).log2()).sum();
    gain / ideal
}

/// Naive all-pairs ranking: distances for every lexicon point, then a stable
/// insertion sort on (distance, id).
pub fn rank_oracle(points: &[Vec<f64>], query: &[f64], mean: &[f64], std: &[f64]) -> Vec<(usize, f64)> {
    let z = |v: &[f64]| -> Vec<f64> { v.iter().zip(mean).zip(std).map(|((x, m), s)| (x - m) / s).collect() };
    let q = z(query);
    let mut out: Vec<(usize, f64)> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let zp = z(p);
        let mut sq = 0.0;
        for k in 0..q.len() {
            sq += (zp[k] - q[k]) * (zp[k] - q[k]);
        }
        let item = (i, sq.sqrt());
        let pos = out
            .iter()
            .position(|&(j, d)| item.1 < d || (item.1 == d && item.0 < j))
            .unwrap_or(out.len());
        out.insert(pos, item);
    }
    out
}

pub fn disk(radius: f64) -> lexred_core::Raster {
    let size = (2.0 * radius).ceil() as usize + 3;
    let c = (size as f64 - 1.0) / 2.0;
    let r = lexred_core::Raster::from_fn(size, size, |x, y| {
        let (dx, dy) = (x as f64 - c, y as f64 - c);
        dx * dx + dy * dy <= radius * radius
    });
    r.tight_crop().unwrap()
}
