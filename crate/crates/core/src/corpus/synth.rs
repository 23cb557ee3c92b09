//! Seeded synthetic corpora built from three shape families, each designed
//! so that a different descriptor separates its classes best.

use std::f64::consts::TAU;
use std::fmt;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::manifest::{CorpusManifest, DEFAULT_TRAIN_RATIO};
use crate::error::{Error, Result};
use crate::raster::Raster;

/// Background border written around every synthetic shape.
const MARGIN: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Framed lattices of strokes; classes differ in stroke topology.
    Grid,
    /// Smooth filled closed contours; classes differ in harmonic content.
    Contour,
    /// Framed 4x4 block patterns; classes differ in which blocks are filled.
    Blocks,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Grid, Family::Contour, Family::Blocks];

    pub fn name(self) -> &'static str {
        match self {
            Family::Grid => "grid",
            Family::Contour => "contour",
            Family::Blocks => "blocks",
        }
    }

    /// Family encoded in a synthetic label such as `contour07`.
    pub fn of_label(label: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| {
            label
                .strip_prefix(f.name())
                .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
        })
    }

    fn code(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub families: Vec<Family>,
    pub classes_per_family: usize,
    pub samples_per_class: usize,
    pub seed: u64,
    pub train_ratio: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            families: Family::ALL.to_vec(),
            classes_per_family: 10,
            samples_per_class: 10,
            seed: 42,
            train_ratio: DEFAULT_TRAIN_RATIO,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.families.is_empty() || self.classes_per_family == 0 || self.samples_per_class == 0 {
            return Err(Error::InvalidConfig("zero samples requested".into()));
        }
        if self.classes_per_family < 2 {
            return Err(Error::InvalidConfig("need at least 2 classes per family".into()));
        }
        if self.samples_per_class < 2 {
            return Err(Error::InvalidConfig("need at least 2 samples per class".into()));
        }
        Ok(())
    }
}

pub fn label_for(family: Family, class: usize) -> String {
    format!("{}{:02}", family.name(), class)
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn rng_for(seed: u64, parts: &[u64]) -> ChaCha8Rng {
    let s = parts.iter().fold(mix(seed), |acc, &p| mix(acc ^ p));
    ChaCha8Rng::seed_from_u64(s)
}

// ---------------------------------------------------------------- grid ----

#[derive(Clone, Debug)]
struct GridClass {
    /// Inner horizontal strokes, each spanning `[from, to)` of the width as
    /// fractions.
    horizontal: Vec<(f64, f64)>,
    vertical: Vec<(f64, f64)>,
}

fn grid_class(seed: u64, class: usize) -> GridClass {
    let mut rng = rng_for(seed, &[Family::Grid.code(), class as u64, 0]);
    let nh = 1 + class % 3;
    let nv = 1 + (class / 3) % 3;
    let span = |rng: &mut ChaCha8Rng| match rng.gen_range(0..3) {
        0 => (0.0, 1.0),
        1 => (0.0, 0.6),
        _ => (0.4, 1.0),
    };
    GridClass {
        horizontal: (0..nh).map(|_| span(&mut rng)).collect(),
        vertical: (0..nv).map(|_| span(&mut rng)).collect(),
    }
}

fn render_grid(proto: &GridClass, rng: &mut ChaCha8Rng) -> Raster {
    let w = rng.gen_range(44..68);
    let h = rng.gen_range(44..68);
    let t = rng.gen_range(2..4);
    let mut r = Raster::new(w, h);
    let fill = |r: &mut Raster, x0: usize, x1: usize, y0: usize, y1: usize| {
        for y in y0..y1.min(h) {
            for x in x0..x1.min(w) {
                r.set(x, y, true);
            }
        }
    };
    fill(&mut r, 0, w, 0, t);
    fill(&mut r, 0, w, h - t, h);
    fill(&mut r, 0, t, 0, h);
    fill(&mut r, w - t, w, 0, h);

    let place = |n: usize, len: usize, i: usize, rng: &mut ChaCha8Rng| {
        let spacing = len as f64 / (n + 1) as f64;
        let jitter = rng.gen_range(-0.3..0.3) * spacing;
        ((spacing * (i + 1) as f64 + jitter).round() as usize).clamp(t, len - 2 * t)
    };
    let n = proto.horizontal.len();
    for (i, &(a, b)) in proto.horizontal.iter().enumerate() {
        let y = place(n, h, i, rng);
        fill(&mut r, (a * w as f64) as usize, (b * w as f64).ceil() as usize, y, y + t);
    }
    let n = proto.vertical.len();
    for (i, &(a, b)) in proto.vertical.iter().enumerate() {
        let x = place(n, w, i, rng);
        fill(&mut r, x, x + t, (a * h as f64) as usize, (b * h as f64).ceil() as usize);
    }
    r
}

// ------------------------------------------------------------- contour ----

#[derive(Clone, Debug)]
pub struct ContourClass {
    /// `(harmonic, amplitude, phase)` terms of the radius function.
    terms: Vec<(u32, f64, f64)>,
}

fn contour_class(seed: u64, class: usize) -> ContourClass {
    let mut rng = rng_for(seed, &[Family::Contour.code(), class as u64, 0]);
    let k1 = 2 + (class % 5) as u32;
    let a1 = if (class / 5).is_multiple_of(2) { 0.12 } else { 0.26 };
    let k2 = k1 + rng.gen_range(1..4);
    ContourClass {
        terms: vec![(k1, a1, 0.0), (k2, rng.gen_range(0.04..0.1), rng.gen_range(0.0..TAU))],
    }
}

/// Filled star-shaped contour of radius about `24 * scale`, rotated by `rotation`.
fn render_contour_shape(proto: &ContourClass, scale: f64, rotation: f64) -> Raster {
    let base = 24.0 * scale;
    let amp: f64 = proto.terms.iter().map(|t| t.1).sum();
    let half = (base * (1.0 + amp)).ceil() as usize + 1;
    let size = 2 * half + 1;
    let c = half as f64;
    let radius = |theta: f64| {
        base * (1.0
            + proto
                .terms
                .iter()
                .map(|&(k, a, p)| a * (k as f64 * (theta - rotation) + p).cos())
                .sum::<f64>())
    };
    let r = Raster::from_fn(size, size, |x, y| {
        let (dx, dy) = (x as f64 - c, y as f64 - c);
        (dx * dx + dy * dy).sqrt() <= radius(dy.atan2(dx))
    });
    r.tight_crop().expect("contour shapes are non-empty")
}

/// Unrotated rendering of contour class `class` at `scale`, as a tight crop.
pub fn contour_shape(seed: u64, class: usize, scale: f64) -> Raster {
    render_contour_shape(&contour_class(seed, class), scale, 0.0)
}

fn render_contour(proto: &ContourClass, rng: &mut ChaCha8Rng) -> Raster {
    let scale = rng.gen_range(0.85..1.25);
    let rotation = rng.gen_range(0.0..TAU);
    render_contour_shape(proto, scale, rotation)
}

// -------------------------------------------------------------- blocks ----

const BLOCK_GRID: usize = 4;

fn blocks_class(seed: u64, class: usize) -> u16 {
    // Patterns with pairwise Hamming distance >= 4, drawn deterministically.
    let mut rng = rng_for(seed, &[Family::Blocks.code(), 0, 0]);
    let mut chosen: Vec<u16> = Vec::new();
    while chosen.len() <= class {
        let p: u16 = rng.gen();
        let ones = p.count_ones();
        if (5..=11).contains(&ones) && chosen.iter().all(|&q| (p ^ q).count_ones() >= 4) {
            chosen.push(p);
        }
    }
    chosen[class]
}

fn render_blocks(pattern: u16, rng: &mut ChaCha8Rng) -> Raster {
    let w = rng.gen_range(44..68);
    let h = rng.gen_range(44..68);
    let mut r = Raster::new(w, h);
    let cuts = |len: usize| -> Vec<usize> {
        (0..=BLOCK_GRID)
            .map(|i| ((len - 1) as f64 * i as f64 / BLOCK_GRID as f64).round() as usize)
            .collect()
    };
    let xs = cuts(w);
    let ys = cuts(h);
    for &x in &xs {
        for y in 0..h {
            r.set(x, y, true);
        }
    }
    for &y in &ys {
        for x in 0..w {
            r.set(x, y, true);
        }
    }
    for row in 0..BLOCK_GRID {
        for col in 0..BLOCK_GRID {
            if pattern >> (row * BLOCK_GRID + col) & 1 == 1 {
                for y in ys[row]..=ys[row + 1] {
                    for x in xs[col]..=xs[col + 1] {
                        r.set(x, y, true);
                    }
                }
            }
        }
    }
    // Stray hairlines: barely move cell densities but change crossing counts.
    for _ in 0..rng.gen_range(1..3) {
        if rng.gen_bool(0.5) {
            let y = rng.gen_range(1..h - 1);
            (0..w).for_each(|x| r.set(x, y, true));
        } else {
            let x = rng.gen_range(1..w - 1);
            (0..h).for_each(|y| r.set(x, y, true));
        }
    }
    r
}

// ---------------------------------------------------------------------------

/// Renders sample `sample` of class `class` in `family`. Output is a tight
/// crop of a single 8-connected component.
pub fn render(family: Family, class: usize, sample: usize, seed: u64) -> Raster {
    let mut rng = rng_for(seed, &[family.code(), class as u64, 1 + sample as u64]);
    let r = match family {
        Family::Grid => render_grid(&grid_class(seed, class), &mut rng),
        Family::Contour => render_contour(&contour_class(seed, class), &mut rng),
        Family::Blocks => render_blocks(blocks_class(seed, class), &mut rng),
    };
    r.tight_crop().expect("synthetic shapes are non-empty")
}

/// Writes the corpus as `<out>/<label>/<sample>.png` plus `<out>/manifest.csv`
/// and returns the manifest (paths relative to `out`).
pub fn synthesize(config: &SynthConfig, out: &Path) -> Result<CorpusManifest> {
    use rayon::prelude::*;

    config.validate()?;
    let mut jobs = Vec::new();
    for &family in &config.families {
        for class in 0..config.classes_per_family {
            for sample in 0..config.samples_per_class {
                jobs.push((family, class, sample));
            }
        }
    }
    let items = jobs
        .par_iter()
        .map(|&(family, class, sample)| {
            let label = label_for(family, class);
            let rel = PathBuf::from(&label).join(format!("{sample:03}.png"));
            let path = out.join(&rel);
            std::fs::create_dir_all(path.parent().unwrap())?;
            render(family, class, sample, config.seed)
                .pad(MARGIN)
                .to_gray()
                .save(&path)
                .map_err(|source| Error::Image {
                    path: path.clone(),
                    source,
                })?;
            Ok((format!("{label}/{sample:03}"), rel, label))
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = CorpusManifest::build(items, config.train_ratio, config.seed)?;
    manifest.write_csv(&out.join("manifest.csv"))?;
    Ok(manifest)
}
