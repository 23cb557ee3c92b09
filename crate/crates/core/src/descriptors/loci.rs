//! Characteristic loci: crossing counts along four rays from every
//! background pixel, coded base 3 and histogrammed.

use crate::raster::Raster;

pub const LOCI_DIM: usize = 81;
/// Crossing counts saturate at this value.
pub const LOCI_CAP: usize = 2;

/// Bin index for capped crossing counts in the order up, down, left, right.
#[inline]
pub fn loci_code(up: usize, down: usize, left: usize, right: usize) -> usize {
    let c = |n: usize| n.min(LOCI_CAP);
    c(up) * 27 + c(down) * 9 + c(left) * 3 + c(right)
}

/// Normalized 81-bin loci histogram; all zeros when there is no background.
///
/// A run of consecutive ink pixels counts as one crossing. Rays stop at the
/// raster edge.
pub fn loci_features(raster: &Raster) -> Vec<f64> {
    let (w, h) = (raster.width(), raster.height());
    // starts_before[..] counts run starts strictly before a position along a
    // row (or column); run starts at or after are total - starts_through.
    let mut left = vec![0u32; w * h];
    let mut right = vec![0u32; w * h];
    let mut up = vec![0u32; w * h];
    let mut down = vec![0u32; w * h];

    for y in 0..h {
        let mut seen = 0u32;
        for x in 0..w {
            left[y * w + x] = seen;
            if raster.get(x, y) && (x == 0 || !raster.get(x - 1, y)) {
                seen += 1;
            }
        }
        let mut seen = 0u32;
        for x in (0..w).rev() {
            right[y * w + x] = seen;
            if raster.get(x, y) && (x + 1 == w || !raster.get(x + 1, y)) {
                seen += 1;
            }
        }
    }
    for x in 0..w {
        let mut seen = 0u32;
        for y in 0..h {
            up[y * w + x] = seen;
            if raster.get(x, y) && (y == 0 || !raster.get(x, y - 1)) {
                seen += 1;
            }
        }
        let mut seen = 0u32;
        for y in (0..h).rev() {
            down[y * w + x] = seen;
            if raster.get(x, y) && (y + 1 == h || !raster.get(x, y + 1)) {
                seen += 1;
            }
        }
    }

    let mut hist = [0u64; LOCI_DIM];
    let mut background = 0u64;
    for (i, &ink) in raster.pixels().iter().enumerate() {
        if ink {
            continue;
        }
        background += 1;
        hist[loci_code(
            up[i] as usize,
            down[i] as usize,
            left[i] as usize,
            right[i] as usize,
        )] += 1;
    }
    if background == 0 {
        return vec![0.0; LOCI_DIM];
    }
    hist.iter().map(|&c| c as f64 / background as f64).collect()
}
