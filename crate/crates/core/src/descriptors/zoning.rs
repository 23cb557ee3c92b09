//! Ink density over a fixed grid of cells.

use crate::raster::Raster;

pub const ZONING_GRID: usize = 8;
pub const ZONING_DIM: usize = ZONING_GRID * ZONING_GRID;

/// Half-open pixel range covered by cell `index` along an axis of `len`
/// pixels. Cells are `len / 8` wide; the last one absorbs the remainder.
pub fn zone_span(len: usize, index: usize) -> std::ops::Range<usize> {
    let step = len / ZONING_GRID;
    let start = index * step;
    let end = if index + 1 == ZONING_GRID { len } else { start + step };
    start..end
}

/// Row-major 8x8 ink fractions. Expects a raster at least 8 pixels on each side.
pub fn zoning_features(raster: &Raster) -> Vec<f64> {
    let (w, h) = (raster.width(), raster.height());
    // Per-row prefix sums keep each cell O(rows).
    let mut prefix = vec![0u32; (w + 1) * h];
    for y in 0..h {
        for x in 0..w {
            prefix[y * (w + 1) + x + 1] = prefix[y * (w + 1) + x] + raster.get(x, y) as u32;
        }
    }
    let mut out = Vec::with_capacity(ZONING_DIM);
    for row in 0..ZONING_GRID {
        let ys = zone_span(h, row);
        for col in 0..ZONING_GRID {
            let xs = zone_span(w, col);
            let area = ys.len() * xs.len();
            if area == 0 {
                out.push(0.0);
                continue;
            }
            let ink: u32 = ys
                .clone()
                .map(|y| prefix[y * (w + 1) + xs.end] - prefix[y * (w + 1) + xs.start])
                .sum();
            out.push(ink as f64 / area as f64);
        }
    }
    out
}
