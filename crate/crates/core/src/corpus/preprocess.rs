//! Binarization, diacritic removal and cropping.

use image::GrayImage;

use crate::error::{Error, Result};
use crate::raster::Raster;

/// Smallest accepted side length of a preprocessed shape.
pub const MIN_SIDE: usize = 8;

/// Global Otsu threshold. Pixels `<= threshold` are ink.
///
/// Returns `None` when the image holds a single gray level.
pub fn otsu_threshold(img: &GrayImage) -> Option<u8> {
    let mut hist = [0u64; 256];
    for p in img.pixels() {
        hist[p.0[0] as usize] += 1;
    }
    if hist.iter().filter(|&&c| c > 0).count() < 2 {
        return None;
    }
    let total: u64 = hist.iter().sum();
    let sum_all: f64 = hist.iter().enumerate().map(|(v, &c)| v as f64 * c as f64).sum();

    let mut best = (f64::NEG_INFINITY, 0u8);
    let mut w0 = 0u64;
    let mut sum0 = 0.0;
    for t in 0..255usize {
        w0 += hist[t];
        sum0 += t as f64 * hist[t] as f64;
        let w1 = total - w0;
        if w0 == 0 || w1 == 0 {
            continue;
        }
        let m0 = sum0 / w0 as f64;
        let m1 = (sum_all - sum0) / w1 as f64;
        let between = w0 as f64 * w1 as f64 * (m0 - m1) * (m0 - m1);
        if between > best.0 {
            best = (between, t as u8);
        }
    }
    Some(best.1)
}

pub fn binarize(img: &GrayImage) -> Raster {
    let (w, h) = (img.width() as usize, img.height() as usize);
    match otsu_threshold(img) {
        Some(t) => Raster::from_fn(w, h, |x, y| img.get_pixel(x as u32, y as u32).0[0] <= t),
        // Flat image: dark means a solid shape, light means nothing at all.
        None => {
            let dark = img.pixels().next().is_some_and(|p| p.0[0] < 128);
            Raster::from_fn(w, h, |_, _| dark)
        }
    }
}

/// 8-connected component labeling.
///
/// Returns per-pixel labels (0 = background, components numbered from 1 in
/// raster order of their first pixel) and the area of each component
/// (`areas[k - 1]` for label `k`).
pub fn label_components(raster: &Raster) -> (Vec<u32>, Vec<usize>) {
    let (w, h) = (raster.width(), raster.height());
    let mut provisional = vec![0u32; w * h];
    let mut parent: Vec<u32> = vec![0];

    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }

    for y in 0..h {
        for x in 0..w {
            if !raster.get(x, y) {
                continue;
            }
            let mut current = 0u32;
            // Already-visited neighbours: W, NW, N, NE.
            let neighbours = [(-1isize, 0isize), (-1, -1), (0, -1), (1, -1)];
            for (dx, dy) in neighbours {
                let (nx, ny) = (x as isize + dx, y as isize + dy);
                if !raster.get_signed(nx, ny) {
                    continue;
                }
                let l = provisional[ny as usize * w + nx as usize];
                if current == 0 {
                    current = find(&mut parent, l);
                } else {
                    let a = find(&mut parent, current);
                    let b = find(&mut parent, l);
                    if a != b {
                        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                        parent[hi as usize] = lo;
                        current = lo;
                    }
                }
            }
            if current == 0 {
                current = parent.len() as u32;
                parent.push(current);
            }
            provisional[y * w + x] = current;
        }
    }

    let mut relabel = vec![0u32; parent.len()];
    let mut areas = Vec::new();
    let mut labels = vec![0u32; w * h];
    for i in 0..w * h {
        if provisional[i] == 0 {
            continue;
        }
        let root = find(&mut parent, provisional[i]) as usize;
        if relabel[root] == 0 {
            areas.push(0);
            relabel[root] = areas.len() as u32;
        }
        let l = relabel[root];
        areas[l as usize - 1] += 1;
        labels[i] = l;
    }
    (labels, areas)
}

/// Keeps only the largest 8-connected ink component. On equal areas the
/// component reached first in raster order wins.
pub fn keep_largest_component(raster: &Raster) -> Raster {
    let (labels, areas) = label_components(raster);
    let Some(keep) = areas
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, usize)>, (i, &a)| match best {
            Some((_, ba)) if ba >= a => best,
            _ => Some((i, a)),
        })
        .map(|(i, _)| i as u32 + 1)
    else {
        return raster.clone();
    };
    let w = raster.width();
    Raster::from_fn(w, raster.height(), |x, y| labels[y * w + x] == keep)
}

/// Binarize, drop everything but the main body, and crop tight.
pub fn preprocess(raw: &GrayImage) -> Result<Raster> {
    let binary = binarize(raw);
    if binary.ink_count() == 0 {
        return Err(Error::BlankImage);
    }
    let body = keep_largest_component(&binary)
        .tight_crop()
        .ok_or(Error::BlankImage)?;
    if body.width() < MIN_SIDE || body.height() < MIN_SIDE {
        return Err(Error::DegenerateShape {
            width: body.width(),
            height: body.height(),
        });
    }
    Ok(body)
}
