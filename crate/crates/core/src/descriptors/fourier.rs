//! Contour Fourier descriptor: magnitudes of the low harmonics of the
//! outer boundary, normalized by the first harmonic.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::raster::Raster;

/// Number of uniformly spaced contour samples fed to the transform.
pub const CONTOUR_POINTS: usize = 128;
/// Harmonics ±1..=HARMONICS are kept.
pub const HARMONICS: usize = 16;
pub const FOURIER_DIM: usize = 2 * HARMONICS;
/// Shortest boundary (in traced pixels) that yields a descriptor.
pub const MIN_CONTOUR: usize = 8;

/// Neighbour offsets in clockwise order (y grows downwards), starting west.
const RING: [(isize, isize); 8] = [
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
];

fn ring_index(dx: isize, dy: isize) -> usize {
    RING.iter()
        .position(|&d| d == (dx, dy))
        .expect("offset is an 8-neighbour")
}

/// Moore-neighbour trace of the outer boundary of the component holding the
/// topmost-leftmost ink pixel, clockwise, starting at that pixel.
pub fn trace_boundary(raster: &Raster) -> Vec<(usize, usize)> {
    let w = raster.width();
    let Some(first) = raster.pixels().iter().position(|&p| p) else {
        return Vec::new();
    };
    let start = ((first % w) as isize, (first / w) as isize);
    let mut contour = vec![start];
    let mut current = start;
    // Direction from the current pixel to the background pixel we entered from.
    let mut back = 0usize;
    let limit = 4 * raster.pixels().len() + 8;

    for _ in 0..limit {
        let mut step = None;
        for k in 1..=8 {
            let d = (back + k) % 8;
            let p = (current.0 + RING[d].0, current.1 + RING[d].1);
            if raster.get_signed(p.0, p.1) {
                step = Some((p, d));
                break;
            }
        }
        let Some((next, d)) = step else {
            break; // isolated pixel
        };
        if current == start && contour.len() > 1 && next == contour[1] {
            contour.pop();
            break;
        }
        let prev = RING[(d + 7) % 8];
        let bpix = (current.0 + prev.0, current.1 + prev.1);
        back = ring_index(bpix.0 - next.0, bpix.1 - next.1);
        contour.push(next);
        current = next;
    }
    contour
        .into_iter()
        .map(|(x, y)| (x as usize, y as usize))
        .collect()
}

/// Resamples a closed polygon at `count` points evenly spaced in arc length,
/// starting at the first vertex. Coordinates are taken relative to that
/// vertex, which makes the result exactly translation invariant.
pub fn resample_closed(points: &[(usize, usize)], count: usize) -> Vec<Complex64> {
    let (ox, oy) = points[0];
    let pts: Vec<Complex64> = points
        .iter()
        .map(|&(x, y)| Complex64::new(x as f64 - ox as f64, y as f64 - oy as f64))
        .collect();
    let m = pts.len();
    let mut cumulative = Vec::with_capacity(m + 1);
    cumulative.push(0.0);
    for i in 0..m {
        let seg = (pts[(i + 1) % m] - pts[i]).norm();
        cumulative.push(cumulative[i] + seg);
    }
    let total = cumulative[m];
    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for k in 0..count {
        let t = total * k as f64 / count as f64;
        while seg + 1 < m && cumulative[seg + 1] <= t {
            seg += 1;
        }
        let len = cumulative[seg + 1] - cumulative[seg];
        let frac = if len > 0.0 { (t - cumulative[seg]) / len } else { 0.0 };
        let a = pts[seg];
        let b = pts[(seg + 1) % m];
        out.push(a + (b - a) * frac);
    }
    out
}

/// 32 normalized harmonic magnitudes: `+1..=+16` followed by `-1..=-16`.
pub fn fourier_features(raster: &Raster) -> Result<Vec<f64>> {
    let contour = trace_boundary(raster);
    if contour.len() < MIN_CONTOUR {
        return Err(Error::DegenerateContour(contour.len()));
    }
    let mut z = resample_closed(&contour, CONTOUR_POINTS);
    FftPlanner::new()
        .plan_fft_forward(CONTOUR_POINTS)
        .process(&mut z);

    let mut mags = Vec::with_capacity(FOURIER_DIM);
    mags.extend((1..=HARMONICS).map(|k| z[k].norm()));
    mags.extend((1..=HARMONICS).map(|k| z[CONTOUR_POINTS - k].norm()));

    let first = mags[0];
    let scale = if first >= 1e-9 {
        first
    } else {
        mags.iter().copied().fold(0.0, f64::max)
    };
    if scale > 0.0 {
        mags.iter_mut().for_each(|m| *m /= scale);
    }
    Ok(mags)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn traces_square_clockwise() {
        let r = Raster::from_rows(&["###", "###", "###"]);
        let c = trace_boundary(&r);
        assert_eq!(
            c,
            vec![(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2), (0, 1)]
        );
    }

    #[test]
    fn traces_thin_line_both_ways() {
        let r = Raster::from_rows(&["....", "####"]);
        let c = trace_boundary(&r);
        assert_eq!(c, vec![(0, 1), (1, 1), (2, 1), (3, 1), (2, 1), (1, 1)]);
    }

    #[test]
    fn single_pixel_is_degenerate() {
        let r = Raster::from_rows(&["...", ".#.", "..."]);
        assert_eq!(trace_boundary(&r), vec![(1, 1)]);
        assert!(matches!(fourier_features(&r), Err(Error::DegenerateContour(1))));
    }

    #[test]
    fn resample_spacing_is_uniform() {
        let square = [(0, 0), (4, 0), (4, 4), (0, 4)];
        let z = resample_closed(&square, 8);
        let expect = [(0., 0.), (2., 0.), (4., 0.), (4., 2.), (4., 4.), (2., 4.), (0., 4.), (0., 2.)];
        for (p, e) in z.iter().zip(expect) {
            assert!((p.re - e.0).abs() < 1e-12 && (p.im - e.1).abs() < 1e-12);
        }
    }

    #[test]
    fn first_harmonic_normalizes_to_one() {
        let r = Raster::from_fn(30, 30, |x, y| {
            let (dx, dy) = (x as f64 - 14.5, y as f64 - 14.5);
            dx * dx + dy * dy <= 14.0 * 14.0
        });
        let f = fourier_features(&r).unwrap();
        assert_eq!(f.len(), FOURIER_DIM);
        assert_eq!(f[0], 1.0);
        assert!(f.iter().all(|v| v.is_finite() && *v >= 0.0));
    }
}
