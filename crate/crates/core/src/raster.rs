//! Binary rasters. `true` is ink.

use image::{GrayImage, Luma};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Raster {
    width: usize,
    height: usize,
    ink: Vec<bool>,
}

/// Inclusive pixel bounds of the ink.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundingBox {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl BoundingBox {
    pub fn width(&self) -> usize {
        self.x1 - self.x0 + 1
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0 + 1
    }
}

impl Raster {
    /// An all-background raster.
    pub fn new(width: usize, height: usize) -> Self {
        Raster {
            width,
            height,
            ink: vec![false; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut ink = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                ink.push(f(x, y));
            }
        }
        Raster { width, height, ink }
    }

    /// Builds a raster from text rows where `#` marks ink. Handy in tests.
    pub fn from_rows(rows: &[&str]) -> Self {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        assert!(
            rows.iter().all(|r| r.chars().count() == width),
            "ragged raster rows"
        );
        Raster {
            width,
            height,
            ink: rows.iter().flat_map(|r| r.chars().map(|c| c == '#')).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.ink[y * self.width + x]
    }

    /// Like `get`, but anything outside the raster reads as background.
    #[inline]
    pub fn get_signed(&self, x: isize, y: isize) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.get(x as usize, y as usize)
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.ink[y * self.width + x] = value;
    }

    pub fn pixels(&self) -> &[bool] {
        &self.ink
    }

    pub fn ink_count(&self) -> usize {
        self.ink.iter().filter(|&&p| p).count()
    }

    pub fn bounding_box(&self) -> Option<BoundingBox> {
        let mut bb: Option<BoundingBox> = None;
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    let b = bb.get_or_insert(BoundingBox {
                        x0: x,
                        y0: y,
                        x1: x,
                        y1: y,
                    });
                    b.x0 = b.x0.min(x);
                    b.x1 = b.x1.max(x);
                    b.y1 = y;
                }
            }
        }
        bb
    }

    pub fn crop(&self, bb: BoundingBox) -> Raster {
        Raster::from_fn(bb.width(), bb.height(), |x, y| self.get(bb.x0 + x, bb.y0 + y))
    }

    /// Crops to the ink bounding box; `None` when there is no ink.
    pub fn tight_crop(&self) -> Option<Raster> {
        self.bounding_box().map(|bb| self.crop(bb))
    }

    /// Adds `margin` background pixels on every side.
    pub fn pad(&self, margin: usize) -> Raster {
        let mut out = Raster::new(self.width + 2 * margin, self.height + 2 * margin);
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    out.set(x + margin, y + margin, true);
                }
            }
        }
        out
    }

    /// Grayscale rendering: ink black, background white.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage::from_fn(self.width as u32, self.height as u32, |x, y| {
            if self.get(x as usize, y as usize) {
                Luma([0])
            } else {
                Luma([255])
            }
        })
    }
}
