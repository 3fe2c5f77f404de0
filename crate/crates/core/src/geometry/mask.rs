use std::io::Write;
use std::path::Path;

use super::Point2;
use crate::error::{Error, Result};

/// Minimum width and height of a mask, in pixels.
pub const MIN_MASK_SIDE: usize = 8;

/// A segmented object silhouette stored as row-major foreground flags.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if width < MIN_MASK_SIDE || height < MIN_MASK_SIDE {
            return Err(Error::InvalidMask(format!("{width}x{height} is smaller than {MIN_MASK_SIDE}x{MIN_MASK_SIDE}")));
        }
        if bits.len() != width * height {
            return Err(Error::Dimension { expected: width * height, actual: bits.len() });
        }
        Ok(Self { width, height, bits })
    }

    /// All-background mask.
    pub fn empty(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![false; width * height])
    }

    /// Builds a mask by evaluating `f(col, row)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self::new(width, height, bits)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn diagonal(&self) -> f64 {
        (self.width as f64).hypot(self.height as f64)
    }

    /// Foreground flag at `(col, row)`; out-of-bounds pixels are background.
    #[inline]
    pub fn get(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return false;
        }
        self.bits[y as usize * self.width + x as usize]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        if x < self.width && y < self.height {
            self.bits[y * self.width + x] = value;
        }
    }

    /// Foreground flag of the pixel nearest to `p`.
    pub fn contains(&self, p: Point2) -> bool {
        let (x, y) = p.pixel();
        self.get(x, y)
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    /// Foreground pixels in row-major order.
    pub fn foreground(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bits.iter().enumerate().filter(|(_, b)| **b).map(move |(i, _)| (i % self.width, i / self.width))
    }

    pub fn centroid(&self) -> Option<Point2> {
        let mut sum = Point2::default();
        let mut n = 0usize;
        for (x, y) in self.foreground() {
            sum = sum + Point2::new(x as f64, y as f64);
            n += 1;
        }
        (n > 0).then(|| sum * (1.0 / n as f64))
    }

    /// Root-mean-square distance of the foreground from its centroid.
    pub fn radius_of_gyration(&self) -> Option<f64> {
        let c = self.centroid()?;
        let mut acc = 0.0;
        let mut n = 0usize;
        for (x, y) in self.foreground() {
            let d = Point2::new(x as f64, y as f64) - c;
            acc += d.dot(d);
            n += 1;
        }
        Some((acc / n as f64).sqrt())
    }

    /// True when the pixel is foreground and has a background 8-neighbour.
    pub fn is_boundary(&self, x: i64, y: i64) -> bool {
        if !self.get(x, y) {
            return false;
        }
        for dy in -1..=1 {
            for dx in -1..=1 {
                if (dx, dy) != (0, 0) && !self.get(x + dx, y + dy) {
                    return true;
                }
            }
        }
        false
    }

    /// Foreground pixel nearest to `p` (ties resolved by scan order).
    pub fn nearest_foreground(&self, p: Point2) -> Option<Point2> {
        let (px, py) = p.pixel();
        if self.get(px, py) {
            return Some(Point2::new(px as f64, py as f64));
        }
        let max_r = (self.width.max(self.height)) as i64 + 1;
        let mut best: Option<(f64, Point2)> = None;
        for r in 1..=max_r {
            for y in (py - r)..=(py + r) {
                for x in (px - r)..=(px + r) {
                    if (x - px).abs() != r && (y - py).abs() != r {
                        continue;
                    }
                    if self.get(x, y) {
                        let q = Point2::new(x as f64, y as f64);
                        let d = q.distance(p);
                        if best.is_none_or(|(bd, _)| d < bd) {
                            best = Some((d, q));
                        }
                    }
                }
            }
            // Pixels in later rings are at least `r + 0.5` away.
            if let Some((d, q)) = best {
                if d <= r as f64 + 0.5 {
                    return Some(q);
                }
            }
        }
        best.map(|(_, q)| q)
    }

    /// Copies the mask onto a larger background canvas at `(offset_x, offset_y)`.
    pub fn padded(&self, width: usize, height: usize, offset_x: usize, offset_y: usize) -> Result<Self> {
        let mut out = BinaryMask::empty(width, height)?;
        for (x, y) in self.foreground() {
            out.set(x + offset_x, y + offset_y, true);
        }
        Ok(out)
    }

    /// Reads a PNG or PGM mask; any nonzero pixel is foreground.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let reader = image::ImageReader::open(path)
            .map_err(|e| Error::io(path, e))?
            .with_guessed_format()
            .map_err(|e| Error::io(path, e))?;
        let img = reader.decode().map_err(|e| Error::Image { path: path.to_path_buf(), message: e.to_string() })?.to_luma8();
        let (w, h) = img.dimensions();
        let bits = img.pixels().map(|p| p.0[0] != 0).collect();
        Self::new(w as usize, h as usize, bits)
    }

    pub fn to_gray(&self) -> image::GrayImage {
        image::GrayImage::from_fn(self.width as u32, self.height as u32, |x, y| {
            image::Luma([if self.get(x as i64, y as i64) { 255 } else { 0 }])
        })
    }

    pub fn save_png(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.to_gray()
            .save_with_format(path, image::ImageFormat::Png)
            .map_err(|e| Error::Image { path: path.to_path_buf(), message: e.to_string() })
    }

    /// Writes binary PGM (P5): 0 = background, 255 = foreground.
    pub fn save_pgm(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        buf.extend(self.bits.iter().map(|b| if *b { 255u8 } else { 0 }));
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(&buf).map_err(|e| Error::io(path, e))
    }

    /// Writes PGM for `.pgm` paths and PNG otherwise.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("pgm") => self.save_pgm(path),
            _ => self.save_png(path),
        }
    }
}
