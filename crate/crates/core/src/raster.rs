//! The RGBA working image and a few raster helpers shared across stages.

use std::collections::VecDeque;
use std::path::Path;

use image::{ImageFormat, RgbaImage};
use thiserror::Error;

/// One RGBA pixel, each channel 0–255.
pub type Rgba = [u8; 4];

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyImage { width: u32, height: u32 },
    #[error("pixel buffer holds {actual} pixels, expected {expected}")]
    PixelCount { expected: usize, actual: usize },
    #[error("cannot read image {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot decode PNG: {0}")]
    Decode(String),
    #[error("cannot write PNG {path}: {message}")]
    Write { path: String, message: String },
}

/// Row-major RGBA pixel grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: u32,
    height: u32,
    pixels: Vec<Rgba>,
}

impl RasterImage {
    pub fn new(width: u32, height: u32, pixels: Vec<Rgba>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::EmptyImage { width, height });
        }
        let expected = width as usize * height as usize;
        if pixels.len() != expected {
            return Err(RasterError::PixelCount {
                expected,
                actual: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// A `width`×`height` image filled with one color.
    ///
    /// # Panics
    /// Panics if either dimension is zero.
    pub fn filled(width: u32, height: u32, color: Rgba) -> Self {
        Self::from_fn(width, height, |_, _| color)
    }

    /// # Panics
    /// Panics if either dimension is zero.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> Rgba) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be non-zero");
        let mut pixels = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[Rgba] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [Rgba] {
        &mut self.pixels
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn index(&self, x: u32, y: u32) -> usize {
        y as usize * self.width as usize + x as usize
    }

    pub fn get(&self, x: u32, y: u32) -> Rgba {
        self.pixels[self.index(x, y)]
    }

    pub fn set(&mut self, x: u32, y: u32, px: Rgba) {
        let i = self.index(x, y);
        self.pixels[i] = px;
    }

    /// Number of fully transparent pixels.
    pub fn transparent_count(&self) -> usize {
        self.pixels.iter().filter(|p| p[3] == 0).count()
    }

    /// Decode a PNG from memory. Sources without alpha become opaque.
    pub fn decode_png(bytes: &[u8]) -> Result<Self, RasterError> {
        let img = image::load_from_memory_with_format(bytes, ImageFormat::Png)
            .map_err(|e| RasterError::Decode(e.to_string()))?;
        Ok(Self::from(img.to_rgba8()))
    }

    pub fn load_png(path: impl AsRef<Path>) -> Result<Self, RasterError> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|source| RasterError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::decode_png(&bytes)
    }

    pub fn encode_png(&self) -> Result<Vec<u8>, RasterError> {
        let mut out = std::io::Cursor::new(Vec::new());
        RgbaImage::from(self)
            .write_to(&mut out, ImageFormat::Png)
            .map_err(|e| RasterError::Write {
                path: "<memory>".into(),
                message: e.to_string(),
            })?;
        Ok(out.into_inner())
    }

    pub fn save_png(&self, path: impl AsRef<Path>) -> Result<(), RasterError> {
        let path = path.as_ref();
        let bytes = self.encode_png()?;
        std::fs::write(path, bytes).map_err(|e| RasterError::Write {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    /// Grayscale intensity of every pixel, ignoring alpha.
    pub fn luma(&self) -> Vec<u8> {
        self.pixels.iter().map(|p| luma(*p)).collect()
    }

    /// Grayscale intensity after compositing over a white backdrop, so that
    /// removed (transparent) pixels read as plain background.
    pub fn luma_over_white(&self) -> Vec<u8> {
        self.pixels
            .iter()
            .map(|p| {
                let l = f64::from(luma(*p));
                let a = f64::from(p[3]) / 255.0;
                (a * l + (1.0 - a) * 255.0).round() as u8
            })
            .collect()
    }
}

impl From<RgbaImage> for RasterImage {
    fn from(img: RgbaImage) -> Self {
        let (width, height) = img.dimensions();
        let pixels = img.pixels().map(|p| p.0).collect();
        Self {
            width,
            height,
            pixels,
        }
    }
}

impl From<&RasterImage> for RgbaImage {
    fn from(img: &RasterImage) -> Self {
        let raw: Vec<u8> = img.pixels.iter().flat_map(|p| p.iter().copied()).collect();
        RgbaImage::from_raw(img.width, img.height, raw).expect("buffer length matches dimensions")
    }
}

/// `round(0.299 r + 0.587 g + 0.114 b)`.
pub fn luma(p: Rgba) -> u8 {
    let v = 0.299 * f64::from(p[0]) + 0.587 * f64::from(p[1]) + 0.114 * f64::from(p[2]);
    v.round().min(255.0) as u8
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    fn offsets(self) -> &'static [(i64, i64)] {
        match self {
            Connectivity::Four => &[(0, -1), (-1, 0), (1, 0), (0, 1)],
            Connectivity::Eight => &[
                (-1, -1),
                (0, -1),
                (1, -1),
                (-1, 0),
                (1, 0),
                (-1, 1),
                (0, 1),
                (1, 1),
            ],
        }
    }
}

/// Connected components of the `true` cells of a row-major mask, in raster
/// order of their first cell. Each component lists its cell indices sorted
/// ascending.
pub fn components(mask: &[bool], width: usize, height: usize, conn: Connectivity) -> Vec<Vec<usize>> {
    debug_assert_eq!(mask.len(), width * height);
    let mut seen = vec![false; mask.len()];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut comp = Vec::new();
        while let Some(i) = queue.pop_front() {
            comp.push(i);
            let (x, y) = ((i % width) as i64, (i / width) as i64);
            for &(dx, dy) in conn.offsets() {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= width as i64 || ny >= height as i64 {
                    continue;
                }
                let j = ny as usize * width + nx as usize;
                if mask[j] && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Cells not reachable from the grid border through 4-connected passable
/// cells. `wall[i]` marks impassable cells; walls themselves are never
/// reported as enclosed.
pub fn enclosed_cells(wall: &[bool], width: usize, height: usize) -> Vec<bool> {
    let mut reached = vec![false; wall.len()];
    let mut queue = VecDeque::new();
    let seed = |x: usize, y: usize, reached: &mut Vec<bool>, queue: &mut VecDeque<usize>| {
        let i = y * width + x;
        if !wall[i] && !reached[i] {
            reached[i] = true;
            queue.push_back(i);
        }
    };
    for x in 0..width {
        seed(x, 0, &mut reached, &mut queue);
        seed(x, height - 1, &mut reached, &mut queue);
    }
    for y in 0..height {
        seed(0, y, &mut reached, &mut queue);
        seed(width - 1, y, &mut reached, &mut queue);
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = ((i % width) as i64, (i / width) as i64);
        for &(dx, dy) in Connectivity::Four.offsets() {
            let (nx, ny) = (x + dx, y + dy);
            if nx < 0 || ny < 0 || nx >= width as i64 || ny >= height as i64 {
                continue;
            }
            let j = ny as usize * width + nx as usize;
            if !wall[j] && !reached[j] {
                reached[j] = true;
                queue.push_back(j);
            }
        }
    }
    wall.iter()
        .zip(&reached)
        .map(|(&w, &r)| !w && !r)
        .collect()
}
