//! Object bounds from a gradient / blur / threshold pipeline, and the
//! pixel-to-model scaling ratio derived from them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::{components, Connectivity, RasterImage};

#[derive(Debug, Error, PartialEq)]
pub enum ContourError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no foreground pixel survives the threshold")]
    NoForeground,
    #[error("object has zero pixel height")]
    ZeroHeight,
    #[error("model extents must be positive (got height {height}, width {width})")]
    InvalidModelExtent { height: f64, width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMode {
    SumAbs,
    Euclidean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContourConfig {
    pub blur_kernel: usize,
    pub binarize_threshold: u8,
    pub gradient_mode: GradientMode,
}

impl Default for ContourConfig {
    fn default() -> Self {
        Self {
            blur_kernel: 3,
            binarize_threshold: 50,
            gradient_mode: GradientMode::SumAbs,
        }
    }
}

impl ContourConfig {
    pub fn validate(&self) -> Result<(), ContourError> {
        if self.blur_kernel == 0 || self.blur_kernel.is_multiple_of(2) {
            return Err(ContourError::InvalidConfig(format!(
                "blur_kernel must be odd and at least 1, got {}",
                self.blur_kernel
            )));
        }
        Ok(())
    }
}

/// Inclusive pixel bounds of the selected object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub x_min: u32,
    pub y_min: u32,
    pub x_max: u32,
    pub y_max: u32,
}

impl BoundsReport {
    pub fn di_h(&self) -> u32 {
        self.y_max - self.y_min
    }

    pub fn di_w(&self) -> u32 {
        self.x_max - self.x_min
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleSolution {
    /// Image pixels per model unit.
    #[serde(rename = "P_im")]
    pub p_im: f64,
    pub model_height: f64,
    pub model_width: f64,
    /// |di_W/di_H − dm_W/dm_H|; zero when image and model aspect agree.
    pub aspect_mismatch: f64,
}

fn clamp_idx(v: isize, n: usize) -> usize {
    v.clamp(0, n as isize - 1) as usize
}

/// Gradient magnitude after blurring, one value per pixel.
pub fn blurred_gradient(img: &RasterImage, cfg: &ContourConfig) -> Vec<f64> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let gray: Vec<f64> = img.luma_over_white().into_iter().map(f64::from).collect();
    let at = |x: isize, y: isize| gray[clamp_idx(y, h) * w + clamp_idx(x, w)];
    let mut grad = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let (xi, yi) = (x as isize, y as isize);
            let gx = (at(xi + 1, yi) - at(xi - 1, yi)) / 2.0;
            let gy = (at(xi, yi + 1) - at(xi, yi - 1)) / 2.0;
            grad[y * w + x] = match cfg.gradient_mode {
                GradientMode::SumAbs => gx.abs() + gy.abs(),
                GradientMode::Euclidean => gx.hypot(gy),
            };
        }
    }
    let r = (cfg.blur_kernel / 2) as isize;
    if r == 0 {
        return grad;
    }
    let area = (cfg.blur_kernel * cfg.blur_kernel) as f64;
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut sum = 0.0;
            for dy in -r..=r {
                let row = clamp_idx(y as isize + dy, h) * w;
                for dx in -r..=r {
                    sum += grad[row + clamp_idx(x as isize + dx, w)];
                }
            }
            out[y * w + x] = sum / area;
        }
    }
    out
}

/// Pixels whose blurred gradient exceeds the threshold.
pub fn foreground_mask(img: &RasterImage, cfg: &ContourConfig) -> Result<Vec<bool>, ContourError> {
    cfg.validate()?;
    let t = f64::from(cfg.binarize_threshold);
    Ok(blurred_gradient(img, cfg).into_iter().map(|v| v > t).collect())
}

/// Bounding box of the largest 8-connected foreground component. Ties on
/// pixel count go to the component with the smaller `(y_min, x_min)`.
pub fn find_bounds(img: &RasterImage, cfg: &ContourConfig) -> Result<BoundsReport, ContourError> {
    let mask = foreground_mask(img, cfg)?;
    let w = img.width() as usize;
    let comps = components(&mask, w, img.height() as usize, Connectivity::Eight);
    let boxes = comps.iter().map(|c| {
        let mut b = BoundsReport {
            x_min: u32::MAX,
            y_min: u32::MAX,
            x_max: 0,
            y_max: 0,
        };
        for &i in c {
            let (x, y) = ((i % w) as u32, (i / w) as u32);
            b.x_min = b.x_min.min(x);
            b.y_min = b.y_min.min(y);
            b.x_max = b.x_max.max(x);
            b.y_max = b.y_max.max(y);
        }
        (c.len(), b)
    });
    boxes
        .min_by(|(na, a), (nb, b)| {
            nb.cmp(na)
                .then(a.y_min.cmp(&b.y_min))
                .then(a.x_min.cmp(&b.x_min))
        })
        .map(|(_, b)| b)
        .ok_or(ContourError::NoForeground)
}

/// Image pixels per model unit, from the object's pixel height and the
/// model's vertical extent.
pub fn scale_from_bounds(
    bounds: &BoundsReport,
    model_height: f64,
    model_width: f64,
) -> Result<ScaleSolution, ContourError> {
    let positive = |v: f64| v.is_finite() && v > 0.0;
    if !positive(model_height) || !positive(model_width) {
        return Err(ContourError::InvalidModelExtent {
            height: model_height,
            width: model_width,
        });
    }
    let di_h = f64::from(bounds.di_h());
    if di_h == 0.0 {
        return Err(ContourError::ZeroHeight);
    }
    let di_w = f64::from(bounds.di_w());
    Ok(ScaleSolution {
        p_im: di_h / model_height,
        model_height,
        model_width,
        aspect_mismatch: (di_w / di_h - model_width / model_height).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const WHITE: [u8; 4] = [255, 255, 255, 255];
    const BLACK: [u8; 4] = [0, 0, 0, 255];

    fn with_rects(w: u32, h: u32, rects: &[(u32, u32, u32, u32)]) -> RasterImage {
        RasterImage::from_fn(w, h, |x, y| {
            let hit = rects
                .iter()
                .any(|&(x0, y0, x1, y1)| (x0..=x1).contains(&x) && (y0..=y1).contains(&y));
            if hit {
                BLACK
            } else {
                WHITE
            }
        })
    }

    #[test]
    fn square_bounds_within_one_pixel() {
        let img = with_rects(64, 64, &[(20, 20, 39, 39)]);
        let b = find_bounds(&img, &ContourConfig::default()).unwrap();
        for (got, want) in [(b.x_min, 20), (b.y_min, 20), (b.x_max, 39), (b.y_max, 39)] {
            assert!(got.abs_diff(want) <= 1, "{b:?}");
        }
    }

    #[test]
    fn blank_image_has_no_foreground() {
        let img = RasterImage::filled(16, 16, [0, 0, 0, 0]);
        assert_eq!(
            find_bounds(&img, &ContourConfig::default()),
            Err(ContourError::NoForeground)
        );
    }

    #[test]
    fn largest_component_wins() {
        let img = with_rects(64, 64, &[(5, 5, 8, 8), (30, 30, 39, 39)]);
        let b = find_bounds(&img, &ContourConfig::default()).unwrap();
        assert!(b.x_min >= 28 && b.x_max <= 41 && b.y_min >= 28);
    }

    #[test]
    fn even_kernel_rejected() {
        let cfg = ContourConfig {
            blur_kernel: 4,
            ..ContourConfig::default()
        };
        assert!(matches!(
            find_bounds(&RasterImage::filled(4, 4, WHITE), &cfg),
            Err(ContourError::InvalidConfig(_))
        ));
    }

    #[test]
    fn euclidean_mode_finds_same_square() {
        let cfg = ContourConfig {
            gradient_mode: GradientMode::Euclidean,
            ..ContourConfig::default()
        };
        let b = find_bounds(&with_rects(64, 64, &[(20, 20, 39, 39)]), &cfg).unwrap();
        assert!(b.x_min.abs_diff(20) <= 1 && b.y_max.abs_diff(39) <= 1);
    }

    #[test]
    fn scale_quotient_and_diagnostic() {
        let b = BoundsReport {
            x_min: 0,
            y_min: 0,
            x_max: 100,
            y_max: 100,
        };
        let s = scale_from_bounds(&b, 2.0, 2.0).unwrap();
        assert_eq!(s.p_im, 50.0);
        assert_eq!(s.aspect_mismatch, 0.0);
        let s = scale_from_bounds(&b, 100.0, 1.0).unwrap();
        assert_eq!(s.p_im, 1.0);
    }

    #[test]
    fn scale_errors() {
        let flat = BoundsReport {
            x_min: 0,
            y_min: 5,
            x_max: 10,
            y_max: 5,
        };
        assert_eq!(scale_from_bounds(&flat, 1.0, 1.0), Err(ContourError::ZeroHeight));
        assert!(scale_from_bounds(&flat, 0.0, 1.0).is_err());
    }
}
