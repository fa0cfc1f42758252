use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{BackgroundRemoval, PreprocessError};
use crate::raster::RasterImage;

/// How many of the most frequent colors to drop, and how far (per channel)
/// a pixel may stray from one of them and still be merged into its group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColorGroupConfig {
    pub n: usize,
    pub tolerance: [u8; 3],
}

impl Default for ColorGroupConfig {
    fn default() -> Self {
        Self {
            n: 1,
            tolerance: [10, 10, 10],
        }
    }
}

impl ColorGroupConfig {
    pub fn validate(&self) -> Result<(), PreprocessError> {
        if self.n == 0 {
            return Err(PreprocessError::InvalidConfig(
                "color_groups.n must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorGroup {
    pub representative: [u8; 3],
    pub member_pixel_count: usize,
    /// Row-major pixel indices, ascending.
    pub member_mask: Vec<usize>,
}

/// Exact-color histogram over every pixel (alpha ignored), most frequent
/// first; equal counts are ordered by color value.
pub fn color_histogram(img: &RasterImage) -> Vec<([u8; 3], usize)> {
    let mut counts: HashMap<[u8; 3], usize> = HashMap::new();
    for p in img.pixels() {
        *counts.entry([p[0], p[1], p[2]]).or_default() += 1;
    }
    let mut sorted: Vec<_> = counts.into_iter().collect();
    sorted.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    sorted
}

fn within(color: [u8; 3], center: [u8; 3], tol: [u8; 3]) -> bool {
    (0..3).all(|c| color[c].abs_diff(center[c]) <= tol[c])
}

/// Groups around the `n` most frequent colors. A pixel that falls inside
/// several tolerance boxes joins the highest-ranked group only.
pub fn color_groups(
    img: &RasterImage,
    cfg: &ColorGroupConfig,
) -> Result<Vec<ColorGroup>, PreprocessError> {
    cfg.validate()?;
    let reps: Vec<[u8; 3]> = color_histogram(img)
        .into_iter()
        .take(cfg.n)
        .map(|(c, _)| c)
        .collect();
    let mut groups: Vec<ColorGroup> = reps
        .iter()
        .map(|&representative| ColorGroup {
            representative,
            member_pixel_count: 0,
            member_mask: Vec::new(),
        })
        .collect();
    for (i, p) in img.pixels().iter().enumerate() {
        let color = [p[0], p[1], p[2]];
        if let Some(g) = groups
            .iter_mut()
            .find(|g| within(color, g.representative, cfg.tolerance))
        {
            g.member_mask.push(i);
            g.member_pixel_count += 1;
        }
    }
    Ok(groups)
}

/// Make every pixel of the top-`n` color groups transparent.
///
/// Fewer than `n` distinct colors is not an error: every group present is
/// removed and the result carries a warning status.
pub fn remove_background_color_groups(
    img: &RasterImage,
    cfg: &ColorGroupConfig,
) -> Result<BackgroundRemoval, PreprocessError> {
    let groups = color_groups(img, cfg)?;
    let mut out = img.clone();
    let pixels = out.pixels_mut();
    for g in &groups {
        for &i in &g.member_mask {
            pixels[i][3] = 0;
        }
    }
    if groups.len() < cfg.n {
        Ok(BackgroundRemoval::warn(
            out,
            format!(
                "image has {} distinct colors, fewer than n = {}; removed all groups present",
                groups.len(),
                cfg.n
            ),
        ))
    } else {
        Ok(BackgroundRemoval::applied(out))
    }
}
