//! Edge loops from a sparse "corners + center" convolution.
//!
//! Each output cell samples five positions of a `k`×`k` window (the four
//! corners and the center) over the border-replicated grayscale image. A
//! sample counts when `intensity * on_value >= delta`; a cell is a candidate
//! (set A) when more than `phi` samples count, otherwise it is rejected
//! (set B). A candidate becomes an edge cell when it borders a rejected cell
//! and the mean sampled intensity differs from that neighbour by more than
//! `eta`. Nearby edge cells are then bridged, and only closed loops of
//! sufficient length survive.

use serde::{Deserialize, Serialize};

use super::{BackgroundRemoval, PreprocessError};
use crate::raster::{components, enclosed_cells, Connectivity, RasterImage};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EdgeConfig {
    /// Square kernel side, odd.
    pub kernel_size: usize,
    pub stride: usize,
    pub padding: usize,
    /// Kernel weight at the five sampled positions.
    pub on_value: u32,
    /// Product threshold for a sample to count.
    pub delta: u64,
    /// A cell is a candidate when strictly more than `phi` samples count.
    pub phi: usize,
    /// Minimum mean-intensity step between an edge cell and its neighbour.
    pub eta: f64,
    /// Edge cells closer than this (in cells) are bridged.
    pub gap_distance: f64,
    pub min_loop_length: usize,
    /// Keep only closed loops of at least `min_loop_length` cells.
    pub filter_loops: bool,
}

impl Default for EdgeConfig {
    fn default() -> Self {
        Self {
            kernel_size: 3,
            stride: 1,
            padding: 1,
            on_value: 255,
            delta: 128 * 255,
            phi: 1,
            eta: 40.0,
            gap_distance: 3.0,
            min_loop_length: 12,
            filter_loops: true,
        }
    }
}

impl EdgeConfig {
    pub fn validate(&self) -> Result<(), PreprocessError> {
        let bad = |m: &str| Err(PreprocessError::InvalidConfig(m.into()));
        if self.kernel_size == 0 || self.kernel_size.is_multiple_of(2) {
            return bad("edges.kernel_size must be odd");
        }
        if self.stride == 0 {
            return bad("edges.stride must be at least 1");
        }
        if self.phi > 5 {
            return bad("edges.phi must be within [0, 5]");
        }
        if self.eta.is_nan() || self.gap_distance.is_nan() || self.eta < 0.0 || self.gap_distance < 0.0 {
            return bad("edges.eta and edges.gap_distance must be non-negative");
        }
        Ok(())
    }
}

/// One closed chain of edge cells.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeLoop {
    /// Grid cell indices of the chain, ascending.
    pub cells: Vec<usize>,
    /// Cells strictly enclosed by the chain, ascending.
    pub interior: Vec<usize>,
}

impl EdgeLoop {
    /// Chain plus enclosed cells.
    pub fn area(&self) -> usize {
        self.cells.len() + self.interior.len()
    }
}

/// Result of [`detect_edges`]. All cell indices are row-major on the
/// `grid_width`×`grid_height` result grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMap {
    pub grid_width: usize,
    pub grid_height: usize,
    pub kernel_size: usize,
    pub stride: usize,
    pub padding: usize,
    /// Set A.
    pub candidates: Vec<usize>,
    /// Set B.
    pub rejected: Vec<usize>,
    /// Gradient-selected cells before bridging and loop filtering.
    pub raw_edges: Vec<usize>,
    /// Final edge set.
    pub edges: Vec<usize>,
    /// Closed loops meeting the length threshold, largest area first.
    pub loops: Vec<EdgeLoop>,
}

impl EdgeMap {
    /// Grid cell `(row, col)` of an index.
    pub fn cell(&self, index: usize) -> (usize, usize) {
        (index / self.grid_width, index % self.grid_width)
    }

    /// Pixel rectangle covered by a grid cell: `[x0, x0 + stride)` ×
    /// `[y0, y0 + stride)`, possibly partly outside the image.
    pub fn cell_pixel_origin(&self, row: usize, col: usize) -> (i64, i64) {
        let half = (self.kernel_size as i64 - 1) / 2;
        let shift = (self.stride as i64 - 1) / 2;
        let origin = |i: usize| i as i64 * self.stride as i64 - self.padding as i64 + half - shift;
        (origin(col), origin(row))
    }

    /// The pixel at the center of a cell's sampling window.
    pub fn cell_center_pixel(&self, row: usize, col: usize) -> (i64, i64) {
        let half = (self.kernel_size as i64 - 1) / 2;
        let at = |i: usize| i as i64 * self.stride as i64 - self.padding as i64 + half;
        (at(col), at(row))
    }
}

struct Grid {
    width: usize,
    height: usize,
}

impl Grid {
    fn neighbors4(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let (r, c) = ((i / self.width) as i64, (i % self.width) as i64);
        [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)]
            .into_iter()
            .filter_map(move |(dr, dc)| {
                let (nr, nc) = (r + dr, c + dc);
                (nr >= 0 && nc >= 0 && nr < self.height as i64 && nc < self.width as i64)
                    .then(|| nr as usize * self.width + nc as usize)
            })
    }
}

pub fn detect_edges(img: &RasterImage, cfg: &EdgeConfig) -> Result<EdgeMap, PreprocessError> {
    cfg.validate()?;
    let k = cfg.kernel_size;
    let (w, h) = (img.width() as usize, img.height() as usize);
    if w < k || h < k {
        return Err(PreprocessError::KernelTooLarge {
            kernel: k,
            width: img.width(),
            height: img.height(),
        });
    }
    let gray = img.luma_over_white();
    let p = cfg.padding as i64;
    let sample = |r: i64, c: i64| -> u64 {
        let y = (r - p).clamp(0, h as i64 - 1) as usize;
        let x = (c - p).clamp(0, w as i64 - 1) as usize;
        u64::from(gray[y * w + x])
    };

    let gw = (w - k + 2 * cfg.padding) / cfg.stride + 1;
    let gh = (h - k + 2 * cfg.padding) / cfg.stride + 1;
    let last = k as i64 - 1;
    let mid = last / 2;
    let taps = [(0, 0), (0, last), (last, 0), (last, last), (mid, mid)];
    let on = u64::from(cfg.on_value);

    let mut is_candidate = vec![false; gw * gh];
    let mut mean = vec![0.0f64; gw * gh];
    for i in 0..gh {
        for j in 0..gw {
            let (r0, c0) = ((i * cfg.stride) as i64, (j * cfg.stride) as i64);
            let mut count = 0usize;
            let mut sum = 0u64;
            for &(dr, dc) in &taps {
                let product = sample(r0 + dr, c0 + dc) * on;
                sum += product;
                if product >= cfg.delta {
                    count += 1;
                }
            }
            let idx = i * gw + j;
            is_candidate[idx] = count > cfg.phi;
            mean[idx] = if on == 0 {
                0.0
            } else {
                sum as f64 / (taps.len() as u64 * on) as f64
            };
        }
    }

    let grid = Grid {
        width: gw,
        height: gh,
    };
    let mut raw = vec![false; gw * gh];
    for idx in 0..gw * gh {
        if !is_candidate[idx] {
            continue;
        }
        raw[idx] = grid
            .neighbors4(idx)
            .any(|n| !is_candidate[n] && (mean[idx] - mean[n]).abs() > cfg.eta);
    }

    let bridged = bridge(&raw, &is_candidate, gw, gh, cfg.gap_distance);
    let loops = closed_loops(&bridged, gw, gh, cfg.min_loop_length);

    let edges = if cfg.filter_loops {
        let mut e: Vec<usize> = loops.iter().flat_map(|l| l.cells.iter().copied()).collect();
        e.sort_unstable();
        e
    } else {
        indices(&bridged)
    };

    Ok(EdgeMap {
        grid_width: gw,
        grid_height: gh,
        kernel_size: k,
        stride: cfg.stride,
        padding: cfg.padding,
        candidates: indices(&is_candidate),
        rejected: is_candidate
            .iter()
            .enumerate()
            .filter_map(|(i, &a)| (!a).then_some(i))
            .collect(),
        raw_edges: indices(&raw),
        edges,
        loops,
    })
}

fn indices(mask: &[bool]) -> Vec<usize> {
    mask.iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i))
        .collect()
}

/// Connect pairs of edge cells that are not 4-adjacent but lie closer than
/// `max_dist` by marking every candidate cell their center-to-center
/// segment passes through.
fn bridge(raw: &[bool], candidate: &[bool], gw: usize, gh: usize, max_dist: f64) -> Vec<bool> {
    let mut out = raw.to_vec();
    let reach = max_dist.ceil() as i64;
    for idx in indices(raw) {
        let (r, c) = ((idx / gw) as i64, (idx % gw) as i64);
        for dr in 0..=reach {
            for dc in -reach..=reach {
                // Visit each unordered pair once.
                if dr == 0 && dc <= 0 {
                    continue;
                }
                let (nr, nc) = (r + dr, c + dc);
                if nr >= gh as i64 || nc < 0 || nc >= gw as i64 {
                    continue;
                }
                if dr.abs() + dc.abs() <= 1 {
                    continue;
                }
                let d = ((dr * dr + dc * dc) as f64).sqrt();
                if d >= max_dist || !raw[nr as usize * gw + nc as usize] {
                    continue;
                }
                for (pr, pc) in supercover((r, c), (nr, nc)) {
                    let i = pr as usize * gw + pc as usize;
                    if candidate[i] {
                        out[i] = true;
                    }
                }
            }
        }
    }
    out
}

/// Every cell touched by the segment between two cell centers, including
/// both cells at exact corner crossings.
fn supercover(from: (i64, i64), to: (i64, i64)) -> Vec<(i64, i64)> {
    let (mut r, mut c) = from;
    let (dr, dc) = (to.0 - from.0, to.1 - from.1);
    let (nr, nc) = (dr.abs(), dc.abs());
    let (sr, sc) = (dr.signum(), dc.signum());
    let mut cells = vec![(r, c)];
    let (mut ir, mut ic) = (0i64, 0i64);
    while ir < nr || ic < nc {
        // Compare (0.5 + ic) / nc with (0.5 + ir) / nr without division.
        let decision = (1 + 2 * ic) * nr - (1 + 2 * ir) * nc;
        if decision == 0 {
            cells.push((r + sr, c));
            cells.push((r, c + sc));
            r += sr;
            c += sc;
            ir += 1;
            ic += 1;
        } else if decision < 0 {
            c += sc;
            ic += 1;
        } else {
            r += sr;
            ir += 1;
        }
        cells.push((r, c));
    }
    cells
}

fn closed_loops(edges: &[bool], gw: usize, gh: usize, min_len: usize) -> Vec<EdgeLoop> {
    let mut loops = Vec::new();
    for comp in components(edges, gw, gh, Connectivity::Eight) {
        if comp.len() < min_len.max(4) {
            continue;
        }
        let (mut r0, mut r1, mut c0, mut c1) = (usize::MAX, 0, usize::MAX, 0);
        for &i in &comp {
            let (r, c) = (i / gw, i % gw);
            r0 = r0.min(r);
            r1 = r1.max(r);
            c0 = c0.min(c);
            c1 = c1.max(c);
        }
        if r1 - r0 < 2 || c1 - c0 < 2 {
            continue;
        }
        // Flood the complement inside the bounding box plus a one-cell margin;
        // anything unreachable from that margin is enclosed.
        let (sw, sh) = (c1 - c0 + 3, r1 - r0 + 3);
        let mut wall = vec![false; sw * sh];
        for &i in &comp {
            let (r, c) = (i / gw, i % gw);
            wall[(r - r0 + 1) * sw + (c - c0 + 1)] = true;
        }
        let inside = enclosed_cells(&wall, sw, sh);
        let mut interior: Vec<usize> = inside
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(si, _)| {
                let (sr, sc) = (si / sw, si % sw);
                (sr + r0 - 1) * gw + (sc + c0 - 1)
            })
            .collect();
        if interior.is_empty() {
            continue;
        }
        interior.sort_unstable();
        loops.push(EdgeLoop {
            cells: comp,
            interior,
        });
    }
    // Stable: equal areas keep raster order.
    loops.sort_by_key(|l| std::cmp::Reverse(l.area()));
    loops
}

/// Make every pixel outside the largest closed edge loop transparent.
///
/// The loop and its interior are upscaled to pixel rectangles; each pixel
/// center is classified by even-odd ray casting against the vertical
/// boundary segments of that region.
pub fn remove_background_edges(img: &RasterImage, edges: &EdgeMap) -> BackgroundRemoval {
    let Some(best) = edges.loops.first() else {
        return BackgroundRemoval::warn(
            img.clone(),
            "no closed edge loop found; image left unchanged",
        );
    };
    let (gw, gh) = (edges.grid_width, edges.grid_height);
    let mut filled = vec![false; gw * gh];
    for &i in best.cells.iter().chain(&best.interior) {
        filled[i] = true;
    }

    // Vertical boundary segments in pixel-corner coordinates: (x, y0, y1).
    let s = edges.stride as i64;
    let mut segments: Vec<(i64, i64, i64)> = Vec::new();
    for r in 0..gh {
        for c in 0..=gw {
            let left = c > 0 && filled[r * gw + c - 1];
            let right = c < gw && filled[r * gw + c];
            if left != right {
                let (x0, y0) = edges.cell_pixel_origin(r, c.min(gw - 1));
                let x = if c == gw { x0 + s } else { x0 };
                segments.push((x, y0, y0 + s));
            }
        }
    }

    let mut out = img.clone();
    let (w, h) = (img.width(), img.height());
    for y in 0..h {
        // Pixel centers sit at half-integers; crossings are at integers.
        let cy2 = 2 * i64::from(y) + 1;
        let mut xs: Vec<i64> = segments
            .iter()
            .filter(|&&(_, y0, y1)| 2 * y0 < cy2 && cy2 < 2 * y1)
            .map(|&(x, _, _)| x)
            .collect();
        xs.sort_unstable();
        for x in 0..w {
            let cx2 = 2 * i64::from(x) + 1;
            let crossings = xs.iter().filter(|&&sx| 2 * sx > cx2).count();
            if crossings % 2 == 0 {
                let i = out.index(x, y);
                out.pixels_mut()[i][3] = 0;
            }
        }
    }
    BackgroundRemoval::applied(out)
}
