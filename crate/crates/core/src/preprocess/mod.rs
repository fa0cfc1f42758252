//! Background removal: three independent methods that all produce an RGBA
//! image of the same size with background pixels made fully transparent.
//!
//! * [`remove_background_color_groups`] drops the most frequent color groups.
//! * [`detect_edges`] + [`remove_background_edges`] keep the inside of the
//!   largest closed edge loop found by a sparse convolution.
//! * [`remove_background_trunks`] keeps the union of per-bone boxes built
//!   around the body keypoints.
//!
//! "Removal" only ever lowers alpha to 0; RGB channels are left untouched.

mod color_groups;
mod edges;
mod trunks;

pub use color_groups::{
    color_groups, color_histogram, remove_background_color_groups, ColorGroup, ColorGroupConfig,
};
pub use edges::{detect_edges, remove_background_edges, EdgeConfig, EdgeLoop, EdgeMap};
pub use trunks::{remove_background_trunks, trunk_box, trunk_boxes, TrunkBox, TrunkConfig};

use thiserror::Error;

use crate::raster::RasterImage;

#[derive(Debug, Error, PartialEq)]
pub enum PreprocessError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("kernel {kernel}x{kernel} does not fit a {width}x{height} image")]
    KernelTooLarge { kernel: usize, width: u32, height: u32 },
    #[error("trunk segment has zero length")]
    ZeroLengthSegment,
    #[error("keypoints: {0}")]
    Keypoints(String),
}

/// Whether a removal did what was asked or fell back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RemovalStatus {
    Applied,
    /// The method ran but could not fully apply; the message says why.
    Warning(String),
}

/// Output of every background-removal method.
#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundRemoval {
    pub image: RasterImage,
    pub status: RemovalStatus,
}

impl BackgroundRemoval {
    fn applied(image: RasterImage) -> Self {
        Self {
            image,
            status: RemovalStatus::Applied,
        }
    }

    fn warn(image: RasterImage, message: impl Into<String>) -> Self {
        let message = message.into();
        log::warn!("{message}");
        Self {
            image,
            status: RemovalStatus::Warning(message),
        }
    }
}
