//! Turn one object image plus its 2D body keypoints into a self-adaptive
//! 17-bone armature, interpret free-text animation commands, and export the
//! resulting keyframed motion as a neutral JSON document and as BVH.
//!
//! The pipeline runs in five stages, each usable on its own:
//!
//! 1. [`preprocess`]: background removal by color groups, by convolution
//!    edge loops, or by keypoint trunk boxes.
//! 2. [`contour`]: object bounds and the image-to-model scaling ratio.
//! 3. [`rig`]: keypoint derivation, bone lengths, extrusion offsets,
//!    armature construction and model placement.
//! 4. [`cmdlang`]: the two-stage command interpreter and `command.txt`.
//! 5. [`anim`]: keyframe tracks, the neutral document and BVH export.
//!
//! [`pipeline`] wires the stages together and writes a hashed artifact
//! manifest.

pub mod anim;
pub mod cmdlang;
pub mod contour;
pub mod geometry;
pub mod pipeline;
pub mod preprocess;
pub mod raster;
pub mod rig;

pub use geometry::{Point2, Vec3};
pub use raster::RasterImage;
