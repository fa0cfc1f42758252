//! The self-adaptive armature: keypoint input, bone length scaling,
//! extrusion offsets, armature assembly and model placement.

mod armature;
mod bones;
mod keypoints;
mod placement;
mod scaling;

pub use armature::{build_armature, Armature, ArmatureScaling, BoneSpec};
pub use bones::{BoneName, Side, CHAINS};
pub use keypoints::{derive_keypoints, Keypoint, KeypointName, KeypointSet, Provenance};
pub use placement::{model_placement, ModelBounds3D, Placement};
pub use scaling::{
    bone_length_ratios, extrude_value, image_segments, BoneLengths, ExtrudeDirection, ExtrudeStep,
    RigScaling,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RigError {
    #[error("missing required keypoint `{0}`")]
    MissingKeypoint(&'static str),
    #[error("keypoint `{name}` at ({x}, {y}) lies outside the {width}x{height} image")]
    OutOfBounds {
        name: &'static str,
        x: f64,
        y: f64,
        width: u32,
        height: u32,
    },
    #[error("waist and neck keypoints coincide")]
    CoincidentWaistNeck,
    #[error("invalid scaling: {0}")]
    InvalidScaling(String),
    #[error("degenerate model bounds: {0}")]
    DegenerateBounds(String),
    #[error("cannot parse keypoints document: {0}")]
    Parse(String),
}
