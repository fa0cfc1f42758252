//! Keyframe animation built from quantized actions, with neutral JSON and
//! BVH exporters.

mod actions;
mod bvh;
mod neutral;

pub use actions::{apply_action, bone_moves, BoneMove, STEP_FRACTION};
pub use bvh::{export_bvh, render_bvh};
pub use neutral::{export_neutral, import_neutral, render_neutral};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cmdlang::{Action, ActionSpec, Part};
use crate::geometry::Vec3;
use crate::rig::{Armature, Side};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_FPS: u32 = 24;
pub const DEFAULT_FRAMES_PER_KEY: u32 = 10;
/// Target name of the root translation track.
pub const ROOT: &str = "root";

#[derive(Debug, Error, PartialEq)]
pub enum AnimError {
    #[error("no animation defined for action `{action}` on part `{part}`")]
    UnknownCombination { action: Action, part: Part },
    #[error("action `{action}` on `{part}` is not fully quantized: {reason}")]
    Unquantized {
        action: Action,
        part: Part,
        reason: String,
    },
    #[error("frames_per_key and fps must be positive")]
    InvalidTiming,
    #[error("cannot parse animation document: {0}")]
    Parse(String),
    #[error("unsupported schema version {0}")]
    SchemaVersion(u32),
    #[error("cannot write {path}: {message}")]
    Write { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    RotationEuler,
    Location,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Key {
    pub frame: u32,
    /// Radians for rotations, model units for locations.
    pub value: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyframeTrack {
    /// Bone name, or [`ROOT`] for the armature translation.
    pub target: String,
    pub channel: Channel,
    pub keys: Vec<Key>,
}

impl KeyframeTrack {
    /// Value held at `frame`: the latest key at or before it, else zero.
    pub fn value_at(&self, frame: u32) -> Vec3 {
        self.keys
            .iter()
            .take_while(|k| k.frame <= frame)
            .last()
            .map_or(Vec3::ZERO, |k| k.value)
    }

    pub fn last_value(&self) -> Vec3 {
        self.keys.last().map_or(Vec3::ZERO, |k| k.value)
    }
}

/// Links one executed action to its first keyframe and source text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticEntry {
    pub keyframe: u32,
    pub action: Action,
    pub part: Part,
    pub side: Side,
    pub span: (usize, usize),
}

/// Frame cursor threaded through successive actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AnimateResult {
    pub last_frame: u32,
    pub all_frames: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnimationDoc {
    pub schema_version: u32,
    pub fps: u32,
    pub frames_per_key: u32,
    pub total_frames: u32,
    pub armature: Armature,
    pub tracks: Vec<KeyframeTrack>,
    pub semantic: Vec<SemanticEntry>,
}

impl AnimationDoc {
    pub fn new(armature: Armature, fps: u32, frames_per_key: u32) -> Result<Self, AnimError> {
        if fps == 0 || frames_per_key == 0 {
            return Err(AnimError::InvalidTiming);
        }
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            fps,
            frames_per_key,
            total_frames: 0,
            armature,
            tracks: Vec::new(),
            semantic: Vec::new(),
        })
    }

    pub fn track(&self, target: &str, channel: Channel) -> Option<&KeyframeTrack> {
        self.tracks
            .iter()
            .find(|t| t.target == target && t.channel == channel)
    }

    fn track_mut(&mut self, target: &str, channel: Channel) -> &mut KeyframeTrack {
        let pos = match self
            .tracks
            .iter()
            .position(|t| t.target == target && t.channel == channel)
        {
            Some(p) => p,
            None => {
                self.tracks.push(KeyframeTrack {
                    target: target.to_string(),
                    channel,
                    keys: Vec::new(),
                });
                self.tracks.len() - 1
            }
        };
        &mut self.tracks[pos]
    }

    /// Highest key frame over all tracks.
    pub fn max_key_frame(&self) -> u32 {
        self.tracks
            .iter()
            .filter_map(|t| t.keys.last().map(|k| k.frame))
            .max()
            .unwrap_or(0)
    }

    /// Translation step length: a quarter of the armature height.
    pub fn step_length(&self) -> f64 {
        STEP_FRACTION * self.armature.height()
    }
}

/// Fold every spec into a fresh document, starting from frame 0.
pub fn build_animation(
    armature: Armature,
    specs: &[ActionSpec],
    fps: u32,
    frames_per_key: u32,
) -> Result<AnimationDoc, AnimError> {
    let mut doc = AnimationDoc::new(armature, fps, frames_per_key)?;
    let mut cursor = AnimateResult::default();
    for spec in specs {
        cursor = apply_action(&mut doc, spec, cursor)?;
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hold_lookup() {
        let t = KeyframeTrack {
            target: "head".into(),
            channel: Channel::RotationEuler,
            keys: vec![
                Key {
                    frame: 10,
                    value: Vec3::new(1.0, 0.0, 0.0),
                },
                Key {
                    frame: 20,
                    value: Vec3::new(2.0, 0.0, 0.0),
                },
            ],
        };
        assert_eq!(t.value_at(5), Vec3::ZERO);
        assert_eq!(t.value_at(10).x, 1.0);
        assert_eq!(t.value_at(19).x, 1.0);
        assert_eq!(t.value_at(25).x, 2.0);
    }
}
