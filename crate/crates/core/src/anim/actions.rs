use std::f64::consts::PI;

use super::{AnimError, AnimateResult, AnimationDoc, Channel, Key, SemanticEntry, ROOT};
use crate::cmdlang::{Action, ActionSpec, Part};
use crate::rig::Side;

/// Translation step as a fraction of armature height.
pub const STEP_FRACTION: f64 = 0.25;

const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;

/// A rotation change on one bone: `keys` lists offsets (degrees) from the
/// bone's current pose, one per emitted key.
#[derive(Debug, Clone, PartialEq)]
pub struct BoneMove {
    pub bone: String,
    pub axis: usize,
    pub keys: Vec<f64>,
}

fn sided(side: Side, stem: &str) -> String {
    match side {
        Side::Left => format!("left_{stem}"),
        _ => format!("right_{stem}"),
    }
}

/// Raising an arm swings it outward: negative about the forward axis on
/// the left, positive on the right.
fn arm_sign(side: Side) -> f64 {
    if side == Side::Left {
        -1.0
    } else {
        1.0
    }
}

fn one(bone: String, axis: usize, deg: f64) -> Vec<BoneMove> {
    vec![BoneMove {
        bone,
        axis,
        keys: vec![deg],
    }]
}

fn wave(bone: String, axis: usize, deg: f64) -> Vec<BoneMove> {
    vec![BoneMove {
        bone,
        axis,
        keys: vec![deg, 0.0, deg],
    }]
}

/// The rotation table. Returns `None` for translations.
pub fn bone_moves(spec: &ActionSpec) -> Result<Option<Vec<BoneMove>>, AnimError> {
    let unknown = || AnimError::UnknownCombination {
        action: spec.action,
        part: spec.part,
    };
    let d = spec.degrees;
    let s = spec.side;
    let moves = match (spec.part, spec.action) {
        (Part::Body, Action::Move | Action::Walk | Action::Run) => return Ok(None),
        (Part::Body, Action::TurnLeft) => one("waist".into(), Z, d),
        (Part::Body, Action::TurnRight) => one("waist".into(), Z, -d),
        (Part::Head, Action::Raise) => one("head".into(), X, d),
        (Part::Head, Action::Bow) => one("head".into(), X, -d),
        (Part::Head, Action::Shake) => wave("head".into(), Z, d),
        (Part::Head, Action::LookLeft | Action::LookRight) => {
            let half = if spec.action == Action::LookLeft { d / 2.0 } else { -d / 2.0 };
            vec![
                BoneMove {
                    bone: "head".into(),
                    axis: Z,
                    keys: vec![half],
                },
                BoneMove {
                    bone: "neck".into(),
                    axis: Z,
                    keys: vec![half],
                },
            ]
        }
        (Part::Hand, Action::Raise) => one(sided(s, "shoulder"), Y, arm_sign(s) * d),
        (Part::Hand, Action::PutDown) => one(sided(s, "shoulder"), Y, -arm_sign(s) * d),
        (Part::Forearm, Action::Raise) => one(sided(s, "forearm"), Y, arm_sign(s) * d),
        (Part::Forearm, Action::PutDown) => one(sided(s, "forearm"), Y, -arm_sign(s) * d),
        (Part::Hand | Part::Forearm, Action::Wave) => {
            wave(sided(s, "forearm"), Y, arm_sign(s) * d)
        }
        (Part::Leg, Action::Lift) => one(sided(s, "hip"), X, -d),
        (Part::Leg, Action::PutDown) => one(sided(s, "hip"), X, d),
        (Part::Calf, Action::Lift) => one(sided(s, "calf"), X, -d),
        (Part::Calf, Action::PutDown) => one(sided(s, "calf"), X, d),
        _ => return Err(unknown()),
    };
    Ok(Some(moves))
}

fn check_quantized(spec: &ActionSpec) -> Result<(), AnimError> {
    let fail = |reason: &str| AnimError::Unquantized {
        action: spec.action,
        part: spec.part,
        reason: reason.into(),
    };
    if spec.part.is_sided() && spec.side == Side::None {
        return Err(fail("side unresolved"));
    }
    if !spec.degrees.is_finite() || (spec.degrees < 0.0 && !(spec.action.is_turn() && spec.degrees == -1.0)) {
        return Err(fail("degrees missing or negative"));
    }
    if spec.action.is_translation() && spec.direction.is_none() {
        return Err(fail("direction missing"));
    }
    Ok(())
}

/// Key one action after `cursor` and return the advanced cursor.
///
/// Each emitted key lands `frames_per_key` after the previous one. Rotations
/// accumulate on top of the bone's latest keyed pose; a turn with degrees
/// `-1` is a full 360° turn.
pub fn apply_action(
    doc: &mut AnimationDoc,
    spec: &ActionSpec,
    cursor: AnimateResult,
) -> Result<AnimateResult, AnimError> {
    check_quantized(spec)?;
    let mut spec = spec.clone();
    if spec.action.is_turn() && spec.degrees == -1.0 {
        spec.degrees = 360.0;
    }
    let fpk = doc.frames_per_key;
    let frame = |k: u32| cursor.last_frame + k * fpk;
    let n_keys: u32 = match bone_moves(&spec)? {
        Some(moves) => {
            let n = moves.iter().map(|m| m.keys.len()).max().unwrap_or(0) as u32;
            for m in moves {
                let track = doc.track_mut(&m.bone, Channel::RotationEuler);
                let base = track.last_value();
                for (k, deg) in m.keys.iter().enumerate() {
                    let mut value = base;
                    *value.component_mut(m.axis) += deg * (PI / 180.0);
                    track.keys.push(Key {
                        frame: frame(k as u32 + 1),
                        value,
                    });
                }
            }
            n
        }
        None => {
            let (axis, sign) = spec.direction.expect("checked above").axis();
            let count = spec.count.unwrap_or(1).max(1);
            let step = doc.step_length();
            let steps: Vec<f64> = if spec.action == Action::Move {
                vec![count as f64]
            } else {
                vec![1.0; count as usize]
            };
            let track = doc.track_mut(ROOT, Channel::Location);
            let mut value = track.last_value();
            for (k, n) in steps.iter().enumerate() {
                *value.component_mut(axis) += sign * n * step;
                track.keys.push(Key {
                    frame: frame(k as u32 + 1),
                    value,
                });
            }
            steps.len() as u32
        }
    };
    doc.semantic.push(SemanticEntry {
        keyframe: frame(1),
        action: spec.action,
        part: spec.part,
        side: spec.side,
        span: spec.span,
    });
    doc.total_frames = doc.max_key_frame();
    Ok(AnimateResult {
        last_frame: frame(n_keys),
        all_frames: cursor.all_frames + n_keys * fpk,
    })
}
