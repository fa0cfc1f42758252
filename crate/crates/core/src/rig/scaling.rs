use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{BoneName, KeypointName, KeypointSet, RigError, Side};
use crate::geometry::{Point2, Vec3};

/// Parameters converting image-pixel distances into armature units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RigScaling {
    /// Armature-space length of the waist-to-neck reference.
    pub da_wn: f64,
    pub p_neck: f64,
    pub p_head: f64,
    /// Pixels per model unit from the contour stage. When present it takes
    /// precedence over `da_wn`, which is then solved from it.
    pub image_px_per_unit: Option<f64>,
}

impl Default for RigScaling {
    fn default() -> Self {
        Self {
            da_wn: 1.0,
            p_neck: 1.0,
            p_head: 1.5,
            image_px_per_unit: None,
        }
    }
}

impl RigScaling {
    pub fn validate(&self) -> Result<(), RigError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.da_wn) {
            return Err(RigError::InvalidScaling(format!("da_wn = {}", self.da_wn)));
        }
        if !positive(self.p_neck) || !positive(self.p_head) {
            return Err(RigError::InvalidScaling(format!(
                "p_neck = {}, p_head = {}",
                self.p_neck, self.p_head
            )));
        }
        if let Some(p) = self.image_px_per_unit {
            if !positive(p) {
                return Err(RigError::InvalidScaling(format!("image_px_per_unit = {p}")));
            }
        }
        Ok(())
    }

    /// Model units per image pixel for a figure with waist-to-neck distance
    /// `di_wn` pixels.
    pub fn units_per_px(&self, di_wn: f64) -> f64 {
        match self.image_px_per_unit {
            Some(px_per_unit) => 1.0 / px_per_unit,
            None => self.da_wn / di_wn,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtrudeDirection {
    Left,
    Right,
    Axial,
}

impl ExtrudeDirection {
    pub fn for_bone(bone: BoneName) -> Self {
        match bone.side() {
            Side::Left => ExtrudeDirection::Left,
            Side::Right => ExtrudeDirection::Right,
            Side::None => ExtrudeDirection::Axial,
        }
    }
}

/// One extrusion: the 2D image segment and the resulting 3D offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtrudeStep {
    pub start: Point2,
    pub end: Point2,
    pub direction: ExtrudeDirection,
    pub value: Vec3,
}

fn clean(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// 3D offset of an image segment. Image x maps to model x, image y (down)
/// to model z (up); depth is always zero. The left branch forces +x, the
/// right branch -x.
pub fn extrude_value(
    start: Point2,
    end: Point2,
    direction: ExtrudeDirection,
    units_per_px: f64,
) -> ExtrudeStep {
    let x = (end.x - start.x) * units_per_px;
    let z = -(end.y - start.y) * units_per_px;
    let x = match direction {
        ExtrudeDirection::Left => x.abs(),
        ExtrudeDirection::Right => -x.abs(),
        ExtrudeDirection::Axial => x,
    };
    ExtrudeStep {
        start,
        end,
        direction,
        value: Vec3::new(clean(x), 0.0, clean(z)),
    }
}

/// Image-space segment (head, tail) of every bone, in generation order.
///
/// The torso chain splits waist-to-neck into thirds. The neck runs from the
/// neck keypoint toward the mouth for `p_neck` times their distance and the
/// head continues in the same direction for `p_head` times it.
pub fn image_segments(
    kp: &KeypointSet,
    scaling: &RigScaling,
) -> Result<Vec<(BoneName, Point2, Point2)>, RigError> {
    use KeypointName as K;
    let waist = kp.require(K::Waist)?;
    let neck = kp.require(K::Neck)?;
    let mouth = kp.require(K::Mouth)?;
    if waist.distance(neck) == 0.0 {
        return Err(RigError::CoincidentWaistNeck);
    }
    let neck_tail = neck + (mouth - neck) * scaling.p_neck;
    let dori = neck.distance(mouth);
    let up = if dori > 0.0 {
        (mouth - neck) * (1.0 / dori)
    } else {
        (neck - waist) * (1.0 / waist.distance(neck))
    };
    let head_tail = neck_tail + up * (scaling.p_head * dori);
    let third = |k: f64| waist.lerp(neck, k / 3.0);

    let mut out = Vec::with_capacity(17);
    for bone in BoneName::ALL {
        let (h, t) = match bone {
            BoneName::Waist => (third(0.0), third(1.0)),
            BoneName::Belly => (third(1.0), third(2.0)),
            BoneName::Chest => (third(2.0), neck),
            BoneName::Neck => (neck, neck_tail),
            BoneName::Head => (neck_tail, head_tail),
            BoneName::LeftShoulder => (neck, kp.require(K::LeftShoulder)?),
            BoneName::LeftUpperArm => (kp.require(K::LeftShoulder)?, kp.require(K::LeftElbow)?),
            BoneName::LeftForearm => (kp.require(K::LeftElbow)?, kp.require(K::LeftWrist)?),
            BoneName::RightShoulder => (neck, kp.require(K::RightShoulder)?),
            BoneName::RightUpperArm => {
                (kp.require(K::RightShoulder)?, kp.require(K::RightElbow)?)
            }
            BoneName::RightForearm => (kp.require(K::RightElbow)?, kp.require(K::RightWrist)?),
            BoneName::LeftHip => (waist, kp.require(K::LeftHip)?),
            BoneName::LeftThigh => (kp.require(K::LeftHip)?, kp.require(K::LeftKnee)?),
            BoneName::LeftCalf => (kp.require(K::LeftKnee)?, kp.require(K::LeftAnkle)?),
            BoneName::RightHip => (waist, kp.require(K::RightHip)?),
            BoneName::RightThigh => (kp.require(K::RightHip)?, kp.require(K::RightKnee)?),
            BoneName::RightCalf => (kp.require(K::RightKnee)?, kp.require(K::RightAnkle)?),
        };
        out.push((bone, h, t));
    }
    Ok(out)
}

/// Per-bone image lengths and their armature-space counterparts.
#[derive(Debug, Clone, PartialEq)]
pub struct BoneLengths {
    /// Waist-to-neck image distance in pixels.
    pub di_wn: f64,
    pub units_per_px: f64,
    /// Image length of each bone in pixels.
    pub image: BTreeMap<BoneName, f64>,
    /// Armature length of each bone in model units.
    pub armature: BTreeMap<BoneName, f64>,
}

impl BoneLengths {
    /// Image length relative to the waist-to-neck reference.
    pub fn ratio(&self, bone: BoneName) -> f64 {
        self.image[&bone] / self.di_wn
    }
}

pub fn bone_length_ratios(kp: &KeypointSet, scaling: &RigScaling) -> Result<BoneLengths, RigError> {
    scaling.validate()?;
    let waist = kp.require(KeypointName::Waist)?;
    let neck = kp.require(KeypointName::Neck)?;
    let di_wn = waist.distance(neck);
    if di_wn == 0.0 {
        return Err(RigError::CoincidentWaistNeck);
    }
    let units_per_px = scaling.units_per_px(di_wn);
    let mut image = BTreeMap::new();
    let mut armature = BTreeMap::new();
    for (bone, h, t) in image_segments(kp, scaling)? {
        let d = h.distance(t);
        image.insert(bone, d);
        armature.insert(bone, d * units_per_px);
    }
    Ok(BoneLengths {
        di_wn,
        units_per_px,
        image,
        armature,
    })
}
