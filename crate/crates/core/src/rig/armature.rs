use serde::{Deserialize, Serialize};

use super::{
    bone_length_ratios, extrude_value, image_segments, BoneName, ExtrudeDirection, KeypointSet,
    Placement, RigError, RigScaling,
};
use crate::geometry::Vec3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoneSpec {
    pub name: BoneName,
    pub parent: Option<BoneName>,
    pub head: Vec3,
    pub tail: Vec3,
    /// Image length over the waist-to-neck image length.
    pub length_ratio: f64,
    /// Rest angle of the image segment, counter-clockwise from +x, radians.
    pub rest_rotation: f64,
}

impl BoneSpec {
    pub fn length(&self) -> f64 {
        self.head.distance(self.tail)
    }
}

/// Scaling values the armature was built with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmatureScaling {
    /// Model units per image pixel.
    #[serde(rename = "P_im")]
    pub p_im: f64,
    pub da_wn: f64,
    pub di_wn: f64,
    pub p_neck: f64,
    pub p_head: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Armature {
    pub bones: Vec<BoneSpec>,
    pub placement: Placement,
    pub scaling: ArmatureScaling,
}

impl Armature {
    pub fn bone(&self, name: BoneName) -> &BoneSpec {
        self.bones
            .iter()
            .find(|b| b.name == name)
            .expect("armature holds every bone")
    }

    /// Distinct joint positions (bone heads and tails).
    pub fn joints(&self) -> Vec<Vec3> {
        let mut out: Vec<Vec3> = Vec::with_capacity(self.bones.len() * 2);
        for b in &self.bones {
            for p in [b.head, b.tail] {
                if !out.iter().any(|q| q.distance(p) < 1e-9) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Vertical (z) extent over all joints.
    pub fn height(&self) -> f64 {
        let zs = self.joints().into_iter().map(|p| p.z);
        let (lo, hi) = zs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| {
            (lo.min(z), hi.max(z))
        });
        hi - lo
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("armature serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, RigError> {
        serde_json::from_str(text).map_err(|e| RigError::Parse(e.to_string()))
    }
}

/// Build the 17-bone armature.
///
/// Chains are extruded in generation order: each bone's tail is its head
/// plus the extrusion offset of its image segment, and each chain root
/// starts at the joint it hangs from. The waist's head sits at the
/// placement anchor, i.e. the model location without the fine-tuning
/// offset, so `tau` moves the model relative to the armature.
pub fn build_armature(
    kp: &KeypointSet,
    scaling: &RigScaling,
    placement: &Placement,
) -> Result<Armature, RigError> {
    let lengths = bone_length_ratios(kp, scaling)?;
    let u = lengths.units_per_px;
    let mut bones: Vec<BoneSpec> = Vec::with_capacity(17);
    for (name, start, end) in image_segments(kp, scaling)? {
        let head = match name {
            BoneName::Waist => placement.anchor(),
            BoneName::LeftHip | BoneName::RightHip => bones[0].head,
            _ => {
                let parent = name.parent().expect("non-root bone has a parent");
                bones
                    .iter()
                    .find(|b| b.name == parent)
                    .expect("parents are generated first")
                    .tail
            }
        };
        let step = extrude_value(start, end, ExtrudeDirection::for_bone(name), u);
        let d = end - start;
        bones.push(BoneSpec {
            name,
            parent: name.parent(),
            head,
            tail: head + step.value,
            length_ratio: lengths.ratio(name),
            rest_rotation: (-d.y).atan2(d.x),
        });
    }
    for b in &bones {
        if b.length() <= 0.0 {
            log::warn!("bone `{}` has zero length", b.name);
        }
    }
    Ok(Armature {
        bones,
        placement: *placement,
        scaling: ArmatureScaling {
            p_im: u,
            da_wn: u * lengths.di_wn,
            di_wn: lengths.di_wn,
            p_neck: scaling.p_neck,
            p_head: scaling.p_head,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rig::{model_placement, KeypointName::*, ModelBounds3D, CHAINS};

    fn figure() -> KeypointSet {
        KeypointSet::new((200, 200))
            .with(Mouth, 100.0, 30.0)
            .with(Neck, 100.0, 40.0)
            .with(Waist, 100.0, 80.0)
            .with(LeftShoulder, 120.0, 40.0)
            .with(RightShoulder, 80.0, 40.0)
            .with(LeftElbow, 140.0, 55.0)
            .with(RightElbow, 60.0, 55.0)
            .with(LeftWrist, 150.0, 75.0)
            .with(RightWrist, 50.0, 75.0)
            .with(LeftHip, 110.0, 80.0)
            .with(RightHip, 90.0, 80.0)
            .with(LeftKnee, 112.0, 110.0)
            .with(RightKnee, 88.0, 110.0)
            .with(LeftAnkle, 112.0, 140.0)
            .with(RightAnkle, 88.0, 140.0)
    }

    #[test]
    fn chains_are_connected() {
        let arm = build_armature(&figure(), &RigScaling::default(), &Placement::default()).unwrap();
        assert_eq!(arm.bones.len(), 17);
        for chain in CHAINS {
            for pair in chain.windows(2) {
                let (p, c) = (arm.bone(pair[0]), arm.bone(pair[1]));
                assert!(p.tail.distance(c.head) < 1e-9, "{} -> {}", p.name, c.name);
            }
        }
        assert!(arm.bone(BoneName::LeftShoulder).head.distance(arm.bone(BoneName::Chest).tail) < 1e-9);
        assert_eq!(arm.bone(BoneName::RightHip).head, arm.bone(BoneName::Waist).head);
    }

    #[test]
    fn height_matches_image_extent() {
        let arm = build_armature(&figure(), &RigScaling::default(), &Placement::default()).unwrap();
        // joints span y = 15 (head tip) .. 140 (ankles); 125 px at 1/40 units/px
        assert!((arm.height() - 125.0 / 40.0).abs() < 1e-9);
    }

    #[test]
    fn root_sits_at_anchor() {
        let b = ModelBounds3D::new(
            Vec3::new(-1.0, -1.0, 0.0),
            Vec3::new(1.0, 1.0, 4.0),
            Vec3::new(1.0, 1.0, 1.0),
        );
        let p = model_placement(&b, Vec3::new(0.0, 0.0, 0.1)).unwrap();
        let arm = build_armature(&figure(), &RigScaling::default(), &p).unwrap();
        assert_eq!(arm.bone(BoneName::Waist).head, Vec3::new(0.0, 0.0, 2.0));
    }

    #[test]
    fn json_round_trip() {
        let arm = build_armature(&figure(), &RigScaling::default(), &Placement::default()).unwrap();
        let text = arm.to_json();
        assert!(text.contains("\"P_im\""));
        assert!(text.contains("\"left_upper_arm\""));
        assert_eq!(Armature::from_json(&text).unwrap(), arm);
    }

    #[test]
    fn rest_rotation_is_image_angle() {
        let arm = build_armature(&figure(), &RigScaling::default(), &Placement::default()).unwrap();
        assert!((arm.bone(BoneName::Waist).rest_rotation - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!(arm.bone(BoneName::LeftShoulder).rest_rotation.abs() < 1e-12);
    }
}
