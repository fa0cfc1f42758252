use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RigError;
use crate::geometry::Point2;

/// Named body landmarks in image pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeypointName {
    Nose,
    Mouth,
    Neck,
    Waist,
    LeftShoulder,
    RightShoulder,
    LeftElbow,
    RightElbow,
    LeftWrist,
    RightWrist,
    LeftHip,
    RightHip,
    LeftKnee,
    RightKnee,
    LeftAnkle,
    RightAnkle,
}

impl KeypointName {
    pub const ALL: [KeypointName; 16] = [
        KeypointName::Nose,
        KeypointName::Mouth,
        KeypointName::Neck,
        KeypointName::Waist,
        KeypointName::LeftShoulder,
        KeypointName::RightShoulder,
        KeypointName::LeftElbow,
        KeypointName::RightElbow,
        KeypointName::LeftWrist,
        KeypointName::RightWrist,
        KeypointName::LeftHip,
        KeypointName::RightHip,
        KeypointName::LeftKnee,
        KeypointName::RightKnee,
        KeypointName::LeftAnkle,
        KeypointName::RightAnkle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            KeypointName::Nose => "nose",
            KeypointName::Mouth => "mouth",
            KeypointName::Neck => "neck",
            KeypointName::Waist => "waist",
            KeypointName::LeftShoulder => "left_shoulder",
            KeypointName::RightShoulder => "right_shoulder",
            KeypointName::LeftElbow => "left_elbow",
            KeypointName::RightElbow => "right_elbow",
            KeypointName::LeftWrist => "left_wrist",
            KeypointName::RightWrist => "right_wrist",
            KeypointName::LeftHip => "left_hip",
            KeypointName::RightHip => "right_hip",
            KeypointName::LeftKnee => "left_knee",
            KeypointName::RightKnee => "right_knee",
            KeypointName::LeftAnkle => "left_ankle",
            KeypointName::RightAnkle => "right_ankle",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Given,
    Derived,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Keypoint {
    pub position: Point2,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct KeypointSet {
    pub image_size: (u32, u32),
    pub points: BTreeMap<KeypointName, Keypoint>,
}

/// On-disk form: `{"image_size":[w,h], "keypoints":{"nose":[x,y], ...}}`.
#[derive(Deserialize, Serialize)]
struct KeypointDoc {
    image_size: [u32; 2],
    keypoints: BTreeMap<String, [f64; 2]>,
}

impl KeypointSet {
    pub fn new(image_size: (u32, u32)) -> Self {
        Self {
            image_size,
            points: BTreeMap::new(),
        }
    }

    /// Builder-style insert of a given (detected) point.
    pub fn with(mut self, name: KeypointName, x: f64, y: f64) -> Self {
        self.insert(name, Point2::new(x, y));
        self
    }

    pub fn insert(&mut self, name: KeypointName, position: Point2) {
        self.points.insert(
            name,
            Keypoint {
                position,
                provenance: Provenance::Given,
            },
        );
    }

    pub fn get(&self, name: KeypointName) -> Option<Point2> {
        self.points.get(&name).map(|k| k.position)
    }

    pub fn require(&self, name: KeypointName) -> Result<Point2, RigError> {
        self.get(name)
            .ok_or(RigError::MissingKeypoint(name.as_str()))
    }

    pub fn provenance(&self, name: KeypointName) -> Option<Provenance> {
        self.points.get(&name).map(|k| k.provenance)
    }

    /// Parse the JSON keypoint document. Unknown keypoint names are ignored.
    pub fn from_json(text: &str) -> Result<Self, RigError> {
        let doc: KeypointDoc =
            serde_json::from_str(text).map_err(|e| RigError::Parse(e.to_string()))?;
        let mut set = KeypointSet::new((doc.image_size[0], doc.image_size[1]));
        for (key, [x, y]) in doc.keypoints {
            match KeypointName::parse(&key) {
                Some(name) => set.insert(name, Point2::new(x, y)),
                None => log::debug!("ignoring unknown keypoint `{key}`"),
            }
        }
        Ok(set)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, RigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| RigError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let doc = KeypointDoc {
            image_size: [self.image_size.0, self.image_size.1],
            keypoints: self
                .points
                .iter()
                .map(|(k, v)| (k.as_str().to_string(), [v.position.x, v.position.y]))
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("keypoint document serializes")
    }

    /// Every point lies within `[0, w] × [0, h]`.
    pub fn validate_bounds(&self) -> Result<(), RigError> {
        let (w, h) = self.image_size;
        for (name, kp) in &self.points {
            let p = kp.position;
            let ok = p.x.is_finite()
                && p.y.is_finite()
                && (0.0..=f64::from(w)).contains(&p.x)
                && (0.0..=f64::from(h)).contains(&p.y);
            if !ok {
                return Err(RigError::OutOfBounds {
                    name: name.as_str(),
                    x: p.x,
                    y: p.y,
                    width: w,
                    height: h,
                });
            }
        }
        Ok(())
    }

    /// Uniformly scale every point and the image size.
    pub fn scaled(&self, factor: f64) -> KeypointSet {
        let size = (
            (f64::from(self.image_size.0) * factor).ceil() as u32,
            (f64::from(self.image_size.1) * factor).ceil() as u32,
        );
        KeypointSet {
            image_size: size,
            points: self
                .points
                .iter()
                .map(|(k, v)| {
                    (
                        *k,
                        Keypoint {
                            position: v.position * factor,
                            provenance: v.provenance,
                        },
                    )
                })
                .collect(),
        }
    }
}

/// Fill in the points a COCO-style detector does not report: the neck is
/// the shoulder midpoint, the waist the hip midpoint, and the mouth sits 60%
/// of the way from the nose to the neck. Points already present are kept.
pub fn derive_keypoints(raw: &KeypointSet) -> Result<KeypointSet, RigError> {
    use KeypointName::*;
    let ls = raw.require(LeftShoulder)?;
    let rs = raw.require(RightShoulder)?;
    let lh = raw.require(LeftHip)?;
    let rh = raw.require(RightHip)?;

    let mut out = raw.clone();
    let derive = |name: KeypointName, p: Point2, out: &mut KeypointSet| {
        out.points.entry(name).or_insert(Keypoint {
            position: p,
            provenance: Provenance::Derived,
        });
    };
    derive(Neck, ls.midpoint(rs), &mut out);
    derive(Waist, lh.midpoint(rh), &mut out);
    if let (Some(nose), None) = (out.get(Nose), out.get(Mouth)) {
        let neck = out.get(Neck).expect("neck derived above");
        derive(Mouth, nose + (neck - nose) * 0.6, &mut out);
    }
    out.validate_bounds()?;
    Ok(out)
}
