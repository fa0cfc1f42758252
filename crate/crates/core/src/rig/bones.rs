use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The 17 bones of the basic humanoid armature, in generation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoneName {
    Waist,
    Belly,
    Chest,
    Neck,
    Head,
    LeftShoulder,
    LeftUpperArm,
    LeftForearm,
    RightShoulder,
    RightUpperArm,
    RightForearm,
    LeftHip,
    LeftThigh,
    LeftCalf,
    RightHip,
    RightThigh,
    RightCalf,
}

/// The five parent-to-child chains, in generation order.
pub const CHAINS: [&[BoneName]; 5] = [
    &[
        BoneName::Waist,
        BoneName::Belly,
        BoneName::Chest,
        BoneName::Neck,
        BoneName::Head,
    ],
    &[
        BoneName::LeftShoulder,
        BoneName::LeftUpperArm,
        BoneName::LeftForearm,
    ],
    &[
        BoneName::RightShoulder,
        BoneName::RightUpperArm,
        BoneName::RightForearm,
    ],
    &[BoneName::LeftHip, BoneName::LeftThigh, BoneName::LeftCalf],
    &[BoneName::RightHip, BoneName::RightThigh, BoneName::RightCalf],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
    None,
}

impl BoneName {
    pub const ALL: [BoneName; 17] = [
        BoneName::Waist,
        BoneName::Belly,
        BoneName::Chest,
        BoneName::Neck,
        BoneName::Head,
        BoneName::LeftShoulder,
        BoneName::LeftUpperArm,
        BoneName::LeftForearm,
        BoneName::RightShoulder,
        BoneName::RightUpperArm,
        BoneName::RightForearm,
        BoneName::LeftHip,
        BoneName::LeftThigh,
        BoneName::LeftCalf,
        BoneName::RightHip,
        BoneName::RightThigh,
        BoneName::RightCalf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoneName::Waist => "waist",
            BoneName::Belly => "belly",
            BoneName::Chest => "chest",
            BoneName::Neck => "neck",
            BoneName::Head => "head",
            BoneName::LeftShoulder => "left_shoulder",
            BoneName::LeftUpperArm => "left_upper_arm",
            BoneName::LeftForearm => "left_forearm",
            BoneName::RightShoulder => "right_shoulder",
            BoneName::RightUpperArm => "right_upper_arm",
            BoneName::RightForearm => "right_forearm",
            BoneName::LeftHip => "left_hip",
            BoneName::LeftThigh => "left_thigh",
            BoneName::LeftCalf => "left_calf",
            BoneName::RightHip => "right_hip",
            BoneName::RightThigh => "right_thigh",
            BoneName::RightCalf => "right_calf",
        }
    }

    pub fn side(self) -> Side {
        let name = self.as_str();
        if name.starts_with("left_") {
            Side::Left
        } else if name.starts_with("right_") {
            Side::Right
        } else {
            Side::None
        }
    }

    /// Parent bone in the hierarchy. Chain roots other than the waist hang
    /// off the torso: shoulders from the chest, hips from the waist.
    pub fn parent(self) -> Option<BoneName> {
        use BoneName::*;
        match self {
            Waist => None,
            Belly => Some(Waist),
            Chest => Some(Belly),
            Neck => Some(Chest),
            Head => Some(Neck),
            LeftShoulder | RightShoulder => Some(Chest),
            LeftUpperArm => Some(LeftShoulder),
            LeftForearm => Some(LeftUpperArm),
            RightUpperArm => Some(RightShoulder),
            RightForearm => Some(RightUpperArm),
            LeftHip | RightHip => Some(Waist),
            LeftThigh => Some(LeftHip),
            LeftCalf => Some(LeftThigh),
            RightThigh => Some(RightHip),
            RightCalf => Some(RightThigh),
        }
    }

    /// Whether the bone's head sits on its parent's tail. The hips start at
    /// the waist joint, i.e. at the waist bone's head.
    pub fn connected(self) -> bool {
        !matches!(
            self,
            BoneName::Waist | BoneName::LeftHip | BoneName::RightHip
        )
    }

    pub fn children(self) -> impl Iterator<Item = BoneName> {
        BoneName::ALL
            .into_iter()
            .filter(move |b| b.parent() == Some(self))
    }

    /// The same bone on the other side of the body.
    pub fn mirrored(self) -> BoneName {
        use BoneName::*;
        match self {
            LeftShoulder => RightShoulder,
            LeftUpperArm => RightUpperArm,
            LeftForearm => RightForearm,
            RightShoulder => LeftShoulder,
            RightUpperArm => LeftUpperArm,
            RightForearm => LeftForearm,
            LeftHip => RightHip,
            LeftThigh => RightThigh,
            LeftCalf => RightCalf,
            RightHip => LeftHip,
            RightThigh => LeftThigh,
            RightCalf => LeftCalf,
            other => other,
        }
    }
}

impl fmt::Display for BoneName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoneName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BoneName::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| format!("unknown bone `{s}`"))
    }
}
