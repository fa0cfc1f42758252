use serde::{Deserialize, Serialize};

use super::RigError;
use crate::geometry::Vec3;

/// Axis-aligned model bounding box in local coordinates plus object scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelBounds3D {
    pub min: Vec3,
    pub max: Vec3,
    #[serde(default = "unit_scale")]
    pub scale: Vec3,
}

fn unit_scale() -> Vec3 {
    Vec3::new(1.0, 1.0, 1.0)
}

impl ModelBounds3D {
    pub fn new(min: Vec3, max: Vec3, scale: Vec3) -> Self {
        Self { min, max, scale }
    }

    /// Build from the host application's eight-corner bound box, using the
    /// first and seventh corners. The host stores corner components as
    /// (x, z, y) relative to this model's axes: index 1 holds the vertical
    /// extent and index 2 the depth.
    pub fn from_bound_box_corners(b0: [f64; 3], b6: [f64; 3], scale: [f64; 3]) -> Self {
        let lo = Vec3::new(b0[0].min(b6[0]), b0[2].min(b6[2]), b0[1].min(b6[1]));
        let hi = Vec3::new(b0[0].max(b6[0]), b0[2].max(b6[2]), b0[1].max(b6[1]));
        Self {
            min: lo,
            max: hi,
            scale: Vec3::new(scale[0], scale[2], scale[1]),
        }
    }

    pub fn validate(&self) -> Result<(), RigError> {
        for axis in 0..3 {
            let (lo, hi, s) = (
                self.min.component(axis),
                self.max.component(axis),
                self.scale.component(axis),
            );
            if !(lo.is_finite() && hi.is_finite() && s.is_finite()) {
                return Err(RigError::DegenerateBounds("non-finite component".into()));
            }
            if hi <= lo {
                return Err(RigError::DegenerateBounds(format!(
                    "axis {axis} has extent {}",
                    hi - lo
                )));
            }
            if s <= 0.0 {
                return Err(RigError::DegenerateBounds(format!("axis {axis} scale {s}")));
            }
        }
        Ok(())
    }

    /// Scaled extents (X, Y, Z).
    pub fn extents(&self) -> Vec3 {
        let d = self.max - self.min;
        Vec3::new(d.x * self.scale.x, d.y * self.scale.y, d.z * self.scale.z)
    }

    /// Scaled box centre.
    pub fn center(&self) -> Vec3 {
        let c = (self.max + self.min) * 0.5;
        Vec3::new(c.x * self.scale.x, c.y * self.scale.y, c.z * self.scale.z)
    }
}

/// Where the model object is put in the world, and the fine-tuning offset
/// that was folded into that location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub location: Vec3,
    #[serde(default)]
    pub tau: Vec3,
    /// Scaled model extents; the world box is centred on `location`.
    #[serde(default)]
    pub extents: Vec3,
}

impl Default for Placement {
    fn default() -> Self {
        Self {
            location: Vec3::ZERO,
            tau: Vec3::ZERO,
            extents: Vec3::ZERO,
        }
    }
}

impl Placement {
    /// Location before the fine-tuning offset; the armature root sits here.
    pub fn anchor(&self) -> Vec3 {
        self.location - self.tau
    }

    /// World-space box occupied by the model: (min, max).
    pub fn world_box(&self) -> (Vec3, Vec3) {
        let half = self.extents * 0.5;
        (self.location - half, self.location + half)
    }

    pub fn contains(&self, p: Vec3) -> bool {
        let (lo, hi) = self.world_box();
        (0..3).all(|a| {
            let v = p.component(a);
            v >= lo.component(a) - 1e-12 && v <= hi.component(a) + 1e-12
        })
    }
}

/// Place the model so it stands on the ground plane, centred in x and y,
/// then shift it by `tau`.
pub fn model_placement(bounds: &ModelBounds3D, tau: Vec3) -> Result<Placement, RigError> {
    bounds.validate()?;
    if !tau.is_finite() {
        return Err(RigError::DegenerateBounds("non-finite tau".into()));
    }
    let ext = bounds.extents();
    let c = bounds.center();
    Ok(Placement {
        location: Vec3::new(c.x + tau.x, c.y + tau.y, ext.z / 2.0 + tau.z),
        tau,
        extents: ext,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box() -> ModelBounds3D {
        ModelBounds3D::new(
            Vec3::new(-1.0, -1.0, 0.0),
            Vec3::new(1.0, 1.0, 2.0),
            Vec3::new(1.0, 1.0, 1.0),
        )
    }

    #[test]
    fn symmetric_box_stands_on_ground() {
        let p = model_placement(&unit_box(), Vec3::ZERO).unwrap();
        assert_eq!(p.location, Vec3::new(0.0, 0.0, 1.0));
        let p = model_placement(&unit_box(), Vec3::new(0.0, 0.0, 0.05)).unwrap();
        assert_eq!(p.location, Vec3::new(0.0, 0.0, 1.05));
        assert_eq!(p.anchor(), Vec3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn x_scale_doubles_extent_and_center() {
        let b = ModelBounds3D::new(
            Vec3::new(1.0, -1.0, 0.0),
            Vec3::new(3.0, 1.0, 2.0),
            Vec3::new(2.0, 1.0, 1.0),
        );
        assert_eq!(b.extents().x, 4.0);
        assert_eq!(b.center().x, 4.0);
        assert_eq!(model_placement(&b, Vec3::ZERO).unwrap().location.x, 4.0);
    }

    #[test]
    fn degenerate_box_is_rejected() {
        let mut b = unit_box();
        b.max.y = -1.0;
        assert!(matches!(
            model_placement(&b, Vec3::ZERO),
            Err(RigError::DegenerateBounds(_))
        ));
        let mut b = unit_box();
        b.scale.z = 0.0;
        assert!(model_placement(&b, Vec3::ZERO).is_err());
    }

    #[test]
    fn host_corner_pairing_swaps_vertical_and_depth() {
        let b = ModelBounds3D::from_bound_box_corners([-1.0, 0.0, -0.5], [1.0, 2.0, 0.5], [1.0, 3.0, 2.0]);
        assert_eq!(b.min, Vec3::new(-1.0, -0.5, 0.0));
        assert_eq!(b.max, Vec3::new(1.0, 0.5, 2.0));
        assert_eq!(b.scale, Vec3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn world_box_contains_its_corners() {
        let p = model_placement(&unit_box(), Vec3::new(0.0, 0.0, 0.1)).unwrap();
        let (lo, hi) = p.world_box();
        assert!(lo.distance(Vec3::new(-1.0, -1.0, 0.1)) < 1e-12);
        assert!(hi.distance(Vec3::new(1.0, 1.0, 2.1)) < 1e-12);
        assert!(p.contains(lo) && p.contains(hi));
        assert!(!p.contains(Vec3::new(0.0, 0.0, 0.05)));
    }
}
