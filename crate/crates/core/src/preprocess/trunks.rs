use serde::{Deserialize, Serialize};

use super::{BackgroundRemoval, PreprocessError};
use crate::geometry::Point2;
use crate::raster::RasterImage;
use crate::rig::{self, BoneName, KeypointName, KeypointSet, RigScaling};

/// Box widths per body part, in pixels, plus the shared end extension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrunkConfig {
    pub torso_width: f64,
    pub head_width: f64,
    pub arm_width: f64,
    pub leg_width: f64,
    pub extension: f64,
    /// Head box length as a multiple of the neck-to-mouth distance.
    pub head_box_multiplier: f64,
}

impl Default for TrunkConfig {
    fn default() -> Self {
        Self {
            torso_width: 40.0,
            head_width: 36.0,
            arm_width: 18.0,
            leg_width: 22.0,
            extension: 4.0,
            head_box_multiplier: 4.0,
        }
    }
}

impl TrunkConfig {
    pub fn validate(&self) -> Result<(), PreprocessError> {
        let widths = [
            self.torso_width,
            self.head_width,
            self.arm_width,
            self.leg_width,
        ];
        if widths.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(PreprocessError::InvalidConfig(
                "trunk widths must be positive".into(),
            ));
        }
        if !(self.extension.is_finite() && self.extension >= 0.0) {
            return Err(PreprocessError::InvalidConfig(
                "trunk extension must be non-negative".into(),
            ));
        }
        if !(self.head_box_multiplier.is_finite() && self.head_box_multiplier > 0.0) {
            return Err(PreprocessError::InvalidConfig(
                "head_box_multiplier must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn width_for(&self, bone: BoneName) -> f64 {
        use BoneName::*;
        match bone {
            Waist | Belly | Chest => self.torso_width,
            Neck | Head => self.head_width,
            LeftShoulder | LeftUpperArm | LeftForearm | RightShoulder | RightUpperArm
            | RightForearm => self.arm_width,
            LeftHip | LeftThigh | LeftCalf | RightHip | RightThigh | RightCalf => self.leg_width,
        }
    }
}

/// Rectangle of width `w` centred on a segment and extended past its end.
///
/// Corners are `[start + h·n, start − h·n, end' + h·n, end' − h·n]` where
/// `h = w/2`, `n` is the segment direction rotated +90° and `end'` is the
/// end point pushed `e` further along the segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrunkBox {
    pub corners: [Point2; 4],
    pub source_bone: Option<BoneName>,
}

impl TrunkBox {
    /// Corners in cyclic order.
    pub fn polygon(&self) -> [Point2; 4] {
        let c = self.corners;
        [c[0], c[2], c[3], c[1]]
    }

    fn frame(&self) -> (Point2, Point2, Point2, f64, f64) {
        let c = self.corners;
        let origin = c[0].midpoint(c[1]);
        let far = c[2].midpoint(c[3]);
        let len = origin.distance(far);
        let half = c[0].distance(c[1]) / 2.0;
        let d = if len > 0.0 {
            (far - origin) * (1.0 / len)
        } else {
            (c[0] - c[1]).rotated(-std::f64::consts::FRAC_PI_2) * (1.0 / (2.0 * half))
        };
        let n = Point2::new(-d.y, d.x);
        (origin, d, n, len, half)
    }

    pub fn contains(&self, p: Point2) -> bool {
        const EPS: f64 = 1e-9;
        let (origin, d, n, len, half) = self.frame();
        let v = p - origin;
        let along = v.dot(d);
        let across = v.dot(n);
        along >= -EPS && along <= len + EPS && across.abs() <= half + EPS
    }

    /// The box intersected with `[0, width] × [0, height]`, as a polygon.
    pub fn clipped_polygon(&self, width: u32, height: u32) -> Vec<Point2> {
        let (w, h) = (f64::from(width), f64::from(height));
        let mut poly: Vec<Point2> = self.polygon().to_vec();
        // Each edge keeps points where `inside` holds.
        type Signed = fn(Point2, f64) -> f64;
        let edges: [(Signed, f64); 4] = [
            (|p, _| p.x, 0.0),
            (|p, lim| lim - p.x, w),
            (|p, _| p.y, 0.0),
            (|p, lim| lim - p.y, h),
        ];
        for (dist, lim) in edges {
            if poly.is_empty() {
                break;
            }
            let mut out = Vec::with_capacity(poly.len() + 2);
            for i in 0..poly.len() {
                let cur = poly[i];
                let prev = poly[(i + poly.len() - 1) % poly.len()];
                let (dc, dp) = (dist(cur, lim), dist(prev, lim));
                if dc >= 0.0 {
                    if dp < 0.0 {
                        out.push(prev.lerp(cur, dp / (dp - dc)));
                    }
                    out.push(cur);
                } else if dp >= 0.0 {
                    out.push(prev.lerp(cur, dp / (dp - dc)));
                }
            }
            poly = out;
        }
        poly
    }
}

pub fn trunk_box(
    start: Point2,
    end: Point2,
    width: f64,
    extension: f64,
) -> Result<TrunkBox, PreprocessError> {
    let len = start.distance(end);
    if len == 0.0 || !len.is_finite() {
        return Err(PreprocessError::ZeroLengthSegment);
    }
    let d = (end - start) * (1.0 / len);
    let n = Point2::new(-d.y, d.x);
    let h = width / 2.0;
    let far = end + d * extension;
    Ok(TrunkBox {
        corners: [start + n * h, start - n * h, far + n * h, far - n * h],
        source_bone: None,
    })
}

/// One box per bone segment, plus one generous head box that starts at the
/// neck and runs `head_box_multiplier` neck-to-mouth distances toward the
/// mouth. The neck and head bones themselves get no separate box.
pub fn trunk_boxes(kp: &KeypointSet, cfg: &TrunkConfig) -> Result<Vec<TrunkBox>, PreprocessError> {
    cfg.validate()?;
    let kp = rig::derive_keypoints(kp).map_err(|e| PreprocessError::Keypoints(e.to_string()))?;
    let segments = rig::image_segments(&kp, &RigScaling::default())
        .map_err(|e| PreprocessError::Keypoints(e.to_string()))?;
    let mut boxes = Vec::with_capacity(16);
    for (bone, start, end) in segments {
        if matches!(bone, BoneName::Neck | BoneName::Head) {
            continue;
        }
        match trunk_box(start, end, cfg.width_for(bone), cfg.extension) {
            Ok(mut b) => {
                b.source_bone = Some(bone);
                boxes.push(b);
            }
            Err(_) => log::warn!("skipping trunk box for zero-length bone `{bone}`"),
        }
    }
    let neck = kp
        .require(KeypointName::Neck)
        .map_err(|e| PreprocessError::Keypoints(e.to_string()))?;
    let mouth = kp
        .require(KeypointName::Mouth)
        .map_err(|e| PreprocessError::Keypoints(e.to_string()))?;
    let reach = neck + (mouth - neck) * cfg.head_box_multiplier;
    match trunk_box(neck, reach, cfg.head_width, cfg.extension) {
        Ok(mut b) => {
            b.source_bone = Some(BoneName::Head);
            boxes.push(b);
        }
        Err(_) => log::warn!("skipping head box: neck and mouth coincide"),
    }
    Ok(boxes)
}

/// Keep only the pixels inside at least one trunk box. A pixel `(x, y)` is
/// tested at the point `(x, y)`, the same frame the keypoints use.
pub fn remove_background_trunks(
    img: &RasterImage,
    kp: &KeypointSet,
    cfg: &TrunkConfig,
) -> Result<BackgroundRemoval, PreprocessError> {
    let boxes = trunk_boxes(kp, cfg)?;
    let (w, h) = (img.width(), img.height());
    let mut keep = vec![false; img.len()];
    for b in &boxes {
        let poly = b.clipped_polygon(w, h);
        if poly.is_empty() {
            continue;
        }
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for p in &poly {
            x0 = x0.min(p.x);
            y0 = y0.min(p.y);
            x1 = x1.max(p.x);
            y1 = y1.max(p.y);
        }
        let xs = (x0.floor().max(0.0) as u32)..=(x1.ceil().min(f64::from(w) - 1.0).max(0.0) as u32);
        let ys = (y0.floor().max(0.0) as u32)..=(y1.ceil().min(f64::from(h) - 1.0).max(0.0) as u32);
        for y in ys {
            for x in xs.clone() {
                if b.contains(Point2::new(f64::from(x), f64::from(y))) {
                    keep[img.index(x, y)] = true;
                }
            }
        }
    }
    let mut out = img.clone();
    for (p, k) in out.pixels_mut().iter_mut().zip(&keep) {
        if !k {
            p[3] = 0;
        }
    }
    if boxes.is_empty() {
        return Ok(BackgroundRemoval::warn(out, "no trunk boxes could be built"));
    }
    Ok(BackgroundRemoval::applied(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Point2, b: Point2, tol: f64) -> bool {
        a.distance(b) <= tol
    }

    fn same_corners(a: &[Point2; 4], b: &[Point2], tol: f64) -> bool {
        b.iter().all(|q| a.iter().any(|p| close(*p, *q, tol)))
    }

    #[test]
    fn vertical_bone() {
        let b = trunk_box(Point2::new(0.0, 0.0), Point2::new(0.0, 10.0), 4.0, 2.0).unwrap();
        let want = [(-2.0, 0.0), (2.0, 0.0), (-2.0, 12.0), (2.0, 12.0)].map(|(x, y)| Point2::new(x, y));
        assert!(same_corners(&b.corners, &want, 1e-9), "{:?}", b.corners);
    }

    #[test]
    fn horizontal_bone() {
        let b = trunk_box(Point2::new(0.0, 0.0), Point2::new(10.0, 0.0), 2.0, 0.0).unwrap();
        let want = [(0.0, -1.0), (0.0, 1.0), (10.0, -1.0), (10.0, 1.0)].map(|(x, y)| Point2::new(x, y));
        assert!(same_corners(&b.corners, &want, 1e-9));
    }

    #[test]
    fn zero_width_collapses_to_endpoints() {
        let (s, e) = (Point2::new(1.0, 2.0), Point2::new(4.0, 6.0));
        let b = trunk_box(s, e, 0.0, 0.0).unwrap();
        assert_eq!(b.corners[0], s);
        assert_eq!(b.corners[1], s);
        assert!(close(b.corners[2], e, 1e-12) && close(b.corners[3], e, 1e-12));
    }

    #[test]
    fn zero_length_segment() {
        let p = Point2::new(3.0, 3.0);
        assert_eq!(trunk_box(p, p, 4.0, 1.0), Err(PreprocessError::ZeroLengthSegment));
    }

    #[test]
    fn opposite_sides_are_equal() {
        let b = trunk_box(Point2::new(3.0, 1.0), Point2::new(-5.0, 8.0), 6.0, 3.0).unwrap();
        let [a, bb, c, d] = b.polygon();
        assert!((a.distance(bb) - c.distance(d)).abs() < 1e-9);
        assert!((bb.distance(c) - d.distance(a)).abs() < 1e-9);
    }

    #[test]
    fn clipping_stays_in_image() {
        let b = trunk_box(Point2::new(-5.0, 5.0), Point2::new(30.0, 5.0), 20.0, 0.0).unwrap();
        let poly = b.clipped_polygon(20, 10);
        assert!(!poly.is_empty());
        for p in poly {
            assert!((0.0..=20.0).contains(&p.x) && (0.0..=10.0).contains(&p.y));
        }
        let far = trunk_box(Point2::new(100.0, 100.0), Point2::new(110.0, 100.0), 2.0, 0.0).unwrap();
        assert!(far.clipped_polygon(20, 10).is_empty());
    }

    #[test]
    fn contains_respects_extension() {
        let b = trunk_box(Point2::new(0.0, 0.0), Point2::new(0.0, 10.0), 4.0, 2.0).unwrap();
        assert!(b.contains(Point2::new(0.0, 11.9)));
        assert!(b.contains(Point2::new(2.0, 0.0)));
        assert!(!b.contains(Point2::new(0.0, 12.1)));
        assert!(!b.contains(Point2::new(0.0, -0.1)));
        assert!(!b.contains(Point2::new(2.1, 5.0)));
    }

    proptest! {
        #[test]
        fn translation_invariant(
            sx in -50.0f64..50.0, sy in -50.0f64..50.0,
            ex in -50.0f64..50.0, ey in -50.0f64..50.0,
            tx in -100.0f64..100.0, ty in -100.0f64..100.0,
            w in 0.5f64..20.0, e in 0.0f64..10.0,
        ) {
            let (s, en) = (Point2::new(sx, sy), Point2::new(ex, ey));
            prop_assume!(s.distance(en) > 1e-3);
            let t = Point2::new(tx, ty);
            let a = trunk_box(s, en, w, e).unwrap();
            let b = trunk_box(s + t, en + t, w, e).unwrap();
            for i in 0..4 {
                prop_assert!(close(a.corners[i] + t, b.corners[i], 1e-9));
            }
        }

        #[test]
        fn rotation_equivariant(
            sx in -50.0f64..50.0, sy in -50.0f64..50.0,
            ex in -50.0f64..50.0, ey in -50.0f64..50.0,
            theta in -7.0f64..7.0, w in 0.5f64..20.0, e in 0.0f64..10.0,
        ) {
            let (s, en) = (Point2::new(sx, sy), Point2::new(ex, ey));
            prop_assume!(s.distance(en) > 1e-3);
            let a = trunk_box(s, en, w, e).unwrap();
            let b = trunk_box(s.rotated(theta), en.rotated(theta), w, e).unwrap();
            for i in 0..4 {
                prop_assert!(close(a.corners[i].rotated(theta), b.corners[i], 1e-6));
            }
        }
    }
}
