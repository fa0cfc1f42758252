#![allow(dead_code)]

use std::path::Path;

use rigmotion::pipeline::{BackgroundMethod, PipelineConfig};
use rigmotion::rig::{KeypointName as K, KeypointSet, ModelBounds3D};
use rigmotion::{Point2, RasterImage, Vec3};

pub const GOLDEN_TEXT: &str = "The object raises his left hand 0 degrees, raises his right hand 0 degrees, raises his left hand 30 degrees, raises his right hand 30 degrees, raises lifts left leg 0 degrees, raises lifts right leg 0 degrees, raises lifts left leg 30 degrees, puts down right leg 30 degrees.";

pub const GOLDEN_SPANS: [(usize, usize); 8] = [
    (10, 31),
    (42, 64),
    (75, 96),
    (108, 130),
    (149, 164),
    (182, 198),
    (216, 231),
    (243, 263),
];

pub const BG: [u8; 4] = [210, 225, 240, 255];
pub const INK: [u8; 4] = [40, 40, 60, 255];

/// Standing figure, mirror-symmetric about x = 100.
pub fn figure_keypoints() -> KeypointSet {
    KeypointSet::new((200, 300))
        .with(K::Nose, 100.0, 40.0)
        .with(K::LeftShoulder, 125.0, 75.0)
        .with(K::RightShoulder, 75.0, 75.0)
        .with(K::LeftElbow, 140.0, 115.0)
        .with(K::RightElbow, 60.0, 115.0)
        .with(K::LeftWrist, 148.0, 150.0)
        .with(K::RightWrist, 52.0, 150.0)
        .with(K::LeftHip, 115.0, 160.0)
        .with(K::RightHip, 85.0, 160.0)
        .with(K::LeftKnee, 118.0, 215.0)
        .with(K::RightKnee, 82.0, 215.0)
        .with(K::LeftAnkle, 120.0, 270.0)
        .with(K::RightAnkle, 80.0, 270.0)
}

fn segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// The figure drawn as thick limbs and a round head on a flat background.
pub fn figure_image() -> RasterImage {
    let kp = figure_keypoints();
    let p = |n: K| kp.get(n).expect("fixture point");
    let limbs = [
        (K::LeftShoulder, K::LeftElbow),
        (K::LeftElbow, K::LeftWrist),
        (K::RightShoulder, K::RightElbow),
        (K::RightElbow, K::RightWrist),
        (K::LeftHip, K::LeftKnee),
        (K::LeftKnee, K::LeftAnkle),
        (K::RightHip, K::RightKnee),
        (K::RightKnee, K::RightAnkle),
        (K::LeftShoulder, K::RightHip),
        (K::RightShoulder, K::LeftHip),
        (K::LeftShoulder, K::LeftHip),
        (K::RightShoulder, K::RightHip),
        (K::LeftShoulder, K::RightShoulder),
        (K::LeftHip, K::RightHip),
    ];
    let segs: Vec<(Point2, Point2)> = limbs.iter().map(|&(a, b)| (p(a), p(b))).collect();
    let nose = p(K::Nose);
    RasterImage::from_fn(200, 300, |x, y| {
        let q = Point2::new(f64::from(x), f64::from(y));
        let limb = segs.iter().any(|&(a, b)| segment_distance(q, a, b) <= 6.0);
        let head = q.distance(nose) <= 17.0;
        let neck = segment_distance(q, nose, Point2::new(100.0, 75.0)) <= 6.0;
        if limb || head || neck {
            INK
        } else {
            BG
        }
    })
}

/// 64×64 flat background with three foreground shapes in distinct colors.
pub fn color_fixture() -> RasterImage {
    RasterImage::from_fn(64, 64, |x, y| {
        if (8..24).contains(&x) && (10..40).contains(&y) {
            [200, 30, 30, 255]
        } else if (x as i32 - 44).pow(2) + (y as i32 - 20).pow(2) <= 81 {
            [30, 160, 40, 255]
        } else if y >= 48 && x >= 30 && x - 30 <= y - 48 {
            [20, 20, 20, 255]
        } else if x == 63 && y == 0 {
            // one pixel one step away from the background color
            [BG[0], BG[1], BG[2] - 1, 255]
        } else {
            BG
        }
    })
}

/// Black square covering pixels `lo..=hi` on a white canvas.
pub fn square_fixture(size: u32, lo: u32, hi: u32) -> RasterImage {
    RasterImage::from_fn(size, size, |x, y| {
        if (lo..=hi).contains(&x) && (lo..=hi).contains(&y) {
            [0, 0, 0, 255]
        } else {
            [255, 255, 255, 255]
        }
    })
}

/// Symmetric box around the origin: x ±1, y ±0.5, z 0..2.
pub fn symmetric_box() -> ModelBounds3D {
    ModelBounds3D::new(
        Vec3::new(-1.0, -0.5, 0.0),
        Vec3::new(1.0, 0.5, 2.0),
        Vec3::new(1.0, 1.0, 1.0),
    )
}

/// Keypoints with waist at y = 100, neck at y = 40 and the head tip at
/// y = 15; only the ankle height varies.
pub fn sweep_keypoints(ankle_y: f64) -> KeypointSet {
    let knee_y = (100.0 + ankle_y) / 2.0;
    KeypointSet::new((200, 200))
        .with(K::Nose, 100.0, 20.0)
        .with(K::Mouth, 100.0, 30.0)
        .with(K::LeftShoulder, 115.0, 40.0)
        .with(K::RightShoulder, 85.0, 40.0)
        .with(K::LeftElbow, 120.0, 70.0)
        .with(K::RightElbow, 80.0, 70.0)
        .with(K::LeftWrist, 122.0, 95.0)
        .with(K::RightWrist, 78.0, 95.0)
        .with(K::LeftHip, 108.0, 100.0)
        .with(K::RightHip, 92.0, 100.0)
        .with(K::LeftKnee, 108.0, knee_y)
        .with(K::RightKnee, 92.0, knee_y)
        .with(K::LeftAnkle, 108.0, ankle_y)
        .with(K::RightAnkle, 92.0, ankle_y)
}

/// Model box x ±2, y ±0.5 whose half-height is `half_z`.
pub fn sweep_model(half_z: f64) -> ModelBounds3D {
    ModelBounds3D::new(
        Vec3::new(-2.0, -0.5, 0.0),
        Vec3::new(2.0, 0.5, 2.0 * half_z),
        Vec3::new(1.0, 1.0, 1.0),
    )
}

/// Height of the head tip above the waist for [`sweep_keypoints`] with
/// unit waist-to-neck length: 85 px at 60 px per unit.
pub const SWEEP_HEAD_ABOVE_WAIST: f64 = 85.0 / 60.0;

/// Write the figure, its keypoints and the command text into `dir` and
/// return a config that reads them and writes into `dir/out`.
pub fn pipeline_inputs(dir: &Path, seed: u64) -> PipelineConfig {
    figure_image().save_png(dir.join("figure.png")).unwrap();
    std::fs::write(dir.join("keypoints.json"), figure_keypoints().to_json()).unwrap();
    std::fs::write(dir.join("command.txt"), format!("{GOLDEN_TEXT}\n")).unwrap();
    PipelineConfig {
        image: dir.join("figure.png"),
        keypoints: dir.join("keypoints.json"),
        command_file: Some(dir.join("command.txt")),
        background: BackgroundMethod::Color,
        output_dir: dir.join("out"),
        seed,
        ..PipelineConfig::default()
    }
}
