//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines always reach the console.

mod common;

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::*;
use rigmotion::anim;
use rigmotion::cmdlang::{self, Action, Part};
use rigmotion::pipeline;
use rigmotion::preprocess::{self, ColorGroupConfig, EdgeConfig, RemovalStatus};
use rigmotion::rig::{self, BoneName, ExtrudeDirection, Placement, RigScaling};
use rigmotion::{Point2, Vec3};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn interpreter_golden() -> Outcome {
    let t0 = Instant::now();
    let unsorted = cmdlang::extract_commands_unsorted(GOLDEN_TEXT);
    let sorted = cmdlang::extract_commands(GOLDEN_TEXT);
    let elapsed = t0.elapsed();
    let first = unsorted.first().ok_or("no commands extracted")?;
    ensure(
        (first.action, first.part, first.start_idx, first.end_idx) == (Action::Raise, Part::Hand, 10, 31),
        format!("first unsorted item is {first:?}"),
    )?;
    ensure(
        first.span_text(GOLDEN_TEXT) == " raises his left hand",
        format!("first span reads {:?}", first.span_text(GOLDEN_TEXT)),
    )?;
    ensure(sorted.len() == 8, format!("{} sorted items", sorted.len()))?;
    let spans: Vec<(usize, usize)> = sorted.iter().map(|i| (i.start_idx, i.end_idx)).collect();
    ensure(spans == GOLDEN_SPANS, format!("spans {spans:?}"))?;
    ensure(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("8 items, first (raise, hand, 10, 31), {elapsed:?}"))
}

fn golden_armature() -> Result<rig::Armature, String> {
    let kp = rig::derive_keypoints(&figure_keypoints()).map_err(|e| e.to_string())?;
    rig::build_armature(&kp, &RigScaling::default(), &Placement::default()).map_err(|e| e.to_string())
}

fn frame_accounting() -> Outcome {
    let t0 = Instant::now();
    let (_, specs) = cmdlang::interpret(GOLDEN_TEXT, 0);
    let doc = anim::build_animation(golden_armature()?, &specs, 24, 10).map_err(|e| e.to_string())?;
    let elapsed = t0.elapsed();
    ensure(doc.total_frames == 80, format!("total_frames = {}", doc.total_frames))?;
    ensure(doc.semantic.len() == 8, format!("{} semantic entries", doc.semantic.len()))?;
    ensure(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("80 frames, 8 keyframes, {elapsed:?}"))
}

fn throughput() -> Outcome {
    let arm = golden_armature()?;
    let mut rates = Vec::with_capacity(5);
    for _ in 0..5 {
        let t0 = Instant::now();
        let (_, specs) = cmdlang::interpret(GOLDEN_TEXT, 0);
        let doc = anim::build_animation(arm.clone(), &specs, 24, 10).map_err(|e| e.to_string())?;
        let json = anim::render_neutral(&doc);
        let bvh = anim::render_bvh(&doc);
        let secs = t0.elapsed().as_secs_f64().max(1e-9);
        ensure(!json.is_empty() && !bvh.is_empty(), "empty export")?;
        rates.push(f64::from(doc.total_frames) / secs);
    }
    rates.sort_by(f64::total_cmp);
    let median = rates[2];
    ensure(median >= 8.81, format!("median {median:.2} F/s"))?;
    Ok(format!("median {median:.0} F/s over 5 runs (threshold 8.81)"))
}

fn color_oracle() -> Outcome {
    let img = color_fixture();
    let cfg = ColorGroupConfig {
        n: 1,
        tolerance: [0, 0, 0],
    };
    let out = preprocess::remove_background_color_groups(&img, &cfg).map_err(|e| e.to_string())?;
    // brute force: the modal color, counted pixel by pixel
    let mut best = ([0u8; 3], 0usize);
    for p in img.pixels() {
        let c = [p[0], p[1], p[2]];
        let n = img.pixels().iter().filter(|q| [q[0], q[1], q[2]] == c).count();
        if n > best.1 || (n == best.1 && c < best.0) {
            best = (c, n);
        }
    }
    let mismatches = img
        .pixels()
        .iter()
        .zip(out.image.pixels())
        .filter(|(a, b)| ([a[0], a[1], a[2]] == best.0) != (b[3] == 0))
        .count();
    ensure(mismatches == 0, format!("{mismatches} mismatched pixels"))?;
    Ok(format!("{} background pixels, 0 mismatches", best.1))
}

fn edge_oracle() -> Outcome {
    let (lo, hi) = (22i64, 41i64);
    let img = square_fixture(64, lo as u32, hi as u32);
    let map = preprocess::detect_edges(&img, &EdgeConfig::default()).map_err(|e| e.to_string())?;
    ensure(!map.loops.is_empty(), "no closed loop survived filtering")?;
    let inside = |r: i64, c: i64| (lo..=hi).contains(&r) && (lo..=hi).contains(&c);
    let boundary: Vec<(i64, i64)> = (lo..=hi)
        .flat_map(|r| (lo..=hi).map(move |c| (r, c)))
        .filter(|&(r, c)| !(inside(r - 1, c) && inside(r + 1, c) && inside(r, c - 1) && inside(r, c + 1)))
        .collect();
    let edges: Vec<(i64, i64)> = map
        .edges
        .iter()
        .map(|&i| {
            let (r, c) = map.cell(i);
            let (x, y) = map.cell_center_pixel(r, c);
            (y, x)
        })
        .collect();
    let near = |a: (i64, i64), b: (i64, i64)| (a.0 - b.0).abs().max((a.1 - b.1).abs()) <= 1;
    let stray = edges.iter().filter(|e| !boundary.iter().any(|b| near(**e, *b))).count();
    let uncovered = boundary.iter().filter(|b| !edges.iter().any(|e| near(*e, **b))).count();
    ensure(stray == 0 && uncovered == 0, format!("{stray} stray, {uncovered} uncovered"))?;

    let out = preprocess::remove_background_edges(&img, &map);
    ensure(out.status == RemovalStatus::Applied, format!("{:?}", out.status))?;
    let (mut kept, mut interior, mut removed, mut exterior) = (0usize, 0usize, 0usize, 0usize);
    for y in 0..64u32 {
        for x in 0..64u32 {
            let opaque = out.image.get(x, y)[3] != 0;
            if inside(i64::from(y), i64::from(x)) {
                interior += 1;
                kept += usize::from(opaque);
            } else {
                exterior += 1;
                removed += usize::from(!opaque);
            }
        }
    }
    let keep = kept as f64 / interior as f64;
    let remove = removed as f64 / exterior as f64;
    ensure(keep >= 0.99 && remove >= 0.99, format!("kept {keep:.4}, removed {remove:.4}"))?;
    Ok(format!(
        "{} loop(s), edges within 1 cell, interior kept {:.2}%, exterior removed {:.2}%",
        map.loops.len(),
        keep * 100.0,
        remove * 100.0
    ))
}

/// Corners rebuilt from the axis intercepts of the box side lines: each
/// side line crosses the horizontal through the anchor at
/// `x ± w / (2 cos(π/2 − α))` and the vertical at `y ∓ w / (2 sin(π/2 − α))`;
/// the corner is the foot of the perpendicular from the anchor onto it.
fn intercept_corners(start: Point2, alpha: f64, len: f64, w: f64, e: f64) -> Vec<Point2> {
    let dx = w / (2.0 * (PI / 2.0 - alpha).cos());
    let dy = w / (2.0 * (PI / 2.0 - alpha).sin());
    let far = Point2::new(
        start.x + (len + e) * alpha.cos(),
        start.y + (len + e) * alpha.sin(),
    );
    let foot = |p: Point2, a: Point2, b: Point2| {
        let ab = b - a;
        a + ab * ((p - a).dot(ab) / ab.dot(ab))
    };
    let mut out = Vec::new();
    for anchor in [start, far] {
        for s in [1.0, -1.0] {
            let on_x = Point2::new(anchor.x + s * dx, anchor.y);
            let on_y = Point2::new(anchor.x, anchor.y - s * dy);
            out.push(foot(anchor, on_x, on_y));
        }
    }
    out
}

fn same_corners(a: &[Point2], b: &[Point2], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().all(|p| b.iter().any(|q| p.distance(*q) <= tol))
        && b.iter().all(|p| a.iter().any(|q| p.distance(*q) <= tol))
}

fn trunk_geometry() -> Outcome {
    let b = preprocess::trunk_box(Point2::new(0.0, 0.0), Point2::new(0.0, 10.0), 4.0, 2.0)
        .map_err(|e| e.to_string())?;
    let expected = [
        Point2::new(-2.0, 0.0),
        Point2::new(2.0, 0.0),
        Point2::new(-2.0, 12.0),
        Point2::new(2.0, 12.0),
    ];
    ensure(same_corners(&b.corners, &expected, 1e-9), format!("vertical corners {:?}", b.corners))?;
    for alpha in [PI / 6.0, PI / 4.0, PI / 3.0] {
        let start = Point2::new(3.0, -1.0);
        let len = 10.0;
        let end = Point2::new(start.x + len * alpha.cos(), start.y + len * alpha.sin());
        let got = preprocess::trunk_box(start, end, 4.0, 2.0).map_err(|e| e.to_string())?;
        let oracle = intercept_corners(start, alpha, len, 4.0, 2.0);
        ensure(
            same_corners(&got.corners, &oracle, 1e-6),
            format!("alpha {alpha}: {:?} vs {:?}", got.corners, oracle),
        )?;
    }
    Ok("vertical case exact to 1e-9; intercept construction matched at π/6, π/4, π/3".into())
}

fn rig_invariance() -> Outcome {
    let expected: BTreeSet<&str> = [
        "head", "neck", "chest", "belly", "waist", "left_shoulder", "left_forearm",
        "left_upper_arm", "left_hip", "left_thigh", "left_calf", "right_shoulder",
        "right_forearm", "right_upper_arm", "right_hip", "right_thigh", "right_calf",
    ]
    .into_iter()
    .collect();
    let arm = golden_armature()?;
    let names: BTreeSet<&str> = arm.bones.iter().map(|b| b.name.as_str()).collect();
    ensure(arm.bones.len() == 17 && names == expected, format!("bone names {names:?}"))?;

    for b in &arm.bones {
        if let (Some(parent), true) = (b.name.parent(), b.name.connected()) {
            let gap = b.head.distance(arm.bone(parent).tail);
            ensure(gap <= 1e-9, format!("{} detached by {gap}", b.name))?;
        }
    }

    let kp = figure_keypoints();
    for k in [0.5, 2.0, 3.7] {
        let scaled = rig::derive_keypoints(&kp.scaled(k)).map_err(|e| e.to_string())?;
        let other = rig::build_armature(&scaled, &RigScaling::default(), &Placement::default())
            .map_err(|e| e.to_string())?;
        for (a, b) in arm.bones.iter().zip(&other.bones) {
            let d = (a.length() - b.length()).abs();
            ensure(d <= 1e-9, format!("{} length drifts {d} at scale {k}", a.name))?;
        }
    }

    for b in &arm.bones {
        let m = arm.bone(b.name.mirrored());
        ensure(
            (b.length() - m.length()).abs() <= 1e-9,
            format!("{} vs {} lengths differ", b.name, m.name),
        )?;
    }
    for (s, e) in [((0.0, 0.0), (3.0, 4.0)), ((5.0, 1.0), (-2.0, 7.0)), ((1.0, 1.0), (1.0, 9.0))] {
        let (s, e) = (Point2::new(s.0, s.1), Point2::new(e.0, e.1));
        let l = rig::extrude_value(s, e, ExtrudeDirection::Left, 0.1).value;
        let r = rig::extrude_value(s, e, ExtrudeDirection::Right, 0.1).value;
        ensure(l.x == -r.x && l.z == r.z, format!("extrusion not mirrored: {l:?} vs {r:?}"))?;
    }
    let lefts = BoneName::ALL.iter().filter(|b| b.as_str().starts_with("left_"));
    for b in lefts {
        let l = arm.bone(*b);
        let r = arm.bone(b.mirrored());
        let (dl, dr) = (l.tail - l.head, r.tail - r.head);
        ensure(
            (dl.x + dr.x).abs() <= 1e-9 && (dl.z - dr.z).abs() <= 1e-9,
            format!("{b} is not the mirror of {}", b.mirrored()),
        )?;
    }

    let model = symmetric_box();
    let half_z = model.extents().z / 2.0;
    for t in [0.0, 0.05, 0.10, 0.27] {
        let p = rig::model_placement(&model, Vec3::new(0.0, 0.0, t)).map_err(|e| e.to_string())?;
        ensure(
            p.location == Vec3::new(0.0, 0.0, half_z + t),
            format!("tau {t}: location {:?}", p.location),
        )?;
        ensure(p.anchor() == Vec3::new(0.0, 0.0, half_z), format!("tau {t}: anchor {:?}", p.anchor()))?;
    }
    Ok("17 names, chains connected, scale/mirror invariant, placement exact for tau 0, 0.05, 0.10, 0.27".into())
}

fn determinism() -> Outcome {
    let mut manifests = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let cfg = pipeline_inputs(dir.path(), 42);
        let out = pipeline::run_pipeline(&cfg).map_err(|e| e.to_string())?;
        manifests.push(std::fs::read(&out.manifest_path).map_err(|e| e.to_string())?);
    }
    let (a, b) = (pipeline::sha256_hex(&manifests[0]), pipeline::sha256_hex(&manifests[1]));
    ensure(a == b, format!("manifest hashes {a} vs {b}"))?;
    Ok(format!("manifest sha256 {}", &a[..16]))
}

fn main() {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check); 8] = [
        ("interpreter golden text", interpreter_golden),
        ("frame accounting", frame_accounting),
        ("throughput", throughput),
        ("color-group background oracle", color_oracle),
        ("edge-loop oracle", edge_oracle),
        ("trunk-box geometry", trunk_geometry),
        ("rig invariance suite", rig_invariance),
        ("pipeline determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!(
        "NOT REPRODUCIBLE  reconstruction quality (chamfer distance, 3D IoU): needs an \
         external single-image-to-3D generator; covered by the invariance suites above"
    );
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
