use std::fmt::Write as _;
use std::path::Path;

use super::{AnimError, AnimationDoc, Channel, ROOT};
use crate::geometry::Vec3;
use crate::rig::BoneName;

fn num(v: f64) -> String {
    let s = format!("{v:.9}");
    if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn vec3(v: Vec3) -> String {
    format!("{} {} {}", num(v.x), num(v.y), num(v.z))
}

fn write_joint(out: &mut String, doc: &AnimationDoc, bone: BoneName, depth: usize, order: &mut Vec<BoneName>) {
    let pad = "\t".repeat(depth);
    let spec = doc.armature.bone(bone);
    order.push(bone);
    match bone.parent() {
        None => {
            let _ = writeln!(out, "{pad}ROOT {bone}");
            let _ = writeln!(out, "{pad}{{");
            let _ = writeln!(out, "{pad}\tOFFSET {}", vec3(spec.head));
            let _ = writeln!(
                out,
                "{pad}\tCHANNELS 6 Xposition Yposition Zposition Zrotation Xrotation Yrotation"
            );
        }
        Some(parent) => {
            let offset = spec.head - doc.armature.bone(parent).head;
            let _ = writeln!(out, "{pad}JOINT {bone}");
            let _ = writeln!(out, "{pad}{{");
            let _ = writeln!(out, "{pad}\tOFFSET {}", vec3(offset));
            let _ = writeln!(out, "{pad}\tCHANNELS 3 Zrotation Xrotation Yrotation");
        }
    }
    let children: Vec<BoneName> = bone.children().collect();
    if children.is_empty() {
        let _ = writeln!(out, "{pad}\tEnd Site");
        let _ = writeln!(out, "{pad}\t{{");
        let _ = writeln!(out, "{pad}\t\tOFFSET {}", vec3(spec.tail - spec.head));
        let _ = writeln!(out, "{pad}\t}}");
    }
    for child in children {
        write_joint(out, doc, child, depth + 1, order);
    }
    let _ = writeln!(out, "{pad}}}");
}

/// BVH text for the document. The hierarchy is the bone tree rooted at
/// the waist, in model axes; motion holds each key until the next one and
/// lists frames `1..=total_frames`.
pub fn render_bvh(doc: &AnimationDoc) -> String {
    let mut out = String::from("HIERARCHY\n");
    let mut order = Vec::with_capacity(17);
    write_joint(&mut out, doc, BoneName::Waist, 0, &mut order);

    let frame_time = 1.0 / f64::from(doc.fps);
    let _ = writeln!(out, "MOTION");
    let _ = writeln!(out, "Frames: {}", doc.total_frames);
    let _ = writeln!(out, "Frame Time: {}", num(frame_time));

    let root_track = doc.track(ROOT, Channel::Location);
    let rot_tracks: Vec<_> = order
        .iter()
        .map(|b| doc.track(b.as_str(), Channel::RotationEuler))
        .collect();
    let root_head = doc.armature.bone(BoneName::Waist).head;
    for frame in 1..=doc.total_frames {
        let loc = root_head + root_track.map_or(Vec3::ZERO, |t| t.value_at(frame));
        let mut fields = vec![num(loc.x), num(loc.y), num(loc.z)];
        for t in &rot_tracks {
            let r = t.map_or(Vec3::ZERO, |t| t.value_at(frame));
            for v in [r.z, r.x, r.y] {
                fields.push(num(v.to_degrees()));
            }
        }
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    out
}

pub fn export_bvh(doc: &AnimationDoc, path: impl AsRef<Path>) -> Result<(), AnimError> {
    let path = path.as_ref();
    std::fs::write(path, render_bvh(doc)).map_err(|e| AnimError::Write {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(-0.0), "0.000000000");
        assert_eq!(num(-1e-12), "0.000000000");
        assert_eq!(num(1.5), "1.500000000");
        assert_eq!(num(-2.25), "-2.250000000");
        assert_eq!(num(1.0 / 24.0), "0.041666667");
    }
}
