use std::path::Path;

use super::{AnimError, AnimationDoc, SCHEMA_VERSION};

/// Pretty JSON with a trailing newline. Field order is fixed by the type
/// definitions and floats use shortest round-trip formatting, so equal
/// documents render to identical bytes.
pub fn render_neutral(doc: &AnimationDoc) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("animation document serializes");
    s.push('\n');
    s
}

pub fn export_neutral(doc: &AnimationDoc, path: impl AsRef<Path>) -> Result<(), AnimError> {
    let path = path.as_ref();
    std::fs::write(path, render_neutral(doc)).map_err(|e| AnimError::Write {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn import_neutral(text: &str) -> Result<AnimationDoc, AnimError> {
    let doc: AnimationDoc = serde_json::from_str(text).map_err(|e| AnimError::Parse(e.to_string()))?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(AnimError::SchemaVersion(doc.schema_version));
    }
    Ok(doc)
}
