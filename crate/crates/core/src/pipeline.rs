//! End-to-end orchestration: configuration, the staged run, the artifact
//! manifest and the tau sweep.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::anim::{self, AnimationDoc};
use crate::cmdlang::{self, ActionSpec, CommandItem};
use crate::contour::{self, BoundsReport, ContourConfig};
use crate::geometry::Vec3;
use crate::preprocess::{
    self, ColorGroupConfig, EdgeConfig, RemovalStatus, TrunkConfig,
};
use crate::raster::RasterImage;
use crate::rig::{self, Armature, KeypointName, KeypointSet, ModelBounds3D, RigScaling};

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("{stage} stage failed: {message}")]
    Stage { stage: &'static str, message: String },
}

impl PipelineError {
    /// 1 for validation problems, 2 for a failing stage.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Validation(_) => 1,
            PipelineError::Stage { .. } => 2,
        }
    }

    fn stage(stage: &'static str, e: impl std::fmt::Display) -> Self {
        PipelineError::Stage {
            stage,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackgroundMethod {
    Color,
    Edge,
    Trunk,
    #[default]
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExportToggles {
    pub neutral: bool,
    pub bvh: bool,
    pub command_txt: bool,
    pub processed_png: bool,
}

impl Default for ExportToggles {
    fn default() -> Self {
        Self {
            neutral: true,
            bvh: true,
            command_txt: true,
            processed_png: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub image: PathBuf,
    pub keypoints: PathBuf,
    /// Inline command text; exclusive with `command_file`.
    pub command: Option<String>,
    pub command_file: Option<PathBuf>,
    pub background: BackgroundMethod,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub fps: u32,
    pub frames_per_key: u32,
    pub tau: Vec3,
    pub exports: ExportToggles,
    pub color_groups: ColorGroupConfig,
    pub edges: EdgeConfig,
    pub trunks: TrunkConfig,
    pub contour: ContourConfig,
    pub rig: RigScaling,
    /// Model bounding box; synthesized from the image when absent.
    pub model: Option<ModelBounds3D>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            image: PathBuf::new(),
            keypoints: PathBuf::new(),
            command: None,
            command_file: None,
            background: BackgroundMethod::None,
            output_dir: PathBuf::from("out"),
            seed: 0,
            fps: anim::DEFAULT_FPS,
            frames_per_key: anim::DEFAULT_FRAMES_PER_KEY,
            tau: Vec3::ZERO,
            exports: ExportToggles::default(),
            color_groups: ColorGroupConfig::default(),
            edges: EdgeConfig::default(),
            trunks: TrunkConfig::default(),
            contour: ContourConfig::default(),
            rig: RigScaling::default(),
            model: None,
        }
    }
}

fn resolve(base: &Path, p: &mut PathBuf) {
    if !p.as_os_str().is_empty() && p.is_relative() {
        *p = base.join(&*p);
    }
}

impl PipelineConfig {
    /// Parse TOML; relative paths are taken relative to `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self, PipelineError> {
        let mut cfg: PipelineConfig =
            toml::from_str(text).map_err(|e| PipelineError::Validation(e.to_string()))?;
        resolve(base_dir, &mut cfg.image);
        resolve(base_dir, &mut cfg.keypoints);
        resolve(base_dir, &mut cfg.output_dir);
        if let Some(p) = cfg.command_file.as_mut() {
            resolve(base_dir, p);
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Validation(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_toml_str(&text, base)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let v = |m: String| Err(PipelineError::Validation(m));
        for (what, p) in [("image", &self.image), ("keypoints", &self.keypoints)] {
            if p.as_os_str().is_empty() {
                return v(format!("`{what}` is required"));
            }
            if !p.is_file() {
                return v(format!("{what} file {} does not exist", p.display()));
            }
        }
        match (&self.command, &self.command_file) {
            (Some(_), Some(_)) => return v("set only one of `command` and `command_file`".into()),
            (None, None) => return v("one of `command` or `command_file` is required".into()),
            (None, Some(p)) if !p.is_file() => {
                return v(format!("command file {} does not exist", p.display()))
            }
            _ => {}
        }
        if self.fps == 0 || self.frames_per_key == 0 {
            return v("fps and frames_per_key must be positive".into());
        }
        if !self.tau.is_finite() {
            return v("tau must be finite".into());
        }
        self.color_groups
            .validate()
            .and(self.edges.validate())
            .and(self.trunks.validate())
            .map_err(|e| PipelineError::Validation(e.to_string()))?;
        self.contour
            .validate()
            .map_err(|e| PipelineError::Validation(e.to_string()))?;
        self.rig
            .validate()
            .map_err(|e| PipelineError::Validation(e.to_string()))?;
        if let Some(m) = &self.model {
            m.validate()
                .map_err(|e| PipelineError::Validation(e.to_string()))?;
        }
        Ok(())
    }

    pub fn command_text(&self) -> Result<String, PipelineError> {
        match (&self.command, &self.command_file) {
            (Some(t), _) => Ok(t.clone()),
            (None, Some(p)) => std::fs::read_to_string(p)
                .map(|s| s.trim_end_matches(['\r', '\n']).to_string())
                .map_err(|e| PipelineError::Validation(format!("{}: {e}", p.display()))),
            (None, None) => Err(PipelineError::Validation("no command given".into())),
        }
    }
}

/// Apply the configured background method. `None` returns the image as is.
pub fn strip_background(
    img: &RasterImage,
    kp: &KeypointSet,
    cfg: &PipelineConfig,
) -> Result<Option<preprocess::BackgroundRemoval>, PipelineError> {
    let st = |e: preprocess::PreprocessError| PipelineError::stage("preprocess", e);
    Ok(match cfg.background {
        BackgroundMethod::None => None,
        BackgroundMethod::Color => {
            Some(preprocess::remove_background_color_groups(img, &cfg.color_groups).map_err(st)?)
        }
        BackgroundMethod::Edge => {
            let edges = preprocess::detect_edges(img, &cfg.edges).map_err(st)?;
            Some(preprocess::remove_background_edges(img, &edges))
        }
        BackgroundMethod::Trunk => {
            Some(preprocess::remove_background_trunks(img, kp, &cfg.trunks).map_err(st)?)
        }
    })
}

/// A model box matching the figure: centred in x and y, standing on z = 0,
/// as tall as the image bounds and half as deep as wide.
pub fn synthesized_model(bounds: &BoundsReport, units_per_px: f64) -> ModelBounds3D {
    let w = f64::from(bounds.di_w().max(1)) * units_per_px;
    let h = f64::from(bounds.di_h().max(1)) * units_per_px;
    ModelBounds3D::new(
        Vec3::new(-w / 2.0, -w / 4.0, 0.0),
        Vec3::new(w / 2.0, w / 4.0, h),
        Vec3::new(1.0, 1.0, 1.0),
    )
}

/// Everything upstream of placement that does not depend on tau.
#[derive(Debug, Clone)]
pub struct RigInputs {
    pub keypoints: KeypointSet,
    pub processed: Option<preprocess::BackgroundRemoval>,
    pub bounds: BoundsReport,
    pub scaling: RigScaling,
    pub model: ModelBounds3D,
}

/// Load and preprocess the image, find its bounds and settle the scaling.
///
/// With an explicit model box the image-to-model ratio comes from the image
/// height and the model's vertical extent; otherwise the waist-to-neck
/// reference is used and a matching model box is synthesized.
pub fn prepare(cfg: &PipelineConfig) -> Result<RigInputs, PipelineError> {
    let img = RasterImage::load_png(&cfg.image).map_err(|e| PipelineError::stage("load", e))?;
    let raw = KeypointSet::load(&cfg.keypoints).map_err(|e| PipelineError::stage("load", e))?;
    let keypoints = rig::derive_keypoints(&raw).map_err(|e| PipelineError::stage("rig", e))?;
    if keypoints.image_size != (img.width(), img.height()) {
        log::warn!(
            "keypoint image size {:?} differs from image {}x{}",
            keypoints.image_size,
            img.width(),
            img.height()
        );
    }
    let processed = strip_background(&img, &keypoints, cfg)?;
    let working = processed.as_ref().map_or(&img, |p| &p.image);
    let bounds = contour::find_bounds(working, &cfg.contour)
        .map_err(|e| PipelineError::stage("contour", e))?;
    let mut scaling = cfg.rig.clone();
    let model = match cfg.model {
        Some(model) => {
            let ext = model.extents();
            let solution = contour::scale_from_bounds(&bounds, ext.z, ext.x)
                .map_err(|e| PipelineError::stage("contour", e))?;
            log::info!(
                "P_im = {} px/unit, aspect mismatch {}",
                solution.p_im,
                solution.aspect_mismatch
            );
            scaling.image_px_per_unit = Some(solution.p_im);
            model
        }
        None => {
            let waist = keypoints
                .require(KeypointName::Waist)
                .map_err(|e| PipelineError::stage("rig", e))?;
            let neck = keypoints
                .require(KeypointName::Neck)
                .map_err(|e| PipelineError::stage("rig", e))?;
            let di_wn = waist.distance(neck);
            if di_wn == 0.0 {
                return Err(PipelineError::stage("rig", rig::RigError::CoincidentWaistNeck));
            }
            synthesized_model(&bounds, scaling.units_per_px(di_wn))
        }
    };
    Ok(RigInputs {
        keypoints,
        processed,
        bounds,
        scaling,
        model,
    })
}

pub fn build_rig(inputs: &RigInputs, tau: Vec3) -> Result<Armature, PipelineError> {
    let placement =
        rig::model_placement(&inputs.model, tau).map_err(|e| PipelineError::stage("placement", e))?;
    rig::build_armature(&inputs.keypoints, &inputs.scaling, &placement)
        .map_err(|e| PipelineError::stage("rig", e))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub name: String,
    /// Path relative to the output directory.
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub artifacts: Vec<Artifact>,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn artifact(&self, name: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.name == name)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub manifest: Manifest,
    pub manifest_path: PathBuf,
    pub armature: Armature,
    pub items: Vec<CommandItem>,
    pub specs: Vec<ActionSpec>,
    pub doc: AnimationDoc,
    pub bounds: BoundsReport,
    pub removal_status: Option<RemovalStatus>,
}

struct Writer<'a> {
    dir: &'a Path,
    artifacts: Vec<Artifact>,
}

impl Writer<'_> {
    fn put(&mut self, name: &str, file: &str, bytes: &[u8]) -> Result<(), PipelineError> {
        std::fs::write(self.dir.join(file), bytes).map_err(|e| PipelineError::stage("export", e))?;
        self.artifacts.push(Artifact {
            name: name.to_string(),
            file: file.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }
}

/// Run every stage and write the requested artifacts plus `manifest.json`.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutcome, PipelineError> {
    cfg.validate()?;
    let text = cfg.command_text()?;
    let inputs = prepare(cfg)?;
    let armature = build_rig(&inputs, cfg.tau)?;
    let items = cmdlang::extract_commands(&text);
    let specs = cmdlang::quantize_all(&items, &text, cfg.seed);
    let doc = anim::build_animation(armature.clone(), &specs, cfg.fps, cfg.frames_per_key)
        .map_err(|e| PipelineError::stage("anim", e))?;

    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| PipelineError::stage("export", e))?;
    let mut w = Writer {
        dir: &cfg.output_dir,
        artifacts: Vec::new(),
    };
    if let (true, Some(p)) = (cfg.exports.processed_png, &inputs.processed) {
        let png = p.image.encode_png().map_err(|e| PipelineError::stage("export", e))?;
        w.put("processed_png", "processed.png", &png)?;
    }
    w.put("armature", "armature.json", (armature.to_json() + "\n").as_bytes())?;
    if cfg.exports.command_txt {
        w.put(
            "command_txt",
            "command.txt",
            cmdlang::render_command_file(&items).as_bytes(),
        )?;
    }
    if cfg.exports.neutral {
        w.put("neutral", "anim.json", anim::render_neutral(&doc).as_bytes())?;
    }
    if cfg.exports.bvh {
        w.put("bvh", "anim.bvh", anim::render_bvh(&doc).as_bytes())?;
    }
    let manifest = Manifest {
        seed: cfg.seed,
        artifacts: w.artifacts,
    };
    let manifest_path = cfg.output_dir.join("manifest.json");
    std::fs::write(&manifest_path, manifest.to_json())
        .map_err(|e| PipelineError::stage("export", e))?;
    Ok(PipelineOutcome {
        manifest,
        manifest_path,
        armature,
        items,
        specs,
        doc,
        bounds: inputs.bounds,
        removal_status: inputs.processed.map(|p| p.status),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub tau_z: f64,
    /// Fraction of armature joints inside the placed model box.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    /// One row per candidate, in grid order.
    pub rows: Vec<SweepRow>,
    pub best: f64,
}

/// Fraction of the armature's distinct joints inside the model box.
pub fn overlap_score(armature: &Armature) -> f64 {
    let joints = armature.joints();
    if joints.is_empty() {
        return 0.0;
    }
    let inside = joints
        .iter()
        .filter(|p| armature.placement.contains(**p))
        .count();
    inside as f64 / joints.len() as f64
}

/// Score every `tau_z` candidate (x and y offsets fixed). The best row has
/// the highest score; ties go to the smallest |tau_z|, then the smaller
/// value.
pub fn sweep_tau_rig(
    kp: &KeypointSet,
    scaling: &RigScaling,
    model: &ModelBounds3D,
    tau_xy: (f64, f64),
    grid: &[f64],
) -> Result<SweepReport, PipelineError> {
    if grid.is_empty() {
        return Err(PipelineError::Validation("tau grid is empty".into()));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &tz in grid {
        let placement = rig::model_placement(model, Vec3::new(tau_xy.0, tau_xy.1, tz))
            .map_err(|e| PipelineError::stage("placement", e))?;
        let arm = rig::build_armature(kp, scaling, &placement)
            .map_err(|e| PipelineError::stage("rig", e))?;
        rows.push(SweepRow {
            tau_z: tz,
            score: overlap_score(&arm),
        });
    }
    let best = rows
        .iter()
        .min_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then(a.tau_z.abs().total_cmp(&b.tau_z.abs()))
                .then(a.tau_z.total_cmp(&b.tau_z))
        })
        .expect("grid is non-empty")
        .tau_z;
    Ok(SweepReport { rows, best })
}

pub fn sweep_tau(cfg: &PipelineConfig, grid: &[f64]) -> Result<SweepReport, PipelineError> {
    if grid.is_empty() {
        return Err(PipelineError::Validation("tau grid is empty".into()));
    }
    if cfg.image.as_os_str().is_empty() || !cfg.image.is_file() {
        return Err(PipelineError::Validation("image file is required".into()));
    }
    if !cfg.keypoints.is_file() {
        return Err(PipelineError::Validation("keypoints file is required".into()));
    }
    let inputs = prepare(cfg)?;
    sweep_tau_rig(
        &inputs.keypoints,
        &inputs.scaling,
        &inputs.model,
        (cfg.tau.x, cfg.tau.y),
        grid,
    )
}
