use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rigmotion::anim;
use rigmotion::cmdlang;
use rigmotion::contour;
use rigmotion::pipeline::{self, BackgroundMethod, PipelineConfig, PipelineError};
use rigmotion::rig::{self, Armature, KeypointSet, ModelBounds3D, Placement};
use rigmotion::{RasterImage, Vec3};

/// Image + 2D keypoints to a self-adaptive armature and text-driven animation.
#[derive(Parser, Debug)]
#[command(name = "rigmotion", version, about)]
struct Cli {
    /// Pipeline config (TOML). Module sections also apply to single stages.
    #[arg(long, global = true, env = "RIGMOTION_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Remove the background of an image.
    StripBg(StripBgArgs),
    /// Report object bounds and, given model extents, the scaling ratio.
    Bounds(BoundsArgs),
    /// Build the armature JSON from keypoints.
    Rig(RigArgs),
    /// Extract sub-commands from text and write command.txt.
    Interpret(InterpretArgs),
    /// Build the animation from an armature and command.txt.
    Animate(AnimateArgs),
    /// Run every stage from a config file.
    Pipeline(PipelineArgs),
    /// Score tau_z candidates by armature/model overlap.
    SweepTau(SweepArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Color,
    Edge,
    Trunk,
}

#[derive(Args, Debug)]
struct StripBgArgs {
    #[arg(long)]
    image: PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    /// Required for the trunk method.
    #[arg(long)]
    keypoints: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    image: PathBuf,
    /// Model vertical extent, in model units.
    #[arg(long, requires = "model_width")]
    model_height: Option<f64>,
    /// Model horizontal extent, in model units.
    #[arg(long, requires = "model_height")]
    model_width: Option<f64>,
}

#[derive(Args, Debug)]
struct RigArgs {
    #[arg(long)]
    keypoints: PathBuf,
    /// Fine-tuning offset as x,y,z.
    #[arg(long, value_parser = parse_vec3)]
    tau: Option<Vec3>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false, id = "text_source")]
struct TextSource {
    /// Command text.
    #[arg(long)]
    text: Option<String>,
    /// File holding the command text.
    #[arg(long)]
    text_file: Option<PathBuf>,
}

impl TextSource {
    fn read(&self) -> Result<String, CliError> {
        match (&self.text, &self.text_file) {
            (Some(t), _) => Ok(t.clone()),
            (None, Some(p)) => std::fs::read_to_string(p)
                .map(|s| s.trim_end_matches(['\r', '\n']).to_string())
                .map_err(|e| CliError::Validation(format!("{}: {e}", p.display()))),
            (None, None) => Err(CliError::Validation("no command text".into())),
        }
    }
}

#[derive(Args, Debug)]
struct InterpretArgs {
    #[command(flatten)]
    source: TextSource,
    #[arg(long)]
    seed: Option<u64>,
    /// Where to write command.txt.
    #[arg(long)]
    out: PathBuf,
    /// Also write the quantized actions as JSON.
    #[arg(long)]
    specs_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnimateArgs {
    #[arg(long)]
    armature: PathBuf,
    /// command.txt from the interpret stage.
    #[arg(long)]
    commands: PathBuf,
    #[command(flatten)]
    source: TextSource,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    fps: Option<u32>,
    #[arg(long)]
    frames_per_key: Option<u32>,
    #[arg(long)]
    out_json: Option<PathBuf>,
    #[arg(long)]
    out_bvh: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PipelineArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Comma-separated tau_z candidates.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.01, 0.02, 0.03, 0.04, 0.05])]
    grid: Vec<f64>,
}

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [x, y, z] => Ok(Vec3::new(x, y, z)),
        _ => Err("expected three comma-separated numbers".into()),
    }
}

#[derive(Debug)]
enum CliError {
    Validation(String),
    Stage(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Stage(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "error: {m}"),
            CliError::Stage(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Validation(_) => CliError::Validation(e.to_string()),
            PipelineError::Stage { .. } => CliError::Stage(e.to_string()),
        }
    }
}

fn stage(name: &str) -> impl Fn(&dyn std::fmt::Display) -> CliError + '_ {
    move |e| CliError::Stage(format!("{name} stage failed: {e}"))
}

fn require_file(p: &Path, what: &str) -> Result<(), CliError> {
    if p.is_file() {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "{what} file {} does not exist",
            p.display()
        )))
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes)
        .map_err(|e| CliError::Stage(format!("cannot write {}: {e}", path.display())))
}

/// Settings from `--config` when given, defaults otherwise. Only the module
/// sections are needed, so referenced files are not checked here.
fn settings(cli: &Cli) -> Result<PipelineConfig, CliError> {
    match &cli.config {
        Some(p) => Ok(PipelineConfig::load(p)?),
        None => Ok(PipelineConfig::default()),
    }
}

fn load_keypoints(path: &Path) -> Result<KeypointSet, CliError> {
    require_file(path, "keypoints")?;
    let raw = KeypointSet::load(path).map_err(|e| CliError::Validation(e.to_string()))?;
    rig::derive_keypoints(&raw).map_err(|e| stage("rig")(&e))
}

fn load_image(path: &Path) -> Result<RasterImage, CliError> {
    require_file(path, "image")?;
    RasterImage::load_png(path).map_err(|e| stage("load")(&e))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::StripBg(a) => {
            let mut cfg = settings(cli)?;
            let img = load_image(&a.image)?;
            cfg.background = match a.method {
                Method::Color => BackgroundMethod::Color,
                Method::Edge => BackgroundMethod::Edge,
                Method::Trunk => BackgroundMethod::Trunk,
            };
            let kp = match (&a.keypoints, a.method) {
                (Some(p), _) => load_keypoints(p)?,
                (None, Method::Trunk) => {
                    return Err(CliError::Validation(
                        "--keypoints is required for the trunk method".into(),
                    ))
                }
                (None, _) => KeypointSet::default(),
            };
            let removal = pipeline::strip_background(&img, &kp, &cfg)?
                .expect("a method was selected");
            let png = removal.image.encode_png().map_err(|e| stage("export")(&e))?;
            write(&a.out, &png)?;
            println!(
                "{}",
                serde_json::json!({
                    "transparent_pixels": removal.image.transparent_count(),
                    "total_pixels": removal.image.len(),
                    "warning": match removal.status {
                        rigmotion::preprocess::RemovalStatus::Applied => None,
                        rigmotion::preprocess::RemovalStatus::Warning(m) => Some(m),
                    },
                })
            );
        }
        Command::Bounds(a) => {
            let cfg = settings(cli)?;
            let img = load_image(&a.image)?;
            let bounds = contour::find_bounds(&img, &cfg.contour).map_err(|e| stage("contour")(&e))?;
            let mut report = serde_json::json!({
                "bounds": bounds,
                "di_H": bounds.di_h(),
                "di_W": bounds.di_w(),
            });
            if let (Some(h), Some(w)) = (a.model_height, a.model_width) {
                let s = contour::scale_from_bounds(&bounds, h, w).map_err(|e| stage("contour")(&e))?;
                report["scale"] = serde_json::to_value(s).expect("scale serializes");
            }
            println!("{}", serde_json::to_string_pretty(&report).expect("json"));
        }
        Command::Rig(a) => {
            let cfg = settings(cli)?;
            let kp = load_keypoints(&a.keypoints)?;
            let tau = a.tau.unwrap_or(cfg.tau);
            let placement = match cfg.model {
                Some(m) => model_placement(&m, tau)?,
                None => Placement {
                    location: tau,
                    tau,
                    ..Placement::default()
                },
            };
            let arm = rig::build_armature(&kp, &cfg.rig, &placement).map_err(|e| stage("rig")(&e))?;
            write(&a.out, (arm.to_json() + "\n").as_bytes())?;
        }
        Command::Interpret(a) => {
            let cfg = settings(cli)?;
            let text = a.source.read()?;
            let seed = a.seed.unwrap_or(cfg.seed);
            let (items, specs) = cmdlang::interpret(&text, seed);
            cmdlang::write_command_file(&items, &a.out).map_err(|e| stage("interpret")(&e))?;
            if let Some(p) = &a.specs_out {
                let json = serde_json::to_string_pretty(&specs).expect("specs serialize") + "\n";
                write(p, json.as_bytes())?;
            }
            print!("{}", cmdlang::render_command_file(&items));
        }
        Command::Animate(a) => {
            let cfg = settings(cli)?;
            require_file(&a.armature, "armature")?;
            require_file(&a.commands, "command")?;
            let text = std::fs::read_to_string(&a.armature)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let arm = Armature::from_json(&text).map_err(|e| CliError::Validation(e.to_string()))?;
            let items = cmdlang::read_command_file(&a.commands)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let source = a.source.read()?;
            let n = source.chars().count();
            if let Some(bad) = items.iter().find(|i| i.end_idx > n) {
                return Err(CliError::Validation(format!(
                    "command span {}..{} exceeds the {n}-character text",
                    bad.start_idx, bad.end_idx
                )));
            }
            let specs = cmdlang::quantize_all(&items, &source, a.seed.unwrap_or(cfg.seed));
            let doc = anim::build_animation(
                arm,
                &specs,
                a.fps.unwrap_or(cfg.fps),
                a.frames_per_key.unwrap_or(cfg.frames_per_key),
            )
            .map_err(|e| stage("anim")(&e))?;
            if let Some(p) = &a.out_json {
                write(p, anim::render_neutral(&doc).as_bytes())?;
            }
            if let Some(p) = &a.out_bvh {
                write(p, anim::render_bvh(&doc).as_bytes())?;
            }
            println!(
                "total_frames={} keyframes={}",
                doc.total_frames,
                doc.semantic.len()
            );
        }
        Command::Pipeline(a) => {
            let mut cfg = pipeline_config(cli)?;
            if let Some(s) = a.seed {
                cfg.seed = s;
            }
            if let Some(d) = &a.output_dir {
                cfg.output_dir = d.clone();
            }
            let outcome = pipeline::run_pipeline(&cfg)?;
            print!("{}", outcome.manifest.to_json());
        }
        Command::SweepTau(a) => {
            let cfg = pipeline_config(cli)?;
            let report = pipeline::sweep_tau(&cfg, &a.grid)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("json"));
        }
    }
    Ok(())
}

fn model_placement(m: &ModelBounds3D, tau: Vec3) -> Result<Placement, CliError> {
    rig::model_placement(m, tau).map_err(|e| CliError::Validation(e.to_string()))
}

fn pipeline_config(cli: &Cli) -> Result<PipelineConfig, CliError> {
    match &cli.config {
        Some(p) => Ok(PipelineConfig::load(p)?),
        None => Err(CliError::Validation(
            "a config file is required (--config or RIGMOTION_CONFIG)".into(),
        )),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            log::debug!("exit code {}", e.code());
            ExitCode::from(e.code())
        }
    }
}
