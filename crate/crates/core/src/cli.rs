//! `linefollow` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 runtime
//! failure, 3 simulated episode did not complete.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::colortrack::{
    build_class_matrix, format_signatures, learn_signature, parse_signatures, quantize, track_frame, ColorSignature,
    Rect, TrackerConfig, DEFAULT_Q_LEVELS,
};
use crate::control::DecisionConfig;
use crate::error::{Error, Result};
use crate::gait::{GaitParams, RobotPose};
use crate::imagecore::{load_image, rgb_to_hsv, save_image, PixelBuffer, PixelFormat};
use crate::segmentation::{otsu_segment, rule_segment, scenario_eval, ThresholdRule, DEFAULT_RULE};
use crate::sim::{
    calibrate_signature, generate_samples, render_view, run_episode_with, CameraModel, EpisodeSettings, Method,
    Outcome, TrackSpec, DEFAULT_SAMPLE_NOISE, DEFAULT_SCENARIOS, RED, WHITE,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_NOT_COMPLETED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "linefollow", version, about = "Line segmentation, color tracking and closed-loop simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Segment an image into a binary line mask.
    Segment(SegmentArgs),
    /// Report color regions, or learn a signature with --learn.
    Track(TrackArgs),
    /// Run a closed-loop episode on a track file.
    Simulate(SimulateArgs),
    /// Evaluate an RGB rule on synthetic lighting scenarios.
    Eval(EvalArgs),
    /// Render the camera view at a pose.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodName {
    Otsu,
    RgbRule,
    HsvTrack,
}

#[derive(Debug, Args)]
struct MethodArgs {
    #[arg(long, value_enum)]
    method: MethodName,
    /// Rule text for rgb-rule, e.g. "R+G+B<250;G-B<30;R-B>-30".
    #[arg(long)]
    rule: Option<String>,
    /// Signature file for hsv-track.
    #[arg(long)]
    signatures: Option<PathBuf>,
    #[arg(long, default_value_t = TrackerConfig::default().noise_min_run)]
    noise_min_run: usize,
    #[arg(long, default_value_t = TrackerConfig::default().min_region_pixels)]
    min_pixels: usize,
}

#[derive(Debug, Args)]
struct SegmentArgs {
    #[command(flatten)]
    method: MethodArgs,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct TrackArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    signatures: PathBuf,
    #[arg(long, default_value_t = TrackerConfig::default().noise_min_run)]
    noise_min_run: usize,
    #[arg(long, default_value_t = TrackerConfig::default().min_region_pixels)]
    min_pixels: usize,
    #[arg(long, default_value_t = TrackerConfig::default().max_regions)]
    max_regions: usize,
    /// Learn a signature from the rectangle x,y,w,h and append it to the file.
    #[arg(long, requires = "id")]
    learn: Option<String>,
    #[arg(long)]
    id: Option<u8>,
    #[arg(long, default_value_t = DEFAULT_Q_LEVELS)]
    q_levels: u8,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    track: PathBuf,
    #[command(flatten)]
    method: MethodArgs,
    #[arg(long, default_value_t = EpisodeSettings::default().max_steps)]
    max_steps: usize,
    #[arg(long, default_value_t = EpisodeSettings::default().stop_limit)]
    stop_limit: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory receiving one numbered PPM per frame.
    #[arg(long)]
    frames: Option<PathBuf>,
    /// Episode log destination; stdout when omitted.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Comma-separated brightness factors, darkest first.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SCENARIOS.to_vec())]
    scenarios: Vec<f64>,
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = DEFAULT_RULE)]
    rule: String,
    #[arg(long, default_value_t = DEFAULT_SAMPLE_NOISE)]
    noise: f64,
    /// Print `scenario,class,total,correct,rate` records after the table.
    #[arg(long)]
    records: bool,
    /// Time the region tracker on a 400x300 frame.
    #[arg(long)]
    bench: bool,
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[arg(long)]
    track: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    y: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    heading_deg: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Segment(a) => cmd_segment(a, out),
        Command::Track(a) => cmd_track(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Eval(a) => cmd_eval(a, out),
        Command::Render(a) => cmd_render(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::RuleParse { .. } | Error::SignatureParse { .. } | Error::TrackParse { .. } => {
            EXIT_USAGE
        }
        _ => EXIT_RUNTIME,
    }
}

fn read_signatures(path: &PathBuf) -> Result<Vec<ColorSignature>> {
    let text = fs::read_to_string(path)?;
    parse_signatures(&text)
}

impl MethodArgs {
    fn build(&self) -> Result<Option<Method>> {
        Ok(Some(match self.method {
            MethodName::Otsu => Method::Otsu,
            MethodName::RgbRule => {
                let text = self.rule.as_deref().ok_or_else(|| Error::Config("--rule is required for rgb-rule".into()))?;
                Method::RgbRule(text.parse()?)
            }
            MethodName::HsvTrack => {
                let Some(path) = &self.signatures else {
                    return Ok(None);
                };
                Method::HsvTrack {
                    signatures: read_signatures(path)?,
                    config: TrackerConfig {
                        noise_min_run: self.noise_min_run,
                        min_region_pixels: self.min_pixels,
                        ..TrackerConfig::default()
                    },
                }
            }
        }))
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e)
}

fn cmd_segment(args: SegmentArgs, out: &mut dyn Write) -> Result<i32> {
    let method = args
        .method
        .build()?
        .ok_or_else(|| Error::Config("--signatures is required for hsv-track".into()))?;
    let image = load_image(&args.input)?;
    let image = if image.format() == PixelFormat::Gray8 {
        let data = image.data().iter().flat_map(|&v| [v, v, v]).collect();
        PixelBuffer::new(image.width(), image.height(), PixelFormat::Rgb8, data)?
    } else {
        image
    };
    let mask = match &method {
        Method::Otsu => {
            let (mask, result) = otsu_segment(&image)?;
            writeln!(
                out,
                "threshold {} variance {:.6}{}",
                result.threshold,
                result.between_class_variance,
                if result.degenerate { " degenerate" } else { "" }
            )
            .map_err(io_err)?;
            mask
        }
        Method::RgbRule(rule) => rule_segment(&image, rule)?,
        Method::HsvTrack { signatures, .. } => {
            let matrices: Vec<_> = signatures.iter().map(build_class_matrix).collect();
            let q = signatures[0].q_levels;
            let data = image
                .data()
                .chunks_exact(3)
                .map(|p| {
                    let (h, s) = quantize(rgb_to_hsv(p[0], p[1], p[2]), q);
                    u8::from(matrices.iter().any(|m| m.membership(h, s)))
                })
                .collect();
            PixelBuffer::new(image.width(), image.height(), PixelFormat::Binary, data)?
        }
    };
    save_image(&mask, &args.output)?;
    Ok(EXIT_OK)
}

fn cmd_track(args: TrackArgs, out: &mut dyn Write) -> Result<i32> {
    let image = load_image(&args.input)?;
    if let Some(rect) = &args.learn {
        let rect: Rect = rect.parse().map_err(Error::Config)?;
        let id = args.id.expect("clap enforces --id with --learn");
        let mut sigs = if args.signatures.exists() { read_signatures(&args.signatures)? } else { Vec::new() };
        let sig = learn_signature(&image, rect, id, args.q_levels)?;
        if sigs.first().is_some_and(|s| s.q_levels != sig.q_levels) {
            return Err(Error::Config("q_levels differs from the existing signature file".into()));
        }
        sigs.push(sig);
        fs::write(&args.signatures, format_signatures(&sigs))?;
        writeln!(out, "{sig}").map_err(io_err)?;
        return Ok(EXIT_OK);
    }
    let sigs = read_signatures(&args.signatures)?;
    let config = TrackerConfig {
        noise_min_run: args.noise_min_run,
        min_region_pixels: args.min_pixels,
        max_regions: args.max_regions,
    };
    for region in track_frame(&image, &sigs, config)? {
        writeln!(out, "{region}").map_err(io_err)?;
    }
    Ok(EXIT_OK)
}

fn cmd_simulate(args: SimulateArgs, out: &mut dyn Write) -> Result<i32> {
    let text = fs::read_to_string(&args.track)?;
    let track = TrackSpec::parse(&text)?;
    let cam = CameraModel::default();
    let method = match args.method.build()? {
        Some(m) => m,
        None => Method::HsvTrack {
            signatures: vec![calibrate_signature(&track, &cam, 1, DEFAULT_Q_LEVELS)?],
            config: TrackerConfig {
                noise_min_run: args.method.noise_min_run,
                min_region_pixels: args.method.min_pixels,
                ..TrackerConfig::default()
            },
        },
    };
    if let Some(dir) = &args.frames {
        fs::create_dir_all(dir)?;
    }
    let settings = EpisodeSettings { max_steps: args.max_steps, stop_limit: args.stop_limit, seed: args.seed };
    let log = run_episode_with(
        &track,
        &cam,
        &method,
        &DecisionConfig::default(),
        &GaitParams::default(),
        settings,
        |i, frame| match &args.frames {
            Some(dir) => save_image(frame, dir.join(format!("frame_{i:05}.ppm"))),
            None => Ok(()),
        },
    )?;
    let text = log.to_string();
    match &args.log {
        Some(path) => fs::write(path, &text)?,
        None => out.write_all(text.as_bytes()).map_err(io_err)?,
    }
    Ok(if log.outcome == Outcome::Completed { EXIT_OK } else { EXIT_NOT_COMPLETED })
}

fn cmd_eval(args: EvalArgs, out: &mut dyn Write) -> Result<i32> {
    if args.n == 0 || args.scenarios.is_empty() {
        return Err(Error::Config("need at least one scenario and --n >= 1".into()));
    }
    if args.noise.is_nan() || args.noise < 0.0 {
        return Err(Error::Config("--noise must be non-negative".into()));
    }
    let rule: ThresholdRule = args.rule.parse()?;
    let samples = generate_samples(&args.scenarios, args.n, args.noise, args.seed);
    let report = scenario_eval(&samples, &rule)?;
    write!(out, "{report}").map_err(io_err)?;
    if args.records {
        write!(out, "{}", report.records()).map_err(io_err)?;
    }
    if args.bench {
        let ms = bench_tracking(20)?;
        writeln!(out, "bench track_frame 400x300: {ms:.3} ms/frame (budget 20 ms)").map_err(io_err)?;
    }
    Ok(EXIT_OK)
}

/// Mean wall time of `track_frame` on a default red-track frame, in ms.
pub fn bench_tracking(repeats: usize) -> Result<f64> {
    let track = TrackSpec::corner(0.5, 90.0)?.with_colors(RED, WHITE);
    let cam = CameraModel::default();
    let pose = RobotPose::new(0.35, 0.0, 0.0);
    let frame = render_view(&track, &pose, &cam, 0);
    let sig = calibrate_signature(&track, &cam, 1, DEFAULT_Q_LEVELS)?;
    let config = TrackerConfig::default();
    track_frame(&frame, &[sig], config)?;
    let start = Instant::now();
    for _ in 0..repeats.max(1) {
        std::hint::black_box(track_frame(&frame, &[sig], config)?);
    }
    Ok(start.elapsed().as_secs_f64() * 1000.0 / repeats.max(1) as f64)
}

fn cmd_render(args: RenderArgs, out: &mut dyn Write) -> Result<i32> {
    let text = fs::read_to_string(&args.track)?;
    let track = TrackSpec::parse(&text)?;
    let start = track.start_pose();
    let pose = RobotPose::new(
        args.x.unwrap_or(start.x),
        args.y.unwrap_or(start.y),
        args.heading_deg.map_or(start.heading, f64::to_radians),
    );
    let frame = render_view(&track, &pose, &CameraModel::default(), args.seed);
    save_image(&frame, &args.output)?;
    writeln!(out, "rendered {}x{} at {:.4} {:.4} {:.2}", frame.width(), frame.height(), pose.x, pose.y, pose.heading.to_degrees())
        .map_err(io_err)?;
    Ok(EXIT_OK)
}
