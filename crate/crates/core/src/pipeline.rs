//! End-to-end emulation: frontend, feature engine, matcher and encoder run
//! frame by frame, plus scenario runs with reports.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::features::{describe_corners, select_corners, DetectorState, Feature};
use crate::frame::Frame;
use crate::matcher::{match_features, ratio_filter, FlowVector};
use crate::params::parameter_set;
use crate::rate::hardware_reference;
use crate::sensor::{downscale_for_of, SensorConfig, SubsampleMode};
use crate::synth::{
    generate_texture, mean_ground_truth, viewport_origin, wheel_center, MotionSpec,
    SequenceRenderer, TextureKind, TextureSpec,
};
use crate::tracks::{
    accuracy_metrics, link_tracks, mean_flow, redetect, track_stats, write_frames_csv,
    write_summary_csv, AccuracyReport, TrackStats,
};
use crate::wire;

/// Gap and radius used when bridging interrupted tracks in reports.
pub const REDETECT_MAX_GAP: u64 = 3;
pub const REDETECT_RADIUS: i64 = 2;

/// Default scene speed for translation scenarios, in sensor pixels per second.
pub const DEFAULT_SCENE_SPEED: f64 = 420.0;
/// Default rotation rate, radians per second.
pub const DEFAULT_ROTATION_RATE: f64 = 0.5;
/// Default zoom, scale factor per second.
pub const DEFAULT_ZOOM_RATE: f64 = 1.25;

/// Accumulated wall-clock time per stage.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StageTimings {
    pub frontend: Duration,
    pub detect: Duration,
    pub describe: Duration,
    pub matching: Duration,
    pub encode: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.frontend + self.detect + self.describe + self.matching + self.encode
    }

    /// `(stage, microseconds per frame)` rows, total last.
    pub fn per_frame_us(&self, frames: usize) -> Vec<(&'static str, f64)> {
        let n = frames.max(1) as f64;
        let us = |d: Duration| d.as_secs_f64() * 1e6 / n;
        vec![
            ("frontend", us(self.frontend)),
            ("detect", us(self.detect)),
            ("describe", us(self.describe)),
            ("match", us(self.matching)),
            ("encode", us(self.encode)),
            ("total", us(self.total())),
        ]
    }
}

/// What one frame produced.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameResult {
    pub index: u64,
    /// Vectors from the previous frame to this one after the ratio test.
    pub vectors: Vec<FlowVector>,
    /// Descriptors produced after both budgets; this drives the controller.
    pub descriptor_count: usize,
    /// Threshold used for detection on this frame.
    pub threshold: u8,
    pub prev_feature_count: usize,
    /// Vectors before the ratio test.
    pub raw_match_count: usize,
    /// Encoded payload size in bytes.
    pub payload_bytes: usize,
}

/// Stateful per-frame processor.
pub struct Pipeline {
    config: SensorConfig,
    state: DetectorState,
    prev: Option<Vec<Feature>>,
    timings: StageTimings,
    frames: u64,
    scratch: Vec<u8>,
}

impl Pipeline {
    pub fn new(config: &SensorConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            state: DetectorState::new(config.brief_target, config.brief_max, config.tile_budget),
            config: config.clone(),
            prev: None,
            timings: StageTimings::default(),
            frames: 0,
            scratch: Vec::new(),
        })
    }

    pub fn config(&self) -> &SensorConfig {
        &self.config
    }

    pub fn threshold(&self) -> u8 {
        self.state.threshold
    }

    pub fn frames_processed(&self) -> u64 {
        self.frames
    }

    pub fn timings(&self) -> StageTimings {
        self.timings
    }

    pub fn push(&mut self, frame: &Frame) -> Result<FrameResult> {
        let t0 = Instant::now();
        let out = self.config.apply(frame)?;
        let (of_frame, _) = downscale_for_of(&out);
        let t1 = Instant::now();
        let threshold = self.state.threshold;
        let corners = select_corners(&of_frame, &self.state)?;
        let t2 = Instant::now();
        let features = describe_corners(&of_frame, &corners)?;
        let t3 = Instant::now();
        let (raw, vectors, prev_count) = match &self.prev {
            Some(prev) => {
                let raw = match_features(prev, &features, self.config.max_displacement);
                let kept = ratio_filter(&raw, self.config.ratio_threshold);
                (raw.len(), kept, prev.len())
            }
            None => (0, Vec::new(), 0),
        };
        let t4 = Instant::now();
        self.scratch.clear();
        wire::encode_into(&vectors, &mut self.scratch)?;
        let t5 = Instant::now();

        self.timings.frontend += t1 - t0;
        self.timings.detect += t2 - t1;
        self.timings.describe += t3 - t2;
        self.timings.matching += t4 - t3;
        self.timings.encode += t5 - t4;

        let descriptor_count = features.len();
        self.state = self.state.update_threshold(descriptor_count as u32);
        self.prev = Some(features);
        let index = self.frames;
        self.frames += 1;
        Ok(FrameResult {
            index,
            vectors,
            descriptor_count,
            threshold,
            prev_feature_count: prev_count,
            raw_match_count: raw,
            payload_bytes: self.scratch.len(),
        })
    }
}

/// Everything a pipeline run produced.
#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub frames: Vec<FrameResult>,
    pub timings: StageTimings,
    /// Wall-clock time for the whole run, excluding frame production.
    pub wall: Duration,
    pub of_dims: (usize, usize),
}

impl PipelineOutput {
    pub fn vectors(&self) -> Vec<Vec<FlowVector>> {
        self.frames.iter().map(|f| f.vectors.clone()).collect()
    }

    pub fn frames_per_second(&self) -> f64 {
        let secs = self.wall.as_secs_f64();
        if secs > 0.0 {
            self.frames.len() as f64 / secs
        } else {
            f64::INFINITY
        }
    }
}

/// Runs the pipeline over a frame source; at least two frames are needed.
pub fn run_pipeline<I>(config: &SensorConfig, frames: I) -> Result<PipelineOutput>
where
    I: IntoIterator<Item = Result<Frame>>,
{
    let mut pipeline = Pipeline::new(config)?;
    let mut results = Vec::new();
    let mut wall = Duration::ZERO;
    for frame in frames {
        let frame = frame?;
        let start = Instant::now();
        results.push(pipeline.push(&frame)?);
        wall += start.elapsed();
    }
    if results.len() < 2 {
        return Err(Error::Config(format!(
            "need at least 2 frames, got {}",
            results.len()
        )));
    }
    Ok(PipelineOutput {
        frames: results,
        timings: pipeline.timings(),
        wall,
        of_dims: config.of_dims().0,
    })
}

/// Viewport position of optical-flow pixel 0 under this configuration.
pub fn of_pixel_offset(config: &SensorConfig) -> f64 {
    let f = config.subsample_factor as f64;
    let frontend = match config.subsample_mode {
        SubsampleMode::Bin if config.subsample_factor > 1 => (f - 1.0) / 2.0,
        _ => 0.0,
    };
    // the optical-flow downscale always bins
    let of = if config.of_dims().1 == 2 {
        0.5 * f
    } else {
        0.0
    };
    frontend + of
}

/// Named motion scenarios.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scenario {
    TranslateEasy,
    TranslateHard,
    Zoom,
    Rotate,
    Still,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::TranslateEasy,
        Scenario::TranslateHard,
        Scenario::Zoom,
        Scenario::Rotate,
        Scenario::Still,
    ];
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::TranslateEasy => "translate-easy",
            Scenario::TranslateHard => "translate-hard",
            Scenario::Zoom => "zoom",
            Scenario::Rotate => "rotate",
            Scenario::Still => "still",
        })
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.to_string() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario {s:?}")))
    }
}

/// Knobs for scenario runs.
#[derive(Clone, Debug)]
pub struct ScenarioOptions {
    pub seed: u64,
    /// Translation speed in sensor pixels per second.
    pub speed: f64,
    pub out_dir: Option<PathBuf>,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            speed: DEFAULT_SCENE_SPEED,
            out_dir: None,
        }
    }
}

/// A synthetic sequence rendered into the readout window.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub texture: TextureSpec,
    pub motion: MotionSpec,
    pub n_frames: usize,
    pub viewport: (usize, usize),
}

fn same_parity(len: usize, like: usize) -> usize {
    len + (len + like) % 2
}

impl Scene {
    /// Builds a scene whose texture is large enough for the motion.
    pub fn new(
        kind: TextureKind,
        seed: u64,
        motion: MotionSpec,
        n_frames: usize,
        viewport: (usize, usize),
    ) -> Self {
        let (w, h) = viewport;
        let travel = |v: f64| (v.abs() * n_frames.saturating_sub(1) as f64).ceil() as usize;
        let (tw, th) = match motion {
            MotionSpec::Translate { vx, vy } => (
                (2 * w).max(w + 2 * travel(vx) + 4),
                (2 * h).max(h + 2 * travel(vy) + 4),
            ),
            MotionSpec::Rotate { .. } => {
                let diag = (w as f64).hypot(h as f64).ceil() as usize + 4;
                ((2 * w).max(diag), (2 * h).max(diag))
            }
            _ => (2 * w, 2 * h),
        };
        let size = (same_parity(tw.max(64), w), same_parity(th.max(64), h));
        // rotations turn about the wheel centre so the pattern stays aligned
        let motion = match motion {
            MotionSpec::Rotate { omega, .. } => MotionSpec::Rotate {
                omega,
                center: rotation_center(size, viewport),
            },
            other => other,
        };
        Self {
            texture: TextureSpec { kind, seed, size },
            motion,
            n_frames,
            viewport,
        }
    }

    /// The scene a parameter set sees for a named scenario.
    pub fn for_scenario(
        config: &SensorConfig,
        scenario: Scenario,
        n_frames: usize,
        options: &ScenarioOptions,
    ) -> Self {
        let (_, _, w, h) = config.readout_window();
        let fps = config.frame_rate;
        let center = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
        let (kind, motion) = match scenario {
            Scenario::TranslateEasy => (
                TextureKind::Blocks,
                MotionSpec::Translate {
                    vx: options.speed / fps,
                    vy: 0.0,
                },
            ),
            Scenario::TranslateHard => (
                TextureKind::Foliage,
                MotionSpec::Translate {
                    vx: options.speed / fps,
                    vy: 0.0,
                },
            ),
            Scenario::Zoom => (
                TextureKind::Blocks,
                MotionSpec::Zoom {
                    rate: DEFAULT_ZOOM_RATE.powf(1.0 / fps),
                    center,
                },
            ),
            Scenario::Rotate => (
                TextureKind::Wheel,
                MotionSpec::Rotate {
                    omega: DEFAULT_ROTATION_RATE / fps,
                    center,
                },
            ),
            Scenario::Still => (TextureKind::Blocks, MotionSpec::Still),
        };
        Self::new(kind, options.seed, motion, n_frames, (w, h))
    }

    pub fn renderer<'a>(&self, texture: &'a Frame) -> Result<SequenceRenderer<'a>> {
        SequenceRenderer::new(texture, self.motion, self.viewport)
    }

    /// Mean true flow per frame pair in optical-flow pixels; entry `i`
    /// covers frames `i` to `i + 1`.
    pub fn ground_truth(&self, config: &SensorConfig) -> Vec<(f64, f64)> {
        let (of_w, of_h) = config.of_dims().0;
        let per_frame = mean_ground_truth(
            &self.motion,
            of_w,
            of_h,
            config.total_scale() as f64,
            of_pixel_offset(config),
        );
        vec![per_frame; self.n_frames.saturating_sub(1)]
    }
}

/// Viewport coordinates of the wheel centre.
fn rotation_center(texture: (usize, usize), viewport: (usize, usize)) -> (f64, f64) {
    let (cx, cy) = wheel_center(texture.0, texture.1);
    let (ox, oy) = viewport_origin(texture, viewport);
    (cx - ox as f64, cy - oy as f64)
}

/// Pipeline output together with its evaluation.
#[derive(Clone, Debug)]
pub struct SceneRun {
    pub output: PipelineOutput,
    pub ground_truth: Vec<(f64, f64)>,
    pub accuracy: AccuracyReport,
    pub tracks: TrackStats,
}

/// Links and re-detects tracks with the report defaults.
pub fn track_summary(per_frame: &[Vec<FlowVector>]) -> TrackStats {
    let linked = link_tracks(per_frame);
    let (merged, merges) = redetect(&linked, REDETECT_MAX_GAP, REDETECT_RADIUS);
    track_stats(&merged, merges)
}

/// Mean flow of every frame pair; entry `i` covers frames `i` to `i + 1`.
pub fn estimated_flows(per_frame: &[Vec<FlowVector>]) -> Vec<Option<(f64, f64)>> {
    per_frame.iter().skip(1).map(|v| mean_flow(v)).collect()
}

/// Evaluates pipeline output against per-frame-pair ground truth.
pub fn evaluate(output: PipelineOutput, ground_truth: Vec<(f64, f64)>) -> Result<SceneRun> {
    let vectors = output.vectors();
    let accuracy = accuracy_metrics(&estimated_flows(&vectors), &ground_truth, 1)?;
    let tracks = track_summary(&vectors);
    Ok(SceneRun {
        output,
        ground_truth,
        accuracy,
        tracks,
    })
}

/// Renders a scene and runs the pipeline over it without keeping frames.
pub fn run_scene(config: &SensorConfig, scene: &Scene) -> Result<SceneRun> {
    let texture = generate_texture(&scene.texture)?;
    let renderer = scene.renderer(&texture)?;
    let fps = config.frame_rate;
    let frames = (0..scene.n_frames).map(|t| {
        renderer
            .render(t)
            .map(|f| f.with_index(t as u64, t as f64 / fps))
    });
    let output = run_pipeline(config, frames)?;
    evaluate(output, scene.ground_truth(config))
}

/// Report of a run, as printed and written by the harness.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub frames: usize,
    /// `(stage, µs per frame)`, total last.
    pub stage_us: Vec<(&'static str, f64)>,
    pub throughput_fps: f64,
    pub accuracy: Option<AccuracyReport>,
    pub tracks: Option<TrackStats>,
    pub frames_csv: Option<PathBuf>,
    /// Table rate for this height and descriptor budget, if tabulated.
    pub hardware_reference: Option<u32>,
    pub mean_descriptors: f64,
    pub mean_vectors: f64,
}

impl RunReport {
    pub fn from_output(config: &SensorConfig, output: &PipelineOutput) -> Self {
        let n = output.frames.len();
        let mean = |f: &dyn Fn(&FrameResult) -> usize| {
            output.frames.iter().map(f).sum::<usize>() as f64 / n.max(1) as f64
        };
        Self {
            frames: n,
            stage_us: output.timings.per_frame_us(n),
            throughput_fps: output.frames_per_second(),
            accuracy: None,
            tracks: None,
            frames_csv: None,
            hardware_reference: hardware_reference(config.out_height as u32, config.brief_target),
            mean_descriptors: mean(&|f| f.descriptor_count),
            mean_vectors: mean(&|f| f.vectors.len()),
        }
    }

    pub fn total_us_per_frame(&self) -> f64 {
        self.stage_us.last().map_or(0.0, |s| s.1)
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "frames: {}", self.frames)?;
        for (stage, us) in &self.stage_us {
            writeln!(f, "  {stage:<9} {us:>12.1} us/frame")?;
        }
        writeln!(f, "throughput: {:.1} frames/s", self.throughput_fps)?;
        match self.hardware_reference {
            Some(r) => writeln!(f, "hardware reference: {r} frames/s")?,
            None => writeln!(f, "hardware reference: -")?,
        }
        writeln!(
            f,
            "descriptors/frame: {:.1}, vectors/frame: {:.1}",
            self.mean_descriptors, self.mean_vectors
        )?;
        if let Some(a) = &self.accuracy {
            let rel = a
                .final_rel_err
                .map_or("n/a".to_string(), |e| format!("{e:.4}"));
            writeln!(
                f,
                "rmse: ({:.4}, {:.4}), final_rel_err: {rel}",
                a.rmse.0, a.rmse.1
            )?;
        }
        if let Some(t) = &self.tracks {
            writeln!(
                f,
                "tracks: {} (max {}, median {:.1}, redetected {})",
                t.n_tracks, t.max_track_len, t.p50_track_len, t.redetected_count
            )?;
        }
        if let Some(p) = &self.frames_csv {
            writeln!(f, "per-frame metrics: {}", p.display())?;
        }
        Ok(())
    }
}

pub fn write_timing_csv<W: Write>(w: W, report: &RunReport) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["stage", "us_per_frame"])?;
    for (stage, us) in &report.stage_us {
        out.write_record([stage.to_string(), format!("{us:.3}")])?;
    }
    out.write_record([
        "throughput_fps".to_string(),
        format!("{:.3}", report.throughput_fps),
    ])?;
    out.flush()?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Writes `summary.csv`, `timing.csv`, `stream.ofv` and, with ground
/// truth, `frames.csv` into `dir`; returns the completed report.
pub fn write_run_outputs(
    dir: &Path,
    config: &SensorConfig,
    output: &PipelineOutput,
    accuracy: Option<&AccuracyReport>,
    tracks: &TrackStats,
) -> Result<RunReport> {
    std::fs::create_dir_all(dir)?;
    let mut report = RunReport::from_output(config, output);
    if let Some(acc) = accuracy {
        let frames_csv = dir.join("frames.csv");
        write_frames_csv(create(&frames_csv)?, acc)?;
        report.frames_csv = Some(frames_csv);
    }
    write_summary_csv(create(&dir.join("summary.csv"))?, accuracy, tracks)?;
    write_timing_csv(create(&dir.join("timing.csv"))?, &report)?;
    let (w, h) = output.of_dims;
    wire::write_stream(
        create(&dir.join("stream.ofv"))?,
        w as u32,
        h as u32,
        &output.vectors(),
    )?;
    report.accuracy = accuracy.cloned();
    report.tracks = Some(tracks.clone());
    Ok(report)
}

/// Runs a built-in parameter set on a named scenario for `duration`
/// seconds of sensor time.
pub fn run_parameter_set(
    id: u8,
    scenario: Scenario,
    duration: f64,
    options: &ScenarioOptions,
) -> Result<RunReport> {
    let config = parameter_set(id)?.config;
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::Config(format!(
            "duration must be positive, got {duration}"
        )));
    }
    let n_frames = (duration * config.frame_rate).round() as usize;
    let scene = Scene::for_scenario(&config, scenario, n_frames, options);
    let run = run_scene(&config, &scene)?;
    match &options.out_dir {
        Some(dir) => write_run_outputs(dir, &config, &run.output, Some(&run.accuracy), &run.tracks),
        None => {
            let mut report = RunReport::from_output(&config, &run.output);
            report.accuracy = Some(run.accuracy);
            report.tracks = Some(run.tracks);
            Ok(report)
        }
    }
}

/// Times the pipeline over `frames` (at least 50).
pub fn throughput_report(config: &SensorConfig, frames: &[Frame]) -> Result<RunReport> {
    const MIN_FRAMES: usize = 50;
    if frames.len() < MIN_FRAMES {
        return Err(Error::Config(format!(
            "throughput needs at least {MIN_FRAMES} frames, got {}",
            frames.len()
        )));
    }
    let output = run_pipeline(config, frames.iter().cloned().map(Ok))?;
    Ok(RunReport::from_output(config, &output))
}

/// Least-squares line through `(x, y)` points: `(slope, intercept, r²)`.
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 {
        (sxy * sxy) / (sxx * syy)
    } else {
        1.0
    };
    (slope, intercept, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SensorConfig {
        parameter_set(6).unwrap().config
    }

    #[test]
    fn identical_frames_give_zero_vectors() {
        // a target above anything the frame supports only lowers the
        // threshold, so frame 1 re-detects every frame-0 feature
        let config = SensorConfig {
            brief_target: 2048,
            brief_max: 2048,
            tile_budget: 2,
            ..small_config()
        };
        let scene = Scene::new(TextureKind::Blocks, 3, MotionSpec::Still, 2, (272, 336));
        let run = run_scene(&config, &scene).unwrap();
        let v = &run.output.frames[1].vectors;
        assert!(!v.is_empty());
        assert!(v.iter().all(|v| (v.dx, v.dy, v.best_score) == (0, 0, 0)));
        assert!(run.output.frames[0].vectors.is_empty());
    }

    #[test]
    fn single_frame_is_rejected() {
        let f = Frame::filled(272, 336, 9);
        assert!(run_pipeline(&small_config(), [Ok(f)]).is_err());
    }

    #[test]
    fn mismatched_frame_is_config_error() {
        let f = Frame::filled(100, 100, 9);
        assert!(matches!(
            run_pipeline(&small_config(), [Ok(f.clone()), Ok(f)]),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn scenario_names_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(s.to_string().parse::<Scenario>().unwrap(), s);
        }
        assert!("spin".parse::<Scenario>().is_err());
    }

    #[test]
    fn frame_counts_follow_frame_rate() {
        let config = parameter_set(1).unwrap().config;
        let scene = Scene::for_scenario(
            &config,
            Scenario::Still,
            (10.0 * config.frame_rate) as usize,
            &ScenarioOptions::default(),
        );
        assert_eq!(scene.n_frames, 600);
        let config = parameter_set(6).unwrap().config;
        assert_eq!((10.0 * config.frame_rate).round() as usize, 2400);
    }

    #[test]
    fn vector_count_bounded_by_brief_max() {
        let config = small_config();
        let scene = Scene::new(TextureKind::Noise, 5, MotionSpec::Still, 4, (272, 336));
        let run = run_scene(&config, &scene).unwrap();
        assert!(run
            .output
            .frames
            .iter()
            .all(|f| f.descriptor_count <= 512 && f.vectors.len() <= 512));
    }

    #[test]
    fn fit_of_exact_line() {
        let (m, b, r2) = linear_fit(&[(1.0, 3.0), (2.0, 5.0), (4.0, 9.0)]);
        assert!((m - 2.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn of_offsets() {
        assert_eq!(of_pixel_offset(&parameter_set(3).unwrap().config), 0.0);
        assert_eq!(of_pixel_offset(&parameter_set(1).unwrap().config), 0.5);
        assert_eq!(of_pixel_offset(&parameter_set(5).unwrap().config), 0.0);
    }
}
