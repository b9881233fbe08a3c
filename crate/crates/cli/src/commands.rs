use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use ofsim_core::pipeline::{
    estimated_flows, evaluate, run_scene, throughput_report, track_summary, write_run_outputs,
    REDETECT_MAX_GAP, REDETECT_RADIUS,
};
use ofsim_core::sequence::{self, Manifest};
use ofsim_core::synth::{generate_texture, TextureKind};
use ofsim_core::tracks::{
    accuracy_metrics, link_tracks, redetect, track_stats, write_frames_csv, write_summary_csv,
    Track,
};
use ofsim_core::{run_pipeline, wire, Frame, Scenario, ScenarioOptions, Scene, SensorConfig};

use crate::config_args::ConfigArgs;

/// Scene selection shared by `gen`, `run` and `bench`.
#[derive(Args, Clone, Debug)]
pub struct SceneArgs {
    /// translate-easy, translate-hard, zoom, rotate or still.
    #[arg(long, value_name = "NAME")]
    pub scenario: Option<Scenario>,
    /// Sequence length in seconds of sensor time.
    #[arg(long, value_name = "SECONDS")]
    pub duration: Option<f64>,
    /// Sequence length in frames; overrides --duration.
    #[arg(long, value_name = "N")]
    pub frames: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Translation speed in sensor pixels per second.
    #[arg(long, default_value_t = ofsim_core::pipeline::DEFAULT_SCENE_SPEED)]
    pub speed: f64,
    /// Texture to use instead of the scenario's default.
    #[arg(long, value_name = "KIND")]
    pub texture: Option<TextureKind>,
}

impl SceneArgs {
    fn scene(
        &self,
        config: &SensorConfig,
        default_scenario: Scenario,
        default_frames: usize,
    ) -> Result<Scene> {
        let n_frames = match (self.frames, self.duration) {
            (Some(n), _) => n,
            (None, Some(d)) if d.is_finite() && d > 0.0 => (d * config.frame_rate).round() as usize,
            (None, Some(d)) => bail!("duration must be positive, got {d}"),
            (None, None) => default_frames,
        };
        if n_frames < 2 {
            bail!("a sequence needs at least 2 frames, got {n_frames}");
        }
        let options = ScenarioOptions {
            seed: self.seed,
            speed: self.speed,
            out_dir: None,
        };
        let mut scene = Scene::for_scenario(
            config,
            self.scenario.unwrap_or(default_scenario),
            n_frames,
            &options,
        );
        if let Some(kind) = self.texture {
            scene.texture.kind = kind;
        }
        Ok(scene)
    }
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub scene: SceneArgs,
    /// Output sequence directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

pub fn gen(args: GenArgs) -> Result<()> {
    let config = args.config.resolve(None)?;
    let scene = args.scene.scene(
        &config,
        Scenario::TranslateEasy,
        2 * config.frame_rate.round() as usize,
    )?;
    let texture = generate_texture(&scene.texture)?;
    let renderer = scene.renderer(&texture)?;
    let manifest = Manifest {
        texture: scene.texture,
        motion: scene.motion,
        n_frames: scene.n_frames,
        viewport: scene.viewport,
        param_set: args.config.param_set,
    };
    sequence::write_sidecars(&args.out, &manifest, &scene.ground_truth(&config))?;
    if args.config.param_set.is_none() {
        config.save(args.out.join("sensor.cfg"))?;
    }
    for t in 0..scene.n_frames {
        sequence::write_frame(&args.out, t, &renderer.render(t)?)?;
    }
    println!(
        "wrote {} frames of {}x{} to {}",
        scene.n_frames,
        scene.viewport.0,
        scene.viewport.1,
        args.out.display()
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Sequence directory written by `gen` (or any numbered PGM frames).
    #[arg(long, value_name = "DIR", conflicts_with = "scenario")]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub scene: SceneArgs,
    /// Report directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

/// Ground truth for frames `1..n_frames`, in order.
fn aligned_ground_truth(rows: &[(u64, f64, f64)], n_frames: usize) -> Result<Vec<(f64, f64)>> {
    let by_frame: HashMap<u64, (f64, f64)> = rows.iter().map(|&(f, x, y)| (f, (x, y))).collect();
    (1..n_frames as u64)
        .map(|t| {
            by_frame
                .get(&t)
                .copied()
                .with_context(|| format!("ground truth has no row for frame {t}"))
        })
        .collect()
}

pub fn run(args: RunArgs) -> Result<()> {
    let report = match &args.input {
        Some(dir) => {
            let manifest = sequence::read_manifest(dir)?;
            let sidecar_config = dir.join("sensor.cfg");
            let config = if args.config.param_set.is_none()
                && args.config.config.is_none()
                && sidecar_config.exists()
            {
                ConfigArgs {
                    config: Some(sidecar_config),
                    ..args.config.clone()
                }
                .resolve(None)?
            } else {
                args.config
                    .resolve(manifest.as_ref().and_then(|m| m.param_set))?
            };
            let paths = sequence::frame_paths(dir)?;
            let frames = paths.iter().map(Frame::read_pgm);
            let output = run_pipeline(&config, frames)?;
            let truth = match sequence::read_ground_truth(&dir.join(sequence::GROUND_TRUTH_FILE))? {
                Some(rows) => Some(aligned_ground_truth(&rows, output.frames.len())?),
                None => None,
            };
            match truth {
                Some(gt) => {
                    let run = evaluate(output, gt)?;
                    write_run_outputs(
                        &args.out,
                        &config,
                        &run.output,
                        Some(&run.accuracy),
                        &run.tracks,
                    )?
                }
                None => {
                    let tracks = track_summary(&output.vectors());
                    write_run_outputs(&args.out, &config, &output, None, &tracks)?
                }
            }
        }
        None => {
            let config = args.config.resolve(None)?;
            if args.scene.scenario.is_none() {
                bail!("run needs --input DIR or --scenario NAME");
            }
            let scene = args.scene.scene(&config, Scenario::TranslateEasy, 0)?;
            let run = run_scene(&config, &scene)?;
            write_run_outputs(
                &args.out,
                &config,
                &run.output,
                Some(&run.accuracy),
                &run.tracks,
            )?
        }
    };
    print!("{report}");
    Ok(())
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub scene: SceneArgs,
    /// Optional directory for timing.csv.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

pub fn bench(args: BenchArgs) -> Result<()> {
    let config = args.config.resolve(None)?;
    let scene = args.scene.scene(&config, Scenario::Still, 60)?;
    let texture = generate_texture(&scene.texture)?;
    let renderer = scene.renderer(&texture)?;
    let frames = (0..scene.n_frames)
        .map(|t| renderer.render(t))
        .collect::<ofsim_core::Result<Vec<Frame>>>()?;
    let report = throughput_report(&config, &frames)?;
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        ofsim_core::pipeline::write_timing_csv(
            BufWriter::new(File::create(dir.join("timing.csv"))?),
            &report,
        )?;
    }
    print!("{report}");
    Ok(())
}

#[derive(Args, Debug)]
pub struct StreamArgs {
    /// Input .ofv stream.
    #[arg(long, value_name = "FILE")]
    pub stream: PathBuf,
    /// Largest number of missing frames bridged by re-detection.
    #[arg(long, default_value_t = REDETECT_MAX_GAP)]
    pub max_gap: u64,
    /// Re-detection radius in optical-flow pixels.
    #[arg(long, default_value_t = REDETECT_RADIUS)]
    pub radius: i64,
}

impl StreamArgs {
    fn load(&self) -> Result<Vec<Vec<ofsim_core::FlowVector>>> {
        let file = File::open(&self.stream)
            .with_context(|| format!("opening {}", self.stream.display()))?;
        let (_, frames) = wire::read_stream(BufReader::new(file))?;
        Ok(frames)
    }

    fn tracks(&self, frames: &[Vec<ofsim_core::FlowVector>]) -> Result<(Vec<Track>, usize)> {
        if self.max_gap == 0 {
            bail!("--max-gap must be at least 1");
        }
        Ok(redetect(&link_tracks(frames), self.max_gap, self.radius))
    }
}

#[derive(Args, Debug)]
pub struct TracksArgs {
    #[command(flatten)]
    pub stream: StreamArgs,
    /// Optional directory for tracks.csv.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

fn write_tracks_csv(path: &Path, tracks: &[Track]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "id,length,first_frame,last_frame,gaps")?;
    for t in tracks {
        let gaps: Vec<String> = t.gaps.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        writeln!(
            w,
            "{},{},{},{},{}",
            t.id,
            t.len(),
            t.first().frame,
            t.last().frame,
            gaps.join(" ")
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn tracks(args: TracksArgs) -> Result<()> {
    let frames = args.stream.load()?;
    let (tracks, merges) = args.stream.tracks(&frames)?;
    let stats = track_stats(&tracks, merges);
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        write_tracks_csv(&dir.join("tracks.csv"), &tracks)?;
    }
    println!(
        "frames: {}, tracks: {} (max {}, median {:.1}, redetected {})",
        frames.len(),
        stats.n_tracks,
        stats.max_track_len,
        stats.p50_track_len,
        stats.redetected_count
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    #[command(flatten)]
    pub stream: StreamArgs,
    /// Ground-truth CSV with columns frame,gt_dx,gt_dy.
    #[arg(long, value_name = "FILE")]
    pub ground_truth: Option<PathBuf>,
    /// Output directory for frames.csv and summary.csv.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

pub fn report(args: ReportArgs) -> Result<()> {
    let frames = args.stream.load()?;
    let (tracks, merges) = args.stream.tracks(&frames)?;
    let stats = track_stats(&tracks, merges);
    let accuracy = match &args.ground_truth {
        Some(path) => {
            let rows = sequence::read_ground_truth(path)?
                .with_context(|| format!("{} not found", path.display()))?;
            let gt = aligned_ground_truth(&rows, frames.len())?;
            Some(accuracy_metrics(&estimated_flows(&frames), &gt, 1)?)
        }
        None => None,
    };
    fs::create_dir_all(&args.out)?;
    if let Some(acc) = &accuracy {
        write_frames_csv(
            BufWriter::new(File::create(args.out.join("frames.csv"))?),
            acc,
        )?;
    }
    write_summary_csv(
        BufWriter::new(File::create(args.out.join("summary.csv"))?),
        accuracy.as_ref(),
        &stats,
    )?;
    match &accuracy {
        Some(a) => {
            let rel = a.final_rel_err.map_or("n/a".into(), |e| format!("{e:.4}"));
            println!(
                "rmse: ({:.4}, {:.4}), final_rel_err: {rel}",
                a.rmse.0, a.rmse.1
            );
        }
        None => println!("no ground truth; wrote track summary only"),
    }
    println!("reports in {}", args.out.display());
    Ok(())
}
