//! On-disk sequences: numbered PGM frames, a ground-truth CSV and a
//! key=value manifest.
//!
//! File `frame_{k:06}.pgm` holds frame `k - 1`. Ground-truth row `t` is the
//! mean flow from frame `t - 1` to frame `t` in optical-flow pixels.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::synth::{MotionSpec, TextureKind, TextureSpec};
use crate::tracks::{read_ground_truth_csv, write_ground_truth_csv};

pub const MANIFEST_FILE: &str = "manifest.txt";
pub const GROUND_TRUTH_FILE: &str = "ground_truth.csv";

pub fn frame_file_name(index: usize) -> String {
    format!("frame_{:06}.pgm", index + 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Manifest {
    pub texture: TextureSpec,
    pub motion: MotionSpec,
    pub n_frames: usize,
    pub viewport: (usize, usize),
    /// Parameter set the sequence was generated for, if any.
    pub param_set: Option<u8>,
}

impl Manifest {
    pub fn to_key_values(&self) -> String {
        let mut kv: Vec<(&str, String)> = vec![
            ("texture_kind", self.texture.kind.to_string()),
            ("texture_seed", self.texture.seed.to_string()),
            ("texture_width", self.texture.size.0.to_string()),
            ("texture_height", self.texture.size.1.to_string()),
            ("motion", self.motion.kind_name().to_string()),
        ];
        match self.motion {
            MotionSpec::Still => {}
            MotionSpec::Translate { vx, vy } => {
                kv.push(("vx", vx.to_string()));
                kv.push(("vy", vy.to_string()));
            }
            MotionSpec::Zoom { rate, center } => {
                kv.push(("rate", rate.to_string()));
                kv.push(("center_x", center.0.to_string()));
                kv.push(("center_y", center.1.to_string()));
            }
            MotionSpec::Rotate { omega, center } => {
                kv.push(("omega", omega.to_string()));
                kv.push(("center_x", center.0.to_string()));
                kv.push(("center_y", center.1.to_string()));
            }
        }
        kv.push(("n_frames", self.n_frames.to_string()));
        kv.push(("viewport_width", self.viewport.0.to_string()));
        kv.push(("viewport_height", self.viewport.1.to_string()));
        if let Some(id) = self.param_set {
            kv.push(("param_set", id.to_string()));
        }
        kv.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn from_key_values(text: &str) -> Result<Self> {
        let bad = |detail: String| Error::Format {
            what: "manifest",
            detail,
        };
        let mut map = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("line {}: expected key=value", n + 1)))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        fn get<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<T> {
            let raw = map.get(key).ok_or_else(|| Error::Format {
                what: "manifest",
                detail: format!("missing key {key}"),
            })?;
            raw.parse().map_err(|_| Error::Format {
                what: "manifest",
                detail: format!("cannot parse {key}={raw}"),
            })
        }
        let kind: TextureKind = map
            .get("texture_kind")
            .ok_or_else(|| bad("missing key texture_kind".into()))?
            .parse()?;
        let center =
            || -> Result<(f64, f64)> { Ok((get(&map, "center_x")?, get(&map, "center_y")?)) };
        let motion = match map.get("motion").map(String::as_str) {
            Some("still") => MotionSpec::Still,
            Some("translate") => MotionSpec::Translate {
                vx: get(&map, "vx")?,
                vy: get(&map, "vy")?,
            },
            Some("zoom") => MotionSpec::Zoom {
                rate: get(&map, "rate")?,
                center: center()?,
            },
            Some("rotate") => MotionSpec::Rotate {
                omega: get(&map, "omega")?,
                center: center()?,
            },
            other => return Err(bad(format!("unknown motion {other:?}"))),
        };
        Ok(Self {
            texture: TextureSpec {
                kind,
                seed: get(&map, "texture_seed")?,
                size: (get(&map, "texture_width")?, get(&map, "texture_height")?),
            },
            motion,
            n_frames: get(&map, "n_frames")?,
            viewport: (get(&map, "viewport_width")?, get(&map, "viewport_height")?),
            param_set: map
                .contains_key("param_set")
                .then(|| get(&map, "param_set"))
                .transpose()?,
        })
    }
}

/// Writes the manifest and ground truth; frames are written separately so
/// they can be streamed.
pub fn write_sidecars(dir: &Path, manifest: &Manifest, ground_truth: &[(f64, f64)]) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(MANIFEST_FILE), manifest.to_key_values())?;
    let rows: Vec<(u64, f64, f64)> = ground_truth
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| (i as u64 + 1, x, y))
        .collect();
    write_ground_truth_csv(
        BufWriter::new(File::create(dir.join(GROUND_TRUTH_FILE))?),
        &rows,
    )
}

pub fn write_frame(dir: &Path, index: usize, frame: &Frame) -> Result<()> {
    frame.write_pgm(dir.join(frame_file_name(index)))
}

/// Frame files of a sequence directory in order.
pub fn frame_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("frame_") && n.ends_with(".pgm"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Format {
            what: "sequence",
            detail: format!("no frame_*.pgm files in {}", dir.display()),
        });
    }
    Ok(paths)
}

pub fn read_manifest(dir: &Path) -> Result<Option<Manifest>> {
    let path = dir.join(MANIFEST_FILE);
    if !path.exists() {
        return Ok(None);
    }
    Manifest::from_key_values(&fs::read_to_string(path)?).map(Some)
}

/// Ground-truth flows ordered by frame, if the sidecar exists.
pub fn read_ground_truth(path: &Path) -> Result<Option<Vec<(u64, f64, f64)>>> {
    if !path.exists() {
        return Ok(None);
    }
    let mut rows = read_ground_truth_csv(File::open(path)?)?;
    rows.sort_by_key(|r| r.0);
    Ok(Some(rows))
}
