//! Sensor frontend: readout window, sub-sampling/binning and the
//! optical-flow unit's input size bound.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::frame::{Frame, SENSOR_HEIGHT, SENSOR_WIDTH};

/// Widest input the optical-flow unit accepts without down-sampling.
pub const OF_MAX_WIDTH: usize = 640;

/// Readout alignment applied before sub-sampling.
const READOUT_ALIGN: usize = 32;

/// Upper bound on descriptors (and therefore vectors) per frame.
pub const MAX_DESCRIPTORS: u32 = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubsampleMode {
    /// Keep every n-th pixel.
    Decimate,
    /// Average each n×n block.
    Bin,
}

impl fmt::Display for SubsampleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubsampleMode::Decimate => "decimate",
            SubsampleMode::Bin => "bin",
        })
    }
}

impl FromStr for SubsampleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "decimate" => Ok(SubsampleMode::Decimate),
            "bin" => Ok(SubsampleMode::Bin),
            other => Err(Error::Config(format!("unknown subsample mode {other:?}"))),
        }
    }
}

/// Camera and optical-flow unit settings.
#[derive(Clone, Debug, PartialEq)]
pub struct SensorConfig {
    pub out_width: usize,
    pub out_height: usize,
    /// Top-left of the readout window in full-sensor coordinates.
    pub crop_origin: Option<(usize, usize)>,
    pub subsample_factor: usize,
    pub subsample_mode: SubsampleMode,
    /// Frames per second.
    pub frame_rate: f64,
    pub brief_target: u32,
    pub brief_max: u32,
    /// Descriptors allowed per 16×16 tile.
    pub tile_budget: u8,
    /// Search window half-size in optical-flow pixels.
    pub max_displacement: u32,
    pub ratio_threshold: f64,
}

impl SensorConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.out_width == 0 || self.out_height == 0 {
            return fail("output dimensions must be positive".into());
        }
        if ![1, 2, 4].contains(&self.subsample_factor) {
            return fail(format!(
                "subsample_factor must be 1, 2 or 4, got {}",
                self.subsample_factor
            ));
        }
        if !(self.frame_rate.is_finite() && self.frame_rate > 0.0) {
            return fail(format!(
                "frame_rate must be positive, got {}",
                self.frame_rate
            ));
        }
        if self.brief_target == 0
            || self.brief_target > self.brief_max
            || self.brief_max > MAX_DESCRIPTORS
        {
            return fail(format!(
                "need 0 < brief_target <= brief_max <= {MAX_DESCRIPTORS}, got {} / {}",
                self.brief_target, self.brief_max
            ));
        }
        if !(2..=8).contains(&self.tile_budget) {
            return fail(format!(
                "tile_budget must be in [2, 8], got {}",
                self.tile_budget
            ));
        }
        if self.max_displacement == 0 {
            return fail("max_displacement must be positive".into());
        }
        if !(self.ratio_threshold > 0.0 && self.ratio_threshold <= 1.0) {
            return fail(format!(
                "ratio_threshold must be in (0, 1], got {}",
                self.ratio_threshold
            ));
        }
        let (ox, oy, w, h) = self.readout_window();
        if ox + w > SENSOR_WIDTH {
            return Err(Error::Bounds {
                axis: "x",
                value: ox + w,
                bound: SENSOR_WIDTH,
            });
        }
        if oy + h > SENSOR_HEIGHT {
            return Err(Error::Bounds {
                axis: "y",
                value: oy + h,
                bound: SENSOR_HEIGHT,
            });
        }
        Ok(())
    }

    /// `(x, y, width, height)` of the sensor area read out for one frame.
    pub fn readout_window(&self) -> (usize, usize, usize, usize) {
        let (ox, oy) = self.crop_origin.unwrap_or((0, 0));
        (
            ox,
            oy,
            self.out_width * self.subsample_factor,
            self.out_height * self.subsample_factor,
        )
    }

    /// Dimensions of the image the optical-flow unit works on, and the
    /// scale from optical-flow pixels back to output-image pixels.
    pub fn of_dims(&self) -> ((usize, usize), usize) {
        if self.out_width > OF_MAX_WIDTH {
            let w = aligned(self.out_width, 2) / 2;
            let h = aligned(self.out_height, 2) / 2;
            ((w, h), 2)
        } else {
            ((self.out_width, self.out_height), 1)
        }
    }

    /// Sensor pixels per optical-flow pixel along one axis.
    pub fn total_scale(&self) -> usize {
        self.subsample_factor * self.of_dims().1
    }

    /// Applies crop and sub-sampling. Accepts either a full-sensor frame or
    /// a frame that already covers exactly the readout window.
    pub fn apply(&self, frame: &Frame) -> Result<Frame> {
        let (ox, oy, w, h) = self.readout_window();
        let windowed = if frame.dims() == (w, h) {
            frame.clone()
        } else if frame.dims() == (SENSOR_WIDTH, SENSOR_HEIGHT) {
            crop(frame, (ox, oy), (w, h))?
        } else {
            return Err(Error::Config(format!(
                "frame is {}x{} but the configuration reads a {w}x{h} window of a {SENSOR_WIDTH}x{SENSOR_HEIGHT} sensor",
                frame.width(),
                frame.height()
            )));
        };
        if self.subsample_factor == 1 {
            return Ok(windowed);
        }
        subsample(&windowed, self.subsample_factor, self.subsample_mode)
    }

    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        let mut push = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        push("out_width", self.out_width.to_string());
        push("out_height", self.out_height.to_string());
        if let Some((x, y)) = self.crop_origin {
            push("crop_x", x.to_string());
            push("crop_y", y.to_string());
        }
        push("subsample_factor", self.subsample_factor.to_string());
        push("subsample_mode", self.subsample_mode.to_string());
        push("frame_rate", self.frame_rate.to_string());
        push("brief_target", self.brief_target.to_string());
        push("brief_max", self.brief_max.to_string());
        push("tile_budget", self.tile_budget.to_string());
        push("max_displacement", self.max_displacement.to_string());
        push("ratio_threshold", self.ratio_threshold.to_string());
        out
    }

    /// Parses `key=value` lines. Blank lines and `#` comments are ignored.
    /// Every key except `crop_x`/`crop_y` is required.
    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut b = ConfigBuilder::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Format {
                what: "config",
                detail: format!("line {} has no '='", lineno + 1),
            })?;
            b.set(key.trim(), value.trim())?;
        }
        b.build()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_key_values(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_key_values())?;
        Ok(())
    }
}

/// Accumulates config keys; shared by the file parser and CLI overrides.
#[derive(Clone, Debug, Default)]
pub struct ConfigBuilder {
    out_width: Option<usize>,
    out_height: Option<usize>,
    crop_x: Option<usize>,
    crop_y: Option<usize>,
    subsample_factor: Option<usize>,
    subsample_mode: Option<SubsampleMode>,
    frame_rate: Option<f64>,
    brief_target: Option<u32>,
    brief_max: Option<u32>,
    tile_budget: Option<u8>,
    max_displacement: Option<u32>,
    ratio_threshold: Option<f64>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Format {
        what: "config",
        detail: format!("cannot parse {key}={value}"),
    })
}

impl ConfigBuilder {
    pub fn from_config(c: &SensorConfig) -> Self {
        Self {
            out_width: Some(c.out_width),
            out_height: Some(c.out_height),
            crop_x: c.crop_origin.map(|o| o.0),
            crop_y: c.crop_origin.map(|o| o.1),
            subsample_factor: Some(c.subsample_factor),
            subsample_mode: Some(c.subsample_mode),
            frame_rate: Some(c.frame_rate),
            brief_target: Some(c.brief_target),
            brief_max: Some(c.brief_max),
            tile_budget: Some(c.tile_budget),
            max_displacement: Some(c.max_displacement),
            ratio_threshold: Some(c.ratio_threshold),
        }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "out_width" => self.out_width = Some(parse_value(key, value)?),
            "out_height" => self.out_height = Some(parse_value(key, value)?),
            "crop_x" => self.crop_x = Some(parse_value(key, value)?),
            "crop_y" => self.crop_y = Some(parse_value(key, value)?),
            "subsample_factor" => self.subsample_factor = Some(parse_value(key, value)?),
            "subsample_mode" => self.subsample_mode = Some(value.parse()?),
            "frame_rate" => self.frame_rate = Some(parse_value(key, value)?),
            "brief_target" => self.brief_target = Some(parse_value(key, value)?),
            "brief_max" => self.brief_max = Some(parse_value(key, value)?),
            "tile_budget" => self.tile_budget = Some(parse_value(key, value)?),
            "max_displacement" => self.max_displacement = Some(parse_value(key, value)?),
            "ratio_threshold" => self.ratio_threshold = Some(parse_value(key, value)?),
            other => {
                return Err(Error::Format {
                    what: "config",
                    detail: format!("unknown key {other:?}"),
                })
            }
        }
        Ok(())
    }

    pub fn build(self) -> Result<SensorConfig> {
        fn need<T>(v: Option<T>, key: &str) -> Result<T> {
            v.ok_or_else(|| Error::Config(format!("missing key {key}")))
        }
        let crop_origin = match (self.crop_x, self.crop_y) {
            (Some(x), Some(y)) => Some((x, y)),
            (None, None) => None,
            _ => {
                return Err(Error::Config(
                    "crop_x and crop_y must be given together".into(),
                ))
            }
        };
        let config = SensorConfig {
            out_width: need(self.out_width, "out_width")?,
            out_height: need(self.out_height, "out_height")?,
            crop_origin,
            subsample_factor: need(self.subsample_factor, "subsample_factor")?,
            subsample_mode: need(self.subsample_mode, "subsample_mode")?,
            frame_rate: need(self.frame_rate, "frame_rate")?,
            brief_target: need(self.brief_target, "brief_target")?,
            brief_max: need(self.brief_max, "brief_max")?,
            tile_budget: need(self.tile_budget, "tile_budget")?,
            max_displacement: need(self.max_displacement, "max_displacement")?,
            ratio_threshold: need(self.ratio_threshold, "ratio_threshold")?,
        };
        config.validate()?;
        Ok(config)
    }
}

/// Extracts the `size` rectangle whose top-left corner is `origin`.
pub fn crop(frame: &Frame, origin: (usize, usize), size: (usize, usize)) -> Result<Frame> {
    let (ox, oy) = origin;
    let (w, h) = size;
    if w == 0 || h == 0 {
        return Err(Error::Config(format!(
            "crop size must be positive, got {w}x{h}"
        )));
    }
    if ox + w > frame.width() {
        return Err(Error::Bounds {
            axis: "x",
            value: ox + w,
            bound: frame.width(),
        });
    }
    if oy + h > frame.height() {
        return Err(Error::Bounds {
            axis: "y",
            value: oy + h,
            bound: frame.height(),
        });
    }
    let mut pixels = Vec::with_capacity(w * h);
    for y in oy..oy + h {
        pixels.extend_from_slice(&frame.row(y)[ox..ox + w]);
    }
    Ok(Frame::new(w, h, pixels)?.with_index(frame.index, frame.timestamp))
}

/// Largest extent usable for sub-sampling by `factor`: whole 32-pixel
/// readout blocks, or whole factor blocks when the axis is shorter than
/// one readout block.
fn aligned(len: usize, factor: usize) -> usize {
    if len >= READOUT_ALIGN {
        len - len % READOUT_ALIGN
    } else {
        len - len % factor
    }
}

/// Reduces resolution by 2 or 4 after trimming the frame (anchored at the
/// top-left) to the aligned readout area.
pub fn subsample(frame: &Frame, factor: usize, mode: SubsampleMode) -> Result<Frame> {
    if factor != 2 && factor != 4 {
        return Err(Error::Config(format!(
            "subsample factor must be 2 or 4, got {factor}"
        )));
    }
    let out_w = aligned(frame.width(), factor) / factor;
    let out_h = aligned(frame.height(), factor) / factor;
    if out_w == 0 || out_h == 0 {
        return Err(Error::Size {
            width: frame.width(),
            height: frame.height(),
            min: factor,
        });
    }
    let src = frame.pixels();
    let stride = frame.width();
    let mut pixels = Vec::with_capacity(out_w * out_h);
    match mode {
        SubsampleMode::Decimate => {
            for y in 0..out_h {
                let row = &src[y * factor * stride..];
                pixels.extend((0..out_w).map(|x| row[x * factor]));
            }
        }
        SubsampleMode::Bin => {
            let n = (factor * factor) as u32;
            let mut sums = vec![0u32; out_w];
            for y in 0..out_h {
                sums.iter_mut().for_each(|s| *s = 0);
                for row in src[y * factor * stride..].chunks(stride).take(factor) {
                    for (x, sum) in sums.iter_mut().enumerate() {
                        *sum += row[x * factor..x * factor + factor]
                            .iter()
                            .map(|&v| v as u32)
                            .sum::<u32>();
                    }
                }
                // round half up
                pixels.extend(sums.iter().map(|&s| ((2 * s + n) / (2 * n)) as u8));
            }
        }
    }
    Ok(Frame::new(out_w, out_h, pixels)?.with_index(frame.index, frame.timestamp))
}

/// Brings a frame within the optical-flow unit's width bound by one 2x
/// binning step. Returns the frame the flow is computed on and its scale.
pub fn downscale_for_of(frame: &Frame) -> (Frame, usize) {
    if frame.width() > OF_MAX_WIDTH {
        let reduced = subsample(frame, 2, SubsampleMode::Bin).expect("frame wider than 640 px");
        (reduced, 2)
    } else {
        (frame.clone(), 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(w: usize, h: usize) -> Frame {
        Frame::from_fn(w, h, |x, y| ((x * 7 + y * 13) % 256) as u8)
    }

    #[test]
    fn crop_full_sensor_to_parameter_set_window() {
        let frame = Frame::filled(SENSOR_WIDTH, SENSOR_HEIGHT, 3);
        let out = crop(&frame, (280, 336), (560, 672)).unwrap();
        assert_eq!(out.dims(), (560, 672));
    }

    #[test]
    fn identity_crop_and_single_pixel() {
        let frame = ramp(9, 5);
        assert_eq!(crop(&frame, (0, 0), (9, 5)).unwrap(), frame);

        let mut small = Frame::filled(4, 4, 0);
        small.set(2, 3, 77);
        let px = crop(&small, (2, 3), (1, 1)).unwrap();
        assert_eq!(px.pixels(), &[77]);
    }

    #[test]
    fn crop_out_of_bounds_names_axis() {
        let frame = ramp(10, 10);
        match crop(&frame, (5, 0), (6, 2)) {
            Err(Error::Bounds {
                axis: "x",
                value: 11,
                bound: 10,
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match crop(&frame, (0, 9), (2, 2)) {
            Err(Error::Bounds { axis: "y", .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn full_sensor_half_resolution_is_560_by_672() {
        let frame = ramp(SENSOR_WIDTH, SENSOR_HEIGHT);
        for mode in [SubsampleMode::Decimate, SubsampleMode::Bin] {
            assert_eq!(subsample(&frame, 2, mode).unwrap().dims(), (560, 672));
            assert_eq!(subsample(&frame, 4, mode).unwrap().dims(), (280, 336));
        }
    }

    #[test]
    fn two_by_two_block() {
        let frame = Frame::new(2, 2, vec![10, 20, 30, 40]).unwrap();
        assert_eq!(
            subsample(&frame, 2, SubsampleMode::Bin).unwrap().pixels(),
            &[25]
        );
        assert_eq!(
            subsample(&frame, 2, SubsampleMode::Decimate)
                .unwrap()
                .pixels(),
            &[10]
        );
    }

    #[test]
    fn bin_rounds_half_up() {
        let frame = Frame::new(2, 2, vec![0, 1, 0, 1]).unwrap();
        assert_eq!(
            subsample(&frame, 2, SubsampleMode::Bin).unwrap().pixels(),
            &[1]
        );
        let frame = Frame::new(2, 2, vec![0, 0, 0, 1]).unwrap();
        assert_eq!(
            subsample(&frame, 2, SubsampleMode::Bin).unwrap().pixels(),
            &[0]
        );
    }

    #[test]
    fn constant_frame_is_fixed_point() {
        let frame = Frame::filled(100, 70, 91);
        for factor in [2, 4] {
            for mode in [SubsampleMode::Decimate, SubsampleMode::Bin] {
                let out = subsample(&frame, factor, mode).unwrap();
                assert!(out.pixels().iter().all(|&v| v == 91));
            }
        }
    }

    #[test]
    fn bad_factor_is_config_error() {
        assert!(matches!(
            subsample(&ramp(8, 8), 3, SubsampleMode::Bin),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn downscale_examples() {
        let (out, scale) = downscale_for_of(&ramp(SENSOR_WIDTH, SENSOR_HEIGHT));
        assert_eq!((out.dims(), scale), ((560, 672), 2));
        let (out, scale) = downscale_for_of(&ramp(640, 480));
        assert_eq!((out.dims(), scale), ((640, 480), 1));
        let (out, scale) = downscale_for_of(&ramp(280, 336));
        assert_eq!((out.dims(), scale), ((280, 336), 1));
    }

    #[test]
    fn of_dims_matches_downscale() {
        let cfg = crate::params::parameter_set(1).unwrap().config;
        let frame = ramp(SENSOR_WIDTH, SENSOR_HEIGHT);
        let out = cfg.apply(&frame).unwrap();
        let (of, scale) = downscale_for_of(&out);
        assert_eq!(cfg.of_dims(), (of.dims(), scale));
    }

    #[test]
    fn apply_accepts_sensor_or_window_frames() {
        let cfg = crate::params::parameter_set(4).unwrap().config;
        let full = ramp(SENSOR_WIDTH, SENSOR_HEIGHT);
        let via_full = cfg.apply(&full).unwrap();
        let window = crop(&full, (280, 336), (560, 672)).unwrap();
        assert_eq!(cfg.apply(&window).unwrap(), via_full);
        assert!(cfg.apply(&ramp(100, 100)).is_err());
    }

    #[test]
    fn config_text_rejects_invalid_values() {
        let mut cfg = crate::params::parameter_set(6).unwrap().config;
        cfg.tile_budget = 9;
        assert!(SensorConfig::from_key_values(&cfg.to_key_values()).is_err());
        assert!(SensorConfig::from_key_values("out_width=5\nbogus=1\n").is_err());
        let mut cfg = crate::params::parameter_set(6).unwrap().config;
        cfg.crop_origin = Some((1000, 0));
        assert!(matches!(
            cfg.validate(),
            Err(Error::Bounds { axis: "x", .. })
        ));
    }
}
