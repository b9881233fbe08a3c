//! Procedural textures and planar motion sequences with analytic flow.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frame::Frame;

pub const MIN_TEXTURE: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TextureKind {
    /// Overlapping axis-aligned rectangles: strong, distinct corners.
    Blocks,
    /// Band-limited noise: weak, repetitive structure.
    Foliage,
    /// Sector-and-ring wheel around the texture centre.
    Wheel,
    /// Uniform white noise.
    Noise,
}

impl fmt::Display for TextureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TextureKind::Blocks => "blocks",
            TextureKind::Foliage => "foliage",
            TextureKind::Wheel => "wheel",
            TextureKind::Noise => "noise",
        })
    }
}

impl FromStr for TextureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "blocks" => Ok(TextureKind::Blocks),
            "foliage" => Ok(TextureKind::Foliage),
            "wheel" => Ok(TextureKind::Wheel),
            "noise" => Ok(TextureKind::Noise),
            other => Err(Error::Config(format!("unknown texture kind {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TextureSpec {
    pub kind: TextureKind,
    pub seed: u64,
    pub size: (usize, usize),
}

/// Number of wheel sectors; the intensity pattern repeats every quarter turn.
pub const WHEEL_SECTORS: usize = 72;
/// Radial width of one wheel ring in pixels.
pub const WHEEL_RING_WIDTH: f64 = 8.0;

/// Per-frame motion of the scene relative to the camera, in viewport pixels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MotionSpec {
    Still,
    /// Constant velocity parallel to the image plane.
    Translate {
        vx: f64,
        vy: f64,
    },
    /// Scale about `center` by `rate` each frame (camera moving along the
    /// optical axis).
    Zoom {
        rate: f64,
        center: (f64, f64),
    },
    /// Rotation about `center` by `omega` radians each frame.
    Rotate {
        omega: f64,
        center: (f64, f64),
    },
}

impl MotionSpec {
    /// Where scene content at `p` in frame 0 appears in frame `t`.
    pub fn forward(&self, p: (f64, f64), t: f64) -> (f64, f64) {
        match *self {
            MotionSpec::Still => p,
            MotionSpec::Translate { vx, vy } => (p.0 + vx * t, p.1 + vy * t),
            MotionSpec::Zoom { rate, center } => {
                let s = rate.powf(t);
                (
                    center.0 + s * (p.0 - center.0),
                    center.1 + s * (p.1 - center.1),
                )
            }
            MotionSpec::Rotate { omega, center } => {
                let (sin, cos) = (omega * t).sin_cos();
                let (dx, dy) = (p.0 - center.0, p.1 - center.1);
                (
                    center.0 + cos * dx - sin * dy,
                    center.1 + sin * dx + cos * dy,
                )
            }
        }
    }

    /// Frame-0 position of content seen at `p` in frame `t`.
    pub fn inverse(&self, p: (f64, f64), t: f64) -> (f64, f64) {
        self.forward(p, -t)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            MotionSpec::Still => "still",
            MotionSpec::Translate { .. } => "translate",
            MotionSpec::Zoom { .. } => "zoom",
            MotionSpec::Rotate { .. } => "rotate",
        }
    }
}

/// Flow from frame `t` to `t + 1` at point `p`. The motions form
/// one-parameter groups, so the result does not depend on `t`.
pub fn ground_truth_flow(motion: &MotionSpec, p: (f64, f64), _t: u64) -> (f64, f64) {
    let q = motion.forward(p, 1.0);
    (q.0 - p.0, q.1 - p.1)
}

/// Mean ground-truth flow over a `width`×`height` grid whose pixel `(u, v)`
/// sits at viewport position `(u·scale + offset, v·scale + offset)`,
/// divided by `scale` to express it in grid pixels.
pub fn mean_ground_truth(
    motion: &MotionSpec,
    width: usize,
    height: usize,
    scale: f64,
    offset: f64,
) -> (f64, f64) {
    if let MotionSpec::Translate { vx, vy } = *motion {
        return (vx / scale, vy / scale);
    }
    if let MotionSpec::Still = motion {
        return (0.0, 0.0);
    }
    let (mut sx, mut sy) = (0.0, 0.0);
    for v in 0..height {
        for u in 0..width {
            let p = (u as f64 * scale + offset, v as f64 * scale + offset);
            let f = ground_truth_flow(motion, p, 0);
            sx += f.0;
            sy += f.1;
        }
    }
    let n = (width * height) as f64 * scale;
    (sx / n, sy / n)
}

pub fn generate_texture(spec: &TextureSpec) -> Result<Frame> {
    let (w, h) = spec.size;
    if w < MIN_TEXTURE || h < MIN_TEXTURE {
        return Err(Error::Size {
            width: w,
            height: h,
            min: MIN_TEXTURE,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok(match spec.kind {
        TextureKind::Blocks => blocks(&mut rng, w, h),
        TextureKind::Foliage => foliage(&mut rng, w, h),
        TextureKind::Wheel => wheel(&mut rng, w, h),
        TextureKind::Noise => Frame::from_fn(w, h, |_, _| rng.random()),
    })
}

/// Intensity range of block rectangles.
pub const BLOCK_INTENSITIES: std::ops::RangeInclusive<u8> = 64..=191;

fn blocks(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Frame {
    let mut frame = Frame::filled(w, h, rng.random_range(BLOCK_INTENSITIES));
    let count = w * h / 110;
    for _ in 0..count {
        let rw = rng.random_range(5..28usize);
        let rh = rng.random_range(5..28usize);
        let x0 = rng.random_range(0..w + rw) as isize - rw as isize;
        let y0 = rng.random_range(0..h + rh) as isize - rh as isize;
        let value = rng.random_range(BLOCK_INTENSITIES);
        let xs = x0.max(0) as usize..((x0 + rw as isize).max(0) as usize).min(w);
        let ys = y0.max(0) as usize..((y0 + rh as isize).max(0) as usize).min(h);
        for y in ys {
            let row = &mut frame.pixels_mut()[y * w..(y + 1) * w];
            row[xs.clone()].fill(value);
        }
    }
    frame
}

/// Separable box blur with edge clamping.
fn box_blur(src: &[f32], w: usize, h: usize, radius: usize) -> Vec<f32> {
    let r = radius as isize;
    let norm = 1.0 / (2 * radius + 1) as f32;
    let mut tmp = vec![0f32; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0.0;
            for k in -r..=r {
                acc += row[(x as isize + k).clamp(0, w as isize - 1) as usize];
            }
            tmp[y * w + x] = acc * norm;
        }
    }
    let mut out = vec![0f32; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for k in -r..=r {
                acc += tmp[(y as isize + k).clamp(0, h as isize - 1) as usize * w + x];
            }
            out[y * w + x] = acc * norm;
        }
    }
    out
}

fn smoothed_noise(rng: &mut ChaCha8Rng, w: usize, h: usize, radius: usize) -> Vec<f32> {
    let mut field: Vec<f32> = (0..w * h).map(|_| rng.random::<f32>()).collect();
    for _ in 0..3 {
        field = box_blur(&field, w, h, radius);
    }
    field
}

fn foliage(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Frame {
    let coarse = smoothed_noise(rng, w, h, 6);
    let fine = smoothed_noise(rng, w, h, 2);
    let mixed: Vec<f32> = coarse.iter().zip(&fine).map(|(c, f)| c + 0.6 * f).collect();
    let (lo, hi) = mixed
        .iter()
        .fold((f32::MAX, f32::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = (hi - lo).max(f32::EPSILON);
    let pixels = mixed
        .iter()
        .map(|&v| ((v - lo) / span * 255.0).round() as u8)
        .collect();
    Frame::new(w, h, pixels).expect("dimensions checked")
}

/// Centre of a wheel texture of the given size.
pub fn wheel_center(w: usize, h: usize) -> (f64, f64) {
    ((w / 2) as f64, (h / 2) as f64)
}

fn wheel(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Frame {
    let (cx, cy) = wheel_center(w, h);
    let period = WHEEL_SECTORS / 4;
    let max_r = (cx.max(w as f64 - cx)).hypot(cy.max(h as f64 - cy));
    let rings = (max_r / WHEEL_RING_WIDTH).ceil() as usize + 1;
    let shades: Vec<u8> = (0..period * rings).map(|_| rng.random()).collect();
    let sector_width = TAU / WHEEL_SECTORS as f64;
    // boundaries sit a quarter sector off the axes and diagonals so that no
    // lattice point lies exactly on one
    let phase = sector_width / 4.0;
    Frame::from_fn(w, h, |x, y| {
        let (dx, dy) = (x as f64 - cx, y as f64 - cy);
        let angle = (dy.atan2(dx) + phase).rem_euclid(TAU);
        let sector = (angle / sector_width) as usize % WHEEL_SECTORS;
        let ring = ((dx * dx + dy * dy).sqrt() / WHEEL_RING_WIDTH) as usize;
        shades[ring * period + sector % period]
    })
}

/// Wheel sector and ring of pixel `(x, y)`; exposed for tests.
pub fn wheel_cell(w: usize, h: usize, x: usize, y: usize) -> (usize, usize) {
    let (cx, cy) = wheel_center(w, h);
    let sector_width = TAU / WHEEL_SECTORS as f64;
    let (dx, dy) = (x as f64 - cx, y as f64 - cy);
    let angle = (dy.atan2(dx) + sector_width / 4.0).rem_euclid(TAU);
    (
        (angle / sector_width) as usize % WHEEL_SECTORS,
        ((dx * dx + dy * dy).sqrt() / WHEEL_RING_WIDTH) as usize,
    )
}

/// Top-left of a viewport centred in a texture.
pub fn viewport_origin(texture: (usize, usize), viewport: (usize, usize)) -> (usize, usize) {
    ((texture.0 - viewport.0) / 2, (texture.1 - viewport.1) / 2)
}

/// Renders frames of a `viewport` centred in the texture under a motion.
pub struct SequenceRenderer<'a> {
    texture: &'a Frame,
    motion: MotionSpec,
    viewport: (usize, usize),
    origin: (f64, f64),
}

impl<'a> SequenceRenderer<'a> {
    pub fn new(texture: &'a Frame, motion: MotionSpec, viewport: (usize, usize)) -> Result<Self> {
        let (w, h) = viewport;
        if w == 0 || h == 0 || w > texture.width() || h > texture.height() {
            return Err(Error::Config(format!(
                "viewport {w}x{h} does not fit texture {}x{}",
                texture.width(),
                texture.height()
            )));
        }
        let (ox, oy) = viewport_origin(texture.dims(), viewport);
        let origin = (ox as f64, oy as f64);
        Ok(Self {
            texture,
            motion,
            viewport,
            origin,
        })
    }

    fn covered(&self, t: f64) -> bool {
        let (w, h) = (self.viewport.0 as f64 - 1.0, self.viewport.1 as f64 - 1.0);
        let (tw, th) = (
            self.texture.width() as f64 - 1.0,
            self.texture.height() as f64 - 1.0,
        );
        [(0.0, 0.0), (w, 0.0), (0.0, h), (w, h)].iter().all(|&p| {
            let q = self.motion.inverse(p, t);
            let (x, y) = (q.0 + self.origin.0, q.1 + self.origin.1);
            (-1e-9..=tw + 1e-9).contains(&x) && (-1e-9..=th + 1e-9).contains(&y)
        })
    }

    /// Frame `t`, sampled bilinearly.
    pub fn render(&self, t: usize) -> Result<Frame> {
        let tf = t as f64;
        if !self.covered(tf) {
            return Err(Error::Coverage { frame: t });
        }
        let (w, h) = self.viewport;
        let tex = self.texture;
        let (tw, th) = (tex.width(), tex.height());
        let src = tex.pixels();
        let sample = |x: f64, y: f64| -> u8 {
            let x = x.clamp(0.0, (tw - 1) as f64);
            let y = y.clamp(0.0, (th - 1) as f64);
            let (x0, y0) = (x.floor() as usize, y.floor() as usize);
            let (fx, fy) = (x - x0 as f64, y - y0 as f64);
            let (x1, y1) = ((x0 + 1).min(tw - 1), (y0 + 1).min(th - 1));
            let a = src[y0 * tw + x0] as f64;
            let b = src[y0 * tw + x1] as f64;
            let c = src[y1 * tw + x0] as f64;
            let d = src[y1 * tw + x1] as f64;
            let top = a + (b - a) * fx;
            let bottom = c + (d - c) * fx;
            (top + (bottom - top) * fy).round() as u8
        };
        let mut pixels = Vec::with_capacity(w * h);
        match self.motion {
            MotionSpec::Still | MotionSpec::Translate { .. } => {
                let (sx, sy) = self.motion.inverse((0.0, 0.0), tf);
                let (ox, oy) = (sx + self.origin.0, sy + self.origin.1);
                if ox.fract() == 0.0 && oy.fract() == 0.0 {
                    let (ox, oy) = (ox as usize, oy as usize);
                    for y in 0..h {
                        let start = (oy + y) * tw + ox;
                        pixels.extend_from_slice(&src[start..start + w]);
                    }
                } else {
                    for y in 0..h {
                        for x in 0..w {
                            pixels.push(sample(ox + x as f64, oy + y as f64));
                        }
                    }
                }
            }
            _ => {
                for y in 0..h {
                    for x in 0..w {
                        let q = self.motion.inverse((x as f64, y as f64), tf);
                        pixels.push(sample(q.0 + self.origin.0, q.1 + self.origin.1));
                    }
                }
            }
        }
        Frame::new(w, h, pixels)
    }
}

/// Renders `n_frames` frames; see [`SequenceRenderer`].
pub fn render_sequence(
    texture: &Frame,
    motion: MotionSpec,
    n_frames: usize,
    viewport: (usize, usize),
) -> Result<Vec<Frame>> {
    let renderer = SequenceRenderer::new(texture, motion, viewport)?;
    (0..n_frames).map(|t| renderer.render(t)).collect()
}
