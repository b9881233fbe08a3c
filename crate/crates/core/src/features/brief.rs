//! Steered 256-bit BRIEF descriptors.
//!
//! Sample pairs come from a fixed table (`data/brief_pairs.txt`) drawn once
//! from an isotropic Gaussian with σ = 31/5 and restricted to the radius-15
//! disc, so every rotated sample stays inside the feature margin. The
//! orientation is quantized to 30 steps of 12° and the table is pre-rotated
//! for each step.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::OnceLock;

use crate::error::Result;
use crate::frame::Frame;

use super::orientation::check_margin;

pub const DESCRIPTOR_BITS: usize = 256;
pub const ORIENTATION_BINS: usize = 30;

const PAIR_TABLE: &str = include_str!("../../data/brief_pairs.txt");

/// 256-bit binary descriptor; bit `i` lives in word `i / 64`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Descriptor(pub [u64; 4]);

impl Descriptor {
    #[inline]
    pub fn hamming(&self, other: &Descriptor) -> u32 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a ^ b).count_ones())
            .sum()
    }

    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        (self.0[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set_bit(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn complement(&self) -> Descriptor {
        Descriptor(self.0.map(|w| !w))
    }
}

impl fmt::Debug for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Descriptor(")?;
        for w in self.0.iter().rev() {
            write!(f, "{w:016x}")?;
        }
        write!(f, ")")
    }
}

/// One sample pair `(px, py, qx, qy)` in patch coordinates.
pub type SamplePair = [i8; 4];

/// Parses the `px py qx qy` text table.
pub fn parse_pair_table(text: &str) -> Result<Vec<SamplePair>> {
    let bad = |detail: String| crate::Error::Format {
        what: "BRIEF pair table",
        detail,
    };
    let mut pairs = Vec::with_capacity(DESCRIPTOR_BITS);
    for (n, line) in text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
    {
        let values: Vec<i8> = line
            .split_whitespace()
            .map(|v| v.parse::<i8>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| bad(format!("line {}: {e}", n + 1)))?;
        let pair: SamplePair = values
            .try_into()
            .map_err(|_| bad(format!("line {} needs 4 values", n + 1)))?;
        if pair.iter().any(|v| !(-15..=15).contains(v)) {
            return Err(bad(format!("line {} leaves the 31x31 patch", n + 1)));
        }
        pairs.push(pair);
    }
    if pairs.len() != DESCRIPTOR_BITS {
        return Err(bad(format!(
            "expected {DESCRIPTOR_BITS} pairs, found {}",
            pairs.len()
        )));
    }
    Ok(pairs)
}

pub fn pair_table() -> &'static [SamplePair] {
    static TABLE: OnceLock<Vec<SamplePair>> = OnceLock::new();
    TABLE.get_or_init(|| parse_pair_table(PAIR_TABLE).expect("shipped pair table is valid"))
}

/// Index of the 12° step nearest to `orientation`.
pub fn orientation_bin(orientation: f64) -> usize {
    let step = TAU / ORIENTATION_BINS as f64;
    ((orientation.rem_euclid(TAU) / step).round() as usize) % ORIENTATION_BINS
}

fn rotate(x: i8, y: i8, angle: f64) -> (i32, i32) {
    let (s, c) = angle.sin_cos();
    let (x, y) = (x as f64, y as f64);
    (
        (c * x - s * y).round() as i32,
        (s * x + c * y).round() as i32,
    )
}

/// Pair table rotated for every orientation step.
fn steered_pairs() -> &'static [[SamplePair; DESCRIPTOR_BITS]] {
    static STEERED: OnceLock<Vec<[SamplePair; DESCRIPTOR_BITS]>> = OnceLock::new();
    STEERED.get_or_init(|| {
        let table = pair_table();
        (0..ORIENTATION_BINS)
            .map(|bin| {
                let angle = bin as f64 * TAU / ORIENTATION_BINS as f64;
                let mut steered = [[0i8; 4]; DESCRIPTOR_BITS];
                for (slot, &[px, py, qx, qy]) in steered.iter_mut().zip(table) {
                    let (ax, ay) = rotate(px, py, angle);
                    let (bx, by) = rotate(qx, qy, angle);
                    *slot = [ax as i8, ay as i8, bx as i8, by as i8];
                }
                steered
            })
            .collect()
    })
}

/// Sample pairs used for orientation bin `bin`.
pub fn steered_pair_table(bin: usize) -> &'static [SamplePair; DESCRIPTOR_BITS] {
    &steered_pairs()[bin % ORIENTATION_BINS]
}

/// Bit `i` is set iff I(p_i) < I(q_i) after steering the pairs by the
/// quantized orientation.
pub fn describe_brief(frame: &Frame, x: u32, y: u32, orientation: f64) -> Result<Descriptor> {
    check_margin(frame, x, y)?;
    let w = frame.width() as isize;
    let px = frame.pixels();
    let center = y as isize * w + x as isize;
    let at = |dx: i8, dy: i8| px[(center + dy as isize * w + dx as isize) as usize];
    let steered = &steered_pairs()[orientation_bin(orientation)];
    let mut d = Descriptor::default();
    for (i, &[ax, ay, bx, by]) in steered.iter().enumerate() {
        if at(ax, ay) < at(bx, by) {
            d.set_bit(i);
        }
    }
    Ok(d)
}
