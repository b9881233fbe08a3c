//! Monochrome 8-bit frames and binary PGM I/O.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Full sensor width in pixels (portrait orientation).
pub const SENSOR_WIDTH: usize = 1124;
/// Full sensor height in pixels.
pub const SENSOR_HEIGHT: usize = 1364;

/// A row-major 8-bit monochrome raster.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
    pub index: u64,
    /// Capture time in seconds.
    pub timestamp: f64,
}

impl Frame {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Config(format!(
                "frame dimensions must be positive, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::Config(format!(
                "pixel buffer holds {} values, expected {}",
                pixels.len(),
                width * height
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
            index: 0,
            timestamp: 0.0,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self::new(width, height, vec![value; width * height]).expect("positive dimensions")
    }

    /// Builds a frame by evaluating `f(x, y)` for every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels).expect("positive dimensions")
    }

    pub fn with_index(mut self, index: u64, timestamp: f64) -> Self {
        self.index = index;
        self.timestamp = timestamp;
        self
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        self.pixels[y * self.width + x] = value;
    }

    pub fn row(&self, y: usize) -> &[u8] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }

    /// True when the frame fits the physical pixel array.
    pub fn is_sensor_native(&self) -> bool {
        self.width <= SENSOR_WIDTH && self.height <= SENSOR_HEIGHT
    }

    pub fn read_pgm(path: impl AsRef<Path>) -> Result<Self> {
        let bytes = fs::read(path)?;
        Self::decode_pgm(&bytes)
    }

    pub fn write_pgm(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut file = fs::File::create(path)?;
        file.write_all(&self.encode_pgm())?;
        Ok(())
    }

    pub fn encode_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    /// Parses a binary (P5) PGM with maxval 255.
    pub fn decode_pgm(bytes: &[u8]) -> Result<Self> {
        let bad = |detail: &str| Error::Format {
            what: "PGM",
            detail: detail.to_string(),
        };
        let mut pos = 0;
        let mut fields = Vec::with_capacity(4);
        while fields.len() < 4 {
            // skip whitespace and comments
            while pos < bytes.len() {
                match bytes[pos] {
                    b'#' => {
                        while pos < bytes.len() && bytes[pos] != b'\n' {
                            pos += 1;
                        }
                    }
                    b if b.is_ascii_whitespace() => pos += 1,
                    _ => break,
                }
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(bad("truncated header"));
            }
            fields.push(
                std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("non-ASCII header"))?,
            );
        }
        if fields[0] != "P5" {
            return Err(bad("missing P5 magic"));
        }
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| bad("non-numeric header field"))
        };
        let width = parse(fields[1])?;
        let height = parse(fields[2])?;
        if parse(fields[3])? != 255 {
            return Err(bad("only maxval 255 is supported"));
        }
        // exactly one whitespace byte separates the header from the raster
        pos += 1;
        let end = pos + width * height;
        if end > bytes.len() {
            return Err(bad("raster shorter than header dimensions"));
        }
        Self::new(width, height, bytes[pos..end].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_round_trip_preserves_pixels() {
        let frame = Frame::from_fn(7, 3, |x, y| (x * 31 + y * 7) as u8);
        let decoded = Frame::decode_pgm(&frame.encode_pgm()).unwrap();
        assert_eq!(decoded.dims(), (7, 3));
        assert_eq!(decoded.pixels(), frame.pixels());
    }

    #[test]
    fn pgm_header_comments_are_skipped() {
        let mut bytes = b"P5\n# made by hand\n2 1\n255\n".to_vec();
        bytes.extend_from_slice(&[10, 200]);
        let frame = Frame::decode_pgm(&bytes).unwrap();
        assert_eq!(frame.pixels(), &[10, 200]);
    }

    #[test]
    fn rejects_wrong_buffer_length_and_bad_magic() {
        assert!(Frame::new(2, 2, vec![0; 3]).is_err());
        assert!(Frame::decode_pgm(b"P2\n1 1\n255\n0").is_err());
        assert!(Frame::decode_pgm(b"P5\n4 4\n255\n\x00").is_err());
    }

    #[test]
    fn sensor_native_bound() {
        assert!(Frame::filled(SENSOR_WIDTH, SENSOR_HEIGHT, 0).is_sensor_native());
        assert!(!Frame::filled(SENSOR_WIDTH + 1, 8, 0).is_sensor_native());
    }
}
