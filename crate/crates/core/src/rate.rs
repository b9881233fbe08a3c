//! Frame-rate ceiling of the physical sensor in the 10-bit ADC mode.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RateTablePoint {
    pub frame_height: u32,
    pub n_vectors: u32,
    pub max_fps: u32,
}

const fn point(frame_height: u32, n_vectors: u32, max_fps: u32) -> RateTablePoint {
    RateTablePoint {
        frame_height,
        n_vectors,
        max_fps,
    }
}

/// Measured achievable frame rates (QVGA, VGA and full-resolution rows).
pub const RATE_TABLE: [RateTablePoint; 8] = [
    point(240, 1024, 338),
    point(240, 2048, 288),
    point(480, 0, 229),
    point(480, 1024, 205),
    point(480, 2048, 186),
    point(1364, 0, 88),
    point(1364, 1024, 84),
    point(1364, 2048, 80),
];

const HEIGHTS: [u32; 3] = [240, 480, 1364];

/// Exact table lookup.
pub fn table_rate(frame_height: u32, n_vectors: u32) -> Option<u32> {
    RATE_TABLE
        .iter()
        .find(|p| p.frame_height == frame_height && p.n_vectors == n_vectors)
        .map(|p| p.max_fps)
}

/// Piecewise-linear interpolation along the vector axis of one table height,
/// clamped to the vector counts measured at that height.
fn rate_at_height(height: u32, n_vectors: f64) -> f64 {
    let row: Vec<(f64, f64)> = RATE_TABLE
        .iter()
        .filter(|p| p.frame_height == height)
        .map(|p| (p.n_vectors as f64, p.max_fps as f64))
        .collect();
    interpolate(&row, n_vectors)
}

fn interpolate(points: &[(f64, f64)], x: f64) -> f64 {
    let (first, last) = (points[0], points[points.len() - 1]);
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    for pair in points.windows(2) {
        let ((x0, y0), (x1, y1)) = (pair[0], pair[1]);
        if x <= x1 {
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        }
    }
    last.1
}

/// Maximum frame rate for a frame height and vector count, rounded to one
/// decimal. Exact on the table grid, bilinear between grid rows.
pub fn max_frame_rate(frame_height: u32, n_vectors: u32) -> Result<f64> {
    if !(240..=1364).contains(&frame_height) {
        return Err(Error::Range {
            what: "frame_height",
            value: frame_height as f64,
            min: 240.0,
            max: 1364.0,
        });
    }
    if n_vectors > 2048 {
        return Err(Error::Range {
            what: "n_vectors",
            value: n_vectors as f64,
            min: 0.0,
            max: 2048.0,
        });
    }
    if let Some(exact) = table_rate(frame_height, n_vectors) {
        return Ok(exact as f64);
    }
    let column: Vec<(f64, f64)> = HEIGHTS
        .iter()
        .map(|&h| (h as f64, rate_at_height(h, n_vectors as f64)))
        .collect();
    let fps = interpolate(&column, frame_height as f64);
    Ok((fps * 10.0).round() / 10.0)
}

/// Hardware reference for a configuration, shown only when the frame height
/// is a measured table row. The vector count is the descriptor target
/// floored onto the table's vector grid.
pub fn hardware_reference(frame_height: u32, brief_target: u32) -> Option<u32> {
    let n_vectors = (brief_target.min(2048) / 1024) * 1024;
    table_rate(frame_height, n_vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rows_are_exact() {
        assert_eq!(max_frame_rate(240, 1024).unwrap(), 338.0);
        assert_eq!(max_frame_rate(480, 0).unwrap(), 229.0);
        assert_eq!(max_frame_rate(1364, 2048).unwrap(), 80.0);
    }

    #[test]
    fn interpolates_between_rows() {
        // halfway between VGA rows at 0 and 1024 vectors
        assert_eq!(max_frame_rate(480, 512).unwrap(), 217.0);
        // QVGA has no 0-vector row; clamps to its 1024-vector value
        assert_eq!(max_frame_rate(240, 0).unwrap(), 338.0);
        // one third of the way from 240 to 480 at 1024 vectors
        assert_eq!(max_frame_rate(320, 1024).unwrap(), 293.7);
    }

    #[test]
    fn out_of_range_inputs() {
        assert!(matches!(max_frame_rate(100, 0), Err(Error::Range { .. })));
        assert!(matches!(
            max_frame_rate(480, 4096),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn monotone_over_grid() {
        let heights = [240, 300, 480, 672, 1000, 1364];
        let vectors = [0, 512, 1024, 1536, 2048];
        for &h in &heights {
            for pair in vectors.windows(2) {
                assert!(max_frame_rate(h, pair[1]).unwrap() <= max_frame_rate(h, pair[0]).unwrap());
            }
        }
        for &v in &vectors {
            for pair in heights.windows(2) {
                assert!(max_frame_rate(pair[1], v).unwrap() <= max_frame_rate(pair[0], v).unwrap());
            }
        }
    }

    #[test]
    fn hardware_reference_only_on_rows() {
        assert_eq!(hardware_reference(1364, 1536), Some(84));
        assert_eq!(hardware_reference(480, 1024), Some(205));
        assert_eq!(hardware_reference(672, 768), None);
        assert_eq!(hardware_reference(336, 384), None);
    }
}
