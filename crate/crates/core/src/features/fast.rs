//! FAST-9/16 segment-test corner detector with 3×3 non-maximum suppression.

use crate::error::{Error, Result};
use crate::frame::Frame;

use super::{Corner, BORDER_MARGIN};

/// Smallest frame the detector accepts.
pub const MIN_FRAME: usize = 32;

/// Required contiguous arc length on the 16-pixel circle.
pub const ARC: usize = 9;

/// Bresenham circle of radius 3, clockwise from 12 o'clock.
pub const CIRCLE: [(i32, i32); 16] = [
    (0, -3),
    (1, -3),
    (2, -2),
    (3, -1),
    (3, 0),
    (3, 1),
    (2, 2),
    (1, 3),
    (0, 3),
    (-1, 3),
    (-2, 2),
    (-3, 1),
    (-3, 0),
    (-3, -1),
    (-2, -2),
    (-1, -3),
];

#[inline]
fn has_arc(mask: u32) -> bool {
    // duplicate so arcs may wrap past index 15
    let m = mask | (mask << 16);
    let mut run = m;
    for s in 1..ARC as u32 {
        run &= m >> s;
    }
    run != 0
}

/// Largest threshold at which the segment test still passes, given the 16
/// circle-minus-center differences. Zero when the test fails at every
/// threshold >= 1.
pub fn corner_score(diffs: &[i16; 16]) -> u8 {
    let mut best = 0i16;
    for start in 0..16 {
        let mut lo = i16::MAX;
        let mut hi = i16::MIN;
        for k in 0..ARC {
            let d = diffs[(start + k) % 16];
            lo = lo.min(d);
            hi = hi.max(d);
        }
        // brighter arc passes for t < lo, darker arc for t < -hi
        best = best.max(lo - 1).max(-hi - 1);
    }
    best.clamp(0, 255) as u8
}

/// Detects FAST corners at `threshold`, keeping only local maxima of the
/// corner score and pixels at least 15 px from every border. Output is in
/// row-major order.
pub fn detect_fast(frame: &Frame, threshold: u8) -> Result<Vec<Corner>> {
    let (w, h) = frame.dims();
    if w < MIN_FRAME || h < MIN_FRAME {
        return Err(Error::Size {
            width: w,
            height: h,
            min: MIN_FRAME,
        });
    }
    if threshold == 0 {
        return Err(Error::Range {
            what: "FAST threshold",
            value: 0.0,
            min: 1.0,
            max: 255.0,
        });
    }
    let px = frame.pixels();
    let offsets: Vec<isize> = CIRCLE
        .iter()
        .map(|&(dx, dy)| dy as isize * w as isize + dx as isize)
        .collect();
    let t = threshold as i16;

    // Scores are needed one pixel beyond the output region so that NMS at
    // the margin sees its full neighbourhood.
    let lo = BORDER_MARGIN - 1;
    let (x_hi, y_hi) = (w - BORDER_MARGIN, h - BORDER_MARGIN);
    let mut scores = vec![0u8; w * h];
    let mut candidates = Vec::new();
    for y in lo..=y_hi {
        for x in lo..=x_hi {
            let i = y * w + x;
            let c = px[i] as i16;
            let at = |k: usize| px[(i as isize + offsets[k]) as usize] as i16;
            // any 9-arc covers at least two of the four compass points
            let (mut bright, mut dark) = (0, 0);
            for k in [0, 4, 8, 12] {
                let v = at(k);
                bright += (v > c + t) as u32;
                dark += (v < c - t) as u32;
            }
            if bright < 2 && dark < 2 {
                continue;
            }
            let mut diffs = [0i16; 16];
            let (mut bmask, mut dmask) = (0u32, 0u32);
            for (k, slot) in diffs.iter_mut().enumerate() {
                let d = at(k) - c;
                *slot = d;
                bmask |= ((d > t) as u32) << k;
                dmask |= ((d < -t) as u32) << k;
            }
            if has_arc(bmask) || has_arc(dmask) {
                scores[i] = corner_score(&diffs);
                candidates.push((x, y));
            }
        }
    }

    let mut corners = Vec::new();
    for (x, y) in candidates {
        if x < BORDER_MARGIN || y < BORDER_MARGIN || x >= x_hi || y >= y_hi {
            continue;
        }
        let i = y * w + x;
        let s = scores[i];
        // strict total order: higher score wins, ties go to the earlier pixel
        let dominated = (-1isize..=1).any(|dy| {
            (-1isize..=1).any(|dx| {
                if dx == 0 && dy == 0 {
                    return false;
                }
                let j = (i as isize + dy * w as isize + dx) as usize;
                scores[j] > s || (scores[j] == s && j < i)
            })
        });
        if !dominated {
            corners.push(Corner {
                x: x as u32,
                y: y as u32,
                score: s,
            });
        }
    }
    Ok(corners)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reference segment test: brute-force check of every arc start.
    fn passes(frame: &Frame, x: usize, y: usize, t: i16) -> bool {
        let c = frame.get(x, y) as i16;
        let ring: Vec<i16> = CIRCLE
            .iter()
            .map(|&(dx, dy)| frame.get((x as i32 + dx) as usize, (y as i32 + dy) as usize) as i16)
            .collect();
        (0..16).any(|s| {
            (0..ARC).all(|k| ring[(s + k) % 16] > c + t)
                || (0..ARC).all(|k| ring[(s + k) % 16] < c - t)
        })
    }

    fn oracle_score(frame: &Frame, x: usize, y: usize) -> u8 {
        (1..=255u16)
            .take_while(|&t| passes(frame, x, y, t as i16))
            .last()
            .unwrap_or(0) as u8
    }

    fn oracle_detect(frame: &Frame, threshold: u8) -> Vec<Corner> {
        let (w, h) = frame.dims();
        let score = |x: usize, y: usize| {
            if x < 3 || y < 3 || x + 3 >= w || y + 3 >= h || !passes(frame, x, y, threshold as i16)
            {
                0
            } else {
                oracle_score(frame, x, y)
            }
        };
        let mut out = Vec::new();
        for y in BORDER_MARGIN..h - BORDER_MARGIN {
            for x in BORDER_MARGIN..w - BORDER_MARGIN {
                let s = score(x, y);
                if s == 0 {
                    continue;
                }
                let mut keep = true;
                for ny in y - 1..=y + 1 {
                    for nx in x - 1..=x + 1 {
                        if (nx, ny) == (x, y) {
                            continue;
                        }
                        let ns = score(nx, ny);
                        if ns > s || (ns == s && (ny, nx) < (y, x)) {
                            keep = false;
                        }
                    }
                }
                if keep {
                    out.push(Corner {
                        x: x as u32,
                        y: y as u32,
                        score: s,
                    });
                }
            }
        }
        out
    }

    fn square_frame() -> Frame {
        Frame::from_fn(64, 64, |x, y| {
            if (17..47).contains(&x) && (17..47).contains(&y) {
                200
            } else {
                40
            }
        })
    }

    #[test]
    fn constant_frame_has_no_corners() {
        let frame = Frame::filled(64, 64, 128);
        for t in [1, 20, 255] {
            assert!(detect_fast(&frame, t).unwrap().is_empty());
        }
    }

    #[test]
    fn bright_square_yields_its_four_corners() {
        let corners = detect_fast(&square_frame(), 20).unwrap();
        assert_eq!(corners.len(), 4, "{corners:?}");
        // equal scores along an edge resolve to the earlier pixel, so a
        // detection may sit up to two pixels from the geometric corner
        let geometric = [(17, 17), (46, 17), (17, 46), (46, 46)];
        for (gx, gy) in geometric {
            assert!(corners
                .iter()
                .any(|c| (c.x as i32 - gx).abs() <= 2 && (c.y as i32 - gy).abs() <= 2));
        }
        assert_eq!(corners, oracle_detect(&square_frame(), 20));
    }

    #[test]
    fn unattainable_threshold() {
        let frame = Frame::from_fn(
            64,
            64,
            |x, y| if (x / 5 + y / 7) % 2 == 0 { 0 } else { 255 },
        );
        assert!(detect_fast(&frame, 255).unwrap().is_empty());
    }

    #[test]
    fn undersized_frame_is_rejected() {
        assert!(matches!(
            detect_fast(&Frame::filled(31, 64, 0), 10),
            Err(Error::Size { .. })
        ));
    }

    #[test]
    fn score_matches_threshold_sweep_on_noise() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let frame = Frame::from_fn(48, 48, |_, _| rng.random());
        for t in [1, 10, 40] {
            assert_eq!(detect_fast(&frame, t).unwrap(), oracle_detect(&frame, t));
        }
    }

    #[test]
    fn count_is_monotone_in_threshold() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let frame = Frame::from_fn(80, 80, |_, _| rng.random_range(60..200));
        let counts: Vec<usize> = (1..=120)
            .step_by(7)
            .map(|t| detect_fast(&frame, t).unwrap().len())
            .collect();
        assert!(counts.windows(2).all(|p| p[1] <= p[0]), "{counts:?}");
    }

    #[test]
    fn translation_equivariance() {
        let base = square_frame();
        let (a, b) = (5usize, 3usize);
        let shifted = Frame::from_fn(64, 64, |x, y| {
            if x >= a && y >= b {
                base.get(x - a, y - b)
            } else {
                40
            }
        });
        let expected: Vec<(u32, u32)> = detect_fast(&base, 20)
            .unwrap()
            .iter()
            .map(|c| (c.x + a as u32, c.y + b as u32))
            .filter(|&(x, y)| x < 64 - BORDER_MARGIN as u32 && y < 64 - BORDER_MARGIN as u32)
            .collect();
        let got: Vec<(u32, u32)> = detect_fast(&shifted, 20)
            .unwrap()
            .iter()
            .map(|c| (c.x, c.y))
            .collect();
        assert_eq!(got, expected);
    }
}
