//! Feature engine: FAST detection under a regulated contrast threshold,
//! per-tile and global descriptor budgets, and oriented BRIEF.

pub mod brief;
pub mod fast;
pub mod orientation;

use crate::error::Result;
use crate::frame::Frame;

pub use brief::{describe_brief, Descriptor};
pub use fast::detect_fast;
pub use orientation::compute_orientation;

/// Features keep this distance from every border so the descriptor patch fits.
pub const BORDER_MARGIN: usize = 15;

/// Side of the square tiles the per-tile budget is enforced on.
pub const TILE_SIZE: u32 = 16;

/// Threshold every run starts from.
pub const INITIAL_THRESHOLD: u8 = 20;

/// A detected corner before description.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Corner {
    pub x: u32,
    pub y: u32,
    pub score: u8,
}

impl Corner {
    /// Row-major sort key.
    #[inline]
    pub fn raster_key(&self) -> (u32, u32) {
        (self.y, self.x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Feature {
    pub x: u32,
    pub y: u32,
    pub score: u8,
    /// Radians in `[0, 2π)`.
    pub orientation: f64,
    pub descriptor: Descriptor,
}

/// Controller state carried from one frame to the next.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DetectorState {
    pub threshold: u8,
    pub brief_target: u32,
    pub brief_max: u32,
    pub tile_budget: u8,
}

impl DetectorState {
    pub fn new(brief_target: u32, brief_max: u32, tile_budget: u8) -> Self {
        Self {
            threshold: INITIAL_THRESHOLD,
            brief_target,
            brief_max,
            tile_budget,
        }
    }

    /// One controller step: scale the threshold by the fourth root of the
    /// produced/target ratio, rounded and clamped to `[1, 255]`.
    pub fn update_threshold(self, produced_count: u32) -> Self {
        let ratio = produced_count.max(1) as f64 / self.brief_target.max(1) as f64;
        let next = (self.threshold as f64 * ratio.powf(0.25)).round();
        Self {
            threshold: next.clamp(1.0, 255.0) as u8,
            ..self
        }
    }
}

/// Keeps at most `tile_budget` corners in every 16×16 tile: highest score
/// first, ties to the earlier row-major position. Output stays row-major.
pub fn enforce_tile_budget(corners: &[Corner], width: usize, tile_budget: u8) -> Vec<Corner> {
    let tiles_x = (width as u32).div_ceil(TILE_SIZE) as usize;
    let tile_of = |c: &Corner| (c.y / TILE_SIZE) as usize * tiles_x + (c.x / TILE_SIZE) as usize;

    let mut order: Vec<usize> = (0..corners.len()).collect();
    order.sort_by(|&a, &b| {
        let (ca, cb) = (&corners[a], &corners[b]);
        tile_of(ca)
            .cmp(&tile_of(cb))
            .then(cb.score.cmp(&ca.score))
            .then(ca.raster_key().cmp(&cb.raster_key()))
    });

    let mut keep = vec![false; corners.len()];
    let mut current = usize::MAX;
    let mut used = 0u8;
    for i in order {
        let tile = tile_of(&corners[i]);
        if tile != current {
            current = tile;
            used = 0;
        }
        if used < tile_budget {
            keep[i] = true;
            used += 1;
        }
    }
    let mut out: Vec<Corner> = corners
        .iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(*c))
        .collect();
    out.sort_by_key(Corner::raster_key);
    out
}

/// Keeps the first `brief_max` corners in top-to-bottom order.
pub fn cap_global(corners: &[Corner], brief_max: u32) -> Vec<Corner> {
    corners.iter().take(brief_max as usize).copied().collect()
}

/// Runs detection, both budgets and description for one frame.
pub fn extract_features(frame: &Frame, state: &DetectorState) -> Result<Vec<Feature>> {
    let corners = select_corners(frame, state)?;
    describe_corners(frame, &corners)
}

/// Detection plus tile budget and global cap.
pub fn select_corners(frame: &Frame, state: &DetectorState) -> Result<Vec<Corner>> {
    let raw = detect_fast(frame, state.threshold)?;
    let budgeted = enforce_tile_budget(&raw, frame.width(), state.tile_budget);
    Ok(cap_global(&budgeted, state.brief_max))
}

pub fn describe_corners(frame: &Frame, corners: &[Corner]) -> Result<Vec<Feature>> {
    corners
        .iter()
        .map(|c| {
            let orientation = compute_orientation(frame, c.x, c.y)?;
            Ok(Feature {
                x: c.x,
                y: c.y,
                score: c.score,
                orientation,
                descriptor: describe_brief(frame, c.x, c.y, orientation)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn corner(x: u32, y: u32, score: u8) -> Corner {
        Corner { x, y, score }
    }

    #[test]
    fn tile_budget_keeps_highest_scores() {
        let corners: Vec<Corner> = (0..9).map(|i| corner(i, i / 2, 10 + i as u8)).collect();
        let kept = enforce_tile_budget(&corners, 64, 8);
        assert_eq!(kept.len(), 8);
        assert!(!kept.contains(&corners[0]));
    }

    #[test]
    fn one_per_tile_is_untouched() {
        let corners: Vec<Corner> = (0..4)
            .flat_map(|ty| (0..4).map(move |tx| corner(tx * 16 + 3, ty * 16 + 5, 7)))
            .collect();
        assert_eq!(enforce_tile_budget(&corners, 64, 2), corners);
    }

    #[test]
    fn equal_scores_break_ties_row_major() {
        let corners = vec![
            corner(1, 1, 9),
            corner(5, 1, 9),
            corner(2, 3, 9),
            corner(0, 7, 9),
            corner(9, 9, 9),
        ];
        let kept = enforce_tile_budget(&corners, 32, 2);
        assert_eq!(kept, vec![corner(1, 1, 9), corner(5, 1, 9)]);
    }

    #[test]
    fn global_cap_drops_bottom_rows() {
        let mut corners: Vec<Corner> = (0..40).map(|x| corner(x * 3, 10, 50)).collect();
        corners.extend((0..40).map(|x| corner(x * 3, 600, 90)));
        let kept = cap_global(&corners, 40);
        assert_eq!(kept.len(), 40);
        assert!(kept.iter().all(|c| c.y == 10));

        let many: Vec<Corner> = (0..2500).map(|i| corner(i % 500, i / 500, 1)).collect();
        assert_eq!(cap_global(&many, 2048), many[..2048].to_vec());
        assert_eq!(cap_global(&many[..100], 512), many[..100].to_vec());
    }

    #[test]
    fn controller_examples() {
        let s = DetectorState::new(500, 600, 4);
        assert_eq!(s.update_threshold(500).threshold, 20);
        assert_eq!(s.update_threshold(16 * 500).threshold, 40);
        let floor = DetectorState { threshold: 1, ..s };
        assert_eq!(floor.update_threshold(0).threshold, 1);
        let ceiling = DetectorState {
            threshold: 250,
            ..s
        };
        assert_eq!(ceiling.update_threshold(2048 * 100).threshold, 255);
    }

    fn arb_corners() -> impl Strategy<Value = Vec<Corner>> {
        prop::collection::btree_set((0u32..96, 0u32..80), 0..120).prop_flat_map(|pts| {
            let n = pts.len();
            (Just(pts), prop::collection::vec(1u8..=255, n)).prop_map(|(pts, scores)| {
                let mut v: Vec<Corner> = pts
                    .into_iter()
                    .zip(scores)
                    .map(|((x, y), s)| corner(x, y, s))
                    .collect();
                v.sort_by_key(Corner::raster_key);
                v
            })
        })
    }

    proptest! {
        #[test]
        fn tile_budget_respects_every_tile(corners in arb_corners(), budget in 2u8..=8) {
            let kept = enforce_tile_budget(&corners, 96, budget);
            let mut per_tile = std::collections::HashMap::new();
            for c in &kept {
                *per_tile.entry((c.x / 16, c.y / 16)).or_insert(0u32) += 1;
            }
            prop_assert!(per_tile.values().all(|&n| n <= budget as u32));
            prop_assert!(kept.windows(2).all(|p| p[0].raster_key() < p[1].raster_key()));
            prop_assert!(kept.iter().all(|c| corners.contains(c)));
            // every dropped corner is outranked by `budget` kept ones in its tile
            for c in corners.iter().filter(|c| !kept.contains(c)) {
                let better = kept
                    .iter()
                    .filter(|k| (k.x / 16, k.y / 16) == (c.x / 16, c.y / 16))
                    .filter(|k| (k.score, std::cmp::Reverse(k.raster_key())) > (c.score, std::cmp::Reverse(c.raster_key())))
                    .count();
                prop_assert_eq!(better, budget as usize);
            }
        }

        #[test]
        fn threshold_stays_clamped(threshold in 1u8..=255, produced in 0u32..100_000, target in 1u32..2048) {
            let s = DetectorState { threshold, brief_target: target, brief_max: 2048, tile_budget: 4 };
            let t = s.update_threshold(produced).threshold;
            prop_assert!((1..=255).contains(&t));
            if produced > target { prop_assert!(t >= threshold); }
            if produced < target { prop_assert!(t <= threshold); }
        }
    }
}
