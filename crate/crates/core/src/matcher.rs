//! Displacement-gated Hamming matching and ratio suppression.

use std::collections::HashMap;

use crate::features::{Descriptor, Feature};

/// Score reported as second-best when a feature has a single candidate.
pub const NO_COMPETITOR: u16 = 256;

/// One optical-flow vector: previous position, displacement and the best
/// and second-best Hamming scores.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FlowVector {
    pub x_prev: u32,
    pub y_prev: u32,
    pub dx: i32,
    pub dy: i32,
    pub best_score: u16,
    pub second_score: u16,
}

impl FlowVector {
    pub fn end(&self) -> (i64, i64) {
        (
            self.x_prev as i64 + self.dx as i64,
            self.y_prev as i64 + self.dy as i64,
        )
    }
}

#[inline]
pub fn hamming(a: &Descriptor, b: &Descriptor) -> u32 {
    a.hamming(b)
}

#[inline]
fn chebyshev(a: &Feature, b: &Feature) -> u32 {
    a.x.abs_diff(b.x).max(a.y.abs_diff(b.y))
}

/// Candidate rank: Hamming score, then displacement, then row-major
/// position, then input index (only matters for coincident features).
type Rank = (u32, u32, u32, u32, usize);

fn rank(prev: &Feature, cand: &Feature, index: usize) -> Rank {
    (
        prev.descriptor.hamming(&cand.descriptor),
        chebyshev(prev, cand),
        cand.y,
        cand.x,
        index,
    )
}

fn make_vector(
    prev: &Feature,
    best: &Feature,
    best_score: u32,
    second_score: Option<u32>,
) -> FlowVector {
    FlowVector {
        x_prev: prev.x,
        y_prev: prev.y,
        dx: best.x as i32 - prev.x as i32,
        dy: best.y as i32 - prev.y as i32,
        best_score: best_score as u16,
        second_score: second_score.map_or(NO_COMPETITOR, |s| s as u16),
    }
}

/// Previous-frame indices in row-major order (stable for duplicates).
fn prev_order(prev: &[Feature]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..prev.len()).collect();
    order.sort_by_key(|&i| (prev[i].y, prev[i].x));
    order
}

/// Matches every previous feature against current features within the
/// square window `max_displacement`. Not injective: several previous
/// features may pick the same current feature. Output follows the
/// previous features' row-major order.
pub fn match_features(
    prev: &[Feature],
    curr: &[Feature],
    max_displacement: u32,
) -> Vec<FlowVector> {
    if prev.is_empty() || curr.is_empty() {
        return Vec::new();
    }
    // bucket current features on a grid with cell side = gate + 1, so every
    // candidate lies in the 3×3 block of cells around the query
    let cell = max_displacement.saturating_add(1);
    let mut grid: HashMap<(u32, u32), Vec<usize>> = HashMap::new();
    for (i, f) in curr.iter().enumerate() {
        grid.entry((f.x / cell, f.y / cell)).or_default().push(i);
    }

    let mut out = Vec::with_capacity(prev.len());
    for pi in prev_order(prev) {
        let p = &prev[pi];
        let (cx, cy) = (p.x / cell, p.y / cell);
        let mut best: Option<(Rank, usize)> = None;
        let mut second: Option<u32> = None;
        for gy in cy.saturating_sub(1)..=cy.saturating_add(1) {
            for gx in cx.saturating_sub(1)..=cx.saturating_add(1) {
                let Some(bucket) = grid.get(&(gx, gy)) else {
                    continue;
                };
                for &ci in bucket {
                    let c = &curr[ci];
                    if chebyshev(p, c) > max_displacement {
                        continue;
                    }
                    let r = rank(p, c, ci);
                    match best {
                        None => best = Some((r, ci)),
                        Some((br, _)) if r < br => {
                            second = Some(second.map_or(br.0, |s| s.min(br.0)));
                            best = Some((r, ci));
                        }
                        Some(_) => second = Some(second.map_or(r.0, |s| s.min(r.0))),
                    }
                }
            }
        }
        if let Some((r, ci)) = best {
            out.push(make_vector(p, &curr[ci], r.0, second));
        }
    }
    out
}

/// Exhaustive reference matcher over all pairs; same gate and tie-breaks.
pub fn match_features_brute_force(
    prev: &[Feature],
    curr: &[Feature],
    max_displacement: u32,
) -> Vec<FlowVector> {
    let mut out = Vec::new();
    for pi in prev_order(prev) {
        let p = &prev[pi];
        let mut candidates: Vec<(Rank, usize)> = curr
            .iter()
            .enumerate()
            .filter(|(_, c)| chebyshev(p, c) <= max_displacement)
            .map(|(ci, c)| (rank(p, c, ci), ci))
            .collect();
        candidates.sort();
        if let Some(&(r, ci)) = candidates.first() {
            let second = candidates.get(1).map(|(r2, _)| r2.0);
            out.push(make_vector(p, &curr[ci], r.0, second));
        }
    }
    out
}

/// Keeps vectors whose best score is below `ratio_threshold` times the
/// second-best score. A zero best score is always kept.
pub fn ratio_filter(vectors: &[FlowVector], ratio_threshold: f64) -> Vec<FlowVector> {
    vectors
        .iter()
        .filter(|v| {
            v.best_score == 0 || (v.best_score as f64) < ratio_threshold * v.second_score as f64
        })
        .copied()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn feature(x: u32, y: u32, descriptor: Descriptor) -> Feature {
        Feature {
            x,
            y,
            score: 1,
            orientation: 0.0,
            descriptor,
        }
    }

    fn vector(best: u16, second: u16) -> FlowVector {
        FlowVector {
            x_prev: 0,
            y_prev: 0,
            dx: 0,
            dy: 0,
            best_score: best,
            second_score: second,
        }
    }

    #[test]
    fn self_match_is_zero_displacement() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let feats: Vec<Feature> = (0..20)
            .map(|i| feature(20 + i * 7, 30 + (i % 3) * 11, Descriptor(rng.random())))
            .collect();
        for gate in [0, 1, 8] {
            let v = match_features(&feats, &feats, gate);
            assert_eq!(v.len(), feats.len());
            assert!(v
                .iter()
                .all(|v| v.dx == 0 && v.dy == 0 && v.best_score == 0));
        }
    }

    #[test]
    fn empty_previous_frame() {
        let f = vec![feature(5, 5, Descriptor::default())];
        assert!(match_features(&[], &f, 4).is_empty());
    }

    #[test]
    fn rigid_translation_recovered() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let prev: Vec<Feature> = (0..12)
            .map(|i| {
                feature(
                    40 + (i % 4) * 25,
                    40 + (i / 4) * 25,
                    Descriptor(rng.random()),
                )
            })
            .collect();
        let curr: Vec<Feature> = prev
            .iter()
            .map(|f| feature(f.x + 3, f.y - 2, f.descriptor))
            .collect();
        let got = match_features(&prev, &curr, 8);
        assert_eq!(got.len(), 12);
        assert!(got
            .iter()
            .all(|v| (v.dx, v.dy) == (3, -2) && v.best_score == 0));
        assert_eq!(got, match_features_brute_force(&prev, &curr, 8));
    }

    #[test]
    fn single_candidate_has_no_competitor() {
        let prev = vec![feature(10, 10, Descriptor([1, 0, 0, 0]))];
        let curr = vec![
            feature(12, 10, Descriptor([3, 0, 0, 0])),
            feature(40, 10, Descriptor::default()),
        ];
        let v = match_features(&prev, &curr, 4);
        assert_eq!(
            v,
            vec![FlowVector {
                x_prev: 10,
                y_prev: 10,
                dx: 2,
                dy: 0,
                best_score: 1,
                second_score: 256
            }]
        );
    }

    #[test]
    fn ties_prefer_smaller_displacement() {
        let d = Descriptor([5, 5, 5, 5]);
        let prev = vec![feature(20, 20, d)];
        let curr = vec![feature(17, 20, d), feature(21, 21, d), feature(23, 20, d)];
        let v = match_features(&prev, &curr, 4);
        assert_eq!((v[0].dx, v[0].dy, v[0].second_score), (1, 1, 0));
    }

    #[test]
    fn ratio_filter_examples() {
        assert!(ratio_filter(&[vector(100, 100)], 0.8).is_empty());
        assert_eq!(ratio_filter(&[vector(0, 0)], 0.8).len(), 1);
        assert_eq!(ratio_filter(&[vector(40, 100)], 0.8).len(), 1);
        assert!(ratio_filter(&[vector(90, 100)], 0.8).is_empty());
        assert_eq!(ratio_filter(&[vector(12, 256)], 0.5).len(), 1);
    }

    fn arb_features(max: usize) -> impl Strategy<Value = Vec<Feature>> {
        prop::collection::btree_set((0u32..80, 0u32..80), 0..=max).prop_flat_map(|pts| {
            let n = pts.len();
            (Just(pts), prop::collection::vec(any::<[u64; 4]>(), n)).prop_map(|(pts, ds)| {
                pts.into_iter()
                    .zip(ds)
                    .map(|((x, y), d)| feature(x, y, Descriptor(d)))
                    .collect()
            })
        })
    }

    proptest! {
        #[test]
        fn larger_gate_never_loses_vectors(prev in arb_features(32), curr in arb_features(32), gate in 0u32..20, extra in 0u32..20) {
            let small = match_features(&prev, &curr, gate);
            let large = match_features(&prev, &curr, gate + extra);
            prop_assert!(small.len() <= large.len());
            prop_assert!(large.len() <= prev.len());
        }

        #[test]
        fn permutation_invariant(prev in arb_features(24), curr in arb_features(24), gate in 0u32..16, seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let (mut p2, mut c2) = (prev.clone(), curr.clone());
            p2.shuffle(&mut rng);
            c2.shuffle(&mut rng);
            prop_assert_eq!(match_features(&prev, &curr, gate), match_features(&p2, &c2, gate));
        }

        #[test]
        fn ratio_filter_is_subsequence(scores in prop::collection::vec((0u16..=256, 0u16..=256), 0..50)) {
            let vs: Vec<FlowVector> = scores.iter().map(|&(a, b)| vector(a.min(b), a.max(b))).collect();
            let kept = ratio_filter(&vs, 1.0);
            let mut it = vs.iter();
            for k in &kept {
                prop_assert!(it.any(|v| v == k));
            }
            let removed: Vec<&FlowVector> = vs.iter().filter(|v| v.best_score == v.second_score && v.best_score > 0).collect();
            prop_assert_eq!(kept.len() + removed.len(), vs.len());
        }
    }
}
