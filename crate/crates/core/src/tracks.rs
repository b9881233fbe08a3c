//! Track linking, re-detection and flow accuracy against ground truth.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::matcher::FlowVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrackPoint {
    pub frame: u64,
    pub x: i64,
    pub y: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Track {
    pub id: u64,
    pub points: Vec<TrackPoint>,
    /// Inclusive frame ranges bridged by re-detection.
    pub gaps: Vec<(u64, u64)>,
}

impl Track {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> TrackPoint {
        self.points[0]
    }

    pub fn last(&self) -> TrackPoint {
        self.points[self.points.len() - 1]
    }
}

/// Chains per-frame vectors into tracks. `per_frame[t]` holds the vectors
/// from frame `t - 1` to frame `t`; entry 0 is ignored by convention of the
/// pipeline (it is always empty) but is linked like any other if present.
///
/// A vector extends the track whose last point is exactly its start; when
/// several tracks end at that point the oldest one is extended.
pub fn link_tracks(per_frame: &[Vec<FlowVector>]) -> Vec<Track> {
    let mut tracks: Vec<Track> = Vec::new();
    // track ids whose last point is (x, y) at the previous frame
    let mut open: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (t, vectors) in per_frame.iter().enumerate() {
        let t = t as u64;
        let mut next_open: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for v in vectors {
            let start = (v.x_prev as i64, v.y_prev as i64);
            let (ex, ey) = v.end();
            let end = TrackPoint {
                frame: t,
                x: ex,
                y: ey,
            };
            let extended = open
                .get_mut(&start)
                .and_then(|ids| (!ids.is_empty()).then(|| ids.remove(0)));
            let idx = match extended {
                Some(idx) => {
                    tracks[idx].points.push(end);
                    idx
                }
                None => {
                    tracks.push(Track {
                        id: tracks.len() as u64,
                        points: vec![
                            TrackPoint {
                                frame: t.saturating_sub(1),
                                x: start.0,
                                y: start.1,
                            },
                            end,
                        ],
                        gaps: Vec::new(),
                    });
                    tracks.len() - 1
                }
            };
            next_open.entry((ex, ey)).or_default().push(idx);
        }
        for ids in next_open.values_mut() {
            ids.sort_unstable();
        }
        open = next_open;
    }
    tracks
}

/// Merges a track that ends at frame `t` with one that starts at frame
/// `t'` when `1 < t' - t <= max_gap + 1` and the endpoints are within
/// `radius` (Chebyshev). Greedy in ascending end frame; each ending track
/// takes the nearest eligible start. Returns the merged tracks (ordered by
/// id) and the number of merges performed.
pub fn redetect(tracks: &[Track], max_gap: u64, radius: i64) -> (Vec<Track>, usize) {
    let mut slots: Vec<Option<Track>> = tracks.iter().cloned().map(Some).collect();
    let mut absorbed = vec![false; tracks.len()];
    let mut queue: BinaryHeap<Reverse<(u64, usize)>> = slots
        .iter()
        .enumerate()
        .filter_map(|(i, t)| {
            t.as_ref()
                .filter(|t| !t.is_empty())
                .map(|t| Reverse((t.last().frame, i)))
        })
        .collect();
    let mut starts: HashMap<u64, Vec<usize>> = HashMap::new();
    for (j, t) in tracks.iter().enumerate().filter(|(_, t)| !t.is_empty()) {
        starts.entry(t.first().frame).or_default().push(j);
    }
    let mut merges = 0;
    while let Some(Reverse((end_frame, i))) = queue.pop() {
        let Some(track) = slots[i].as_ref() else {
            continue;
        };
        if track.last().frame != end_frame {
            continue;
        }
        let tail = track.last();
        let mut best: Option<(i64, u64, usize)> = None;
        for frame in tail.frame + 2..=tail.frame + max_gap + 1 {
            for &j in starts.get(&frame).into_iter().flatten() {
                if j == i || absorbed[j] {
                    continue;
                }
                let head = tracks[j].first();
                let dist = (head.x - tail.x).abs().max((head.y - tail.y).abs());
                if dist > radius {
                    continue;
                }
                let key = (dist, head.frame, j);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
        }
        if let Some((_, _, j)) = best {
            let other = slots[j].take().expect("candidate present");
            absorbed[j] = true;
            let track = slots[i].as_mut().expect("track present");
            track.gaps.push((tail.frame + 1, other.first().frame - 1));
            track.gaps.extend(other.gaps);
            track.points.extend(other.points);
            queue.push(Reverse((track.last().frame, i)));
            merges += 1;
        }
    }
    let mut out: Vec<Track> = slots.into_iter().flatten().collect();
    out.sort_by_key(|t| t.id);
    (out, merges)
}

/// Per-frame mean of `(dx, dy)`; `None` when there are no vectors.
pub fn mean_flow(vectors: &[FlowVector]) -> Option<(f64, f64)> {
    if vectors.is_empty() {
        return None;
    }
    let n = vectors.len() as f64;
    let (sx, sy) = vectors.iter().fold((0i64, 0i64), |(sx, sy), v| {
        (sx + v.dx as i64, sy + v.dy as i64)
    });
    Some((sx as f64 / n, sy as f64 / n))
}

/// Cumulative Euclidean length of the per-frame mean flow. Frames without
/// data add nothing.
pub fn traveled_distance(mean_flows: &[Option<(f64, f64)>]) -> Vec<f64> {
    mean_flows
        .iter()
        .scan(0.0, |acc, f| {
            *acc += f.map_or(0.0, |(x, y)| x.hypot(y));
            Some(*acc)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameAccuracy {
    pub frame: u64,
    pub estimated: Option<(f64, f64)>,
    pub truth: (f64, f64),
    /// Estimate minus truth; a frame without data counts as zero flow.
    pub error: (f64, f64),
    pub cum_dist_est: f64,
    pub cum_dist_gt: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AccuracyReport {
    pub frames: Vec<FrameAccuracy>,
    pub rmse: (f64, f64),
    /// `|D_est - D_gt| / D_gt`; `None` when the true distance is zero.
    pub final_rel_err: Option<f64>,
}

/// Compares estimated and true per-frame mean flows. `first_frame` is the
/// frame index of the first entry.
pub fn accuracy_metrics(
    estimated: &[Option<(f64, f64)>],
    ground_truth: &[(f64, f64)],
    first_frame: u64,
) -> Result<AccuracyReport> {
    if estimated.len() != ground_truth.len() {
        return Err(Error::Alignment {
            estimated: estimated.len(),
            truth: ground_truth.len(),
        });
    }
    let gt_opt: Vec<Option<(f64, f64)>> = ground_truth.iter().copied().map(Some).collect();
    let d_est = traveled_distance(estimated);
    let d_gt = traveled_distance(&gt_opt);
    let mut frames = Vec::with_capacity(estimated.len());
    let (mut se_x, mut se_y) = (0.0, 0.0);
    for (i, (&est, &truth)) in estimated.iter().zip(ground_truth).enumerate() {
        let e = est.unwrap_or((0.0, 0.0));
        let error = (e.0 - truth.0, e.1 - truth.1);
        se_x += error.0 * error.0;
        se_y += error.1 * error.1;
        frames.push(FrameAccuracy {
            frame: first_frame + i as u64,
            estimated: est,
            truth,
            error,
            cum_dist_est: d_est[i],
            cum_dist_gt: d_gt[i],
        });
    }
    let n = estimated.len().max(1) as f64;
    let final_rel_err = match (d_est.last(), d_gt.last()) {
        (Some(&e), Some(&g)) if g > 0.0 => Some((e - g).abs() / g),
        _ => None,
    };
    Ok(AccuracyReport {
        frames,
        rmse: ((se_x / n).sqrt(), (se_y / n).sqrt()),
        final_rel_err,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrackStats {
    pub n_tracks: usize,
    pub max_track_len: usize,
    pub p50_track_len: f64,
    pub redetected_count: usize,
}

pub fn track_stats(tracks: &[Track], redetected_count: usize) -> TrackStats {
    let mut lens: Vec<usize> = tracks.iter().map(Track::len).collect();
    lens.sort_unstable();
    let p50 = match lens.len() {
        0 => 0.0,
        n if n % 2 == 1 => lens[n / 2] as f64,
        n => (lens[n / 2 - 1] + lens[n / 2]) as f64 / 2.0,
    };
    TrackStats {
        n_tracks: lens.len(),
        max_track_len: lens.last().copied().unwrap_or(0),
        p50_track_len: p50,
        redetected_count,
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6}"))
}

/// Per-frame accuracy table. Frames without estimated flow have empty
/// estimate cells and `valid = 0`.
pub fn write_frames_csv<W: Write>(w: W, report: &AccuracyReport) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "frame",
        "est_dx",
        "est_dy",
        "gt_dx",
        "gt_dy",
        "err_dx",
        "err_dy",
        "cum_dist_est",
        "cum_dist_gt",
        "valid",
    ])?;
    for f in &report.frames {
        let (ex, ey) = match f.estimated {
            Some((x, y)) => (format!("{x:.6}"), format!("{y:.6}")),
            None => (String::new(), String::new()),
        };
        out.write_record([
            f.frame.to_string(),
            ex,
            ey,
            format!("{:.6}", f.truth.0),
            format!("{:.6}", f.truth.1),
            format!("{:.6}", f.error.0),
            format!("{:.6}", f.error.1),
            format!("{:.6}", f.cum_dist_est),
            format!("{:.6}", f.cum_dist_gt),
            (f.estimated.is_some() as u8).to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// One-row summary table.
pub fn write_summary_csv<W: Write>(
    w: W,
    accuracy: Option<&AccuracyReport>,
    tracks: &TrackStats,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "rmse_x",
        "rmse_y",
        "final_rel_err",
        "n_tracks",
        "max_track_len",
        "p50_track_len",
        "redetected_count",
    ])?;
    out.write_record([
        fmt_opt(accuracy.map(|a| a.rmse.0)),
        fmt_opt(accuracy.map(|a| a.rmse.1)),
        fmt_opt(accuracy.and_then(|a| a.final_rel_err)),
        tracks.n_tracks.to_string(),
        tracks.max_track_len.to_string(),
        format!("{:.1}", tracks.p50_track_len),
        tracks.redetected_count.to_string(),
    ])?;
    out.flush()?;
    Ok(())
}

/// Ground-truth rows `frame, gt_dx, gt_dy` (header required).
pub fn read_ground_truth_csv<R: Read>(r: R) -> Result<Vec<(u64, f64, f64)>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut rows = Vec::new();
    for rec in rdr.deserialize::<(u64, f64, f64)>() {
        rows.push(rec?);
    }
    Ok(rows)
}

pub fn write_ground_truth_csv<W: Write>(w: W, rows: &[(u64, f64, f64)]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["frame", "gt_dx", "gt_dy"])?;
    for (f, x, y) in rows {
        out.write_record([f.to_string(), format!("{x:.9}"), format!("{y:.9}")])?;
    }
    out.flush()?;
    Ok(())
}
