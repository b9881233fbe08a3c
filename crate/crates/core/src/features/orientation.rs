use std::f64::consts::TAU;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::frame::Frame;

use super::BORDER_MARGIN;

/// Radius of the moment patch.
pub const PATCH_RADIUS: i32 = 15;

fn disc() -> &'static [(i32, i32)] {
    static DISC: OnceLock<Vec<(i32, i32)>> = OnceLock::new();
    DISC.get_or_init(|| {
        let r = PATCH_RADIUS;
        (-r..=r)
            .flat_map(|dy| (-r..=r).map(move |dx| (dx, dy)))
            .filter(|&(dx, dy)| dx * dx + dy * dy <= r * r)
            .collect()
    })
}

pub(crate) fn check_margin(frame: &Frame, x: u32, y: u32) -> Result<()> {
    let (x, y) = (x as usize, y as usize);
    let (w, h) = frame.dims();
    if x < BORDER_MARGIN || y < BORDER_MARGIN || x + BORDER_MARGIN >= w || y + BORDER_MARGIN >= h {
        return Err(Error::Margin {
            x,
            y,
            margin: BORDER_MARGIN,
            width: w,
            height: h,
        });
    }
    Ok(())
}

/// Intensity-centroid orientation of the radius-15 disc around `(x, y)`,
/// in `[0, 2π)`. A patch with vanishing first moments has orientation 0.
pub fn compute_orientation(frame: &Frame, x: u32, y: u32) -> Result<f64> {
    check_margin(frame, x, y)?;
    let (m10, m01) = moments(frame, x, y);
    if m10 == 0 && m01 == 0 {
        return Ok(0.0);
    }
    let angle = (m01 as f64).atan2(m10 as f64);
    Ok(if angle < 0.0 { angle + TAU } else { angle }.rem_euclid(TAU))
}

fn moments(frame: &Frame, x: u32, y: u32) -> (i64, i64) {
    let w = frame.width() as isize;
    let px = frame.pixels();
    let center = y as isize * w + x as isize;
    let (mut m10, mut m01) = (0i64, 0i64);
    for &(dx, dy) in disc() {
        let v = px[(center + dy as isize * w + dx as isize) as usize] as i64;
        m10 += dx as i64 * v;
        m01 += dy as i64 * v;
    }
    (m10, m01)
}
