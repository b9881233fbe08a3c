//! The seven built-in camera parameter sets.

use crate::error::{Error, Result};
use crate::sensor::{SensorConfig, SubsampleMode};

pub const DEFAULT_MAX_DISPLACEMENT: u32 = 16;
pub const DEFAULT_RATIO_THRESHOLD: f64 = 0.8;

#[derive(Clone, Debug, PartialEq)]
pub struct ParameterSet {
    pub id: u8,
    pub config: SensorConfig,
}

pub const PARAMETER_SET_IDS: std::ops::RangeInclusive<u8> = 1..=7;

pub fn parameter_set(id: u8) -> Result<ParameterSet> {
    // (out size, crop origin, subsample factor, fps, target, max, tile budget)
    type Row = (
        (usize, usize),
        Option<(usize, usize)>,
        usize,
        f64,
        u32,
        u32,
        u8,
    );
    let row: Row = match id {
        1 => ((1124, 1364), None, 1, 60.0, 1536, 2048, 2),
        2 => ((1120, 1344), Some((0, 0)), 1, 60.0, 1536, 2048, 2),
        3 => ((640, 480), Some((240, 432)), 1, 140.0, 768, 1024, 4),
        4 => ((560, 672), Some((280, 336)), 1, 140.0, 768, 1024, 4),
        5 => ((560, 672), None, 2, 140.0, 768, 1024, 4),
        6 => ((272, 336), Some((420, 504)), 1, 240.0, 384, 512, 8),
        7 => ((280, 336), None, 4, 240.0, 384, 512, 8),
        other => {
            return Err(Error::Config(format!(
                "unknown parameter set {other}, expected 1-7"
            )))
        }
    };
    let (
        (out_width, out_height),
        crop_origin,
        subsample_factor,
        frame_rate,
        brief_target,
        brief_max,
        tile_budget,
    ) = row;
    Ok(ParameterSet {
        id,
        config: SensorConfig {
            out_width,
            out_height,
            crop_origin,
            subsample_factor,
            subsample_mode: SubsampleMode::Decimate,
            frame_rate,
            brief_target,
            brief_max,
            tile_budget,
            max_displacement: DEFAULT_MAX_DISPLACEMENT,
            ratio_threshold: DEFAULT_RATIO_THRESHOLD,
        },
    })
}

pub fn all_parameter_sets() -> Vec<ParameterSet> {
    PARAMETER_SET_IDS
        .map(|id| parameter_set(id).expect("built-in id"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_set_is_valid() {
        for set in all_parameter_sets() {
            set.config.validate().unwrap();
        }
        assert!(parameter_set(0).is_err());
        assert!(parameter_set(8).is_err());
    }

    #[test]
    fn sets_round_trip_through_config_text() {
        let dir = tempfile::tempdir().unwrap();
        for set in all_parameter_sets() {
            let path = dir.path().join(format!("set{}.cfg", set.id));
            set.config.save(&path).unwrap();
            assert_eq!(SensorConfig::load(&path).unwrap(), set.config);
        }
    }

    #[test]
    fn subsampled_sets_reach_their_output_size() {
        for id in [5, 7] {
            let c = parameter_set(id).unwrap().config;
            let (_, _, w, h) = c.readout_window();
            assert!(w <= crate::frame::SENSOR_WIDTH && h <= crate::frame::SENSOR_HEIGHT);
        }
    }
}
