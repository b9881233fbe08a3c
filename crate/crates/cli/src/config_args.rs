use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use ofsim_core::sensor::ConfigBuilder;
use ofsim_core::{parameter_set, SensorConfig, SubsampleMode};

/// Sensor configuration: a built-in set or a config file, then per-key
/// overrides.
#[derive(Args, Clone, Debug, Default)]
pub struct ConfigArgs {
    /// Built-in parameter set (1-7).
    #[arg(long, value_name = "N")]
    pub param_set: Option<u8>,
    /// key=value configuration file.
    #[arg(long, value_name = "FILE", conflicts_with = "param_set")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out_width: Option<usize>,
    #[arg(long)]
    pub out_height: Option<usize>,
    #[arg(long)]
    pub crop_x: Option<usize>,
    #[arg(long)]
    pub crop_y: Option<usize>,
    #[arg(long)]
    pub subsample_factor: Option<usize>,
    #[arg(long)]
    pub subsample_mode: Option<SubsampleMode>,
    #[arg(long)]
    pub frame_rate: Option<f64>,
    #[arg(long)]
    pub brief_target: Option<u32>,
    #[arg(long)]
    pub brief_max: Option<u32>,
    #[arg(long)]
    pub tile_budget: Option<u8>,
    #[arg(long)]
    pub max_displacement: Option<u32>,
    #[arg(long)]
    pub ratio_threshold: Option<f64>,
}

impl ConfigArgs {
    /// Resolves the configuration; `fallback_set` is used when neither a
    /// set nor a file was given.
    pub fn resolve(&self, fallback_set: Option<u8>) -> Result<SensorConfig> {
        let mut builder = if let Some(path) = &self.config {
            let base =
                SensorConfig::load(path).with_context(|| format!("loading {}", path.display()))?;
            ConfigBuilder::from_config(&base)
        } else if let Some(id) = self.param_set.or(fallback_set) {
            ConfigBuilder::from_config(&parameter_set(id)?.config)
        } else {
            ConfigBuilder::default()
        };
        let overrides: [(&str, Option<String>); 12] = [
            ("out_width", self.out_width.map(|v| v.to_string())),
            ("out_height", self.out_height.map(|v| v.to_string())),
            ("crop_x", self.crop_x.map(|v| v.to_string())),
            ("crop_y", self.crop_y.map(|v| v.to_string())),
            (
                "subsample_factor",
                self.subsample_factor.map(|v| v.to_string()),
            ),
            ("subsample_mode", self.subsample_mode.map(|v| v.to_string())),
            ("frame_rate", self.frame_rate.map(|v| v.to_string())),
            ("brief_target", self.brief_target.map(|v| v.to_string())),
            ("brief_max", self.brief_max.map(|v| v.to_string())),
            ("tile_budget", self.tile_budget.map(|v| v.to_string())),
            (
                "max_displacement",
                self.max_displacement.map(|v| v.to_string()),
            ),
            (
                "ratio_threshold",
                self.ratio_threshold.map(|v| v.to_string()),
            ),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                builder.set(key, &v)?;
            }
        }
        Ok(builder.build()?)
    }
}
