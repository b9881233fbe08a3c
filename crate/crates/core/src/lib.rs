//! Emulator of an on-sensor sparse optical-flow unit and the synthetic
//! scenes used to evaluate it.

pub mod error;
pub mod features;
pub mod frame;
pub mod matcher;
pub mod params;
pub mod pipeline;
pub mod rate;
pub mod sensor;
pub mod sequence;
pub mod synth;
pub mod tracks;
pub mod wire;

pub use error::{Error, Result};
pub use features::{Corner, Descriptor, DetectorState, Feature};
pub use frame::Frame;
pub use matcher::FlowVector;
pub use params::{parameter_set, ParameterSet};
pub use pipeline::{
    run_parameter_set, run_pipeline, Pipeline, RunReport, Scenario, ScenarioOptions, Scene,
};
pub use sensor::{SensorConfig, SubsampleMode};
pub use synth::{MotionSpec, TextureKind, TextureSpec};
pub use tracks::{Track, TrackPoint};
