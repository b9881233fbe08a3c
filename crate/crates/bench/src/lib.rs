//! Inputs shared by the benchmarks.

use ofsim_core::features::{extract_features, DetectorState, Feature};
use ofsim_core::synth::generate_texture;
use ofsim_core::{parameter_set, Frame, MotionSpec, Scene, SensorConfig, TextureKind};

/// Two consecutive frames of a translating blocks scene rendered for a
/// parameter set's readout window.
pub fn frame_pair(set: u8, shift: f64) -> (SensorConfig, Frame, Frame) {
    let config = parameter_set(set).expect("built-in set").config;
    let (_, _, w, h) = config.readout_window();
    let scene = Scene::new(
        TextureKind::Blocks,
        17,
        MotionSpec::Translate { vx: shift, vy: 0.0 },
        2,
        (w, h),
    );
    let texture = generate_texture(&scene.texture).expect("texture");
    let renderer = scene.renderer(&texture).expect("renderer");
    (
        config,
        renderer.render(0).expect("frame"),
        renderer.render(1).expect("frame"),
    )
}

/// Features of both frames at a fixed threshold, ready for matching.
pub fn feature_pair(
    frame_a: &Frame,
    frame_b: &Frame,
    state: &DetectorState,
) -> (Vec<Feature>, Vec<Feature>) {
    (
        extract_features(frame_a, state).expect("features"),
        extract_features(frame_b, state).expect("features"),
    )
}
