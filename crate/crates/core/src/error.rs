use std::io;

use thiserror::Error;

/// Errors produced anywhere in the emulator pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{axis} coordinate {value} exceeds bound {bound}")]
    Bounds {
        axis: &'static str,
        value: usize,
        bound: usize,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("value {value} outside supported range [{min}, {max}] for {what}")]
    Range {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("frame {width}x{height} is smaller than the minimum {min}x{min}")]
    Size {
        width: usize,
        height: usize,
        min: usize,
    },
    #[error(
        "point ({x}, {y}) is closer than {margin} px to the border of a {width}x{height} frame"
    )]
    Margin {
        x: usize,
        y: usize,
        margin: usize,
        width: usize,
        height: usize,
    },
    #[error("field {field} = {value} does not fit the wire record")]
    Encode { field: &'static str, value: i64 },
    #[error("payload length {0} is not a multiple of the 192-byte line size")]
    Framing(usize),
    #[error("invalid record payload: {0}")]
    Payload(String),
    #[error("length mismatch: {estimated} estimated frames vs {truth} ground-truth frames")]
    Alignment { estimated: usize, truth: usize },
    #[error("motion leaves the texture at frame {frame}")]
    Coverage { frame: usize },
    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
