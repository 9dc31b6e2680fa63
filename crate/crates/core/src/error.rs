use std::path::PathBuf;

/// Errors produced by the foveation pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("failed to decode {path}: {message}")]
    Decode { path: PathBuf, message: String },
    #[error("failed to encode image: {0}")]
    Encode(String),
    #[error("invalid raster: {0}")]
    InvalidRaster(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("fixation ({x}, {y}) lies outside the {width}x{height} image")]
    FixationOutOfBounds {
        x: i64,
        y: i64,
        width: usize,
        height: usize,
    },
    #[error("filter index {index} out of range for a bank of {len} filters")]
    FilterIndexOutOfRange { index: usize, len: usize },
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Other(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
