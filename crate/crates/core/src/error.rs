use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot convert a zero-length vector to a direction")]
    ZeroVector,
    #[error("invalid direction: azimuth {azimuth}, elevation {elevation}")]
    InvalidDoa { azimuth: f64, elevation: f64 },
    #[error("clip is empty")]
    EmptyClip,
    #[error("clip is silent")]
    SilentClip,
    #[error("segment is silent")]
    SilentSegment,
    #[error("segment {start}..{end} is outside a clip of {len} samples")]
    SegmentOutOfRange { start: usize, end: usize, len: usize },
    #[error("sample rate mismatch: expected {expected} Hz, got {found} Hz")]
    SampleRateMismatch { expected: u32, found: u32 },
    #[error("expected 4 equal-length FOA channels, got {channels} channels")]
    NotFoa { channels: usize },
    #[error("invalid sample rate {0}")]
    InvalidSampleRate(u32),
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),
    #[error("scene infeasible after {attempts} attempts: {reason}")]
    InfeasibleScene { attempts: usize, reason: String },
    #[error("invalid scene: {0}")]
    InvalidScene(String),
    #[error("{source_name}:{line}: {msg}")]
    Parse { source_name: String, line: usize, msg: String },
    #[error("{source_name}:{line}: {msg}")]
    Range { source_name: String, line: usize, msg: String },
    #[error("frame {frame}, class {class_idx}: more than {max} active sources")]
    TooManySources { frame: u32, class_idx: u8, max: usize },
    #[error("invalid tensor file: {0}")]
    TensorFormat(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{path}: {source}")]
    Wav {
        path: PathBuf,
        #[source]
        source: hound::Error,
    },
    #[error("{path}: {source}")]
    PngDecode {
        path: PathBuf,
        #[source]
        source: png::DecodingError,
    },
    #[error("{path}: {source}")]
    PngEncode {
        path: PathBuf,
        #[source]
        source: png::EncodingError,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
