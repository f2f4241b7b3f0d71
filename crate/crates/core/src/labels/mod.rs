//! Label codecs: STARSS23-style metadata CSV, multi-ACCDOA targets, the
//! bounding-box visual embedding, and their binary tensor file.

pub mod accdoa;
pub mod metadata;
pub mod tensor_file;
pub mod visual;

pub use accdoa::{decode_multi_accdoa, encode_multi_accdoa, MultiAccdoaTensor};
pub use metadata::{read_metadata, write_metadata, SeldEvent};
pub use visual::{encode_visual_boxes, BoundingBox, VisualEmbedding};

/// Number of target sound classes.
pub const NUM_CLASSES: usize = 13;

/// Label frames per second (100 ms hop).
pub const LABEL_FRAMES_PER_SEC: u32 = 10;
