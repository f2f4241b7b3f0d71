//! Tooling for spatial audio-visual soundscapes used in sound event
//! localization and detection (SELD).
//!
//! The crate covers the whole data path around a SELD model:
//!
//! - [`geometry`]: directions of arrival, Cartesian views, equirectangular projection
//! - [`foa`]: first-order Ambisonics buffers, encoding, RIR convolution, WAV I/O
//! - [`augment`]: the 8-element channel-swap / pixel-swap augmentation group
//! - [`synth`]: seeded synthetic 360° audio-visual scene generation
//! - [`labels`]: STARSS23-style metadata, multi-ACCDOA targets, bounding-box embeddings
//! - [`metrics`]: location-aware detection and class-aware localization scores
//! - [`doaval`]: intensity-vector DoA estimation for checking rendered audio
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`). The aliases at
//! the crate root fix the scalar for the common cases.

pub mod augment;
pub mod doaval;
pub mod error;
pub mod foa;
pub mod frame;
pub mod geometry;
pub mod io;
pub mod labels;
pub mod metrics;
pub mod pipeline;
pub mod scalar;
pub mod synth;

pub use augment::{augmentation_set, AcsTransform};
pub use error::{Error, Result};
pub use foa::{FoaClip, MonoClip, Rir};
pub use frame::Frame;
pub use geometry::{Doa, FrameGeometry, Vec3};
pub use labels::{BoundingBox, MultiAccdoaTensor, SeldEvent, VisualEmbedding};
pub use metrics::SeldScores;
pub use scalar::Scalar;

pub type Doa64 = Doa<f64>;
pub type Doa32 = Doa<f32>;
pub type Vec3f64 = Vec3<f64>;
pub type Vec3f32 = Vec3<f32>;
pub type FoaClip64 = FoaClip<f64>;
pub type FoaClip32 = FoaClip<f32>;
pub type MonoClip64 = MonoClip<f64>;
pub type MonoClip32 = MonoClip<f32>;
pub type Rir64 = Rir<f64>;
pub type Rir32 = Rir<f32>;
pub type SeldEvent64 = SeldEvent<f64>;
pub type SeldEvent32 = SeldEvent<f32>;
pub type MultiAccdoa64 = MultiAccdoaTensor<f64>;
pub type MultiAccdoa32 = MultiAccdoaTensor<f32>;
pub type SeldScores64 = SeldScores<f64>;
