//! Synthetic audio-visual scene generation: event sampling, spatial audio
//! rendering through room impulse responses, and 360° video compositing.

pub mod render;
pub mod rir_bank;
pub mod scene;

pub use render::{class_color, render_audio, SceneVideo, TILE_SIZE};
pub use rir_bank::{nearest_rir, RirBank};
pub use scene::{load_assets, sample_scene, Asset, AssetEntry, SceneConfig, SceneEvent, SceneSpec};
