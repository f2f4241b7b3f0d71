//! Audio channel swapping (ACS) and video pixel swapping (VPS).
//!
//! Each [`AcsTransform`] is a quarter-turn azimuth rotation combined with an
//! optional elevation flip. On first-order Ambisonics these are exact signed
//! channel permutations, on equirectangular frames they are lossless pixel
//! permutations, and on labels they are the matching DoA maps. The eight
//! transforms form the group Z4 x Z2.

use crate::error::{Error, Result};
use crate::foa::{FoaClip, W, X, Y, Z};
use crate::frame::Frame;
use crate::geometry::{Doa, FrameGeometry, Vec3};
use crate::labels::SeldEvent;
use crate::scalar::Scalar;

/// Azimuth rotation by `-90° * quarter_turns`, then elevation negation when
/// `elevation_flip` is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AcsTransform {
    quarter_turns: u8,
    elevation_flip: bool,
}

impl Default for AcsTransform {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl AcsTransform {
    pub const IDENTITY: Self = Self {
        quarter_turns: 0,
        elevation_flip: false,
    };

    /// `quarter_turns` is taken modulo 4.
    pub fn new(quarter_turns: u8, elevation_flip: bool) -> Self {
        Self {
            quarter_turns: quarter_turns % 4,
            elevation_flip,
        }
    }

    pub fn quarter_turns(&self) -> u8 {
        self.quarter_turns
    }

    pub fn elevation_flip(&self) -> bool {
        self.elevation_flip
    }

    /// Azimuth offset in degrees (`0, -90, -180, -270`).
    pub fn azimuth_offset(&self) -> i32 {
        -90 * self.quarter_turns as i32
    }

    /// Position in [`augmentation_set`]; also the `_tN` output suffix.
    pub fn index(&self) -> usize {
        2 * self.quarter_turns as usize + self.elevation_flip as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        (index < 8).then(|| Self::new((index / 2) as u8, index % 2 == 1))
    }

    /// `self ∘ other`: apply `other` first. Rotations and the flip commute.
    pub fn compose(self, other: Self) -> Self {
        Self::new(
            self.quarter_turns + other.quarter_turns,
            self.elevation_flip ^ other.elevation_flip,
        )
    }

    pub fn inverse(self) -> Self {
        Self::new((4 - self.quarter_turns) % 4, self.elevation_flip)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    pub fn apply_doa<T: Scalar>(&self, d: &Doa<T>) -> Doa<T> {
        let az = d.azimuth() - T::lit(90.0 * self.quarter_turns as f64);
        let el = if self.elevation_flip {
            -d.elevation()
        } else {
            d.elevation()
        };
        Doa::from_valid(az, el)
    }

    /// The same map on Cartesian directions, done with sign swaps only.
    pub fn apply_vec<T: Scalar>(&self, v: Vec3<T>) -> Vec3<T> {
        let (x, y) = rotate_xy(self.quarter_turns, v.x, v.y);
        let z = if self.elevation_flip { -v.z } else { v.z };
        Vec3::new(x, y, z)
    }
}

/// `(x, y)` rotated by `-90° * k`: `x' = x cos ψ - y sin ψ`,
/// `y' = y cos ψ + x sin ψ` with the trigonometric values exactly 0 or ±1.
#[inline]
fn rotate_xy<T: Scalar>(k: u8, x: T, y: T) -> (T, T) {
    match k % 4 {
        0 => (x, y),
        1 => (y, -x),
        2 => (-x, -y),
        _ => (-y, x),
    }
}

/// All eight transforms, identity first, ordered by `(quarter_turns, flip)`.
pub fn augmentation_set() -> [AcsTransform; 8] {
    std::array::from_fn(|i| AcsTransform::from_index(i).unwrap())
}

pub fn transform_doa<T: Scalar>(t: AcsTransform, d: &Doa<T>) -> Doa<T> {
    t.apply_doa(d)
}

/// Signed permutation of the ACN channels; W is untouched.
pub fn transform_foa<T: Scalar>(t: AcsTransform, c: &FoaClip<T>) -> Result<FoaClip<T>> {
    let ch = c.channels();
    let k = t.quarter_turns;
    let neg = |v: &[T]| -> Vec<T> { v.iter().map(|&s| -s).collect() };
    let (x, y) = match k {
        0 => (ch[X].clone(), ch[Y].clone()),
        1 => (ch[Y].clone(), neg(&ch[X])),
        2 => (neg(&ch[X]), neg(&ch[Y])),
        _ => (neg(&ch[Y]), ch[X].clone()),
    };
    let z = if t.elevation_flip {
        neg(&ch[Z])
    } else {
        ch[Z].clone()
    };
    let mut out: [Vec<T>; 4] = Default::default();
    out[W] = ch[W].clone();
    out[Y] = y;
    out[Z] = z;
    out[X] = x;
    FoaClip::new(out, c.sample_rate())
}

/// Validates channel count before transforming raw channel vectors.
pub fn transform_channels<T: Scalar>(t: AcsTransform, channels: Vec<Vec<T>>, sample_rate: u32) -> Result<FoaClip<T>> {
    if channels.len() != 4 {
        return Err(Error::NotFoa {
            channels: channels.len(),
        });
    }
    transform_foa(t, &FoaClip::from_vec(channels, sample_rate)?)
}

/// Rolls columns by `+quarter_turns * width/4` (the same as
/// `-3 * width/4` per quarter turn) and, with the flip, maps row `r` to
/// `(height - r) mod height`, matching [`FrameGeometry::project`].
pub fn transform_frame(t: AcsTransform, frame: &Frame, g: &FrameGeometry) -> Result<Frame> {
    frame.check_geometry(g)?;
    let (w, h) = (g.width(), g.height());
    let shift = (t.quarter_turns as usize * g.quarter_turn_columns()) % w;
    let mut out = Frame::black(w, h);
    for r in 0..h {
        let dst_row = if t.elevation_flip { (h - r) % h } else { r };
        let src = frame.row(r);
        let dst = out.row_mut(dst_row);
        // column c moves to (c + shift) mod w
        let split = (w - shift) * 3;
        dst[shift * 3..].copy_from_slice(&src[..split]);
        dst[..shift * 3].copy_from_slice(&src[split..]);
    }
    Ok(out)
}

/// Maps every event's DoA; frame, class, source and order are kept.
pub fn transform_metadata<T: Scalar>(t: AcsTransform, events: &[SeldEvent<T>]) -> Vec<SeldEvent<T>> {
    events
        .iter()
        .map(|e| SeldEvent {
            doa: t.apply_doa(&e.doa),
            ..*e
        })
        .collect()
}
