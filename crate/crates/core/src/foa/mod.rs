//! First-order Ambisonics buffers (ACN channel order W, Y, Z, X with SN3D
//! gains), anechoic encoding, RIR convolution and event mixing.

pub mod convolve;
pub mod wav;

use crate::error::{Error, Result};
use crate::geometry::Doa;
use crate::scalar::Scalar;

pub const W: usize = 0;
pub const Y: usize = 1;
pub const Z: usize = 2;
pub const X: usize = 3;

pub const DEFAULT_SAMPLE_RATE: u32 = 24_000;

/// SN3D first-order gains `[W, Y, Z, X]` for a plane wave from `d`.
pub fn sn3d_gains<T: Scalar>(d: &Doa<T>) -> [T; 4] {
    let v = d.to_unit_vec();
    [T::one(), v.y, v.z, v.x]
}

/// Four equal-length channels in ACN order.
#[derive(Debug, Clone, PartialEq)]
pub struct FoaClip<T> {
    channels: [Vec<T>; 4],
    sample_rate: u32,
}

impl<T: Scalar> FoaClip<T> {
    pub fn new(channels: [Vec<T>; 4], sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidSampleRate(sample_rate));
        }
        let len = channels[0].len();
        if channels.iter().any(|c| c.len() != len) {
            return Err(Error::NotFoa { channels: 4 });
        }
        Ok(Self {
            channels,
            sample_rate,
        })
    }

    /// Accepts any channel list, failing unless it holds exactly four
    /// equal-length channels.
    pub fn from_vec(channels: Vec<Vec<T>>, sample_rate: u32) -> Result<Self> {
        let n = channels.len();
        let arr: [Vec<T>; 4] = channels
            .try_into()
            .map_err(|_| Error::NotFoa { channels: n })?;
        Self::new(arr, sample_rate)
    }

    pub fn silent(len: usize, sample_rate: u32) -> Result<Self> {
        let z = vec![T::zero(); len];
        Self::new([z.clone(), z.clone(), z.clone(), z], sample_rate)
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn channels(&self) -> &[Vec<T>; 4] {
        &self.channels
    }

    pub fn channel(&self, idx: usize) -> &[T] {
        &self.channels[idx]
    }

    pub fn into_channels(self) -> [Vec<T>; 4] {
        self.channels
    }

    pub fn w(&self) -> &[T] {
        &self.channels[W]
    }

    pub fn y(&self) -> &[T] {
        &self.channels[Y]
    }

    pub fn z(&self) -> &[T] {
        &self.channels[Z]
    }

    pub fn x(&self) -> &[T] {
        &self.channels[X]
    }

    /// Largest absolute sample over all channels.
    pub fn peak(&self) -> T {
        self.channels
            .iter()
            .flatten()
            .fold(T::zero(), |m, &s| m.max(s.abs()))
    }

    pub fn duration_secs(&self) -> f64 {
        self.len() as f64 / self.sample_rate as f64
    }
}

/// Single-channel dry asset.
#[derive(Debug, Clone, PartialEq)]
pub struct MonoClip<T> {
    samples: Vec<T>,
    sample_rate: u32,
}

impl<T: Scalar> MonoClip<T> {
    pub fn new(samples: Vec<T>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidSampleRate(sample_rate));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn duration_secs(&self) -> f64 {
        self.len() as f64 / self.sample_rate as f64
    }
}

/// Four-channel spatial room impulse response measured (or synthesized) for
/// one source direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Rir<T> {
    pub ir: [Vec<T>; 4],
    pub doa: Doa<T>,
    pub room_id: String,
    pub distance: Option<T>,
    pub sample_rate: u32,
}

impl<T: Scalar> Rir<T> {
    pub fn new(
        ir: [Vec<T>; 4],
        doa: Doa<T>,
        room_id: impl Into<String>,
        distance: Option<T>,
        sample_rate: u32,
    ) -> Result<Self> {
        let len = ir[0].len();
        if len == 0 || ir.iter().any(|c| c.len() != len) {
            return Err(Error::InvalidArgument(
                "RIR needs four non-empty channels of equal length".into(),
            ));
        }
        if sample_rate == 0 {
            return Err(Error::InvalidSampleRate(sample_rate));
        }
        Ok(Self {
            ir,
            doa,
            room_id: room_id.into(),
            distance,
            sample_rate,
        })
    }

    /// Free-field response: a single tap per channel carrying the SN3D gains.
    pub fn anechoic(doa: Doa<T>, sample_rate: u32) -> Self {
        let g = sn3d_gains(&doa);
        Self {
            ir: g.map(|v| vec![v]),
            doa,
            room_id: "anechoic".into(),
            distance: None,
            sample_rate,
        }
    }

    pub fn len(&self) -> usize {
        self.ir[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Ideal plane-wave encoding of a mono clip.
pub fn encode_foa_anechoic<T: Scalar>(m: &MonoClip<T>, d: &Doa<T>) -> Result<FoaClip<T>> {
    if m.is_empty() {
        return Err(Error::EmptyClip);
    }
    let gains = sn3d_gains(d);
    let channels = gains.map(|g| m.samples.iter().map(|&s| s * g).collect());
    FoaClip::new(channels, m.sample_rate)
}

/// Full linear convolution of a mono clip with each RIR channel.
pub fn convolve_rir<T: Scalar>(m: &MonoClip<T>, r: &Rir<T>) -> Result<FoaClip<T>> {
    if m.is_empty() || r.is_empty() {
        return Err(Error::EmptyClip);
    }
    if m.sample_rate != r.sample_rate {
        return Err(Error::SampleRateMismatch {
            expected: m.sample_rate,
            found: r.sample_rate,
        });
    }
    let kernels: Vec<&[T]> = r.ir.iter().map(|c| c.as_slice()).collect();
    FoaClip::from_vec(convolve::convolve_many(&m.samples, &kernels), m.sample_rate)
}

/// Sums clips into a buffer of `round(duration * sr)` samples. Each clip
/// starts at `round(onset * sr)`; anything past the end is dropped.
pub fn mix_events<T: Scalar>(placed: &[(FoaClip<T>, f64)], duration: f64, sr: u32) -> Result<FoaClip<T>> {
    if sr == 0 {
        return Err(Error::InvalidSampleRate(sr));
    }
    if !(duration >= 0.0) {
        return Err(Error::InvalidArgument(format!("duration {duration}")));
    }
    let len = (duration * sr as f64).round() as usize;
    let mut out = FoaClip::silent(len, sr)?;
    for (clip, onset) in placed {
        if clip.sample_rate != sr {
            return Err(Error::SampleRateMismatch {
                expected: sr,
                found: clip.sample_rate,
            });
        }
        if !(*onset >= 0.0) {
            return Err(Error::InvalidArgument(format!("negative onset {onset}")));
        }
        let start = (onset * sr as f64).round() as usize;
        add_at(&mut out, clip, start);
    }
    Ok(out)
}

pub(crate) fn add_at<T: Scalar>(out: &mut FoaClip<T>, clip: &FoaClip<T>, start: usize) {
    if start >= out.len() {
        return;
    }
    let end = (start + clip.len()).min(out.len());
    for (dst, src) in out.channels.iter_mut().zip(clip.channels.iter()) {
        for (d, &s) in dst[start..end].iter_mut().zip(src) {
            *d += s;
        }
    }
}

/// Scales all channels by one common factor so the peak equals `target`.
pub fn peak_normalize<T: Scalar>(c: &FoaClip<T>, target: T) -> Result<FoaClip<T>> {
    let peak = c.peak();
    if peak == T::zero() {
        return Err(Error::SilentClip);
    }
    let gain = target / peak;
    let channels = c.channels.clone().map(|ch| ch.into_iter().map(|s| s * gain).collect());
    FoaClip::new(channels, c.sample_rate)
}
