//! Multichannel WAV I/O for FOA clips, mono assets and RIRs.
//!
//! Integer PCM is scaled by `2^(bits-1)` on read and write, so a PCM16
//! file survives a read/write cycle unchanged.

use std::io::{Seek, Write};
use std::path::Path;

use hound::{SampleFormat as HoundFormat, WavReader, WavSpec, WavWriter};

use crate::error::{Error, Result};
use crate::foa::{FoaClip, MonoClip};
use crate::io::write_atomic;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SampleFormat {
    #[default]
    Pcm16,
    Float32,
}

/// Decoded WAV: one vector per channel.
#[derive(Debug, Clone)]
pub struct WavData<T> {
    pub channels: Vec<Vec<T>>,
    pub sample_rate: u32,
    pub format: SampleFormat,
}

fn wav_err(path: &Path) -> impl FnOnce(hound::Error) -> Error + '_ {
    move |source| Error::Wav {
        path: path.to_path_buf(),
        source,
    }
}

pub fn read_wav<T: Scalar>(path: &Path) -> Result<WavData<T>> {
    let mut reader = WavReader::open(path).map_err(wav_err(path))?;
    let spec = reader.spec();
    let n_ch = spec.channels as usize;
    let frames = reader.duration() as usize;
    let mut channels: Vec<Vec<T>> = (0..n_ch).map(|_| Vec::with_capacity(frames)).collect();
    let format = match (spec.sample_format, spec.bits_per_sample) {
        (HoundFormat::Float, 32) => {
            for (i, s) in reader.samples::<f32>().enumerate() {
                let s = s.map_err(wav_err(path))?;
                channels[i % n_ch].push(T::lit(s as f64));
            }
            SampleFormat::Float32
        }
        (HoundFormat::Int, bits @ 8..=32) => {
            let scale = 1.0 / (1u64 << (bits - 1)) as f64;
            for (i, s) in reader.samples::<i32>().enumerate() {
                let s = s.map_err(wav_err(path))?;
                channels[i % n_ch].push(T::lit(s as f64 * scale));
            }
            // higher-resolution PCM is re-exported as float
            if bits == 16 {
                SampleFormat::Pcm16
            } else {
                SampleFormat::Float32
            }
        }
        (fmt, bits) => {
            return Err(Error::InvalidArgument(format!(
                "{}: unsupported WAV format {fmt:?}/{bits} bits",
                path.display()
            )))
        }
    };
    Ok(WavData {
        channels,
        sample_rate: spec.sample_rate,
        format,
    })
}

/// Encodes channels into WAV bytes on any seekable sink.
pub fn encode_wav<T: Scalar, W: Write + Seek>(
    sink: W,
    channels: &[&[T]],
    sample_rate: u32,
    format: SampleFormat,
) -> Result<()> {
    let len = channels.first().map_or(0, |c| c.len());
    if channels.is_empty() || channels.iter().any(|c| c.len() != len) {
        return Err(Error::InvalidArgument("WAV channels must be non-empty and of equal length".into()));
    }
    let spec = WavSpec {
        channels: channels.len() as u16,
        sample_rate,
        bits_per_sample: match format {
            SampleFormat::Pcm16 => 16,
            SampleFormat::Float32 => 32,
        },
        sample_format: match format {
            SampleFormat::Pcm16 => HoundFormat::Int,
            SampleFormat::Float32 => HoundFormat::Float,
        },
    };
    let to_io = |e: hound::Error| match e {
        hound::Error::IoError(e) => Error::Io(e),
        other => Error::InvalidArgument(other.to_string()),
    };
    let mut w = WavWriter::new(sink, spec).map_err(to_io)?;
    for i in 0..len {
        for ch in channels {
            let v = ch[i].as_f64();
            match format {
                SampleFormat::Pcm16 => {
                    let q = (v * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
                    w.write_sample(q).map_err(to_io)?;
                }
                SampleFormat::Float32 => w.write_sample(v as f32).map_err(to_io)?,
            }
        }
    }
    w.finalize().map_err(to_io)?;
    Ok(())
}

/// Writes a WAV file atomically.
pub fn write_wav<T: Scalar>(path: &Path, channels: &[&[T]], sample_rate: u32, format: SampleFormat) -> Result<()> {
    write_atomic(path, |w| encode_wav(w, channels, sample_rate, format))
}

pub fn read_foa<T: Scalar>(path: &Path) -> Result<(FoaClip<T>, SampleFormat)> {
    let data = read_wav(path)?;
    Ok((FoaClip::from_vec(data.channels, data.sample_rate)?, data.format))
}

pub fn write_foa<T: Scalar>(path: &Path, clip: &FoaClip<T>, format: SampleFormat) -> Result<()> {
    let chans: Vec<&[T]> = clip.channels().iter().map(|c| c.as_slice()).collect();
    write_wav(path, &chans, clip.sample_rate(), format)
}

/// Reads a mono asset; multichannel files are averaged down to one channel.
pub fn read_mono<T: Scalar>(path: &Path) -> Result<MonoClip<T>> {
    let data = read_wav::<T>(path)?;
    let n = data.channels.len();
    let samples = if n == 1 {
        data.channels.into_iter().next().unwrap()
    } else {
        log::warn!("{}: downmixing {n} channels to mono", path.display());
        let inv = T::one() / T::from_usize_lossy(n);
        (0..data.channels[0].len())
            .map(|i| data.channels.iter().fold(T::zero(), |acc, c| acc + c[i]) * inv)
            .collect()
    };
    MonoClip::new(samples, data.sample_rate)
}

pub fn write_mono<T: Scalar>(path: &Path, clip: &MonoClip<T>, format: SampleFormat) -> Result<()> {
    write_wav(path, &[clip.samples()], clip.sample_rate(), format)
}
