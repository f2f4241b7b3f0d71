//! Scene plans and the seeded event sampler.

use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::foa::wav::read_mono;
use crate::foa::{MonoClip, DEFAULT_SAMPLE_RATE};
use crate::frame::{list_frames, Frame};
use crate::geometry::Doa;
use crate::labels::{LABEL_FRAMES_PER_SEC, NUM_CLASSES};
use crate::scalar::Scalar;
use crate::synth::render::TILE_SIZE;
use crate::synth::rir_bank::RirBank;

/// Redraws allowed per scene before giving up.
pub const MAX_ATTEMPTS: usize = 10_000;

pub const DEFAULT_DURATION: f64 = 30.0;
pub const DEFAULT_MAX_POLYPHONY: usize = 3;

/// A source clip available to the generator.
#[derive(Debug, Clone, PartialEq)]
pub struct AssetEntry {
    pub audio_path: PathBuf,
    /// Directory of PNG frames shown as the event's video tile.
    pub tile_frames_path: Option<PathBuf>,
    pub class_idx: u8,
    /// Seconds.
    pub duration: f64,
}

impl AssetEntry {
    pub fn new(audio_path: PathBuf, tile_frames_path: Option<PathBuf>, class_idx: u8, duration: f64) -> Result<Self> {
        if class_idx as usize >= NUM_CLASSES {
            return Err(Error::InvalidArgument(format!("asset class {class_idx} outside 0..{NUM_CLASSES}")));
        }
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::InvalidArgument(format!("asset duration {duration}")));
        }
        Ok(Self {
            audio_path,
            tile_frames_path,
            class_idx,
            duration,
        })
    }

    /// Reads `audio_path,class_idx[,tile_dir]` lines; relative paths are
    /// resolved against the manifest's directory and durations come from
    /// the WAV headers.
    pub fn read_manifest(path: &Path) -> Result<Vec<AssetEntry>> {
        let text = fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let name = path.display().to_string();
        let mut out = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse {
                source_name: name.clone(),
                line: i + 1,
                msg,
            };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if !(2..=3).contains(&fields.len()) {
                return Err(err(format!("expected 2 or 3 fields, found {}", fields.len())));
            }
            let class_idx: u8 = fields[1]
                .parse()
                .map_err(|_| err(format!("bad class {:?}", fields[1])))?;
            if class_idx as usize >= NUM_CLASSES {
                return Err(Error::Range {
                    source_name: name.clone(),
                    line: i + 1,
                    msg: format!("class {class_idx} outside 0..{NUM_CLASSES}"),
                });
            }
            let audio = base.join(fields[0]);
            let tiles = fields.get(2).filter(|s| !s.is_empty()).map(|s| base.join(s));
            let reader = hound::WavReader::open(&audio).map_err(|source| Error::Wav {
                path: audio.clone(),
                source,
            })?;
            let duration = reader.duration() as f64 / reader.spec().sample_rate as f64;
            out.push(AssetEntry::new(audio, tiles, class_idx, duration).map_err(|e| err(e.to_string()))?);
        }
        Ok(out)
    }
}

/// An asset with its audio and tile frames in memory.
#[derive(Debug, Clone)]
pub struct Asset<T> {
    pub entry: AssetEntry,
    pub audio: MonoClip<T>,
    /// Frames already resized to the tile size.
    pub tiles: Option<Vec<Frame>>,
}

pub fn load_assets<T: Scalar>(entries: &[AssetEntry], sample_rate: u32) -> Result<Vec<Asset<T>>> {
    entries
        .iter()
        .map(|e| {
            let audio = read_mono::<T>(&e.audio_path)?;
            if audio.sample_rate() != sample_rate {
                return Err(Error::SampleRateMismatch {
                    expected: sample_rate,
                    found: audio.sample_rate(),
                });
            }
            let tiles = match &e.tile_frames_path {
                None => None,
                Some(dir) => {
                    let frames = list_frames(dir)?
                        .iter()
                        .map(|p| Frame::read_png(p).map(|f| f.resize_nearest(TILE_SIZE, TILE_SIZE)))
                        .collect::<Result<Vec<_>>>()?;
                    if frames.is_empty() {
                        log::warn!("{}: no PNG frames, using a solid tile", dir.display());
                        None
                    } else {
                        Some(frames)
                    }
                }
            };
            let mut entry = e.clone();
            entry.duration = audio.duration_secs();
            Ok(Asset { entry, audio, tiles })
        })
        .collect()
}

/// One placed event. Times are whole samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneEvent {
    pub asset: usize,
    pub class_idx: u8,
    pub source_idx: u32,
    pub onset_sample: usize,
    pub len_samples: usize,
    /// Requested direction; rendering uses the nearest RIR.
    pub doa: Doa<f64>,
    pub gain: f64,
}

impl SceneEvent {
    pub fn onset(&self, sample_rate: u32) -> f64 {
        self.onset_sample as f64 / sample_rate as f64
    }

    pub fn end_sample(&self) -> usize {
        self.onset_sample + self.len_samples
    }

    pub fn active_frames(&self, sample_rate: u32) -> Range<u32> {
        active_frames(self.onset_sample, self.len_samples, sample_rate)
    }
}

/// Label frames overlapping samples `onset..onset + len`.
pub fn active_frames(onset: usize, len: usize, sample_rate: u32) -> Range<u32> {
    let per_sec = LABEL_FRAMES_PER_SEC as u64;
    let sr = sample_rate as u64;
    let first = onset as u64 * per_sec / sr;
    let end = ((onset + len) as u64 * per_sec).div_ceil(sr);
    first as u32..end as u32
}

/// A complete, validated scene plan.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    duration: f64,
    sample_rate: u32,
    seed: u64,
    max_polyphony: usize,
    events: Vec<SceneEvent>,
}

impl SceneSpec {
    /// Checks that every event lies inside the scene, references a known
    /// asset of the same class and length, and that no label frame has more
    /// than `max_polyphony` active events.
    pub fn new(
        duration: f64,
        sample_rate: u32,
        seed: u64,
        max_polyphony: usize,
        events: Vec<SceneEvent>,
        assets: &[AssetEntry],
    ) -> Result<Self> {
        if !(duration >= 0.0 && duration.is_finite()) {
            return Err(Error::InvalidScene(format!("duration {duration}")));
        }
        if sample_rate == 0 {
            return Err(Error::InvalidSampleRate(sample_rate));
        }
        if max_polyphony == 0 {
            return Err(Error::InvalidScene("max polyphony must be at least 1".into()));
        }
        let total = samples_for(duration, sample_rate);
        let mut counts = vec![0usize; frame_count(total, sample_rate)];
        for (i, e) in events.iter().enumerate() {
            let a = assets
                .get(e.asset)
                .ok_or_else(|| Error::InvalidScene(format!("event {i}: unknown asset {}", e.asset)))?;
            if a.class_idx != e.class_idx {
                return Err(Error::InvalidScene(format!("event {i}: class differs from its asset")));
            }
            if e.len_samples != samples_for(a.duration, sample_rate) || e.len_samples == 0 {
                return Err(Error::InvalidScene(format!("event {i}: length differs from its asset")));
            }
            if e.end_sample() > total {
                return Err(Error::InvalidScene(format!(
                    "event {i} ends at {:.3} s, after the scene end {duration} s",
                    e.end_sample() as f64 / sample_rate as f64
                )));
            }
            if !(e.gain.is_finite()) {
                return Err(Error::InvalidScene(format!("event {i}: gain {}", e.gain)));
            }
            for f in e.active_frames(sample_rate) {
                counts[f as usize] += 1;
                if counts[f as usize] > max_polyphony {
                    return Err(Error::InvalidScene(format!(
                        "frame {f} has more than {max_polyphony} active events"
                    )));
                }
            }
        }
        Ok(Self {
            duration,
            sample_rate,
            seed,
            max_polyphony,
            events,
        })
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn max_polyphony(&self) -> usize {
        self.max_polyphony
    }

    pub fn events(&self) -> &[SceneEvent] {
        &self.events
    }

    pub fn total_samples(&self) -> usize {
        samples_for(self.duration, self.sample_rate)
    }

    pub fn label_frames(&self) -> usize {
        frame_count(self.total_samples(), self.sample_rate)
    }
}

fn samples_for(seconds: f64, sample_rate: u32) -> usize {
    (seconds * sample_rate as f64).round() as usize
}

fn frame_count(samples: usize, sample_rate: u32) -> usize {
    (samples as u64 * LABEL_FRAMES_PER_SEC as u64).div_ceil(sample_rate as u64) as usize
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneConfig {
    pub duration: f64,
    pub max_polyphony: usize,
    /// Events to place; `None` means one per three seconds of scene.
    pub num_events: Option<usize>,
    pub sample_rate: u32,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            duration: DEFAULT_DURATION,
            max_polyphony: DEFAULT_MAX_POLYPHONY,
            num_events: None,
            sample_rate: DEFAULT_SAMPLE_RATE,
        }
    }
}

impl SceneConfig {
    pub fn target_events(&self) -> usize {
        self.num_events.unwrap_or((self.duration / 3.0).round() as usize)
    }
}

/// Samples a scene with the bank's sample rate and the default event count.
pub fn sample_scene<T: Scalar>(
    seed: u64,
    assets: &[AssetEntry],
    bank: &RirBank<T>,
    duration: f64,
    max_polyphony: usize,
) -> Result<SceneSpec> {
    let cfg = SceneConfig {
        duration,
        max_polyphony,
        num_events: None,
        sample_rate: bank.sample_rate(),
    };
    sample_scene_with(seed, assets, bank, &cfg)
}

/// Places events one at a time: a uniformly chosen asset at a uniformly
/// drawn sample onset, redrawn while it would push any label frame past
/// `max_polyphony`. Each event takes the direction of a uniformly chosen
/// bank entry.
pub fn sample_scene_with<T: Scalar>(
    seed: u64,
    assets: &[AssetEntry],
    bank: &RirBank<T>,
    cfg: &SceneConfig,
) -> Result<SceneSpec> {
    if assets.is_empty() {
        return Err(Error::InvalidArgument("no assets to sample from".into()));
    }
    if cfg.max_polyphony == 0 {
        return Err(Error::InvalidArgument("max polyphony must be at least 1".into()));
    }
    let sr = cfg.sample_rate;
    let total = samples_for(cfg.duration, sr);
    let fitting: Vec<usize> = (0..assets.len())
        .filter(|&i| {
            let n = samples_for(assets[i].duration, sr);
            n > 0 && n <= total
        })
        .collect();
    let target = cfg.target_events();
    if fitting.is_empty() && target > 0 {
        return Err(Error::InfeasibleScene {
            attempts: 0,
            reason: format!("no asset fits in {} s", cfg.duration),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0usize; frame_count(total, sr)];
    let mut events = Vec::with_capacity(target);
    let mut attempts = 0;
    while events.len() < target {
        if attempts == MAX_ATTEMPTS {
            return Err(Error::InfeasibleScene {
                attempts,
                reason: format!(
                    "placed {} of {target} events under max polyphony {}",
                    events.len(),
                    cfg.max_polyphony
                ),
            });
        }
        attempts += 1;
        let asset = fitting[rng.random_range(0..fitting.len())];
        let len = samples_for(assets[asset].duration, sr);
        let onset = rng.random_range(0..=total - len);
        let frames = active_frames(onset, len, sr);
        if frames.clone().any(|f| counts[f as usize] >= cfg.max_polyphony) {
            continue;
        }
        for f in frames {
            counts[f as usize] += 1;
        }
        let rir = &bank.entries()[rng.random_range(0..bank.len())];
        events.push(SceneEvent {
            asset,
            class_idx: assets[asset].class_idx,
            source_idx: events.len() as u32,
            onset_sample: onset,
            len_samples: len,
            doa: rir.doa.cast(),
            gain: 1.0,
        });
    }
    events.sort_by_key(|e| (e.onset_sample, e.source_idx));
    SceneSpec::new(cfg.duration, sr, seed, cfg.max_polyphony, events, assets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entries(durs: &[f64]) -> Vec<AssetEntry> {
        durs.iter()
            .enumerate()
            .map(|(i, &d)| AssetEntry::new(format!("a{i}.wav").into(), None, (i % 13) as u8, d).unwrap())
            .collect()
    }

    fn bank() -> RirBank<f64> {
        RirBank::anechoic(24_000)
    }

    #[test]
    fn deterministic() {
        let a = entries(&[2.0, 3.5, 1.25]);
        let s1 = sample_scene(9, &a, &bank(), 30.0, 3).unwrap();
        let s2 = sample_scene(9, &a, &bank(), 30.0, 3).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(s1.events().len(), 10);
        assert_ne!(s1, sample_scene(10, &a, &bank(), 30.0, 3).unwrap());
    }

    #[test]
    fn impossible_polyphony() {
        let a = entries(&[20.0, 20.0]);
        match sample_scene(1, &a, &bank(), 30.0, 1) {
            Err(Error::InfeasibleScene { attempts, .. }) => assert_eq!(attempts, MAX_ATTEMPTS),
            Ok(s) => assert!(s.events().len() <= 1),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn polyphony_bound_holds() {
        let a = entries(&[4.0, 6.0, 2.5, 9.0]);
        for seed in 0..20 {
            let s = sample_scene(seed, &a, &bank(), 30.0, 3).unwrap();
            let mut counts = vec![0; s.label_frames()];
            for e in s.events() {
                assert!(e.end_sample() <= s.total_samples());
                for f in e.active_frames(24_000) {
                    counts[f as usize] += 1;
                }
            }
            assert!(counts.iter().all(|&c| c <= 3));
        }
    }

    #[test]
    fn event_outside_scene_is_rejected() {
        let a = entries(&[2.0]);
        let ev = SceneEvent {
            asset: 0,
            class_idx: 0,
            source_idx: 0,
            onset_sample: 29 * 24_000,
            len_samples: 48_000,
            doa: Doa::new(0.0, 0.0).unwrap(),
            gain: 1.0,
        };
        assert!(matches!(SceneSpec::new(30.0, 24_000, 0, 3, vec![ev], &a), Err(Error::InvalidScene(_))));
        let ok = SceneEvent { onset_sample: 0, ..ev };
        assert!(SceneSpec::new(30.0, 24_000, 0, 3, vec![ok], &a).is_ok());
    }

    #[test]
    fn frame_ranges() {
        assert_eq!(active_frames(0, 24_000, 24_000), 0..10);
        assert_eq!(active_frames(2_400, 1, 24_000), 1..2);
        assert_eq!(active_frames(2_399, 2, 24_000), 0..2);
        assert_eq!(active_frames(0, 25_000, 24_000), 0..11);
    }
}
