//! File-level jobs over the dataset directory layout:
//! `foa/<stem>.wav`, `metadata/<stem>.csv` and `video/<stem>/NNNNNN.png`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::augment::{augmentation_set, transform_foa, transform_frame, transform_metadata, AcsTransform};
use crate::doaval::{validate_scene, ValidationReport};
use crate::error::{Error, Result};
use crate::foa::wav::{read_foa, write_foa, SampleFormat};
use crate::frame::{list_frames, Frame};
use crate::geometry::FrameGeometry;
use crate::io::write_bytes_atomic;
use crate::labels::accdoa::{encode_multi_accdoa, MultiAccdoaTensor};
use crate::labels::metadata::{read_metadata, write_metadata};
use crate::labels::visual::{encode_visual_track, read_boxes, track_to_tensor_file};
use crate::metrics::{EvalConfig, SeldScores, SeldStats};
use crate::synth::rir_bank::RirBank;
use crate::synth::scene::{load_assets, sample_scene_with, Asset, AssetEntry, SceneConfig};
use crate::synth::{render_audio, SceneVideo};

pub const AUDIO_DIR: &str = "foa";
pub const METADATA_DIR: &str = "metadata";
pub const VIDEO_DIR: &str = "video";

/// Paths of one audio/metadata/video output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub stem: String,
    pub audio: PathBuf,
    pub metadata: PathBuf,
    /// Present only when frames were written.
    pub video: Option<PathBuf>,
}

impl Triple {
    fn under(out: &Path, stem: String, with_video: bool) -> Self {
        Self {
            audio: out.join(AUDIO_DIR).join(format!("{stem}.wav")),
            metadata: out.join(METADATA_DIR).join(format!("{stem}.csv")),
            video: with_video.then(|| out.join(VIDEO_DIR).join(&stem)),
            stem,
        }
    }
}

/// Stem of an augmented output: `<stem>_t<index>`.
pub fn augmented_stem(stem: &str, t: AcsTransform) -> String {
    format!("{stem}_t{}", t.index())
}

/// One input clip expanded into all eight augmentations.
#[derive(Debug, Clone)]
pub struct AugmentJob {
    pub audio: PathBuf,
    pub metadata: PathBuf,
    pub video: Option<PathBuf>,
    pub out: PathBuf,
    /// Defaults to the audio file stem.
    pub stem: Option<String>,
}

impl AugmentJob {
    fn stem(&self) -> Result<String> {
        match &self.stem {
            Some(s) => Ok(s.clone()),
            None => self
                .audio
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .ok_or_else(|| Error::InvalidArgument(format!("no file stem in {}", self.audio.display()))),
        }
    }

    /// Writes eight triples, identity first. Audio keeps the input sample
    /// format. Each input frame is decoded once; the identity frame is
    /// copied byte for byte.
    pub fn run(&self) -> Result<Vec<Triple>> {
        let stem = self.stem()?;
        let (clip, format) = read_foa::<f64>(&self.audio)?;
        let events = read_metadata::<f64>(&self.metadata)?;
        let set = augmentation_set();
        let triples: Vec<Triple> = set
            .iter()
            .map(|&t| Triple::under(&self.out, augmented_stem(&stem, t), self.video.is_some()))
            .collect();
        fs::create_dir_all(self.out.join(AUDIO_DIR))?;
        fs::create_dir_all(self.out.join(METADATA_DIR))?;
        for (t, tr) in set.iter().zip(&triples) {
            write_foa(&tr.audio, &transform_foa(*t, &clip)?, format)?;
            write_metadata(&transform_metadata(*t, &events), &tr.metadata)?;
        }
        if let Some(dir) = &self.video {
            let frames = list_frames(dir)?;
            if frames.is_empty() {
                log::warn!("{}: no PNG frames", dir.display());
            }
            for tr in &triples {
                fs::create_dir_all(tr.video.as_ref().unwrap())?;
            }
            let mut geometry: Option<FrameGeometry> = None;
            for path in &frames {
                let name = path.file_name().unwrap();
                let bytes = fs::read(path)?;
                write_bytes_atomic(&triples[0].video.as_ref().unwrap().join(name), &bytes)?;
                let frame = Frame::read_png(path)?;
                let g = match geometry {
                    Some(g) => g,
                    None => *geometry.insert(FrameGeometry::new(frame.width(), frame.height())?),
                };
                for (t, tr) in set.iter().zip(&triples).skip(1) {
                    transform_frame(*t, &frame, &g)?.write_png(&tr.video.as_ref().unwrap().join(name))?;
                }
            }
        }
        Ok(triples)
    }
}

/// Where a synthesis job takes its room responses from.
#[derive(Debug, Clone, PartialEq)]
pub enum RirSource {
    /// The built-in 36 x 9 grid of delta responses.
    Anechoic,
    Manifest(PathBuf),
}

#[derive(Debug, Clone)]
pub struct SynthJob {
    pub count: usize,
    pub seed: u64,
    pub assets: PathBuf,
    pub rirs: RirSource,
    pub out: PathBuf,
    pub scene: SceneConfig,
    /// `None` skips video.
    pub video: Option<(FrameGeometry, f64)>,
}

/// Seed of scene `index` in a batch seeded with `seed`.
pub fn scene_seed(seed: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng.next_u64()
}

pub fn scene_stem(index: usize) -> String {
    format!("scene_{index:04}")
}

/// A synthesis job with assets and RIRs loaded.
pub struct PreparedSynth {
    job: SynthJob,
    assets: Vec<Asset<f64>>,
    entries: Vec<AssetEntry>,
    bank: RirBank<f64>,
}

impl SynthJob {
    pub fn prepare(self) -> Result<PreparedSynth> {
        let sr = self.scene.sample_rate;
        let bank = match &self.rirs {
            RirSource::Anechoic => RirBank::anechoic(sr),
            RirSource::Manifest(p) => RirBank::load(p, sr)?,
        };
        let assets = load_assets::<f64>(&AssetEntry::read_manifest(&self.assets)?, sr)?;
        let entries = assets.iter().map(|a| a.entry.clone()).collect();
        fs::create_dir_all(self.out.join(AUDIO_DIR))?;
        fs::create_dir_all(self.out.join(METADATA_DIR))?;
        Ok(PreparedSynth {
            job: self,
            assets,
            entries,
            bank,
        })
    }
}

impl PreparedSynth {
    pub fn count(&self) -> usize {
        self.job.count
    }

    /// Samples and writes scene `index`. Output depends only on the job and
    /// `index`, so scenes can be rendered in any order.
    pub fn render_scene(&self, index: usize) -> Result<Triple> {
        let seed = scene_seed(self.job.seed, index);
        let spec = sample_scene_with(seed, &self.entries, &self.bank, &self.job.scene)?;
        let (audio, labels) = render_audio(&spec, &self.assets, &self.bank)?;
        let tr = Triple::under(&self.job.out, scene_stem(index), self.job.video.is_some());
        write_foa(&tr.audio, &audio, SampleFormat::Pcm16)?;
        write_metadata(&labels, &tr.metadata)?;
        if let (Some((g, fps)), Some(dir)) = (self.job.video, &tr.video) {
            SceneVideo::new(&spec, &self.assets, &self.bank, g, fps)?.write_sequence(dir)?;
        }
        Ok(tr)
    }
}

/// Scores of one reference/prediction file pair.
#[derive(Debug, Clone)]
pub struct FileScores {
    pub stem: String,
    pub scores: SeldScores<f64>,
    pub stats: SeldStats,
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub files: Vec<FileScores>,
    pub total: SeldStats,
    pub scores: SeldScores<f64>,
}

fn csv_stems(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let mut out = BTreeMap::new();
    for e in fs::read_dir(dir)? {
        let p = e?.path();
        if p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")) {
            if let Some(s) = p.file_stem() {
                out.insert(s.to_string_lossy().into_owned(), p);
            }
        }
    }
    Ok(out)
}

/// Pairs `ref_dir/<stem>.csv` with `pred_dir/<stem>.csv`. A missing
/// prediction counts as an empty one; predictions without a reference are
/// ignored.
pub fn evaluate_dirs(ref_dir: &Path, pred_dir: &Path, cfg: &EvalConfig) -> Result<EvalReport> {
    let refs = csv_stems(ref_dir)?;
    let preds = csv_stems(pred_dir)?;
    for stem in preds.keys().filter(|s| !refs.contains_key(*s)) {
        log::warn!("{stem}: prediction without a reference, ignored");
    }
    let mut total = SeldStats::default();
    let mut files = Vec::with_capacity(refs.len());
    for (stem, rp) in &refs {
        let reference = read_metadata::<f64>(rp)?;
        let predicted = match preds.get(stem) {
            Some(p) => read_metadata::<f64>(p)?,
            None => {
                log::warn!("{stem}: no prediction, scoring as empty");
                Vec::new()
            }
        };
        let stats = SeldStats::from_events(&reference, &predicted, cfg);
        total.accumulate(&stats);
        files.push(FileScores {
            stem: stem.clone(),
            scores: stats.scores(cfg.average),
            stats,
        });
    }
    let scores = total.scores(cfg.average);
    Ok(EvalReport { files, total, scores })
}

pub fn validate_files(audio: &Path, metadata: &Path, tolerance: f64) -> Result<ValidationReport<f64>> {
    let (clip, _) = read_foa::<f64>(audio)?;
    let events = read_metadata::<f64>(metadata)?;
    Ok(validate_scene(&clip, &events, tolerance))
}

/// Encodes a metadata file as a multi-ACCDOA tensor file. `frames`
/// defaults to one past the last labelled frame.
pub fn encode_accdoa_file(metadata: &Path, frames: Option<usize>, out: &Path) -> Result<MultiAccdoaTensor<f64>> {
    let events = read_metadata::<f64>(metadata)?;
    let frames = frames.unwrap_or_else(|| events.iter().map(|e| e.frame as usize + 1).max().unwrap_or(0));
    let tensor = encode_multi_accdoa(&events, frames)?;
    tensor.write(out)?;
    Ok(tensor)
}

/// Encodes a `frame,cx,cy,w,h` box file as a visual embedding tensor file.
/// Returns the number of frames written.
pub fn encode_visual_file(boxes: &Path, frames: Option<usize>, out: &Path) -> Result<usize> {
    let boxes = read_boxes::<f64>(boxes)?;
    let frames = frames.unwrap_or_else(|| boxes.keys().next_back().map_or(0, |&f| f as usize + 1));
    track_to_tensor_file(&encode_visual_track(&boxes, frames)).write(out)?;
    Ok(frames)
}
