//! Audio and video rendering of a [`SceneSpec`].

use std::path::Path;

use crate::error::{Error, Result};
use crate::foa::{add_at, convolve_rir, peak_normalize, FoaClip};
use crate::frame::{frame_file_name, Frame, Rgb};
use crate::geometry::{Doa, FrameGeometry};
use crate::io::write_bytes_atomic;
use crate::labels::metadata::sort_events;
use crate::labels::SeldEvent;
use crate::scalar::Scalar;
use crate::synth::rir_bank::RirBank;
use crate::synth::scene::{Asset, SceneSpec};

/// Edge length of an event tile in pixels.
pub const TILE_SIZE: usize = 50;

/// Peak level of a rendered mix.
pub const PEAK_TARGET: f64 = 0.95;

pub const DEFAULT_FPS: f64 = 29.97;

const PALETTE: [Rgb; 13] = [
    [230, 25, 75],
    [60, 180, 75],
    [255, 225, 25],
    [0, 130, 200],
    [245, 130, 48],
    [145, 30, 180],
    [70, 240, 240],
    [240, 50, 230],
    [210, 245, 60],
    [250, 190, 212],
    [0, 128, 128],
    [220, 190, 255],
    [170, 110, 40],
];

/// Solid tile colour for events without tile frames. Never black.
pub fn class_color(class_idx: u8) -> Rgb {
    PALETTE[class_idx as usize % PALETTE.len()]
}

/// Convolves each event with its nearest RIR, mixes, and peak-normalizes.
///
/// The returned labels list every event in each 100 ms frame it overlaps,
/// with the direction of the RIR actually used.
pub fn render_audio<T: Scalar>(
    spec: &SceneSpec,
    assets: &[Asset<T>],
    bank: &RirBank<T>,
) -> Result<(FoaClip<T>, Vec<SeldEvent<T>>)> {
    let sr = spec.sample_rate();
    if bank.sample_rate() != sr {
        return Err(Error::SampleRateMismatch {
            expected: sr,
            found: bank.sample_rate(),
        });
    }
    let mut mix = FoaClip::silent(spec.total_samples(), sr)?;
    let mut labels = Vec::new();
    for (i, ev) in spec.events().iter().enumerate() {
        let asset = assets
            .get(ev.asset)
            .ok_or_else(|| Error::InvalidScene(format!("event {i}: unknown asset {}", ev.asset)))?;
        if asset.audio.sample_rate() != sr {
            return Err(Error::SampleRateMismatch {
                expected: sr,
                found: asset.audio.sample_rate(),
            });
        }
        if asset.audio.len() != ev.len_samples {
            return Err(Error::InvalidScene(format!("event {i}: asset length changed since planning")));
        }
        let rir = &bank.entries()[bank.nearest_index(&ev.doa.cast())];
        let mut wet = convolve_rir(&asset.audio, rir)?;
        if ev.gain != 1.0 {
            wet = scale(wet, T::lit(ev.gain))?;
        }
        add_at(&mut mix, &wet, ev.onset_sample);
        for f in ev.active_frames(sr) {
            labels.push(SeldEvent::new(f, ev.class_idx, ev.source_idx, rir.doa)?);
        }
    }
    let mix = match peak_normalize(&mix, T::lit(PEAK_TARGET)) {
        Ok(m) => m,
        Err(Error::SilentClip) => mix,
        Err(e) => return Err(e),
    };
    sort_events(&mut labels);
    Ok((mix, labels))
}

fn scale<T: Scalar>(c: FoaClip<T>, g: T) -> Result<FoaClip<T>> {
    let sr = c.sample_rate();
    FoaClip::new(c.into_channels().map(|ch| ch.into_iter().map(|s| s * g).collect()), sr)
}

struct Placement {
    onset: f64,
    end: f64,
    col: usize,
    row: usize,
    asset: usize,
    class_idx: u8,
}

/// Lazily rendered 360° canvas for a scene; frames are produced one at a
/// time so long scenes never sit in memory at once.
pub struct SceneVideo<'a, T> {
    assets: &'a [Asset<T>],
    geometry: FrameGeometry,
    fps: f64,
    frames: usize,
    placements: Vec<Placement>,
}

impl<'a, T: Scalar> SceneVideo<'a, T> {
    /// Tiles sit at the direction of each event's nearest RIR, matching the
    /// audio labels.
    pub fn new(
        spec: &SceneSpec,
        assets: &'a [Asset<T>],
        bank: &RirBank<T>,
        geometry: FrameGeometry,
        fps: f64,
    ) -> Result<Self> {
        if !(fps > 0.0 && fps.is_finite()) {
            return Err(Error::InvalidArgument(format!("fps {fps}")));
        }
        let sr = spec.sample_rate();
        let placements = spec
            .events()
            .iter()
            .map(|ev| {
                let doa: Doa<T> = bank.entries()[bank.nearest_index(&ev.doa.cast())].doa;
                let (col, row) = geometry.project(&doa);
                Placement {
                    onset: ev.onset_sample as f64 / sr as f64,
                    end: ev.end_sample() as f64 / sr as f64,
                    col,
                    row,
                    asset: ev.asset,
                    class_idx: ev.class_idx,
                }
            })
            .collect();
        let frames = (spec.duration() * fps - 1e-9).ceil().max(0.0) as usize;
        Ok(Self {
            assets,
            geometry,
            fps,
            frames,
            placements,
        })
    }

    pub fn frame_count(&self) -> usize {
        self.frames
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    pub fn geometry(&self) -> FrameGeometry {
        self.geometry
    }

    /// Frame `index`, shown at `index / fps` seconds. Later events draw on
    /// top of earlier ones.
    pub fn render_frame(&self, index: usize) -> Frame {
        let (w, h) = (self.geometry.width(), self.geometry.height());
        let mut frame = Frame::black(w, h);
        let t = index as f64 / self.fps;
        for p in &self.placements {
            if t < p.onset || t >= p.end {
                continue;
            }
            let tile = self.assets.get(p.asset).and_then(|a| a.tiles.as_ref()).map(|tiles| {
                let i = ((t - p.onset) * self.fps).floor() as usize % tiles.len();
                &tiles[i]
            });
            let size_w = TILE_SIZE.min(w);
            let size_h = TILE_SIZE.min(h);
            let top = p.row.saturating_sub(TILE_SIZE / 2).min(h - size_h);
            let left = (p.col + w - (TILE_SIZE / 2) % w) % w;
            let color = class_color(p.class_idx);
            for dy in 0..size_h {
                for dx in 0..size_w {
                    let px = tile.map_or(color, |f| f.pixel(dx, dy));
                    frame.set_pixel((left + dx) % w, top + dy, px);
                }
            }
        }
        frame
    }

    /// Writes `000000.png`, `000001.png`, ... and a `sequence.json` sidecar
    /// into `dir`.
    pub fn write_sequence(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for i in 0..self.frames {
            self.render_frame(i).write_png(&dir.join(frame_file_name(i)))?;
        }
        let sidecar = serde_json::json!({
            "width": self.geometry.width(),
            "height": self.geometry.height(),
            "fps": self.fps,
            "frames": self.frames,
            "pattern": "%06d.png",
            "encode": format!(
                "ffmpeg -framerate {} -i %06d.png -c:v libx264 -pix_fmt yuv420p video.mp4",
                self.fps
            ),
        });
        let mut text = serde_json::to_string_pretty(&sidecar).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        text.push('\n');
        write_bytes_atomic(&dir.join("sequence.json"), text.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foa::{encode_foa_anechoic, MonoClip, Rir};
    use crate::frame::BLACK;
    use crate::synth::scene::{AssetEntry, SceneEvent};

    fn asset(samples: Vec<f64>, class_idx: u8) -> Asset<f64> {
        let audio = MonoClip::new(samples, 24_000).unwrap();
        Asset {
            entry: AssetEntry::new("x.wav".into(), None, class_idx, audio.duration_secs()).unwrap(),
            audio,
            tiles: None,
        }
    }

    fn one_event(a: &Asset<f64>, doa: Doa<f64>, onset: usize) -> SceneSpec {
        let ev = SceneEvent {
            asset: 0,
            class_idx: a.entry.class_idx,
            source_idx: 0,
            onset_sample: onset,
            len_samples: a.audio.len(),
            doa,
            gain: 1.0,
        };
        SceneSpec::new(2.0, 24_000, 0, 3, vec![ev], std::slice::from_ref(&a.entry)).unwrap()
    }

    #[test]
    fn delta_rir_gives_panned_asset() {
        let d = Doa::new(30.0, 10.0).unwrap();
        let a = asset((0..12_345).map(|i| ((i as f64) * 0.01).sin() * 0.3).collect(), 2);
        let bank = RirBank::new(vec![Rir::anechoic(d, 24_000)]).unwrap();
        let spec = one_event(&a, d, 0);
        let (mix, labels) = render_audio(&spec, std::slice::from_ref(&a), &bank).unwrap();
        assert_eq!(mix.len(), 48_000);
        let panned = encode_foa_anechoic(&a.audio, &d).unwrap();
        let g = PEAK_TARGET / panned.peak();
        for ch in 0..4 {
            for (m, p) in mix.channel(ch).iter().zip(panned.channel(ch)) {
                assert!((m - p * g).abs() < 1e-12);
            }
        }
        let frames: Vec<u32> = labels.iter().map(|e| e.frame).collect();
        assert_eq!(frames, (0..6).collect::<Vec<_>>());
        assert!(labels.iter().all(|e| e.doa == d && e.class_idx == 2));
    }

    #[test]
    fn empty_scene_is_silent() {
        let spec = SceneSpec::new(1.5, 24_000, 0, 3, vec![], &[]).unwrap();
        let (mix, labels) = render_audio::<f64>(&spec, &[], &RirBank::anechoic(24_000)).unwrap();
        assert_eq!(mix.len(), 36_000);
        assert_eq!(mix.peak(), 0.0);
        assert!(labels.is_empty());
    }

    #[test]
    fn tile_positions() {
        let a = asset(vec![0.1; 24_000], 4);
        let g = FrameGeometry::default();
        let bank = RirBank::new(vec![Rir::anechoic(Doa::new(0.0, 0.0).unwrap(), 24_000)]).unwrap();
        let spec = one_event(&a, Doa::new(0.0, 0.0).unwrap(), 0);
        let assets = [a.clone()];
        let v = SceneVideo::new(&spec, &assets, &bank, g, DEFAULT_FPS).unwrap();
        assert_eq!(v.frame_count(), 60);
        let f = v.render_frame(0);
        assert_eq!(f.pixel(960, 480), class_color(4));
        assert_eq!(f.pixel(935, 455), class_color(4));
        assert_eq!(f.pixel(984, 504), class_color(4));
        assert_eq!(f.pixel(934, 480), BLACK);
        assert_eq!(f.pixel(985, 480), BLACK);
        // event has ended by frame 30 (1.001 s)
        assert!(v.render_frame(30).is_black());

        let seam = Doa::new(179.9, 0.0).unwrap();
        let bank = RirBank::new(vec![Rir::anechoic(seam, 24_000)]).unwrap();
        let spec = one_event(&a, seam, 0);
        let v = SceneVideo::new(&spec, &assets, &bank, g, DEFAULT_FPS).unwrap();
        let f = v.render_frame(0);
        assert_eq!(g.project(&seam).0, 0);
        assert_eq!(f.pixel(0, 480), class_color(4));
        assert_eq!(f.pixel(24, 480), class_color(4));
        assert_eq!(f.pixel(1919, 480), class_color(4));
        assert_eq!(f.pixel(1895, 480), class_color(4));
        assert_eq!(f.pixel(1894, 480), BLACK);
    }

    #[test]
    fn pole_tiles_clamp_inside() {
        let a = asset(vec![0.1; 100], 0);
        let up = Doa::new(0.0, 88.0).unwrap();
        let bank = RirBank::new(vec![Rir::anechoic(up, 24_000)]).unwrap();
        let spec = one_event(&a, up, 0);
        let assets = [a];
        let v = SceneVideo::new(&spec, &assets, &bank, FrameGeometry::default(), 30.0).unwrap();
        let f = v.render_frame(0);
        let (c, r) = FrameGeometry::default().project(&up);
        assert_ne!(f.pixel(c, r), BLACK);
        assert_eq!(f.pixel(c, 0), class_color(0));
        assert_eq!(f.pixel(c, 50), BLACK);
    }
}
