//! Multi-ACCDOA targets: per frame, up to three tracks per class, each a
//! Cartesian direction scaled by activity (unit length when active, zero
//! otherwise).

use std::collections::BTreeMap;
use std::path::Path;

use crate::augment::AcsTransform;
use crate::error::{Error, Result};
use crate::geometry::{Doa, Vec3};
use crate::labels::metadata::SeldEvent;
use crate::labels::tensor_file::{TensorFile, ACCDOA_MAGIC};
use crate::labels::NUM_CLASSES;
use crate::scalar::Scalar;

pub const NUM_TRACKS: usize = 3;

/// Activity threshold on the vector norm used when decoding.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Dense `frames x NUM_TRACKS x NUM_CLASSES x 3` tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiAccdoaTensor<T> {
    frames: usize,
    values: Vec<T>,
}

impl<T: Scalar> MultiAccdoaTensor<T> {
    pub fn zeros(frames: usize) -> Self {
        Self {
            frames,
            values: vec![T::zero(); frames * NUM_TRACKS * NUM_CLASSES * 3],
        }
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn shape(&self) -> [usize; 4] {
        [self.frames, NUM_TRACKS, NUM_CLASSES, 3]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    fn offset(frame: usize, track: usize, class: usize) -> usize {
        ((frame * NUM_TRACKS + track) * NUM_CLASSES + class) * 3
    }

    pub fn get(&self, frame: usize, track: usize, class: usize) -> Vec3<T> {
        let o = Self::offset(frame, track, class);
        Vec3::new(self.values[o], self.values[o + 1], self.values[o + 2])
    }

    pub fn set(&mut self, frame: usize, track: usize, class: usize, v: Vec3<T>) {
        let o = Self::offset(frame, track, class);
        self.values[o] = v.x;
        self.values[o + 1] = v.y;
        self.values[o + 2] = v.z;
    }

    /// Applies an augmentation transform to every stored vector.
    pub fn transformed(&self, t: AcsTransform) -> Self {
        let mut out = self.clone();
        for chunk in out.values.chunks_exact_mut(3) {
            let v = t.apply_vec(Vec3::new(chunk[0], chunk[1], chunk[2]));
            chunk.copy_from_slice(&[v.x, v.y, v.z]);
        }
        out
    }

    pub fn to_tensor_file(&self) -> TensorFile {
        let values = self.values.iter().map(|v| v.as_f64() as f32).collect();
        TensorFile::new(
            ACCDOA_MAGIC,
            [self.frames as u32, NUM_TRACKS as u32, NUM_CLASSES as u32, 3],
            values,
        )
        .expect("shape matches value count")
    }

    pub fn from_tensor_file(t: &TensorFile) -> Result<Self> {
        if t.magic != ACCDOA_MAGIC || t.dims[1..] != [NUM_TRACKS as u32, NUM_CLASSES as u32, 3] {
            return Err(Error::TensorFormat(format!(
                "not a multi-ACCDOA tensor (dims {:?})",
                t.dims
            )));
        }
        Ok(Self {
            frames: t.dims[0] as usize,
            values: t.values.iter().map(|&v| T::lit(v as f64)).collect(),
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        self.to_tensor_file().write(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_tensor_file(&TensorFile::read(path)?)
    }
}

/// Fills track slots 0, 1, 2 with the unit vectors of each frame/class's
/// sources in ascending source order. Events at or beyond `frames` are
/// ignored; a repeated `(frame, class, source)` keeps its first direction.
pub fn encode_multi_accdoa<T: Scalar>(events: &[SeldEvent<T>], frames: usize) -> Result<MultiAccdoaTensor<T>> {
    let mut groups: BTreeMap<(u32, u8), BTreeMap<u32, Doa<T>>> = BTreeMap::new();
    for e in events.iter().filter(|e| (e.frame as usize) < frames) {
        groups
            .entry((e.frame, e.class_idx))
            .or_default()
            .entry(e.source_idx)
            .or_insert(e.doa);
    }
    let mut tensor = MultiAccdoaTensor::zeros(frames);
    for ((frame, class), sources) in groups {
        if sources.len() > NUM_TRACKS {
            return Err(Error::TooManySources {
                frame,
                class_idx: class,
                max: NUM_TRACKS,
            });
        }
        for (track, doa) in sources.values().enumerate() {
            tensor.set(frame as usize, track, class as usize, doa.to_unit_vec());
        }
    }
    Ok(tensor)
}

/// Every triple with norm above `threshold` becomes an event whose source
/// index is its track. Output is sorted by `(frame, class, track)`.
pub fn decode_multi_accdoa<T: Scalar>(t: &MultiAccdoaTensor<T>, threshold: T) -> Vec<SeldEvent<T>> {
    let mut out = Vec::new();
    for frame in 0..t.frames {
        for class in 0..NUM_CLASSES {
            for track in 0..NUM_TRACKS {
                let v = t.get(frame, track, class);
                if v.norm() > threshold {
                    if let Ok(doa) = Doa::from_vec(v) {
                        out.push(SeldEvent {
                            frame: frame as u32,
                            class_idx: class as u8,
                            source_idx: track as u32,
                            doa,
                        });
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::{augmentation_set, transform_metadata};

    fn ev(frame: u32, class: u8, src: u32, az: f64, el: f64) -> SeldEvent<f64> {
        SeldEvent::new(frame, class, src, Doa::new(az, el).unwrap()).unwrap()
    }

    #[test]
    fn single_placement() {
        let t = encode_multi_accdoa(&[ev(0, 2, 0, 0.0, 0.0)], 2).unwrap();
        assert_eq!(t.shape(), [2, 3, 13, 3]);
        assert_eq!(t.get(0, 0, 2), Vec3::new(1.0, 0.0, 0.0));
        let nonzero = t.values().iter().filter(|v| **v != 0.0).count();
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn no_events_all_zero() {
        let t = encode_multi_accdoa::<f64>(&[], 4).unwrap();
        assert!(t.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn four_sources_is_an_error() {
        let events: Vec<_> = (0..4).map(|s| ev(3, 1, s, 10.0 * s as f64, 0.0)).collect();
        assert!(matches!(
            encode_multi_accdoa(&events, 5),
            Err(Error::TooManySources { frame: 3, class_idx: 1, .. })
        ));
        // the same four sources spread over two classes fit
        let mut spread = events.clone();
        spread[3].class_idx = 2;
        assert!(encode_multi_accdoa(&spread, 5).is_ok());
    }

    #[test]
    fn tracks_follow_source_order() {
        let t = encode_multi_accdoa(&[ev(0, 0, 7, 90.0, 0.0), ev(0, 0, 2, 0.0, 0.0)], 1).unwrap();
        assert_eq!(t.get(0, 0, 0), Vec3::new(1.0, 0.0, 0.0));
        assert!((t.get(0, 1, 0).y - 1.0).abs() < 1e-15);
    }

    #[test]
    fn decode_threshold_cases() {
        let mut t = MultiAccdoaTensor::<f64>::zeros(1);
        t.set(0, 0, 0, Vec3::new(0.3, 0.0, 0.0));
        assert!(decode_multi_accdoa(&t, 0.5).is_empty());
        t.set(0, 1, 4, Vec3::new(0.0, 0.6, 0.0));
        let ev = decode_multi_accdoa(&t, 0.5);
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].key(), (0, 4, 1));
        assert!((ev[0].doa.azimuth() - 90.0).abs() < 1e-12);
        assert!(ev[0].doa.elevation().abs() < 1e-12);
    }

    #[test]
    fn round_trip() {
        let events = vec![ev(0, 2, 0, 30.0, 10.0), ev(0, 2, 1, -150.0, -20.0), ev(4, 12, 0, 179.0, 89.0)];
        let back = decode_multi_accdoa(&encode_multi_accdoa(&events, 5).unwrap(), 0.5);
        assert_eq!(back.len(), 3);
        for (a, b) in events.iter().zip(&back) {
            assert_eq!(a.key(), b.key());
            assert!(a.doa.angular_distance(&b.doa) < 1e-9);
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.bin");
        let t = encode_multi_accdoa(&[ev(1, 3, 0, 90.0, 0.0)], 2).unwrap();
        t.write(&p).unwrap();
        let back = MultiAccdoaTensor::<f64>::read(&p).unwrap();
        assert_eq!(back.shape(), t.shape());
        assert!((back.get(1, 0, 3).y - 1.0).abs() < 1e-7);
    }

    #[test]
    fn commutes_with_augmentation() {
        let events = vec![ev(0, 2, 0, 30.0, 10.0), ev(1, 5, 3, -135.0, -40.0), ev(1, 5, 4, 45.0, 0.0)];
        let base = encode_multi_accdoa(&events, 2).unwrap();
        for t in augmentation_set() {
            let moved = encode_multi_accdoa(&transform_metadata(t, &events), 2).unwrap();
            assert_eq!(moved, base.transformed(t), "{t:?}");
        }
    }
}
