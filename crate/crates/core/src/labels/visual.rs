//! Bounding-box visual embedding: each detection becomes two Gaussian-like
//! vectors over `NUM_BINS` bins, one along the horizontal (azimuth) image
//! axis and one along the vertical (elevation) axis.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::labels::tensor_file::{TensorFile, VISUAL_MAGIC};
use crate::scalar::Scalar;

pub const MAX_BOXES: usize = 6;
pub const NUM_BINS: usize = 37;

/// Normalized box: centre `(cx, cy)` in `[0, 1]`, size `(w, h)` in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox<T> {
    pub cx: T,
    pub cy: T,
    pub w: T,
    pub h: T,
}

impl<T: Scalar> BoundingBox<T> {
    /// Clamps the centre into the unit square and the size into `(0, 1]`.
    /// Non-finite values and non-positive sizes are rejected.
    pub fn new(cx: T, cy: T, w: T, h: T) -> Result<Self> {
        if ![cx, cy, w, h].iter().all(|v| v.is_finite()) || w <= T::zero() || h <= T::zero() {
            return Err(Error::InvalidArgument(format!("bad box ({cx}, {cy}, {w}, {h})")));
        }
        let unit = |v: T| v.max(T::zero()).min(T::one());
        Ok(Self {
            cx: unit(cx),
            cy: unit(cy),
            w: w.min(T::one()),
            h: h.min(T::one()),
        })
    }

    pub fn area(&self) -> T {
        self.w * self.h
    }
}

/// `2 x MAX_BOXES x NUM_BINS` values: axis 0 azimuth, axis 1 elevation.
#[derive(Debug, Clone, PartialEq)]
pub struct VisualEmbedding<T> {
    values: Vec<T>,
}

impl<T: Scalar> VisualEmbedding<T> {
    pub fn zeros() -> Self {
        Self {
            values: vec![T::zero(); 2 * MAX_BOXES * NUM_BINS],
        }
    }

    pub fn shape(&self) -> [usize; 3] {
        [2, MAX_BOXES, NUM_BINS]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn vector(&self, axis: usize, slot: usize) -> &[T] {
        let o = (axis * MAX_BOXES + slot) * NUM_BINS;
        &self.values[o..o + NUM_BINS]
    }

    fn vector_mut(&mut self, axis: usize, slot: usize) -> &mut [T] {
        let o = (axis * MAX_BOXES + slot) * NUM_BINS;
        &mut self.values[o..o + NUM_BINS]
    }
}

/// Gaussian bump over the bins centred at `centre * (NUM_BINS - 1)` with
/// standard deviation `max(size * (NUM_BINS - 1) / 2, 1)` bins; peak value 1.
pub fn gaussian_profile<T: Scalar>(centre: T, size: T, out: &mut [T]) {
    let span = T::from_usize_lossy(NUM_BINS - 1);
    let mu = centre * span;
    let sigma = (size * span / T::lit(2.0)).max(T::one());
    let denom = T::lit(2.0) * sigma * sigma;
    for (n, o) in out.iter_mut().enumerate() {
        let d = T::from_usize_lossy(n) - mu;
        *o = (-(d * d) / denom).exp();
    }
}

/// Encodes up to [`MAX_BOXES`] boxes. With more boxes, the largest by area
/// are kept (earlier boxes win ties) and a warning is logged; kept boxes
/// stay in input order. Unused slots are zero.
pub fn encode_visual_boxes<T: Scalar>(boxes: &[BoundingBox<T>]) -> VisualEmbedding<T> {
    let mut keep: Vec<usize> = (0..boxes.len()).collect();
    if boxes.len() > MAX_BOXES {
        log::warn!(
            "{} boxes in one frame, keeping the {MAX_BOXES} largest",
            boxes.len()
        );
        keep.sort_by(|&a, &b| boxes[b].area().partial_cmp(&boxes[a].area()).unwrap().then(a.cmp(&b)));
        keep.truncate(MAX_BOXES);
        keep.sort_unstable();
    }
    let mut emb = VisualEmbedding::zeros();
    for (slot, &i) in keep.iter().enumerate() {
        let b = &boxes[i];
        gaussian_profile(b.cx, b.w, emb.vector_mut(0, slot));
        gaussian_profile(b.cy, b.h, emb.vector_mut(1, slot));
    }
    emb
}

/// Parses `frame,cx,cy,w,h` rows (no header) into per-frame box lists.
pub fn parse_boxes<T: Scalar>(text: &str, source_name: &str) -> Result<BTreeMap<u32, Vec<BoundingBox<T>>>> {
    let mut frames: BTreeMap<u32, Vec<BoundingBox<T>>> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse {
            source_name: source_name.to_string(),
            line: idx + 1,
            msg,
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(err(format!("expected 5 fields, found {}", fields.len())));
        }
        let frame: u32 = fields[0]
            .parse()
            .map_err(|_| err(format!("frame {:?} is not a non-negative integer", fields[0])))?;
        let mut v = [T::zero(); 4];
        for (slot, f) in v.iter_mut().zip(&fields[1..]) {
            *slot = T::lit(f.parse::<f64>().map_err(|_| err(format!("{f:?} is not a number")))?);
        }
        let b = BoundingBox::new(v[0], v[1], v[2], v[3]).map_err(|e| err(e.to_string()))?;
        frames.entry(frame).or_default().push(b);
    }
    Ok(frames)
}

pub fn read_boxes<T: Scalar>(path: &Path) -> Result<BTreeMap<u32, Vec<BoundingBox<T>>>> {
    parse_boxes(&std::fs::read_to_string(path)?, &path.display().to_string())
}

/// Embeds every frame `0..frames`; frames without boxes are all zero.
pub fn encode_visual_track<T: Scalar>(
    boxes: &BTreeMap<u32, Vec<BoundingBox<T>>>,
    frames: usize,
) -> Vec<VisualEmbedding<T>> {
    (0..frames)
        .map(|f| match boxes.get(&(f as u32)) {
            Some(b) => encode_visual_boxes(b),
            None => VisualEmbedding::zeros(),
        })
        .collect()
}

pub fn track_to_tensor_file<T: Scalar>(track: &[VisualEmbedding<T>]) -> TensorFile {
    let values = track
        .iter()
        .flat_map(|e| e.values.iter().map(|v| v.as_f64() as f32))
        .collect();
    TensorFile::new(
        VISUAL_MAGIC,
        [track.len() as u32, 2, MAX_BOXES as u32, NUM_BINS as u32],
        values,
    )
    .expect("shape matches value count")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bx(cx: f64, cy: f64, w: f64, h: f64) -> BoundingBox<f64> {
        BoundingBox::new(cx, cy, w, h).unwrap()
    }

    fn argmax(v: &[f64]) -> usize {
        v.iter()
            .enumerate()
            .fold((0, f64::MIN), |(bi, bv), (i, &x)| if x > bv { (i, x) } else { (bi, bv) })
            .0
    }

    #[test]
    fn centred_box_peaks_at_18() {
        let e = encode_visual_boxes(&[bx(0.5, 0.5, 0.2, 0.1)]);
        assert_eq!(e.shape(), [2, 6, 37]);
        for axis in 0..2 {
            assert_eq!(argmax(e.vector(axis, 0)), 18);
            assert_eq!(e.vector(axis, 0)[18], 1.0);
        }
        assert!(e.vector(0, 1).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn no_boxes_all_zero() {
        let e = encode_visual_boxes::<f64>(&[]);
        assert_eq!(e.values().len(), 2 * 6 * 37);
        assert!(e.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn left_edge_box_decays() {
        let e = encode_visual_boxes(&[bx(0.0, 0.5, 0.3, 0.3)]);
        let v = e.vector(0, 0);
        assert_eq!(v[0], 1.0);
        assert!(v.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn narrow_box_uses_one_bin_floor() {
        let mut v = [0.0; NUM_BINS];
        gaussian_profile(0.5, 0.001, &mut v);
        assert!((v[19] - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn keeps_six_largest_in_input_order() {
        let sizes = [0.1, 0.9, 0.2, 0.8, 0.3, 0.7, 0.4, 0.05];
        let boxes: Vec<_> = sizes.iter().enumerate().map(|(i, &s)| bx(i as f64 / 10.0, 0.5, s, s)).collect();
        let e = encode_visual_boxes(&boxes);
        // kept indices 1,2,3,4,5,6 -> centres 0.1..0.6
        let peaks: Vec<usize> = (0..6).map(|s| argmax(e.vector(0, s))).collect();
        let expect: Vec<usize> = (1..=6).map(|i| (i as f64 / 10.0 * 36.0).round() as usize).collect();
        assert_eq!(peaks, expect);
    }

    #[test]
    fn parses_box_csv() {
        let m = parse_boxes::<f64>("0,0.5,0.5,0.1,0.1\n2,1.2,0.5,0.1,0.1\n2,0.1,0.1,0.1,0.1\n", "b").unwrap();
        assert_eq!(m[&2].len(), 2);
        assert_eq!(m[&2][0].cx, 1.0);
        assert!(parse_boxes::<f64>("0,0.5,0.5,0,0.1", "b").is_err());
        let track = encode_visual_track(&m, 3);
        assert!(track[1].values().iter().all(|v| *v == 0.0));
        let t = track_to_tensor_file(&track);
        assert_eq!(t.dims, [3, 2, 6, 37]);
    }

    proptest! {
        #[test]
        fn peak_bin_is_rounded_centre(i in 0usize..=100, j in 0usize..=100, w in 0.01f64..1.0, h in 0.01f64..1.0) {
            let (cx, cy) = (i as f64 / 100.0, j as f64 / 100.0);
            let e = encode_visual_boxes(&[bx(cx, cy, w, h)]);
            prop_assert_eq!(argmax(e.vector(0, 0)), (cx * 36.0).round() as usize);
            prop_assert_eq!(argmax(e.vector(1, 0)), (cy * 36.0).round() as usize);
            prop_assert!(e.values().iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }
}
