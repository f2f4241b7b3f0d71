//! Direction-of-arrival checks on rendered FOA audio using the
//! pseudo-intensity vector.

use crate::error::{Error, Result};
use crate::foa::FoaClip;
use crate::geometry::{Doa, Vec3};
use crate::labels::{SeldEvent, LABEL_FRAMES_PER_SEC};
use crate::scalar::Scalar;

/// Segments whose omni RMS is below this are rejected as silent.
pub const SILENCE_FLOOR: f64 = 1e-6;

/// Shortest single-event run that is evaluated, in label frames.
pub const MIN_RUN_FRAMES: u32 = 5;

pub const DEFAULT_TOLERANCE: f64 = 5.0;

/// Default tolerance for scenes rendered with measured room responses.
pub const MEASURED_RIR_TOLERANCE: f64 = 10.0;

/// Direction of the time-averaged pseudo-intensity vector
/// `(Σ W·X, Σ W·Y, Σ W·Z)` over `start..start + len`.
pub fn estimate_doa<T: Scalar>(c: &FoaClip<T>, start: usize, len: usize) -> Result<Doa<T>> {
    let end = start.checked_add(len).filter(|&e| e <= c.len() && len > 0).ok_or(
        Error::SegmentOutOfRange {
            start,
            end: start.saturating_add(len),
            len: c.len(),
        },
    )?;
    let (w, x, y, z) = (&c.w()[start..end], &c.x()[start..end], &c.y()[start..end], &c.z()[start..end]);
    let mut energy = T::zero();
    let mut acc: Vec3<T> = Vec3::zero();
    for i in 0..len {
        energy += w[i] * w[i];
        acc.x += w[i] * x[i];
        acc.y += w[i] * y[i];
        acc.z += w[i] * z[i];
    }
    let rms = (energy / T::from_usize_lossy(len)).sqrt();
    if rms < T::lit(SILENCE_FLOOR) {
        return Err(Error::SilentSegment);
    }
    // rescale before the angle extraction so tiny or huge gains behave alike
    let n = acc.norm();
    if n == T::zero() || !n.is_finite() {
        return Err(Error::SilentSegment);
    }
    Doa::from_vec(acc.scale(T::one() / n))
}

/// One maximal stretch of label frames with exactly one active source.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult<T> {
    pub start_frame: u32,
    /// Exclusive.
    pub end_frame: u32,
    pub class_idx: u8,
    pub source_idx: u32,
    pub labeled: Doa<T>,
    /// `None` when the span was silent or fell outside the clip.
    pub estimated: Option<Doa<T>>,
    pub error_deg: Option<T>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport<T> {
    pub tolerance: T,
    pub runs: Vec<RunResult<T>>,
    /// Maximal stretches of frames with two or more active sources.
    pub skipped_overlap: usize,
    /// Single-event runs shorter than [`MIN_RUN_FRAMES`].
    pub skipped_short: usize,
}

impl<T: Scalar> ValidationReport<T> {
    pub fn evaluated(&self) -> usize {
        self.runs.len()
    }

    pub fn failures(&self) -> usize {
        self.runs.iter().filter(|r| !r.passed).count()
    }

    pub fn all_passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn max_error(&self) -> Option<T> {
        self.runs.iter().filter_map(|r| r.error_deg).reduce(T::max)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum FrameState<T> {
    Empty,
    Single(u8, u32, Doa<T>),
    Overlap,
}

/// Compares the intensity-vector estimate of every single-source run with
/// its labelled direction.
pub fn validate_scene<T: Scalar>(c: &FoaClip<T>, events: &[SeldEvent<T>], tolerance: T) -> ValidationReport<T> {
    let frames = events.iter().map(|e| e.frame as usize + 1).max().unwrap_or(0);
    let mut state = vec![FrameState::Empty; frames];
    for e in events {
        let s = &mut state[e.frame as usize];
        *s = match *s {
            FrameState::Empty => FrameState::Single(e.class_idx, e.source_idx, e.doa),
            FrameState::Single(c, src, _) if c == e.class_idx && src == e.source_idx => *s,
            _ => FrameState::Overlap,
        };
    }

    let mut report = ValidationReport {
        tolerance,
        runs: Vec::new(),
        skipped_overlap: 0,
        skipped_short: 0,
    };
    let same = |a: &FrameState<T>, b: &FrameState<T>| match (a, b) {
        (FrameState::Single(c1, s1, d1), FrameState::Single(c2, s2, d2)) => c1 == c2 && s1 == s2 && d1 == d2,
        (FrameState::Overlap, FrameState::Overlap) | (FrameState::Empty, FrameState::Empty) => true,
        _ => false,
    };
    let mut i = 0;
    while i < frames {
        let mut j = i + 1;
        while j < frames && same(&state[i], &state[j]) {
            j += 1;
        }
        match state[i] {
            FrameState::Empty => {}
            FrameState::Overlap => report.skipped_overlap += 1,
            FrameState::Single(..) if ((j - i) as u32) < MIN_RUN_FRAMES => report.skipped_short += 1,
            FrameState::Single(class_idx, source_idx, labeled) => {
                let (start, end) = (frame_start(i as u64, c.sample_rate()), frame_start(j as u64, c.sample_rate()));
                let end = end.min(c.len());
                let estimated = if start < end {
                    estimate_doa(c, start, end - start).ok()
                } else {
                    None
                };
                let error_deg = estimated.map(|d| d.angular_distance(&labeled));
                report.runs.push(RunResult {
                    start_frame: i as u32,
                    end_frame: j as u32,
                    class_idx,
                    source_idx,
                    labeled,
                    estimated,
                    error_deg,
                    passed: error_deg.is_some_and(|e| e <= tolerance),
                });
            }
        }
        i = j;
    }
    report
}

/// First sample of a 100 ms label frame.
pub fn frame_start(frame: u64, sample_rate: u32) -> usize {
    (frame * sample_rate as u64 / LABEL_FRAMES_PER_SEC as u64) as usize
}
