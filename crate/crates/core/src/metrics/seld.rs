//! Segment-based SELD scores.
//!
//! Frame events are pooled into segments of `segment` label frames. Each
//! `(segment, class, source)` becomes one segment-event whose direction is
//! the renormalized mean of its frame directions. Within a segment and class,
//! predictions are paired with references by [`assign_min_cost`] on angular
//! distance; pairs within the threshold are true positives, other pairs count
//! as one false positive and one false negative, and unpaired events count as
//! plain false negatives or false positives.

use std::collections::{BTreeMap, BTreeSet};

use crate::geometry::Vec3;
use crate::labels::{SeldEvent, NUM_CLASSES};
use crate::metrics::assignment::assign_min_cost;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Average {
    #[default]
    Macro,
    Micro,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    /// Degrees.
    pub doa_threshold: f64,
    /// Label frames per segment.
    pub segment: u32,
    pub average: Average,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            doa_threshold: 20.0,
            segment: 10,
            average: Average::Macro,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeldScores<T> {
    pub er20: T,
    pub f20: T,
    /// `None` when no reference/prediction pair of the same class exists.
    pub le: Option<T>,
    pub lr: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    /// Reference segment-events.
    pub n_ref: u64,
    /// Predicted segment-events.
    pub n_pred: u64,
    /// Class-matched pairs, whatever their angular error.
    pub pairs: u64,
    pub le_sum: f64,
}

impl ClassCounts {
    fn add(&mut self, o: &Self) {
        self.tp += o.tp;
        self.fp += o.fp;
        self.fn_ += o.fn_;
        self.n_ref += o.n_ref;
        self.n_pred += o.n_pred;
        self.pairs += o.pairs;
        self.le_sum += o.le_sum;
    }

    fn present(&self) -> bool {
        self.n_ref > 0 || self.n_pred > 0
    }

    fn f(&self) -> f64 {
        let den = 2 * self.tp + self.fp + self.fn_;
        if den == 0 {
            1.0
        } else {
            2.0 * self.tp as f64 / den as f64
        }
    }

    fn le(&self) -> Option<f64> {
        (self.pairs > 0).then(|| self.le_sum / self.pairs as f64)
    }

    fn lr(&self) -> Option<f64> {
        (self.n_ref > 0).then(|| self.pairs as f64 / self.n_ref as f64)
    }
}

/// Per-class row of the score table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassScores {
    pub class_idx: u8,
    pub counts: ClassCounts,
    pub f20: f64,
    pub le: Option<f64>,
    pub lr: Option<f64>,
}

/// Additive sufficient statistics. Accumulate over files with
/// [`SeldStats::accumulate`] and score once with [`SeldStats::scores`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SeldStats {
    pub substitutions: u64,
    pub deletions: u64,
    pub insertions: u64,
    pub classes: [ClassCounts; NUM_CLASSES],
}

impl SeldStats {
    pub fn from_events<T: Scalar>(reference: &[SeldEvent<T>], predicted: &[SeldEvent<T>], cfg: &EvalConfig) -> Self {
        assert!(cfg.segment >= 1, "segment length must be at least one frame");
        let refs = pool(reference, cfg.segment);
        let preds = pool(predicted, cfg.segment);
        let segments: BTreeSet<u32> = refs.keys().chain(preds.keys()).map(|&(seg, _)| seg).collect();
        let mut stats = SeldStats::default();
        let empty = Vec::new();
        for &seg in &segments {
            let (mut fp_seg, mut fn_seg) = (0u64, 0u64);
            for class in 0..NUM_CLASSES as u8 {
                let r = refs.get(&(seg, class)).unwrap_or(&empty);
                let p = preds.get(&(seg, class)).unwrap_or(&empty);
                if r.is_empty() && p.is_empty() {
                    continue;
                }
                let cc = &mut stats.classes[class as usize];
                cc.n_ref += r.len() as u64;
                cc.n_pred += p.len() as u64;
                let cost: Vec<Vec<f64>> = r
                    .iter()
                    .map(|a| p.iter().map(|b| a.angle_to(b)).collect())
                    .collect();
                let pairs = if r.is_empty() || p.is_empty() {
                    Vec::new()
                } else {
                    assign_min_cost(&cost)
                };
                let (mut tp, mut fp, mut fn_) = (0u64, 0u64, 0u64);
                for &(i, j) in &pairs {
                    let d = cost[i][j];
                    cc.le_sum += d;
                    if d <= cfg.doa_threshold {
                        tp += 1;
                    } else {
                        fp += 1;
                        fn_ += 1;
                    }
                }
                cc.pairs += pairs.len() as u64;
                fn_ += (r.len() - pairs.len()) as u64;
                fp += (p.len() - pairs.len()) as u64;
                cc.tp += tp;
                cc.fp += fp;
                cc.fn_ += fn_;
                fp_seg += fp;
                fn_seg += fn_;
            }
            stats.substitutions += fp_seg.min(fn_seg);
            stats.deletions += fn_seg.saturating_sub(fp_seg);
            stats.insertions += fp_seg.saturating_sub(fn_seg);
        }
        stats
    }

    pub fn accumulate(&mut self, o: &SeldStats) {
        self.substitutions += o.substitutions;
        self.deletions += o.deletions;
        self.insertions += o.insertions;
        for (a, b) in self.classes.iter_mut().zip(&o.classes) {
            a.add(b);
        }
    }

    pub fn n_ref(&self) -> u64 {
        self.classes.iter().map(|c| c.n_ref).sum()
    }

    pub fn class_table(&self) -> Vec<ClassScores> {
        self.classes
            .iter()
            .enumerate()
            .map(|(i, c)| ClassScores {
                class_idx: i as u8,
                counts: *c,
                f20: c.f(),
                le: c.le(),
                lr: c.lr(),
            })
            .collect()
    }

    /// Edge cases: empty reference and prediction give `er = 0, f = 1,
    /// lr = 1, le = None`.
    pub fn scores<T: Scalar>(&self, average: Average) -> SeldScores<T> {
        let n = self.n_ref();
        let er = (self.substitutions + self.deletions + self.insertions) as f64 / n.max(1) as f64;
        let (f, le, lr) = match average {
            Average::Micro => {
                let mut total = ClassCounts::default();
                for c in &self.classes {
                    total.add(c);
                }
                (total.f(), total.le(), total.lr().unwrap_or(1.0))
            }
            Average::Macro => {
                let f = mean(self.classes.iter().filter(|c| c.present()).map(|c| c.f())).unwrap_or(1.0);
                let le = mean(self.classes.iter().filter_map(|c| c.le()));
                let lr = mean(self.classes.iter().filter_map(|c| c.lr())).unwrap_or(1.0);
                (f, le, lr)
            }
        };
        SeldScores {
            er20: T::lit(er),
            f20: T::lit(f),
            le: le.map(T::lit),
            lr: T::lit(lr),
        }
    }
}

fn mean(it: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = it.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// `(segment, class) -> unit vectors`, one per source, in source order.
fn pool<T: Scalar>(events: &[SeldEvent<T>], segment: u32) -> BTreeMap<(u32, u8), Vec<Vec3<f64>>> {
    let mut sums: BTreeMap<(u32, u8, u32), Vec<Vec3<f64>>> = BTreeMap::new();
    for e in events {
        sums.entry((e.frame / segment, e.class_idx, e.source_idx))
            .or_default()
            .push(e.doa.cast::<f64>().to_unit_vec());
    }
    let mut out: BTreeMap<(u32, u8), Vec<Vec3<f64>>> = BTreeMap::new();
    for ((seg, class, _), mut vecs) in sums {
        // order-independent sum
        vecs.sort_by(|a, b| (a.x, a.y, a.z).partial_cmp(&(b.x, b.y, b.z)).unwrap());
        let sum = vecs.iter().fold(Vec3::zero(), |acc, v| acc.add(v));
        let n = sum.norm();
        let dir = if n > 1e-12 { sum.scale(1.0 / n) } else { vecs[0] };
        out.entry((seg, class)).or_default().push(dir);
    }
    out
}

/// Scores one prediction list against one reference list.
pub fn evaluate<T: Scalar>(reference: &[SeldEvent<T>], predicted: &[SeldEvent<T>], cfg: &EvalConfig) -> SeldScores<T> {
    SeldStats::from_events(reference, predicted, cfg).scores(cfg.average)
}
