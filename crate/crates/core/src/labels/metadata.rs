//! Metadata CSV in the STARSS23 layout: `frame,class,source,azimuth,elevation`
//! per row, integer values, no header, one row per active source per 100 ms
//! frame.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{wrap_azimuth, Doa};
use crate::io::write_atomic;
use crate::labels::NUM_CLASSES;
use crate::scalar::Scalar;

/// One active source in one label frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeldEvent<T> {
    pub frame: u32,
    pub class_idx: u8,
    pub source_idx: u32,
    pub doa: Doa<T>,
}

impl<T: Scalar> SeldEvent<T> {
    pub fn new(frame: u32, class_idx: u8, source_idx: u32, doa: Doa<T>) -> Result<Self> {
        if class_idx as usize >= NUM_CLASSES {
            return Err(Error::InvalidArgument(format!(
                "class {class_idx} outside 0..{NUM_CLASSES}"
            )));
        }
        Ok(Self {
            frame,
            class_idx,
            source_idx,
            doa,
        })
    }

    pub fn key(&self) -> (u32, u8, u32) {
        (self.frame, self.class_idx, self.source_idx)
    }
}

/// Sorts by `(frame, class, source)`; ties keep their input order.
pub fn sort_events<T: Scalar>(events: &mut [SeldEvent<T>]) {
    events.sort_by_key(|e| e.key());
}

pub fn parse_metadata<T: Scalar>(text: &str, source_name: &str) -> Result<Vec<SeldEvent<T>>> {
    let mut events = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |msg: String| Error::Parse {
            source_name: source_name.to_string(),
            line: line_no,
            msg,
        };
        let range_err = |msg: String| Error::Range {
            source_name: source_name.to_string(),
            line: line_no,
            msg,
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        // a sixth (distance) column, as in later STARSS releases, is ignored
        if fields.len() != 5 && fields.len() != 6 {
            return Err(parse_err(format!("expected 5 fields, found {}", fields.len())));
        }
        let int = |i: usize, name: &str| -> Result<i64> {
            fields[i]
                .parse::<i64>()
                .map_err(|_| parse_err(format!("{name} {:?} is not an integer", fields[i])))
        };
        let real = |i: usize, name: &str| -> Result<f64> {
            fields[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(format!("{name} {:?} is not a number", fields[i])))
        };
        let frame = int(0, "frame")?;
        let class = int(1, "class")?;
        let source = int(2, "source")?;
        let az = real(3, "azimuth")?;
        let el = real(4, "elevation")?;
        if !(0..=u32::MAX as i64).contains(&frame) {
            return Err(range_err(format!("frame {frame} out of range")));
        }
        if !(0..NUM_CLASSES as i64).contains(&class) {
            return Err(range_err(format!("class {class} outside 0..{}", NUM_CLASSES - 1)));
        }
        if !(0..=u32::MAX as i64).contains(&source) {
            return Err(range_err(format!("source {source} out of range")));
        }
        if !(-180.0..=180.0).contains(&az) {
            return Err(range_err(format!("azimuth {az} outside [-180, 180]")));
        }
        if !(-90.0..=90.0).contains(&el) {
            return Err(range_err(format!("elevation {el} outside [-90, 90]")));
        }
        events.push(SeldEvent {
            frame: frame as u32,
            class_idx: class as u8,
            source_idx: source as u32,
            doa: Doa::new(T::lit(az), T::lit(el))?,
        });
    }
    sort_events(&mut events);
    Ok(events)
}

pub fn read_metadata<T: Scalar>(path: &Path) -> Result<Vec<SeldEvent<T>>> {
    let text = std::fs::read_to_string(path)?;
    parse_metadata(&text, &path.display().to_string())
}

/// Integer degrees, rounded half away from zero; azimuth re-wrapped after
/// rounding so 179.6 becomes -180.
pub fn rounded_degrees<T: Scalar>(d: &Doa<T>) -> (i64, i64) {
    let az = wrap_azimuth(d.azimuth().as_f64().round());
    (az as i64, d.elevation().as_f64().round() as i64)
}

/// Canonical text: rows sorted by `(frame, class, source)`.
pub fn format_metadata<T: Scalar>(events: &[SeldEvent<T>]) -> String {
    let mut sorted = events.to_vec();
    sort_events(&mut sorted);
    let mut out = String::with_capacity(sorted.len() * 16);
    for e in &sorted {
        let (az, el) = rounded_degrees(&e.doa);
        let _ = writeln!(out, "{},{},{},{},{}", e.frame, e.class_idx, e.source_idx, az, el);
    }
    out
}

pub fn write_metadata<T: Scalar>(events: &[SeldEvent<T>], path: &Path) -> Result<()> {
    let text = format_metadata(events);
    write_atomic(path, |w| {
        w.write_all(text.as_bytes())?;
        Ok(())
    })
}
