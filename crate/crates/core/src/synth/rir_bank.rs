//! Collections of directional room impulse responses.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::foa::wav::read_foa;
use crate::foa::Rir;
use crate::geometry::Doa;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct RirBank<T> {
    entries: Vec<Rir<T>>,
    manifest: Option<PathBuf>,
}

impl<T: Scalar> RirBank<T> {
    pub fn new(entries: Vec<Rir<T>>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("RIR bank is empty".into()));
        }
        Ok(Self { entries, manifest: None })
    }

    /// Delta responses on a 10° grid: azimuth -180..=170, elevation
    /// -40..=40 (36 x 9 directions).
    pub fn anechoic(sample_rate: u32) -> Self {
        let mut entries = Vec::with_capacity(36 * 9);
        for el in (-40..=40).step_by(10) {
            for az in (-180..180).step_by(10) {
                let d = Doa::new(T::lit(az as f64), T::lit(el as f64)).unwrap();
                entries.push(Rir::anechoic(d, sample_rate));
            }
        }
        Self { entries, manifest: None }
    }

    /// Reads a manifest with one `path,azimuth,elevation,distance,room_id`
    /// record per line. Paths are relative to the manifest's directory;
    /// `distance` may be empty. Blank lines and `#` comments are ignored.
    pub fn load(manifest: &Path, sample_rate: u32) -> Result<Self> {
        let text = fs::read_to_string(manifest)?;
        let base = manifest.parent().unwrap_or(Path::new("."));
        let name = manifest.display().to_string();
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |msg: String| Error::Parse {
                source_name: name.clone(),
                line: i + 1,
                msg,
            };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 5 {
                return Err(parse_err(format!("expected 5 fields, found {}", fields.len())));
            }
            let num = |s: &str, what: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|_| parse_err(format!("bad {what} {s:?}")))
            };
            let az = num(fields[1], "azimuth")?;
            let el = num(fields[2], "elevation")?;
            let doa = Doa::new(T::lit(az), T::lit(el)).map_err(|e| Error::Range {
                source_name: name.clone(),
                line: i + 1,
                msg: e.to_string(),
            })?;
            let distance = if fields[3].is_empty() {
                None
            } else {
                Some(T::lit(num(fields[3], "distance")?))
            };
            let (clip, _) = read_foa::<T>(&base.join(fields[0]))?;
            if clip.sample_rate() != sample_rate {
                return Err(Error::SampleRateMismatch {
                    expected: sample_rate,
                    found: clip.sample_rate(),
                });
            }
            entries.push(Rir::new(clip.into_channels(), doa, fields[4], distance, sample_rate)?);
        }
        let mut bank = Self::new(entries)?;
        bank.manifest = Some(manifest.to_path_buf());
        Ok(bank)
    }

    pub fn entries(&self) -> &[Rir<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn manifest(&self) -> Option<&Path> {
        self.manifest.as_deref()
    }

    pub fn sample_rate(&self) -> u32 {
        self.entries[0].sample_rate
    }

    /// Index of the entry closest to `d`; ties go to the lower index.
    pub fn nearest_index(&self, d: &Doa<T>) -> usize {
        let mut best = 0;
        let mut best_dist = T::infinity();
        for (i, r) in self.entries.iter().enumerate() {
            let dist = r.doa.angular_distance(d);
            if dist < best_dist {
                best = i;
                best_dist = dist;
            }
        }
        best
    }
}

pub fn nearest_rir<'a, T: Scalar>(bank: &'a RirBank<T>, d: &Doa<T>) -> &'a Rir<T> {
    &bank.entries[bank.nearest_index(d)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foa::wav::{write_foa, SampleFormat};
    use crate::foa::FoaClip;

    fn doa(a: f64, e: f64) -> Doa<f64> {
        Doa::new(a, e).unwrap()
    }

    fn two() -> RirBank<f64> {
        RirBank::new(vec![Rir::anechoic(doa(0.0, 0.0), 24_000), Rir::anechoic(doa(90.0, 0.0), 24_000)]).unwrap()
    }

    #[test]
    fn nearest_examples() {
        let b = two();
        assert_eq!(nearest_rir(&b, &doa(90.0, 0.0)).doa, doa(90.0, 0.0));
        assert_eq!(nearest_rir(&b, &doa(40.0, 0.0)).doa, doa(0.0, 0.0));
        assert_eq!(b.nearest_index(&doa(45.0, 0.0)), 0);
    }

    #[test]
    fn anechoic_grid() {
        let b = RirBank::<f64>::anechoic(24_000);
        assert_eq!(b.len(), 324);
        let hit = nearest_rir(&b, &doa(-123.0, 27.0));
        assert_eq!(hit.doa, doa(-120.0, 30.0));
        assert!(RirBank::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let clip = FoaClip::new([vec![0.5, 0.25], vec![0.0, 0.0], vec![0.0, 0.0], vec![0.5, 0.0]], 24_000).unwrap();
        write_foa(&dir.path().join("r0.wav"), &clip, SampleFormat::Float32).unwrap();
        let m = dir.path().join("bank.csv");
        fs::write(&m, "# comment\nr0.wav,10,-5,2.5,lab\n\n").unwrap();
        let b = RirBank::<f64>::load(&m, 24_000).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.entries()[0].ir[0], vec![0.5, 0.25]);
        assert_eq!(b.entries()[0].distance, Some(2.5));
        assert_eq!(b.entries()[0].room_id, "lab");
        assert!(matches!(RirBank::<f64>::load(&m, 48_000), Err(Error::SampleRateMismatch { .. })));
        fs::write(&m, "r0.wav,10,95,,lab\n").unwrap();
        assert!(matches!(RirBank::<f64>::load(&m, 24_000), Err(Error::Range { line: 1, .. })));
        fs::write(&m, "r0.wav,10\n").unwrap();
        assert!(matches!(RirBank::<f64>::load(&m, 24_000), Err(Error::Parse { line: 1, .. })));
    }
}
