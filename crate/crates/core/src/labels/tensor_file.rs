//! Binary tensor container shared by the label encoders.
//!
//! Layout, all little-endian:
//!
//! ```text
//! u32 magic | u32 version | u32 dim0 | u32 dim1 | u32 dim2 | u32 dim3 | u32 0 | u32 0
//! f32 values[dim0 * dim1 * dim2 * dim3]   (row-major, last dim fastest)
//! ```

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::write_atomic;

pub const VERSION: u32 = 1;
pub const HEADER_WORDS: usize = 8;

/// Multi-ACCDOA target tensor, `frames x tracks x classes x 3`.
pub const ACCDOA_MAGIC: u32 = u32::from_le_bytes(*b"ACDA");
/// Visual embedding track, `frames x 2 x boxes x bins`.
pub const VISUAL_MAGIC: u32 = u32::from_le_bytes(*b"VEMB");

#[derive(Debug, Clone, PartialEq)]
pub struct TensorFile {
    pub magic: u32,
    pub dims: [u32; 4],
    pub values: Vec<f32>,
}

impl TensorFile {
    pub fn new(magic: u32, dims: [u32; 4], values: Vec<f32>) -> Result<Self> {
        let n: usize = dims.iter().map(|&d| d as usize).product();
        if n != values.len() {
            return Err(Error::TensorFormat(format!(
                "dims {dims:?} need {n} values, got {}",
                values.len()
            )));
        }
        Ok(Self { magic, dims, values })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_WORDS * 4 + self.values.len() * 4);
        let header = [
            self.magic,
            VERSION,
            self.dims[0],
            self.dims[1],
            self.dims[2],
            self.dims[3],
            0,
            0,
        ];
        for h in header {
            out.extend_from_slice(&h.to_le_bytes());
        }
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_WORDS * 4 || !bytes.len().is_multiple_of(4) {
            return Err(Error::TensorFormat(format!("{} bytes is not a tensor file", bytes.len())));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[i * 4..i * 4 + 4].try_into().unwrap());
        if word(1) != VERSION {
            return Err(Error::TensorFormat(format!("unsupported version {}", word(1))));
        }
        let dims = [word(2), word(3), word(4), word(5)];
        let values = bytes[HEADER_WORDS * 4..]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Self::new(word(0), dims, values)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let bytes = self.to_bytes();
        write_atomic(path, |w| {
            w.write_all(&bytes)?;
            Ok(())
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }

    /// Reads and checks the magic number.
    pub fn read_expect(path: &Path, magic: u32) -> Result<Self> {
        let t = Self::read(path)?;
        if t.magic != magic {
            return Err(Error::TensorFormat(format!(
                "{}: magic {:#010x}, expected {:#010x}",
                path.display(),
                t.magic,
                magic
            )));
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_byte_layout() {
        let t = TensorFile::new(ACCDOA_MAGIC, [1, 1, 1, 2], vec![1.0, -0.5]).unwrap();
        let b = t.to_bytes();
        assert_eq!(&b[0..4], b"ACDA");
        assert_eq!(&b[4..8], &[1, 0, 0, 0]);
        assert_eq!(&b[20..24], &[2, 0, 0, 0]);
        assert_eq!(&b[24..32], &[0; 8]);
        assert_eq!(&b[32..36], &1.0f32.to_le_bytes());
        assert_eq!(&b[36..40], &(-0.5f32).to_le_bytes());
        assert_eq!(TensorFile::from_bytes(&b).unwrap(), t);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(TensorFile::from_bytes(&[0; 7]).is_err());
        let mut b = TensorFile::new(VISUAL_MAGIC, [1, 1, 1, 1], vec![0.0]).unwrap().to_bytes();
        b.extend_from_slice(&[0; 4]);
        assert!(TensorFile::from_bytes(&b).is_err());
        b.truncate(36);
        b[4] = 9;
        assert!(TensorFile::from_bytes(&b).is_err());
        assert!(TensorFile::new(VISUAL_MAGIC, [2, 1, 1, 1], vec![0.0]).is_err());
    }

    #[test]
    fn magic_is_checked() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.bin");
        TensorFile::new(VISUAL_MAGIC, [1, 1, 1, 1], vec![0.25]).unwrap().write(&p).unwrap();
        assert!(TensorFile::read_expect(&p, VISUAL_MAGIC).is_ok());
        assert!(TensorFile::read_expect(&p, ACCDOA_MAGIC).is_err());
    }
}
