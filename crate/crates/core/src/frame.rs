//! RGB8 video frames and PNG frame sequences.

use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geometry::FrameGeometry;
use crate::io::write_atomic;

pub type Rgb = [u8; 3];

pub const BLACK: Rgb = [0, 0, 0];

/// Row-major RGB8 image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl Frame {
    pub fn black(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0; width * height * 3],
        }
    }

    pub fn from_raw(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != width * height * 3 {
            return Err(Error::GeometryMismatch(format!(
                "{} bytes cannot hold a {width}x{height} RGB frame",
                data.len()
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn pixel(&self, col: usize, row: usize) -> Rgb {
        let i = (row * self.width + col) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set_pixel(&mut self, col: usize, row: usize, px: Rgb) {
        let i = (row * self.width + col) * 3;
        self.data[i..i + 3].copy_from_slice(&px);
    }

    pub fn row(&self, row: usize) -> &[u8] {
        let stride = self.width * 3;
        &self.data[row * stride..(row + 1) * stride]
    }

    pub fn row_mut(&mut self, row: usize) -> &mut [u8] {
        let stride = self.width * 3;
        &mut self.data[row * stride..(row + 1) * stride]
    }

    pub fn is_black(&self) -> bool {
        self.data.iter().all(|&b| b == 0)
    }

    pub fn check_geometry(&self, g: &FrameGeometry) -> Result<()> {
        if self.width != g.width() || self.height != g.height() {
            return Err(Error::GeometryMismatch(format!(
                "frame is {}x{}, expected {}x{}",
                self.width,
                self.height,
                g.width(),
                g.height()
            )));
        }
        Ok(())
    }

    /// Nearest-neighbour resample.
    pub fn resize_nearest(&self, width: usize, height: usize) -> Frame {
        let mut out = Frame::black(width, height);
        if self.width == 0 || self.height == 0 {
            return out;
        }
        for r in 0..height {
            let sr = r * self.height / height;
            for c in 0..width {
                let sc = c * self.width / width;
                out.set_pixel(c, r, self.pixel(sc, sr));
            }
        }
        out
    }

    /// Decodes a PNG, converting gray, alpha and 16-bit variants to RGB8.
    pub fn read_png(path: &Path) -> Result<Frame> {
        let dec_err = |source| Error::PngDecode {
            path: path.to_path_buf(),
            source,
        };
        let mut decoder = png::Decoder::new(BufReader::new(File::open(path)?));
        decoder.set_transformations(png::Transformations::normalize_to_color8());
        let mut reader = decoder.read_info().map_err(dec_err)?;
        let size = reader
            .output_buffer_size()
            .ok_or_else(|| Error::GeometryMismatch(format!("{}: image too large", path.display())))?;
        let mut buf = vec![0; size];
        let info = reader.next_frame(&mut buf).map_err(dec_err)?;
        buf.truncate(info.buffer_size());
        let (w, h) = (info.width as usize, info.height as usize);
        let data = match info.color_type {
            png::ColorType::Rgb => buf,
            png::ColorType::Rgba => buf.chunks_exact(4).flat_map(|p| [p[0], p[1], p[2]]).collect(),
            png::ColorType::Grayscale => buf.iter().flat_map(|&g| [g, g, g]).collect(),
            png::ColorType::GrayscaleAlpha => buf.chunks_exact(2).flat_map(|p| [p[0], p[0], p[0]]).collect(),
            png::ColorType::Indexed => {
                return Err(Error::GeometryMismatch(format!("{}: unexpanded palette image", path.display())))
            }
        };
        Frame::from_raw(w, h, data)
    }

    /// Encodes as an 8-bit RGB PNG with fixed settings, so identical frames
    /// produce identical bytes.
    pub fn encode_png<W: Write>(&self, sink: W) -> std::result::Result<(), png::EncodingError> {
        let mut enc = png::Encoder::new(sink, self.width as u32, self.height as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        enc.set_compression(png::Compression::Fast);
        let mut writer = enc.write_header()?;
        writer.write_image_data(&self.data)?;
        writer.finish()
    }

    pub fn write_png(&self, path: &Path) -> Result<()> {
        write_atomic(path, |w| {
            self.encode_png(w).map_err(|source| Error::PngEncode {
                path: path.to_path_buf(),
                source,
            })
        })
    }
}

/// Zero-padded frame file name used for every written sequence.
pub fn frame_file_name(index: usize) -> String {
    format!("{index:06}.png")
}

/// PNG files of a frame directory, sorted by name.
pub fn list_frames(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut frames: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| e.eq_ignore_ascii_case("png"))
        })
        .collect();
    frames.sort();
    Ok(frames)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn png_round_trip_and_determinism() {
        let dir = tempfile::tempdir().unwrap();
        let mut f = Frame::black(8, 4);
        f.set_pixel(3, 2, [10, 200, 30]);
        let p = dir.path().join(frame_file_name(7));
        f.write_png(&p).unwrap();
        assert_eq!(Frame::read_png(&p).unwrap(), f);
        let bytes = fs::read(&p).unwrap();
        f.write_png(&p).unwrap();
        assert_eq!(fs::read(&p).unwrap(), bytes);
        assert_eq!(list_frames(dir.path()).unwrap(), vec![dir.path().join("000007.png")]);
    }

    #[test]
    fn reads_gray_png() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.png");
        let file = File::create(&p).unwrap();
        let mut enc = png::Encoder::new(file, 2, 1);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Eight);
        let mut w = enc.write_header().unwrap();
        w.write_image_data(&[5, 250]).unwrap();
        w.finish().unwrap();
        let f = Frame::read_png(&p).unwrap();
        assert_eq!(f.pixel(1, 0), [250, 250, 250]);
    }

    #[test]
    fn resize_nearest_picks_blocks() {
        let mut f = Frame::black(2, 2);
        f.set_pixel(1, 1, [9, 9, 9]);
        let big = f.resize_nearest(4, 4);
        assert_eq!(big.pixel(3, 3), [9, 9, 9]);
        assert_eq!(big.pixel(2, 2), [9, 9, 9]);
        assert_eq!(big.pixel(1, 1), BLACK);
    }

    #[test]
    fn from_raw_checks_length() {
        assert!(Frame::from_raw(2, 2, vec![0; 11]).is_err());
    }
}
