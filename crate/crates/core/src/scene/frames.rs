use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"STRB";
const VERSION: u32 = 1;
/// Upper bound on total payload elements; catches corrupt headers before
/// any allocation.
const MAX_ELEMENTS: u64 = 1 << 32;

/// An ordered stack of float rasters sharing one geometry: encoded RGB
/// frames, monochrome interframes, or depth maps, with one timestamp per
/// frame.
///
/// On disk (`.strb`): little-endian, magic `STRB`, u32 version, u32 width /
/// height / channels / frame count, f64 timestamps, then float32 rasters
/// frame-major, row-major within a frame, channels interleaved per pixel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameStack {
    pub width: u32,
    pub height: u32,
    /// 1 (monochrome) or 3 (RGB).
    pub channels: u32,
    /// Row-major rasters, channels interleaved; `width·height·channels` each.
    pub frames: Vec<Vec<f32>>,
    /// Seconds, one per frame.
    pub timestamps: Vec<f64>,
}

impl FrameStack {
    pub fn new(
        width: u32,
        height: u32,
        channels: u32,
        frames: Vec<Vec<f32>>,
        timestamps: Vec<f64>,
    ) -> Result<Self> {
        let s = FrameStack {
            width,
            height,
            channels,
            frames,
            timestamps,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn frame_len(&self) -> usize {
        self.width as usize * self.height as usize * self.channels as usize
    }

    pub fn n_frames(&self) -> usize {
        self.frames.len()
    }

    /// Sample `(x, y, c)` of frame `f`.
    pub fn at(&self, f: usize, x: u32, y: u32, c: u32) -> f32 {
        let idx = ((y * self.width + x) * self.channels + c) as usize;
        self.frames[f][idx]
    }

    pub fn validate(&self) -> Result<()> {
        if self.channels != 1 && self.channels != 3 {
            return Err(Error::structure(format!(
                "frame stack channels must be 1 or 3, got {}",
                self.channels
            )));
        }
        if self.frames.len() != self.timestamps.len() {
            return Err(Error::structure(format!(
                "frame/timestamp count mismatch: {} vs {}",
                self.frames.len(),
                self.timestamps.len()
            )));
        }
        let expect = self.frame_len();
        for (i, f) in self.frames.iter().enumerate() {
            if f.len() != expect {
                return Err(Error::structure(format!(
                    "frame {i} has {} samples, expected {expect}",
                    f.len()
                )));
            }
            if let Some(j) = f.iter().position(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::structure(format!(
                    "frame {i} sample {j} is {} (must be finite and ≥ 0)",
                    f[j]
                )));
            }
        }
        Ok(())
    }

    /// Writes the stack in the `.strb` tensor format. Refuses invalid stacks
    /// (non-finite or negative samples) before touching the file.
    pub fn write_tensor(&self, path: impl AsRef<Path>) -> Result<()> {
        self.validate()?;
        let mut buf: Vec<u8> = Vec::with_capacity(
            24 + 8 * self.timestamps.len() + 4 * self.frames.len() * self.frame_len(),
        );
        buf.extend_from_slice(MAGIC);
        for v in [
            VERSION,
            self.width,
            self.height,
            self.channels,
            self.frames.len() as u32,
        ] {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        for t in &self.timestamps {
            buf.extend_from_slice(&t.to_le_bytes());
        }
        for frame in &self.frames {
            for v in frame {
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
        let mut file = std::fs::File::create(path)?;
        file.write_all(&buf)?;
        Ok(())
    }

    /// Reads a `.strb` file, verifying magic, version, dimensions, and
    /// payload length; errors name the byte offset of the defect.
    pub fn read_tensor(path: impl AsRef<Path>) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        Self::from_tensor_bytes(&bytes)
    }

    pub fn from_tensor_bytes(bytes: &[u8]) -> Result<Self> {
        let mut off = Cursor { bytes, pos: 0 };
        let magic = off.take(4)?;
        if magic != MAGIC {
            return Err(Error::format(0, format!("bad magic {magic:?}, expected {MAGIC:?}")));
        }
        let version = off.read_u32()?;
        if version != VERSION {
            return Err(Error::format(4, format!("unsupported version {version}")));
        }
        let width = off.read_u32()?;
        let height = off.read_u32()?;
        let channels = off.read_u32()?;
        let n_frames = off.read_u32()?;
        let frame_len = width as u64 * height as u64 * channels as u64;
        if frame_len == 0 || frame_len * n_frames as u64 > MAX_ELEMENTS {
            return Err(Error::format(
                8,
                format!("dimension overflow: {width}x{height}x{channels} × {n_frames} frames"),
            ));
        }
        let mut timestamps = Vec::with_capacity(n_frames as usize);
        for _ in 0..n_frames {
            timestamps.push(off.read_f64()?);
        }
        let mut frames = Vec::with_capacity(n_frames as usize);
        for _ in 0..n_frames {
            let mut frame = Vec::with_capacity(frame_len as usize);
            for _ in 0..frame_len {
                frame.push(off.read_f32()?);
            }
            frames.push(frame);
        }
        if off.pos as usize != bytes.len() {
            return Err(Error::format(
                off.pos,
                format!("{} trailing bytes after payload", bytes.len() as u64 - off.pos),
            ));
        }
        let stack = FrameStack {
            width,
            height,
            channels,
            frames,
            timestamps,
        };
        stack.validate()?;
        Ok(stack)
    }

    /// 8-bit PNG export of one frame for human viewing: `value · gain`
    /// clamped to `[0, 255]`. Lossy, export-only.
    pub fn write_png(&self, frame: usize, gain: f32, path: impl AsRef<Path>) -> Result<()> {
        if frame >= self.frames.len() {
            return Err(Error::argument(format!(
                "frame {frame} out of range ({} frames)",
                self.frames.len()
            )));
        }
        let data = &self.frames[frame];
        let to_u8 = |v: f32| (v * gain).clamp(0.0, 255.0).round() as u8;
        let img: image::DynamicImage = if self.channels == 1 {
            image::GrayImage::from_fn(self.width, self.height, |x, y| {
                image::Luma([to_u8(data[(y * self.width + x) as usize])])
            })
            .into()
        } else {
            image::RgbImage::from_fn(self.width, self.height, |x, y| {
                let base = ((y * self.width + x) * 3) as usize;
                image::Rgb([to_u8(data[base]), to_u8(data[base + 1]), to_u8(data[base + 2])])
            })
            .into()
        };
        img.save(path.as_ref())
            .map_err(|e| Error::Argument(format!("png export failed: {e}")))?;
        Ok(())
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: u64,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let start = self.pos as usize;
        if start + n > self.bytes.len() {
            return Err(Error::format(
                self.pos,
                format!(
                    "truncated payload: wanted {n} bytes, {} remain",
                    self.bytes.len() - start
                ),
            ));
        }
        self.pos += n as u64;
        Ok(&self.bytes[start..start + n])
    }

    fn read_u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn read_f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn read_f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_stack_round_trip() {
        let stack = FrameStack::new(2, 2, 1, vec![vec![0.0; 4]], vec![0.0]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("z.strb");
        stack.write_tensor(&path).unwrap();
        // header 24 bytes + one f64 timestamp + 16 payload bytes
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 24 + 8 + 16);
        let back = FrameStack::read_tensor(&path).unwrap();
        assert_eq!(back, stack);
    }

    #[test]
    fn nan_write_refused() {
        let stack = FrameStack {
            width: 1,
            height: 1,
            channels: 1,
            frames: vec![vec![f32::NAN]],
            timestamps: vec![0.0],
        };
        let dir = tempfile::tempdir().unwrap();
        assert!(stack.write_tensor(dir.path().join("bad.strb")).is_err());
    }

    #[test]
    fn bad_magic_names_offset_zero() {
        let err = FrameStack::from_tensor_bytes(b"NOPE").unwrap_err();
        match err {
            Error::Format { offset, .. } => assert_eq!(offset, 0),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn truncated_payload_names_offset() {
        let stack = FrameStack::new(2, 2, 1, vec![vec![1.0; 4]], vec![0.5]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.strb");
        stack.write_tensor(&path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 3);
        let err = FrameStack::from_tensor_bytes(&bytes).unwrap_err();
        match err {
            Error::Format { offset, .. } => assert!(offset >= 24),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn dimension_overflow_rejected() {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"STRB");
        for v in [1u32, u32::MAX, u32::MAX, 3, u32::MAX] {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        let err = FrameStack::from_tensor_bytes(&bytes).unwrap_err();
        assert!(matches!(err, Error::Format { offset: 8, .. }));
    }
}
