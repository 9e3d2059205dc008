//! Netpbm (PGM/PPM, plain and raw) reader producing per-pixel features
//! `[r, g, b, c * row, c * col]`.
//!
//! Color channels are scaled to `[0, 1]` by the file's maxval, grayscale is
//! replicated to three channels, and pixel coordinates are scaled to `[0, 1]`
//! per axis before the position weight `c` is applied.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ImageFormat {
    /// P2
    PgmPlain,
    /// P5
    PgmRaw,
    /// P3
    PpmPlain,
    /// P6
    PpmRaw,
}

impl ImageFormat {
    fn from_magic(m: &[u8]) -> Option<Self> {
        match m {
            b"P2" => Some(Self::PgmPlain),
            b"P5" => Some(Self::PgmRaw),
            b"P3" => Some(Self::PpmPlain),
            b"P6" => Some(Self::PpmRaw),
            _ => None,
        }
    }

    fn channels(self) -> usize {
        match self {
            Self::PgmPlain | Self::PgmRaw => 1,
            Self::PpmPlain | Self::PpmRaw => 3,
        }
    }

    fn is_raw(self) -> bool {
        matches!(self, Self::PgmRaw | Self::PpmRaw)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageFeatures {
    pub width: usize,
    pub height: usize,
    pub format: ImageFormat,
    /// Row-major pixels, RGB in `[0, 1]`.
    pub color: Vec<[f64; 3]>,
    /// Row-major pixels, `(row, col)` scaled to `[0, 1]`.
    pub position: Vec<[f64; 2]>,
    /// Weight applied to the position columns.
    pub c: f64,
}

impl ImageFeatures {
    /// Builds features from raw row-major RGB values in `[0, 1]`.
    pub fn from_rgb(width: usize, height: usize, rgb: Vec<[f64; 3]>, c: f64) -> Result<Self> {
        if rgb.len() != width * height {
            return Err(Error::Image(format!(
                "{} pixels supplied for a {width}x{height} image",
                rgb.len()
            )));
        }
        let scale = |v: usize, len: usize| {
            if len > 1 {
                v as f64 / (len - 1) as f64
            } else {
                0.0
            }
        };
        let position = (0..height)
            .flat_map(|r| (0..width).map(move |col| [scale(r, height), scale(col, width)]))
            .collect();
        Ok(Self {
            width,
            height,
            format: ImageFormat::PpmRaw,
            color: rgb,
            position,
            c,
        })
    }

    pub fn n_pixels(&self) -> usize {
        self.color.len()
    }

    pub fn with_position_weight(&self, c: f64) -> Self {
        Self { c, ..self.clone() }
    }

    /// `n x 5` feature matrix.
    pub fn features(&self) -> DMatrix<f64> {
        let n = self.n_pixels();
        DMatrix::from_fn(n, 5, |i, k| match k {
            0..=2 => self.color[i][k],
            _ => self.c * self.position[i][k - 3],
        })
    }
}

pub fn load_image(path: &Path, c: f64, pixel_cap: usize) -> Result<ImageFeatures> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_image(&bytes, c, pixel_cap)
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws_and_comments(&mut self) {
        while self.pos < self.buf.len() {
            let b = self.buf[self.pos];
            if b == b'#' {
                while self.pos < self.buf.len() && self.buf[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_ws_and_comments();
        let start = self.pos;
        while self.pos < self.buf.len() && !self.buf[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.buf[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let tok = self
            .token()
            .ok_or_else(|| Error::Image(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                Error::Image(format!("invalid {what} '{}'", String::from_utf8_lossy(tok)))
            })
    }
}

pub fn parse_image(bytes: &[u8], c: f64, pixel_cap: usize) -> Result<ImageFeatures> {
    let mut cur = Cursor { buf: bytes, pos: 0 };
    let magic = cur
        .token()
        .ok_or_else(|| Error::Image("empty file".into()))?;
    let format = ImageFormat::from_magic(magic).ok_or_else(|| {
        Error::Image(format!(
            "unsupported magic '{}' (expected P2, P3, P5 or P6)",
            String::from_utf8_lossy(magic)
        ))
    })?;
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::Image("zero image dimension".into()));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Image(format!("maxval {maxval} outside 1..=65535")));
    }
    let n = width * height;
    if n > pixel_cap {
        return Err(Error::TooLarge { n, cap: pixel_cap });
    }

    let channels = format.channels();
    let count = n * channels;
    let mut samples = Vec::with_capacity(count);
    if format.is_raw() {
        // exactly one whitespace byte separates the header from the payload
        if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
            return Err(Error::Image("missing separator before raster".into()));
        }
        let data = &bytes[cur.pos + 1..];
        let width_bytes = if maxval > 255 { 2 } else { 1 };
        if data.len() < count * width_bytes {
            return Err(Error::Image(format!(
                "truncated raster: need {} bytes, found {}",
                count * width_bytes,
                data.len()
            )));
        }
        for k in 0..count {
            let v = if width_bytes == 2 {
                u16::from_be_bytes([data[2 * k], data[2 * k + 1]]) as usize
            } else {
                data[k] as usize
            };
            samples.push(v);
        }
    } else {
        for k in 0..count {
            let v = cur
                .number("sample")
                .map_err(|_| Error::Image(format!("truncated raster at sample {k} of {count}")))?;
            samples.push(v);
        }
    }
    if let Some(&bad) = samples.iter().find(|&&v| v > maxval) {
        return Err(Error::Image(format!(
            "sample {bad} exceeds maxval {maxval}"
        )));
    }

    let scale = maxval as f64;
    let rgb = (0..n)
        .map(|p| {
            if channels == 1 {
                let v = samples[p] as f64 / scale;
                [v, v, v]
            } else {
                [
                    samples[3 * p] as f64 / scale,
                    samples[3 * p + 1] as f64 / scale,
                    samples[3 * p + 2] as f64 / scale,
                ]
            }
        })
        .collect();
    let mut img = ImageFeatures::from_rgb(width, height, rgb, c)?;
    img.format = format;
    Ok(img)
}
