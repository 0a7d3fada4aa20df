//! Minimal binary PPM (P6) and PGM (P5) codec, 8-bit only.
//!
//! These formats are trivially parseable, which keeps the pipeline free of
//! heavyweight image-decoding dependencies.

use std::fs;
use std::io::Write;
use std::path::Path;

use fz_autodiff::Tensor;

use crate::error::{DataError, Result};

struct HeaderParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderParser<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    /// Skips whitespace and `#` comments between header tokens.
    fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn number(&mut self) -> Option<usize> {
        self.skip_separators();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return None;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()?
            .parse()
            .ok()
    }
}

/// Decodes an 8-bit P6/P5 file into a `[3, H, W]` tensor scaled to [0, 1].
/// Grayscale input is replicated across the three channels.
pub fn load_image(path: &Path) -> Result<Tensor> {
    let bytes = fs::read(path).map_err(|e| DataError::io(path, e))?;
    let decode_err = |reason: &str| DataError::Decode {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };

    if bytes.len() < 2 {
        return Err(decode_err("file too short for a magic number"));
    }
    let channels = match &bytes[..2] {
        b"P6" => 3usize,
        b"P5" => 1usize,
        _ => return Err(decode_err("unsupported magic (expected P6 or P5)")),
    };
    let mut parser = HeaderParser::new(&bytes[2..]);
    let width = parser.number().ok_or_else(|| decode_err("missing width"))?;
    let height = parser.number().ok_or_else(|| decode_err("missing height"))?;
    let maxval = parser.number().ok_or_else(|| decode_err("missing maxval"))?;
    if width == 0 || height == 0 {
        return Err(decode_err("zero image dimension"));
    }
    if maxval != 255 {
        return Err(decode_err("only 8-bit images (maxval 255) are supported"));
    }
    // exactly one whitespace byte separates the header from the raster
    let data_start = 2 + parser.pos + 1;
    let expected = width * height * channels;
    if bytes.len() < data_start + expected {
        return Err(decode_err("truncated pixel data"));
    }
    let raster = &bytes[data_start..data_start + expected];

    let mut data = vec![0.0f64; 3 * height * width];
    for y in 0..height {
        for x in 0..width {
            let pixel = y * width + x;
            for c in 0..3 {
                let raw = if channels == 3 {
                    raster[pixel * 3 + c]
                } else {
                    raster[pixel]
                };
                data[c * height * width + pixel] = raw as f64 / 255.0;
            }
        }
    }
    Ok(Tensor::new(vec![3, height, width], data)?)
}

/// Writes interleaved RGB bytes as a binary P6 file.
pub fn write_ppm(path: &Path, width: usize, height: usize, rgb: &[u8]) -> Result<()> {
    assert_eq!(rgb.len(), width * height * 3, "raster size mismatch");
    let mut out = Vec::with_capacity(rgb.len() + 32);
    write!(out, "P6\n{width} {height}\n255\n").expect("write to vec");
    out.extend_from_slice(rgb);
    fs::write(path, out).map_err(|e| DataError::io(path, e))
}
