//! Binary PGM (P5, maxval 255) and PBM (P4) readers and writers.
//!
//! Row-major, top-left origin. PBM ink bits (1 = black) map to foreground 1.
//! Writers emit a canonical comment-free header so that write → read → write
//! round-trips byte-identically.

use std::fs;
use std::path::Path;

use super::{BinaryImage, GrayImage};
use crate::{Error, Result};

pub fn read_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let data = fs::read(&path)?;
    let mut p = Parser::new(&data, "PGM");
    p.expect_magic(b"P5")?;
    let width = p.next_int()?;
    let height = p.next_int()?;
    let maxval = p.next_int()?;
    if maxval != 255 {
        return Err(Error::parse("PGM", format!("unsupported maxval {maxval}")));
    }
    p.skip_single_whitespace()?;
    let pixels = p.take_bytes(width * height)?;
    Ok(GrayImage::from_pixels(height, width, pixels.to_vec()))
}

pub fn write_pgm(path: impl AsRef<Path>, img: &GrayImage) -> Result<()> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    fs::write(path, out)?;
    Ok(())
}

pub fn read_pbm(path: impl AsRef<Path>) -> Result<BinaryImage> {
    let data = fs::read(&path)?;
    let mut p = Parser::new(&data, "PBM");
    p.expect_magic(b"P4")?;
    let width = p.next_int()?;
    let height = p.next_int()?;
    p.skip_single_whitespace()?;
    let row_bytes = width.div_ceil(8);
    let raw = p.take_bytes(row_bytes * height)?;
    let mut pixels = Vec::with_capacity(width * height);
    for r in 0..height {
        let row = &raw[r * row_bytes..(r + 1) * row_bytes];
        for c in 0..width {
            let bit = (row[c / 8] >> (7 - c % 8)) & 1;
            pixels.push(bit);
        }
    }
    Ok(BinaryImage::from_pixels(height, width, pixels))
}

pub fn write_pbm(path: impl AsRef<Path>, img: &BinaryImage) -> Result<()> {
    let mut out = format!("P4\n{} {}\n", img.width(), img.height()).into_bytes();
    let row_bytes = img.width().div_ceil(8);
    for r in 0..img.height() {
        let mut packed = vec![0u8; row_bytes];
        for (c, &p) in img.row(r).iter().enumerate() {
            if p == 1 {
                packed[c / 8] |= 1 << (7 - c % 8);
            }
        }
        out.extend_from_slice(&packed);
    }
    fs::write(path, out)?;
    Ok(())
}

struct Parser<'a> {
    data: &'a [u8],
    pos: usize,
    what: &'static str,
}

impl<'a> Parser<'a> {
    fn new(data: &'a [u8], what: &'static str) -> Self {
        Self { data, pos: 0, what }
    }

    fn expect_magic(&mut self, magic: &[u8]) -> Result<()> {
        if self.data.len() < magic.len() || &self.data[..magic.len()] != magic {
            return Err(Error::parse(self.what, "bad magic number"));
        }
        self.pos = magic.len();
        Ok(())
    }

    /// Skips whitespace and `#` comment lines, then reads a decimal integer.
    fn next_int(&mut self) -> Result<usize> {
        loop {
            while self.pos < self.data.len() && self.data[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.data.len() && self.data[self.pos] == b'#' {
                while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        let start = self.pos;
        while self.pos < self.data.len() && self.data[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(self.what, "expected integer in header"));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(self.what, "integer out of range"))
    }

    /// Exactly one whitespace byte separates the header from raster data.
    fn skip_single_whitespace(&mut self) -> Result<()> {
        if self.pos < self.data.len() && self.data[self.pos].is_ascii_whitespace() {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::parse(self.what, "missing raster separator"))
        }
    }

    fn take_bytes(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.data.len() < self.pos + n {
            return Err(Error::parse(self.what, "truncated raster data"));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
}
