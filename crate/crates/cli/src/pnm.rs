//! PBM and PGM codecs (P1, P2, P4, P5).
//!
//! Headers may contain `#` comments and any whitespace. PBM `1` is black,
//! which is read as foreground. Writers emit the binary variants.

use edgemorph::{BinaryImage, Pixel};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{0}")]
pub struct PnmError(String);

fn err<T>(msg: impl Into<String>) -> Result<T, PnmError> {
    Err(PnmError(msg.into()))
}

/// A decoded PNM raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pnm {
    Bitmap(BinaryImage),
    Graymap(Graymap),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graymap {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    /// Row-major samples in `0..=maxval`.
    pub samples: Vec<u16>,
}

impl Graymap {
    /// Samples rescaled to `0..=255`, rounding to nearest.
    pub fn to_8bit(&self) -> Vec<u8> {
        let max = u32::from(self.maxval);
        self.samples
            .iter()
            .map(|&v| {
                if max == 255 {
                    v as u8
                } else {
                    ((u32::from(v) * 255 + max / 2) / max) as u8
                }
            })
            .collect()
    }

    /// Foreground wherever the 8-bit value is at least `threshold`.
    pub fn threshold(&self, threshold: u8) -> BinaryImage {
        let data = self.to_8bit().into_iter().map(|v| v >= threshold).collect();
        BinaryImage::from_vec(self.width, self.height, data).expect("sample count matches size")
    }
}

impl Pnm {
    pub fn width(&self) -> usize {
        match self {
            Pnm::Bitmap(b) => b.width(),
            Pnm::Graymap(g) => g.width,
        }
    }

    pub fn height(&self) -> usize {
        match self {
            Pnm::Bitmap(b) => b.height(),
            Pnm::Graymap(g) => g.height,
        }
    }

    /// Binarises a graymap at `threshold`; bitmaps pass through.
    pub fn to_binary(&self, threshold: u8) -> BinaryImage {
        match self {
            Pnm::Bitmap(b) => b.clone(),
            Pnm::Graymap(g) => g.threshold(threshold),
        }
    }
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&c) = self.buf.get(self.pos) {
            if c == b'#' {
                while self.buf.get(self.pos).is_some_and(|&c| c != b'\n' && c != b'\r') {
                    self.pos += 1;
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32, PnmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.buf.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return err(format!("expected {what} at byte {start}"));
        }
        std::str::from_utf8(&self.buf[start..self.pos])
            .expect("ascii digits")
            .parse()
            .or_else(|_| err(format!("{what} is too large")))
    }

    /// A single ASCII bitmap digit; P1 allows digits without separators.
    fn bit(&mut self) -> Result<bool, PnmError> {
        self.skip_space_and_comments();
        match self.buf.get(self.pos) {
            Some(b'0') => {
                self.pos += 1;
                Ok(false)
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(true)
            }
            Some(&c) => err(format!("unexpected byte {c:#04x} in bitmap data")),
            None => err("bitmap data ends early"),
        }
    }

    /// Consumes the single whitespace byte that separates a binary header
    /// from its raster.
    fn raster_start(&mut self) -> Result<&'a [u8], PnmError> {
        match self.buf.get(self.pos) {
            Some(c) if c.is_ascii_whitespace() => Ok(&self.buf[self.pos + 1..]),
            _ => err("missing whitespace before raster data"),
        }
    }
}

fn dimensions(cur: &mut Cursor<'_>) -> Result<(usize, usize), PnmError> {
    let w = cur.number("width")? as usize;
    let h = cur.number("height")? as usize;
    if w == 0 || h == 0 {
        return err(format!("image size {w}x{h} is empty"));
    }
    Ok((w, h))
}

fn maxval(cur: &mut Cursor<'_>) -> Result<u16, PnmError> {
    let m = cur.number("maxval")?;
    match u16::try_from(m) {
        Ok(m) if m > 0 => Ok(m),
        _ => err(format!("maxval {m} is outside 1..=65535")),
    }
}

pub fn decode(buf: &[u8]) -> Result<Pnm, PnmError> {
    if buf.len() < 2 || buf[0] != b'P' {
        return err("not a PNM file");
    }
    let kind = buf[1];
    let mut cur = Cursor { buf, pos: 2 };
    match kind {
        b'1' => {
            let (w, h) = dimensions(&mut cur)?;
            let data = (0..w * h).map(|_| cur.bit()).collect::<Result<_, _>>()?;
            Ok(Pnm::Bitmap(BinaryImage::from_vec(w, h, data).expect("size")))
        }
        b'4' => {
            let (w, h) = dimensions(&mut cur)?;
            let raster = cur.raster_start()?;
            let stride = w.div_ceil(8);
            if raster.len() < stride * h {
                return err("bitmap raster is truncated");
            }
            Ok(Pnm::Bitmap(BinaryImage::from_fn(w, h, |p| {
                raster[p.row * stride + p.col / 8] >> (7 - p.col % 8) & 1 == 1
            })))
        }
        b'2' => {
            let (w, h) = dimensions(&mut cur)?;
            let maxval = maxval(&mut cur)?;
            let samples = (0..w * h)
                .map(|_| {
                    let v = cur.number("sample")?;
                    if v > u32::from(maxval) {
                        return err(format!("sample {v} exceeds maxval {maxval}"));
                    }
                    Ok(v as u16)
                })
                .collect::<Result<_, _>>()?;
            Ok(Pnm::Graymap(Graymap {
                width: w,
                height: h,
                maxval,
                samples,
            }))
        }
        b'5' => {
            let (w, h) = dimensions(&mut cur)?;
            let maxval = maxval(&mut cur)?;
            let raster = cur.raster_start()?;
            let wide = maxval > 255;
            let bytes = w * h * if wide { 2 } else { 1 };
            if raster.len() < bytes {
                return err("graymap raster is truncated");
            }
            let samples: Vec<u16> = if wide {
                raster[..bytes]
                    .chunks_exact(2)
                    .map(|c| u16::from_be_bytes([c[0], c[1]]))
                    .collect()
            } else {
                raster[..bytes].iter().map(|&b| u16::from(b)).collect()
            };
            if let Some(v) = samples.iter().find(|&&v| v > maxval) {
                return err(format!("sample {v} exceeds maxval {maxval}"));
            }
            Ok(Pnm::Graymap(Graymap {
                width: w,
                height: h,
                maxval,
                samples,
            }))
        }
        _ => err(format!("unsupported PNM variant P{}", kind as char)),
    }
}

/// Binary PBM (P4).
pub fn encode_pbm(img: &BinaryImage) -> Vec<u8> {
    let (w, h) = (img.width(), img.height());
    let mut out = format!("P4\n{w} {h}\n").into_bytes();
    let stride = w.div_ceil(8);
    for r in 0..h {
        let mut row = vec![0u8; stride];
        for c in 0..w {
            if img.get(Pixel::new(r, c)) {
                row[c / 8] |= 0x80 >> (c % 8);
            }
        }
        out.extend_from_slice(&row);
    }
    out
}

/// Binary 8-bit PGM (P5, maxval 255).
pub fn encode_pgm(width: usize, height: usize, samples: &[u8]) -> Vec<u8> {
    assert_eq!(samples.len(), width * height, "sample count must match size");
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(samples);
    out
}

/// A binary image as a PGM: foreground 255, background 0.
pub fn encode_binary_pgm(img: &BinaryImage) -> Vec<u8> {
    let samples: Vec<u8> = img.data().iter().map(|&b| if b { 255 } else { 0 }).collect();
    encode_pgm(img.width(), img.height(), &samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascii_bitmap_with_comments_and_packed_digits() {
        let text = b"P1\n# a comment\n3 # inline\n2\n010\n1 1\n0";
        let Pnm::Bitmap(img) = decode(text).unwrap() else {
            panic!("expected bitmap")
        };
        assert_eq!(img.to_ascii(), ".#.\n##.\n");
    }

    #[test]
    fn binary_bitmap_pads_rows() {
        let img = BinaryImage::from_fn(10, 3, |p| (p.row + p.col) % 3 == 0);
        let bytes = encode_pbm(&img);
        assert_eq!(bytes.len(), "P4\n10 3\n".len() + 2 * 3);
        assert_eq!(decode(&bytes).unwrap(), Pnm::Bitmap(img));
        assert_eq!(encode_pbm(&decode(&bytes).unwrap().to_binary(128)), bytes);
    }

    #[test]
    fn graymaps_and_threshold() {
        let Pnm::Graymap(g) = decode(b"P2 3 1 15 0 8 15").unwrap() else {
            panic!("expected graymap")
        };
        assert_eq!(g.to_8bit(), vec![0, 136, 255]);
        assert_eq!(g.threshold(128).data(), &[false, true, true]);
        assert_eq!(g.threshold(200).data(), &[false, false, true]);

        let wide = b"P5\n2 1\n1000\n\x00\x01\x03\xe8";
        let Pnm::Graymap(g) = decode(wide).unwrap() else {
            panic!("expected graymap")
        };
        assert_eq!(g.samples, vec![1, 1000]);

        let bytes = encode_pgm(2, 2, &[0, 1, 254, 255]);
        let Pnm::Graymap(g) = decode(&bytes).unwrap() else {
            panic!("expected graymap")
        };
        assert_eq!(encode_pgm(2, 2, &g.to_8bit()), bytes);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(decode(b"").is_err());
        assert!(decode(b"P3 1 1 255 0 0 0").is_err());
        assert!(decode(b"P1 2 2 1 0 1").is_err());
        assert!(decode(b"P4 16 2\n\x00\x00").is_err());
        assert!(decode(b"P2 1 1 10 11").is_err());
        assert!(decode(b"P2 0 1 10").is_err());
        assert!(decode(b"P1 1 1 2").is_err());
    }
}
