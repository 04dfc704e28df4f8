//! Netpbm input and output: PGM (`P2`, `P5`) and PBM (`P1`, `P4`).
//!
//! Header tokens are separated by whitespace and may be interleaved with
//! `#` comments running to the end of the line. In PBM files a `1` marks an
//! active site.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::image::{BinaryImage, GrayImage};

/// Either kind of image, as found in a file.
#[derive(Debug, Clone, PartialEq)]
pub enum PnmImage {
    Gray(GrayImage),
    Binary(BinaryImage),
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Cursor { bytes, pos: 0 }
    }

    fn magic(&mut self) -> Result<[u8; 2]> {
        match self.bytes {
            [b'P', d, ..] => {
                self.pos = 2;
                Ok([b'P', *d])
            }
            _ => Err(Error::parse(0, "missing netpbm magic number")),
        }
    }

    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Reads an unsigned decimal token.
    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(match self.bytes.get(self.pos) {
                None => Error::parse(start, format!("unexpected end of data, expected {what}")),
                Some(b) => {
                    Error::parse(start, format!("unexpected byte {b:#04x}, expected {what}"))
                }
            });
        }
        if self
            .bytes
            .get(self.pos)
            .is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#')
        {
            return Err(Error::parse(self.pos, format!("malformed {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(start, format!("{what} out of range")))
    }

    /// Reads a single PBM digit; these need not be whitespace separated.
    fn bit(&mut self) -> Result<bool> {
        self.skip_whitespace_and_comments();
        match self.bytes.get(self.pos) {
            Some(b'0') => {
                self.pos += 1;
                Ok(false)
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(true)
            }
            Some(b) => Err(Error::parse(
                self.pos,
                format!("unexpected byte {b:#04x} in bitmap"),
            )),
            None => Err(Error::parse(self.pos, "truncated bitmap")),
        }
    }

    /// Consumes the single whitespace byte that precedes a binary raster.
    fn raster_separator(&mut self) -> Result<()> {
        match self.bytes.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(Error::parse(self.pos, "missing whitespace before raster")),
        }
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.pos + len;
        let slice = self.bytes.get(self.pos..end).ok_or_else(|| {
            Error::parse(
                self.bytes.len(),
                format!(
                    "truncated raster: need {len} bytes from offset {}",
                    self.pos
                ),
            )
        })?;
        self.pos = end;
        Ok(slice)
    }
}

fn dimensions(cur: &mut Cursor<'_>) -> Result<(usize, usize)> {
    let at = cur.pos;
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    if width == 0 || height == 0 {
        return Err(Error::parse(at, format!("empty image {width}x{height}")));
    }
    Ok((height, width))
}

fn maxval(cur: &mut Cursor<'_>) -> Result<u32> {
    cur.skip_whitespace_and_comments();
    let at = cur.pos;
    let maxval = cur.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::parse(
            at,
            format!("maxval {maxval} not in 1..=65535"),
        ));
    }
    Ok(maxval)
}

/// Parses a PGM file into intensities `raw / maxval`.
pub fn load_gray(bytes: &[u8]) -> Result<GrayImage> {
    match load(bytes)? {
        PnmImage::Gray(g) => Ok(g),
        PnmImage::Binary(_) => Err(Error::parse(0, "expected a PGM (P2/P5) file, found PBM")),
    }
}

/// Parses a PBM file.
pub fn load_binary(bytes: &[u8]) -> Result<BinaryImage> {
    match load(bytes)? {
        PnmImage::Binary(b) => Ok(b),
        PnmImage::Gray(_) => Err(Error::parse(0, "expected a PBM (P1/P4) file, found PGM")),
    }
}

/// Parses any supported netpbm file, dispatching on the magic number.
pub fn load(bytes: &[u8]) -> Result<PnmImage> {
    let mut cur = Cursor::new(bytes);
    let magic = cur.magic()?;
    match &magic {
        b"P1" => {
            let (rows, cols) = dimensions(&mut cur)?;
            let active = (0..rows * cols)
                .map(|_| cur.bit())
                .collect::<Result<Vec<_>>>()?;
            Ok(PnmImage::Binary(BinaryImage::new(rows, cols, active)?))
        }
        b"P4" => {
            let (rows, cols) = dimensions(&mut cur)?;
            cur.raster_separator()?;
            let stride = cols.div_ceil(8);
            let raster = cur.take(stride * rows)?;
            let active = (0..rows)
                .flat_map(|r| (0..cols).map(move |c| (r, c)))
                .map(|(r, c)| raster[r * stride + c / 8] & (0x80 >> (c % 8)) != 0)
                .collect();
            Ok(PnmImage::Binary(BinaryImage::new(rows, cols, active)?))
        }
        b"P2" => {
            let (rows, cols) = dimensions(&mut cur)?;
            let maxval = maxval(&mut cur)?;
            let mut values = Vec::with_capacity(rows * cols);
            for _ in 0..rows * cols {
                cur.skip_whitespace_and_comments();
                let at = cur.pos;
                let v = cur.number("pixel value")?;
                if v > maxval {
                    return Err(Error::parse(
                        at,
                        format!("pixel value {v} exceeds maxval {maxval}"),
                    ));
                }
                values.push(f64::from(v) / f64::from(maxval));
            }
            Ok(PnmImage::Gray(GrayImage::new(rows, cols, values)?))
        }
        b"P5" => {
            let (rows, cols) = dimensions(&mut cur)?;
            let maxval = maxval(&mut cur)?;
            cur.raster_separator()?;
            let wide = maxval > 255;
            let sample_len = if wide { 2 } else { 1 };
            let start = cur.pos;
            let raster = cur.take(rows * cols * sample_len)?;
            let mut values = Vec::with_capacity(rows * cols);
            for (i, chunk) in raster.chunks_exact(sample_len).enumerate() {
                let v = if wide {
                    u32::from(u16::from_be_bytes([chunk[0], chunk[1]]))
                } else {
                    u32::from(chunk[0])
                };
                if v > maxval {
                    return Err(Error::parse(
                        start + i * sample_len,
                        format!("pixel value {v} exceeds maxval {maxval}"),
                    ));
                }
                values.push(f64::from(v) / f64::from(maxval));
            }
            Ok(PnmImage::Gray(GrayImage::new(rows, cols, values)?))
        }
        _ => Err(Error::parse(
            0,
            format!("unsupported magic {:?}", String::from_utf8_lossy(&magic)),
        )),
    }
}

/// Writes a plain (`P1`) PBM, one raster row per line wrapped at 70 digits.
pub fn save_binary(image: &BinaryImage) -> Vec<u8> {
    let mut out = format!("P1\n{} {}\n", image.cols(), image.rows());
    for row in image.active().chunks(image.cols()) {
        for line in row.chunks(70) {
            out.extend(line.iter().map(|&a| if a { '1' } else { '0' }));
            out.push('\n');
        }
    }
    out.into_bytes()
}

/// Writes a plain (`P2`) PGM, quantising intensities to `0..=maxval`.
///
/// Values are space separated with one image row per line, so files that
/// already follow this layout are reproduced byte for byte.
pub fn save_gray(image: &GrayImage, maxval: u16) -> Result<Vec<u8>> {
    if maxval == 0 {
        return Err(Error::param("maxval", "must be at least 1"));
    }
    let mut out = format!("P2\n{} {}\n{}\n", image.cols(), image.rows(), maxval);
    let scale = f64::from(maxval);
    for row in image.intensities().chunks(image.cols()) {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}", (v * scale).round() as u32);
        }
        out.push('\n');
    }
    Ok(out.into_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_pgm_extremes() {
        let g = load_gray(b"P2 2 1 255 \n 0 255").unwrap();
        assert_eq!((g.rows(), g.cols()), (1, 2));
        assert_eq!(g.intensities(), &[0.0, 1.0]);
    }

    #[test]
    fn truncated_plain_pgm() {
        let err = load_gray(b"P2 2 2 255\n0 1 2").unwrap_err();
        match err {
            Error::Parse { offset, .. } => assert_eq!(offset, 16),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn header_errors_carry_offsets() {
        assert!(matches!(
            load_gray(b"P2 2 1 0\n0 0"),
            Err(Error::Parse { offset: 7, .. })
        ));
        assert!(matches!(
            load_gray(b"P2 2 1 70000\n0 0"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            load_gray(b"P2 2x 1 255\n0 0"),
            Err(Error::Parse { offset: 4, .. })
        ));
        assert!(matches!(
            load_gray(b"P7 1 1 1\n0"),
            Err(Error::Parse { offset: 0, .. })
        ));
        assert!(matches!(
            load_gray(b""),
            Err(Error::Parse { offset: 0, .. })
        ));
        assert!(matches!(
            load_gray(b"P2 1 1 3\n4"),
            Err(Error::Parse { offset: 9, .. })
        ));
    }

    #[test]
    fn raw_and_plain_pgm_agree() {
        let plain =
            load_gray(b"P2\n# comment\n3 2\n# another\n200\n0 50 100\n150 200 7\n").unwrap();
        let mut raw = b"P5\n3 2 # trailing\n200\n".to_vec();
        raw.extend_from_slice(&[0, 50, 100, 150, 200, 7]);
        assert_eq!(load_gray(&raw).unwrap(), plain);
    }

    #[test]
    fn sixteen_bit_raw_pgm() {
        let mut raw = b"P5 2 1 1000\n".to_vec();
        raw.extend_from_slice(&[0x03, 0xE8, 0x01, 0xF4]);
        let g = load_gray(&raw).unwrap();
        assert_eq!(g.intensities(), &[1.0, 0.5]);
    }

    #[test]
    fn truncated_raw_pgm() {
        let raw = b"P5 2 2 255\n\x01\x02\x03".to_vec();
        assert!(matches!(load_gray(&raw), Err(Error::Parse { .. })));
    }

    #[test]
    fn pbm_output_layout() {
        let one = BinaryImage::from_flags(1, 1, &[1]).unwrap();
        assert_eq!(save_binary(&one), b"P1\n1 1\n1\n");
        let zeros = BinaryImage::filled(2, 2, false).unwrap();
        assert_eq!(save_binary(&zeros), b"P1\n2 2\n00\n00\n");
    }

    #[test]
    fn pbm_reads_separated_and_packed_digits() {
        let a = load_binary(b"P1\n3 2\n1 0 1\n0 1 0\n").unwrap();
        let b = load_binary(b"P1 3 2 101010").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.active(), &[true, false, true, false, true, false]);
        assert!(load_binary(b"P1 2 2 101").is_err());
        assert!(load_binary(b"P1 2 1 12").is_err());
    }

    #[test]
    fn raw_pbm() {
        let mut raw = b"P4\n10 2\n".to_vec();
        raw.extend_from_slice(&[0b1000_0000, 0b0100_0000, 0b0000_0001, 0b1100_0000]);
        let b = load_binary(&raw).unwrap();
        let mut expected = vec![false; 20];
        expected[0] = true;
        expected[9] = true;
        expected[17] = true;
        expected[18] = true;
        expected[19] = true;
        assert_eq!(b.active(), expected.as_slice());
    }

    #[test]
    fn wide_rows_wrap() {
        let img = BinaryImage::filled(1, 75, true).unwrap();
        let text = String::from_utf8(save_binary(&img)).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[2].len(), 70);
        assert_eq!(lines[3].len(), 5);
        assert_eq!(load_binary(text.as_bytes()).unwrap(), img);
    }

    #[test]
    fn canonical_pgm_round_trip() {
        let text = b"P2\n3 2\n255\n0 17 255\n128 64 1\n";
        let g = load_gray(text).unwrap();
        assert_eq!(save_gray(&g, 255).unwrap(), text);
    }

    #[test]
    fn kind_mismatch_is_reported() {
        assert!(load_gray(b"P1 1 1 1").is_err());
        assert!(load_binary(b"P2 1 1 1 1").is_err());
    }
}
