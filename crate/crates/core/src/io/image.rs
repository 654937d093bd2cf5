//! Binary PGM (P5, maxval 255) read/write and PNG input.

use std::path::Path;

use crate::{Error, Frame, Result};

const PNG_SIGNATURE: &[u8] = b"\x89PNG\r\n\x1a\n";

pub fn write_pgm(frame: &Frame) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", frame.width(), frame.height()).into_bytes();
    out.extend_from_slice(frame.samples());
    out
}

pub fn write_pgm_file(frame: &Frame, path: &Path) -> Result<()> {
    std::fs::write(path, write_pgm(frame))?;
    Ok(())
}

/// Parses a P5 file. Comments may appear between header fields; exactly
/// width×height samples must follow the single whitespace after maxval.
pub fn read_pgm(bytes: &[u8]) -> Result<Frame> {
    let bad = |m: &str| Error::UnsupportedFormat(format!("PGM: {m}"));
    if !bytes.starts_with(b"P5") {
        return Err(bad("missing P5 magic"));
    }
    let mut pos = 2;
    let mut fields = [0u32; 3];
    for field in fields.iter_mut() {
        loop {
            match bytes.get(pos) {
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&c| c != b'\n') {
                        pos += 1;
                    }
                }
                Some(c) if c.is_ascii_whitespace() => pos += 1,
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("header number out of range"))?;
    }
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(bad("no whitespace after maxval"));
    }
    pos += 1;
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(bad(&format!("maxval {maxval}, only 255 is supported")));
    }
    let data = &bytes[pos..];
    let expected = width as usize * height as usize;
    if data.len() != expected {
        return Err(bad(&format!("{} sample bytes for {width}x{height}", data.len())));
    }
    Frame::new(width, height, data.to_vec())
}

/// PGM or PNG by content; PNG colour is reduced to luma with
/// round(0.299 R + 0.587 G + 0.114 B).
pub fn decode_image(bytes: &[u8]) -> Result<Frame> {
    if bytes.starts_with(b"P5") {
        return read_pgm(bytes);
    }
    if bytes.starts_with(PNG_SIGNATURE) {
        let img = ::image::load_from_memory_with_format(bytes, ::image::ImageFormat::Png)
            .map_err(|e| Error::UnsupportedFormat(format!("PNG: {e}")))?
            .to_rgb8();
        let samples = img
            .pixels()
            .map(|p| {
                let [r, g, b] = p.0;
                (0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64).round() as u8
            })
            .collect();
        return Frame::new(img.width(), img.height(), samples);
    }
    Err(Error::UnsupportedFormat("expected binary PGM (P5) or PNG".into()))
}

pub fn read_image(path: &Path) -> Result<Frame> {
    decode_image(&std::fs::read(path)?)
}
