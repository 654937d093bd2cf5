//! Pixel-domain comparisons between frames.

use std::fmt;

use crate::{Error, Frame, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psnr {
    /// The frames are equal; PSNR is unbounded.
    Identical,
    Db(f64),
}

impl Psnr {
    /// Decibels, with `Identical` as +∞ so comparisons order naturally.
    pub fn as_f64(self) -> f64 {
        match self {
            Psnr::Identical => f64::INFINITY,
            Psnr::Db(db) => db,
        }
    }
}

impl fmt::Display for Psnr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Psnr::Identical => f.write_str("identical"),
            Psnr::Db(db) => write!(f, "{db:.4}"),
        }
    }
}

fn check_dims(a: &Frame, b: &Frame) -> Result<()> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    Ok(())
}

pub fn mse(a: &Frame, b: &Frame) -> Result<f64> {
    check_dims(a, b)?;
    let sum: u64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(&x, &y)| (x as i64 - y as i64).pow(2) as u64)
        .sum();
    Ok(sum as f64 / a.samples().len() as f64)
}

pub fn psnr(a: &Frame, b: &Frame) -> Result<Psnr> {
    let m = mse(a, b)?;
    if m == 0.0 {
        return Ok(Psnr::Identical);
    }
    Ok(Psnr::Db(10.0 * (255.0f64 * 255.0 / m).log10()))
}

/// Sobel gradient magnitude per sample, borders replicated.
pub fn gradient_magnitude(frame: &Frame) -> Vec<f64> {
    let (w, h) = (frame.width() as i64, frame.height() as i64);
    let at = |x: i64, y: i64| frame.get(x.clamp(0, w - 1) as u32, y.clamp(0, h - 1) as u32) as f64;
    let mut out = Vec::with_capacity((w * h) as usize);
    for y in 0..h {
        for x in 0..w {
            let gx = at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1)
                - at(x - 1, y - 1)
                - 2.0 * at(x - 1, y)
                - at(x - 1, y + 1);
            let gy = at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1)
                - at(x - 1, y - 1)
                - 2.0 * at(x, y - 1)
                - at(x + 1, y - 1);
            out.push((gx * gx + gy * gy).sqrt());
        }
    }
    out
}

/// Pearson correlation of the two frames' gradient magnitudes, a measure of
/// how much edge structure they share. `None` when either map is constant.
pub fn gradient_correlation(a: &Frame, b: &Frame) -> Result<Option<f64>> {
    check_dims(a, b)?;
    let ga = gradient_magnitude(a);
    let gb = gradient_magnitude(b);
    Ok(pearson(&ga, &gb))
}

pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some(sab / (saa * sbb).sqrt())
}
