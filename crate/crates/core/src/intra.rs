//! Reference sample preparation and the 35 intra prediction modes.
//!
//! Reference layout for an N×N block at (x, y):
//!
//! ```text
//!   top[0]  top[1] ... top[2N]        top[0] is the corner (x-1, y-1),
//!   left[0]  +---------+              top[i] is (x-1+i, y-1),
//!   ...      |  block  |              left[j] is (x-1, y+j).
//!   left[2N-1]
//! ```
//!
//! Unavailable samples (outside the picture or not yet decoded) are filled
//! by scanning from left[2N-1] up to the corner and then along the top row,
//! copying the most recent available value; when nothing is available every
//! reference is 128.

use crate::types::{CuRect, IntraMode, MIN_CU_SIZE};
use crate::{Error, Frame, Result};

/// Value used when no reference sample is available.
pub const DEFAULT_REFERENCE: u8 = 128;

/// Picture under reconstruction plus a record of which 8×8 units have been
/// decoded so far.
#[derive(Debug, Clone)]
pub struct Canvas {
    frame: Frame,
    decoded: Vec<bool>,
    units_w: u32,
}

impl Canvas {
    /// Dimensions must be multiples of 8.
    pub fn new(width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 || !width.is_multiple_of(MIN_CU_SIZE) || !height.is_multiple_of(MIN_CU_SIZE) {
            return Err(Error::InvalidParameter(format!(
                "canvas {width}x{height} is not a positive multiple of {MIN_CU_SIZE}"
            )));
        }
        let units_w = width / MIN_CU_SIZE;
        let units_h = height / MIN_CU_SIZE;
        Ok(Self {
            frame: Frame::filled(width, height, DEFAULT_REFERENCE),
            decoded: vec![false; (units_w * units_h) as usize],
            units_w,
        })
    }

    pub fn width(&self) -> u32 {
        self.frame.width()
    }

    pub fn height(&self) -> u32 {
        self.frame.height()
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn into_frame(self) -> Frame {
        self.frame
    }

    pub fn contains(&self, rect: CuRect) -> bool {
        rect.size > 0
            && rect.x.checked_add(rect.size).is_some_and(|r| r <= self.width())
            && rect.y.checked_add(rect.size).is_some_and(|b| b <= self.height())
    }

    fn check(&self, rect: CuRect) -> Result<()> {
        if self.contains(rect) {
            Ok(())
        } else {
            Err(Error::OutOfBounds(rect.to_string()))
        }
    }

    /// Whether the sample at (x, y) exists and has been reconstructed.
    #[inline]
    pub fn is_available(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x >= self.width() as i64 || y >= self.height() as i64 {
            return false;
        }
        let ux = x as u32 / MIN_CU_SIZE;
        let uy = y as u32 / MIN_CU_SIZE;
        self.decoded[(uy * self.units_w + ux) as usize]
    }

    pub fn mark_decoded(&mut self, rect: CuRect) {
        self.set_decoded(rect, true);
    }

    pub fn mark_undecoded(&mut self, rect: CuRect) {
        self.set_decoded(rect, false);
    }

    fn set_decoded(&mut self, rect: CuRect, value: bool) {
        let x0 = rect.x / MIN_CU_SIZE;
        let y0 = rect.y / MIN_CU_SIZE;
        let n = rect.size.div_ceil(MIN_CU_SIZE);
        for uy in y0..y0 + n {
            for ux in x0..x0 + n {
                self.decoded[(uy * self.units_w + ux) as usize] = value;
            }
        }
    }

    pub fn write_block(&mut self, rect: CuRect, samples: &[u8]) -> Result<()> {
        self.check(rect)?;
        let n = rect.size as usize;
        if samples.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "{} samples for block {rect}",
                samples.len()
            )));
        }
        let w = self.width() as usize;
        let dst = self.frame.samples_mut();
        for (row, src) in samples.chunks_exact(n).enumerate() {
            let start = (rect.y as usize + row) * w + rect.x as usize;
            dst[start..start + n].copy_from_slice(src);
        }
        Ok(())
    }

    pub fn read_block(&self, rect: CuRect) -> Result<Vec<u8>> {
        self.check(rect)?;
        let n = rect.size as usize;
        let mut out = Vec::with_capacity(n * n);
        for row in 0..rect.size {
            let r = self.frame.row(rect.y + row);
            out.extend_from_slice(&r[rect.x as usize..rect.x as usize + n]);
        }
        Ok(out)
    }
}

/// Resolved reference samples for an N×N block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefSamples {
    size: usize,
    top: Vec<u8>,
    left: Vec<u8>,
}

impl RefSamples {
    /// `top` holds 2N+1 samples starting with the corner, `left` holds 2N.
    pub fn new(size: usize, top: Vec<u8>, left: Vec<u8>) -> Result<Self> {
        if !size.is_power_of_two() || !(4..=64).contains(&size) {
            return Err(Error::InvalidParameter(format!("block size {size}")));
        }
        if top.len() != 2 * size + 1 || left.len() != 2 * size {
            return Err(Error::DimensionMismatch(format!(
                "references for N={size} need {} top and {} left samples, got {} and {}",
                2 * size + 1,
                2 * size,
                top.len(),
                left.len()
            )));
        }
        Ok(Self { size, top, left })
    }

    pub fn uniform(size: usize, value: u8) -> Self {
        Self::new(size, vec![value; 2 * size + 1], vec![value; 2 * size])
            .expect("valid reference size")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn corner(&self) -> u8 {
        self.top[0]
    }

    pub fn top(&self) -> &[u8] {
        &self.top
    }

    pub fn left(&self) -> &[u8] {
        &self.left
    }

    /// Samples in substitution scan order: left[2N-1] .. left[0], corner,
    /// top[1] .. top[2N].
    fn to_line(&self) -> Vec<u8> {
        let mut line = Vec::with_capacity(4 * self.size + 1);
        line.extend(self.left.iter().rev());
        line.extend_from_slice(&self.top);
        line
    }

    fn from_line(size: usize, line: &[u8]) -> Self {
        let left = line[..2 * size].iter().rev().copied().collect();
        let top = line[2 * size..].to_vec();
        Self { size, top, left }
    }
}

/// Reads the references of `rect` from the canvas, substituting any sample
/// that is outside the picture or not yet decoded.
pub fn gather_reference_samples(canvas: &Canvas, rect: CuRect) -> Result<RefSamples> {
    canvas.check(rect)?;
    let n = rect.size as usize;
    let x0 = rect.x as i64;
    let y0 = rect.y as i64;
    let frame = canvas.frame();

    let total = 4 * n + 1;
    let mut line = vec![0u8; total];
    let mut avail = vec![false; total];
    for j in 0..2 * n {
        let (sx, sy) = (x0 - 1, y0 + j as i64);
        let idx = 2 * n - 1 - j;
        if canvas.is_available(sx, sy) {
            avail[idx] = true;
            line[idx] = frame.get(sx as u32, sy as u32);
        }
    }
    for i in 0..=2 * n {
        let (sx, sy) = (x0 - 1 + i as i64, y0 - 1);
        let idx = 2 * n + i;
        if canvas.is_available(sx, sy) {
            avail[idx] = true;
            line[idx] = frame.get(sx as u32, sy as u32);
        }
    }

    match avail.iter().position(|&a| a) {
        None => line.fill(DEFAULT_REFERENCE),
        Some(first) => {
            let mut last = line[first];
            for i in 0..total {
                if avail[i] {
                    last = line[i];
                } else {
                    line[i] = last;
                }
            }
        }
    }
    Ok(RefSamples::from_line(n, &line))
}

/// Whether mode-dependent [1 2 1]/4 smoothing applies for this size and mode.
pub fn smoothing_applies(size: usize, mode: IntraMode) -> bool {
    if size < 8 || mode == IntraMode::DC {
        return false;
    }
    if mode == IntraMode::PLANAR {
        return true;
    }
    let m = mode.index() as i32;
    let dist = (m - IntraMode::HORIZONTAL.index() as i32)
        .abs()
        .min((m - IntraMode::VERTICAL.index() as i32).abs());
    let threshold = match size {
        8 => 7,
        16 => 1,
        _ => 0,
    };
    dist > threshold
}

/// Applies [1 2 1]/4 along the reference line (bottom-left end through the
/// corner to the top-right end) when [`smoothing_applies`]; the two line
/// endpoints are kept as they are.
pub fn smooth_reference_samples(refs: &RefSamples, mode: IntraMode) -> RefSamples {
    if !smoothing_applies(refs.size, mode) {
        return refs.clone();
    }
    let line = refs.to_line();
    let mut out = line.clone();
    for i in 1..line.len() - 1 {
        let v = line[i - 1] as u32 + 2 * line[i] as u32 + line[i + 1] as u32 + 2;
        out[i] = (v >> 2) as u8;
    }
    RefSamples::from_line(refs.size, &out)
}

/// N×N predicted samples, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredBlock {
    size: usize,
    samples: Vec<u8>,
}

impl PredBlock {
    pub fn new(size: usize, samples: Vec<u8>) -> Result<Self> {
        if samples.len() != size * size {
            return Err(Error::DimensionMismatch(format!(
                "{} samples for a {size}x{size} prediction",
                samples.len()
            )));
        }
        Ok(Self { size, samples })
    }

    pub fn uniform(size: usize, value: u8) -> Self {
        Self {
            size,
            samples: vec![value; size * size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.samples[y * self.size + x]
    }
}

#[rustfmt::skip]
const ANGLE: [i32; 35] = [
    0, 0,
    32, 26, 21, 17, 13, 9, 5, 2,
    0,
    -2, -5, -9, -13, -17, -21, -26,
    -32,
    -26, -21, -17, -13, -9, -5, -2,
    0,
    2, 5, 9, 13, 17, 21, 26,
    32,
];

/// 256·32/angle for the negative angles of modes 11..=25.
#[rustfmt::skip]
const INV_ANGLE: [i32; 15] = [
    -4096, -1638, -910, -630, -482, -390, -315,
    -256,
    -315, -390, -482, -630, -910, -1638, -4096,
];

/// Predicts the block from (already smoothed, if applicable) references.
pub fn predict(refs: &RefSamples, mode: IntraMode) -> PredBlock {
    let mut samples = vec![0u8; refs.size * refs.size];
    predict_into(refs, mode, &mut samples);
    PredBlock {
        size: refs.size,
        samples,
    }
}

/// Same as [`predict`], writing into a caller-provided N×N buffer.
pub fn predict_into(refs: &RefSamples, mode: IntraMode, out: &mut [u8]) {
    let n = refs.size;
    assert_eq!(out.len(), n * n, "prediction buffer size");
    match mode.index() {
        0 => predict_planar(refs, out),
        1 => predict_dc(refs, out),
        m => predict_angular(refs, m as usize, out),
    }
}

fn predict_planar(refs: &RefSamples, out: &mut [u8]) {
    let n = refs.size as i32;
    let shift = refs.size.trailing_zeros() + 1;
    let top_right = refs.top[refs.size + 1] as i32;
    let bottom_left = refs.left[refs.size] as i32;
    for y in 0..n {
        let left = refs.left[y as usize] as i32;
        for x in 0..n {
            let top = refs.top[x as usize + 1] as i32;
            let v = (n - 1 - x) * left + (x + 1) * top_right + (n - 1 - y) * top + (y + 1) * bottom_left + n;
            out[(y * n + x) as usize] = (v >> shift) as u8;
        }
    }
}

fn predict_dc(refs: &RefSamples, out: &mut [u8]) {
    let n = refs.size;
    let shift = n.trailing_zeros() + 1;
    let sum: u32 = refs.top[1..=n].iter().chain(&refs.left[..n]).map(|&v| v as u32).sum();
    let dc = (sum + n as u32) >> shift;
    out.fill(dc as u8);
    if n < 32 {
        let top = |x: usize| refs.top[x + 1] as u32;
        let left = |y: usize| refs.left[y] as u32;
        out[0] = ((left(0) + 2 * dc + top(0) + 2) >> 2) as u8;
        for x in 1..n {
            out[x] = ((top(x) + 3 * dc + 2) >> 2) as u8;
        }
        for y in 1..n {
            out[y * n] = ((left(y) + 3 * dc + 2) >> 2) as u8;
        }
    }
}

fn predict_angular(refs: &RefSamples, mode: usize, out: &mut [u8]) {
    let n = refs.size;
    let angle = ANGLE[mode];
    let vertical = mode >= 18;

    // Main reference indexed from -N to 2N, stored with an offset of N.
    let main = |i: usize| -> u8 {
        if vertical {
            refs.top[i]
        } else if i == 0 {
            refs.top[0]
        } else {
            refs.left[i - 1]
        }
    };
    let side = |i: usize| -> u8 {
        if vertical {
            if i == 0 {
                refs.top[0]
            } else {
                refs.left[i - 1]
            }
        } else {
            refs.top[i]
        }
    };

    let mut line = vec![0i32; 3 * n + 1];
    for i in 0..=2 * n {
        line[n + i] = main(i) as i32;
    }
    if angle < 0 {
        let ext = (n as i32 * angle) >> 5;
        if ext < -1 {
            let inv = INV_ANGLE[mode - 11];
            for x in ext..=-1 {
                let idx = ((x * inv + 128) >> 8) as usize;
                line[(n as i32 + x) as usize] = side(idx) as i32;
            }
        }
    }

    for j in 0..n {
        let pos = (j as i32 + 1) * angle;
        let idx = pos >> 5;
        let fact = pos & 31;
        for i in 0..n {
            let base = (n as i32 + i as i32 + idx + 1) as usize;
            let v = if fact == 0 {
                line[base]
            } else {
                ((32 - fact) * line[base] + fact * line[base + 1] + 16) >> 5
            };
            // Vertical modes walk rows (j = y); horizontal ones walk columns.
            let (x, y) = if vertical { (i, j) } else { (j, i) };
            out[y * n + x] = v as u8;
        }
    }
}
