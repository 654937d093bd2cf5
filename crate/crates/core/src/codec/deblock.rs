//! Luma deblocking across CU and TU edges on the 8-pixel grid.
//!
//! Every edge uses boundary strength 2 (all blocks are intra). For each line
//! crossing an edge the activity `|p2 - 2p1 + p0| + |q2 - 2q1 + q0|` must be
//! below β and the raw offset below 10·tc; only p0 and q0 are changed.
//! Vertical edges of the whole picture are filtered before horizontal ones.

use crate::types::{CuRect, MAX_TU_SIZE, MIN_CU_SIZE};
use crate::{CodingTree, Error, Frame, Result};

#[rustfmt::skip]
const BETA_TABLE: [u8; 52] = [
    0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
    6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 20, 22, 24,
    26, 28, 30, 32, 34, 36, 38, 40, 42, 44, 46, 48, 50, 52, 54, 56,
    58, 60, 62, 64,
];

#[rustfmt::skip]
const TC_TABLE: [u8; 54] = [
    0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
    1, 1, 1, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3,
    3, 4, 4, 4, 5, 5, 6, 6, 7, 8, 9, 10, 11, 13, 14, 16,
    18, 20, 22, 24,
];

/// β for an 8-bit picture at `qp`.
pub fn beta(qp: u8) -> i32 {
    BETA_TABLE[qp.min(51) as usize] as i32
}

/// tc for an 8-bit picture at `qp` with boundary strength 2.
pub fn tc(qp: u8) -> i32 {
    TC_TABLE[(qp as usize + 2).min(53)] as i32
}

/// Which 8-sample edge segments are block boundaries.
///
/// `vertical[u]` marks the left edge of 8×8 unit `u`, `horizontal[u]` its top
/// edge. Picture borders are never edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMap {
    width: u32,
    height: u32,
    units_w: usize,
    vertical: Vec<bool>,
    horizontal: Vec<bool>,
}

impl EdgeMap {
    pub fn new(width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 || !width.is_multiple_of(MIN_CU_SIZE) || !height.is_multiple_of(MIN_CU_SIZE) {
            return Err(Error::InvalidParameter(format!(
                "edge map {width}x{height} is not a positive multiple of {MIN_CU_SIZE}"
            )));
        }
        let units_w = (width / MIN_CU_SIZE) as usize;
        let units = units_w * (height / MIN_CU_SIZE) as usize;
        Ok(Self {
            width,
            height,
            units_w,
            vertical: vec![false; units],
            horizontal: vec![false; units],
        })
    }

    /// Edges of every leaf, including the internal transform edges of CUs
    /// larger than the maximum transform size.
    pub fn from_trees(trees: &[CodingTree], width: u32, height: u32) -> Result<Self> {
        let mut map = Self::new(width, height)?;
        for tree in trees {
            let mut result = Ok(());
            tree.for_each_leaf(&mut |leaf| {
                if result.is_ok() {
                    result = map.add_leaf(leaf.rect);
                }
            });
            result?;
        }
        Ok(map)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Marks the left and top edges of `rect`.
    pub fn add_block(&mut self, rect: CuRect) -> Result<()> {
        if !rect.x.is_multiple_of(MIN_CU_SIZE)
            || !rect.y.is_multiple_of(MIN_CU_SIZE)
            || !rect.size.is_multiple_of(MIN_CU_SIZE)
            || rect.x + rect.size > self.width
            || rect.y + rect.size > self.height
        {
            return Err(Error::OutOfBounds(format!("edge block {rect}")));
        }
        let ux = (rect.x / MIN_CU_SIZE) as usize;
        let uy = (rect.y / MIN_CU_SIZE) as usize;
        let n = (rect.size / MIN_CU_SIZE) as usize;
        if rect.x > 0 {
            for y in uy..uy + n {
                self.vertical[y * self.units_w + ux] = true;
            }
        }
        if rect.y > 0 {
            for x in ux..ux + n {
                self.horizontal[uy * self.units_w + x] = true;
            }
        }
        Ok(())
    }

    pub fn add_leaf(&mut self, rect: CuRect) -> Result<()> {
        self.add_block(rect)?;
        if rect.size > MAX_TU_SIZE {
            for tu in rect.transform_blocks() {
                self.add_block(tu)?;
            }
        }
        Ok(())
    }

    pub fn is_vertical_edge(&self, ux: usize, uy: usize) -> bool {
        self.vertical[uy * self.units_w + ux]
    }

    pub fn is_horizontal_edge(&self, ux: usize, uy: usize) -> bool {
        self.horizontal[uy * self.units_w + ux]
    }

    /// Number of marked 8-sample segments (vertical, horizontal).
    pub fn segment_counts(&self) -> (usize, usize) {
        let count = |v: &[bool]| v.iter().filter(|&&e| e).count();
        (count(&self.vertical), count(&self.horizontal))
    }
}

pub fn deblock(frame: &Frame, edges: &EdgeMap, qp: u8) -> Result<Frame> {
    let mut out = frame.clone();
    deblock_in_place(&mut out, edges, qp)?;
    Ok(out)
}

pub fn deblock_in_place(frame: &mut Frame, edges: &EdgeMap, qp: u8) -> Result<()> {
    if frame.width() != edges.width || frame.height() != edges.height {
        return Err(Error::DimensionMismatch(format!(
            "frame {}x{} with edge map {}x{}",
            frame.width(),
            frame.height(),
            edges.width,
            edges.height
        )));
    }
    let b = beta(qp);
    let t = tc(qp);
    if b == 0 || t == 0 {
        return Ok(());
    }
    let width = frame.width() as usize;
    let units_w = edges.units_w;
    let units_h = (frame.height() / MIN_CU_SIZE) as usize;
    let unit = MIN_CU_SIZE as usize;
    let samples = frame.samples_mut();

    for uy in 0..units_h {
        for ux in 1..units_w {
            if !edges.is_vertical_edge(ux, uy) {
                continue;
            }
            for row in uy * unit..(uy + 1) * unit {
                filter_line(samples, row * width + ux * unit, 1, b, t);
            }
        }
    }
    for uy in 1..units_h {
        for ux in 0..units_w {
            if !edges.is_horizontal_edge(ux, uy) {
                continue;
            }
            for col in ux * unit..(ux + 1) * unit {
                filter_line(samples, uy * unit * width + col, width, b, t);
            }
        }
    }
    Ok(())
}

/// `q0` sits at `at`; p samples run backwards by `stride`.
#[inline]
fn filter_line(s: &mut [u8], at: usize, stride: usize, beta: i32, tc: i32) {
    let p = |i: usize| s[at - (i + 1) * stride] as i32;
    let q = |i: usize| s[at + i * stride] as i32;
    let (p0, p1, p2) = (p(0), p(1), p(2));
    let (q0, q1, q2) = (q(0), q(1), q(2));
    let d = (p2 - 2 * p1 + p0).abs() + (q2 - 2 * q1 + q0).abs();
    if d >= beta {
        return;
    }
    let delta = (9 * (q0 - p0) - 3 * (q1 - p1) + 8) >> 4;
    if delta.abs() >= 10 * tc {
        return;
    }
    let delta = delta.clamp(-tc, tc);
    s[at - stride] = (p0 + delta).clamp(0, 255) as u8;
    s[at] = (q0 - delta).clamp(0, 255) as u8;
}
