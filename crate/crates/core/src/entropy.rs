//! Coding tree and coefficient serialization.
//!
//! Per node, depth first: one split bit (absent for 8×8 CUs), and for a leaf
//! a 6-bit mode followed by its coefficient blocks. A coefficient block is
//! read in diagonal up-right scan order and coded as `ue(count)` and then,
//! per nonzero coefficient, `ue(zero run) ue(|level| - 1) sign`.

use std::sync::OnceLock;

use crate::bitstream::{ue_len, BitReader, BitWriter};
use crate::transform::{CoeffBlock, MAX_LEVEL};
use crate::types::{CuLeaf, CuRect, IntraMode};
use crate::{CodingTree, Error, Result};

pub const MODE_BITS: u32 = 6;

/// Diagonal up-right scan: anti-diagonals from the DC corner outwards, each
/// walked from bottom-left to top-right. Entries are raster indices.
pub fn diagonal_scan(n: usize) -> &'static [usize] {
    static TABLES: [OnceLock<Vec<usize>>; 4] = [const { OnceLock::new() }; 4];
    let slot = match n {
        4 => 0,
        8 => 1,
        16 => 2,
        32 => 3,
        _ => panic!("no scan for block size {n}"),
    };
    TABLES[slot].get_or_init(|| {
        let mut order = Vec::with_capacity(n * n);
        for d in 0..2 * n - 1 {
            let y_start = d.min(n - 1);
            let x_start = d - y_start;
            let (mut x, mut y) = (x_start, y_start as isize);
            while x < n && y >= 0 {
                order.push(y as usize * n + x);
                x += 1;
                y -= 1;
            }
        }
        order
    })
}

pub fn encode_coeffs(w: &mut BitWriter, block: &CoeffBlock) -> Result<()> {
    let scan = diagonal_scan(block.size());
    let coeffs = block.coeffs();
    w.write_ue(block.nonzero_count() as u32)?;
    let mut run = 0u32;
    for &pos in scan {
        let c = coeffs[pos];
        if c == 0 {
            run += 1;
            continue;
        }
        w.write_ue(run)?;
        w.write_ue(c.unsigned_abs() - 1)?;
        w.write_bit(c < 0);
        run = 0;
    }
    Ok(())
}

/// Exact number of bits [`encode_coeffs`] writes for `block`.
pub fn coeff_bits(block: &CoeffBlock) -> u64 {
    let scan = diagonal_scan(block.size());
    let coeffs = block.coeffs();
    let mut bits = ue_len(block.nonzero_count() as u32) as u64;
    let mut run = 0u32;
    for &pos in scan {
        let c = coeffs[pos];
        if c == 0 {
            run += 1;
            continue;
        }
        bits += ue_len(run) as u64 + ue_len(c.unsigned_abs() - 1) as u64 + 1;
        run = 0;
    }
    bits
}

pub fn decode_coeffs(r: &mut BitReader<'_>, n: usize) -> Result<CoeffBlock> {
    if !matches!(n, 4 | 8 | 16 | 32) {
        return Err(Error::InvalidParameter(format!("coefficient block size {n}")));
    }
    let total = n * n;
    let count = r.read_ue()? as usize;
    if count > total {
        return Err(Error::MalformedStream(format!(
            "{count} nonzero coefficients declared for a {n}x{n} block"
        )));
    }
    let scan = diagonal_scan(n);
    let mut coeffs = vec![0i32; total];
    let mut next = 0usize;
    for _ in 0..count {
        let run = r.read_ue()? as usize;
        let idx = next + run;
        if idx >= total {
            return Err(Error::MalformedStream(format!(
                "coefficient run overruns a {n}x{n} block"
            )));
        }
        let magnitude = r.read_ue()? as i64 + 1;
        if magnitude > MAX_LEVEL as i64 {
            return Err(Error::MalformedStream(format!(
                "coefficient level {magnitude} exceeds {MAX_LEVEL}"
            )));
        }
        let negative = r.read_bit()?;
        coeffs[scan[idx]] = if negative { -magnitude } else { magnitude } as i32;
        next = idx + 1;
    }
    CoeffBlock::new(n, coeffs)
}

pub fn encode_tree(w: &mut BitWriter, tree: &CodingTree) -> Result<()> {
    tree.validate()?;
    write_node(w, tree)
}

fn write_node(w: &mut BitWriter, tree: &CodingTree) -> Result<()> {
    match tree {
        CodingTree::Split { children, .. } => {
            w.write_bit(true);
            for child in children.iter() {
                write_node(w, child)?;
            }
        }
        CodingTree::Leaf(leaf) => {
            if leaf.rect.can_split() {
                w.write_bit(false);
            }
            w.write_bits(leaf.mode.index() as u32, MODE_BITS)?;
            for block in &leaf.coeffs {
                encode_coeffs(w, block)?;
            }
        }
    }
    Ok(())
}

/// Bits a leaf costs on its own: split flag (if any), mode and coefficients.
pub fn leaf_bits(leaf: &CuLeaf) -> u64 {
    let flag = u64::from(leaf.rect.can_split());
    flag + MODE_BITS as u64 + leaf.coeffs.iter().map(coeff_bits).sum::<u64>()
}

/// Parses the tree rooted at `rect`, coefficients included.
pub fn decode_tree(r: &mut BitReader<'_>, rect: CuRect) -> Result<CodingTree> {
    if !matches!(rect.size, 8 | 16 | 32 | 64) {
        return Err(Error::InvalidParameter(format!("tree root {rect}")));
    }
    let split = rect.can_split() && r.read_bit()?;
    if split {
        let q = rect.quadrants();
        let children = [
            decode_tree(r, q[0])?,
            decode_tree(r, q[1])?,
            decode_tree(r, q[2])?,
            decode_tree(r, q[3])?,
        ];
        return Ok(CodingTree::Split {
            rect,
            children: Box::new(children),
        });
    }
    let index = r.read_bits(MODE_BITS)? as u8;
    let mode = IntraMode::new(index)
        .map_err(|_| Error::MalformedStream(format!("intra mode {index} in CU {rect}")))?;
    let coeffs = rect
        .transform_blocks()
        .iter()
        .map(|tu| decode_coeffs(r, tu.size as usize))
        .collect::<Result<Vec<_>>>()?;
    Ok(CodingTree::Leaf(CuLeaf { rect, mode, coeffs }))
}
