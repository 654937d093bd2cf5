//! Integer block transforms and scalar quantization.
//!
//! DCT-II for 8, 16 and 32 points and DST-VII for 4 points, in fixed point.
//! The bases are laid out like the HEVC core transform (a 32-point DCT table
//! whose strided rows give the smaller sizes) but carry six more fractional
//! bits: entries are round(4096·√2·cos(jπ/64)) instead of HEVC's 8-bit
//! approximations, which are too far from orthogonal to invert within ±1 at
//! 16×16 and 32×32. The extra bits are removed by the pass shifts, so the
//! coefficients land on the HEVC scale (2^(7-log2 N) times orthonormal) and
//! the HEVC quantizer tables apply unchanged.
//!
//! Forward passes shift by log2(N)+5 and log2(N)+12, inverse passes by 13
//! and 18.

use crate::{Error, Result};

/// Quantized coefficients of one N×N transform block, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffBlock {
    size: usize,
    coeffs: Vec<i32>,
}

/// Quantized levels are kept strictly inside ±2^15.
pub const MAX_LEVEL: i32 = (1 << 15) - 1;

impl CoeffBlock {
    pub fn new(size: usize, coeffs: Vec<i32>) -> Result<Self> {
        check_size(size)?;
        if coeffs.len() != size * size {
            return Err(Error::DimensionMismatch(format!(
                "{size}x{size} coefficient block needs {} values, got {}",
                size * size,
                coeffs.len()
            )));
        }
        if let Some(c) = coeffs.iter().find(|c| c.abs() > MAX_LEVEL) {
            return Err(Error::InvalidParameter(format!(
                "coefficient {c} exceeds ±{MAX_LEVEL}"
            )));
        }
        Ok(Self { size, coeffs })
    }

    pub fn zeros(size: usize) -> Self {
        Self {
            size,
            coeffs: vec![0; size * size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn coeffs(&self) -> &[i32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn nonzero_count(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }
}

fn check_size(n: usize) -> Result<()> {
    match n {
        4 | 8 | 16 | 32 => Ok(()),
        _ => Err(Error::InvalidParameter(format!(
            "unsupported transform size {n}"
        ))),
    }
}

/// Extra fractional bits relative to the HEVC 8-bit basis.
const BASIS_EXTRA_BITS: u32 = 6;

// round(4096·√2·cos(jπ/64)), j = 0..=32; entry 0 is the DC row value 4096.
#[rustfmt::skip]
const COS_TABLE: [i32; 33] = [
    4096, 5786, 5765, 5730, 5681, 5619, 5543, 5454, 5352, 5236, 5109, 4968, 4816, 4653, 4478,
    4292, 4096, 3890, 3675, 3451, 3218, 2978, 2731, 2477, 2217, 1951, 1682, 1407, 1130, 850,
    568, 284, 0,
];

const fn build_dct32() -> [[i32; 32]; 32] {
    let mut m = [[0i32; 32]; 32];
    let mut k = 0;
    while k < 32 {
        let mut n = 0;
        while n < 32 {
            m[k][n] = if k == 0 {
                COS_TABLE[0]
            } else {
                // cos(π·a/64) with a = (2n+1)k folded into [0, 64].
                let mut a = ((2 * n + 1) * k) % 128;
                if a > 64 {
                    a = 128 - a;
                }
                if a > 32 {
                    -COS_TABLE[64 - a]
                } else {
                    COS_TABLE[a]
                }
            };
            n += 1;
        }
        k += 1;
    }
    m
}

static DCT32: [[i32; 32]; 32] = build_dct32();

// round(8192·(2/3)·sin(π(2k+1)(n+1)/9))
static DST4: [[i32; 4]; 4] = [
    [1868, 3510, 4730, 5378],
    [4730, 4730, 0, -4730],
    [5378, -1868, -4730, 3510],
    [3510, -5378, 4730, -1868],
];

/// Basis coefficient for row `k`, column `n` of the N-point transform.
#[inline]
fn basis(n_size: usize, k: usize, n: usize) -> i32 {
    if n_size == 4 {
        DST4[k][n]
    } else {
        DCT32[k * (32 / n_size)][n]
    }
}

fn basis_matrix(n: usize) -> Vec<i32> {
    let mut m = vec![0; n * n];
    for k in 0..n {
        for i in 0..n {
            m[k * n + i] = basis(n, k, i);
        }
    }
    m
}

#[inline]
fn round_shift(v: i64, shift: u32) -> i64 {
    (v + (1 << (shift - 1))) >> shift
}

#[inline]
fn clip16(v: i64) -> i32 {
    v.clamp(-32768, 32767) as i32
}

/// Forward 2-D transform of an N×N residual block (row-major).
pub fn forward_transform(residual: &[i32], n: usize) -> Result<Vec<i32>> {
    check_size(n)?;
    check_len(residual, n)?;
    let m = basis_matrix(n);
    let log2 = n.trailing_zeros();
    let shift1 = log2 - 1 + BASIS_EXTRA_BITS;
    let shift2 = log2 + 6 + BASIS_EXTRA_BITS;

    // Columns first: tmp[k][j] = Σ_i M[k][i]·X[i][j].
    let mut tmp = vec![0i32; n * n];
    for k in 0..n {
        let row = &m[k * n..(k + 1) * n];
        for j in 0..n {
            let mut acc = 0i64;
            for i in 0..n {
                acc += row[i] as i64 * residual[i * n + j] as i64;
            }
            tmp[k * n + j] = clip16(round_shift(acc, shift1));
        }
    }
    let mut out = vec![0i32; n * n];
    for k in 0..n {
        let t = &tmp[k * n..(k + 1) * n];
        for l in 0..n {
            let row = &m[l * n..(l + 1) * n];
            let acc: i64 = t.iter().zip(row).map(|(&a, &b)| a as i64 * b as i64).sum();
            out[k * n + l] = clip16(round_shift(acc, shift2));
        }
    }
    Ok(out)
}

/// Inverse 2-D transform; output residual is clipped to [-255, 255].
pub fn inverse_transform(coeffs: &[i32], n: usize) -> Result<Vec<i32>> {
    check_size(n)?;
    check_len(coeffs, n)?;
    let m = basis_matrix(n);
    let mut out = vec![0i32; n * n];
    if coeffs.iter().all(|&c| c == 0) {
        return Ok(out);
    }

    // tmp[i][l] = Σ_k M[k][i]·C[k][l]
    let mut tmp = vec![0i64; n * n];
    for k in 0..n {
        let crow = &coeffs[k * n..(k + 1) * n];
        if crow.iter().all(|&c| c == 0) {
            continue;
        }
        for i in 0..n {
            let b = m[k * n + i] as i64;
            let trow = &mut tmp[i * n..(i + 1) * n];
            for (t, &c) in trow.iter_mut().zip(crow) {
                *t += b * c as i64;
            }
        }
    }
    let tmp: Vec<i64> = tmp.into_iter().map(|v| clip16(round_shift(v, 7 + BASIS_EXTRA_BITS)) as i64).collect();

    // out[i][j] = Σ_l tmp[i][l]·M[l][j]
    for i in 0..n {
        let trow = &tmp[i * n..(i + 1) * n];
        let orow = &mut out[i * n..(i + 1) * n];
        let mut acc = vec![0i64; n];
        for (l, &t) in trow.iter().enumerate() {
            if t == 0 {
                continue;
            }
            let mrow = &m[l * n..(l + 1) * n];
            for (a, &b) in acc.iter_mut().zip(mrow) {
                *a += t * b as i64;
            }
        }
        for (o, a) in orow.iter_mut().zip(acc) {
            *o = round_shift(a, 12 + BASIS_EXTRA_BITS).clamp(-255, 255) as i32;
        }
    }
    Ok(out)
}

fn check_len(block: &[i32], n: usize) -> Result<()> {
    if block.len() != n * n {
        return Err(Error::DimensionMismatch(format!(
            "{n}x{n} block needs {} values, got {}",
            n * n,
            block.len()
        )));
    }
    Ok(())
}

const QUANT_SCALE: [i64; 6] = [26214, 23302, 20560, 18396, 16384, 14564];
const DEQUANT_SCALE: [i64; 6] = [40, 45, 51, 57, 64, 72];

fn check_qp(qp: u8) -> Result<()> {
    if qp > 51 {
        return Err(Error::InvalidParameter(format!("qp {qp} outside [0, 51]")));
    }
    Ok(())
}

/// Dead-zone scalar quantizer with a rounding offset of 1/3 step.
pub fn quantize(coeffs: &[i32], n: usize, qp: u8) -> Result<CoeffBlock> {
    check_size(n)?;
    check_len(coeffs, n)?;
    check_qp(qp)?;
    let log2 = n.trailing_zeros() as i64;
    let qbits = 14 + (qp / 6) as i64 + (7 - log2);
    let offset = 171i64 << (qbits - 9);
    let scale = QUANT_SCALE[(qp % 6) as usize];
    let levels = coeffs
        .iter()
        .map(|&c| {
            let level = ((c.unsigned_abs() as i64 * scale + offset) >> qbits).min(MAX_LEVEL as i64);
            if c < 0 {
                -(level as i32)
            } else {
                level as i32
            }
        })
        .collect();
    Ok(CoeffBlock { size: n, coeffs: levels })
}

pub fn dequantize(block: &CoeffBlock, qp: u8) -> Result<Vec<i32>> {
    check_qp(qp)?;
    let n = block.size;
    let shift = 3 + n.trailing_zeros();
    let scale = (16 * DEQUANT_SCALE[(qp % 6) as usize]) << (qp / 6);
    Ok(block
        .coeffs
        .iter()
        .map(|&l| {
            if l == 0 {
                0
            } else {
                clip16(round_shift(l as i64 * scale, shift))
            }
        })
        .collect())
}

/// Quantization step size in coefficient units (for tests and rate models).
pub fn quant_step(n: usize, qp: u8) -> f64 {
    let log2 = n.trailing_zeros() as i32;
    let qbits = 14 + (qp / 6) as i32 + (7 - log2);
    2f64.powi(qbits) / QUANT_SCALE[(qp % 6) as usize] as f64
}
