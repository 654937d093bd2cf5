//! Encoder, decoder, residual reconstruction and deblocking.

mod deblock;
mod decoder;
mod encoder;
mod timing;

pub use deblock::{beta, deblock, deblock_in_place, tc, EdgeMap};
pub use decoder::{decode_frame, parse_trees, DecodeOutput, Decoder};
pub use encoder::{encode_frame, lambda, satd, EncodeOutput, EncodeStats};
pub use timing::{Stage, StageStats, StageTimings, TimingSummary};

use crate::intra::PredBlock;
use crate::perturb::RpSeries;
use crate::transform::{dequantize, inverse_transform, CoeffBlock};
use crate::types::{CodecConfig, ReconstructionStrategy, CTU_SIZE, MAX_TU_SIZE};
use crate::{Error, Result};

/// Header fields plus the entropy-coded CTU payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedImage {
    width: u32,
    height: u32,
    config: CodecConfig,
    payload: Vec<u8>,
}

impl EncodedImage {
    /// Largest width or height the container can describe.
    pub const MAX_DIMENSION: u32 = u16::MAX as u32;

    pub fn new(width: u32, height: u32, config: CodecConfig, payload: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || width > Self::MAX_DIMENSION || height > Self::MAX_DIMENSION {
            return Err(Error::InvalidParameter(format!(
                "image dimensions {width}x{height} outside 1..={}",
                Self::MAX_DIMENSION
            )));
        }
        Ok(Self {
            width,
            height,
            config,
            payload,
        })
    }

    /// Source width before padding.
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn config(&self) -> &CodecConfig {
        &self.config
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    pub fn padded_width(&self) -> u32 {
        self.width.div_ceil(CTU_SIZE) * CTU_SIZE
    }

    pub fn padded_height(&self) -> u32 {
        self.height.div_ceil(CTU_SIZE) * CTU_SIZE
    }

    /// CTU origins in raster order.
    pub fn ctu_origins(&self) -> impl Iterator<Item = (u32, u32)> {
        let (w, h) = (self.padded_width(), self.padded_height());
        (0..h)
            .step_by(CTU_SIZE as usize)
            .flat_map(move |y| (0..w).step_by(CTU_SIZE as usize).map(move |x| (x, y)))
    }
}

/// Builds the reconstructed samples of one CU from its prediction.
///
/// `coeffs` is required for [`ReconstructionStrategy::Standard`] (one block
/// per transform unit) and `rp` for the perturbation strategy; other inputs
/// are ignored. Perturbation values are taken as `rp[y * N + x]`, restarting
/// from the first entry for every CU.
pub fn reconstruct_cu(
    pred: &PredBlock,
    coeffs: Option<&[CoeffBlock]>,
    strategy: &ReconstructionStrategy,
    rp: Option<&RpSeries>,
    qp: u8,
) -> Result<Vec<u8>> {
    let n = pred.size();
    let p = pred.samples();
    match strategy {
        ReconstructionStrategy::Standard => {
            let blocks = coeffs.ok_or(Error::MissingInput("coefficient blocks"))?;
            add_residual(pred, blocks, qp)
        }
        ReconstructionStrategy::ZeroResidual => Ok(p.to_vec()),
        ReconstructionStrategy::ConstantResidual(c) => {
            Ok(p.iter().map(|&v| clip(v as i32 + c)).collect())
        }
        ReconstructionStrategy::RandomPerturbation { .. } => {
            let series = rp.ok_or(Error::MissingInput("perturbation series"))?;
            let values = series.values();
            if values.len() < n * n {
                return Err(Error::DimensionMismatch(format!(
                    "{} perturbation values for a {n}x{n} CU",
                    values.len()
                )));
            }
            Ok(p.iter().zip(values).map(|(&v, &r)| clip(v as i32 + r)).collect())
        }
    }
}

fn add_residual(pred: &PredBlock, blocks: &[CoeffBlock], qp: u8) -> Result<Vec<u8>> {
    let n = pred.size();
    let tu = n.min(MAX_TU_SIZE as usize);
    let per_row = n / tu;
    if blocks.len() != per_row * per_row {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficient blocks for a {n}x{n} CU",
            blocks.len()
        )));
    }
    let p = pred.samples();
    let mut out = p.to_vec();
    for (i, block) in blocks.iter().enumerate() {
        if block.size() != tu {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} coefficient block in a {n}x{n} CU",
                block.size(),
                block.size()
            )));
        }
        if block.is_zero() {
            continue;
        }
        let residual = inverse_transform(&dequantize(block, qp)?, tu)?;
        let (ox, oy) = ((i % per_row) * tu, (i / per_row) * tu);
        for y in 0..tu {
            let row = (oy + y) * n + ox;
            for x in 0..tu {
                out[row + x] = clip(p[row + x] as i32 + residual[y * tu + x]);
            }
        }
    }
    Ok(out)
}

#[inline]
pub(crate) fn clip(v: i32) -> u8 {
    v.clamp(0, 255) as u8
}
