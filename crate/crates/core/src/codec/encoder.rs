use crate::bitstream::BitWriter;
use crate::entropy::{encode_tree, leaf_bits};
use crate::intra::{gather_reference_samples, predict_into, smooth_reference_samples, smoothing_applies, Canvas, PredBlock};
use crate::transform::{forward_transform, quantize};
use crate::types::{CodecConfig, CuLeaf, CuRect, IntraMode, ReconstructionStrategy, CTU_SIZE};
use crate::{CodingTree, Error, Frame, Result};

use super::deblock::{deblock_in_place, EdgeMap};
use super::{reconstruct_cu, EncodedImage};

/// Lagrange multiplier trading squared error against bits.
pub fn lambda(qp: u8) -> f64 {
    0.85 * 2f64.powf((qp as f64 - 12.0) / 3.0)
}

/// Sum of absolute 8×8 Hadamard coefficients of `a - b` (4×4 tiles for
/// 4×4 blocks), both N×N row-major.
pub fn satd(a: &[u8], b: &[u8], n: usize) -> u64 {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n * n);
    let tile = if n >= 8 { 8 } else { 4 };
    let mut total = 0u64;
    let mut diff = [0i32; 64];
    for ty in (0..n).step_by(tile) {
        for tx in (0..n).step_by(tile) {
            for y in 0..tile {
                for x in 0..tile {
                    let i = (ty + y) * n + tx + x;
                    diff[y * tile + x] = a[i] as i32 - b[i] as i32;
                }
            }
            total += if tile == 8 {
                (hadamard_abs_sum::<8>(&mut diff) + 2) >> 2
            } else {
                (hadamard_abs_sum::<4>(&mut diff) + 1) >> 1
            };
        }
    }
    total
}

fn hadamard_abs_sum<const T: usize>(m: &mut [i32; 64]) -> u64 {
    fn butterfly(v: &mut [i32], stride: usize, len: usize) {
        let mut h = 1;
        while h < len {
            for start in (0..len).step_by(2 * h) {
                for k in start..start + h {
                    let (a, b) = (v[k * stride], v[(k + h) * stride]);
                    v[k * stride] = a + b;
                    v[(k + h) * stride] = a - b;
                }
            }
            h *= 2;
        }
    }
    for row in 0..T {
        butterfly(&mut m[row * T..], 1, T);
    }
    for col in 0..T {
        butterfly(&mut m[col..], T, T);
    }
    m[..T * T].iter().map(|v| v.unsigned_abs() as u64).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodeStats {
    pub payload_bytes: usize,
    pub payload_bits: usize,
    pub ctus: usize,
    pub leaves: usize,
    /// Leaf counts for CU sizes 8, 16, 32 and 64.
    pub leaves_by_size: [usize; 4],
    /// Payload bits per source pixel.
    pub bits_per_pixel: f64,
}

#[derive(Debug, Clone)]
pub struct EncodeOutput {
    pub image: EncodedImage,
    /// What a standard decode of `image` produces.
    pub recon: Frame,
    pub stats: EncodeStats,
}

/// Encodes one frame: CTUs in raster order, each split by rate-distortion
/// cost, modes chosen by SATD, reconstructed in loop.
pub fn encode_frame(frame: &Frame, cfg: &CodecConfig) -> Result<EncodeOutput> {
    if frame.width() > EncodedImage::MAX_DIMENSION || frame.height() > EncodedImage::MAX_DIMENSION {
        return Err(Error::InvalidParameter(format!(
            "frame {}x{} exceeds {} in a dimension",
            frame.width(),
            frame.height(),
            EncodedImage::MAX_DIMENSION
        )));
    }
    let source = frame.padded_to(CTU_SIZE);
    let mut enc = Encoder {
        source: &source,
        canvas: Canvas::new(source.width(), source.height())?,
        qp: cfg.qp(),
        lambda: lambda(cfg.qp()),
        scratch: Vec::new(),
    };
    let mut edges = EdgeMap::new(source.width(), source.height())?;
    let mut writer = BitWriter::new();
    let mut stats = EncodeStats {
        payload_bytes: 0,
        payload_bits: 0,
        ctus: 0,
        leaves: 0,
        leaves_by_size: [0; 4],
        bits_per_pixel: 0.0,
    };

    for y in (0..source.height()).step_by(CTU_SIZE as usize) {
        for x in (0..source.width()).step_by(CTU_SIZE as usize) {
            let (tree, _) = enc.encode_cu(CuRect::new(x, y, CTU_SIZE))?;
            encode_tree(&mut writer, &tree)?;
            stats.ctus += 1;
            let mut edge_result = Ok(());
            tree.for_each_leaf(&mut |leaf| {
                stats.leaves += 1;
                stats.leaves_by_size[leaf.rect.size.trailing_zeros() as usize - 3] += 1;
                if edge_result.is_ok() {
                    edge_result = edges.add_leaf(leaf.rect);
                }
            });
            edge_result?;
        }
    }

    stats.payload_bits = writer.bit_len();
    let payload = writer.finish();
    stats.payload_bytes = payload.len();
    stats.bits_per_pixel = stats.payload_bits as f64 / (frame.width() as f64 * frame.height() as f64);

    let mut recon = enc.canvas.into_frame();
    if cfg.loop_filter_enabled() {
        deblock_in_place(&mut recon, &edges, cfg.qp())?;
    }
    let recon = recon.cropped(frame.width(), frame.height())?;
    let image = EncodedImage::new(frame.width(), frame.height(), *cfg, payload)?;
    Ok(EncodeOutput { image, recon, stats })
}

struct Encoder<'a> {
    source: &'a Frame,
    canvas: Canvas,
    qp: u8,
    lambda: f64,
    scratch: Vec<u8>,
}

impl Encoder<'_> {
    /// Returns the chosen subtree and its cost; leaves the chosen
    /// reconstruction in the canvas.
    fn encode_cu(&mut self, rect: CuRect) -> Result<(CodingTree, f64)> {
        let (leaf, leaf_cost) = self.code_leaf(rect)?;
        if !rect.can_split() {
            return Ok((CodingTree::Leaf(leaf), leaf_cost));
        }
        let leaf_recon = self.canvas.read_block(rect)?;
        self.canvas.mark_undecoded(rect);

        let mut split_cost = self.lambda;
        let q = rect.quadrants();
        let mut children = Vec::with_capacity(4);
        for quadrant in q {
            let (child, cost) = self.encode_cu(quadrant)?;
            split_cost += cost;
            children.push(child);
        }
        if split_cost < leaf_cost {
            let children: [CodingTree; 4] = children.try_into().expect("four quadrants");
            return Ok((
                CodingTree::Split {
                    rect,
                    children: Box::new(children),
                },
                split_cost,
            ));
        }
        self.canvas.write_block(rect, &leaf_recon)?;
        self.canvas.mark_decoded(rect);
        Ok((CodingTree::Leaf(leaf), leaf_cost))
    }

    fn code_leaf(&mut self, rect: CuRect) -> Result<(CuLeaf, f64)> {
        let n = rect.size as usize;
        let orig = self.source_block(rect);
        let raw = gather_reference_samples(&self.canvas, rect)?;
        let smoothed = smooth_reference_samples(&raw, IntraMode::PLANAR);
        let refs_for = |mode: IntraMode| if smoothing_applies(n, mode) { &smoothed } else { &raw };

        self.scratch.resize(n * n, 0);
        let mut best = (u64::MAX, IntraMode::PLANAR);
        for mode in IntraMode::all() {
            predict_into(refs_for(mode), mode, &mut self.scratch);
            let cost = satd(&orig, &self.scratch, n);
            if cost < best.0 {
                best = (cost, mode);
            }
        }
        let mode = best.1;
        predict_into(refs_for(mode), mode, &mut self.scratch);
        let pred = PredBlock::new(n, self.scratch.clone())?;

        let mut coeffs = Vec::new();
        for tu in rect.transform_blocks() {
            let t = tu.size as usize;
            let (ox, oy) = ((tu.x - rect.x) as usize, (tu.y - rect.y) as usize);
            let mut residual = Vec::with_capacity(t * t);
            for y in 0..t {
                let row = (oy + y) * n + ox;
                residual.extend((0..t).map(|x| orig[row + x] as i32 - pred.samples()[row + x] as i32));
            }
            coeffs.push(quantize(&forward_transform(&residual, t)?, t, self.qp)?);
        }
        let recon = reconstruct_cu(&pred, Some(&coeffs), &ReconstructionStrategy::Standard, None, self.qp)?;
        let sse: u64 = orig
            .iter()
            .zip(&recon)
            .map(|(&a, &b)| (a as i64 - b as i64).pow(2) as u64)
            .sum();
        self.canvas.write_block(rect, &recon)?;
        self.canvas.mark_decoded(rect);

        let leaf = CuLeaf { rect, mode, coeffs };
        let cost = sse as f64 + self.lambda * leaf_bits(&leaf) as f64;
        Ok((leaf, cost))
    }

    fn source_block(&self, rect: CuRect) -> Vec<u8> {
        let n = rect.size as usize;
        let mut out = Vec::with_capacity(n * n);
        for y in rect.y..rect.y + rect.size {
            out.extend_from_slice(&self.source.row(y)[rect.x as usize..rect.x as usize + n]);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_values() {
        assert!((lambda(12) - 0.85).abs() < 1e-12);
        assert!((lambda(15) - 1.7).abs() < 1e-12);
        assert!(lambda(37) > lambda(22));
    }

    #[test]
    fn satd_basics() {
        let a = vec![10u8; 64];
        assert_eq!(satd(&a, &a, 8), 0);
        // A constant difference d lands in the DC term only: 64·d / 4.
        let b = vec![13u8; 64];
        assert_eq!(satd(&a, &b, 8), (64 * 3 + 2) >> 2);
        let a4 = vec![0u8; 16];
        let b4 = vec![2u8; 16];
        assert_eq!(satd(&a4, &b4, 4), (16 * 2 + 1) >> 1);
        // Tiles add up.
        let a16 = vec![10u8; 256];
        let b16 = vec![13u8; 256];
        assert_eq!(satd(&a16, &b16, 16), 4 * ((64 * 3 + 2) >> 2));
    }

    #[test]
    fn satd_is_symmetric_and_positive() {
        let a: Vec<u8> = (0..64).map(|i| (i * 37 % 251) as u8).collect();
        let b: Vec<u8> = (0..64).map(|i| (i * 11 % 97) as u8).collect();
        assert_eq!(satd(&a, &b, 8), satd(&b, &a, 8));
        assert!(satd(&a, &b, 8) > 0);
    }

    #[test]
    fn gray_input_is_exact_and_tiny() {
        for qp in [0, 22, 51] {
            let f = Frame::filled(64, 64, 128);
            let out = encode_frame(&f, &CodecConfig::new(qp).unwrap()).unwrap();
            assert_eq!(out.recon, f);
            assert_eq!(out.stats.leaves, 1);
            // split flag + mode + four empty blocks
            assert_eq!(out.stats.payload_bits, 11);
        }
    }

    #[test]
    fn flat_non_gray_frame() {
        let f = Frame::filled(100, 70, 90);
        let out = encode_frame(&f, &CodecConfig::new(32).unwrap()).unwrap();
        assert_eq!(out.recon.width(), 100);
        assert_eq!(out.recon.height(), 70);
        assert_eq!(out.stats.ctus, 4);
        let err: i32 = out.recon.samples().iter().map(|&s| (s as i32 - 90).abs()).max().unwrap();
        assert!(err <= 3, "max error {err}");
    }

    #[test]
    fn rate_falls_with_qp() {
        let f = Frame::new(
            64,
            64,
            (0..64 * 64)
                .map(|i| {
                    let (x, y) = (i % 64, i / 64);
                    ((x * 3 + y * 2) % 200 + if (x / 8 + y / 8) % 2 == 0 { 30 } else { 0 }) as u8
                })
                .collect(),
        )
        .unwrap();
        let low = encode_frame(&f, &CodecConfig::new(22).unwrap()).unwrap();
        let high = encode_frame(&f, &CodecConfig::new(37).unwrap()).unwrap();
        assert!(low.stats.payload_bits > high.stats.payload_bits);
    }

    #[test]
    fn oversized_frame_rejected() {
        let f = Frame::filled(70_000, 1, 0);
        assert!(encode_frame(&f, &CodecConfig::new(32).unwrap()).is_err());
    }
}
