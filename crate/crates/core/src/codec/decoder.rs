use std::time::Instant;

use crate::bitstream::BitReader;
use crate::entropy::decode_tree;
use crate::intra::{gather_reference_samples, predict, smooth_reference_samples, Canvas};
use crate::perturb::{generate_rp_series, RpSeries};
use crate::types::{CuRect, ReconstructionStrategy, CTU_SIZE};
use crate::{CodingTree, Error, Frame, Result};

use super::deblock::{deblock_in_place, EdgeMap};
use super::timing::{Stage, StageTimings};
use super::{reconstruct_cu, EncodedImage};

#[derive(Debug, Clone)]
pub struct DecodeOutput {
    pub frame: Frame,
    pub timings: StageTimings,
    /// Payload bits parsed, excluding the final zero padding.
    pub bits_consumed: usize,
}

/// A decoder bound to one reconstruction strategy. The perturbation series,
/// when needed, is built once here and shared by every decode.
#[derive(Debug, Clone)]
pub struct Decoder {
    strategy: ReconstructionStrategy,
    series: Option<RpSeries>,
}

impl Decoder {
    pub fn new(strategy: ReconstructionStrategy) -> Result<Self> {
        strategy.validate()?;
        let series = match strategy {
            ReconstructionStrategy::RandomPerturbation { sigma, seed } => Some(generate_rp_series(sigma, seed)?),
            _ => None,
        };
        Ok(Self { strategy, series })
    }

    /// Perturbation decoder using an externally supplied series.
    pub fn with_series(series: RpSeries) -> Self {
        Self {
            strategy: ReconstructionStrategy::RandomPerturbation {
                sigma: series.sigma(),
                seed: series.seed().unwrap_or(0),
            },
            series: Some(series),
        }
    }

    pub fn strategy(&self) -> &ReconstructionStrategy {
        &self.strategy
    }

    pub fn series(&self) -> Option<&RpSeries> {
        self.series.as_ref()
    }

    pub fn decode(&self, enc: &EncodedImage) -> Result<DecodeOutput> {
        let wall = Instant::now();
        let mut timings = StageTimings::default();
        let (pw, ph) = (enc.padded_width(), enc.padded_height());
        let qp = enc.config().qp();
        let standard = self.strategy.is_standard();
        let mut canvas = Canvas::new(pw, ph)?;
        let mut edges = EdgeMap::new(pw, ph)?;
        let mut reader = BitReader::new(enc.payload());

        for (x, y) in enc.ctu_origins() {
            let tree = timings.time(Stage::Ed, || decode_tree(&mut reader, CuRect::new(x, y, CTU_SIZE)))?;
            let mut result = Ok(());
            tree.for_each_leaf(&mut |leaf| {
                if result.is_err() {
                    return;
                }
                // Substitution strategies add their residual inside the prediction timer.
                result = (|| {
                    let start = Instant::now();
                    let raw = gather_reference_samples(&canvas, leaf.rect)?;
                    let pred = predict(&smooth_reference_samples(&raw, leaf.mode), leaf.mode);
                    if standard {
                        timings.ip += start.elapsed();
                        timings.time(Stage::Rd, || {
                            let r = reconstruct_cu(&pred, Some(&leaf.coeffs), &self.strategy, None, qp)?;
                            canvas.write_block(leaf.rect, &r)
                        })?;
                    } else {
                        let r = reconstruct_cu(&pred, None, &self.strategy, self.series.as_ref(), qp)?;
                        canvas.write_block(leaf.rect, &r)?;
                        timings.ip += start.elapsed();
                    }
                    canvas.mark_decoded(leaf.rect);
                    edges.add_leaf(leaf.rect)
                })();
            });
            result?;
        }

        let bits_consumed = reader.position();
        check_trailing(&reader)?;

        let mut frame = canvas.into_frame();
        if enc.config().loop_filter_enabled() {
            timings.time(Stage::Lf, || deblock_in_place(&mut frame, &edges, qp))?;
        }
        let frame = frame.cropped(enc.width(), enc.height())?;
        timings.wall = wall.elapsed();
        Ok(DecodeOutput {
            frame,
            timings,
            bits_consumed,
        })
    }
}

/// Only zero padding up to the next byte boundary may follow the last CTU.
fn check_trailing(reader: &BitReader<'_>) -> Result<()> {
    let remaining = reader.remaining();
    if remaining >= 8 {
        return Err(Error::MalformedStream(format!(
            "{remaining} bits of trailing data after the last CTU"
        )));
    }
    let mut tail = reader.clone();
    if remaining > 0 && tail.read_bits(remaining as u32)? != 0 {
        return Err(Error::MalformedStream("nonzero padding bits".into()));
    }
    Ok(())
}

/// Decodes with a freshly constructed [`Decoder`].
pub fn decode_frame(enc: &EncodedImage, strategy: ReconstructionStrategy) -> Result<DecodeOutput> {
    Decoder::new(strategy)?.decode(enc)
}

/// Parses every CTU's coding tree without reconstructing samples.
pub fn parse_trees(enc: &EncodedImage) -> Result<Vec<CodingTree>> {
    let mut reader = BitReader::new(enc.payload());
    let trees = enc
        .ctu_origins()
        .map(|(x, y)| decode_tree(&mut reader, CuRect::new(x, y, CTU_SIZE)))
        .collect::<Result<Vec<_>>>()?;
    check_trailing(&reader)?;
    Ok(trees)
}
