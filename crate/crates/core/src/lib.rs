//! HEVC-style intra-frame codec for grayscale images whose decoder can
//! replace decoded residuals with zero, a constant, or a fixed Gaussian
//! perturbation series.
//!
//! The crate also carries the pieces needed to study that decoder: per-stage
//! decode timers, PSNR and structural comparisons, detection metrics
//! (IoU / AP / mAP@0.50), and renderers for partition and mode maps.
//!
//! ```
//! use rpcodec::{codec, CodecConfig, Frame, ReconstructionStrategy};
//!
//! let frame = Frame::filled(64, 64, 90);
//! let cfg = CodecConfig::new(32).unwrap();
//! let encoded = codec::encode_frame(&frame, &cfg).unwrap();
//! let gray = codec::decode_frame(&encoded.image, ReconstructionStrategy::ZeroResidual).unwrap();
//! assert!(gray.frame.samples().iter().all(|&s| s == 128));
//! ```

pub mod bitstream;
pub mod codec;
pub mod corpus;
pub mod entropy;
mod error;
pub mod featmap;
pub mod intra;
pub mod io;
pub mod metrics;
pub mod perturb;
pub mod rng;
pub mod transform;
mod types;

pub use error::{Error, Result};
pub use types::{
    CodecConfig, CodingTree, CuLeaf, CuRect, Frame, IntraMode, ReconstructionStrategy, CTU_LOG2, CTU_SIZE,
    MIN_CU_LOG2, MIN_CU_SIZE,
};
