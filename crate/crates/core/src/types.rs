use std::fmt;

use crate::transform::CoeffBlock;
use crate::{Error, Result};

pub const CTU_LOG2: u32 = 6;
pub const CTU_SIZE: u32 = 1 << CTU_LOG2;
pub const MIN_CU_LOG2: u32 = 3;
pub const MIN_CU_SIZE: u32 = 1 << MIN_CU_LOG2;
/// Largest transform block; 64×64 CUs carry four of these.
pub const MAX_TU_SIZE: u32 = 32;

/// 8-bit grayscale sample plane, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Frame {
    width: u32,
    height: u32,
    samples: Vec<u8>,
}

impl Frame {
    pub fn new(width: u32, height: u32, samples: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "frame dimensions must be non-zero, got {width}x{height}"
            )));
        }
        let expected = width as usize * height as usize;
        if samples.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{width}x{height} frame needs {expected} samples, got {}",
                samples.len()
            )));
        }
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    pub fn filled(width: u32, height: u32, value: u8) -> Self {
        assert!(width > 0 && height > 0, "empty frame");
        Self {
            width,
            height,
            samples: vec![value; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [u8] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<u8> {
        self.samples
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.samples[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: u8) {
        self.samples[y as usize * self.width as usize + x as usize] = value;
    }

    pub fn row(&self, y: u32) -> &[u8] {
        let start = y as usize * self.width as usize;
        &self.samples[start..start + self.width as usize]
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().map(|&s| s as f64).sum::<f64>() / self.samples.len() as f64
    }

    /// Extends the frame to the next multiple of `multiple` in each direction
    /// by replicating the last column and row.
    pub fn padded_to(&self, multiple: u32) -> Frame {
        let pw = self.width.div_ceil(multiple) * multiple;
        let ph = self.height.div_ceil(multiple) * multiple;
        if pw == self.width && ph == self.height {
            return self.clone();
        }
        let mut samples = Vec::with_capacity(pw as usize * ph as usize);
        for y in 0..ph {
            let row = self.row(y.min(self.height - 1));
            samples.extend_from_slice(row);
            let last = row[row.len() - 1];
            samples.resize(samples.len() + (pw - self.width) as usize, last);
        }
        Frame {
            width: pw,
            height: ph,
            samples,
        }
    }

    /// Top-left `width`×`height` window.
    pub fn cropped(&self, width: u32, height: u32) -> Result<Frame> {
        if width == 0 || height == 0 || width > self.width || height > self.height {
            return Err(Error::DimensionMismatch(format!(
                "cannot crop {}x{} frame to {width}x{height}",
                self.width, self.height
            )));
        }
        if width == self.width && height == self.height {
            return Ok(self.clone());
        }
        let mut samples = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            samples.extend_from_slice(&self.row(y)[..width as usize]);
        }
        Ok(Frame {
            width,
            height,
            samples,
        })
    }
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Frame")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("mean", &self.mean())
            .finish()
    }
}

/// Encoder configuration. CTU and minimum CU sizes are fixed at 64 and 8.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodecConfig {
    qp: u8,
    loop_filter: bool,
}

impl CodecConfig {
    pub const MAX_QP: u8 = 51;

    pub fn new(qp: u8) -> Result<Self> {
        if qp > Self::MAX_QP {
            return Err(Error::InvalidParameter(format!("qp {qp} outside [0, 51]")));
        }
        Ok(Self {
            qp,
            loop_filter: true,
        })
    }

    pub fn with_loop_filter(mut self, enabled: bool) -> Self {
        self.loop_filter = enabled;
        self
    }

    pub fn qp(&self) -> u8 {
        self.qp
    }

    pub fn loop_filter_enabled(&self) -> bool {
        self.loop_filter
    }

    pub fn ctu_log2(&self) -> u32 {
        CTU_LOG2
    }

    pub fn min_cu_log2(&self) -> u32 {
        MIN_CU_LOG2
    }
}

/// How the decoder forms the residual that is added to each CU prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReconstructionStrategy {
    /// Dequantize and inverse-transform the coded coefficients.
    Standard,
    /// R = 0.
    ZeroResidual,
    /// R = c for every sample, c in [-255, 255].
    ConstantResidual(i32),
    /// R taken from the fixed Gaussian series generated from (sigma, seed).
    RandomPerturbation { sigma: f64, seed: u64 },
}

impl ReconstructionStrategy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ReconstructionStrategy::ConstantResidual(c) if !(-255..=255).contains(&c) => Err(
                Error::InvalidParameter(format!("constant residual {c} outside [-255, 255]")),
            ),
            ReconstructionStrategy::RandomPerturbation { sigma, .. }
                if !(sigma.is_finite() && sigma > 0.0) =>
            {
                Err(Error::InvalidParameter(format!(
                    "perturbation sigma must be positive, got {sigma}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Short name used in reports: `standard`, `zero`, `constant`, `perturb`.
    pub fn name(&self) -> &'static str {
        match self {
            ReconstructionStrategy::Standard => "standard",
            ReconstructionStrategy::ZeroResidual => "zero",
            ReconstructionStrategy::ConstantResidual(_) => "constant",
            ReconstructionStrategy::RandomPerturbation { .. } => "perturb",
        }
    }

    pub fn is_standard(&self) -> bool {
        matches!(self, ReconstructionStrategy::Standard)
    }
}

impl fmt::Display for ReconstructionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReconstructionStrategy::ConstantResidual(c) => write!(f, "constant:{c}"),
            ReconstructionStrategy::RandomPerturbation { sigma, seed } => {
                write!(f, "perturb(sigma={sigma}, seed={seed})")
            }
            other => f.write_str(other.name()),
        }
    }
}

/// Intra prediction mode: 0 planar, 1 DC, 2..=34 angular.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntraMode(u8);

impl IntraMode {
    pub const PLANAR: IntraMode = IntraMode(0);
    pub const DC: IntraMode = IntraMode(1);
    pub const HORIZONTAL: IntraMode = IntraMode(10);
    pub const VERTICAL: IntraMode = IntraMode(26);
    pub const COUNT: u8 = 35;

    pub fn new(index: u8) -> Result<Self> {
        if index >= Self::COUNT {
            return Err(Error::InvalidParameter(format!(
                "intra mode {index} outside [0, 34]"
            )));
        }
        Ok(IntraMode(index))
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn is_angular(self) -> bool {
        self.0 >= 2
    }

    pub fn all() -> impl Iterator<Item = IntraMode> {
        (0..Self::COUNT).map(IntraMode)
    }
}

/// Square block at (x, y) in padded-frame coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CuRect {
    pub x: u32,
    pub y: u32,
    pub size: u32,
}

impl CuRect {
    pub fn new(x: u32, y: u32, size: u32) -> Self {
        Self { x, y, size }
    }

    /// Quadrants in z-order: top-left, top-right, bottom-left, bottom-right.
    pub fn quadrants(&self) -> [CuRect; 4] {
        let h = self.size / 2;
        [
            CuRect::new(self.x, self.y, h),
            CuRect::new(self.x + h, self.y, h),
            CuRect::new(self.x, self.y + h, h),
            CuRect::new(self.x + h, self.y + h, h),
        ]
    }

    pub fn can_split(&self) -> bool {
        self.size > MIN_CU_SIZE
    }

    /// Transform blocks covering this CU, in z-order.
    pub fn transform_blocks(&self) -> Vec<CuRect> {
        if self.size > MAX_TU_SIZE {
            self.quadrants().to_vec()
        } else {
            vec![*self]
        }
    }
}

impl fmt::Display for CuRect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}@({},{})", self.size, self.size, self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuLeaf {
    pub rect: CuRect,
    pub mode: IntraMode,
    /// One block per transform unit, ordered as [`CuRect::transform_blocks`].
    pub coeffs: Vec<CoeffBlock>,
}

/// Quadtree of coding units rooted at a CTU.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodingTree {
    Split {
        rect: CuRect,
        children: Box<[CodingTree; 4]>,
    },
    Leaf(CuLeaf),
}

impl CodingTree {
    pub fn rect(&self) -> CuRect {
        match self {
            CodingTree::Split { rect, .. } => *rect,
            CodingTree::Leaf(leaf) => leaf.rect,
        }
    }

    /// Visits leaves in decoding (z-scan) order.
    pub fn for_each_leaf<'a>(&'a self, f: &mut impl FnMut(&'a CuLeaf)) {
        match self {
            CodingTree::Split { children, .. } => {
                for child in children.iter() {
                    child.for_each_leaf(f);
                }
            }
            CodingTree::Leaf(leaf) => f(leaf),
        }
    }

    pub fn leaves(&self) -> Vec<&CuLeaf> {
        let mut out = Vec::new();
        self.for_each_leaf(&mut |leaf| out.push(leaf));
        out
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            CodingTree::Split { children, .. } => children.iter().map(|c| c.leaf_count()).sum(),
            CodingTree::Leaf(_) => 1,
        }
    }

    /// Checks the structural invariants: split nodes have the four quadrant
    /// children, leaves are 8..=64 and carry correctly sized coefficient blocks.
    pub fn validate(&self) -> Result<()> {
        match self {
            CodingTree::Split { rect, children } => {
                if !rect.can_split() {
                    return Err(Error::InvalidParameter(format!("cannot split CU {rect}")));
                }
                for (child, quadrant) in children.iter().zip(rect.quadrants()) {
                    if child.rect() != quadrant {
                        return Err(Error::InvalidParameter(format!(
                            "child {} of {rect} should be {quadrant}",
                            child.rect()
                        )));
                    }
                    child.validate()?;
                }
                Ok(())
            }
            CodingTree::Leaf(leaf) => {
                let rect = leaf.rect;
                if !matches!(rect.size, 8 | 16 | 32 | 64) {
                    return Err(Error::InvalidParameter(format!("bad CU size in {rect}")));
                }
                let tus = rect.transform_blocks();
                if leaf.coeffs.len() != tus.len() {
                    return Err(Error::InvalidParameter(format!(
                        "CU {rect} needs {} coefficient blocks, has {}",
                        tus.len(),
                        leaf.coeffs.len()
                    )));
                }
                for (block, tu) in leaf.coeffs.iter().zip(&tus) {
                    if block.size() != tu.size as usize {
                        return Err(Error::InvalidParameter(format!(
                            "coefficient block of size {} in {rect}",
                            block.size()
                        )));
                    }
                }
                Ok(())
            }
        }
    }
}
