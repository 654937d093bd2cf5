//! Detection accuracy (IoU, AP, mAP) and frame quality (PSNR, gradient
//! correlation).

mod detection;
mod quality;

pub use detection::{
    average_precision, iou, mean_average_precision, BBox, ClassResult, EvalResult, ImageAnnotations,
};
pub use quality::{gradient_correlation, gradient_magnitude, mse, pearson, psnr, Psnr};
