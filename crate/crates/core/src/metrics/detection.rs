//! IoU, average precision and mAP@IoU for box detections.
//!
//! AP is the point-mass form: detections are ranked by confidence, each is
//! greedily matched to the still-unmatched ground truth of highest IoU (at
//! least the threshold), and AP = Σ P(k)·rel(k) / max(1, Σ rel(k)), where
//! P(k) is the fraction of true positives among the first k detections.
//! Note the normalisation counts matches, not ground-truth boxes, so missed
//! objects lower recall but not AP.

use std::collections::BTreeMap;

use crate::{Error, Result};

/// Axis-aligned box in pixels with a class and, for detections, a score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub class_id: u32,
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
    pub confidence: f64,
}

impl BBox {
    /// Ground-truth box (confidence 1).
    pub fn truth(class_id: u32, x: f64, y: f64, w: f64, h: f64) -> Result<Self> {
        Self::detection(class_id, 1.0, x, y, w, h)
    }

    pub fn detection(class_id: u32, confidence: f64, x: f64, y: f64, w: f64, h: f64) -> Result<Self> {
        if !(w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite() && x.is_finite() && y.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "box ({x}, {y}, {w}, {h}) needs finite coordinates and positive extents"
            )));
        }
        if !(0.0..=1.0).contains(&confidence) {
            return Err(Error::InvalidParameter(format!("confidence {confidence} outside [0, 1]")));
        }
        Ok(Self {
            class_id,
            x,
            y,
            w,
            h,
            confidence,
        })
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }
}

pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let ix = (a.x + a.w).min(b.x + b.w) - a.x.max(b.x);
    let iy = (a.y + a.h).min(b.y + b.h) - a.y.max(b.y);
    if ix <= 0.0 || iy <= 0.0 {
        return 0.0;
    }
    let inter = ix * iy;
    inter / (a.area() + b.area() - inter)
}

/// Ranked outcome of matching one class's detections.
#[derive(Debug, Clone, Default)]
struct Ranked {
    rel: Vec<bool>,
    matched_ious: Vec<f64>,
    n_gt: usize,
}

impl Ranked {
    fn ap(&self) -> f64 {
        if self.n_gt == 0 && self.rel.is_empty() {
            return 1.0;
        }
        let mut tp = 0usize;
        let mut sum = 0.0;
        for (k, &r) in self.rel.iter().enumerate() {
            if r {
                tp += 1;
                sum += tp as f64 / (k + 1) as f64;
            }
        }
        sum / tp.max(1) as f64
    }

    fn tp(&self) -> usize {
        self.rel.iter().filter(|&&r| r).count()
    }
}

/// `images` holds (detections, ground truth) per image, all one class.
fn rank_and_match(images: &[(Vec<&BBox>, Vec<&BBox>)], iou_thr: f64) -> Ranked {
    let mut order: Vec<(usize, usize)> = images
        .iter()
        .enumerate()
        .flat_map(|(i, (dets, _))| (0..dets.len()).map(move |d| (i, d)))
        .collect();
    // Stable: equal confidences keep image order, then input order.
    order.sort_by(|&(ia, da), &(ib, db)| {
        images[ib].0[db]
            .confidence
            .partial_cmp(&images[ia].0[da].confidence)
            .expect("confidences are finite")
    });

    let mut taken: Vec<Vec<bool>> = images.iter().map(|(_, g)| vec![false; g.len()]).collect();
    let mut ranked = Ranked {
        n_gt: images.iter().map(|(_, g)| g.len()).sum(),
        ..Default::default()
    };
    for (i, d) in order {
        let det = images[i].0[d];
        let mut best: Option<(usize, f64)> = None;
        for (g, gt) in images[i].1.iter().enumerate() {
            if taken[i][g] {
                continue;
            }
            let v = iou(det, gt);
            if v >= iou_thr && best.is_none_or(|(_, b)| v > b) {
                best = Some((g, v));
            }
        }
        match best {
            Some((g, v)) => {
                taken[i][g] = true;
                ranked.rel.push(true);
                ranked.matched_ious.push(v);
            }
            None => ranked.rel.push(false),
        }
    }
    ranked
}

/// AP of one class within one image.
pub fn average_precision(dets: &[BBox], gts: &[BBox], iou_thr: f64) -> f64 {
    let image = (dets.iter().collect(), gts.iter().collect());
    rank_and_match(&[image], iou_thr).ap()
}

/// Detections and ground truth of one image, any classes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ImageAnnotations {
    pub detections: Vec<BBox>,
    pub ground_truth: Vec<BBox>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassResult {
    pub ap: f64,
    pub ground_truth: usize,
    pub detections: usize,
    pub true_positives: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub iou_threshold: f64,
    /// Classes that have ground truth, by id.
    pub per_class: BTreeMap<u32, ClassResult>,
    pub map: f64,
    /// Over all detections of all classes; 0 when there are none.
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Mean IoU of matched pairs; `None` without any match.
    pub mean_matched_iou: Option<f64>,
}

/// mAP over the classes present in the ground truth, pooling detections of
/// each class across images (matches never cross images).
pub fn mean_average_precision(images: &[ImageAnnotations], iou_thr: f64) -> Result<EvalResult> {
    if !(iou_thr > 0.0 && iou_thr <= 1.0) {
        return Err(Error::InvalidParameter(format!("IoU threshold {iou_thr} outside (0, 1]")));
    }
    let gt_classes: Vec<u32> = {
        let mut c: Vec<u32> = images
            .iter()
            .flat_map(|im| im.ground_truth.iter().map(|b| b.class_id))
            .collect();
        c.sort_unstable();
        c.dedup();
        c
    };
    if gt_classes.is_empty() {
        return Err(Error::EmptyEvaluation("no ground-truth boxes".into()));
    }

    let mut per_class = BTreeMap::new();
    let mut total_tp = 0usize;
    let mut matched_ious = Vec::new();
    for &class in &gt_classes {
        let split: Vec<(Vec<&BBox>, Vec<&BBox>)> = images
            .iter()
            .map(|im| {
                (
                    im.detections.iter().filter(|b| b.class_id == class).collect(),
                    im.ground_truth.iter().filter(|b| b.class_id == class).collect(),
                )
            })
            .collect();
        let ranked = rank_and_match(&split, iou_thr);
        total_tp += ranked.tp();
        matched_ious.extend_from_slice(&ranked.matched_ious);
        per_class.insert(
            class,
            ClassResult {
                ap: ranked.ap(),
                ground_truth: ranked.n_gt,
                detections: ranked.rel.len(),
                true_positives: ranked.tp(),
            },
        );
    }

    let n_det: usize = images.iter().map(|im| im.detections.len()).sum();
    let n_gt: usize = images.iter().map(|im| im.ground_truth.len()).sum();
    let precision = if n_det == 0 { 0.0 } else { total_tp as f64 / n_det as f64 };
    let recall = total_tp as f64 / n_gt as f64;
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    let map = per_class.values().map(|c: &ClassResult| c.ap).sum::<f64>() / per_class.len() as f64;
    let mean_matched_iou =
        (!matched_ious.is_empty()).then(|| matched_ious.iter().sum::<f64>() / matched_ious.len() as f64);
    Ok(EvalResult {
        iou_threshold: iou_thr,
        per_class,
        map,
        precision,
        recall,
        f1,
        mean_matched_iou,
    })
}
