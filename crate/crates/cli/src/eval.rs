use std::path::Path;

use rpcodec::io::{load_annotation_dirs, read_classes, ClassNames};
use rpcodec::metrics::{mean_average_precision, EvalResult, ImageAnnotations};
use serde_json::json;

use crate::error::CliError;

pub fn run(gt_dir: &Path, det_dir: &Path, classes: Option<&Path>, iou: f64, json_out: Option<&Path>) -> Result<(), CliError> {
    if !(iou > 0.0 && iou <= 1.0) {
        return Err(CliError::Usage(format!("--iou {iou} outside (0, 1]")));
    }
    let names = match classes {
        Some(p) => read_classes(p)?,
        None => ClassNames::new(),
    };
    let images: Vec<ImageAnnotations> = load_annotation_dirs(gt_dir, det_dir)?.into_iter().map(|(_, a)| a).collect();
    let result = mean_average_precision(&images, iou)?;
    print!("{}", table(&result, &names));
    if let Some(path) = json_out {
        std::fs::write(path, serde_json::to_string_pretty(&report(&result, &names, images.len()))? + "\n")?;
    }
    Ok(())
}

fn class_name(names: &ClassNames, id: u32) -> String {
    names.get(&id).cloned().unwrap_or_else(|| id.to_string())
}

pub fn table(r: &EvalResult, names: &ClassNames) -> String {
    let mut s = format!("{:<12} {:>6} {:>6} {:>6} {:>9}\n", "class", "gt", "det", "tp", "AP (%)");
    for (&id, c) in &r.per_class {
        s += &format!(
            "{:<12} {:>6} {:>6} {:>6} {:>9.2}\n",
            class_name(names, id),
            c.ground_truth,
            c.detections,
            c.true_positives,
            100.0 * c.ap
        );
    }
    s += &format!("mAP@{:.2} (%): {:.2}\n", r.iou_threshold, 100.0 * r.map);
    s += &format!(
        "precision {:.4}  recall {:.4}  f1 {:.4}  mean matched IoU {}\n",
        r.precision,
        r.recall,
        r.f1,
        r.mean_matched_iou.map_or("n/a".to_string(), |v| format!("{v:.4}"))
    );
    s
}

pub fn report(r: &EvalResult, names: &ClassNames, images: usize) -> serde_json::Value {
    let classes: Vec<_> = r
        .per_class
        .iter()
        .map(|(&id, c)| {
            json!({
                "class_id": id,
                "name": class_name(names, id),
                "ap": c.ap,
                "ground_truth": c.ground_truth,
                "detections": c.detections,
                "true_positives": c.true_positives,
            })
        })
        .collect();
    json!({
        "images": images,
        "iou_threshold": r.iou_threshold,
        "map": r.map,
        "precision": r.precision,
        "recall": r.recall,
        "f1": r.f1,
        "mean_matched_iou": r.mean_matched_iou,
        "classes": classes,
    })
}
