//! Whitespace-separated annotation text files.
//!
//! Ground truth: `class_id x y w h` (integers). Detections:
//! `class_id confidence x y w h`. Class names: `class_id name`. Blank lines
//! are ignored.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::metrics::{BBox, ImageAnnotations};
use crate::{Error, Result};

pub type ClassNames = BTreeMap<u32, String>;

fn parse_lines<T>(
    text: &str,
    origin: &str,
    fields: usize,
    mut parse: impl FnMut(&[&str]) -> std::result::Result<T, String>,
) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: origin.to_string(),
            line: i + 1,
            message,
        };
        if parts.len() != fields {
            return Err(err(format!("expected {fields} fields, found {}", parts.len())));
        }
        out.push(parse(&parts).map_err(err)?);
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(s: &str, what: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|_| format!("bad {what} '{s}'"))
}

pub fn parse_ground_truth(text: &str, origin: &str) -> Result<Vec<BBox>> {
    parse_lines(text, origin, 5, |p| {
        let class = num::<u32>(p[0], "class id")?;
        let c: Vec<i64> = p[1..]
            .iter()
            .map(|s| num(s, "coordinate"))
            .collect::<std::result::Result<_, _>>()?;
        BBox::truth(class, c[0] as f64, c[1] as f64, c[2] as f64, c[3] as f64).map_err(|e| e.to_string())
    })
}

pub fn parse_detections(text: &str, origin: &str) -> Result<Vec<BBox>> {
    parse_lines(text, origin, 6, |p| {
        let class = num::<u32>(p[0], "class id")?;
        let v: Vec<f64> = p[1..]
            .iter()
            .map(|s| num(s, "number"))
            .collect::<std::result::Result<_, _>>()?;
        BBox::detection(class, v[0], v[1], v[2], v[3], v[4]).map_err(|e| e.to_string())
    })
}

pub fn parse_classes(text: &str, origin: &str) -> Result<ClassNames> {
    let pairs = parse_lines(text, origin, 2, |p| Ok((num::<u32>(p[0], "class id")?, p[1].to_string())))?;
    let mut names = ClassNames::new();
    for (id, name) in pairs {
        if names.insert(id, name).is_some() {
            return Err(Error::Parse {
                path: origin.to_string(),
                line: 0,
                message: format!("class id {id} listed twice"),
            });
        }
    }
    Ok(names)
}

pub fn read_classes(path: &Path) -> Result<ClassNames> {
    parse_classes(&std::fs::read_to_string(path)?, &path.display().to_string())
}

fn txt_stems(dir: &Path) -> Result<BTreeSet<String>> {
    let mut stems = BTreeSet::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "txt") {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                stems.insert(stem.to_string());
            }
        }
    }
    Ok(stems)
}

/// Pairs `<name>.txt` files of the two directories. Every ground-truth file
/// defines one image; an image without a detection file has no detections,
/// and a detection file without ground truth is an error.
pub fn load_annotation_dirs(gt_dir: &Path, det_dir: &Path) -> Result<Vec<(String, ImageAnnotations)>> {
    let gts = txt_stems(gt_dir)?;
    let dets = txt_stems(det_dir)?;
    if let Some(orphan) = dets.difference(&gts).next() {
        return Err(Error::MissingCounterpart(format!(
            "detection file {}",
            det_dir.join(format!("{orphan}.txt")).display()
        )));
    }
    let mut out = Vec::with_capacity(gts.len());
    for stem in gts {
        let gt_path = gt_dir.join(format!("{stem}.txt"));
        let ground_truth = parse_ground_truth(&std::fs::read_to_string(&gt_path)?, &gt_path.display().to_string())?;
        let det_path = det_dir.join(format!("{stem}.txt"));
        let detections = if dets.contains(&stem) {
            parse_detections(&std::fs::read_to_string(&det_path)?, &det_path.display().to_string())?
        } else {
            Vec::new()
        };
        out.push((
            stem,
            ImageAnnotations {
                detections,
                ground_truth,
            },
        ));
    }
    Ok(out)
}
