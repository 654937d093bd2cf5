//! Deterministic synthetic road scenes used as a test corpus.
//!
//! Each scene has a sky gradient, a textured road with lane markings and a
//! handful of vehicles drawn as boxes with windows and wheels. The vehicle
//! boxes are returned as ground truth using six classes.

use crate::metrics::BBox;
use crate::rng::Xoshiro256;
use crate::Frame;

pub const CLASS_NAMES: [&str; 6] = ["bus", "microbus", "minivan", "sedan", "suv", "truck"];

#[derive(Debug, Clone)]
pub struct Scene {
    pub frame: Frame,
    pub objects: Vec<BBox>,
}

/// Scene `index` at the given size; identical for identical arguments.
pub fn scene(index: u64, width: u32, height: u32) -> Scene {
    assert!(width >= 16 && height >= 16, "scene too small");
    let mut rng = Xoshiro256::seed_from_u64(0x5CE_0000 + index);
    let (w, h) = (width as usize, height as usize);
    let horizon = (h as f64 * (0.25 + 0.2 * rng.next_f64())) as usize;
    let sky_top = 150.0 + 70.0 * rng.next_f64();
    let sky_bottom = sky_top - 40.0 - 40.0 * rng.next_f64();
    let road = 60.0 + 70.0 * rng.next_f64();

    let mut img = vec![0f64; w * h];
    for y in 0..h {
        for x in 0..w {
            img[y * w + x] = if y < horizon {
                sky_top + (sky_bottom - sky_top) * y as f64 / horizon as f64
            } else {
                road + 25.0 * ((y - horizon) as f64 / (h - horizon) as f64)
            };
        }
    }

    // Low-frequency texture: a few random sinusoids.
    for _ in 0..4 {
        let (fx, fy) = (rng.next_f64() * 0.15, rng.next_f64() * 0.15);
        let phase = rng.next_f64() * std::f64::consts::TAU;
        let amp = 3.0 + 6.0 * rng.next_f64();
        for y in 0..h {
            for x in 0..w {
                img[y * w + x] += amp * (fx * x as f64 + fy * y as f64 + phase).sin();
            }
        }
    }

    // Lane markings.
    let lanes = 1 + rng.range(0, 3) as usize;
    for l in 0..lanes {
        let ly = horizon + (h - horizon) * (l + 1) / (lanes + 1);
        let dash = 8 + rng.range(0, 16) as usize;
        for x in 0..w {
            if (x / dash).is_multiple_of(2) {
                for y in ly..(ly + 2).min(h) {
                    img[y * w + x] = 225.0;
                }
            }
        }
    }

    let mut objects = Vec::new();
    let count = 2 + rng.range(0, 5) as usize;
    for _ in 0..count {
        let class = rng.range(0, 6) as u32;
        let (bw_frac, bh_frac) = match class {
            0 => (0.35, 0.28),
            5 => (0.30, 0.25),
            1 | 2 => (0.20, 0.18),
            _ => (0.17, 0.13),
        };
        let bw = ((w as f64 * bw_frac * (0.7 + 0.6 * rng.next_f64())) as usize).clamp(6, w - 2);
        let bh = ((h as f64 * bh_frac * (0.7 + 0.6 * rng.next_f64())) as usize).clamp(6, h - 2);
        let x0 = rng.range(0, (w - bw) as i64) as usize;
        let lo = horizon.saturating_sub(bh / 2).min(h - bh);
        let y0 = lo + rng.range(0, (h - bh - lo).max(1) as i64) as usize;
        let body = 20.0 + 215.0 * rng.next_f64();
        let glass = if body > 120.0 { 40.0 } else { 190.0 };
        for y in y0..y0 + bh {
            for x in x0..x0 + bw {
                let (u, v) = ((x - x0) as f64 / bw as f64, (y - y0) as f64 / bh as f64);
                let mut value = body - 20.0 * v;
                if (0.1..0.9).contains(&u) && (0.12..0.4).contains(&v) {
                    value = glass;
                }
                for cx in [0.22, 0.78] {
                    let (dx, dy) = ((u - cx) * bw as f64, (v - 0.9) * bh as f64);
                    if dx * dx + dy * dy < (bh as f64 * 0.12).powi(2) {
                        value = 15.0;
                    }
                }
                img[y * w + x] = value;
            }
        }
        objects.push(
            BBox::truth(class, x0 as f64, y0 as f64, bw as f64, bh as f64).expect("positive extent"),
        );
    }

    // Fine grain.
    let samples = img
        .iter()
        .map(|&v| (v + rng.next_normal() * 2.0).round().clamp(0.0, 255.0) as u8)
        .collect();
    Scene {
        frame: Frame::new(width, height, samples).expect("sized buffer"),
        objects,
    }
}

/// Frames of scenes `0..count`.
pub fn corpus(count: usize, width: u32, height: u32) -> Vec<Frame> {
    (0..count as u64).map(|i| scene(i, width, height).frame).collect()
}
