//! The random perturbation series that stands in for decoded residuals.
//!
//! A series is 4096 integers (one per sample of the largest CU) drawn from a
//! zero-mean Gaussian with the requested standard deviation. Each draw is
//! rounded to the nearest integer, ties away from zero. If the rounded set
//! misses mean 0 or the target deviation by more than 0.1, the whole set is
//! redrawn from the continuing generator stream, up to 1000 times.
//!
//! The series is built once and reused for every CU of every image.

use std::fmt::Write as _;
use std::path::Path;

use crate::rng::Xoshiro256;
use crate::{Error, Result};

pub const SERIES_LEN: usize = 4096;
pub const MEAN_TOLERANCE: f64 = 0.1;
pub const STD_TOLERANCE: f64 = 0.1;
pub const MAX_ATTEMPTS: u32 = 1000;
pub const MIN_SIGMA: f64 = 0.5;
pub const MAX_SIGMA: f64 = 64.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RpSeries {
    values: Vec<i32>,
    sigma: f64,
    seed: Option<u64>,
    attempts: u32,
    achieved_mean: f64,
    achieved_std: f64,
}

impl RpSeries {
    /// Wraps an externally supplied series (e.g. loaded from an audit dump).
    /// The target sigma is taken to be the achieved deviation.
    pub fn from_values(values: Vec<i32>) -> Result<Self> {
        if values.len() != SERIES_LEN {
            return Err(Error::InvalidParameter(format!(
                "perturbation series needs {SERIES_LEN} values, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| v.abs() > 255) {
            return Err(Error::InvalidParameter(format!(
                "perturbation value {v} outside [-255, 255]"
            )));
        }
        let (mean, std) = moments(&values);
        Ok(Self {
            values,
            sigma: std,
            seed: None,
            attempts: 0,
            achieved_mean: mean,
            achieved_std: std,
        })
    }

    pub fn values(&self) -> &[i32] {
        &self.values
    }

    /// Target mean; always zero.
    pub fn mu(&self) -> f64 {
        0.0
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Seed the series was generated from; `None` for loaded series.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Number of full draws it took to meet the tolerances.
    pub fn attempts(&self) -> u32 {
        self.attempts
    }

    pub fn achieved_mean(&self) -> f64 {
        self.achieved_mean
    }

    pub fn achieved_std(&self) -> f64 {
        self.achieved_std
    }

    /// One signed integer per line.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(SERIES_LEN * 4);
        for v in &self.values {
            writeln!(out, "{v}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str, origin: &str) -> Result<Self> {
        let mut values = Vec::with_capacity(SERIES_LEN);
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v = line.parse::<i32>().map_err(|e| Error::Parse {
                path: origin.to_string(),
                line: i + 1,
                message: format!("expected a signed integer: {e}"),
            })?;
            values.push(v);
        }
        Self::from_values(values)
    }

    pub fn write_text(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_text(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text, &path.display().to_string())
    }
}

fn moments(values: &[i32]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n;
    let var = values
        .iter()
        .map(|&v| (v as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    (mean, var.sqrt())
}

/// Draws the perturbation series for `(sigma, seed)`.
///
/// Fails for sigma outside [0.5, 64] and when 1000 draws all miss the
/// tolerances.
pub fn generate_rp_series(sigma: f64, seed: u64) -> Result<RpSeries> {
    if !(MIN_SIGMA..=MAX_SIGMA).contains(&sigma) {
        return Err(Error::InvalidParameter(format!(
            "sigma {sigma} outside [{MIN_SIGMA}, {MAX_SIGMA}]"
        )));
    }
    let mut rng = Xoshiro256::seed_from_u64(seed);
    let mut values = vec![0i32; SERIES_LEN];
    for attempt in 1..=MAX_ATTEMPTS {
        for v in values.iter_mut() {
            // f64::round rounds half away from zero.
            *v = (rng.next_normal() * sigma).round() as i32;
        }
        let (mean, std) = moments(&values);
        if mean.abs() <= MEAN_TOLERANCE && (std - sigma).abs() <= STD_TOLERANCE {
            return Ok(RpSeries {
                values,
                sigma,
                seed: Some(seed),
                attempts: attempt,
                achieved_mean: mean,
                achieved_std: std,
            });
        }
    }
    Err(Error::ToleranceNotMet {
        sigma,
        attempts: MAX_ATTEMPTS,
    })
}
