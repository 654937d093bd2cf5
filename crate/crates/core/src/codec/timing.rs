//! Per-stage decode timers and their aggregation over repeated runs.

use std::fmt;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    /// Entropy decoding of the coding tree, coefficients included.
    Ed,
    /// Reference gathering, smoothing and prediction.
    Ip,
    /// Dequantization, inverse transform and residual add.
    Rd,
    /// Deblocking.
    Lf,
    Wall,
}

impl Stage {
    pub const DECODE: [Stage; 4] = [Stage::Ed, Stage::Ip, Stage::Rd, Stage::Lf];
    pub const ALL: [Stage; 5] = [Stage::Ed, Stage::Ip, Stage::Rd, Stage::Lf, Stage::Wall];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ed => "ed",
            Stage::Ip => "ip",
            Stage::Rd => "rd",
            Stage::Lf => "lf",
            Stage::Wall => "wall",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exclusive per-stage durations of one decode. Stages interleave per CTU,
/// so `wall` also covers bookkeeping that belongs to none of them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StageTimings {
    pub ed: Duration,
    pub ip: Duration,
    pub rd: Duration,
    pub lf: Duration,
    pub wall: Duration,
}

impl StageTimings {
    pub fn get(&self, stage: Stage) -> Duration {
        match stage {
            Stage::Ed => self.ed,
            Stage::Ip => self.ip,
            Stage::Rd => self.rd,
            Stage::Lf => self.lf,
            Stage::Wall => self.wall,
        }
    }

    pub fn ms(&self, stage: Stage) -> f64 {
        self.get(stage).as_secs_f64() * 1e3
    }

    fn slot(&mut self, stage: Stage) -> &mut Duration {
        match stage {
            Stage::Ed => &mut self.ed,
            Stage::Ip => &mut self.ip,
            Stage::Rd => &mut self.rd,
            Stage::Lf => &mut self.lf,
            Stage::Wall => &mut self.wall,
        }
    }

    /// Runs `f`, charging its duration to `stage`.
    #[inline]
    pub fn time<T>(&mut self, stage: Stage, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self.slot(stage) += start.elapsed();
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageStats {
    pub avg_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
}

/// Average, minimum and maximum of each stage over a set of runs.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingSummary {
    pub runs: usize,
    stats: [StageStats; 5],
}

impl TimingSummary {
    /// `None` for an empty slice.
    pub fn from_runs(runs: &[StageTimings]) -> Option<Self> {
        if runs.is_empty() {
            return None;
        }
        let stats = Stage::ALL.map(|stage| {
            let ms: Vec<f64> = runs.iter().map(|r| r.ms(stage)).collect();
            StageStats {
                avg_ms: ms.iter().sum::<f64>() / ms.len() as f64,
                min_ms: ms.iter().copied().fold(f64::INFINITY, f64::min),
                max_ms: ms.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            }
        });
        Some(Self {
            runs: runs.len(),
            stats,
        })
    }

    pub fn stage(&self, stage: Stage) -> StageStats {
        self.stats[stage as usize]
    }
}
