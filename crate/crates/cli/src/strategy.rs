use std::str::FromStr;

use rpcodec::ReconstructionStrategy;

/// A strategy as written on the command line; perturbation parameters come
/// from separate flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrategyArg {
    Standard,
    Zero,
    Constant(i32),
    Perturb,
}

impl StrategyArg {
    pub fn resolve(self, sigma: f64, seed: u64) -> ReconstructionStrategy {
        match self {
            StrategyArg::Standard => ReconstructionStrategy::Standard,
            StrategyArg::Zero => ReconstructionStrategy::ZeroResidual,
            StrategyArg::Constant(c) => ReconstructionStrategy::ConstantResidual(c),
            StrategyArg::Perturb => ReconstructionStrategy::RandomPerturbation { sigma, seed },
        }
    }
}

impl FromStr for StrategyArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "standard" => Ok(StrategyArg::Standard),
            "zero" => Ok(StrategyArg::Zero),
            "perturb" => Ok(StrategyArg::Perturb),
            _ => {
                let c = s
                    .strip_prefix("constant:")
                    .ok_or_else(|| format!("unknown strategy '{s}' (standard, zero, constant:<c>, perturb)"))?;
                let c: i32 = c.parse().map_err(|_| format!("bad constant '{c}'"))?;
                if !(-255..=255).contains(&c) {
                    return Err(format!("constant {c} outside [-255, 255]"));
                }
                Ok(StrategyArg::Constant(c))
            }
        }
    }
}

/// Label used in reports: `standard`, `zero`, `constant:<c>` or `perturb`.
pub fn label(s: &ReconstructionStrategy) -> String {
    match s {
        ReconstructionStrategy::ConstantResidual(c) => format!("constant:{c}"),
        other => other.name().to_string(),
    }
}
