use std::path::Path;

use rpcodec::codec::{Decoder, Stage, StageTimings};
use rpcodec::io::{read_container, write_pgm_file};
use rpcodec::perturb::RpSeries;
use rpcodec::ReconstructionStrategy;
use serde_json::json;

use crate::error::CliError;
use crate::strategy::label;

pub struct Options<'a> {
    pub input: &'a Path,
    pub output: &'a Path,
    pub strategy: ReconstructionStrategy,
    pub rp_file: Option<&'a Path>,
    pub timing_out: Option<&'a Path>,
}

pub fn run(opts: Options) -> Result<(), CliError> {
    let decoder = match (opts.rp_file, opts.strategy) {
        (Some(path), ReconstructionStrategy::RandomPerturbation { .. }) => Decoder::with_series(RpSeries::read_text(path)?),
        (Some(_), _) => return Err(CliError::Usage("--rp-file requires --strategy perturb".into())),
        (None, s) => Decoder::new(s).map_err(CliError::usage_if_param)?,
    };
    let image = read_container(&std::fs::read(opts.input)?)?;
    let out = decoder.decode(&image)?;
    write_pgm_file(&out.frame, opts.output)?;
    if let Some(path) = opts.timing_out {
        let report = timing_report(decoder.strategy(), &out.timings);
        std::fs::write(path, serde_json::to_string_pretty(&report)? + "\n")?;
    }
    println!(
        "{} {}x{}: wall {:.3} ms",
        label(decoder.strategy()),
        out.frame.width(),
        out.frame.height(),
        out.timings.ms(Stage::Wall)
    );
    Ok(())
}

pub fn timing_report(strategy: &ReconstructionStrategy, t: &StageTimings) -> serde_json::Value {
    let (sigma, seed) = match *strategy {
        ReconstructionStrategy::RandomPerturbation { sigma, seed } => (Some(sigma), Some(seed)),
        _ => (None, None),
    };
    json!({
        "ed_ms": t.ms(Stage::Ed),
        "ip_ms": t.ms(Stage::Ip),
        "rd_ms": t.ms(Stage::Rd),
        "lf_ms": t.ms(Stage::Lf),
        "wall_ms": t.ms(Stage::Wall),
        "strategy": label(strategy),
        "sigma": sigma,
        "seed": seed,
    })
}
