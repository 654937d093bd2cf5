use std::io::Write;
use std::path::{Path, PathBuf};

use rpcodec::codec::{Decoder, EncodedImage, Stage, StageTimings, TimingSummary};
use rpcodec::io::read_container;
use rpcodec::ReconstructionStrategy;

use crate::error::CliError;
use crate::strategy::label;

pub const HEADER: [&str; 7] = ["file", "strategy", "stage", "avg_ms", "min_ms", "max_ms", "reduction_pct"];
pub const SUMMARY_FILE: &str = "summary";

pub fn containers(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    files.retain(|p| p.is_file() && p.extension().is_some_and(|e| e == "hvs"));
    files.sort();
    if files.is_empty() {
        return Err(CliError::Usage(format!("no .hvs containers in {}", dir.display())));
    }
    Ok(files)
}

/// Percent by which `value` is below `reference`.
fn reduction(reference: Option<f64>, value: f64) -> String {
    match reference {
        Some(r) if r > 0.0 => format!("{:.2}", 100.0 * (r - value) / r),
        _ => String::new(),
    }
}

fn bench_one(decoder: &Decoder, image: &EncodedImage, repeats: usize) -> Result<Vec<StageTimings>, CliError> {
    decoder.decode(image)?;
    (0..repeats).map(|_| Ok(decoder.decode(image)?.timings)).collect()
}

/// Runs sequentially on the calling thread: one discarded warm-up decode,
/// then `repeats` timed decodes per file and strategy.
pub fn run(dir: &Path, strategies: Vec<ReconstructionStrategy>, repeats: usize, out: Option<&Path>) -> Result<(), CliError> {
    let files = containers(dir)?;
    let decoders = strategies
        .into_iter()
        .map(|s| Decoder::new(s).map_err(CliError::usage_if_param))
        .collect::<Result<Vec<_>, _>>()?;
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut csv = csv::Writer::from_writer(sink);
    csv.write_record(HEADER)?;
    let mut all_runs: Vec<Vec<StageTimings>> = vec![Vec::new(); decoders.len()];
    let standard_index = decoders.iter().position(|d| d.strategy().is_standard());

    for file in &files {
        let image = read_container(&std::fs::read(file)?)?;
        let name = file.file_name().unwrap_or_default().to_string_lossy().into_owned();
        let summaries = decoders
            .iter()
            .zip(&mut all_runs)
            .map(|(d, acc)| {
                let runs = bench_one(d, &image, repeats)?;
                acc.extend_from_slice(&runs);
                Ok(TimingSummary::from_runs(&runs).expect("repeats >= 1"))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        for (d, summary) in decoders.iter().zip(&summaries) {
            for stage in Stage::DECODE {
                let st = summary.stage(stage);
                let reference = standard_index
                    .filter(|_| !d.strategy().is_standard())
                    .map(|i| summaries[i].stage(stage).avg_ms);
                csv.write_record([
                    name.clone(),
                    label(d.strategy()),
                    stage.name().to_string(),
                    format!("{:.4}", st.avg_ms),
                    format!("{:.4}", st.min_ms),
                    format!("{:.4}", st.max_ms),
                    reduction(reference, st.avg_ms),
                ])?;
            }
        }
    }

    let totals: Vec<TimingSummary> = all_runs.iter().map(|r| TimingSummary::from_runs(r).expect("runs")).collect();
    for (d, total) in decoders.iter().zip(&totals) {
        let wall = total.stage(Stage::Wall);
        let reference = standard_index
            .filter(|_| !d.strategy().is_standard())
            .map(|i| totals[i].stage(Stage::Wall).avg_ms);
        csv.write_record([
            SUMMARY_FILE.to_string(),
            label(d.strategy()),
            Stage::Wall.name().to_string(),
            format!("{:.4}", wall.avg_ms),
            format!("{:.4}", wall.min_ms),
            format!("{:.4}", wall.max_ms),
            reduction(reference, wall.avg_ms),
        ])?;
    }
    csv.flush()?;
    Ok(())
}
