use std::path::{Path, PathBuf};

use rayon::prelude::*;
use rpcodec::codec::{encode_frame, parse_trees, Decoder, Stage};
use rpcodec::featmap::{render_mode_map, render_partition_map};
use rpcodec::io::{read_image, write_container, write_pgm_file};
use rpcodec::metrics::psnr;
use rpcodec::{CodecConfig, Frame, ReconstructionStrategy};

use crate::error::CliError;

pub const MANIFEST: &str = "manifest.csv";

struct Row {
    file: String,
    error: Option<String>,
    bytes: usize,
    bpp: f64,
    /// Standard, zero, then one per sigma.
    psnr: Vec<f64>,
    wall_ms: Vec<f64>,
}

fn sigma_tag(sigma: f64) -> String {
    format!("perturb_s{sigma}")
}

fn inputs(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    files.retain(|p| {
        p.is_file()
            && p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "pgm" | "png"))
    });
    files.sort();
    if files.is_empty() {
        return Err(CliError::Usage(format!("no .pgm or .png images in {}", dir.display())));
    }
    Ok(files)
}

fn process(path: &Path, root: &Path, cfg: &CodecConfig, decoders: &[(String, Decoder)]) -> rpcodec::Result<Row> {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
    let source = read_image(path)?;
    let out_dir = root.join(&stem);
    std::fs::create_dir_all(&out_dir)?;
    let enc = encode_frame(&source, cfg)?;
    let bytes = write_container(&enc.image);
    std::fs::write(out_dir.join(format!("{stem}.hvs")), &bytes)?;

    let mut row = Row {
        file: path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
        error: None,
        bytes: bytes.len(),
        bpp: bytes.len() as f64 * 8.0 / (source.width() as f64 * source.height() as f64),
        psnr: Vec::new(),
        wall_ms: Vec::new(),
    };
    for (tag, decoder) in decoders {
        let out = decoder.decode(&enc.image)?;
        write_pgm_file(&out.frame, &out_dir.join(format!("{tag}.pgm")))?;
        row.psnr.push(psnr(&out.frame, &source)?.as_f64());
        row.wall_ms.push(out.timings.ms(Stage::Wall));
    }
    let trees = parse_trees(&enc.image)?;
    let maps: [(&str, Frame); 2] = [
        ("partition", render_partition_map(&trees, source.width(), source.height())?),
        ("mode", render_mode_map(&trees, source.width(), source.height())?),
    ];
    for (tag, map) in maps {
        write_pgm_file(&map, &out_dir.join(format!("{tag}.pgm")))?;
    }
    Ok(row)
}

/// Files are processed in parallel; a failing file is recorded in the
/// manifest and turns the exit status into a partial failure.
pub fn run(input_dir: &Path, root: &Path, qp: u8, sigmas: &[f64], seed: u64) -> Result<(), CliError> {
    let cfg = CodecConfig::new(qp).map_err(CliError::usage_if_param)?;
    let mut decoders = vec![
        ("standard".to_string(), Decoder::new(ReconstructionStrategy::Standard)?),
        ("zero".to_string(), Decoder::new(ReconstructionStrategy::ZeroResidual)?),
    ];
    for &sigma in sigmas {
        let d = Decoder::new(ReconstructionStrategy::RandomPerturbation { sigma, seed }).map_err(CliError::usage_if_param)?;
        decoders.push((sigma_tag(sigma), d));
    }
    let files = inputs(input_dir)?;
    std::fs::create_dir_all(root)?;

    let rows: Vec<Row> = files
        .par_iter()
        .map(|path| {
            process(path, root, &cfg, &decoders).unwrap_or_else(|e| Row {
                file: path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
                error: Some(e.to_string()),
                bytes: 0,
                bpp: 0.0,
                psnr: Vec::new(),
                wall_ms: Vec::new(),
            })
        })
        .collect();

    let mut csv = csv::Writer::from_path(root.join(MANIFEST))?;
    let mut header = vec!["file".to_string(), "status".into(), "error".into(), "bytes".into(), "bpp".into()];
    header.extend(decoders.iter().map(|(t, _)| format!("psnr_{t}")));
    header.extend(decoders.iter().map(|(t, _)| format!("wall_ms_{t}")));
    csv.write_record(&header)?;
    let mut failed = 0;
    for row in &rows {
        let mut rec = vec![row.file.clone()];
        match &row.error {
            Some(e) => {
                failed += 1;
                rec.extend(["error".to_string(), e.clone()]);
                rec.extend(std::iter::repeat_n(String::new(), header.len() - 3));
            }
            None => {
                rec.extend(["ok".to_string(), String::new(), row.bytes.to_string(), format!("{:.4}", row.bpp)]);
                rec.extend(row.psnr.iter().map(|v| format!("{v:.4}")));
                rec.extend(row.wall_ms.iter().map(|v| format!("{v:.4}")));
            }
        }
        csv.write_record(&rec)?;
    }
    csv.flush()?;
    println!("{} of {} files processed, manifest in {}", rows.len() - failed, rows.len(), root.join(MANIFEST).display());
    if failed > 0 {
        return Err(CliError::Partial {
            failed,
            total: rows.len(),
        });
    }
    Ok(())
}
