use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod batch;
mod bench;
mod decode;
mod encode;
mod error;
mod eval;
mod strategy;

use error::CliError;
use strategy::StrategyArg;

#[derive(Parser)]
#[command(name = "rpcodec", version, about = "Intra codec with residual substitution decoding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a PGM or PNG image into an HVS1 container.
    Encode {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u8).range(0..=51))]
        qp: u8,
        #[arg(long)]
        no_loop_filter: bool,
    },
    /// Decode a container into a PGM image.
    Decode {
        input: PathBuf,
        output: PathBuf,
        /// standard, zero, constant:<c> or perturb.
        #[arg(long, default_value = "standard")]
        strategy: StrategyArg,
        #[command(flatten)]
        perturb: PerturbArgs,
        /// Load the perturbation series from a text file instead of generating it.
        #[arg(long)]
        rp_file: Option<PathBuf>,
        /// Write per-stage timings as JSON.
        #[arg(long)]
        timing_out: Option<PathBuf>,
    },
    /// Time decoding of every container in a directory; CSV on stdout.
    Bench {
        dir: PathBuf,
        /// Comma-separated strategies.
        #[arg(long, value_delimiter = ',', default_value = "standard,perturb")]
        strategies: Vec<StrategyArg>,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
        repeats: u32,
        #[command(flatten)]
        perturb: PerturbArgs,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate detections against ground truth (AP per class and mAP).
    Eval {
        gt_dir: PathBuf,
        det_dir: PathBuf,
        /// `class_id name` per line.
        #[arg(long)]
        classes: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        iou: f64,
        /// Write the report as JSON.
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Encode and reconstruct every image of a directory.
    Batch {
        input_dir: PathBuf,
        output_root: PathBuf,
        #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u8).range(0..=51))]
        qp: u8,
        /// Comma-separated perturbation sigmas.
        #[arg(long, value_delimiter = ',', default_value = "7")]
        sigmas: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Write the perturbation series for (sigma, seed) as text.
    Rp {
        output: PathBuf,
        #[command(flatten)]
        perturb: PerturbArgs,
    },
}

#[derive(Args, Clone, Copy)]
struct PerturbArgs {
    #[arg(long, default_value_t = 7.0)]
    sigma: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Encode {
            input,
            output,
            qp,
            no_loop_filter,
        } => encode::run(&input, &output, qp, !no_loop_filter),
        Command::Decode {
            input,
            output,
            strategy,
            perturb,
            rp_file,
            timing_out,
        } => decode::run(decode::Options {
            input: &input,
            output: &output,
            strategy: strategy.resolve(perturb.sigma, perturb.seed),
            rp_file: rp_file.as_deref(),
            timing_out: timing_out.as_deref(),
        }),
        Command::Bench {
            dir,
            strategies,
            repeats,
            perturb,
            out,
        } => {
            let strategies = strategies.iter().map(|s| s.resolve(perturb.sigma, perturb.seed)).collect();
            bench::run(&dir, strategies, repeats as usize, out.as_deref())
        }
        Command::Eval {
            gt_dir,
            det_dir,
            classes,
            iou,
            json_out,
        } => eval::run(&gt_dir, &det_dir, classes.as_deref(), iou, json_out.as_deref()),
        Command::Batch {
            input_dir,
            output_root,
            qp,
            sigmas,
            seed,
        } => batch::run(&input_dir, &output_root, qp, &sigmas, seed),
        Command::Rp { output, perturb } => {
            let series = rpcodec::perturb::generate_rp_series(perturb.sigma, perturb.seed).map_err(CliError::usage_if_param)?;
            series.write_text(&output)?;
            println!(
                "wrote {} values: mean {:.4}, std {:.4}, attempts {}",
                series.values().len(),
                series.achieved_mean(),
                series.achieved_std(),
                series.attempts()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
