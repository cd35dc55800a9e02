use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sara_core::wavelets::validate_all_filters;
use sara_core::{FourierMask, FourierMaskConfig};
use sara_harness::config::KeyValues;
use sara_harness::experiment::{mask_image, mean_snr, rows_of, ExperimentSpec, ResultRow};
use sara_harness::mask_io::{read_mask, write_mask};
use sara_harness::pgm::{read_pgm, write_pgm, Depth};
use sara_harness::{run_experiment, run_radio_demo, snr_db};

#[derive(Parser)]
#[command(
    name = "sara",
    version,
    about = "Sparsity averaging reweighted analysis experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Undersampling sweep over the configured algorithms.
    Run(SpecArgs),
    /// Radio imaging demo on an arcs-of-ellipses Fourier mask.
    Radio(SpecArgs),
    /// SNR in dB of an estimate against a reference image.
    Snr {
        reference: PathBuf,
        estimate: PathBuf,
    },
    /// Sampling pattern utilities.
    #[command(subcommand)]
    Mask(MaskCommand),
}

#[derive(Args)]
struct SpecArgs {
    /// Flat `key = value` file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// PGM path or builtin:<name>.
    #[arg(long)]
    image: Option<String>,
    /// Comma-separated M/N values.
    #[arg(long)]
    ratios: Option<String>,
    /// Input SNR in dB (`inf` for noiseless data).
    #[arg(long)]
    isnr: Option<String>,
    /// Comma-separated algorithms: dirty, BP, BPDb8, RW-BPDb8, BPSA, SARA.
    #[arg(long)]
    algos: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// SARA dictionary, e.g. `db1-db8` or `dirac,db1-db8`.
    #[arg(long)]
    dict: Option<String>,
    #[arg(long)]
    levels: Option<String>,
    /// Maximum number of weighted solves.
    #[arg(long)]
    nmax: Option<String>,
    /// Any other config key, as `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl SpecArgs {
    fn spec(&self, base: ExperimentSpec) -> Result<ExperimentSpec> {
        let mut kv = match &self.config {
            Some(path) => KeyValues::load(path)?,
            None => KeyValues::default(),
        };
        let flags = [
            ("image", &self.image),
            ("ratios", &self.ratios),
            ("isnr", &self.isnr),
            ("algos", &self.algos),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("out", &self.out),
            ("dict", &self.dict),
            ("levels", &self.levels),
            ("nmax", &self.nmax),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                kv.set(key, v.as_str());
            }
        }
        for pair in &self.set {
            let (k, v) = pair
                .split_once('=')
                .with_context(|| format!("--set expects KEY=VALUE, got `{pair}`"))?;
            kv.set(k.trim(), v.trim());
        }
        Ok(base.apply(&kv)?)
    }
}

#[derive(Subcommand)]
enum MaskCommand {
    /// Generate an arcs-of-ellipses pattern as `row col` lines.
    Gen {
        #[arg(long, default_value_t = 64)]
        side: usize,
        /// Number of sampled frequencies.
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        n_ellipses: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Also render the pattern as a PGM.
        #[arg(long)]
        pgm: Option<PathBuf>,
    },
    /// Summarize a pattern file, optionally rendering it as a PGM.
    Show {
        file: PathBuf,
        #[arg(long, default_value_t = 64)]
        side: usize,
        #[arg(long)]
        pgm: Option<PathBuf>,
    },
}

fn print_rows(rows: &[ResultRow]) {
    println!(
        "{:<10} {:>8} {:>10} {:>8}",
        "algorithm", "ratio", "snr_db", "trials"
    );
    for (alg, ratio, mean) in mean_snr(rows) {
        let k = rows
            .iter()
            .filter(|r| r.algorithm == alg && r.ratio == ratio)
            .count();
        println!("{:<10} {:>8.4} {:>10.2} {:>8}", alg.name(), ratio, mean, k);
    }
    let failed = rows.iter().filter(|r| r.snr_db.is_nan()).count();
    if failed > 0 {
        println!("{failed} cell(s) failed");
    }
}

fn run(cli: Cli) -> Result<()> {
    validate_all_filters().context("wavelet filter tables")?;
    match cli.command {
        Command::Run(args) => {
            let spec = args.spec(ExperimentSpec::sweep_default())?;
            print_rows(&run_experiment(&spec)?);
        }
        Command::Radio(args) => {
            let spec = args.spec(ExperimentSpec::radio_default())?;
            print_rows(&rows_of(&run_radio_demo(&spec)?));
        }
        Command::Snr {
            reference,
            estimate,
        } => {
            let snr = snr_db(&read_pgm(&reference)?, &read_pgm(&estimate)?)?;
            println!("{snr}");
        }
        Command::Mask(MaskCommand::Gen {
            side,
            m,
            seed,
            n_ellipses,
            out,
            pgm,
        }) => {
            let mut cfg = FourierMaskConfig::new(seed, side, m);
            if let Some(k) = n_ellipses {
                cfg.n_ellipses = k;
            }
            let mask = FourierMask::new(cfg)?;
            write_mask(&out, &mask.cells())?;
            if let Some(p) = pgm {
                write_pgm(&p, &mask_image(&mask), 0.0, 1.0, Depth::Eight)?;
            }
            println!(
                "{} of {} frequencies written to {}",
                mask.cells().len(),
                side * side,
                out.display()
            );
        }
        Command::Mask(MaskCommand::Show { file, side, pgm }) => {
            let cells = read_mask(&file)?;
            let mask = FourierMask::from_cells(side, side, &cells)?;
            let m = mask.cells().len();
            if m != cells.len() {
                bail!(
                    "{} lists {} entries but only {m} distinct frequencies",
                    file.display(),
                    cells.len()
                );
            }
            println!(
                "{m} of {} frequencies ({:.2}%)",
                side * side,
                100.0 * m as f64 / (side * side) as f64
            );
            if let Some(p) = pgm {
                write_pgm(&p, &mask_image(&mask), 0.0, 1.0, Depth::Eight)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
