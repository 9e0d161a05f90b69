//! stegmap command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 capacity exceeded, 3 parse or
//! corruption error, 4 I/O error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use stegmap::steganalysis::{self, Detector};
use stegmap::stego::{self, EmbedConfig, StegoError};
use stegmap::{baselines, bench, decomp, fixtures, iwsim, sim, BitStream, GrayImage, Method};

#[derive(Parser)]
#[command(
    name = "stegmap",
    about = "Grayscale image steganography toolkit",
    long_about = "Embeds secret images into PGM covers via decomposition \
mapping tables, runs the LSBR/LSBM/LSBMR baselines, analyzes images with \
targeted detectors, and benchmarks whole corpora.\n\nStream container \
(transform subcommand): 32-bit big-endian bit length followed by the packed \
bit-stream, MSB first. Embedded messages carry a 16+16 bit dimension header \
before the self-delimiting transform stream."
)]
struct Cli {
    /// Key for every pseudo-random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Suppress progress diagnostics on stderr.
    #[arg(long, global = true, default_value_t = false)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transform a secret image into its embeddable bit-stream.
    Transform(TransformArgs),
    /// Per-scheme zero-LSB ratios for a directory of images, as CSV.
    DecomposeStats(DecomposeStatsArgs),
    /// Embed a secret image (mapping methods) or payload file (baselines).
    Embed(EmbedArgs),
    /// Extract a secret image or payload from a stego image.
    Extract(ExtractArgs),
    /// Run one steganalysis detector on one image.
    Analyze(AnalyzeArgs),
    /// Run the corpus benchmark and write a CSV report (schema
    /// stegmap-bench-v1).
    Bench(BenchArgs),
    /// Write the bundled demo corpus into a directory.
    Fixtures(FixturesArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformKind {
    Sim,
    Iwsim,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(value_enum)]
    kind: TransformKind,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DecomposeStatsArgs {
    #[arg(long)]
    dir: PathBuf,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    method: Method,
    #[arg(long)]
    cover: PathBuf,
    /// Secret image (mapping methods).
    #[arg(long)]
    secret: Option<PathBuf>,
    /// Raw payload file (baseline methods).
    #[arg(long)]
    payload: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    method: Method,
    #[arg(long)]
    stego: PathBuf,
    /// Number of payload bits to read (baseline methods).
    #[arg(long)]
    n_bits: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    detector: Detector,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = steganalysis::LSBMS_DEFAULT_THRESHOLD)]
    threshold: f64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    covers: PathBuf,
    #[arg(long)]
    secrets: PathBuf,
    /// Comma-separated method list; defaults to all seven.
    #[arg(long, value_delimiter = ',')]
    methods: Vec<Method>,
    /// Comma-separated payload fractions in (0,1].
    #[arg(long, value_delimiter = ',')]
    rates: Vec<f64>,
    /// Comma-separated detector list; defaults to all three.
    #[arg(long, value_delimiter = ',')]
    detectors: Vec<Detector>,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (0 = logical cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct FixturesArgs {
    #[arg(long)]
    out_dir: PathBuf,
}

enum CliError {
    Usage(String),
    Capacity(String),
    Parse(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Capacity(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Capacity(m) | CliError::Parse(m) | CliError::Io(m) => m,
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn from_stego_error(e: StegoError) -> CliError {
    match e {
        StegoError::CapacityExceeded {
            required_bits,
            available_bits,
        } => CliError::Capacity(format!(
            "payload needs {required_bits} bits but the cover offers {available_bits}"
        )),
        other => CliError::Parse(other.to_string()),
    }
}

fn load_image(path: &Path) -> Result<GrayImage, CliError> {
    let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
    GrayImage::from_pgm(&bytes).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Transform(args) => {
            let secret = load_image(&args.input)?;
            let stream = match args.kind {
                TransformKind::Sim => {
                    let enc = sim::sim_forward(&secret);
                    let mut s = enc.side_info;
                    s.append(&enc.payload);
                    s
                }
                TransformKind::Iwsim => iwsim::iwsim_forward(&secret),
            };
            std::fs::write(&args.out, stream.to_length_prefixed_bytes())
                .map_err(|e| io_err(&args.out, e))?;
            if !cli.quiet {
                eprintln!("wrote {} bits to {}", stream.len(), args.out.display());
            }
            Ok(())
        }
        Command::DecomposeStats(args) => {
            let (images, warnings) =
                bench::load_corpus(&args.dir).map_err(|e| CliError::Io(e.to_string()))?;
            for warning in warnings {
                eprintln!("warning: {warning}");
            }
            let schemes = decomp::Scheme::stats_set();
            println!("file,scheme,ratio");
            for (name, img) in &images {
                for scheme in &schemes {
                    println!("{name},{},{:.6}", scheme.name(), scheme.zero_lsb_ratio(img));
                }
            }
            Ok(())
        }
        Command::Embed(args) => {
            let cover = load_image(&args.cover)?;
            let stego_img = match args.method.mapping() {
                Some(mapping) => {
                    let secret_path = args
                        .secret
                        .as_ref()
                        .ok_or_else(|| CliError::Usage("mapping methods need --secret".into()))?;
                    let secret = load_image(secret_path)?;
                    stego::embed(
                        &cover,
                        &secret,
                        &EmbedConfig {
                            method: mapping,
                            seed: cli.seed,
                        },
                    )
                    .map_err(from_stego_error)?
                }
                None => {
                    let payload_path = args
                        .payload
                        .as_ref()
                        .ok_or_else(|| CliError::Usage("baseline methods need --payload".into()))?;
                    let bytes = std::fs::read(payload_path).map_err(|e| io_err(payload_path, e))?;
                    let bits = BitStream::from_bytes(&bytes);
                    let result = match args.method {
                        Method::Lsbr => baselines::lsbr_embed(&cover, &bits, cli.seed),
                        Method::Lsbm => baselines::lsbm_embed(&cover, &bits, cli.seed),
                        Method::Lsbmr => baselines::lsbmr_embed(&cover, &bits, cli.seed),
                        _ => unreachable!(),
                    };
                    result.map_err(|e| match e {
                        baselines::BaselineError::CapacityExceeded { .. } => {
                            CliError::Capacity(e.to_string())
                        }
                        other => CliError::Usage(other.to_string()),
                    })?
                }
            };
            std::fs::write(&args.out, stego_img.to_pgm()).map_err(|e| io_err(&args.out, e))?;
            if !cli.quiet {
                eprintln!("embedded with {} into {}", args.method, args.out.display());
            }
            Ok(())
        }
        Command::Extract(args) => {
            let stego_img = load_image(&args.stego)?;
            match args.method.mapping() {
                Some(mapping) => {
                    let secret = stego::extract(
                        &stego_img,
                        &EmbedConfig {
                            method: mapping,
                            seed: cli.seed,
                        },
                    )
                    .map_err(from_stego_error)?;
                    std::fs::write(&args.out, secret.to_pgm()).map_err(|e| io_err(&args.out, e))?;
                }
                None => {
                    let n_bits = args
                        .n_bits
                        .ok_or_else(|| CliError::Usage("baseline methods need --n-bits".into()))?;
                    let bits = match args.method {
                        Method::Lsbmr => baselines::lsbmr_extract(&stego_img, n_bits, cli.seed),
                        _ => baselines::lsbr_extract(&stego_img, n_bits, cli.seed),
                    }
                    .map_err(|e| CliError::Parse(e.to_string()))?;
                    std::fs::write(&args.out, bits.as_bytes()).map_err(|e| io_err(&args.out, e))?;
                }
            }
            if !cli.quiet {
                eprintln!("extracted into {}", args.out.display());
            }
            Ok(())
        }
        Command::Analyze(args) => {
            let img = load_image(&args.input)?;
            let report = steganalysis::analyze(&img, args.detector, args.threshold);
            let verdict = report.verdict.map(|v| v.name()).unwrap_or("-");
            let estimate = if report.estimate.is_nan() {
                "nan".to_string()
            } else {
                format!("{:.6}", report.estimate)
            };
            println!(
                "{},{},{},{},{}",
                args.input.display(),
                report.detector,
                estimate,
                verdict,
                report.variant
            );
            Ok(())
        }
        Command::Bench(args) => {
            let mut cfg = bench::BenchConfig::new(args.covers, args.secrets);
            if !args.methods.is_empty() {
                cfg.methods = args.methods;
            }
            if !args.rates.is_empty() {
                cfg.rates = args.rates;
            }
            if !args.detectors.is_empty() {
                cfg.detectors = args.detectors;
            }
            cfg.seed = cli.seed;
            cfg.jobs = args.jobs;
            let csv = bench::run(&cfg).map_err(|e| match e {
                bench::BenchError::InvalidConfig(_) => CliError::Usage(e.to_string()),
                bench::BenchError::Io { .. } => CliError::Io(e.to_string()),
            })?;
            std::fs::write(&args.out, csv.as_bytes()).map_err(|e| io_err(&args.out, e))?;
            if !cli.quiet {
                eprintln!("wrote {}", args.out.display());
            }
            Ok(())
        }
        Command::Fixtures(args) => {
            let names =
                fixtures::write_demo_corpus(&args.out_dir).map_err(|e| io_err(&args.out_dir, e))?;
            if !cli.quiet {
                for name in names {
                    eprintln!("{}", args.out_dir.join(name).display());
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successes, anything else is usage
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if is_help {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
