//! Corpus experiment runner.
//!
//! Three phases over directories of PGM files, all emitted into one CSV with
//! a `record` discriminator column: `transform` rows measure the zero-ratio
//! gain of SIM/IWSIM per secret image, `embed` rows measure capacity,
//! efficiency, quality and the change-probability prediction per
//! (cover, secret, method, rate), and `detect` rows run the detectors on
//! covers and stegos. Aggregate rows (`*_agg`) carry corpus statistics.
//!
//! Identical configurations over identical corpora produce byte-identical
//! CSV: inputs are read in sorted name order, every stochastic choice flows
//! from the config seed, and work parallelized over rows is collected back
//! in task order. Detector rows embed the smallest secret of the corpus into
//! every cover; cells whose payload does not fit become warning records.
//!
//! Partial-rate rows embed a prefix of the full message: the 32-bit header
//! plus all side-information bits are always accounted for, and the code
//! stream is truncated to floor(rate x code bits). The round-trip flag at
//! partial rates checks bit-exact recovery of the embedded prefix; at rate
//! 1.0 it additionally requires the reconstructed secret image to be
//! identical.

use crate::baselines;
use crate::bitstream::BitStream;
use crate::image::GrayImage;
use crate::metrics;
use crate::steganalysis::{self, Detector};
use crate::stego::{self, MappingTable};
use crate::Method;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const CSV_SCHEMA: &str = "stegmap-bench-v1";

const COLUMNS: &[&str] = &[
    "schema",
    "record",
    "file",
    "cover",
    "secret",
    "method",
    "transform",
    "detector",
    "rate",
    "stat",
    "zero_before",
    "zero_after",
    "side_bits",
    "capacity",
    "payload_bits",
    "modified_fraction",
    "predicted_fraction",
    "ee",
    "psnr_db",
    "roundtrip_ok",
    "estimate",
    "raw_estimate",
    "verdict",
    "variant",
    "note",
];

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid bench config: {0}")]
    InvalidConfig(&'static str),
    #[error("cannot read directory {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub cover_dir: PathBuf,
    pub secret_dir: PathBuf,
    pub methods: Vec<Method>,
    pub rates: Vec<f64>,
    pub detectors: Vec<Detector>,
    pub seed: u64,
    /// Worker threads; 0 means one per logical core.
    pub jobs: usize,
}

impl BenchConfig {
    pub fn new(cover_dir: PathBuf, secret_dir: PathBuf) -> Self {
        BenchConfig {
            cover_dir,
            secret_dir,
            methods: Method::ALL.to_vec(),
            rates: vec![0.2, 0.4, 0.6, 0.8, 1.0],
            detectors: Detector::ALL.to_vec(),
            seed: 0,
            jobs: 0,
        }
    }

    fn validate(&self) -> Result<(), BenchError> {
        if self.methods.is_empty() {
            return Err(BenchError::InvalidConfig("at least one method required"));
        }
        if self.rates.is_empty() || self.rates.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
            return Err(BenchError::InvalidConfig("rates must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// One CSV row; unused fields stay empty.
#[derive(Debug, Clone, Default)]
struct Row {
    record: &'static str,
    file: String,
    cover: String,
    secret: String,
    method: String,
    transform: String,
    detector: String,
    rate: String,
    stat: String,
    zero_before: String,
    zero_after: String,
    side_bits: String,
    capacity: String,
    payload_bits: String,
    modified_fraction: String,
    predicted_fraction: String,
    ee: String,
    psnr_db: String,
    roundtrip_ok: String,
    estimate: String,
    raw_estimate: String,
    verdict: String,
    variant: String,
    note: String,
}

impl Row {
    fn line(&self) -> String {
        [
            CSV_SCHEMA,
            self.record,
            &self.file,
            &self.cover,
            &self.secret,
            &self.method,
            &self.transform,
            &self.detector,
            &self.rate,
            &self.stat,
            &self.zero_before,
            &self.zero_after,
            &self.side_bits,
            &self.capacity,
            &self.payload_bits,
            &self.modified_fraction,
            &self.predicted_fraction,
            &self.ee,
            &self.psnr_db,
            &self.roundtrip_ok,
            &self.estimate,
            &self.raw_estimate,
            &self.verdict,
            &self.variant,
            &self.note,
        ]
        .join(",")
    }
}

fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.6}")
    }
}

/// Load every `.pgm` in a directory, sorted by file name. Unreadable entries
/// become warning notes instead of failures.
pub fn load_corpus(dir: &Path) -> Result<(Vec<(String, GrayImage)>, Vec<String>), BenchError> {
    let entries = std::fs::read_dir(dir).map_err(|source| BenchError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut names: Vec<String> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".pgm"))
        .collect();
    names.sort();
    let mut images = Vec::new();
    let mut warnings = Vec::new();
    for name in names {
        let path = dir.join(&name);
        match std::fs::read(&path) {
            Ok(bytes) => match GrayImage::from_pgm(&bytes) {
                Ok(img) => images.push((name, img)),
                Err(e) => warnings.push(format!("{name}: {e}")),
            },
            Err(e) => warnings.push(format!("{name}: {e}")),
        }
    }
    Ok((images, warnings))
}

struct Aggregate {
    mu: f64,
    sigma: f64,
    min: f64,
    max: f64,
}

fn aggregate(values: &[f64]) -> Aggregate {
    let n = values.len() as f64;
    let mu = values.iter().sum::<f64>() / n;
    let sigma = (values.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / n).sqrt();
    Aggregate {
        mu,
        sigma,
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

fn transform_rows(secrets: &[(String, GrayImage)]) -> Vec<Row> {
    let per_image: Vec<[Row; 3]> = secrets
        .iter()
        .map(|(name, img)| {
            let raw = BitStream::from_bytes(img.pixels());
            let raw_ratio = raw.zero_ratio().unwrap();

            let none = Row {
                record: "transform",
                file: name.clone(),
                transform: "none".into(),
                zero_before: fmt_f64(raw_ratio),
                zero_after: fmt_f64(raw_ratio),
                side_bits: "0".into(),
                ..Row::default()
            };
            let enc = crate::sim::sim_forward(img);
            let sim = Row {
                record: "transform",
                file: name.clone(),
                transform: "sim".into(),
                zero_before: fmt_f64(raw_ratio),
                zero_after: fmt_f64(enc.payload.zero_ratio().unwrap()),
                side_bits: enc.side_info.len().to_string(),
                ..Row::default()
            };
            let enc = crate::iwsim::iwsim_encode(img);
            let iwsim = Row {
                record: "transform",
                file: name.clone(),
                transform: "iwsim".into(),
                zero_before: fmt_f64(raw_ratio),
                zero_after: fmt_f64(enc.code_zero_bits as f64 / enc.code_bits as f64),
                side_bits: enc.side_bits.to_string(),
                ..Row::default()
            };
            [none, sim, iwsim]
        })
        .collect();

    let mut rows: Vec<Row> = per_image.iter().flatten().cloned().collect();
    for transform in ["none", "sim", "iwsim"] {
        let selected: Vec<&Row> = rows
            .iter()
            .filter(|r| r.record == "transform" && r.transform == transform)
            .collect();
        if selected.is_empty() {
            continue;
        }
        let parse = |field: fn(&Row) -> &String| -> Vec<f64> {
            selected
                .iter()
                .map(|r| field(r).parse::<f64>().unwrap())
                .collect()
        };
        let before = aggregate(&parse(|r| &r.zero_before));
        let after = aggregate(&parse(|r| &r.zero_after));
        let side = aggregate(&parse(|r| &r.side_bits));
        for (stat, b, a, s) in [
            ("mu", before.mu, after.mu, side.mu),
            ("sigma", before.sigma, after.sigma, side.sigma),
            ("min", before.min, after.min, side.min),
            ("max", before.max, after.max, side.max),
        ] {
            rows.push(Row {
                record: "transform_agg",
                transform: transform.into(),
                stat: stat.into(),
                zero_before: fmt_f64(b),
                zero_after: fmt_f64(a),
                side_bits: fmt_f64(s),
                ..Row::default()
            });
        }
    }
    rows
}

/// Build the stego image for one (cover, secret, method, rate) cell, along
/// with the bits that went in. Returns an error note when the payload does
/// not fit.
fn build_stego(
    cover: &GrayImage,
    secret: &GrayImage,
    method: Method,
    rate: f64,
    seed: u64,
) -> Result<(GrayImage, BitStream, f64), String> {
    match method.mapping() {
        Some(mapping) => {
            let scheme = mapping.scheme();
            let table = MappingTable::for_scheme(&scheme).map_err(|e| e.to_string())?;
            let (message, stats) =
                stego::build_message(secret, mapping).map_err(|e| e.to_string())?;
            let keep = stego::HEADER_BITS
                + stats.side_bits
                + (rate * stats.code_bits as f64).floor() as usize;
            let bits = message.prefix(keep.min(message.len()));
            let form = stego::select_form(cover, &scheme);
            let stego_img = stego::embed_bits(cover, &bits, &scheme, &table, seed)
                .map_err(|e| e.to_string())?;
            Ok((stego_img, bits, stego::working_zero_lsb_ratio(&form)))
        }
        None => {
            let full = BitStream::from_bytes(secret.pixels());
            let capacity_bits = match method {
                Method::Lsbmr => {
                    let usable = cover
                        .pixels()
                        .iter()
                        .filter(|&&v| v != 0 && v != 255)
                        .count();
                    (usable / 2) * 2
                }
                _ => cover.pixels().len(),
            };
            let mut keep = ((rate * capacity_bits as f64).floor() as usize).min(full.len());
            if method == Method::Lsbmr {
                keep &= !1;
            }
            let bits = full.prefix(keep);
            let stego_img = match method {
                Method::Lsbr => baselines::lsbr_embed(cover, &bits, seed),
                Method::Lsbm => baselines::lsbm_embed(cover, &bits, seed),
                Method::Lsbmr => baselines::lsbmr_embed(cover, &bits, seed),
                _ => unreachable!(),
            }
            .map_err(|e| e.to_string())?;
            let cover_lsb_zero = cover.pixels().iter().filter(|&&v| v & 1 == 0).count() as f64
                / cover.pixels().len() as f64;
            Ok((stego_img, bits, cover_lsb_zero))
        }
    }
}

fn verify_roundtrip(
    cover_stego: &GrayImage,
    bits: &BitStream,
    secret: &GrayImage,
    method: Method,
    rate: f64,
    seed: u64,
) -> bool {
    let prefix_ok = match method.mapping() {
        Some(mapping) => {
            let scheme = mapping.scheme();
            let table = match MappingTable::for_scheme(&scheme) {
                Ok(t) => t,
                Err(_) => return false,
            };
            let extracted = stego::extract_bits(cover_stego, &scheme, &table, seed);
            extracted.len() >= bits.len()
                && (0..bits.len()).all(|i| extracted.bit(i) == bits.bit(i))
        }
        None => {
            let extracted = match method {
                Method::Lsbmr => baselines::lsbmr_extract(cover_stego, bits.len(), seed),
                _ => baselines::lsbr_extract(cover_stego, bits.len(), seed),
            };
            extracted.is_ok_and(|e| e == *bits)
        }
    };
    if !prefix_ok {
        return false;
    }
    if rate >= 1.0 {
        if let Some(mapping) = method.mapping() {
            let cfg = stego::EmbedConfig {
                method: mapping,
                seed,
            };
            return stego::extract(cover_stego, &cfg).is_ok_and(|img| img == *secret);
        }
    }
    true
}

fn embed_rows(
    covers: &[(String, GrayImage)],
    secrets: &[(String, GrayImage)],
    cfg: &BenchConfig,
) -> Vec<Row> {
    use rayon::prelude::*;
    let mut tasks = Vec::new();
    for (cover_name, cover) in covers {
        for (secret_name, secret) in secrets {
            for &method in &cfg.methods {
                for &rate in &cfg.rates {
                    tasks.push((cover_name, cover, secret_name, secret, method, rate));
                }
            }
        }
    }
    tasks
        .par_iter()
        .map(|(cover_name, cover, secret_name, secret, method, rate)| {
            let mut row = Row {
                record: "embed",
                cover: (*cover_name).clone(),
                secret: (*secret_name).clone(),
                method: method.to_string(),
                rate: fmt_f64(*rate),
                capacity: fmt_f64(metrics::capacity(*method, cover)),
                ..Row::default()
            };
            match build_stego(cover, secret, *method, *rate, cfg.seed) {
                Ok((stego_img, bits, cover_zero_ratio)) => {
                    let stats = metrics::EmbedStats::measure(
                        cover,
                        &stego_img,
                        bits.len(),
                        metrics::capacity(*method, cover),
                    );
                    row.payload_bits = stats.payload_bits.to_string();
                    row.modified_fraction =
                        fmt_f64(stats.modified_pixels as f64 / stats.payload_bits.max(1) as f64);
                    if *method != Method::Lsbmr {
                        let r0 = bits.zero_ratio().unwrap_or(0.5);
                        row.predicted_fraction =
                            fmt_f64(metrics::expected_change_prob(r0, cover_zero_ratio));
                    }
                    row.ee = fmt_f64(stats.ee);
                    row.psnr_db = fmt_f64(stats.psnr_db);
                    row.roundtrip_ok =
                        verify_roundtrip(&stego_img, &bits, secret, *method, *rate, cfg.seed)
                            .to_string();
                }
                Err(note) => {
                    row.roundtrip_ok = "false".into();
                    row.note = note.replace(',', ";");
                }
            }
            row
        })
        .collect()
}

fn detect_rows(
    covers: &[(String, GrayImage)],
    secrets: &[(String, GrayImage)],
    cfg: &BenchConfig,
) -> Vec<Row> {
    use rayon::prelude::*;
    if cfg.detectors.is_empty() {
        return Vec::new();
    }

    // clean covers first, then every (cover, method, rate) stego
    let mut tasks: Vec<(String, GrayImage, String, String)> = covers
        .iter()
        .map(|(name, img)| {
            (
                name.clone(),
                img.clone(),
                "cover".to_string(),
                String::new(),
            )
        })
        .collect();
    // every cover carries the smallest secret, the one most likely to fit
    let (_, secret) = secrets
        .iter()
        .min_by_key(|(name, img)| (img.pixels().len(), name.clone()))
        .expect("corpus is nonempty");
    let mut rows: Vec<Row> = Vec::new();
    for (cover_name, cover) in covers.iter() {
        for &method in &cfg.methods {
            for &rate in &cfg.rates {
                match build_stego(cover, secret, method, rate, cfg.seed) {
                    Ok((stego_img, _, _)) => tasks.push((
                        cover_name.clone(),
                        stego_img,
                        method.to_string(),
                        fmt_f64(rate),
                    )),
                    Err(note) => rows.push(Row {
                        record: "warning",
                        cover: cover_name.clone(),
                        method: method.to_string(),
                        rate: fmt_f64(rate),
                        note: note.replace(',', ";"),
                        ..Row::default()
                    }),
                }
            }
        }
    }

    let detect: Vec<Row> = tasks
        .par_iter()
        .flat_map(|(cover_name, img, method, rate)| {
            cfg.detectors
                .par_iter()
                .map(|&detector| {
                    let report =
                        steganalysis::analyze(img, detector, steganalysis::LSBMS_DEFAULT_THRESHOLD);
                    Row {
                        record: "detect",
                        cover: cover_name.clone(),
                        method: method.clone(),
                        rate: rate.clone(),
                        detector: detector.to_string(),
                        estimate: fmt_f64(report.estimate),
                        raw_estimate: fmt_f64(report.raw),
                        verdict: report
                            .verdict
                            .map(|v| v.name().to_string())
                            .unwrap_or_default(),
                        variant: report.variant.into(),
                        note: if report.degenerate {
                            "degenerate".into()
                        } else {
                            String::new()
                        },
                        ..Row::default()
                    }
                })
                .collect::<Vec<Row>>()
        })
        .collect();

    // aggregates per (method, rate, detector)
    let mut keys: Vec<(String, String, String)> = detect
        .iter()
        .map(|r| (r.method.clone(), r.rate.clone(), r.detector.clone()))
        .collect();
    keys.sort();
    keys.dedup();
    let mut agg_rows = Vec::new();
    for (method, rate, detector) in keys {
        let group: Vec<&Row> = detect
            .iter()
            .filter(|r| r.method == method && r.rate == rate && r.detector == detector)
            .collect();
        // detectors that could not produce an estimate stay out of the mean
        let estimates: Vec<f64> = group
            .iter()
            .filter_map(|r| r.estimate.parse::<f64>().ok())
            .filter(|e| !e.is_nan())
            .collect();
        let mean = if estimates.is_empty() {
            f64::NAN
        } else {
            estimates.iter().sum::<f64>() / estimates.len() as f64
        };
        let detected = group
            .iter()
            .filter(|r| {
                if r.detector == "lsbms" {
                    r.verdict == "stego"
                } else {
                    r.estimate.parse::<f64>().is_ok_and(|e| e > 0.05)
                }
            })
            .count() as f64
            / group.len() as f64;
        for (stat, value) in [("mean", mean), ("detected_fraction", detected)] {
            agg_rows.push(Row {
                record: "detect_agg",
                method: method.clone(),
                rate: rate.clone(),
                detector: detector.clone(),
                stat: stat.into(),
                estimate: fmt_f64(value),
                ..Row::default()
            });
        }
    }
    rows.extend(detect);
    rows.extend(agg_rows);
    rows
}

/// Run all phases and return the CSV text.
pub fn run(cfg: &BenchConfig) -> Result<String, BenchError> {
    cfg.validate()?;
    let (covers, cover_warnings) = load_corpus(&cfg.cover_dir)?;
    let (secrets, secret_warnings) = load_corpus(&cfg.secret_dir)?;
    if secrets.is_empty() {
        return Err(BenchError::InvalidConfig(
            "secret directory has no readable images",
        ));
    }
    if covers.is_empty() {
        return Err(BenchError::InvalidConfig(
            "cover directory has no readable images",
        ));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .expect("thread pool");

    let mut rows: Vec<Row> = Vec::new();
    for warning in cover_warnings.iter().chain(&secret_warnings) {
        rows.push(Row {
            record: "warning",
            note: warning.replace(',', ";"),
            ..Row::default()
        });
    }
    rows.extend(transform_rows(&secrets));
    let (embed, detect) = pool.install(|| {
        (
            embed_rows(&covers, &secrets, cfg),
            detect_rows(&covers, &secrets, cfg),
        )
    });
    rows.extend(embed);
    rows.extend(detect);

    let mut csv = String::new();
    writeln!(csv, "{}", COLUMNS.join(",")).unwrap();
    for row in &rows {
        writeln!(csv, "{}", row.line()).unwrap();
    }
    Ok(csv)
}
