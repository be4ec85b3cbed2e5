//! Command implementations behind the `stegascan` binary.
//!
//! Each command is a plain function over a typed argument struct so the
//! pipeline can be scripted from tests and examples as well as from the
//! binary. All artifacts are deterministic given (inputs, seed, flags);
//! wall-clock timing appears only in detect reports, never in experiment
//! summaries.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::ahp::AhpParams;
use crate::bitplane::{load_image, Channel, PixelGrid};
use crate::chi2::{chi_square_attack, Chi2Report};
use crate::detector::{
    compare_truth, detect_channel, detect_with_diagnostics, localize_with, BoundingBox,
    DetectionMetrics, HierarchyCounts, SpoofMatrix, DEFAULT_TAU_MIN,
};
use crate::error::{Error, Result};
use crate::stego::{
    embed_lsb, gradient_image, random_payload, seeded_region, shapes_image, text_to_bits,
};

/// Detect and localize LSB-substitution steganography in images.
#[derive(Debug, Parser)]
#[command(name = "stegascan", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic container image.
    Generate(GenerateArgs),
    /// Embed a payload into the blue-channel LSBs of a rectangular region.
    Embed(EmbedArgs),
    /// Scan an image and localize a suspected insert.
    Detect(DetectArgs),
    /// Run the chi-square pairs-of-values baseline.
    Chi2(Chi2Args),
    /// Sweep the importance ratios (n, k) over a synthetic corpus.
    Calibrate(CalibrateArgs),
    /// Reproduce the full benchmark: embed, detect, score, baseline.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Container kind: gradient or shapes.
    #[arg(long, value_parser = ["gradient", "shapes"])]
    pub kind: String,
    #[arg(long, default_value_t = 640)]
    pub width: usize,
    #[arg(long, default_value_t = 480)]
    pub height: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output PNG path.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output_dir: PathBuf,
    /// Embedding region as x,y,w,h (left, top, width, height).
    #[arg(long, conflicts_with = "fill_rate")]
    pub region: Option<String>,
    /// Fraction of the image area to cover with a seeded square region.
    #[arg(long, default_value_t = 0.18)]
    pub fill_rate: f64,
    /// File whose bytes become the payload bit stream (MSB first).
    #[arg(long, conflicts_with = "payload_text")]
    pub payload_file: Option<PathBuf>,
    /// Literal payload text (UTF-8, MSB first).
    #[arg(long)]
    pub payload_text: Option<String>,
    /// Seed for region placement and the random payload fallback.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output_dir: PathBuf,
    /// Importance of side agreement over corner agreement.
    #[arg(long, default_value_t = 2.0)]
    pub n: f64,
    /// Importance of corner agreement over mean deviation.
    #[arg(long, default_value_t = 2.0)]
    pub k: f64,
    /// Absence gate of the localizer.
    #[arg(long, default_value_t = DEFAULT_TAU_MIN)]
    pub tau_min: f64,
    #[arg(long, default_value = "blue")]
    pub channel: Channel,
}

#[derive(Debug, Args)]
pub struct Chi2Args {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output_dir: PathBuf,
    #[arg(long, default_value = "blue")]
    pub channel: Channel,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub output_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Lattice of values swept for both n and k.
    #[arg(long, default_value = "1,1.5,2,3,5")]
    pub lattice: String,
    /// Seeded trials per container per (n, k) pair.
    #[arg(long, default_value_t = 3)]
    pub trials: u64,
    #[arg(long, default_value_t = DEFAULT_TAU_MIN)]
    pub tau_min: f64,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub output_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2.0)]
    pub n: f64,
    #[arg(long, default_value_t = 2.0)]
    pub k: f64,
    #[arg(long, default_value_t = DEFAULT_TAU_MIN)]
    pub tau_min: f64,
    /// Optional photographic container to run alongside the synthetic ones.
    #[arg(long)]
    pub photo: Option<PathBuf>,
}

/// Dispatch a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(args) => {
            let path = cmd_generate(&args)?;
            println!("wrote {}", path.display());
        }
        Command::Embed(args) => {
            let out = cmd_embed(&args)?;
            println!(
                "embedded {} bits, change rate {:.4}; wrote {}",
                out.payload_bits, out.change_rate, args.output_dir.display()
            );
        }
        Command::Detect(args) => {
            let report = cmd_detect(&args)?;
            println!(
                "insert_found: {} (contrast {:.2}); wrote {}",
                report.insert_found, report.contrast, args.output_dir.display()
            );
        }
        Command::Chi2(args) => {
            let report = cmd_chi2(&args)?;
            println!("chi2 detected: {}; wrote {}", report.detected, args.output_dir.display());
        }
        Command::Calibrate(args) => {
            let out = cmd_calibrate(&args)?;
            println!(
                "recommended (n, k) = ({}, {}) with F1 {:.4}; wrote {}",
                out.recommended.n, out.recommended.k, out.recommended.f1, args.output_dir.display()
            );
        }
        Command::Experiment(args) => {
            let summary = cmd_experiment(&args)?;
            for c in &summary.containers {
                println!(
                    "{}: insert_found={} edge_error_max={} chi2_detected={}",
                    c.name, c.insert_found_stego, c.edge_error_max, c.chi2_detected_stego
                );
            }
            println!("wrote {}", args.output_dir.display());
        }
    }
    Ok(())
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<PathBuf> {
    if args.width < 3 || args.height < 3 {
        return Err(Error::invalid("container must be at least 3x3"));
    }
    let grid = match args.kind.as_str() {
        "gradient" => gradient_image(args.width, args.height),
        "shapes" => shapes_image(args.width, args.height, args.seed),
        other => return Err(Error::invalid(format!("unknown container kind '{other}'"))),
    };
    if let Some(parent) = args.output.parent() {
        ensure_dir(parent)?;
    }
    grid.save_png(&args.output)?;
    Ok(args.output.clone())
}

#[derive(Debug, Serialize)]
pub struct EmbedOutcome {
    pub stego_path: PathBuf,
    pub record_path: PathBuf,
    pub payload_bits: usize,
    pub change_rate: f64,
    pub region: BoundingBox,
}

pub fn cmd_embed(args: &EmbedArgs) -> Result<EmbedOutcome> {
    let grid = load_image(&args.input)?;
    let region = match &args.region {
        Some(spec) => parse_region(spec, grid.width(), grid.height())?,
        None => {
            if !(args.fill_rate > 0.0 && args.fill_rate < 1.0) {
                return Err(Error::invalid(format!(
                    "fill rate {} out of range (0, 1)",
                    args.fill_rate
                )));
            }
            let side = ((args.fill_rate * grid.pixel_count() as f64).sqrt() as usize).max(1);
            seeded_region(grid.width(), grid.height(), side, side, args.seed)?
        }
    };
    let payload = if let Some(path) = &args.payload_file {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        bytes_to_bits(&bytes)
    } else if let Some(text) = &args.payload_text {
        text_to_bits(text)
    } else {
        random_payload(region.area(), args.seed.wrapping_add(1))
    };
    let (stego, record) = embed_lsb(&grid, &payload, &region)?;

    ensure_dir(&args.output_dir)?;
    let stego_path = args.output_dir.join("stego.png");
    let record_path = args.output_dir.join("record.json");
    stego.save_png(&stego_path)?;
    write_text(&record_path, &record.to_json())?;
    Ok(EmbedOutcome {
        stego_path,
        record_path,
        payload_bits: record.payload_bits().len(),
        change_rate: record.change_rate(),
        region: *record.region(),
    })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DetectReport {
    pub input: PathBuf,
    pub width: usize,
    pub height: usize,
    pub params: ReportParams,
    pub insert_found: bool,
    pub bounding_box: BoundingBox,
    pub inside_density: f64,
    pub outside_density: f64,
    pub contrast: f64,
    pub positives_total: usize,
    pub hierarchy_counts: HierarchyCounts,
    pub timing_ms: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ReportParams {
    pub n: f64,
    pub k: f64,
    pub tau_min: f64,
    pub channel: Channel,
}

pub fn cmd_detect(args: &DetectArgs) -> Result<DetectReport> {
    let params = AhpParams::new(args.n, args.k)?;
    check_tau(args.tau_min)?;
    let grid = load_image(&args.input)?;
    let started = Instant::now();
    let (matrix, counts) = detect_with_diagnostics(&grid, &params, args.channel)?;
    let loc = localize_with(&matrix, args.tau_min);
    let timing_ms = started.elapsed().as_secs_f64() * 1e3;

    ensure_dir(&args.output_dir)?;
    write_mask_png(&matrix, &args.output_dir.join("mask.png"))?;
    write_mask_pgm(&matrix, &args.output_dir.join("mask.pgm"))?;
    let report = DetectReport {
        input: args.input.clone(),
        width: grid.width(),
        height: grid.height(),
        params: ReportParams { n: args.n, k: args.k, tau_min: args.tau_min, channel: args.channel },
        insert_found: loc.insert_found,
        bounding_box: loc.bounding_box,
        inside_density: loc.report.inside_density,
        outside_density: loc.report.outside_density,
        contrast: loc.report.contrast,
        positives_total: loc.report.positives_total,
        hierarchy_counts: counts,
        timing_ms,
    };
    write_text(
        &args.output_dir.join("report.json"),
        &serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    Ok(report)
}

pub fn cmd_chi2(args: &Chi2Args) -> Result<Chi2Report> {
    let grid = load_image(&args.input)?;
    let report = chi_square_attack(&grid, args.channel);
    ensure_dir(&args.output_dir)?;
    write_text(
        &args.output_dir.join("chi2.json"),
        &serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    let mut csv = String::from("fraction,p_value\n");
    for (f, p) in report.sample_fractions.iter().zip(&report.p_values) {
        let _ = writeln!(csv, "{f},{p}");
    }
    write_text(&args.output_dir.join("chi2.csv"), &csv)?;
    Ok(report)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub n: f64,
    pub k: f64,
    pub f1: f64,
    pub mean_edge_error: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CalibrationOutcome {
    pub rows: Vec<CalibrationRow>,
    pub recommended: CalibrationRow,
}

pub fn cmd_calibrate(args: &CalibrateArgs) -> Result<CalibrationOutcome> {
    check_tau(args.tau_min)?;
    let lattice = parse_lattice(&args.lattice)?;
    if args.trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }

    // Fixed corpus: both synthetic containers, square region at 18% area.
    let (w, h) = (640usize, 480usize);
    let side = ((0.18 * (w * h) as f64).sqrt()) as usize;
    let mut corpus = Vec::new();
    for trial in 0..args.trials {
        let seed = args.seed.wrapping_add(trial);
        for grid in [gradient_image(w, h), shapes_image(w, h, seed)] {
            let region = seeded_region(w, h, side, side, seed.wrapping_add(101))?;
            let payload = random_payload(region.area(), seed.wrapping_add(202));
            corpus.push(embed_lsb(&grid, &payload, &region)?);
        }
    }

    let mut rows = Vec::new();
    for &n in &lattice {
        for &k in &lattice {
            let params = AhpParams::new(n, k)?;
            let mut f1_sum = 0.0;
            let mut edge_sum = 0.0;
            for (stego, record) in &corpus {
                let matrix = detect_channel(stego, &params, Channel::Blue)?;
                let metrics = compare_truth(&matrix, record)?;
                f1_sum += metrics.f1;
                edge_sum += metrics.edge_error_max as f64;
            }
            let count = corpus.len() as f64;
            rows.push(CalibrationRow {
                n,
                k,
                f1: f1_sum / count,
                mean_edge_error: edge_sum / count,
            });
        }
    }
    rows.sort_by(|a, b| {
        b.f1.partial_cmp(&a.f1)
            .unwrap()
            .then(a.mean_edge_error.partial_cmp(&b.mean_edge_error).unwrap())
    });
    let recommended = rows[0];

    ensure_dir(&args.output_dir)?;
    let mut csv = String::from("rank,n,k,f1,mean_edge_error\n");
    for (rank, row) in rows.iter().enumerate() {
        let _ = writeln!(csv, "{},{},{},{},{}", rank + 1, row.n, row.k, row.f1, row.mean_edge_error);
    }
    write_text(&args.output_dir.join("calibrate.csv"), &csv)?;
    let outcome = CalibrationOutcome { rows, recommended };
    write_text(
        &args.output_dir.join("calibrate.json"),
        &serde_json::to_string_pretty(&outcome).expect("outcome serializes"),
    )?;
    Ok(outcome)
}

/// Payload used by the experiment: Russian text, repeated to fill the region.
const EXPERIMENT_TEXT: &str = "Съешь же ещё этих мягких французских булок, да выпей чаю. ";

#[derive(Debug, Serialize, Deserialize)]
pub struct ContainerResult {
    pub name: String,
    pub truth_region: BoundingBox,
    pub change_rate: f64,
    pub insert_found_clean: bool,
    pub insert_found_stego: bool,
    pub detected_box: BoundingBox,
    pub edge_errors: [usize; 4],
    pub edge_error_max: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub chi2_detected_clean: bool,
    pub chi2_detected_stego: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub seed: u64,
    pub containers: Vec<ContainerResult>,
}

pub fn cmd_experiment(args: &ExperimentArgs) -> Result<ExperimentSummary> {
    let params = AhpParams::new(args.n, args.k)?;
    check_tau(args.tau_min)?;
    ensure_dir(&args.output_dir)?;
    let (w, h) = (640usize, 480usize);

    let mut containers: Vec<(String, PixelGrid)> = vec![
        ("gradient".into(), gradient_image(w, h)),
        ("shapes".into(), shapes_image(w, h, args.seed)),
    ];
    if let Some(photo) = &args.photo {
        containers.push(("photo".into(), load_image(photo)?));
    }

    let mut summary = ExperimentSummary { seed: args.seed, containers: Vec::new() };
    for (idx, (name, clean)) in containers.iter().enumerate() {
        let dir = args.output_dir.join(name);
        ensure_dir(&dir)?;
        let salt = args.seed.wrapping_add(idx as u64 * 1000);

        let (region, payload) = size_region_for_target_flips(clean, salt)?;
        let (stego, record) = embed_lsb(clean, &payload, &region)?;

        clean.save_png(dir.join("clean.png"))?;
        stego.save_png(dir.join("stego.png"))?;
        write_text(&dir.join("record.json"), &record.to_json())?;

        let matrix_clean = detect_channel(clean, &params, Channel::Blue)?;
        let matrix_stego = detect_channel(&stego, &params, Channel::Blue)?;
        write_mask_png(&matrix_clean, &dir.join("matrix_clean.png"))?;
        write_mask_png(&matrix_stego, &dir.join("matrix_stego.png"))?;

        let loc_clean = localize_with(&matrix_clean, args.tau_min);
        let loc_stego = localize_with(&matrix_stego, args.tau_min);
        let metrics: DetectionMetrics = compare_truth(&matrix_stego, &record)?;
        let chi_clean = chi_square_attack(clean, Channel::Blue);
        let chi_stego = chi_square_attack(&stego, Channel::Blue);

        summary.containers.push(ContainerResult {
            name: name.clone(),
            truth_region: *record.region(),
            change_rate: record.change_rate(),
            insert_found_clean: loc_clean.insert_found,
            insert_found_stego: loc_stego.insert_found,
            detected_box: loc_stego.bounding_box,
            edge_errors: metrics.edge_errors,
            edge_error_max: metrics.edge_error_max,
            precision: metrics.precision,
            recall: metrics.recall,
            f1: metrics.f1,
            chi2_detected_clean: chi_clean.detected,
            chi2_detected_stego: chi_stego.detected,
        });
    }
    write_text(
        &args.output_dir.join("summary.json"),
        &serde_json::to_string_pretty(&summary).expect("summary serializes"),
    )?;
    Ok(summary)
}

/// Pick a 4:3 region whose text payload changes ~9% of all pixels.
///
/// The text's bit stream is biased, and how many writes actually flip a bit
/// depends on the container LSBs under the region, so the flip count is
/// measured directly and the area rescaled toward the target. Deterministic:
/// placement is re-drawn from the same seed at every size.
fn size_region_for_target_flips(clean: &PixelGrid, salt: u64) -> Result<(BoundingBox, Vec<u8>)> {
    const TARGET_RATE: f64 = 0.09;
    let text_bits = text_to_bits(EXPERIMENT_TEXT);
    let total = clean.pixel_count() as f64;
    let mut area = 2.0 * TARGET_RATE * total;
    let mut best: Option<(BoundingBox, Vec<u8>)> = None;
    for _ in 0..8 {
        let rw = ((area * 4.0 / 3.0).sqrt()) as usize;
        let rh = ((area * 3.0 / 4.0).sqrt()) as usize;
        let region = seeded_region(clean.width(), clean.height(), rw, rh, salt)?;
        let payload: Vec<u8> = text_bits.iter().copied().cycle().take(region.area()).collect();
        let mut flips = 0usize;
        let mut bits = payload.iter();
        for i in region.top..=region.bottom {
            for j in region.left..=region.right {
                let lsb = clean.channel_value(i, j, Channel::Blue) & 1;
                if *bits.next().expect("payload fills region") != lsb {
                    flips += 1;
                }
            }
        }
        let rate = flips as f64 / total;
        best = Some((region, payload));
        if (rate - TARGET_RATE).abs() / TARGET_RATE < 0.02 {
            break;
        }
        if flips == 0 {
            area *= 2.0;
        } else {
            area *= TARGET_RATE / rate;
        }
        area = area.clamp(0.02 * total, 0.45 * total);
    }
    Ok(best.expect("at least one sizing iteration"))
}

/// 1 cells render white on black, the figure convention for matrix plots.
pub fn write_mask_png(matrix: &SpoofMatrix, path: &Path) -> Result<()> {
    let mut img = image::GrayImage::new(matrix.width() as u32, matrix.height() as u32);
    for i in 0..matrix.height() {
        for j in 0..matrix.width() {
            let v = if matrix.get(i, j) == 1 { 255u8 } else { 0 };
            img.put_pixel(j as u32, i as u32, image::Luma([v]));
        }
    }
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::format(path, e.to_string()))
}

/// Binary PGM (P5) alternate of the mask for toolchain-free inspection.
pub fn write_mask_pgm(matrix: &SpoofMatrix, path: &Path) -> Result<()> {
    let mut out = Vec::with_capacity(matrix.width() * matrix.height() + 32);
    out.extend_from_slice(format!("P5\n{} {}\n255\n", matrix.width(), matrix.height()).as_bytes());
    out.extend(matrix.bits().iter().map(|&b| if b == 1 { 255u8 } else { 0 }));
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&out).map_err(|e| Error::io(path, e))
}

fn bytes_to_bits(bytes: &[u8]) -> Vec<u8> {
    bytes
        .iter()
        .flat_map(|&byte| (0..8).rev().map(move |shift| (byte >> shift) & 1))
        .collect()
}

fn parse_region(spec: &str, width: usize, height: usize) -> Result<BoundingBox> {
    let parts: Vec<usize> = spec
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::invalid(format!("bad region '{spec}': {e}")))?;
    let [x, y, w, h] = parts[..] else {
        return Err(Error::invalid(format!("region '{spec}' must be x,y,w,h")));
    };
    if w == 0 || h == 0 {
        return Err(Error::invalid("region width and height must be positive"));
    }
    if x + w > width || y + h > height {
        return Err(Error::invalid(format!(
            "region {spec} exceeds the {width}x{height} image"
        )));
    }
    BoundingBox::new(y, x, y + h - 1, x + w - 1)
}

fn parse_lattice(spec: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = spec
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::invalid(format!("bad lattice '{spec}': {e}")))?;
    if values.is_empty() || values.iter().any(|&v| !(v.is_finite() && v > 0.0)) {
        return Err(Error::invalid(format!("lattice '{spec}' must be positive numbers")));
    }
    Ok(values)
}

fn check_tau(tau_min: f64) -> Result<()> {
    if !(tau_min > 0.0 && tau_min < 1.0) {
        return Err(Error::invalid(format!("tau_min {tau_min} out of range (0, 1)")));
    }
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
