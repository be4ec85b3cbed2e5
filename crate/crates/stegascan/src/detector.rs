//! Full-image scan, region localization, and evaluation metrics.
//!
//! [`detect`] runs both decision hierarchies over every interior pixel and
//! ORs the verdicts into a [`SpoofMatrix`]. Work per pixel is constant, so a
//! scan is linear in the pixel count; rows are independent, which makes the
//! band-parallel scan bit-identical to the sequential one.
//!
//! [`localize`] recovers the embedded rectangle from the matrix with a
//! deterministic change-point extractor over row/column marginal densities,
//! robust to a structured false-positive baseline (containers whose upper
//! bit layers disagree with the LSB plane over uniform areas light up in
//! coherent stripes; the embedded region differs from that baseline rather
//! than from zero).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ahp::{
    self, AhpParams, CriterionInputs, Decision, LayerWeights,
};
use crate::bitplane::{extract_layer, window_at, BitLayer, Channel, PixelGrid};
use crate::error::{Error, Result};
use crate::stego::EmbedRecord;

/// Border cells carry no verdict and are fixed to 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BorderPolicy {
    UndecidedZero,
}

/// Per-pixel verdict matrix; 1 marks a pixel judged to have a substituted LSB.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpoofMatrix {
    width: usize,
    height: usize,
    bits: Vec<u8>,
    border_policy: BorderPolicy,
}

impl SpoofMatrix {
    pub fn zeros(width: usize, height: usize) -> Self {
        SpoofMatrix {
            width,
            height,
            bits: vec![0; width * height],
            border_policy: BorderPolicy::UndecidedZero,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn border_policy(&self) -> BorderPolicy {
        self.border_policy
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.bits[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.bits[row * self.width + col] = value;
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn count_positives(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }
}

/// Inclusive pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub top: usize,
    pub left: usize,
    pub bottom: usize,
    pub right: usize,
}

impl BoundingBox {
    pub fn new(top: usize, left: usize, bottom: usize, right: usize) -> Result<Self> {
        if top > bottom || left > right {
            return Err(Error::invalid(format!(
                "degenerate bounding box ({top}, {left})..({bottom}, {right})"
            )));
        }
        Ok(BoundingBox { top, left, bottom, right })
    }

    pub fn full_frame(width: usize, height: usize) -> Self {
        BoundingBox { top: 0, left: 0, bottom: height.saturating_sub(1), right: width.saturating_sub(1) }
    }

    pub fn width(&self) -> usize {
        self.right - self.left + 1
    }

    pub fn height(&self) -> usize {
        self.bottom - self.top + 1
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        row >= self.top && row <= self.bottom && col >= self.left && col <= self.right
    }

    /// Per-edge absolute differences (top, left, bottom, right).
    pub fn edge_errors(&self, other: &BoundingBox) -> [usize; 4] {
        [
            self.top.abs_diff(other.top),
            self.left.abs_diff(other.left),
            self.bottom.abs_diff(other.bottom),
            self.right.abs_diff(other.right),
        ]
    }
}

/// Positive densities inside and outside the localized box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub inside_density: f64,
    pub outside_density: f64,
    pub contrast: f64,
    pub positives_total: usize,
}

/// Result of [`localize`]: the box, its density report, and whether an
/// insert was found at all. When nothing qualifies the box degenerates to
/// the full frame and `contrast <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Localization {
    pub bounding_box: BoundingBox,
    pub report: DensityReport,
    pub insert_found: bool,
}

/// Positive counts contributed by each hierarchy, for diagnostics output.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierarchyCounts {
    pub zero_layer_positives: usize,
    pub upper_layer_positives: usize,
}

struct LayerSet {
    layers: [BitLayer; 4],
}

impl LayerSet {
    fn build(grid: &PixelGrid, channel: Channel) -> Result<Self> {
        Ok(LayerSet {
            layers: [
                extract_layer(grid, channel, 0)?,
                extract_layer(grid, channel, 1)?,
                extract_layer(grid, channel, 2)?,
                extract_layer(grid, channel, 3)?,
            ],
        })
    }

    /// Both verdicts for one interior pixel. Always evaluates the two
    /// hierarchies; the scores are wanted for diagnostics even when the
    /// first one already fires.
    fn decide_pixel(&self, row: usize, col: usize, params: &AhpParams, weights: &LayerWeights) -> (Decision, Decision) {
        let w0 = window_at(&self.layers[0], row, col).expect("interior pixel");
        let zero = ahp::decide(&ahp::zero_layer_scores(&CriterionInputs::from_window(&w0), params));
        let windows = [
            window_at(&self.layers[1], row, col).expect("interior pixel"),
            window_at(&self.layers[2], row, col).expect("interior pixel"),
            window_at(&self.layers[3], row, col).expect("interior pixel"),
        ];
        let upper = ahp::decide(&ahp::upper_layer_scores(w0.center, &windows, weights));
        (zero, upper)
    }
}

fn check_size(grid: &PixelGrid) -> Result<()> {
    if grid.width() < 3 || grid.height() < 3 {
        return Err(Error::invalid(format!(
            "detection needs at least a 3x3 image, got {}x{}",
            grid.width(),
            grid.height()
        )));
    }
    Ok(())
}

/// Scan the blue channel with the given parameters (band-parallel).
pub fn detect(grid: &PixelGrid, params: &AhpParams) -> Result<SpoofMatrix> {
    detect_channel(grid, params, Channel::Blue)
}

/// Scan an arbitrary channel (band-parallel over row bands).
pub fn detect_channel(grid: &PixelGrid, params: &AhpParams, channel: Channel) -> Result<SpoofMatrix> {
    check_size(grid)?;
    let layers = LayerSet::build(grid, channel)?;
    let weights = LayerWeights::default();
    let (w, h) = (grid.width(), grid.height());
    let mut matrix = SpoofMatrix::zeros(w, h);
    // Each worker owns one output row; the layer set is shared read-only.
    matrix
        .bits
        .par_chunks_mut(w)
        .enumerate()
        .for_each(|(i, row_bits)| {
            if i == 0 || i + 1 == h {
                return;
            }
            for (j, cell) in row_bits.iter_mut().enumerate().take(w - 1).skip(1) {
                let (zero, upper) = layers.decide_pixel(i, j, params, &weights);
                *cell = ahp::combine(zero, upper);
            }
        });
    Ok(matrix)
}

/// Sequential scan; produces bit-identical output to [`detect_channel`].
pub fn detect_sequential(grid: &PixelGrid, params: &AhpParams, channel: Channel) -> Result<SpoofMatrix> {
    check_size(grid)?;
    let layers = LayerSet::build(grid, channel)?;
    let weights = LayerWeights::default();
    let (w, h) = (grid.width(), grid.height());
    let mut matrix = SpoofMatrix::zeros(w, h);
    for i in 1..h - 1 {
        for j in 1..w - 1 {
            let (zero, upper) = layers.decide_pixel(i, j, params, &weights);
            matrix.set(i, j, ahp::combine(zero, upper));
        }
    }
    Ok(matrix)
}

/// Scan plus per-hierarchy positive counts for diagnostics.
pub fn detect_with_diagnostics(
    grid: &PixelGrid,
    params: &AhpParams,
    channel: Channel,
) -> Result<(SpoofMatrix, HierarchyCounts)> {
    check_size(grid)?;
    let layers = LayerSet::build(grid, channel)?;
    let weights = LayerWeights::default();
    let (w, h) = (grid.width(), grid.height());
    let mut matrix = SpoofMatrix::zeros(w, h);
    let mut counts = HierarchyCounts::default();
    for i in 1..h - 1 {
        for j in 1..w - 1 {
            let (zero, upper) = layers.decide_pixel(i, j, params, &weights);
            counts.zero_layer_positives += (zero == Decision::Spoofed) as usize;
            counts.upper_layer_positives += (upper == Decision::Spoofed) as usize;
            matrix.set(i, j, ahp::combine(zero, upper));
        }
    }
    Ok((matrix, counts))
}

/// Default absence gate of the localizer.
pub const DEFAULT_TAU_MIN: f64 = 0.05;

// Edge refinement: accept the first position whose next EDGE_RUN values all
// clear the low threshold, searched within EDGE_SEARCH of the coarse edge.
const EDGE_SEARCH: usize = 8;
const EDGE_RUN: usize = 3;
const THRESH_FRACTION: f64 = 0.25;
const REFINE_ITERS: usize = 2;

/// Deterministic two-class split of a 1D series (k-means, k=2, initialized
/// at the extremes). Returns the class centers `(low, high)`.
fn two_means(vals: &[f64]) -> (f64, f64) {
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi - lo).is_finite() || hi - lo < 1e-15 {
        return (lo, hi);
    }
    let (mut c0, mut c1) = (lo, hi);
    for _ in 0..64 {
        let (mut s0, mut n0, mut s1, mut n1) = (0.0, 0usize, 0.0, 0usize);
        for &v in vals {
            if (v - c0).abs() <= (v - c1).abs() {
                s0 += v;
                n0 += 1;
            } else {
                s1 += v;
                n1 += 1;
            }
        }
        if n0 == 0 || n1 == 0 {
            break;
        }
        let (m0, m1) = (s0 / n0 as f64, s1 / n1 as f64);
        if (m0 - c0).abs() < 1e-12 && (m1 - c1).abs() < 1e-12 {
            return (m0, m1);
        }
        c0 = m0;
        c1 = m1;
    }
    (c0, c1)
}

/// Maximal-sum contiguous segment (Kadane); None when no positive segment exists.
fn max_sum_segment(vals: &[f64]) -> Option<(usize, usize)> {
    let mut best = f64::NEG_INFINITY;
    let (mut bs, mut be) = (0usize, 0usize);
    let mut cur = 0.0;
    let mut cs = 0usize;
    for (i, &v) in vals.iter().enumerate() {
        if cur <= 0.0 {
            cur = v;
            cs = i;
        } else {
            cur += v;
        }
        if cur > best {
            best = cur;
            bs = cs;
            be = i;
        }
    }
    (best > 0.0).then_some((bs, be))
}

/// Segment extraction on one marginal series: absence gate, coarse Kadane
/// segment, then threshold-crossing edge refinement.
fn extract_segment(vals: &[f64], tau_min: f64) -> Option<(usize, usize)> {
    let (c0, c1) = two_means(vals);
    if c1 - c0 < tau_min {
        return None;
    }
    let mid = (c0 + c1) / 2.0;
    let shifted: Vec<f64> = vals.iter().map(|v| v - mid).collect();
    let (mut a, mut b) = max_sum_segment(&shifted)?;
    let theta = c0 + THRESH_FRACTION * (c1 - c0);
    let above: Vec<bool> = vals.iter().map(|&v| v > theta).collect();
    let n = vals.len();

    let run_starts_at = |e: usize| e + EDGE_RUN <= n && above[e..e + EDGE_RUN].iter().all(|&f| f);
    let run_ends_at = |e: usize| e + 1 >= EDGE_RUN && above[e + 1 - EDGE_RUN..=e].iter().all(|&f| f);

    let (a0, b0) = (a, b);
    for e in a0.saturating_sub(EDGE_SEARCH)..=(a0 + EDGE_SEARCH).min(n - 1) {
        if run_starts_at(e) {
            a = e;
            break;
        }
    }
    for e in (b0.saturating_sub(EDGE_SEARCH)..=(b0 + EDGE_SEARCH).min(n - 1)).rev() {
        if run_ends_at(e) {
            b = e;
            break;
        }
    }
    if a > b {
        a = a0;
        b = b0;
    }
    Some((a, b))
}

struct Marginals<'a> {
    m: &'a SpoofMatrix,
}

impl<'a> Marginals<'a> {
    // All densities are over interior cells only; border cells carry no verdict.
    fn interior_rows(&self) -> std::ops::Range<usize> {
        1..self.m.height() - 1
    }

    fn interior_cols(&self) -> std::ops::Range<usize> {
        1..self.m.width() - 1
    }

    fn row_densities(&self) -> Vec<f64> {
        let w = (self.m.width() - 2) as f64;
        self.interior_rows()
            .map(|i| self.interior_cols().map(|j| self.m.get(i, j) as usize).sum::<usize>() as f64 / w)
            .collect()
    }

    /// Per-column |in-band - out-of-band| density difference for a row band.
    fn col_deltas(&self, row_band: (usize, usize)) -> Vec<f64> {
        let (rt, rb) = row_band;
        let n_in = (rb - rt + 1) as f64;
        let n_out = (self.m.height() - 2) as f64 - n_in;
        self.interior_cols()
            .map(|j| {
                let s_in: usize = (rt..=rb).map(|i| self.m.get(i, j) as usize).sum();
                let s_all: usize = self.interior_rows().map(|i| self.m.get(i, j) as usize).sum();
                let d_in = s_in as f64 / n_in;
                let d_out = if n_out > 0.0 { (s_all - s_in) as f64 / n_out } else { 0.0 };
                (d_in - d_out).abs()
            })
            .collect()
    }

    /// Per-row |in-band - out-of-band| density difference for a column band.
    fn row_deltas(&self, col_band: (usize, usize)) -> Vec<f64> {
        let (cl, cr) = col_band;
        let n_in = (cr - cl + 1) as f64;
        let n_out = (self.m.width() - 2) as f64 - n_in;
        self.interior_rows()
            .map(|i| {
                let s_in: usize = (cl..=cr).map(|j| self.m.get(i, j) as usize).sum();
                let s_all: usize = self.interior_cols().map(|j| self.m.get(i, j) as usize).sum();
                let d_in = s_in as f64 / n_in;
                let d_out = if n_out > 0.0 { (s_all - s_in) as f64 / n_out } else { 0.0 };
                (d_in - d_out).abs()
            })
            .collect()
    }
}

fn densities_for(matrix: &SpoofMatrix, bbox: &BoundingBox) -> DensityReport {
    let (mut s_in, mut n_in, mut s_out, mut n_out) = (0usize, 0usize, 0usize, 0usize);
    for i in 1..matrix.height() - 1 {
        for j in 1..matrix.width() - 1 {
            if bbox.contains(i, j) {
                s_in += matrix.get(i, j) as usize;
                n_in += 1;
            } else {
                s_out += matrix.get(i, j) as usize;
                n_out += 1;
            }
        }
    }
    let inside_density = if n_in > 0 { s_in as f64 / n_in as f64 } else { 0.0 };
    let outside_density = if n_out > 0 { s_out as f64 / n_out as f64 } else { 0.0 };
    // Outside floored to one count to keep the ratio finite.
    let floor = if n_out > 0 { 1.0 / n_out as f64 } else { 1.0 };
    let contrast = inside_density / outside_density.max(floor);
    DensityReport {
        inside_density,
        outside_density,
        contrast,
        positives_total: matrix.count_positives(),
    }
}

fn degenerate(matrix: &SpoofMatrix) -> Localization {
    let interior = ((matrix.width() - 2) * (matrix.height() - 2)) as f64;
    let global = matrix.count_positives() as f64 / interior.max(1.0);
    Localization {
        bounding_box: BoundingBox::full_frame(matrix.width(), matrix.height()),
        report: DensityReport {
            inside_density: global,
            outside_density: global,
            contrast: if global > 0.0 { 1.0 } else { 0.0 },
            positives_total: matrix.count_positives(),
        },
        insert_found: false,
    }
}

/// Localize the embedded region with the default absence gate.
pub fn localize(matrix: &SpoofMatrix) -> Localization {
    localize_with(matrix, DEFAULT_TAU_MIN)
}

/// Localize with an explicit absence gate `tau_min`.
///
/// Row pass on raw marginal densities, then alternating column/row passes on
/// band-differenced densities, which cancel any stationary per-column (or
/// per-row) false-positive pattern of the container.
pub fn localize_with(matrix: &SpoofMatrix, tau_min: f64) -> Localization {
    if matrix.width() < 3 || matrix.height() < 3 {
        return degenerate(matrix);
    }
    let marginals = Marginals { m: matrix };

    let Some(mut row_band) = extract_segment(&marginals.row_densities(), tau_min) else {
        return degenerate(matrix);
    };
    // Offsets below translate interior indices back to image coordinates.
    row_band = (row_band.0 + 1, row_band.1 + 1);

    let mut col_band = None;
    for _ in 0..REFINE_ITERS {
        let Some(seg) = extract_segment(&marginals.col_deltas(row_band), tau_min) else {
            return degenerate(matrix);
        };
        col_band = Some((seg.0 + 1, seg.1 + 1));
        if let Some(seg) = extract_segment(&marginals.row_deltas(col_band.unwrap()), tau_min) {
            row_band = (seg.0 + 1, seg.1 + 1);
        }
    }
    let col_band = col_band.expect("at least one refinement iteration");

    let bbox = BoundingBox {
        top: row_band.0,
        left: col_band.0,
        bottom: row_band.1,
        right: col_band.1,
    };
    Localization {
        bounding_box: bbox,
        report: densities_for(matrix, &bbox),
        insert_found: true,
    }
}

/// Confusion metrics against the flipped-cell ground truth plus per-edge
/// localization error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionMetrics {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub edge_errors: [usize; 4],
    pub edge_error_max: usize,
}

/// Compare a detection matrix against an embedding record.
pub fn compare_truth(matrix: &SpoofMatrix, truth: &EmbedRecord) -> Result<DetectionMetrics> {
    let flipped = truth.flipped_mask();
    if flipped.width() != matrix.width() || flipped.height() != matrix.height() {
        return Err(Error::DimensionMismatch {
            left: format!("{}x{}", matrix.width(), matrix.height()),
            right: format!("{}x{}", flipped.width(), flipped.height()),
        });
    }
    let (mut tp, mut fp, mut fne) = (0usize, 0usize, 0usize);
    for i in 0..matrix.height() {
        for j in 0..matrix.width() {
            match (matrix.get(i, j), flipped.get(i, j)) {
                (1, 1) => tp += 1,
                (1, 0) => fp += 1,
                (0, 1) => fne += 1,
                _ => {}
            }
        }
    }
    let precision = if tp + fp > 0 { tp as f64 / (tp + fp) as f64 } else { 0.0 };
    let recall = if tp + fne > 0 { tp as f64 / (tp + fne) as f64 } else { 0.0 };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    let loc = localize(matrix);
    let edge_errors = loc.bounding_box.edge_errors(truth.region());
    Ok(DetectionMetrics {
        true_positives: tp,
        false_positives: fp,
        false_negatives: fne,
        precision,
        recall,
        f1,
        edge_errors,
        edge_error_max: edge_errors.into_iter().max().unwrap_or(0),
    })
}
