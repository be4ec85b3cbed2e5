//! Chi-square pairs-of-values attack, the statistical baseline.
//!
//! LSB embedding tends to equalize the histogram counts of value pairs
//! (2m, 2m+1). The attack scans row-major prefixes of the image (1%, 2%,
//! ..., 100% of pixels), and for each prefix computes the chi-square
//! statistic of the even-indexed counts against the pair means. A high
//! upper-tail p-value means the pairs are as equal as embedding would make
//! them.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::bitplane::{Channel, PixelGrid};

/// Pairs with fewer than this many total samples are excluded from the
/// statistic to avoid near-zero expected counts.
const MIN_PAIR_COUNT: usize = 5;

/// p >= this value counts as "embedding-like" at one prefix step.
const P_DETECT: f64 = 0.95;

/// The verdict requires the p-value to stay embedding-like over at least
/// this fraction of the pixels (five consecutive 1% steps).
const SUSTAIN_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chi2Report {
    /// Scanned prefix sizes as fractions of the pixel count (0.01..=1.00).
    pub sample_fractions: Vec<f64>,
    /// Upper-tail p-value per prefix.
    pub p_values: Vec<f64>,
    /// True when the p-value stayed >= 0.95 over >= 5% of the pixels.
    pub detected: bool,
}

fn p_value(histogram: &[usize; 256]) -> f64 {
    let mut statistic = 0.0;
    let mut qualifying = 0usize;
    for m in 0..128 {
        let even = histogram[2 * m];
        let total = even + histogram[2 * m + 1];
        if total >= MIN_PAIR_COUNT {
            let expected = total as f64 / 2.0;
            let diff = even as f64 - expected;
            statistic += diff * diff / expected;
            qualifying += 1;
        }
    }
    if qualifying < 2 {
        // Not enough pairs to form a test; no evidence of embedding.
        return 0.0;
    }
    let dist = ChiSquared::new((qualifying - 1) as f64).expect("positive degrees of freedom");
    dist.sf(statistic)
}

/// Run the sequential pairs-of-values attack on one channel.
pub fn chi_square_attack(grid: &PixelGrid, channel: Channel) -> Chi2Report {
    let total = grid.pixel_count();
    let values: Vec<u8> = (0..grid.height())
        .flat_map(|i| (0..grid.width()).map(move |j| grid.channel_value(i, j, channel)))
        .collect();

    let mut histogram = [0usize; 256];
    let mut consumed = 0usize;
    let mut fractions = Vec::with_capacity(100);
    let mut p_values = Vec::with_capacity(100);
    for step in 1..=100u32 {
        let fraction = step as f64 / 100.0;
        let upto = ((fraction * total as f64).round() as usize).min(total);
        while consumed < upto {
            histogram[values[consumed] as usize] += 1;
            consumed += 1;
        }
        fractions.push(fraction);
        p_values.push(p_value(&histogram));
    }

    let need = (SUSTAIN_FRACTION * 100.0).round() as usize;
    let mut run = 0usize;
    let mut longest = 0usize;
    for &p in &p_values {
        run = if p >= P_DETECT { run + 1 } else { 0 };
        longest = longest.max(run);
    }
    Chi2Report { sample_fractions: fractions, p_values, detected: longest >= need }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stego;

    /// 40x30 image cycling the values 6, 7, 40, 41: every 1% prefix holds a
    /// multiple of four pixels, so both pairs stay exactly balanced and above
    /// the qualifying count.
    fn balanced_pairs_grid() -> PixelGrid {
        const CYCLE: [u8; 4] = [6, 7, 40, 41];
        PixelGrid::from_fn(40, 30, |i, j| [0, 0, CYCLE[(i * 40 + j) % 4]])
    }

    #[test]
    fn balanced_pairs_give_p_one_everywhere() {
        let report = chi_square_attack(&balanced_pairs_grid(), Channel::Blue);
        assert_eq!(report.p_values.len(), 100);
        for (f, p) in report.sample_fractions.iter().zip(&report.p_values) {
            assert_eq!(*p, 1.0, "fraction {f}");
        }
        assert!(report.detected);
    }

    #[test]
    fn skewed_histogram_scores_low() {
        // Flat color: pair (200, 201) is maximally unbalanced.
        let grid = PixelGrid::filled(40, 30, [0, 0, 200]);
        let report = chi_square_attack(&grid, Channel::Blue);
        assert!(!report.detected);
        assert!(report.p_values[99] < 0.05);
    }

    #[test]
    fn p_values_invariant_under_prefix_permutation() {
        let grid = stego::shapes_image(64, 48, 11);
        let base = chi_square_attack(&grid, Channel::Blue);

        // Reverse the first half and the second half independently; the 50%
        // and 100% prefixes keep their histograms.
        let total = grid.pixel_count();
        let values: Vec<[u8; 3]> = (0..total)
            .map(|idx| grid.get(idx / 64, idx % 64))
            .collect();
        let half = total / 2;
        let mut permuted = values.clone();
        permuted[..half].reverse();
        permuted[half..].reverse();
        let shuffled = PixelGrid::from_fn(64, 48, |i, j| permuted[i * 64 + j]);
        let perm = chi_square_attack(&shuffled, Channel::Blue);

        assert_eq!(base.p_values[49], perm.p_values[49]);
        assert_eq!(base.p_values[99], perm.p_values[99]);
    }

    #[test]
    fn fully_randomized_gradient_is_detected() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let grid = stego::gradient_image(320, 240);
        let randomized = PixelGrid::from_fn(320, 240, |i, j| {
            let mut px = grid.get(i, j);
            px[2] = (px[2] & !1) | rng.random_range(0..=1u8);
            px
        });
        let report = chi_square_attack(&randomized, Channel::Blue);
        assert!(report.detected);
    }
}
