//! Weight formulas and per-pixel decision procedures.
//!
//! Two fixed hierarchies decide whether a pixel's blue LSB looks substituted.
//!
//! The LSB-plane hierarchy scores three criteria over the 3×3 window around
//! the analyzed bit: side-neighbor agreement, corner-neighbor agreement, and
//! deviation from the neighborhood mean. Criterion weights come from the
//! importance ratios `n` (criterion 1 over 2) and `k` (criterion 2 over 3)
//! via the consistent pairwise-comparison matrix, giving
//! `r = (nk, k, 1) / (nk + k + 1)`.
//!
//! The upper-layer hierarchy scores the same three criteria in the windows
//! of bit layers 1–3, each compared against the analyzed LSB-plane bit, with
//! fixed layer weights `t = (4/7, 2/7, 1/7)` and equal within-layer weights
//! `s_i = 1/3`.
//!
//! Both hierarchies yield a pair of weights summing to 1; a pixel is judged
//! spoofed when the YES weight strictly exceeds the NO weight. Ties go to NO.

use crate::bitplane::Window3x3;
use crate::error::{Error, Result};

/// Importance ratios of the LSB-plane criteria.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AhpParams {
    n: f64,
    k: f64,
}

impl AhpParams {
    pub fn new(n: f64, k: f64) -> Result<Self> {
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::invalid(format!("importance ratio n must be positive, got {n}")));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::invalid(format!("importance ratio k must be positive, got {k}")));
        }
        Ok(AhpParams { n, k })
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn k(&self) -> f64 {
        self.k
    }
}

impl Default for AhpParams {
    /// (2, 2): each criterion twice as important as the next, mirroring the
    /// fixed 2× ratio between adjacent upper layers.
    fn default() -> Self {
        AhpParams { n: 2.0, k: 2.0 }
    }
}

/// Criterion weights `(r1, r2, r3) = (nk, k, 1) / (nk + k + 1)`.
pub fn criterion_weights(params: &AhpParams) -> [f64; 3] {
    let (n, k) = (params.n, params.k);
    let denom = n * k + k + 1.0;
    [n * k / denom, k / denom, 1.0 / denom]
}

/// Fixed weights of the upper-layer hierarchy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerWeights {
    pub t: [f64; 3],
    pub s: [f64; 3],
}

impl Default for LayerWeights {
    fn default() -> Self {
        LayerWeights {
            t: [4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0],
            s: [1.0 / 3.0; 3],
        }
    }
}

/// Per-pixel criterion measurements: side matches, corner matches, and the
/// deviation of the analyzed bit from its neighborhood mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionInputs {
    side_matches: u8,
    corner_matches: u8,
    mean_dev: f64,
}

impl CriterionInputs {
    pub fn new(side_matches: u8, corner_matches: u8, mean_dev: f64) -> Result<Self> {
        if side_matches > 4 {
            return Err(Error::invalid(format!("side match count {side_matches} out of range 0..=4")));
        }
        if corner_matches > 4 {
            return Err(Error::invalid(format!("corner match count {corner_matches} out of range 0..=4")));
        }
        if !(0.0..=1.0).contains(&mean_dev) {
            return Err(Error::invalid(format!("mean deviation {mean_dev} out of range [0, 1]")));
        }
        Ok(CriterionInputs { side_matches, corner_matches, mean_dev })
    }

    /// Measure a window: matches against its own center bit, deviation of the
    /// center from the mean of the eight surrounding bits.
    pub fn from_window(w: &Window3x3) -> Self {
        let neighbors: Vec<u8> = w.sides.iter().chain(w.corners.iter()).copied().collect();
        CriterionInputs {
            side_matches: side_match_count(w),
            corner_matches: corner_match_count(w),
            mean_dev: mean_deviation(w.center, &neighbors).expect("eight neighbors"),
        }
    }

    pub fn side_matches(&self) -> u8 {
        self.side_matches
    }

    pub fn corner_matches(&self) -> u8 {
        self.corner_matches
    }

    pub fn mean_dev(&self) -> f64 {
        self.mean_dev
    }
}

/// Aggregate weights of the two decisions; always sums to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub yes: f64,
    pub no: f64,
}

/// Verdict for one pixel under one hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    /// The analyzed bit looks substituted.
    Spoofed,
    /// No substitution indicated.
    Clean,
}

/// Count of side bits equal to the window center.
pub fn side_match_count(w: &Window3x3) -> u8 {
    w.side_matches(w.center)
}

/// Count of corner bits equal to the window center.
pub fn corner_match_count(w: &Window3x3) -> u8 {
    w.corner_matches(w.center)
}

/// `|reference - mean(neighborhood)|`.
pub fn mean_deviation(reference_bit: u8, neighborhood: &[u8]) -> Result<f64> {
    if neighborhood.is_empty() {
        return Err(Error::invalid("mean deviation over an empty neighborhood"));
    }
    let mean = neighborhood.iter().map(|&b| b as f64).sum::<f64>() / neighborhood.len() as f64;
    Ok((reference_bit as f64 - mean).abs())
}

/// LSB-plane hierarchy: `yes = r1 (4-x)/4 + r2 (4-y)/4 + r3 dc`, `no = 1 - yes`.
pub fn zero_layer_scores(inputs: &CriterionInputs, params: &AhpParams) -> Scores {
    let [r1, r2, r3] = criterion_weights(params);
    let x = inputs.side_matches as f64;
    let y = inputs.corner_matches as f64;
    let yes = r1 * (4.0 - x) / 4.0 + r2 * (4.0 - y) / 4.0 + r3 * inputs.mean_dev;
    Scores { yes, no: 1.0 - yes }
}

/// Upper-layer hierarchy over the layer 1–3 windows at the analyzed position.
///
/// Matches are counted against `zero_bit`, not the windows' own centers; the
/// deviation compares `zero_bit` with the mean of all nine window bits.
pub fn upper_layer_scores(zero_bit: u8, windows: &[Window3x3; 3], weights: &LayerWeights) -> Scores {
    let mut yes = 0.0;
    for (idx, w) in windows.iter().enumerate() {
        let x = w.side_matches(zero_bit) as f64;
        let y = w.corner_matches(zero_bit) as f64;
        let dc = (zero_bit as f64 - w.total() as f64 / 9.0).abs();
        let p1 = (4.0 - x) / 4.0;
        let p2 = (4.0 - y) / 4.0;
        yes += weights.t[idx] * (weights.s[0] * p1 + weights.s[1] * p2 + weights.s[2] * dc);
    }
    Scores { yes, no: 1.0 - yes }
}

/// Spoofed iff the YES weight strictly exceeds the NO weight.
pub fn decide(scores: &Scores) -> Decision {
    if scores.yes > scores.no {
        Decision::Spoofed
    } else {
        Decision::Clean
    }
}

/// Final cell value: 1 when either hierarchy says spoofed.
pub fn combine(zero_layer: Decision, upper_layer: Decision) -> u8 {
    if zero_layer == Decision::Spoofed || upper_layer == Decision::Spoofed {
        1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitplane::Window3x3;

    fn approx(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn weights_equal_importance() {
        let w = criterion_weights(&AhpParams::new(1.0, 1.0).unwrap());
        approx(w[0], 1.0 / 3.0);
        approx(w[1], 1.0 / 3.0);
        approx(w[2], 1.0 / 3.0);
    }

    #[test]
    fn weights_default_params() {
        let w = criterion_weights(&AhpParams::default());
        approx(w[0], 4.0 / 7.0);
        approx(w[1], 2.0 / 7.0);
        approx(w[2], 1.0 / 7.0);
    }

    #[test]
    fn weights_n3_k2() {
        let w = criterion_weights(&AhpParams::new(3.0, 2.0).unwrap());
        approx(w[0], 2.0 / 3.0);
        approx(w[1], 2.0 / 9.0);
        approx(w[2], 1.0 / 9.0);
    }

    #[test]
    fn params_reject_nonpositive() {
        assert!(AhpParams::new(0.0, 1.0).is_err());
        assert!(AhpParams::new(1.0, -2.0).is_err());
        assert!(AhpParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn side_and_corner_counts() {
        let all_match = Window3x3 { center: 1, sides: [1; 4], corners: [1; 4] };
        assert_eq!(side_match_count(&all_match), 4);
        assert_eq!(corner_match_count(&all_match), 4);

        let none = Window3x3 { center: 1, sides: [0; 4], corners: [0; 4] };
        assert_eq!(side_match_count(&none), 0);

        // up/down equal, left/right differ
        let split = Window3x3 { center: 1, sides: [1, 1, 0, 0], corners: [0; 4] };
        assert_eq!(side_match_count(&split), 2);

        let one_corner = Window3x3 { center: 1, sides: [0; 4], corners: [1, 0, 0, 0] };
        assert_eq!(corner_match_count(&one_corner), 1);

        // checkerboard: corners match the center
        let checker = Window3x3 { center: 1, sides: [0; 4], corners: [1; 4] };
        assert_eq!(corner_match_count(&checker), 4);
    }

    #[test]
    fn mean_deviation_extremes() {
        // dc = 0 -> p3 = 0, q3 = 1
        approx(mean_deviation(1, &[1; 8]).unwrap(), 0.0);
        // dc = 1 -> p3 = 1, q3 = 0
        approx(mean_deviation(1, &[0; 8]).unwrap(), 1.0);
        approx(mean_deviation(0, &[1, 1, 1, 1, 0, 0, 0, 0]).unwrap(), 0.5);
        assert!(mean_deviation(1, &[]).is_err());
    }

    #[test]
    fn zero_layer_extremes() {
        let params = AhpParams::new(1.7, 0.4).unwrap();
        let spoofed = zero_layer_scores(&CriterionInputs::new(0, 0, 1.0).unwrap(), &params);
        approx(spoofed.yes, 1.0);
        approx(spoofed.no, 0.0);
        let regular = zero_layer_scores(&CriterionInputs::new(4, 4, 0.0).unwrap(), &params);
        approx(regular.yes, 0.0);
        approx(regular.no, 1.0);
    }

    #[test]
    fn zero_layer_hand_evaluated() {
        // x=2, y=2, dc=0.25 with (n,k)=(2,2): yes = 3.25/7
        let s = zero_layer_scores(
            &CriterionInputs::new(2, 2, 0.25).unwrap(),
            &AhpParams::default(),
        );
        approx(s.yes, 3.25 / 7.0);
        assert_eq!(decide(&s), Decision::Clean);
    }

    #[test]
    fn upper_layer_full_agreement_and_disagreement() {
        let weights = LayerWeights::default();
        let agree = Window3x3 { center: 1, sides: [1; 4], corners: [1; 4] };
        let s = upper_layer_scores(1, &[agree; 3], &weights);
        approx(s.yes, 0.0);
        approx(s.no, 1.0);

        let disagree = Window3x3 { center: 0, sides: [0; 4], corners: [0; 4] };
        let s = upper_layer_scores(1, &[disagree; 3], &weights);
        approx(s.yes, 1.0);
    }

    #[test]
    fn upper_layer_t_weight_arithmetic() {
        // layer 1 agrees fully, layers 2 and 3 disagree fully: yes = 2/7 + 1/7
        let weights = LayerWeights::default();
        let agree = Window3x3 { center: 1, sides: [1; 4], corners: [1; 4] };
        let disagree = Window3x3 { center: 0, sides: [0; 4], corners: [0; 4] };
        let s = upper_layer_scores(1, &[agree, disagree, disagree], &weights);
        approx(s.yes, 3.0 / 7.0);
        assert_eq!(decide(&s), Decision::Clean);
    }

    #[test]
    fn decide_tie_goes_clean() {
        assert_eq!(decide(&Scores { yes: 0.6, no: 0.4 }), Decision::Spoofed);
        assert_eq!(decide(&Scores { yes: 0.5, no: 0.5 }), Decision::Clean);
        assert_eq!(decide(&Scores { yes: 3.25 / 7.0, no: 3.75 / 7.0 }), Decision::Clean);
    }

    #[test]
    fn combine_is_or() {
        use Decision::*;
        assert_eq!(combine(Clean, Clean), 0);
        assert_eq!(combine(Spoofed, Clean), 1);
        assert_eq!(combine(Clean, Spoofed), 1);
        assert_eq!(combine(Spoofed, Spoofed), 1);
    }

    #[test]
    fn criterion_inputs_validation() {
        assert!(CriterionInputs::new(5, 0, 0.0).is_err());
        assert!(CriterionInputs::new(0, 5, 0.0).is_err());
        assert!(CriterionInputs::new(0, 0, 1.5).is_err());
        assert!(CriterionInputs::new(4, 4, 1.0).is_ok());
    }
}
