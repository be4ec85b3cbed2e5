//! Steganalysis of LSB-substitution steganography in images.
//!
//! The detector splits the blue channel into bit layers and judges every
//! pixel with two weighted multi-criteria rules: one over the 3×3
//! neighborhood in the LSB plane, one comparing the analyzed bit against
//! the windows of bit layers 1–3. A pixel marked by either rule lands in a
//! binary spoof matrix; a change-point extractor then recovers the bounding
//! box of the embedded region from the matrix's marginal densities.
//!
//! The crate also ships a stego lab (synthetic containers and a
//! rectangular-region LSB embedder with ground-truth records), a chi-square
//! pairs-of-values baseline attack, and the `stegascan` binary tying them
//! together. Each capability has a runnable example under `examples/`.

pub mod ahp;
pub mod bitplane;
pub mod chi2;
pub mod cli;
pub mod detector;
pub mod error;
pub mod stego;

pub use ahp::{
    combine, corner_match_count, criterion_weights, decide, mean_deviation, side_match_count,
    upper_layer_scores, zero_layer_scores, AhpParams, CriterionInputs, Decision, LayerWeights,
    Scores,
};
pub use bitplane::{
    extract_layer, load_image, window_at, BitLayer, BitMatrix, Channel, PixelGrid, Window3x3,
};
pub use chi2::{chi_square_attack, Chi2Report};
pub use detector::{
    compare_truth, detect, detect_channel, detect_sequential, detect_with_diagnostics, localize,
    localize_with, BorderPolicy, BoundingBox, DensityReport, DetectionMetrics, HierarchyCounts,
    Localization, SpoofMatrix, DEFAULT_TAU_MIN,
};
pub use error::{Error, Result};
pub use stego::{
    bits_to_text, change_rate, embed_lsb, extract_lsb, gradient_image, random_payload,
    seeded_region, shapes_image, text_to_bits, EmbedRecord,
};
