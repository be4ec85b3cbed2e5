//! Property tests for the module invariants.

use proptest::prelude::*;

use stegascan::{
    change_rate, criterion_weights, decide, detect, detect_sequential, embed_lsb, extract_layer,
    extract_lsb, localize, upper_layer_scores, window_at, zero_layer_scores, AhpParams,
    BoundingBox, Channel, CriterionInputs, LayerWeights, PixelGrid, Scores, SpoofMatrix,
    Window3x3,
};

fn arb_params() -> impl Strategy<Value = AhpParams> {
    (0.05f64..20.0, 0.05f64..20.0).prop_map(|(n, k)| AhpParams::new(n, k).unwrap())
}

fn arb_window() -> impl Strategy<Value = Window3x3> {
    (0u8..=1, proptest::array::uniform4(0u8..=1), proptest::array::uniform4(0u8..=1))
        .prop_map(|(center, sides, corners)| Window3x3 { center, sides, corners })
}

fn arb_grid(max_w: usize, max_h: usize) -> impl Strategy<Value = PixelGrid> {
    (3..=max_w, 3..=max_h, any::<u64>()).prop_map(|(w, h, seed)| {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        PixelGrid::from_fn(w, h, |_, _| [rng.random(), rng.random(), rng.random()])
    })
}

proptest! {
    #[test]
    fn weights_sum_to_one_and_stay_positive(params in arb_params()) {
        let [r1, r2, r3] = criterion_weights(&params);
        prop_assert!((r1 + r2 + r3 - 1.0).abs() < 1e-12);
        prop_assert!(r1 > 0.0 && r2 > 0.0 && r3 > 0.0);
    }

    #[test]
    fn weights_descend_when_ratios_exceed_one(
        n in 1.0f64..20.0,
        k in 1.0f64..20.0,
    ) {
        let [r1, r2, r3] = criterion_weights(&AhpParams::new(n, k).unwrap());
        prop_assert!(r1 >= r2 && r2 >= r3);
    }

    /// The pairwise-comparison matrix built from (n, k) is consistent:
    /// every entry equals the ratio of the recovered weights.
    #[test]
    fn pairwise_matrix_is_rank_one(params in arb_params()) {
        let (n, k) = (params.n(), params.k());
        let matrix = [
            [1.0, n, k * n],
            [1.0 / n, 1.0, k],
            [1.0 / (k * n), 1.0 / k, 1.0],
        ];
        let r = criterion_weights(&params);
        for a in 0..3 {
            for b in 0..3 {
                prop_assert!((matrix[a][b] - r[a] / r[b]).abs() < 1e-9,
                    "entry ({a}, {b}): {} vs {}", matrix[a][b], r[a] / r[b]);
            }
        }
    }

    #[test]
    fn scores_normalized(
        params in arb_params(),
        x in 0u8..=4,
        y in 0u8..=4,
        dc in 0.0f64..=1.0,
        zero_bit in 0u8..=1,
        windows in proptest::array::uniform3(arb_window()),
    ) {
        let s = zero_layer_scores(&CriterionInputs::new(x, y, dc).unwrap(), &params);
        prop_assert!((s.yes + s.no - 1.0).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&s.yes));
        let s = upper_layer_scores(zero_bit, &windows, &LayerWeights::default());
        prop_assert!((s.yes + s.no - 1.0).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&s.yes));
    }

    /// Holding the other criteria fixed, the spoof weight strictly falls as
    /// matches increase and strictly rises with the mean deviation.
    #[test]
    fn zero_layer_scores_monotonic(
        params in arb_params(),
        x in 0u8..4,
        y in 0u8..4,
        dc in 0.0f64..0.9,
    ) {
        let yes = |x, y, dc| zero_layer_scores(&CriterionInputs::new(x, y, dc).unwrap(), &params).yes;
        prop_assert!(yes(x + 1, y, dc) < yes(x, y, dc));
        prop_assert!(yes(x, y + 1, dc) < yes(x, y, dc));
        prop_assert!(yes(x, y, dc + 0.1) > yes(x, y, dc));
    }

    /// Scaling both raw weights by a positive factor and renormalizing never
    /// changes the decision.
    #[test]
    fn decision_scale_invariant(yes in 0.0f64..=1.0, scale in 0.001f64..1000.0) {
        let original = Scores { yes, no: 1.0 - yes };
        let (sy, sn) = (yes * scale, (1.0 - yes) * scale);
        let renormalized = Scores { yes: sy / (sy + sn), no: sn / (sy + sn) };
        prop_assert_eq!(decide(&original), decide(&renormalized));
    }

    #[test]
    fn layers_recompose(grid in arb_grid(24, 24)) {
        for channel in [Channel::Red, Channel::Green, Channel::Blue] {
            let layers: Vec<_> = (0..8).map(|k| extract_layer(&grid, channel, k).unwrap()).collect();
            for i in 0..grid.height() {
                for j in 0..grid.width() {
                    let byte = layers.iter().fold(0u8, |acc, l| acc | (l.bit(i, j) << l.layer_index()));
                    prop_assert_eq!(byte, grid.channel_value(i, j, channel));
                }
            }
        }
    }

    #[test]
    fn window_center_equals_layer_bit(grid in arb_grid(16, 16)) {
        let layer = extract_layer(&grid, Channel::Blue, 0).unwrap();
        for i in 1..grid.height() - 1 {
            for j in 1..grid.width() - 1 {
                prop_assert_eq!(window_at(&layer, i, j).unwrap().center, layer.bit(i, j));
            }
        }
    }

    #[test]
    fn band_parallel_detect_matches_sequential(grid in arb_grid(48, 48), params in arb_params()) {
        let par = detect(&grid, &params).unwrap();
        let seq = detect_sequential(&grid, &params, Channel::Blue).unwrap();
        prop_assert_eq!(par, seq);
    }

    #[test]
    fn embedding_touches_only_region_lsbs(
        grid in arb_grid(32, 32),
        seed in any::<u64>(),
    ) {
        let region = BoundingBox::new(
            1,
            1,
            grid.height() / 2,
            grid.width() / 2,
        ).unwrap();
        let payload = stegascan::random_payload(region.area(), seed);
        let (stego, record) = embed_lsb(&grid, &payload, &region).unwrap();

        // Channels and upper layers untouched; changes confined to the region.
        for i in 0..grid.height() {
            for j in 0..grid.width() {
                let (a, b) = (grid.get(i, j), stego.get(i, j));
                prop_assert_eq!(a[0], b[0]);
                prop_assert_eq!(a[1], b[1]);
                prop_assert_eq!(a[2] >> 1, b[2] >> 1);
                if !region.contains(i, j) {
                    prop_assert_eq!(a, b);
                }
            }
        }
        // flipped == XOR of the LSB planes; flipped is a subset of written.
        let before = extract_layer(&grid, Channel::Blue, 0).unwrap();
        let after = extract_layer(&stego, Channel::Blue, 0).unwrap();
        for i in 0..grid.height() {
            for j in 0..grid.width() {
                prop_assert_eq!(record.flipped_mask().get(i, j), before.bit(i, j) ^ after.bit(i, j));
                prop_assert!(record.flipped_mask().get(i, j) <= record.written_mask().get(i, j));
            }
        }
        // change rate agrees with the layer Hamming distance.
        let rate = change_rate(&before, &after).unwrap();
        prop_assert!((rate - record.change_rate()).abs() < 1e-12);
        // payload reads back exactly.
        prop_assert_eq!(extract_lsb(&stego, &region, payload.len()), payload);
    }

    #[test]
    fn localize_needs_positives(w in 3usize..64, h in 3usize..64) {
        let loc = localize(&SpoofMatrix::zeros(w, h));
        prop_assert!(!loc.insert_found);
        prop_assert_eq!(loc.report.inside_density, 0.0);
        prop_assert!(loc.report.contrast <= 1.0);
    }
}

/// Runtime grows linearly with the pixel count: quadrupling the pixels takes
/// between 2x and 8x the time (4x within a factor-of-two noise allowance).
/// Wall-clock measurement; run explicitly with `cargo test -- --ignored`.
#[test]
#[ignore]
fn detect_runtime_scales_linearly() {
    use std::time::Instant;
    let params = AhpParams::default();
    let small = stegascan::gradient_image(320, 240);
    let large = stegascan::gradient_image(640, 480);
    // warm up allocators and the thread pool
    detect(&small, &params).unwrap();
    let timed = |grid: &PixelGrid| {
        let mut best = f64::INFINITY;
        for _ in 0..5 {
            let t = Instant::now();
            detect(grid, &params).unwrap();
            best = best.min(t.elapsed().as_secs_f64());
        }
        best
    };
    let t_small = timed(&small);
    let t_large = timed(&large);
    let ratio = t_large / t_small;
    println!("4x pixels -> {ratio:.2}x time");
    assert!(
        (2.0..8.0).contains(&ratio),
        "4x pixels took {ratio:.2}x time; expected roughly 4x"
    );
}
