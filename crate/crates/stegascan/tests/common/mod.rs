//! Independent reference implementation used by the acceptance suite.
//!
//! Everything here is transcribed directly from the decision-rule formulas
//! and shares no code with the library: weights, per-criterion weights, both
//! hierarchy aggregates, and a brute-force whole-image scan working straight
//! off pixel bytes.

#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use stegascan::PixelGrid;

/// Zero-layer hierarchy, literal transcription.
///
/// r1 = nk/(nk+k+1), r2 = k/(nk+k+1), r3 = 1/(nk+k+1);
/// p1 = (4-x)/4, q1 = x/4; p2 = (4-y)/4, q2 = y/4; p3 = dc, q3 = 1-dc;
/// P(Y) = r1 p1 + r2 p2 + r3 p3; P(N) = r1 q1 + r2 q2 + r3 q3.
pub fn oracle_zero_scores(x: u8, y: u8, dc: f64, n: f64, k: f64) -> (f64, f64) {
    let r1 = n * k / (n * k + k + 1.0);
    let r2 = k / (n * k + k + 1.0);
    let r3 = 1.0 / (n * k + k + 1.0);
    let p1 = (4.0 - x as f64) / 4.0;
    let q1 = x as f64 / 4.0;
    let p2 = (4.0 - y as f64) / 4.0;
    let q2 = y as f64 / 4.0;
    let p3 = dc;
    let q3 = 1.0 - dc;
    (r1 * p1 + r2 * p2 + r3 * p3, r1 * q1 + r2 * q2 + r3 * q3)
}

/// One upper-layer window as 9 bits in reading order (row by row).
pub type RawWindow = [u8; 9];

const SIDE_POSITIONS: [usize; 4] = [1, 7, 3, 5];
const CORNER_POSITIONS: [usize; 4] = [0, 2, 6, 8];

/// Upper-layer hierarchy, literal transcription.
///
/// t = (4/7, 2/7, 1/7), s_i = 1/3; per layer, x/y count side/corner bits
/// equal to the analyzed zero-layer bit and dc is the deviation of that bit
/// from the mean of all nine window bits.
pub fn oracle_upper_scores(zero_bit: u8, windows: &[RawWindow; 3]) -> (f64, f64) {
    let t = [4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0];
    let s = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
    let mut p_yes = 0.0;
    let mut p_no = 0.0;
    for (idx, win) in windows.iter().enumerate() {
        let x = SIDE_POSITIONS.iter().filter(|&&p| win[p] == zero_bit).count() as f64;
        let y = CORNER_POSITIONS.iter().filter(|&&p| win[p] == zero_bit).count() as f64;
        let mean = win.iter().map(|&b| b as f64).sum::<f64>() / 9.0;
        let dc = (zero_bit as f64 - mean).abs();
        let p1 = (4.0 - x) / 4.0;
        let q1 = x / 4.0;
        let p2 = (4.0 - y) / 4.0;
        let q2 = y / 4.0;
        let p3 = dc;
        let q3 = 1.0 - dc;
        p_yes += t[idx] * (s[0] * p1 + s[1] * p2 + s[2] * p3);
        p_no += t[idx] * (s[0] * q1 + s[1] * q2 + s[2] * q3);
    }
    (p_yes, p_no)
}

/// Brute-force whole-image scan from raw pixel bytes: both hierarchies per
/// interior pixel, OR of the two verdicts, borders zero.
pub fn oracle_detect(grid: &PixelGrid, n: f64, k: f64) -> Vec<Vec<u8>> {
    let (w, h) = (grid.width(), grid.height());
    let blue_bit = |i: usize, j: usize, layer: u8| (grid.get(i, j)[2] >> layer) & 1;
    let mut matrix = vec![vec![0u8; w]; h];
    for i in 1..h - 1 {
        for j in 1..w - 1 {
            let center = blue_bit(i, j, 0);
            let sides = [
                blue_bit(i - 1, j, 0),
                blue_bit(i + 1, j, 0),
                blue_bit(i, j - 1, 0),
                blue_bit(i, j + 1, 0),
            ];
            let corners = [
                blue_bit(i - 1, j - 1, 0),
                blue_bit(i - 1, j + 1, 0),
                blue_bit(i + 1, j - 1, 0),
                blue_bit(i + 1, j + 1, 0),
            ];
            let x = sides.iter().filter(|&&b| b == center).count() as u8;
            let y = corners.iter().filter(|&&b| b == center).count() as u8;
            let mean8 = (sides.iter().map(|&b| b as f64).sum::<f64>()
                + corners.iter().map(|&b| b as f64).sum::<f64>())
                / 8.0;
            let dc = (center as f64 - mean8).abs();
            let (py, pn) = oracle_zero_scores(x, y, dc, n, k);
            let zero_spoofed = py > pn;

            let mut windows = [[0u8; 9]; 3];
            for (li, win) in windows.iter_mut().enumerate() {
                let layer = (li + 1) as u8;
                let mut pos = 0;
                for di in -1i32..=1 {
                    for dj in -1i32..=1 {
                        win[pos] =
                            blue_bit((i as i32 + di) as usize, (j as i32 + dj) as usize, layer);
                        pos += 1;
                    }
                }
            }
            let (p1y, p1n) = oracle_upper_scores(center, &windows);
            let upper_spoofed = p1y > p1n;

            matrix[i][j] = u8::from(zero_spoofed || upper_spoofed);
        }
    }
    matrix
}
