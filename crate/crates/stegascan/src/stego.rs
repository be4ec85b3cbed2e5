//! Stego lab: synthetic containers, the rectangular LSB embedder, and
//! ground-truth records for the benchmark harness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitplane::{BitLayer, BitMatrix, Channel, PixelGrid};
use crate::detector::BoundingBox;
use crate::error::{Error, Result};

/// Left-to-right blue ramp 0..=255 with red/green held at mid-gray.
pub fn gradient_image(width: usize, height: usize) -> PixelGrid {
    assert!(width >= 3 && height >= 3, "container must be at least 3x3");
    PixelGrid::from_fn(width, height, |_, j| {
        let blue = (255.0 * j as f64 / (width - 1) as f64).round() as u8;
        [128, 128, blue]
    })
}

// Flat fill colors. Blue components are chosen with bit 0 == bit 1
// (blue = 0 or 3 mod 4) so the containers keep adjacent bit layers coherent,
// the regime the layered analysis is designed for.
const SHAPE_PALETTE: [[u8; 3]; 6] = [
    [32, 56, 128],
    [180, 40, 60],
    [34, 140, 87],
    [240, 160, 48],
    [120, 80, 156],
    [0, 128, 131],
];
const SHAPE_BACKGROUND: [u8; 3] = [200, 200, 200];

/// Flat-filled rectangles, circles, and triangles on a flat background;
/// placement and colors drawn from the seed. Deterministic per seed.
pub fn shapes_image(width: usize, height: usize, seed: u64) -> PixelGrid {
    assert!(width >= 3 && height >= 3, "container must be at least 3x3");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = PixelGrid::filled(width, height, SHAPE_BACKGROUND);
    // At least four visibly distinct regions: first four shapes cycle through
    // distinct palette entries, the rest draw freely.
    for idx in 0..8usize {
        let kind = rng.random_range(0..3u8);
        let color = match SHAPE_PALETTE.get(idx) {
            Some(&fixed) if idx < 4 => fixed,
            _ => SHAPE_PALETTE[rng.random_range(0..SHAPE_PALETTE.len())],
        };
        let cy = rng.random_range(0..height) as isize;
        let cx = rng.random_range(0..width) as isize;
        let size = rng.random_range(40..=120).min(width.min(height) / 2) as isize;
        let mut put = |i: isize, j: isize| {
            if i >= 0 && j >= 0 && (i as usize) < height && (j as usize) < width {
                grid.set(i as usize, j as usize, color);
            }
        };
        match kind {
            0 => {
                let h2 = rng.random_range(40..=120).min(width.min(height) / 2) as isize;
                for i in cy - h2 / 2..cy + h2 / 2 {
                    for j in cx - size / 2..cx + size / 2 {
                        put(i, j);
                    }
                }
            }
            1 => {
                let r = size / 2;
                for i in cy - r..=cy + r {
                    for j in cx - r..=cx + r {
                        if (i - cy) * (i - cy) + (j - cx) * (j - cx) <= r * r {
                            put(i, j);
                        }
                    }
                }
            }
            _ => {
                // isoceles triangle, apex up
                for d in 0..size {
                    let i = cy - size / 2 + d;
                    let half = d / 2;
                    for j in cx - half..=cx + half {
                        put(i, j);
                    }
                }
            }
        }
    }
    grid
}

/// UTF-8 bytes serialized most-significant-bit first.
pub fn text_to_bits(text: &str) -> Vec<u8> {
    text.bytes()
        .flat_map(|byte| (0..8).rev().map(move |shift| (byte >> shift) & 1))
        .collect()
}

/// Inverse of [`text_to_bits`]; the bit count must be a multiple of 8 and
/// decode as UTF-8.
pub fn bits_to_text(bits: &[u8]) -> Result<String> {
    if !bits.len().is_multiple_of(8) {
        return Err(Error::invalid(format!("bit count {} is not a multiple of 8", bits.len())));
    }
    let bytes: Vec<u8> = bits
        .chunks(8)
        .map(|chunk| chunk.iter().fold(0u8, |acc, &b| (acc << 1) | (b & 1)))
        .collect();
    String::from_utf8(bytes).map_err(|e| Error::invalid(format!("bits are not valid UTF-8: {e}")))
}

/// Ground truth of one embedding: the region, the payload, which cells were
/// written, which cells actually changed, and the whole-image change rate.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbedRecord {
    region: BoundingBox,
    payload_bits: Vec<u8>,
    written_mask: BitMatrix,
    flipped_mask: BitMatrix,
    change_rate: f64,
}

impl EmbedRecord {
    pub fn region(&self) -> &BoundingBox {
        &self.region
    }

    pub fn payload_bits(&self) -> &[u8] {
        &self.payload_bits
    }

    pub fn written_mask(&self) -> &BitMatrix {
        &self.written_mask
    }

    pub fn flipped_mask(&self) -> &BitMatrix {
        &self.flipped_mask
    }

    /// Flipped cells divided by total pixels.
    pub fn change_rate(&self) -> f64 {
        self.change_rate
    }

    pub fn to_json(&self) -> String {
        let doc = EmbedRecordDoc {
            region: self.region,
            payload_len: self.payload_bits.len(),
            change_rate: self.change_rate,
            width: self.written_mask.width(),
            height: self.written_mask.height(),
            written_rle_rows: self.written_mask.to_rle_rows(),
            flipped_rle_rows: self.flipped_mask.to_rle_rows(),
            payload_bits: self.payload_bits.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("record serializes")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let doc: EmbedRecordDoc =
            serde_json::from_str(json).map_err(|e| Error::invalid(format!("bad record JSON: {e}")))?;
        let written = BitMatrix::from_rle_rows(doc.width, doc.height, &doc.written_rle_rows)?;
        let flipped = BitMatrix::from_rle_rows(doc.width, doc.height, &doc.flipped_rle_rows)?;
        Ok(EmbedRecord {
            region: doc.region,
            payload_bits: doc.payload_bits,
            written_mask: written,
            flipped_mask: flipped,
            change_rate: doc.change_rate,
        })
    }
}

/// Wire form of [`EmbedRecord`]: masks as run-length-encoded rows.
#[derive(Serialize, Deserialize)]
struct EmbedRecordDoc {
    region: BoundingBox,
    payload_len: usize,
    change_rate: f64,
    width: usize,
    height: usize,
    written_rle_rows: Vec<Vec<[u32; 2]>>,
    flipped_rle_rows: Vec<Vec<[u32; 2]>>,
    payload_bits: Vec<u8>,
}

/// Write payload bits row-major into the blue-channel LSBs of the region.
///
/// Everything outside the region, every other channel, and bit layers 1..=7
/// of blue are left untouched.
pub fn embed_lsb(
    grid: &PixelGrid,
    payload: &[u8],
    region: &BoundingBox,
) -> Result<(PixelGrid, EmbedRecord)> {
    if region.bottom >= grid.height() || region.right >= grid.width() {
        return Err(Error::invalid(format!(
            "region ({}, {})..({}, {}) exceeds the {}x{} image",
            region.top,
            region.left,
            region.bottom,
            region.right,
            grid.width(),
            grid.height()
        )));
    }
    if payload.len() > region.area() {
        return Err(Error::Capacity { payload_bits: payload.len(), capacity: region.area() });
    }
    if let Some(&bad) = payload.iter().find(|&&b| b > 1) {
        return Err(Error::invalid(format!("payload contains non-bit value {bad}")));
    }

    let mut stego = grid.clone();
    let mut written = BitMatrix::zeros(grid.width(), grid.height());
    let mut flipped = BitMatrix::zeros(grid.width(), grid.height());
    let mut flips = 0usize;
    let mut bit_iter = payload.iter();
    'rows: for i in region.top..=region.bottom {
        for j in region.left..=region.right {
            let Some(&bit) = bit_iter.next() else {
                break 'rows;
            };
            written.set(i, j, 1);
            let old = grid.channel_value(i, j, Channel::Blue);
            let new = (old & !1) | bit;
            if new != old {
                stego.set_channel_value(i, j, Channel::Blue, new);
                flipped.set(i, j, 1);
                flips += 1;
            }
        }
    }
    let change_rate = flips as f64 / grid.pixel_count() as f64;
    let record = EmbedRecord {
        region: *region,
        payload_bits: payload.to_vec(),
        written_mask: written,
        flipped_mask: flipped,
        change_rate,
    };
    Ok((stego, record))
}

/// Read region LSBs of the blue channel row-major.
pub fn extract_lsb(grid: &PixelGrid, region: &BoundingBox, bit_count: usize) -> Vec<u8> {
    let mut bits = Vec::with_capacity(bit_count);
    'rows: for i in region.top..=region.bottom {
        for j in region.left..=region.right {
            if bits.len() == bit_count {
                break 'rows;
            }
            bits.push(grid.channel_value(i, j, Channel::Blue) & 1);
        }
    }
    bits
}

/// Hamming distance between two layers divided by the cell count.
pub fn change_rate(original: &BitLayer, modified: &BitLayer) -> Result<f64> {
    if original.width() != modified.width() || original.height() != modified.height() {
        return Err(Error::DimensionMismatch {
            left: format!("{}x{}", original.width(), original.height()),
            right: format!("{}x{}", modified.width(), modified.height()),
        });
    }
    let differing = original
        .bits()
        .iter()
        .zip(modified.bits())
        .filter(|(a, b)| a != b)
        .count();
    Ok(differing as f64 / original.bits().len() as f64)
}

/// Seeded region placement: a `region_w` x `region_h` rectangle whose top-left
/// corner is drawn uniformly from the middle third of the image (clamped so
/// the rectangle fits with a one-pixel border margin).
pub fn seeded_region(
    width: usize,
    height: usize,
    region_w: usize,
    region_h: usize,
    seed: u64,
) -> Result<BoundingBox> {
    if region_w + 2 > width || region_h + 2 > height {
        return Err(Error::invalid(format!(
            "{region_w}x{region_h} region does not fit a {width}x{height} image"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top_lo = height / 3;
    let top_hi = (2 * height / 3).min(height - region_h - 1).max(top_lo);
    let left_lo = width / 3;
    let left_hi = (2 * width / 3).min(width - region_w - 1).max(left_lo);
    let top = rng.random_range(top_lo..=top_hi);
    let left = rng.random_range(left_lo..=left_hi);
    BoundingBox::new(top, left, top + region_h - 1, left + region_w - 1)
}

/// Seeded payload of uniform random bits.
pub fn random_payload(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.random_range(0..=1u8)).collect()
}
