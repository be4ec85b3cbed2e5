//! Image ingestion and bit-plane decomposition.
//!
//! A [`PixelGrid`] holds an 8-bit-per-channel RGB raster. [`extract_layer`]
//! slices one bit of one channel into a [`BitLayer`], and [`window_at`]
//! reads the 3×3 neighborhood used by the per-pixel decision rules.
//! Addressing is row-major `(row, col)` everywhere.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// Color channel of an RGB pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Red,
    Green,
    Blue,
}

impl Channel {
    fn index(self) -> usize {
        match self {
            Channel::Red => 0,
            Channel::Green => 1,
            Channel::Blue => 2,
        }
    }
}

impl std::str::FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "red" | "r" => Ok(Channel::Red),
            "green" | "g" => Ok(Channel::Green),
            "blue" | "b" => Ok(Channel::Blue),
            other => Err(Error::invalid(format!("unknown channel '{other}'"))),
        }
    }
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Channel::Red => write!(f, "red"),
            Channel::Green => write!(f, "green"),
            Channel::Blue => write!(f, "blue"),
        }
    }
}

/// An RGB raster, 8 bits per channel, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelGrid {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl PixelGrid {
    /// Grid filled with a single color.
    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        PixelGrid { width, height, pixels: vec![rgb; width * height] }
    }

    /// Grid built pixel by pixel from `f(row, col)`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [u8; 3]) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for i in 0..height {
            for j in 0..width {
                pixels.push(f(i, j));
            }
        }
        PixelGrid { width, height, pixels }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn get(&self, row: usize, col: usize) -> [u8; 3] {
        self.pixels[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, rgb: [u8; 3]) {
        self.pixels[row * self.width + col] = rgb;
    }

    pub fn channel_value(&self, row: usize, col: usize, channel: Channel) -> u8 {
        self.pixels[row * self.width + col][channel.index()]
    }

    pub fn set_channel_value(&mut self, row: usize, col: usize, channel: Channel, value: u8) {
        self.pixels[row * self.width + col][channel.index()] = value;
    }

    /// Encode as PNG. The encoding is deterministic for a given grid.
    pub fn save_png(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = image::RgbImage::new(self.width as u32, self.height as u32);
        for (idx, px) in self.pixels.iter().enumerate() {
            let (i, j) = (idx / self.width, idx % self.width);
            buf.put_pixel(j as u32, i as u32, image::Rgb(*px));
        }
        buf.save_with_format(path, image::ImageFormat::Png)
            .map_err(|e| Error::format(path, e.to_string()))
    }
}

/// Rejects palette-indexed and non-8-bit inputs before decoding; the decoder
/// would otherwise expand them silently.
fn check_header(path: &Path, head: &[u8]) -> Result<()> {
    const PNG_MAGIC: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0d, 0x0a, 0x1a, 0x0a];
    if head.len() >= 26 && head[..8] == PNG_MAGIC {
        let bit_depth = head[24];
        let color_type = head[25];
        if color_type == 3 {
            return Err(Error::format(path, "palette-indexed PNG is not supported"));
        }
        if bit_depth != 8 {
            return Err(Error::format(path, format!("PNG bit depth {bit_depth} is not supported (need 8)")));
        }
        return Ok(());
    }
    if head.len() >= 30 && head[..2] == *b"BM" {
        let bpp = u16::from_le_bytes([head[28], head[29]]);
        if bpp != 24 && bpp != 32 {
            return Err(Error::format(path, format!("{bpp}-bit BMP is not supported (need 24 or 32)")));
        }
        return Ok(());
    }
    Err(Error::format(path, "not a PNG or BMP file"))
}

/// Load a PNG or BMP image into a [`PixelGrid`].
///
/// Channel bytes are taken verbatim; an alpha channel, if present, is
/// dropped without premultiplication.
pub fn load_image(path: impl AsRef<Path>) -> Result<PixelGrid> {
    let path = path.as_ref();
    let mut head = [0u8; 30];
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let n = file.read(&mut head).map_err(|e| Error::io(path, e))?;
    check_header(path, &head[..n])?;

    let dynimg = image::ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .decode()
        .map_err(|e| match e {
            image::ImageError::IoError(io) => Error::io(path, io),
            other => Error::format(path, other.to_string()),
        })?;
    let rgb = match dynimg {
        image::DynamicImage::ImageRgb8(buf) => buf,
        image::DynamicImage::ImageRgba8(buf) => image::DynamicImage::ImageRgba8(buf).to_rgb8(),
        other => {
            return Err(Error::format(
                path,
                format!("unsupported pixel layout {:?} (need 8-bit RGB)", other.color()),
            ))
        }
    };
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    let mut pixels = Vec::with_capacity(w * h);
    for px in rgb.pixels() {
        pixels.push(px.0);
    }
    Ok(PixelGrid { width: w, height: h, pixels })
}

/// One bit plane of one channel: `bits[i][j] = (channel(i,j) >> layer) & 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitLayer {
    width: usize,
    height: usize,
    layer_index: u8,
    channel: Channel,
    bits: Vec<u8>,
}

impl BitLayer {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn layer_index(&self) -> u8 {
        self.layer_index
    }

    pub fn channel(&self) -> Channel {
        self.channel
    }

    pub fn bit(&self, row: usize, col: usize) -> u8 {
        self.bits[row * self.width + col]
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }
}

/// Slice bit `layer` (0 = LSB) of `channel` out of the grid.
pub fn extract_layer(grid: &PixelGrid, channel: Channel, layer: u8) -> Result<BitLayer> {
    if layer > 7 {
        return Err(Error::invalid(format!("bit layer {layer} out of range 0..=7")));
    }
    let bits = grid
        .pixels
        .iter()
        .map(|px| (px[channel.index()] >> layer) & 1)
        .collect();
    Ok(BitLayer {
        width: grid.width,
        height: grid.height,
        layer_index: layer,
        channel,
        bits,
    })
}

/// The 3×3 bit neighborhood around an interior position.
///
/// Side order is up, down, left, right; corner order is NW, NE, SW, SE.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window3x3 {
    pub center: u8,
    pub sides: [u8; 4],
    pub corners: [u8; 4],
}

impl Window3x3 {
    /// Number of side bits equal to `reference`.
    pub fn side_matches(&self, reference: u8) -> u8 {
        self.sides.iter().filter(|&&b| b == reference).count() as u8
    }

    /// Number of corner bits equal to `reference`.
    pub fn corner_matches(&self, reference: u8) -> u8 {
        self.corners.iter().filter(|&&b| b == reference).count() as u8
    }

    /// Sum of all nine bits.
    pub fn total(&self) -> u32 {
        self.center as u32
            + self.sides.iter().map(|&b| b as u32).sum::<u32>()
            + self.corners.iter().map(|&b| b as u32).sum::<u32>()
    }
}

/// Read the 3×3 window centered on an interior pixel.
///
/// Border pixels are refused; the detector's border policy decides what
/// happens there, not this module.
pub fn window_at(layer: &BitLayer, row: usize, col: usize) -> Result<Window3x3> {
    if row == 0 || col == 0 || row + 1 >= layer.height || col + 1 >= layer.width {
        return Err(Error::invalid(format!(
            "window at ({row}, {col}) touches the border of a {}x{} layer",
            layer.height, layer.width
        )));
    }
    let b = |i: usize, j: usize| layer.bits[i * layer.width + j];
    Ok(Window3x3 {
        center: b(row, col),
        sides: [b(row - 1, col), b(row + 1, col), b(row, col - 1), b(row, col + 1)],
        corners: [
            b(row - 1, col - 1),
            b(row - 1, col + 1),
            b(row + 1, col - 1),
            b(row + 1, col + 1),
        ],
    })
}

/// Plain binary matrix; used for ground-truth masks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    width: usize,
    height: usize,
    bits: Vec<u8>,
}

impl BitMatrix {
    pub fn zeros(width: usize, height: usize) -> Self {
        BitMatrix { width, height, bits: vec![0; width * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.bits[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.bits[row * self.width + col] = value;
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Row-wise run-length encoding of 1-cells as `[start, len]` pairs.
    pub fn to_rle_rows(&self) -> Vec<Vec<[u32; 2]>> {
        let mut rows = Vec::with_capacity(self.height);
        for i in 0..self.height {
            let mut runs = Vec::new();
            let mut start: Option<usize> = None;
            for j in 0..=self.width {
                let on = j < self.width && self.get(i, j) == 1;
                match (on, start) {
                    (true, None) => start = Some(j),
                    (false, Some(s)) => {
                        runs.push([s as u32, (j - s) as u32]);
                        start = None;
                    }
                    _ => {}
                }
            }
            rows.push(runs);
        }
        rows
    }

    pub fn from_rle_rows(width: usize, height: usize, rows: &[Vec<[u32; 2]>]) -> Result<Self> {
        if rows.len() != height {
            return Err(Error::invalid(format!(
                "RLE mask has {} rows, expected {height}",
                rows.len()
            )));
        }
        let mut m = BitMatrix::zeros(width, height);
        for (i, runs) in rows.iter().enumerate() {
            for &[start, len] in runs {
                let (start, len) = (start as usize, len as usize);
                if start + len > width {
                    return Err(Error::invalid(format!("RLE run [{start}, {len}] exceeds row width {width}")));
                }
                for j in start..start + len {
                    m.set(i, j, 1);
                }
            }
        }
        Ok(m)
    }
}
