//! 8-bit raster type and PNG / PPM file I/O.

use std::io::Cursor;
use std::path::Path;

use image::{DynamicImage, ImageFormat};

use crate::error::{Error, Result};

/// Row-major, interleaved 8-bit raster with one (gray) or three (RGB) channels.
#[derive(Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

impl std::fmt::Debug for RasterImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RasterImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("channels", &self.channels)
            .finish_non_exhaustive()
    }
}

impl RasterImage {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidRaster(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidRaster(format!(
                "channel count must be 1 or 3, got {channels}"
            )));
        }
        let expected = width * height * channels;
        if data.len() != expected {
            return Err(Error::InvalidRaster(format!(
                "expected {expected} samples for {width}x{height}x{channels}, got {}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// A raster with every sample set to `value`.
    pub fn filled(width: usize, height: usize, channels: usize, value: u8) -> Result<Self> {
        Self::new(
            width,
            height,
            channels,
            vec![value; width * height * channels],
        )
    }

    /// Builds a raster by evaluating `f(x, y, channel)` for every sample.
    pub fn from_fn(
        width: usize,
        height: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> u8,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * channels);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    data.push(f(x, y, c));
                }
            }
        }
        Self::new(width, height, channels, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    /// Sample at `(x, y, c)`; panics when out of bounds.
    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> u8 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: usize, value: u8) {
        self.data[(y * self.width + x) * self.channels + c] = value;
    }

    /// Sample with clamp-to-edge addressing.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize, c: usize) -> u8 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.get(x, y, c)
    }

    /// Row `y` as an interleaved slice.
    pub fn row(&self, y: usize) -> &[u8] {
        let stride = self.width * self.channels;
        &self.data[y * stride..(y + 1) * stride]
    }

    /// ITU-R BT.601 luma as real values; gray rasters are passed through.
    pub fn luma(&self) -> Vec<f64> {
        match self.channels {
            1 => self.data.iter().map(|&v| f64::from(v)).collect(),
            _ => self
                .data
                .chunks_exact(3)
                .map(|p| {
                    0.299 * f64::from(p[0]) + 0.587 * f64::from(p[1]) + 0.114 * f64::from(p[2])
                })
                .collect(),
        }
    }

    /// Mean over all samples.
    pub fn mean(&self) -> f64 {
        self.data.iter().map(|&v| v as f64).sum::<f64>() / self.data.len() as f64
    }

    fn to_dynamic(&self) -> DynamicImage {
        let (w, h) = (self.width as u32, self.height as u32);
        match self.channels {
            1 => DynamicImage::ImageLuma8(
                image::GrayImage::from_raw(w, h, self.data.clone()).expect("valid gray buffer"),
            ),
            _ => DynamicImage::ImageRgb8(
                image::RgbImage::from_raw(w, h, self.data.clone()).expect("valid rgb buffer"),
            ),
        }
    }

    fn from_dynamic(img: DynamicImage) -> Result<Self> {
        let (w, h) = (img.width() as usize, img.height() as usize);
        if img.color().has_alpha() {
            log::warn!("dropping alpha channel from source image");
        }
        if img.color().has_color() {
            Self::new(w, h, 3, img.into_rgb8().into_raw())
        } else {
            Self::new(w, h, 1, img.into_luma8().into_raw())
        }
    }

    /// Encodes as PNG into memory.
    pub fn encode_png(&self) -> Result<Vec<u8>> {
        let mut buf = Cursor::new(Vec::new());
        self.to_dynamic()
            .write_to(&mut buf, ImageFormat::Png)
            .map_err(|e| Error::Encode(e.to_string()))?;
        Ok(buf.into_inner())
    }

    /// Decodes an in-memory PNG or PNM buffer.
    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let format =
            image::guess_format(bytes).map_err(|e| Error::UnsupportedFormat(e.to_string()))?;
        check_format(format)?;
        let img =
            image::load_from_memory_with_format(bytes, format).map_err(|e| Error::Decode {
                path: "<memory>".into(),
                message: e.to_string(),
            })?;
        Self::from_dynamic(img)
    }
}

fn check_format(format: ImageFormat) -> Result<()> {
    match format {
        ImageFormat::Png | ImageFormat::Pnm => Ok(()),
        other => Err(Error::UnsupportedFormat(format!("{other:?}"))),
    }
}

fn format_for_path(path: &Path) -> Result<ImageFormat> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    match ext.as_str() {
        "png" => Ok(ImageFormat::Png),
        "ppm" | "pgm" | "pnm" => Ok(ImageFormat::Pnm),
        _ => Err(Error::UnsupportedFormat(format!(
            "unrecognized extension on {}",
            path.display()
        ))),
    }
}

/// Loads a PNG or binary PPM/PGM file. Color sources become 3-channel rasters,
/// grayscale sources 1-channel. Alpha is dropped.
pub fn load_image(path: impl AsRef<Path>) -> Result<RasterImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let format = image::guess_format(&bytes)
        .map_err(|e| Error::UnsupportedFormat(format!("{}: {e}", path.display())))?;
    check_format(format)?;
    let img = image::load_from_memory_with_format(&bytes, format).map_err(|e| Error::Decode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    RasterImage::from_dynamic(img)
}

/// Saves losslessly; the format follows the extension (`.png`, `.ppm`/`.pgm`).
/// Gray rasters written with a PNM extension become binary PGM.
pub fn save_image(img: &RasterImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let format = format_for_path(path)?;
    let mut buf = Cursor::new(Vec::new());
    img.to_dynamic()
        .write_to(&mut buf, format)
        .map_err(|e| Error::Encode(e.to_string()))?;
    std::fs::write(path, buf.into_inner()).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
