//! Structural similarity (SSIM) maps.
//!
//! Single-scale SSIM on BT.601 luma with an 11x11 Gaussian window
//! (σ = 1.5), K1 = 0.01, K2 = 0.03 and a dynamic range of 255. The map is
//! dense: one window per pixel, with clamp-to-edge addressing at borders.

use crate::error::{Error, Result};
use crate::filter_bank::gaussian_kernel;
use crate::imaging::RasterImage;
use crate::tiling::Rect;

const WINDOW: usize = 11;
const WINDOW_SIGMA: f64 = 1.5;
const C1: f64 = (0.01 * 255.0) * (0.01 * 255.0);
const C2: f64 = (0.03 * 255.0) * (0.03 * 255.0);

/// Per-pixel SSIM with summary statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SsimMap {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
    pub mean: f64,
    pub min: f64,
    pub argmin: (usize, usize),
}

impl SsimMap {
    fn from_values(width: usize, height: usize, values: Vec<f64>) -> Self {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let (i, min) =
            values
                .iter()
                .copied()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
                );
        Self {
            width,
            height,
            values,
            mean,
            min,
            argmin: (i % width, i / width),
        }
    }

    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Smallest value inside `rect`.
    pub fn min_in(&self, rect: Rect) -> f64 {
        (rect.y0..rect.y1)
            .flat_map(|y| (rect.x0..rect.x1).map(move |x| (x, y)))
            .map(|(x, y)| self.at(x, y))
            .fold(f64::INFINITY, f64::min)
    }

    /// Gray raster with `round(255 * clamp(ssim, 0, 1))`.
    pub fn to_raster(&self) -> RasterImage {
        let data = self
            .values
            .iter()
            .map(|v| (255.0 * v.clamp(0.0, 1.0)).round() as u8)
            .collect();
        RasterImage::new(self.width, self.height, 1, data).expect("map shape")
    }

    /// `mean`, `min` and `argmin` as `key value` lines.
    pub fn stats_text(&self) -> String {
        format!(
            "mean {:.6}\nmin {:.6}\nargmin {},{}\n",
            self.mean, self.min, self.argmin.0, self.argmin.1
        )
    }

    /// Mean disparity `1 - ssim` in concentric rings of `bin_width` pixels
    /// around `center`. Entries are `(inner radius, mean disparity, count)`.
    pub fn radial_disparity(&self, center: (f64, f64), bin_width: f64) -> Vec<(f64, f64, usize)> {
        let mut sums: Vec<(f64, usize)> = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                let d = (x as f64 - center.0).hypot(y as f64 - center.1);
                let bin = (d / bin_width) as usize;
                if bin >= sums.len() {
                    sums.resize(bin + 1, (0.0, 0));
                }
                sums[bin].0 += 1.0 - self.at(x, y);
                sums[bin].1 += 1;
            }
        }
        sums.into_iter()
            .enumerate()
            .filter(|(_, (_, n))| *n > 0)
            .map(|(i, (s, n))| (i as f64 * bin_width, s / n as f64, n))
            .collect()
    }
}

/// Dense SSIM map between two rasters of identical shape.
pub fn ssim_map(reference: &RasterImage, test: &RasterImage) -> Result<SsimMap> {
    if reference.dims() != test.dims() || reference.channels() != test.channels() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{}x{} vs {}x{}x{}",
            reference.width(),
            reference.height(),
            reference.channels(),
            test.width(),
            test.height(),
            test.channels()
        )));
    }
    let (w, h) = reference.dims();
    let x = reference.luma();
    let y = test.luma();
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a * b).collect();
    let window = gaussian_kernel(WINDOW_SIGMA, WINDOW);
    let mx = blur(&x, w, h, &window);
    let my = blur(&y, w, h, &window);
    let exx = blur(&xx, w, h, &window);
    let eyy = blur(&yy, w, h, &window);
    let exy = blur(&xy, w, h, &window);
    let values = (0..w * h)
        .map(|i| {
            let (ux, uy) = (mx[i], my[i]);
            let vx = exx[i] - ux * ux;
            let vy = eyy[i] - uy * uy;
            let cov = exy[i] - ux * uy;
            ((2.0 * ux * uy + C1) * (2.0 * cov + C2)) / ((ux * ux + uy * uy + C1) * (vx + vy + C2))
        })
        .collect();
    Ok(SsimMap::from_values(w, h, values))
}

/// Pixel-wise mean of the SSIM maps of several pairs.
pub fn mean_ssim_map(pairs: &[(RasterImage, RasterImage)]) -> Result<SsimMap> {
    let Some(((first, _), rest)) = pairs.split_first() else {
        return Err(Error::InvalidParam("no image pairs given".into()));
    };
    if let Some((r, _)) = rest.iter().find(|(r, _)| r.dims() != first.dims()) {
        return Err(Error::DimensionMismatch(format!(
            "pair of {}x{} among {}x{} pairs",
            r.width(),
            r.height(),
            first.width(),
            first.height()
        )));
    }
    let (w, h) = first.dims();
    let mut acc = vec![0f64; w * h];
    for (r, t) in pairs {
        let m = ssim_map(r, t)?;
        acc.iter_mut().zip(&m.values).for_each(|(a, v)| *a += v);
    }
    let n = pairs.len() as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    Ok(SsimMap::from_values(w, h, acc))
}

fn blur(src: &[f64], w: usize, h: usize, k: &[f64]) -> Vec<f64> {
    let r = (k.len() / 2) as isize;
    let mut tmp = vec![0f64; w * h];
    for y in 0..h {
        for x in 0..w {
            tmp[y * w + x] = k
                .iter()
                .enumerate()
                .map(|(i, wk)| {
                    let sx = (x as isize + i as isize - r).clamp(0, w as isize - 1) as usize;
                    wk * src[y * w + sx]
                })
                .sum();
        }
    }
    let mut out = vec![0f64; w * h];
    for y in 0..h {
        for x in 0..w {
            out[y * w + x] = k
                .iter()
                .enumerate()
                .map(|(i, wk)| {
                    let sy = (y as isize + i as isize - r).clamp(0, h as isize - 1) as usize;
                    wk * tmp[sy * w + x]
                })
                .sum();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{synthetic, Pattern};

    #[test]
    fn identical_images_score_one() {
        let img = synthetic(Pattern::Clouds, 40, 30, 1);
        let m = ssim_map(&img, &img).unwrap();
        assert!(m.values.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        assert_eq!(m.to_raster().data().iter().min(), Some(&255));
    }

    #[test]
    fn inverted_image_scores_low() {
        let img = synthetic(Pattern::Shapes, 64, 64, 2);
        let inv = RasterImage::from_fn(64, 64, 3, |x, y, c| 255 - img.get(x, y, c)).unwrap();
        let m = ssim_map(&img, &inv).unwrap();
        assert!(m.mean < 0.5, "{}", m.mean);
        assert!(m.values.iter().all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn symmetric_in_its_arguments() {
        let a = synthetic(Pattern::Gratings, 50, 40, 3);
        let b = synthetic(Pattern::Gratings, 50, 40, 4);
        let ab = ssim_map(&a, &b).unwrap();
        let ba = ssim_map(&b, &a).unwrap();
        for (x, y) in ab.values.iter().zip(&ba.values) {
            assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = RasterImage::filled(10, 10, 1, 0).unwrap();
        let b = RasterImage::filled(10, 11, 1, 0).unwrap();
        assert!(ssim_map(&a, &b).is_err());
        assert!(mean_ssim_map(&[]).is_err());
        assert!(mean_ssim_map(&[(a.clone(), a.clone()), (b.clone(), b)]).is_err());
    }

    #[test]
    fn mean_map_of_copies_equals_single_map() {
        let a = synthetic(Pattern::Rings, 32, 32, 5);
        let b = synthetic(Pattern::Rings, 32, 32, 6);
        let single = ssim_map(&a, &b).unwrap();
        let one = mean_ssim_map(&[(a.clone(), b.clone())]).unwrap();
        assert_eq!(one, single);
        let many = mean_ssim_map(&vec![(a, b); 4]).unwrap();
        for (x, y) in many.values.iter().zip(&single.values) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn stats_and_regions() {
        let a = synthetic(Pattern::Mosaic, 30, 20, 7);
        let mut b = a.clone();
        for c in 0..3 {
            b.set(25, 15, c, 255 - a.get(25, 15, c));
        }
        let m = ssim_map(&a, &b).unwrap();
        assert!(m.min < 1.0);
        assert!(Rect {
            x0: 20,
            y0: 10,
            x1: 30,
            y1: 20
        }
        .contains(m.argmin.0, m.argmin.1));
        assert_eq!(
            m.min_in(Rect {
                x0: 0,
                y0: 0,
                x1: 8,
                y1: 8
            }),
            1.0
        );
        assert!(m.stats_text().starts_with("mean "));
        let rings = m.radial_disparity((25.0, 15.0), 4.0);
        assert_eq!(rings.iter().map(|r| r.2).sum::<usize>(), 600);
        assert!(rings[0].1 > rings.last().unwrap().1);
    }
}
