//! Gaussian-pyramid (mipmap) foveation baseline.
//!
//! Each level is the previous one blurred with σ = 1 and decimated 2x per
//! axis. Output pixels are interpolated trilinearly between the two levels
//! bracketing the fractional level implied by the local σ.

use rayon::prelude::*;

use crate::blockwise::DensityInput;
use crate::error::{Error, Result};
use crate::filter_bank::{filter_length, gaussian_kernel};
use crate::imaging::RasterImage;
use crate::retinal::{BlurSource, FoveationParams};

/// Blur applied before each decimation.
pub const PRE_BLUR_SIGMA: f64 = 1.0;
/// σ mapped to level 0; each doubling of σ above it moves one level down.
pub const BASE_SIGMA: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct Pyramid {
    pub levels: Vec<RasterImage>,
}

impl Pyramid {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }
}

/// Builds up to `max_levels` levels, stopping early once a level is 1x1.
pub fn build_pyramid(img: &RasterImage, max_levels: usize) -> Result<Pyramid> {
    if max_levels == 0 {
        return Err(Error::InvalidParam(
            "pyramid needs at least one level".into(),
        ));
    }
    let kernel = gaussian_kernel(PRE_BLUR_SIGMA, filter_length(PRE_BLUR_SIGMA));
    let mut levels = vec![img.clone()];
    while levels.len() < max_levels {
        let prev = levels.last().expect("non-empty");
        if prev.width() == 1 && prev.height() == 1 {
            break;
        }
        levels.push(blur_decimate(prev, &kernel));
    }
    Ok(Pyramid { levels })
}

/// Blurs with `kernel` (clamp-to-edge, 64-bit) and keeps the top-left sample
/// of every 2x2 block. Only the kept samples are computed.
fn blur_decimate(img: &RasterImage, kernel: &[f64]) -> RasterImage {
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let (nw, nh) = (w.div_ceil(2), h.div_ceil(2));
    let r = (kernel.len() / 2) as isize;
    let data = img.data();
    let at = |x: isize, y: usize, c: usize| {
        let x = x.clamp(0, w as isize - 1) as usize;
        f64::from(data[(y * w + x) * ch + c])
    };
    // horizontal pass on every row, even columns only
    let mut horizontal = vec![0f64; h * nw * ch];
    horizontal
        .par_chunks_mut(nw * ch)
        .enumerate()
        .for_each(|(y, row)| {
            for nx in 0..nw {
                let x = 2 * nx as isize;
                for c in 0..ch {
                    row[nx * ch + c] = kernel
                        .iter()
                        .enumerate()
                        .map(|(k, wk)| wk * at(x + k as isize - r, y, c))
                        .sum();
                }
            }
        });
    let mut out = vec![0u8; nw * nh * ch];
    out.par_chunks_mut(nw * ch)
        .enumerate()
        .for_each(|(ny, row)| {
            let y = 2 * ny as isize;
            for nx in 0..nw {
                for c in 0..ch {
                    let v: f64 = kernel
                        .iter()
                        .enumerate()
                        .map(|(k, wk)| {
                            let sy = (y + k as isize - r).clamp(0, h as isize - 1) as usize;
                            wk * horizontal[(sy * nw + nx) * ch + c]
                        })
                        .sum();
                    row[nx * ch + c] = v.round().clamp(0.0, 255.0) as u8;
                }
            }
        });
    RasterImage::new(nw, nh, ch, out).expect("non-empty")
}

/// Fractional pyramid level for blur strength `sigma`.
pub fn level_for_sigma(sigma: f64, depth: usize) -> f64 {
    let l = (sigma.max(BASE_SIGMA) / BASE_SIGMA).log2();
    l.clamp(0.0, (depth - 1) as f64)
}

/// Samples the pyramid per pixel at the level given by `sigma` (row-major,
/// one value per level-0 pixel).
pub fn sample_foveated(pyr: &Pyramid, sigma: &[f64]) -> Result<RasterImage> {
    let base = &pyr.levels[0];
    let (w, h, ch) = (base.width(), base.height(), base.channels());
    if sigma.len() != w * h {
        return Err(Error::DimensionMismatch(format!(
            "{} sigma values for a {w}x{h} image",
            sigma.len()
        )));
    }
    if let Some(bad) = sigma.iter().find(|s| !s.is_finite() || **s < 0.0) {
        return Err(Error::InvalidParam(format!(
            "sigma must be finite and >= 0, got {bad}"
        )));
    }
    let depth = pyr.depth();
    let cols: Vec<Vec<Axis>> = pyr
        .levels
        .iter()
        .enumerate()
        .map(|(k, l)| (0..w).map(|x| Axis::new(x, k, l.width())).collect())
        .collect();
    let mut out = vec![0u8; w * h * ch];
    out.par_chunks_mut(w * ch).enumerate().for_each(|(y, row)| {
        let rows: Vec<Axis> = pyr
            .levels
            .iter()
            .enumerate()
            .map(|(k, l)| Axis::new(y, k, l.height()))
            .collect();
        let mut lo = vec![0f64; ch];
        let mut hi = vec![0f64; ch];
        for x in 0..w {
            let level = level_for_sigma(sigma[y * w + x], depth);
            let l0 = level.floor() as usize;
            let l1 = (l0 + 1).min(depth - 1);
            let t = level - l0 as f64;
            bilinear(&pyr.levels[l0], cols[l0][x], rows[l0], &mut lo);
            bilinear(&pyr.levels[l1], cols[l1][x], rows[l1], &mut hi);
            for c in 0..ch {
                let v = lo[c] * (1.0 - t) + hi[c] * t;
                row[x * ch + c] = v.round().clamp(0.0, 255.0) as u8;
            }
        }
    });
    RasterImage::new(w, h, ch, out)
}

/// Neighbouring sample indices and weight along one axis of a level.
#[derive(Debug, Clone, Copy)]
struct Axis {
    i0: usize,
    i1: usize,
    f: f64,
}

impl Axis {
    /// Level-0 coordinate `p` on a level decimated `k` times with `len` samples.
    fn new(p: usize, k: usize, len: usize) -> Self {
        let scale = (1usize << k) as f64;
        let u = (p as f64 / scale).min((len - 1) as f64);
        let i0 = u.floor() as usize;
        Self {
            i0,
            i1: (i0 + 1).min(len - 1),
            f: u - i0 as f64,
        }
    }
}

#[inline]
fn bilinear(level: &RasterImage, col: Axis, row: Axis, out: &mut [f64]) {
    let (lw, ch) = (level.width(), level.channels());
    let data = level.data();
    let (i00, i10) = ((row.i0 * lw + col.i0) * ch, (row.i0 * lw + col.i1) * ch);
    let (i01, i11) = ((row.i1 * lw + col.i0) * ch, (row.i1 * lw + col.i1) * ch);
    let (fu, fv) = (col.f, row.f);
    for (c, o) in out.iter_mut().enumerate() {
        let s = |i: usize| f64::from(data[i + c]);
        let top = s(i00) * (1.0 - fu) + s(i10) * fu;
        let bot = s(i01) * (1.0 - fu) + s(i11) * fu;
        *o = top * (1.0 - fv) + bot * fv;
    }
}

/// Depth of the full chain down to a single pixel.
pub fn full_depth(dims: (usize, usize)) -> usize {
    let m = dims.0.max(dims.1);
    (usize::BITS - (m - 1).leading_zeros()) as usize + 1
}

/// Builds a full pyramid and samples it with the per-pixel σ of the model.
pub fn foveate_pyramid(
    img: &RasterImage,
    params: &FoveationParams,
    density: DensityInput<'_>,
) -> Result<RasterImage> {
    let dims = img.dims();
    let source = match density {
        DensityInput::None => BlurSource::retinal(params, dims)?,
        DensityInput::Map { map, sigma_max } => BlurSource::density(map, sigma_max, dims)?,
    };
    let sigma = source.per_pixel();
    let pyr = build_pyramid(img, full_depth(dims))?;
    sample_foveated(&pyr, &sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{synthetic, Pattern};
    use crate::reference::convolve_separable;

    #[test]
    fn decimation_matches_full_blur_then_subsample() {
        let kernel = gaussian_kernel(PRE_BLUR_SIGMA, filter_length(PRE_BLUR_SIGMA));
        for (w, h) in [(37, 22), (64, 64), (1, 5)] {
            let img = synthetic(Pattern::Mosaic, w, h, 11);
            let full = convolve_separable(&img, &kernel);
            let got = blur_decimate(&img, &kernel);
            assert_eq!(got.dims(), (w.div_ceil(2), h.div_ceil(2)));
            for y in 0..got.height() {
                for x in 0..got.width() {
                    for c in 0..3 {
                        assert_eq!(got.get(x, y, c), full.get(2 * x, 2 * y, c));
                    }
                }
            }
        }
    }

    #[test]
    fn level_dims_halve() {
        let img = RasterImage::filled(512, 512, 1, 3).unwrap();
        let p = build_pyramid(&img, 4).unwrap();
        let dims: Vec<_> = p.levels.iter().map(|l| l.dims()).collect();
        assert_eq!(dims, vec![(512, 512), (256, 256), (128, 128), (64, 64)]);

        let odd = RasterImage::filled(13, 6, 1, 0).unwrap();
        let p = build_pyramid(&odd, 10).unwrap();
        let dims: Vec<_> = p.levels.iter().map(|l| l.dims()).collect();
        assert_eq!(dims, vec![(13, 6), (7, 3), (4, 2), (2, 1), (1, 1)]);
        assert_eq!(full_depth((13, 6)), 5);
        assert_eq!(full_depth((512, 512)), 10);
        assert_eq!(full_depth((1, 1)), 1);
    }

    #[test]
    fn constant_levels_stay_constant() {
        let img = RasterImage::filled(40, 30, 3, 77).unwrap();
        let p = build_pyramid(&img, 6).unwrap();
        for l in &p.levels {
            assert!(l.data().iter().all(|&v| v == 77));
        }
    }

    #[test]
    fn single_pixel_has_one_level() {
        let img = RasterImage::filled(1, 1, 3, 9).unwrap();
        assert_eq!(build_pyramid(&img, 5).unwrap().depth(), 1);
        assert!(build_pyramid(&img, 0).is_err());
    }

    #[test]
    fn zero_sigma_samples_level_zero() {
        let img = synthetic(Pattern::Clouds, 33, 21, 1);
        let p = build_pyramid(&img, 4).unwrap();
        let out = sample_foveated(&p, &vec![0.0; 33 * 21]).unwrap();
        for (a, b) in out.data().iter().zip(img.data()) {
            assert!((i16::from(*a) - i16::from(*b)).abs() <= 1);
        }
    }

    #[test]
    fn huge_sigma_samples_deepest_level() {
        let img = synthetic(Pattern::Shapes, 64, 64, 2);
        let p = build_pyramid(&img, 4).unwrap();
        let out = sample_foveated(&p, &vec![1e6; 64 * 64]).unwrap();
        let deepest = &p.levels[3];
        // Pixels on the coarse lattice reproduce the deepest level exactly.
        for y in (0..64).step_by(8) {
            for x in (0..64).step_by(8) {
                for c in 0..3 {
                    assert_eq!(out.get(x, y, c), deepest.get(x / 8, y / 8, c));
                }
            }
        }
    }

    #[test]
    fn level_map_is_monotone() {
        let mut prev = 0.0;
        for i in 0..500 {
            let l = level_for_sigma(i as f64 * 0.05, 8);
            assert!(l >= prev);
            prev = l;
        }
        assert_eq!(level_for_sigma(0.5, 8), 0.0);
        assert_eq!(level_for_sigma(1.0, 8), 1.0);
        assert_eq!(level_for_sigma(1e9, 8), 7.0);
    }

    #[test]
    fn sampling_rejects_bad_fields() {
        let img = RasterImage::filled(4, 4, 1, 0).unwrap();
        let p = build_pyramid(&img, 2).unwrap();
        assert!(sample_foveated(&p, &[0.0; 3]).is_err());
        assert!(sample_foveated(&p, &[f64::NAN; 16]).is_err());
    }
}
