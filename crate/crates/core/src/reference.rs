//! Per-pixel foveation oracle and whole-image blur references.
//!
//! Nothing here is optimized; these routines exist to check the block-wise
//! renderer against.

use rayon::prelude::*;

use crate::blockwise::DensityInput;
use crate::error::Result;
use crate::filter_bank::{filter_length, gaussian_kernel, representative_sigma};
use crate::imaging::RasterImage;
use crate::retinal::{BlurSource, FoveationParams};

/// Blurs every pixel with a 2-D Gaussian of the σ at that pixel: no fragment
/// quantization, no foveal passthrough beyond single-tap filters.
pub fn foveate_exact(
    img: &RasterImage,
    params: &FoveationParams,
    density: DensityInput<'_>,
) -> Result<RasterImage> {
    let dims = img.dims();
    let source = match density {
        DensityInput::None => BlurSource::retinal(params, dims)?,
        DensityInput::Map { map, sigma_max } => BlurSource::density(map, sigma_max, dims)?,
    };
    Ok(foveate_with_sigma(img, &source.per_pixel()))
}

/// Per-pixel Gaussian blur driven by an explicit row-major σ map.
pub fn foveate_with_sigma(img: &RasterImage, sigma: &[f64]) -> RasterImage {
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    assert_eq!(sigma.len(), w * h, "one sigma per pixel");
    let mut out = vec![0u8; w * h * ch];
    out.par_chunks_mut(w * ch).enumerate().for_each(|(y, row)| {
        let mut acc = vec![0f64; ch];
        for x in 0..w {
            let s = sigma[y * w + x];
            let len = filter_length(s);
            let px = &mut row[x * ch..(x + 1) * ch];
            if len == 1 {
                for c in 0..ch {
                    px[c] = img.get(x, y, c);
                }
                continue;
            }
            let k = gaussian_kernel(s, len);
            let r = (len / 2) as isize;
            acc.fill(0.0);
            for (j, wj) in k.iter().enumerate() {
                let sy = y as isize + j as isize - r;
                for (i, wi) in k.iter().enumerate() {
                    let sx = x as isize + i as isize - r;
                    let wgt = wi * wj;
                    for c in 0..ch {
                        acc[c] += wgt * f64::from(img.get_clamped(sx, sy, c));
                    }
                }
            }
            for c in 0..ch {
                px[c] = round_u8(acc[c]);
            }
        }
    });
    RasterImage::new(w, h, ch, out).expect("same shape as input")
}

/// Whole-image separable blur with the bank filter for `sigma`.
pub fn blur_uniform(img: &RasterImage, sigma: f64) -> Result<RasterImage> {
    let len = filter_length(sigma);
    if len == 1 {
        return Ok(img.clone());
    }
    Ok(convolve_separable(
        img,
        &gaussian_kernel(representative_sigma(len), len),
    ))
}

/// Horizontal then vertical pass of `filter` over the whole image, in 64-bit
/// reals with clamp-to-edge borders, rounded once at the end.
pub fn convolve_separable(img: &RasterImage, filter: &[f64]) -> RasterImage {
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let r = (filter.len() / 2) as isize;
    let mut horizontal = vec![0f64; w * h * ch];
    horizontal
        .par_chunks_mut(w * ch)
        .enumerate()
        .for_each(|(y, row)| {
            for x in 0..w {
                for c in 0..ch {
                    row[x * ch + c] = filter
                        .iter()
                        .enumerate()
                        .map(|(k, wk)| {
                            wk * f64::from(img.get_clamped(
                                x as isize + k as isize - r,
                                y as isize,
                                c,
                            ))
                        })
                        .sum();
                }
            }
        });
    let mut out = vec![0u8; w * h * ch];
    out.par_chunks_mut(w * ch).enumerate().for_each(|(y, row)| {
        for x in 0..w {
            for c in 0..ch {
                let v: f64 = filter
                    .iter()
                    .enumerate()
                    .map(|(k, wk)| {
                        let sy = (y as isize + k as isize - r).clamp(0, h as isize - 1) as usize;
                        wk * horizontal[(sy * w + x) * ch + c]
                    })
                    .sum();
                row[x * ch + c] = round_u8(v);
            }
        }
    });
    RasterImage::new(w, h, ch, out).expect("same shape as input")
}

fn round_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}
