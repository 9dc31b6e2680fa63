//! Retinal blur-strength model.
//!
//! Pixel distance from the fixation maps linearly to eccentricity, the
//! contrast-threshold model gives the highest resolvable spatial frequency
//! at that eccentricity, and the Gaussian whose frequency-domain standard
//! deviation equals that cutoff supplies the blur strength σ. Arbitrary
//! density maps can replace the model as the source of σ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::RasterImage;
use crate::tiling::Tiling;

/// Eccentricity (degrees) assigned to the image corner by default. Chosen so
/// that a 1920x1080 image with 32 px fragments and central gaze splits into
/// 26 pooling regions.
pub const DEFAULT_E_CORNER: f64 = 60.0;

/// Retinal-model constants and rendering knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoveationParams {
    /// Spatial-frequency decay constant.
    pub alpha: f64,
    /// Half-resolution eccentricity, degrees.
    pub e2: f64,
    /// Minimum contrast threshold.
    pub ct0: f64,
    /// Eccentricity of the image corner, degrees.
    pub e_corner: f64,
    /// Maximum resolvable frequency in cycles/degree. `None` pins it to the
    /// foveal cutoff so the fovea maps to Nyquist.
    pub f_max: Option<f64>,
    /// Multiplier on σ.
    pub strength: f64,
    /// Fragment side in pixels.
    pub fragment_size: usize,
    /// Gaze point in pixels; `None` means the image center.
    pub fixation: Option<(i64, i64)>,
}

impl Default for FoveationParams {
    fn default() -> Self {
        Self {
            alpha: 0.106,
            e2: 2.3,
            ct0: 1.0 / 64.0,
            e_corner: DEFAULT_E_CORNER,
            f_max: None,
            strength: 1.0,
            fragment_size: 32,
            fixation: None,
        }
    }
}

impl FoveationParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParam(msg));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be > 0, got {}", self.alpha));
        }
        if !(self.e2 > 0.0 && self.e2.is_finite()) {
            return bad(format!("e2 must be > 0, got {}", self.e2));
        }
        if !(self.ct0 > 0.0 && self.ct0 < 1.0) {
            return bad(format!("ct0 must lie in (0, 1), got {}", self.ct0));
        }
        if !(self.e_corner >= 0.0 && self.e_corner.is_finite()) {
            return bad(format!("e_corner must be >= 0, got {}", self.e_corner));
        }
        if let Some(f) = self.f_max {
            if !(f > 0.0 && f.is_finite()) {
                return bad(format!("f_max must be > 0, got {f}"));
            }
        }
        if !(self.strength >= 0.0 && self.strength.is_finite()) {
            return bad(format!("strength must be >= 0, got {}", self.strength));
        }
        if self.fragment_size < 4 {
            return bad(format!(
                "fragment size must be >= 4, got {}",
                self.fragment_size
            ));
        }
        Ok(())
    }

    /// Effective maximum frequency in cycles/degree.
    pub fn f_max(&self) -> f64 {
        self.f_max.unwrap_or_else(|| cutoff_cpd(0.0, self))
    }

    /// Fixation in pixels, defaulting to `(w/2, h/2)`; errors when outside.
    pub fn resolve_fixation(&self, dims: (usize, usize)) -> Result<(usize, usize)> {
        let (w, h) = dims;
        let (x, y) = self.fixation.unwrap_or((w as i64 / 2, h as i64 / 2));
        if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
            return Err(Error::FixationOutOfBounds {
                x,
                y,
                width: w,
                height: h,
            });
        }
        Ok((x as usize, y as usize))
    }
}

/// Eccentricity in degrees of `point`, proportional to its distance from the
/// fixation. The image half-diagonal maps to `e_corner` wherever the
/// fixation sits.
pub fn eccentricity_of(
    point: (f64, f64),
    image: (usize, usize),
    fixation: (f64, f64),
    e_corner: f64,
) -> f64 {
    let d_corner = half_diagonal(image);
    let d = (point.0 - fixation.0).hypot(point.1 - fixation.1);
    d / d_corner * e_corner
}

fn half_diagonal(image: (usize, usize)) -> f64 {
    (image.0 as f64 / 2.0).hypot(image.1 as f64 / 2.0)
}

/// Contrast needed to detect a grating of `f` cycles/degree at eccentricity
/// `e`. Values above 1 mean undetectable at any contrast.
pub fn contrast_threshold(f: f64, e: f64, p: &FoveationParams) -> f64 {
    p.ct0 * (p.alpha * f * (e + p.e2) / p.e2).exp()
}

/// Highest resolvable frequency (cycles/degree) at eccentricity `e`.
pub fn cutoff_cpd(e: f64, p: &FoveationParams) -> f64 {
    p.e2 / (p.alpha * (e + p.e2)) * (1.0 / p.ct0).ln()
}

/// Converts cycles/degree to cycles/pixel, with `f_max` at 0.5 cycles/pixel.
pub fn cutoff_cpp(f_deg: f64, p: &FoveationParams) -> f64 {
    0.5 * f_deg / p.f_max()
}

/// Blur σ in pixels at eccentricity `e`.
pub fn sigma_at(e: f64, p: &FoveationParams) -> Result<f64> {
    if !e.is_finite() || e < 0.0 {
        return Err(Error::InvalidParam(format!(
            "eccentricity must be finite and >= 0, got {e}"
        )));
    }
    let f_pix = cutoff_cpp(cutoff_cpd(e, p), p);
    Ok(p.strength / (2.0 * std::f64::consts::PI * f_pix))
}

/// Per-fragment blur strengths on a shifted tiling.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaField {
    pub tiling: Tiling,
    /// Row-major, one σ per cell.
    pub sigma: Vec<f64>,
}

impl SigmaField {
    pub fn grid_width(&self) -> usize {
        self.tiling.cols
    }

    pub fn grid_height(&self) -> usize {
        self.tiling.rows
    }

    pub fn at(&self, col: usize, row: usize) -> f64 {
        self.sigma[self.tiling.cell_index(col, row)]
    }

    fn from_sampler(tiling: Tiling, sample: impl Fn(f64, f64) -> f64) -> Self {
        let sigma = tiling
            .cells()
            .map(|(c, r)| {
                let (mx, my) = tiling.cell_rect(c, r).midpoint();
                sample(mx, my)
            })
            .collect();
        Self { tiling, sigma }
    }
}

/// Source of per-location blur strength.
#[derive(Debug, Clone)]
pub enum BlurSource {
    /// Contrast-sensitivity model centered on a fixation.
    Retinal {
        params: FoveationParams,
        fixation: (usize, usize),
        dims: (usize, usize),
    },
    /// Density map: bright is dense (sharp), dark is sparse (blurred).
    Density {
        map: RasterImage,
        sigma_max: f64,
        dims: (usize, usize),
    },
}

impl BlurSource {
    pub fn retinal(params: &FoveationParams, dims: (usize, usize)) -> Result<Self> {
        params.validate()?;
        let fixation = params.resolve_fixation(dims)?;
        Ok(Self::Retinal {
            params: params.clone(),
            fixation,
            dims,
        })
    }

    pub fn density(map: &RasterImage, sigma_max: f64, dims: (usize, usize)) -> Result<Self> {
        if map.channels() != 1 {
            return Err(Error::InvalidParam(format!(
                "density map must be single-channel, got {} channels",
                map.channels()
            )));
        }
        if !(sigma_max >= 0.0 && sigma_max.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "sigma_max must be finite and >= 0, got {sigma_max}"
            )));
        }
        Ok(Self::Density {
            map: map.clone(),
            sigma_max,
            dims,
        })
    }

    /// σ at a point given in pixel-center coordinates.
    pub fn sigma(&self, x: f64, y: f64) -> f64 {
        match self {
            BlurSource::Retinal {
                params,
                fixation,
                dims,
            } => {
                let fix = (fixation.0 as f64, fixation.1 as f64);
                let e = eccentricity_of((x, y), *dims, fix, params.e_corner);
                sigma_at(e, params).expect("finite eccentricity")
            }
            BlurSource::Density {
                map,
                sigma_max,
                dims,
            } => {
                let v = bilinear_sample(map, *dims, x, y);
                (sigma_max * (1.0 - v / 255.0)).max(0.0)
            }
        }
    }

    /// One σ per fragment midpoint.
    pub fn field(&self, tiling: Tiling) -> SigmaField {
        SigmaField::from_sampler(tiling, |x, y| self.sigma(x, y))
    }

    /// One σ per pixel, row-major.
    pub fn per_pixel(&self) -> Vec<f64> {
        let (w, h) = self.dims();
        (0..h)
            .flat_map(|y| (0..w).map(move |x| (x, y)))
            .map(|(x, y)| self.sigma(x as f64, y as f64))
            .collect()
    }

    pub fn dims(&self) -> (usize, usize) {
        match self {
            BlurSource::Retinal { dims, .. } | BlurSource::Density { dims, .. } => *dims,
        }
    }
}

/// Samples a gray map stretched over an image of `dims` at image-pixel
/// coordinate `(x, y)`, bilinearly with clamped edges.
fn bilinear_sample(map: &RasterImage, dims: (usize, usize), x: f64, y: f64) -> f64 {
    let (mw, mh) = map.dims();
    let u = ((x + 0.5) * mw as f64 / dims.0 as f64 - 0.5).clamp(0.0, (mw - 1) as f64);
    let v = ((y + 0.5) * mh as f64 / dims.1 as f64 - 0.5).clamp(0.0, (mh - 1) as f64);
    let (u0, v0) = (u.floor() as usize, v.floor() as usize);
    let (u1, v1) = ((u0 + 1).min(mw - 1), (v0 + 1).min(mh - 1));
    let (fu, fv) = (u - u0 as f64, v - v0 as f64);
    let s = |a: usize, b: usize| f64::from(map.get(a, b, 0));
    let top = s(u0, v0) * (1.0 - fu) + s(u1, v0) * fu;
    let bottom = s(u0, v1) * (1.0 - fu) + s(u1, v1) * fu;
    top * (1.0 - fv) + bottom * fv
}

/// σ field from the retinal model for an image of `dims` tiled with the
/// params' fragment size and the given shift.
pub fn build_sigma_field(
    dims: (usize, usize),
    params: &FoveationParams,
    shift: (usize, usize),
) -> Result<SigmaField> {
    let source = BlurSource::retinal(params, dims)?;
    Ok(source.field(Tiling::new(dims.0, dims.1, params.fragment_size, shift)))
}

/// σ field from a single-channel density map, resampled to fragment midpoints.
pub fn ingest_density_map(
    map: &RasterImage,
    sigma_max: f64,
    dims: (usize, usize),
    fragment_size: usize,
    shift: (usize, usize),
) -> Result<SigmaField> {
    let source = BlurSource::density(map, sigma_max, dims)?;
    Ok(source.field(Tiling::new(dims.0, dims.1, fragment_size, shift)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::compute_fragment_shift;
    use std::f64::consts::PI;

    fn defaults() -> FoveationParams {
        FoveationParams::default()
    }

    #[test]
    fn eccentricity_examples() {
        let dims = (1920, 1080);
        let c = (960.0, 540.0);
        assert_eq!(eccentricity_of(c, dims, c, 20.0), 0.0);
        assert!((eccentricity_of((0.0, 0.0), dims, c, 20.0) - 20.0).abs() < 1e-12);
        let half = half_diagonal(dims) / 2.0;
        let e = eccentricity_of((960.0 + half, 540.0), dims, c, 20.0);
        assert!((e - 10.0).abs() < 1e-12);
    }

    #[test]
    fn eccentricity_is_translation_invariant() {
        let dims = (300, 200);
        let base = eccentricity_of((10.0, 20.0), dims, (150.0, 80.0), 30.0);
        let moved = eccentricity_of((47.0, -3.0), dims, (187.0, 57.0), 30.0);
        assert!((base - moved).abs() < 1e-12);
    }

    #[test]
    fn foveal_cutoff_matches_direct_evaluation() {
        // ln(64) / 0.106
        let expected = 64f64.ln() / 0.106;
        let got = cutoff_cpd(0.0, &defaults());
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 39.2347).abs() < 1e-3);
    }

    #[test]
    fn cutoff_halves_at_e2() {
        let p = defaults();
        let ratio = cutoff_cpd(p.e2, &p) / cutoff_cpd(0.0, &p);
        assert!((ratio - 0.5).abs() < 1e-12);
        assert!((cutoff_cpd(p.e2, &p) - 19.6174).abs() < 1e-3);
        assert!(cutoff_cpd(1e6, &p) < 1e-3);
    }

    #[test]
    fn threshold_is_one_at_cutoff() {
        let p = defaults();
        for e in [0.0, 1.0, 2.3, 10.0, 40.0] {
            let ct = contrast_threshold(cutoff_cpd(e, &p), e, &p);
            assert!((ct - 1.0).abs() < 1e-9, "e={e} ct={ct}");
        }
        for e in [0.0, 5.0, 30.0] {
            assert_eq!(contrast_threshold(0.0, e, &p), 1.0 / 64.0);
        }
    }

    #[test]
    fn threshold_monotone_in_frequency_and_eccentricity() {
        let p = defaults();
        for i in 0..20 {
            for j in 0..20 {
                let (f, e) = (i as f64 * 2.0, j as f64 * 3.0);
                let base = contrast_threshold(f, e, &p);
                assert!(contrast_threshold(f + 1.0, e, &p) > base);
                if f > 0.0 {
                    assert!(contrast_threshold(f, e + 1.0, &p) > base);
                }
            }
        }
    }

    #[test]
    fn cycles_per_pixel() {
        let p = defaults();
        assert_eq!(cutoff_cpp(p.f_max(), &p), 0.5);
        assert_eq!(cutoff_cpp(0.0, &p), 0.0);
        assert!((cutoff_cpp(cutoff_cpd(p.e2, &p), &p) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn sigma_chain() {
        let p = defaults();
        let s0 = sigma_at(0.0, &p).unwrap();
        assert!((s0 - 1.0 / PI).abs() < 1e-12);
        let s2 = sigma_at(p.e2, &p).unwrap();
        assert!((s2 - 2.0 / PI).abs() < 1e-12);
        assert!((s2 / s0 - 2.0).abs() < 1e-12);
        let zero = FoveationParams {
            strength: 0.0,
            ..defaults()
        };
        assert_eq!(sigma_at(17.0, &zero).unwrap(), 0.0);
        assert!(sigma_at(f64::NAN, &p).is_err());
        assert!(sigma_at(f64::INFINITY, &p).is_err());
    }

    #[test]
    fn validate_rejects_bad_params() {
        let p = defaults();
        assert!(p.validate().is_ok());
        for bad in [
            FoveationParams {
                alpha: 0.0,
                ..p.clone()
            },
            FoveationParams {
                e2: -1.0,
                ..p.clone()
            },
            FoveationParams {
                ct0: 1.0,
                ..p.clone()
            },
            FoveationParams {
                e_corner: -0.1,
                ..p.clone()
            },
            FoveationParams {
                f_max: Some(0.0),
                ..p.clone()
            },
            FoveationParams {
                strength: f64::NAN,
                ..p.clone()
            },
            FoveationParams {
                fragment_size: 3,
                ..p.clone()
            },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn fixation_resolution() {
        let p = defaults();
        assert_eq!(p.resolve_fixation((1920, 1080)).unwrap(), (960, 540));
        let off = FoveationParams {
            fixation: Some((1920, 5)),
            ..defaults()
        };
        assert!(matches!(
            off.resolve_fixation((1920, 1080)),
            Err(Error::FixationOutOfBounds { .. })
        ));
    }

    #[test]
    fn field_examples() {
        let p = FoveationParams {
            e_corner: 20.0,
            ..defaults()
        };
        let dims = (1920, 1080);
        let shift = compute_fragment_shift((960, 540), 32);
        let field = build_sigma_field(dims, &p, shift).unwrap();
        assert!(field.grid_width() >= 60 && field.grid_height() >= 34);
        let (c, r) = field.tiling.cell_of(960, 540);
        let (mx, my) = field.tiling.cell_rect(c, r).midpoint();
        assert!((mx - 960.0).abs() <= 0.5 && (my - 540.0).abs() <= 0.5);
        let s0 = sigma_at(0.0, &p).unwrap();
        assert!((field.at(c, r) - s0).abs() < 0.01);

        // Non-decreasing with midpoint distance from the fixation.
        let mut pairs: Vec<(f64, f64)> = field
            .tiling
            .cells()
            .map(|(c, r)| {
                let (x, y) = field.tiling.cell_rect(c, r).midpoint();
                ((x - 960.0).hypot(y - 540.0), field.at(c, r))
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!(pairs.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-12));

        let zero = FoveationParams { strength: 0.0, ..p };
        let z = build_sigma_field(dims, &zero, shift).unwrap();
        assert!(z.sigma.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn centered_field_is_symmetric() {
        let p = FoveationParams {
            fragment_size: 16,
            ..defaults()
        };
        let dims = (256, 256);
        let shift = compute_fragment_shift((128, 128), 16);
        let f = build_sigma_field(dims, &p, shift).unwrap();
        let (cols, rows) = (f.grid_width(), f.grid_height());
        // Midpoints sit half a pixel off the fixation, so mirror pairs agree
        // to within one pixel's worth of σ slope.
        let slope = sigma_at(p.e_corner, &p).unwrap() / half_diagonal(dims);
        for r in 0..rows {
            for c in 0..cols {
                let a = f.at(c, r);
                let b = f.at(cols - 1 - c, rows - 1 - r);
                let t = f.at(r, c);
                assert!((a - b).abs() <= 1.5 * slope + 1e-12, "({c},{r})");
                assert!((a - t).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn density_endpoints() {
        let dims = (64, 48);
        let white = RasterImage::filled(8, 8, 1, 255).unwrap();
        let black = RasterImage::filled(8, 8, 1, 0).unwrap();
        let fw = ingest_density_map(&white, 6.0, dims, 8, (3, 2)).unwrap();
        assert!(fw.sigma.iter().all(|&s| s == 0.0));
        let fb = ingest_density_map(&black, 6.0, dims, 8, (3, 2)).unwrap();
        assert!(fb.sigma.iter().all(|&s| s == 6.0));
    }

    #[test]
    fn density_linear_ramp() {
        // A 2x1 map [0, 255] spread over a 4-pixel-wide image: the image
        // center (x = 1.5) samples exactly halfway between the two texels.
        let map = RasterImage::new(2, 1, 1, vec![0, 255]).unwrap();
        let src = BlurSource::density(&map, 4.0, (4, 1)).unwrap();
        let s = src.sigma(1.5, 0.0);
        assert!((s - 2.0).abs() <= 4.0 / 255.0, "{s}");
    }

    #[test]
    fn density_errors() {
        let rgb = RasterImage::filled(4, 4, 3, 0).unwrap();
        assert!(ingest_density_map(&rgb, 1.0, (8, 8), 4, (0, 0)).is_err());
        let gray = RasterImage::filled(4, 4, 1, 0).unwrap();
        assert!(ingest_density_map(&gray, -1.0, (8, 8), 4, (0, 0)).is_err());
    }
}
