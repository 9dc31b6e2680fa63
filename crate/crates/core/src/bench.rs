//! Timing sweeps over image size, fragment size, foveation strength, gaze
//! position and method.
//!
//! Only the transform is timed: for the block-wise method the convolution
//! (planning excluded), for the pyramid the level build plus sampling.

use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;

use crate::blockwise::{plan_frame, render, DensityInput};
use crate::error::{Error, Result};
use crate::fixtures::{synthetic, Pattern};
use crate::imaging::{load_image, RasterImage};
use crate::pyramid::{build_pyramid, full_depth, sample_foveated, PRE_BLUR_SIGMA};
use crate::retinal::{BlurSource, FoveationParams};

pub const MIN_WARMUP: usize = 3;
pub const MIN_ITERATIONS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub enum BenchSource {
    File(PathBuf),
    /// Procedural clouds image of the given size.
    Synthetic {
        width: usize,
        height: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Blockwise,
    Pyramid,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Blockwise => "blockwise",
            Method::Pyramid => "pyramid",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "blockwise" => Ok(Method::Blockwise),
            "pyramid" => Ok(Method::Pyramid),
            other => Err(Error::InvalidParam(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gaze {
    Center,
    /// Top-left pixel.
    Corner,
    At(usize, usize),
}

impl Gaze {
    fn resolve(self, dims: (usize, usize)) -> (usize, usize) {
        match self {
            Gaze::Center => (dims.0 / 2, dims.1 / 2),
            Gaze::Corner => (0, 0),
            Gaze::At(x, y) => (x.min(dims.0 - 1), y.min(dims.1 - 1)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sources: Vec<BenchSource>,
    pub fragments: Vec<usize>,
    pub e_corners: Vec<f64>,
    pub gazes: Vec<Gaze>,
    pub methods: Vec<Method>,
    /// Renderer threads; `None` uses rayon's default.
    pub workers: Option<usize>,
    pub warmup: usize,
    pub iterations: usize,
    /// Remaining model parameters (strength, α, ...).
    pub base: FoveationParams,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sources: vec![BenchSource::Synthetic {
                width: 1024,
                height: 1024,
            }],
            fragments: vec![32],
            e_corners: vec![crate::retinal::DEFAULT_E_CORNER],
            gazes: vec![Gaze::Center],
            methods: vec![Method::Blockwise, Method::Pyramid],
            workers: None,
            warmup: MIN_WARMUP,
            iterations: MIN_ITERATIONS,
            base: FoveationParams::default(),
        }
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub method: Method,
    pub image_w: usize,
    pub image_h: usize,
    /// Fragment size; 0 for the pyramid.
    pub fragment: usize,
    pub e_corner: f64,
    pub fixation_x: usize,
    pub fixation_y: usize,
    pub workers: usize,
    /// Pooling regions; pyramid levels for the pyramid.
    pub regions: usize,
    /// Longest filter in use; the pre-blur filter for the pyramid.
    pub max_filter: usize,
    pub ms_mean: f64,
    pub ms_std: f64,
}

/// Runs every cell of the sweep in a fixed order: source, method, fragment,
/// e_corner, gaze.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    if cfg.sources.is_empty()
        || cfg.fragments.is_empty()
        || cfg.e_corners.is_empty()
        || cfg.gazes.is_empty()
        || cfg.methods.is_empty()
    {
        return Err(Error::InvalidParam("benchmark sweep is empty".into()));
    }
    if cfg.warmup < MIN_WARMUP || cfg.iterations < MIN_ITERATIONS {
        return Err(Error::InvalidParam(format!(
            "need >= {MIN_WARMUP} warmup and >= {MIN_ITERATIONS} timed iterations"
        )));
    }
    let workers = cfg.workers.unwrap_or_else(rayon::current_num_threads);
    crate::with_workers(workers, || run_cells(cfg, workers))?
}

fn run_cells(cfg: &BenchConfig, workers: usize) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for source in &cfg.sources {
        let img = match source {
            BenchSource::File(p) => load_image(p)?,
            BenchSource::Synthetic { width, height } => {
                synthetic(Pattern::Clouds, *width, *height, 7)
            }
        };
        for &method in &cfg.methods {
            let fragments: &[usize] = match method {
                Method::Blockwise => &cfg.fragments,
                Method::Pyramid => &[0],
            };
            for &fragment in fragments {
                for &e_corner in &cfg.e_corners {
                    for &gaze in &cfg.gazes {
                        let fixation = gaze.resolve(img.dims());
                        let params = FoveationParams {
                            e_corner,
                            fragment_size: if fragment == 0 {
                                cfg.base.fragment_size
                            } else {
                                fragment
                            },
                            fixation: Some((fixation.0 as i64, fixation.1 as i64)),
                            ..cfg.base.clone()
                        };
                        let (times, regions, max_filter) = match method {
                            Method::Blockwise => time_blockwise(&img, &params, cfg)?,
                            Method::Pyramid => time_pyramid(&img, &params, cfg)?,
                        };
                        let (ms_mean, ms_std) = mean_std(&times);
                        rows.push(BenchRow {
                            method,
                            image_w: img.width(),
                            image_h: img.height(),
                            fragment,
                            e_corner,
                            fixation_x: fixation.0,
                            fixation_y: fixation.1,
                            workers,
                            regions,
                            max_filter,
                            ms_mean,
                            ms_std,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

fn time_blockwise(
    img: &RasterImage,
    params: &FoveationParams,
    cfg: &BenchConfig,
) -> Result<(Vec<f64>, usize, usize)> {
    let plan = plan_frame(img.dims(), params, DensityInput::None)?;
    let times = time_iterations(cfg, || render(img, &plan.grid, &plan.bank).map(drop))?;
    Ok((
        times,
        plan.grid.pooling_regions(),
        plan.grid.max_filter(&plan.bank),
    ))
}

fn time_pyramid(
    img: &RasterImage,
    params: &FoveationParams,
    cfg: &BenchConfig,
) -> Result<(Vec<f64>, usize, usize)> {
    let sigma = BlurSource::retinal(params, img.dims())?.per_pixel();
    let depth = full_depth(img.dims());
    let times = time_iterations(cfg, || {
        let pyr = build_pyramid(img, depth)?;
        sample_foveated(&pyr, &sigma).map(drop)
    })?;
    Ok((
        times,
        depth,
        crate::filter_bank::filter_length(PRE_BLUR_SIGMA),
    ))
}

fn time_iterations(cfg: &BenchConfig, mut f: impl FnMut() -> Result<()>) -> Result<Vec<f64>> {
    for _ in 0..cfg.warmup {
        f()?;
    }
    (0..cfg.iterations)
        .map(|_| {
            let start = Instant::now();
            f()?;
            Ok(start.elapsed().as_secs_f64() * 1e3)
        })
        .collect()
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

/// Renders rows as CSV with a header line.
pub fn to_csv(rows: &[BenchRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record([
        "method",
        "image_w",
        "image_h",
        "fragment",
        "e_corner",
        "fixation_x",
        "fixation_y",
        "workers",
        "regions",
        "max_filter",
        "ms_mean",
        "ms_std",
    ])?;
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}
