//! Block-wise foveated renderer.
//!
//! The image is cut into square fragments on a tiling shifted so that one
//! fragment is centered on the fixation. Every fragment is blurred with a
//! single Gaussian chosen from its midpoint's σ: the fragment plus its
//! filter-radius padding is convolved horizontally into a real-valued
//! intermediate buffer, which is convolved vertically and quantized once.
//! Fragments are independent, so they are rendered in parallel.

use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter_bank::{build_bank, FilterBank};
use crate::imaging::RasterImage;
use crate::retinal::{BlurSource, FoveationParams, SigmaField};
use crate::tiling::{compute_fragment_shift, Rect, Tiling};

/// Per-fragment filter assignment for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct BlurGrid {
    pub tiling: Tiling,
    /// Row-major filter index per cell.
    pub index: Vec<usize>,
    /// Cell containing the fixation; always assigned the identity filter.
    pub foveal_cell: (usize, usize),
}

impl BlurGrid {
    pub fn fragment_size(&self) -> usize {
        self.tiling.fragment
    }

    pub fn shift(&self) -> (usize, usize) {
        self.tiling.shift
    }

    pub fn index_at(&self, col: usize, row: usize) -> usize {
        self.index[self.tiling.cell_index(col, row)]
    }

    /// Number of distinct filters in use.
    pub fn pooling_regions(&self) -> usize {
        self.index.iter().collect::<BTreeSet<_>>().len()
    }

    /// Longest filter in use.
    pub fn max_filter(&self, bank: &FilterBank) -> usize {
        self.index
            .iter()
            .map(|&i| bank.lengths[i])
            .max()
            .unwrap_or(1)
    }

    pub fn dump(&self, bank: &FilterBank) -> GridDump {
        GridDump {
            width: self.tiling.width,
            height: self.tiling.height,
            fragment: self.tiling.fragment,
            shift: self.tiling.shift,
            cols: self.tiling.cols,
            rows: self.tiling.rows,
            foveal_cell: self.foveal_cell,
            pooling_regions: self.pooling_regions(),
            filter_lengths: bank.lengths.clone(),
            filter_sigmas: bank.sigmas.clone(),
            cumulative_sizes: bank.cumulative_sizes.clone(),
            index: self
                .index
                .chunks(self.tiling.cols)
                .map(<[usize]>::to_vec)
                .collect(),
        }
    }
}

/// Serializable snapshot of a grid and the bank it indexes into.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDump {
    pub width: usize,
    pub height: usize,
    pub fragment: usize,
    pub shift: (usize, usize),
    pub cols: usize,
    pub rows: usize,
    pub foveal_cell: (usize, usize),
    pub pooling_regions: usize,
    pub filter_lengths: Vec<usize>,
    pub filter_sigmas: Vec<f64>,
    pub cumulative_sizes: Vec<usize>,
    /// `rows` rows of `cols` filter indices.
    pub index: Vec<Vec<usize>>,
}

/// Padded tile geometry for one fragment and filter length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tile {
    pub fragment: Rect,
    pub radius: usize,
    pub tile_w: usize,
    pub tile_h: usize,
}

impl Tile {
    pub fn new(fragment: Rect, filter_len: usize) -> Self {
        let radius = (filter_len - 1) / 2;
        Self {
            fragment,
            radius,
            tile_w: fragment.width() + 2 * radius,
            tile_h: fragment.height() + 2 * radius,
        }
    }

    /// Samples held by the horizontal-pass result.
    pub fn intermediate_len(&self) -> usize {
        self.fragment.width() * self.tile_h
    }
}

/// Assembles the grid from a σ field and its quantized indices, forcing the
/// fixation fragment to the identity filter.
pub fn build_blur_grid(
    field: &SigmaField,
    bank: &FilterBank,
    indices: &[usize],
    fixation: (usize, usize),
    fragment: usize,
    shift: (usize, usize),
) -> Result<BlurGrid> {
    let t = field.tiling;
    if t.fragment != fragment || t.shift != shift {
        return Err(Error::DimensionMismatch(format!(
            "field tiling (F={}, shift={:?}) differs from requested (F={fragment}, shift={shift:?})",
            t.fragment, t.shift
        )));
    }
    if indices.len() != t.cell_count() || field.sigma.len() != t.cell_count() {
        return Err(Error::DimensionMismatch(format!(
            "{} indices for {} cells",
            indices.len(),
            t.cell_count()
        )));
    }
    if fixation.0 >= t.width || fixation.1 >= t.height {
        return Err(Error::FixationOutOfBounds {
            x: fixation.0 as i64,
            y: fixation.1 as i64,
            width: t.width,
            height: t.height,
        });
    }
    if let Some(&bad) = indices.iter().find(|&&i| i >= bank.len()) {
        return Err(Error::FilterIndexOutOfRange {
            index: bad,
            len: bank.len(),
        });
    }
    let foveal_cell = t.cell_of(fixation.0, fixation.1);
    let mut index = indices.to_vec();
    index[t.cell_index(foveal_cell.0, foveal_cell.1)] = 0;
    Ok(BlurGrid {
        tiling: t,
        index,
        foveal_cell,
    })
}

/// Everything needed to render a frame except the pixels.
#[derive(Debug, Clone)]
pub struct FramePlan {
    pub grid: BlurGrid,
    pub bank: FilterBank,
    pub field: SigmaField,
}

/// Where σ comes from when planning a frame.
#[derive(Debug, Clone, Copy)]
pub enum DensityInput<'a> {
    None,
    Map {
        map: &'a RasterImage,
        sigma_max: f64,
    },
}

/// Shift, σ field, bank and grid for an image of `dims`.
pub fn plan_frame(
    dims: (usize, usize),
    params: &FoveationParams,
    density: DensityInput<'_>,
) -> Result<FramePlan> {
    params.validate()?;
    let fixation = params.resolve_fixation(dims)?;
    let f = params.fragment_size;
    let shift = compute_fragment_shift(fixation, f);
    let tiling = Tiling::new(dims.0, dims.1, f, shift);
    let source = match density {
        DensityInput::None => BlurSource::retinal(params, dims)?,
        DensityInput::Map { map, sigma_max } => BlurSource::density(map, sigma_max, dims)?,
    };
    let field = source.field(tiling);
    let (bank, indices) = build_bank(&field);
    let grid = build_blur_grid(&field, &bank, &indices, fixation, f, shift)?;
    Ok(FramePlan { grid, bank, field })
}

/// Renders every fragment with its assigned filter.
///
/// Runs on the current rayon pool; the result does not depend on the number
/// of workers.
pub fn render(img: &RasterImage, grid: &BlurGrid, bank: &FilterBank) -> Result<RasterImage> {
    check_render_inputs(img, grid, bank)?;
    let t = grid.tiling;
    let channels = img.channels();
    let filters: Vec<Vec<f32>> = bank
        .filters
        .iter()
        .map(|f| f.iter().map(|&c| c as f32).collect())
        .collect();
    let cells: Vec<(usize, usize)> = t.cells().collect();
    let fragments: Vec<Vec<u8>> = cells
        .par_iter()
        .map_init(Scratch::default, |scratch, &(c, r)| {
            let rect = t.cell_rect(c, r);
            let filter = &filters[grid.index_at(c, r)];
            render_fragment(img, rect, filter, scratch)
        })
        .collect();

    let mut out = vec![0u8; img.data().len()];
    let stride = img.width() * channels;
    for (&(c, r), frag) in cells.iter().zip(&fragments) {
        let rect = t.cell_rect(c, r);
        let row_len = rect.width() * channels;
        for (i, y) in (rect.y0..rect.y1).enumerate() {
            let start = y * stride + rect.x0 * channels;
            out[start..start + row_len].copy_from_slice(&frag[i * row_len..(i + 1) * row_len]);
        }
    }
    RasterImage::new(img.width(), img.height(), channels, out)
}

/// [`render`] on a dedicated pool of `workers` threads.
pub fn render_with_workers(
    img: &RasterImage,
    grid: &BlurGrid,
    bank: &FilterBank,
    workers: usize,
) -> Result<RasterImage> {
    crate::with_workers(workers, || render(img, grid, bank))?
}

fn check_render_inputs(img: &RasterImage, grid: &BlurGrid, bank: &FilterBank) -> Result<()> {
    let t = grid.tiling;
    if (t.width, t.height) != img.dims() {
        return Err(Error::DimensionMismatch(format!(
            "grid covers {}x{}, image is {}x{}",
            t.width,
            t.height,
            img.width(),
            img.height()
        )));
    }
    if grid.index.len() != t.cell_count() {
        return Err(Error::DimensionMismatch(format!(
            "{} indices for {} cells",
            grid.index.len(),
            t.cell_count()
        )));
    }
    if let Some(&bad) = grid.index.iter().find(|&&i| i >= bank.len()) {
        return Err(Error::FilterIndexOutOfRange {
            index: bad,
            len: bank.len(),
        });
    }
    let (fc, fr) = grid.foveal_cell;
    if fc >= t.cols || fr >= t.rows {
        return Err(Error::FixationOutOfBounds {
            x: fc as i64,
            y: fr as i64,
            width: t.cols,
            height: t.rows,
        });
    }
    Ok(())
}

#[derive(Default)]
struct Scratch {
    row: Vec<f32>,
    intermediate: Vec<f32>,
}

/// Output pixels of one fragment, row-major and interleaved.
fn render_fragment(
    img: &RasterImage,
    rect: Rect,
    filter: &[f32],
    scratch: &mut Scratch,
) -> Vec<u8> {
    let ch = img.channels();
    let fw = rect.width();
    let fh = rect.height();
    let mut out = Vec::with_capacity(fw * fh * ch);
    if filter.len() == 1 {
        for y in rect.y0..rect.y1 {
            out.extend_from_slice(&img.row(y)[rect.x0 * ch..rect.x1 * ch]);
        }
        return out;
    }

    let tile = Tile::new(rect, filter.len());
    let r = tile.radius as isize;
    let (w, h) = (img.width() as isize, img.height() as isize);
    let padded_w = tile.tile_w;
    let row_stride = fw * ch;

    // Horizontal pass over every tile row, clamp-to-edge at image borders.
    scratch.row.resize(padded_w * ch, 0.0);
    scratch
        .intermediate
        .resize(tile.intermediate_len() * ch, 0.0);
    for ty in 0..tile.tile_h {
        let sy = (rect.y0 as isize + ty as isize - r).clamp(0, h - 1) as usize;
        let src = img.row(sy);
        for px in 0..padded_w {
            let sx = (rect.x0 as isize + px as isize - r).clamp(0, w - 1) as usize;
            for c in 0..ch {
                scratch.row[px * ch + c] = f32::from(src[sx * ch + c]);
            }
        }
        let dst = &mut scratch.intermediate[ty * row_stride..(ty + 1) * row_stride];
        dst.fill(0.0);
        for (k, &wk) in filter.iter().enumerate() {
            let src = &scratch.row[k * ch..k * ch + row_stride];
            for (d, &s) in dst.iter_mut().zip(src) {
                *d += wk * s;
            }
        }
    }

    // Vertical pass over the intermediate result; quantize once.
    let mut acc = vec![0f32; row_stride];
    for y in 0..fh {
        acc.fill(0.0);
        for (k, &wk) in filter.iter().enumerate() {
            let src = &scratch.intermediate[(y + k) * row_stride..(y + k + 1) * row_stride];
            for (a, &s) in acc.iter_mut().zip(src) {
                *a += wk * s;
            }
        }
        out.extend(acc.iter().map(|&v| quantize(v)));
    }
    out
}

/// Round half away from zero, saturating to the 8-bit range.
#[inline]
pub(crate) fn quantize(v: f32) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Timing and layout summary of one foveated frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderStats {
    pub render_ms: f64,
    pub regions: usize,
    pub max_filter: usize,
    pub fragment: usize,
}

/// A rendered frame with the plan that produced it.
#[derive(Debug, Clone)]
pub struct Foveated {
    pub image: RasterImage,
    pub grid: BlurGrid,
    pub bank: FilterBank,
    pub stats: RenderStats,
}

/// Plans and renders one frame. `render_ms` covers the convolution only.
pub fn foveate(
    img: &RasterImage,
    params: &FoveationParams,
    density: DensityInput<'_>,
) -> Result<Foveated> {
    let plan = plan_frame(img.dims(), params, density)?;
    let start = Instant::now();
    let image = render(img, &plan.grid, &plan.bank)?;
    let render_ms = start.elapsed().as_secs_f64() * 1e3;
    let stats = RenderStats {
        render_ms,
        regions: plan.grid.pooling_regions(),
        max_filter: plan.grid.max_filter(&plan.bank),
        fragment: params.fragment_size,
    };
    Ok(Foveated {
        image,
        grid: plan.grid,
        bank: plan.bank,
        stats,
    })
}
