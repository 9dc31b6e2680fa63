//! Analytic cost and on-chip memory model of the tiled two-pass convolution.
//!
//! A fragment of F x F pixels convolved with a G-tap filter needs a padded
//! tile of side F + G - 1. The horizontal pass runs over F x (F + G - 1)
//! positions and the vertical pass over F x F, each costing G
//! multiply-accumulates. Shared memory holds the 8-bit tile plus the
//! 4-byte intermediate result; constant memory holds every filter
//! coefficient plus one offset per filter, 4 bytes each.

use serde::Serialize;

/// Per-block shared-memory budget of a compute-capability 6.1 GPU.
pub const DEFAULT_SHARED_BUDGET: usize = 48 * 1024;
/// Constant-memory size of the same device class.
pub const CONSTANT_MEMORY_BYTES: usize = 64 * 1024;

/// Side of the padded tile.
pub fn tile_side(fragment: usize, filter: usize) -> usize {
    fragment + filter - 1
}

/// Multiply-accumulates for one F x F fragment, one channel.
pub fn macs_per_fragment(fragment: usize, filter: usize) -> u64 {
    let (f, g) = (fragment as u64, filter as u64);
    let horizontal = f * tile_side(fragment, filter) as u64;
    let vertical = f * f;
    g * (horizontal + vertical)
}

/// Multiply-accumulates per output pixel per channel: `G (2 + (G-1)/F)`.
pub fn ops_per_output_pixel(fragment: usize, filter: usize) -> f64 {
    let (f, g) = (fragment as f64, filter as f64);
    g * (2.0 + (g - 1.0) / f)
}

/// Bytes of shared memory for the tile and the intermediate result.
pub fn shared_memory_bytes(fragment: usize, filter: usize) -> usize {
    let tile = tile_side(fragment, filter);
    tile * tile + 4 * fragment * tile
}

/// Bytes of constant memory for `total_coeffs` coefficients and
/// `num_filters` offsets.
pub fn constant_memory_bytes(total_coeffs: usize, num_filters: usize) -> usize {
    4 * (total_coeffs + num_filters)
}

/// Largest odd filter length whose tile fits in `shared_budget` bytes, or
/// `None` when even a single tap does not fit.
pub fn max_filter_size(fragment: usize, shared_budget: usize) -> Option<usize> {
    if shared_memory_bytes(fragment, 1) > shared_budget {
        return None;
    }
    let mut g = 1;
    while shared_memory_bytes(fragment, g + 2) <= shared_budget {
        g += 2;
    }
    Some(g)
}

/// Cost summary for one (fragment, filter) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub fragment: usize,
    pub filter: usize,
    pub ops_per_pixel: f64,
    pub shared_bytes: usize,
    pub constant_bytes: usize,
    pub fits_in_budget: bool,
}

impl CostReport {
    /// `constant_bytes` assumes a bank holding just this one filter.
    pub fn new(fragment: usize, filter: usize, shared_budget: usize) -> Self {
        let shared_bytes = shared_memory_bytes(fragment, filter);
        Self {
            fragment,
            filter,
            ops_per_pixel: ops_per_output_pixel(fragment, filter),
            shared_bytes,
            constant_bytes: constant_memory_bytes(filter, 1),
            fits_in_budget: shared_bytes <= shared_budget,
        }
    }
}

/// Every combination of `fragments` x `filters`, fragments outermost.
pub fn sweep(fragments: &[usize], filters: &[usize], shared_budget: usize) -> Vec<CostReport> {
    fragments
        .iter()
        .flat_map(|&f| {
            filters
                .iter()
                .map(move |&g| CostReport::new(f, g, shared_budget))
        })
        .collect()
}

/// CSV with one row per report.
pub fn sweep_csv(reports: &[CostReport]) -> crate::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in reports {
        w.serialize(r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| crate::Error::Other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}
