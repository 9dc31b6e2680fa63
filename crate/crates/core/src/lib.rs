//! Block-wise foveated rendering.
//!
//! An image is split into square fragments on a tiling centered on the gaze
//! point; each fragment is blurred with one separable Gaussian whose
//! strength follows a contrast-sensitivity model of the retina (or any
//! density map). The crate also carries the references used to validate it:
//! a per-pixel oracle, a Gaussian-pyramid baseline, SSIM maps, an analytic
//! cost model and a timing harness.
//!
//! ```no_run
//! use foveate::{foveate, load_image, save_image, DensityInput, FoveationParams};
//!
//! let img = load_image("photo.png")?;
//! let params = FoveationParams { fragment_size: 16, ..Default::default() };
//! let out = foveate(&img, &params, DensityInput::None)?;
//! println!("{} pooling regions in {:.2} ms", out.stats.regions, out.stats.render_ms);
//! save_image(&out.image, "foveated.png")?;
//! # Ok::<(), foveate::Error>(())
//! ```

pub mod bench;
pub mod blockwise;
pub mod config;
pub mod cost;
pub mod error;
pub mod filter_bank;
pub mod fixtures;
pub mod imaging;
pub mod pyramid;
pub mod quality;
pub mod reference;
pub mod retinal;
pub mod tiling;

pub use blockwise::{
    build_blur_grid, foveate, plan_frame, render, render_with_workers, BlurGrid, DensityInput,
    Foveated, FramePlan, GridDump, RenderStats, Tile,
};
pub use error::{Error, Result};
pub use filter_bank::{build_bank, gaussian_filter_1d, total_coefficients, FilterBank};
pub use imaging::{load_image, save_image, RasterImage};
pub use quality::{mean_ssim_map, ssim_map, SsimMap};
pub use reference::{blur_uniform, foveate_exact};
pub use retinal::{
    build_sigma_field, contrast_threshold, cutoff_cpd, cutoff_cpp, eccentricity_of,
    ingest_density_map, sigma_at, BlurSource, FoveationParams, SigmaField,
};
pub use tiling::{compute_fragment_shift, Rect, Tiling};

/// Runs `f` on a dedicated rayon pool of `workers` threads.
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Other(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
