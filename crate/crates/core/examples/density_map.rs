//! Foveation driven by a density map instead of the retinal model.
//!
//! The map is a horizontal band of high density (sharp) fading to the top
//! and bottom, like a visual streak. Pass a gray PNG/PGM to use your own.

use std::env;

use foveate::fixtures::{synthetic, Pattern};
use foveate::{foveate, load_image, save_image, DensityInput, FoveationParams, RasterImage};

fn main() -> foveate::Result<()> {
    let img = synthetic(Pattern::Mosaic, 640, 480, 9);
    let map = match env::args().nth(1) {
        Some(path) => load_image(path)?,
        None => RasterImage::from_fn(64, 48, 1, |_, y, _| {
            let d = (y as f64 - 23.5).abs() / 23.5;
            (255.0 * (1.0 - d).powf(2.0)).round() as u8
        })?,
    };
    let params = FoveationParams {
        fragment_size: 16,
        ..Default::default()
    };
    let out = foveate(
        &img,
        &params,
        DensityInput::Map {
            map: &map,
            sigma_max: 8.0,
        },
    )?;
    save_image(&map, "density.pgm")?;
    save_image(&out.image, "density_foveated.png")?;
    println!(
        "{} pooling regions, longest filter {}",
        out.stats.regions, out.stats.max_filter
    );
    Ok(())
}
