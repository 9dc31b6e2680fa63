//! Renders the per-pixel oracle next to the block-wise result and reports
//! their SSIM.

use foveate::fixtures::{synthetic, Pattern};
use foveate::{foveate, foveate_exact, save_image, ssim_map, DensityInput, FoveationParams};

fn main() -> foveate::Result<()> {
    let img = synthetic(Pattern::Gratings, 384, 384, 3);
    let params = FoveationParams {
        fragment_size: 16,
        ..Default::default()
    };

    let exact = foveate_exact(&img, &params, DensityInput::None)?;
    let blocks = foveate(&img, &params, DensityInput::None)?;
    let map = ssim_map(&exact, &blocks.image)?;

    save_image(&exact, "oracle.png")?;
    save_image(&blocks.image, "blockwise.png")?;
    save_image(&map.to_raster(), "ssim_map.png")?;
    print!("{}", map.stats_text());
    Ok(())
}
