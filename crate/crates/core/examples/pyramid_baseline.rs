//! Gaussian-pyramid foveation compared with the block-wise renderer, both
//! scored against the per-pixel oracle.

use foveate::fixtures::fixture_set;
use foveate::pyramid::{build_pyramid, foveate_pyramid, full_depth};
use foveate::{foveate, foveate_exact, ssim_map, DensityInput, FoveationParams};

fn main() -> foveate::Result<()> {
    let params = FoveationParams {
        fragment_size: 16,
        ..Default::default()
    };
    println!("{:<10} {:>9} {:>9}", "image", "pyramid", "blockwise");
    for (pattern, img) in fixture_set(256, 256) {
        let exact = foveate_exact(&img, &params, DensityInput::None)?;
        let pyr = foveate_pyramid(&img, &params, DensityInput::None)?;
        let blocks = foveate(&img, &params, DensityInput::None)?.image;
        println!(
            "{:<10} {:>9.4} {:>9.4}",
            pattern.name(),
            ssim_map(&exact, &pyr)?.mean,
            ssim_map(&exact, &blocks)?.mean
        );
    }

    let img = fixture_set(256, 256).remove(0).1;
    let levels = build_pyramid(&img, full_depth(img.dims()))?;
    let sizes: Vec<String> = levels
        .levels
        .iter()
        .map(|l| format!("{}x{}", l.width(), l.height()))
        .collect();
    println!("levels: {}", sizes.join(" "));
    Ok(())
}
