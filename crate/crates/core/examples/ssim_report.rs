//! Averaged SSIM map over the fixture set and its radial disparity profile.

use foveate::fixtures::fixture_set;
use foveate::{foveate, foveate_exact, mean_ssim_map, save_image, DensityInput, FoveationParams};

fn main() -> foveate::Result<()> {
    let size = 512;
    let params = FoveationParams {
        fragment_size: 16,
        ..Default::default()
    };
    let mut pairs = Vec::new();
    for (pattern, img) in fixture_set(size, size) {
        eprintln!("rendering {}", pattern.name());
        let exact = foveate_exact(&img, &params, DensityInput::None)?;
        let blocks = foveate(&img, &params, DensityInput::None)?.image;
        pairs.push((exact, blocks));
    }
    let avg = mean_ssim_map(&pairs)?;
    save_image(&avg.to_raster(), "ssim_mean.png")?;
    print!("{}", avg.stats_text());

    let c = (size / 2) as f64;
    println!("radius  disparity");
    for (r, d, _) in avg.radial_disparity((c, c), 16.0) {
        println!("{r:>6.0}  {d:.5}");
    }
    Ok(())
}
