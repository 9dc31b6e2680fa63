//! Foveates an image around a gaze point.
//!
//! ```text
//! cargo run --release --example foveate_image -- [input.png] [output.png] [x,y]
//! ```
//!
//! Without an input a procedural 1024x768 image is used.

use std::env;

use foveate::config::parse_point;
use foveate::fixtures::{synthetic, Pattern};
use foveate::{foveate, load_image, save_image, DensityInput, FoveationParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = env::args().skip(1).collect();
    let img = match args.first() {
        Some(path) => load_image(path)?,
        None => synthetic(Pattern::Clouds, 1024, 768, 1),
    };
    let output = args.get(1).map(String::as_str).unwrap_or("foveated.png");
    let fixation = args.get(2).map(|s| parse_point(s)).transpose()?;

    let params = FoveationParams {
        fragment_size: 16,
        fixation,
        ..Default::default()
    };
    let out = foveate(&img, &params, DensityInput::None)?;
    save_image(&out.image, output)?;

    println!(
        "{}x{} -> {output}: {} pooling regions, longest filter {} taps, {:.2} ms",
        img.width(),
        img.height(),
        out.stats.regions,
        out.stats.max_filter,
        out.stats.render_ms
    );
    Ok(())
}
