//! Prints the blur grid for a full-HD frame: filter bank table, then the
//! grid as JSON.

use foveate::{plan_frame, DensityInput, FoveationParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let plan = plan_frame(
        (1920, 1080),
        &FoveationParams::default(),
        DensityInput::None,
    )?;
    eprint!("{}", plan.bank.to_table());
    eprintln!(
        "{} pooling regions over {}x{} fragments, shift {:?}",
        plan.grid.pooling_regions(),
        plan.grid.tiling.cols,
        plan.grid.tiling.rows,
        plan.grid.shift()
    );
    println!(
        "{}",
        serde_json::to_string_pretty(&plan.grid.dump(&plan.bank))?
    );
    Ok(())
}
