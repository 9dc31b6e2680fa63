//! Operations per pixel and shared-memory footprint over fragment and filter
//! sizes, plus the largest filter each fragment size admits.

use foveate::cost::{max_filter_size, sweep, sweep_csv, DEFAULT_SHARED_BUDGET};

fn main() -> foveate::Result<()> {
    let fragments = [4, 8, 16, 32, 64];
    let filters: Vec<usize> = (0..=20).map(|k| 10 * k + 1).collect();
    print!(
        "{}",
        sweep_csv(&sweep(&fragments, &filters, DEFAULT_SHARED_BUDGET))?
    );

    eprintln!("largest filter in {DEFAULT_SHARED_BUDGET} bytes:");
    for f in [8, 16, 32] {
        eprintln!(
            "  F={f:<3} {}",
            max_filter_size(f, DEFAULT_SHARED_BUDGET).unwrap_or(0)
        );
    }
    Ok(())
}
