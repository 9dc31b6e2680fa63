//! Small timing sweep printed as CSV.

use foveate::bench::{run_benchmark, to_csv, BenchConfig, BenchSource, Gaze, Method};

fn main() -> foveate::Result<()> {
    let cfg = BenchConfig {
        sources: vec![BenchSource::Synthetic {
            width: 512,
            height: 512,
        }],
        fragments: vec![8, 16, 32],
        e_corners: vec![10.0, 40.0],
        gazes: vec![Gaze::Center, Gaze::Corner],
        methods: vec![Method::Blockwise, Method::Pyramid],
        ..Default::default()
    };
    print!("{}", to_csv(&run_benchmark(&cfg)?)?);
    Ok(())
}
