use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use foveate::config::parse_point;

#[derive(Debug, Parser)]
#[command(
    name = "foveate",
    version,
    about = "Block-wise foveated image rendering"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Block-wise foveated render.
    Foveate(RenderArgs),
    /// Exact per-pixel Gaussian foveation (slow reference).
    Oracle(RenderArgs),
    /// Gaussian-pyramid foveation baseline.
    Pyramid(RenderArgs),
    /// Print the filter bank and blur grid for a frame.
    Grid(GridArgs),
    /// SSIM map and statistics between two images or two directories.
    Ssim(SsimArgs),
    /// Operations-per-pixel and memory sweep as CSV.
    Cost(CostArgs),
    /// Timing sweep as CSV.
    Bench(BenchArgs),
    /// Serve frames over HTTP and WebSocket.
    Serve(ServeArgs),
}

/// Inputs to the σ field, shared by every rendering command.
#[derive(Debug, Clone, Args)]
pub struct FoveationArgs {
    /// Key=value parameter file; flags override it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Fragment side in pixels.
    #[arg(long, value_name = "PX")]
    pub fragment: Option<usize>,
    /// Gaze point; defaults to the image center.
    #[arg(long, value_name = "X,Y", value_parser = parse_point, allow_hyphen_values = true)]
    pub fixation: Option<(i64, i64)>,
    /// Eccentricity in degrees at the image corners.
    #[arg(long, value_name = "DEG", conflicts_with = "map")]
    pub e_corner: Option<f64>,
    /// Blur multiplier; 0 disables foveation.
    #[arg(long, conflicts_with = "map")]
    pub strength: Option<f64>,
    /// Single-channel density map (bright = sharp) used instead of the retinal model.
    #[arg(long, value_name = "FILE")]
    pub map: Option<PathBuf>,
    /// σ in pixels where the density map is black.
    #[arg(long, value_name = "PX", requires = "map", default_value_t = 8.0)]
    pub sigma_max: f64,
    /// Renderer threads.
    #[arg(long, value_name = "N")]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, short)]
    pub output: PathBuf,
    #[command(flatten)]
    pub foveation: FoveationArgs,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Image whose size defines the grid.
    #[arg(long, short, required_unless_present = "size", conflicts_with = "size")]
    pub input: Option<PathBuf>,
    /// Frame size instead of an image.
    #[arg(long, value_name = "WxH", value_parser = parse_size)]
    pub size: Option<(usize, usize)>,
    /// Write the grid as JSON here instead of printing the index matrix.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub foveation: FoveationArgs,
}

#[derive(Debug, Args)]
pub struct SsimArgs {
    /// Reference image, or directory of references.
    #[arg(long = "ref", value_name = "PATH")]
    pub reference: PathBuf,
    /// Test image, or directory with files of the same names.
    #[arg(long, value_name = "PATH")]
    pub test: PathBuf,
    /// Where to write the SSIM map (averaged over pairs for directories).
    #[arg(long, default_value = "ssim_map.png")]
    pub map: PathBuf,
}

#[derive(Debug, Args)]
pub struct CostArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [4usize, 8, 16, 32, 64])]
    pub fragments: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 3, 7, 15, 31, 63, 99, 133, 175, 199])]
    pub filters: Vec<usize>,
    /// Shared-memory budget in bytes.
    #[arg(long, default_value_t = foveate::cost::DEFAULT_SHARED_BUDGET)]
    pub budget: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Images to time; a procedural image of --size is used when absent.
    #[arg(long, short)]
    pub input: Vec<PathBuf>,
    #[arg(long, value_name = "WxH", value_parser = parse_size, default_value = "1024x1024")]
    pub size: (usize, usize),
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 16, 32])]
    pub fragments: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [5.0f64, 10.0, 20.0, 40.0])]
    pub e_corners: Vec<f64>,
    /// Gaze positions: center, corner or X:Y.
    #[arg(long, value_delimiter = ',', default_values_t = ["center".to_string(), "corner".to_string()])]
    pub gaze: Vec<String>,
    #[arg(long, value_delimiter = ',', default_values_t = ["blockwise".to_string(), "pyramid".to_string()])]
    pub methods: Vec<String>,
    #[arg(long, default_value_t = foveate::bench::MIN_WARMUP)]
    pub warmup: usize,
    #[arg(long, default_value_t = foveate::bench::MIN_ITERATIONS)]
    pub iterations: usize,
    #[arg(long, value_name = "N")]
    pub workers: Option<usize>,
    /// Parameter file for the remaining model constants.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Source image.
    #[arg(long, alias = "input")]
    pub image: PathBuf,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    /// Viewer build directory.
    #[arg(long, value_name = "DIR")]
    pub assets: Option<PathBuf>,
    /// Initial method: blockwise, pyramid, oracle or off.
    #[arg(long, default_value = "blockwise")]
    pub method: foveate_stream::RenderMethod,
    #[command(flatten)]
    pub foveation: FoveationArgs,
}

pub fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let w: usize = w
        .trim()
        .parse()
        .map_err(|_| format!("bad width in {s:?}"))?;
    let h: usize = h
        .trim()
        .parse()
        .map_err(|_| format!("bad height in {s:?}"))?;
    if w == 0 || h == 0 {
        return Err(format!("size must be positive, got {s:?}"));
    }
    Ok((w, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn sizes() {
        assert_eq!(parse_size("1920x1080"), Ok((1920, 1080)));
        assert_eq!(parse_size("8X4"), Ok((8, 4)));
        assert!(parse_size("0x4").is_err());
        assert!(parse_size("12").is_err());
    }

    #[test]
    fn map_excludes_retinal_flags() {
        let err = Cli::try_parse_from([
            "foveate",
            "foveate",
            "-i",
            "a.png",
            "-o",
            "b.png",
            "--map",
            "m.png",
            "--e-corner",
            "20",
        ])
        .unwrap_err();
        assert_eq!(err.kind(), clap::error::ErrorKind::ArgumentConflict);
    }

    #[test]
    fn negative_fixations_parse() {
        let cli = Cli::try_parse_from([
            "foveate",
            "foveate",
            "-i",
            "a.png",
            "-o",
            "b.png",
            "--fixation",
            "-5,7",
        ])
        .unwrap();
        let Command::Foveate(args) = cli.command else {
            panic!("wrong subcommand");
        };
        assert_eq!(args.foveation.fixation, Some((-5, 7)));
    }
}
