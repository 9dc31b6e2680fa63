use std::error::Error;
use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Instant;

use foveate::bench::{run_benchmark, to_csv, BenchConfig, BenchSource, Gaze, Method};
use foveate::config::load_params;
use foveate::cost::{max_filter_size, sweep, sweep_csv};
use foveate::pyramid::foveate_pyramid;
use foveate::{
    foveate, foveate_exact, load_image, mean_ssim_map, plan_frame, save_image, ssim_map,
    DensityInput, FoveationParams, RasterImage,
};
use foveate_stream::ServiceConfig;

use crate::args::{BenchArgs, CostArgs, FoveationArgs, GridArgs, RenderArgs, ServeArgs, SsimArgs};

pub type CliResult = Result<(), Box<dyn Error>>;

#[derive(Debug, Clone, Copy)]
pub enum Renderer {
    Blockwise,
    Oracle,
    Pyramid,
}

pub fn params(args: &FoveationArgs) -> Result<FoveationParams, Box<dyn Error>> {
    let mut p = match &args.config {
        Some(path) => load_params(path)?,
        None => FoveationParams::default(),
    };
    if let Some(f) = args.fragment {
        p.fragment_size = f;
    }
    if let Some(xy) = args.fixation {
        p.fixation = Some(xy);
    }
    if let Some(e) = args.e_corner {
        p.e_corner = e;
    }
    if let Some(s) = args.strength {
        p.strength = s;
    }
    p.validate()?;
    Ok(p)
}

fn density_map(args: &FoveationArgs) -> Result<Option<RasterImage>, Box<dyn Error>> {
    args.map
        .as_ref()
        .map(load_image)
        .transpose()
        .map_err(Into::into)
}

fn density<'a>(map: &'a Option<RasterImage>, args: &FoveationArgs) -> DensityInput<'a> {
    match map {
        Some(map) => DensityInput::Map {
            map,
            sigma_max: args.sigma_max,
        },
        None => DensityInput::None,
    }
}

pub fn render(args: &RenderArgs, renderer: Renderer) -> CliResult {
    let img = load_image(&args.input)?;
    let p = params(&args.foveation)?;
    let map = density_map(&args.foveation)?;
    let input = density(&map, &args.foveation);
    match renderer {
        Renderer::Blockwise => {
            let out = foveate(&img, &p, input)?;
            save_image(&out.image, &args.output)?;
            println!("regions {}", out.stats.regions);
            println!("max_filter {}", out.stats.max_filter);
            println!("render_ms {:.3}", out.stats.render_ms);
        }
        Renderer::Oracle | Renderer::Pyramid => {
            let start = Instant::now();
            let out = match renderer {
                Renderer::Oracle => foveate_exact(&img, &p, input)?,
                _ => foveate_pyramid(&img, &p, input)?,
            };
            let ms = start.elapsed().as_secs_f64() * 1e3;
            save_image(&out, &args.output)?;
            println!("render_ms {ms:.3}");
        }
    }
    Ok(())
}

pub fn grid(args: &GridArgs) -> CliResult {
    let dims = match (&args.input, args.size) {
        (Some(path), _) => load_image(path)?.dims(),
        (None, Some(size)) => size,
        (None, None) => unreachable!("clap requires --input or --size"),
    };
    let p = params(&args.foveation)?;
    let map = density_map(&args.foveation)?;
    let plan = plan_frame(dims, &p, density(&map, &args.foveation))?;
    let g = &plan.grid;

    if let Some(out) = &args.output {
        let json = serde_json::to_string_pretty(&g.dump(&plan.bank))?;
        fs::write(out, json + "\n").map_err(|e| format!("{}: {e}", out.display()))?;
    }
    let (dx, dy) = g.shift();
    println!(
        "frame {}x{} fragment {} shift {dx},{dy} cells {}x{} foveal {},{} regions {}",
        dims.0,
        dims.1,
        g.fragment_size(),
        g.tiling.cols,
        g.tiling.rows,
        g.foveal_cell.0,
        g.foveal_cell.1,
        g.pooling_regions()
    );
    print!("{}", plan.bank.to_table());
    if args.output.is_none() {
        for r in 0..g.tiling.rows {
            let row: Vec<String> = (0..g.tiling.cols)
                .map(|c| g.index_at(c, r).to_string())
                .collect();
            println!("{}", row.join(" "));
        }
    }
    Ok(())
}

pub fn ssim(args: &SsimArgs) -> CliResult {
    let map = if args.reference.is_dir() {
        let pairs = directory_pairs(&args.reference, &args.test)?;
        let mut images = Vec::with_capacity(pairs.len());
        for (name, r, t) in pairs {
            let (r, t) = (load_image(&r)?, load_image(&t)?);
            let m = ssim_map(&r, &t)?;
            println!("{name} mean {:.6} min {:.6}", m.mean, m.min);
            images.push((r, t));
        }
        mean_ssim_map(&images)?
    } else {
        ssim_map(&load_image(&args.reference)?, &load_image(&args.test)?)?
    };
    save_image(&map.to_raster(), &args.map)?;
    print!("{}", map.stats_text());
    Ok(())
}

type Pair = (String, PathBuf, PathBuf);

/// Files in `reference` with a same-named file in `test`, sorted by name.
fn directory_pairs(reference: &Path, test: &Path) -> Result<Vec<Pair>, Box<dyn Error>> {
    if !test.is_dir() {
        return Err(format!(
            "{} is a directory but {} is not",
            reference.display(),
            test.display()
        )
        .into());
    }
    let mut pairs = Vec::new();
    for entry in fs::read_dir(reference).map_err(|e| format!("{}: {e}", reference.display()))? {
        let path = entry?.path();
        let is_image = matches!(
            path.extension()
                .and_then(|e| e.to_str())
                .map(str::to_ascii_lowercase)
                .as_deref(),
            Some("png" | "ppm" | "pgm" | "pnm")
        );
        if !is_image {
            continue;
        }
        let name = path
            .file_name()
            .expect("file")
            .to_string_lossy()
            .into_owned();
        let other = test.join(&name);
        if other.is_file() {
            pairs.push((name, path, other));
        } else {
            log::warn!("{} has no counterpart in {}", name, test.display());
        }
    }
    if pairs.is_empty() {
        return Err(format!(
            "no matching images in {} and {}",
            reference.display(),
            test.display()
        )
        .into());
    }
    pairs.sort();
    Ok(pairs)
}

fn write_or_print(text: &str, output: Option<&Path>) -> CliResult {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()).into()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn cost(args: &CostArgs) -> CliResult {
    if let Some(g) = args.filters.iter().find(|&&g| g == 0 || g % 2 == 0) {
        return Err(format!("filter lengths must be odd, got {g}").into());
    }
    if args.fragments.contains(&0) {
        return Err("fragment sizes must be positive".into());
    }
    let csv = sweep_csv(&sweep(&args.fragments, &args.filters, args.budget))?;
    write_or_print(&csv, args.output.as_deref())?;
    for &f in &args.fragments {
        match max_filter_size(f, args.budget) {
            Some(g) => eprintln!("F={f}: max filter {g}"),
            None => eprintln!("F={f}: does not fit in {} bytes", args.budget),
        }
    }
    Ok(())
}

fn parse_gaze(s: &str) -> Result<Gaze, String> {
    match s {
        "center" => Ok(Gaze::Center),
        "corner" => Ok(Gaze::Corner),
        other => {
            let (x, y) = other
                .split_once(':')
                .ok_or_else(|| format!("gaze must be center, corner or X:Y, got {other:?}"))?;
            let x = x.parse().map_err(|_| format!("bad gaze x in {other:?}"))?;
            let y = y.parse().map_err(|_| format!("bad gaze y in {other:?}"))?;
            Ok(Gaze::At(x, y))
        }
    }
}

pub fn bench(args: &BenchArgs) -> CliResult {
    let sources = if args.input.is_empty() {
        vec![BenchSource::Synthetic {
            width: args.size.0,
            height: args.size.1,
        }]
    } else {
        args.input.iter().cloned().map(BenchSource::File).collect()
    };
    let cfg = BenchConfig {
        sources,
        fragments: args.fragments.clone(),
        e_corners: args.e_corners.clone(),
        gazes: args
            .gaze
            .iter()
            .map(|g| parse_gaze(g))
            .collect::<Result<_, _>>()?,
        methods: args
            .methods
            .iter()
            .map(|m| m.parse::<Method>())
            .collect::<Result<_, _>>()?,
        workers: args.workers,
        warmup: args.warmup,
        iterations: args.iterations,
        base: match &args.config {
            Some(path) => load_params(path)?,
            None => FoveationParams::default(),
        },
    };
    let rows = run_benchmark(&cfg)?;
    write_or_print(&to_csv(&rows)?, args.output.as_deref())
}

pub fn serve(args: &ServeArgs) -> CliResult {
    if args.foveation.map.is_some() {
        return Err("serve renders with the retinal model; --map is not supported".into());
    }
    let image = load_image(&args.image)?;
    let mut params = params(&args.foveation)?;
    params.resolve_fixation(image.dims())?;
    params.fixation = args.foveation.fixation;
    let config = ServiceConfig {
        image,
        params,
        method: args.method,
        assets: args.assets.clone(),
    };
    let addr = SocketAddr::new(args.host, args.port);
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let listener = foveate_stream::bind(addr)
            .await
            .map_err(|e| format!("cannot listen on {addr}: {e}"))?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        foveate_stream::serve(listener, config).await?;
        Ok(())
    })
}
