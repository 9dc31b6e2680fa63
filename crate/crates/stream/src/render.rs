use std::time::Instant;

use foveate::pyramid::{foveate_pyramid, full_depth};
use foveate::{foveate, foveate_exact, DensityInput, FoveationParams, RasterImage};

use crate::protocol::{ControlMessage, FrameStats, RenderMethod};

/// Parameters that persist across the messages of one connection.
#[derive(Debug, Clone)]
pub struct Session {
    pub params: FoveationParams,
    pub method: RenderMethod,
}

/// A fully resolved render request.
#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    /// Always carries a fixation inside the image.
    pub params: FoveationParams,
    pub method: RenderMethod,
    pub warning: Option<String>,
}

impl Session {
    pub fn new(params: FoveationParams, method: RenderMethod) -> Self {
        Self { params, method }
    }

    /// Merges the overrides of `msg` and resolves its fixation against an
    /// image of `dims`. Invalid overrides leave the session unchanged.
    pub fn apply(&mut self, msg: &ControlMessage, dims: (usize, usize)) -> Result<Job, String> {
        let mut params = self.params.clone();
        if let Some(e) = msg.e_corner {
            params.e_corner = e;
        }
        if let Some(s) = msg.strength {
            params.strength = s;
        }
        if let Some(f) = msg.fragment {
            params.fragment_size = f;
        }
        let method = match &msg.method {
            Some(m) => m.parse()?,
            None => self.method,
        };
        params.fixation = None;
        params.validate().map_err(|e| e.to_string())?;

        let (x, y, warning) = clamp_fixation(msg.x, msg.y, dims);
        self.params = params.clone();
        self.method = method;
        params.fixation = Some((x as i64, y as i64));
        Ok(Job {
            params,
            method,
            warning,
        })
    }
}

fn clamp_fixation(x: i64, y: i64, dims: (usize, usize)) -> (usize, usize, Option<String>) {
    let cx = x.clamp(0, dims.0 as i64 - 1) as usize;
    let cy = y.clamp(0, dims.1 as i64 - 1) as usize;
    let warning = (cx as i64 != x || cy as i64 != y).then(|| {
        format!(
            "fixation ({x}, {y}) outside {}x{} image, clamped to ({cx}, {cy})",
            dims.0, dims.1
        )
    });
    (cx, cy, warning)
}

/// Renders `job` over `img`.
pub fn render_job(img: &RasterImage, job: &Job) -> foveate::Result<(FrameStats, RasterImage)> {
    let (x, y) = job.params.resolve_fixation(img.dims())?;
    let start = Instant::now();
    let (image, render_ms, regions, fragment) = match job.method {
        RenderMethod::Blockwise => {
            let out = foveate(img, &job.params, DensityInput::None)?;
            (
                out.image,
                out.stats.render_ms,
                out.stats.regions,
                out.stats.fragment,
            )
        }
        RenderMethod::Pyramid => {
            let out = foveate_pyramid(img, &job.params, DensityInput::None)?;
            (out, elapsed_ms(start), full_depth(img.dims()), 0)
        }
        RenderMethod::Oracle => {
            let out = foveate_exact(img, &job.params, DensityInput::None)?;
            (out, elapsed_ms(start), 0, 0)
        }
        RenderMethod::Off => (img.clone(), elapsed_ms(start), 0, 0),
    };
    let stats = FrameStats {
        render_ms,
        regions,
        fragment,
        method: job.method,
        x,
        y,
        warning: job.warning.clone(),
    };
    Ok((stats, image))
}

/// Renders `job` and packs it as a binary stream frame.
pub fn render_frame(img: &RasterImage, job: &Job) -> foveate::Result<Vec<u8>> {
    let (stats, image) = render_job(img, job)?;
    Ok(crate::protocol::encode_frame(&stats, &image.encode_png()?))
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}
