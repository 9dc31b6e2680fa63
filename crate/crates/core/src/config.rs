//! `key = value` parameter files.
//!
//! ```text
//! # retinal model
//! alpha = 0.106
//! e2 = 2.3
//! ct0 = 0.015625
//! e_corner = 58
//! strength = 1.5
//! fragment = 16
//! fixation = 960,540
//! ```

use std::path::Path;

use crate::error::{Error, Result};
use crate::retinal::FoveationParams;

/// Applies every assignment in `text` on top of `base`.
pub fn parse_params(text: &str, base: FoveationParams) -> Result<FoveationParams> {
    let mut p = base;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Config {
            line: line_no,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        let real =
            || -> Result<f64> { value.parse::<f64>().map_err(|e| err(format!("{key}: {e}"))) };
        match key {
            "alpha" => p.alpha = real()?,
            "e2" => p.e2 = real()?,
            "ct0" => p.ct0 = real()?,
            "e_corner" => p.e_corner = real()?,
            "f_max" => p.f_max = Some(real()?),
            "strength" => p.strength = real()?,
            "fragment" | "fragment_size" => {
                p.fragment_size = value.parse().map_err(|e| err(format!("{key}: {e}")))?
            }
            "fixation" => p.fixation = Some(parse_point(value).map_err(err)?),
            other => return Err(err(format!("unknown key {other:?}"))),
        }
    }
    p.validate()?;
    Ok(p)
}

/// Reads a parameter file over the defaults.
pub fn load_params(path: impl AsRef<Path>) -> Result<FoveationParams> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_params(&text, FoveationParams::default())
}

/// Parses `x,y` into integer pixel coordinates.
pub fn parse_point(s: &str) -> std::result::Result<(i64, i64), String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected x,y, got {s:?}"))?;
    let x = x.trim().parse().map_err(|e| format!("x: {e}"))?;
    let y = y.trim().parse().map_err(|e| format!("y: {e}"))?;
    Ok((x, y))
}
