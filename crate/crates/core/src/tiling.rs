//! Shifted square tiling of an image into fragments.

use serde::{Deserialize, Serialize};

/// Half-open pixel rectangle `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl Rect {
    pub fn width(&self) -> usize {
        self.x1 - self.x0
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }

    /// Geometric midpoint in pixel-center coordinates.
    pub fn midpoint(&self) -> (f64, f64) {
        (
            (self.x0 + self.x1 - 1) as f64 / 2.0,
            (self.y0 + self.y1 - 1) as f64 / 2.0,
        )
    }
}

/// Offset of the tiling origin that centers one fragment on the fixation.
///
/// Each component is `(p - floor(F/2)) mod F`; moving the fixation by one
/// pixel moves the offset by one pixel.
pub fn compute_fragment_shift(fixation: (usize, usize), fragment: usize) -> (usize, usize) {
    assert!(fragment > 0, "fragment size must be positive");
    let f = fragment as i64;
    let axis = |p: usize| (p as i64 - f / 2).rem_euclid(f) as usize;
    (axis(fixation.0), axis(fixation.1))
}

/// Fragment layout for one image: fragment size, shift, and grid extent.
///
/// Fragments start at `shift + k*F`; when the shift is non-zero a clipped
/// column (row) of fragments covers the pixels left of (above) the shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tiling {
    pub width: usize,
    pub height: usize,
    pub fragment: usize,
    pub shift: (usize, usize),
    pub cols: usize,
    pub rows: usize,
}

impl Tiling {
    pub fn new(width: usize, height: usize, fragment: usize, shift: (usize, usize)) -> Self {
        assert!(fragment > 0, "fragment size must be positive");
        assert!(
            shift.0 < fragment && shift.1 < fragment,
            "shift must lie in [0, F)"
        );
        let count = |extent: usize, s: usize| {
            let origin = axis_origin(s, fragment);
            ((extent as i64 - origin) as usize).div_ceil(fragment)
        };
        Self {
            width,
            height,
            fragment,
            shift,
            cols: count(width, shift.0),
            rows: count(height, shift.1),
        }
    }

    pub fn cell_count(&self) -> usize {
        self.cols * self.rows
    }

    /// Pixel extent of cell `(col, row)`, clipped to the image.
    pub fn cell_rect(&self, col: usize, row: usize) -> Rect {
        let f = self.fragment as i64;
        let ox = axis_origin(self.shift.0, self.fragment) + col as i64 * f;
        let oy = axis_origin(self.shift.1, self.fragment) + row as i64 * f;
        let clip = |v: i64, hi: usize| v.clamp(0, hi as i64) as usize;
        Rect {
            x0: clip(ox, self.width),
            y0: clip(oy, self.height),
            x1: clip(ox + f, self.width),
            y1: clip(oy + f, self.height),
        }
    }

    /// Cell containing pixel `(x, y)`.
    pub fn cell_of(&self, x: usize, y: usize) -> (usize, usize) {
        let f = self.fragment as i64;
        let cx = (x as i64 - axis_origin(self.shift.0, self.fragment)) / f;
        let cy = (y as i64 - axis_origin(self.shift.1, self.fragment)) / f;
        (cx as usize, cy as usize)
    }

    /// Row-major cell coordinates.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.rows).flat_map(move |r| (0..self.cols).map(move |c| (c, r)))
    }

    #[inline]
    pub fn cell_index(&self, col: usize, row: usize) -> usize {
        row * self.cols + col
    }
}

fn axis_origin(shift: usize, fragment: usize) -> i64 {
    if shift > 0 {
        shift as i64 - fragment as i64
    } else {
        0
    }
}
