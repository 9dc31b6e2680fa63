//! Deterministic procedural test images.
//!
//! The tests, examples and benchmarks need natural-looking content at
//! arbitrary sizes without shipping image assets. Every pattern is a pure
//! function of its size and seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::imaging::RasterImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    /// Multi-octave value noise, tinted per channel.
    Clouds,
    /// Overlapping shaded discs and rectangles on a gradient.
    Shapes,
    /// Voronoi cells with flat colors and dark borders.
    Mosaic,
    /// Sum of oriented sinusoidal gratings.
    Gratings,
    /// Concentric rings modulated by noise.
    Rings,
}

impl Pattern {
    pub const ALL: [Pattern; 5] = [
        Pattern::Clouds,
        Pattern::Shapes,
        Pattern::Mosaic,
        Pattern::Gratings,
        Pattern::Rings,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Pattern::Clouds => "clouds",
            Pattern::Shapes => "shapes",
            Pattern::Mosaic => "mosaic",
            Pattern::Gratings => "gratings",
            Pattern::Rings => "rings",
        }
    }
}

/// The standard fixture set: one RGB image per pattern.
pub fn fixture_set(width: usize, height: usize) -> Vec<(Pattern, RasterImage)> {
    Pattern::ALL
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, synthetic(p, width, height, 1000 + i as u64)))
        .collect()
}

/// RGB image of the given pattern.
pub fn synthetic(pattern: Pattern, width: usize, height: usize, seed: u64) -> RasterImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = width.min(height) as f64;
    let planes: [Vec<f64>; 3] = match pattern {
        Pattern::Clouds => {
            let noise: Vec<ValueNoise> = (0..3).map(|_| ValueNoise::new(&mut rng)).collect();
            std::array::from_fn(|c| {
                render_plane(width, height, |x, y| {
                    let (u, v) = (x / scale, y / scale);
                    40.0 + 180.0 * noise[c].fbm(u * 6.0, v * 6.0, 6)
                })
            })
        }
        Pattern::Shapes => shapes(width, height, &mut rng),
        Pattern::Mosaic => mosaic(width, height, &mut rng),
        Pattern::Gratings => {
            let gratings: Vec<(f64, f64, f64, [f64; 3])> = (0..4)
                .map(|_| {
                    let angle = rng.gen_range(0.0..std::f64::consts::PI);
                    let period = rng.gen_range(6.0..40.0);
                    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                    let tint = [
                        rng.gen_range(0.3..1.0),
                        rng.gen_range(0.3..1.0),
                        rng.gen_range(0.3..1.0),
                    ];
                    (angle, period, phase, tint)
                })
                .collect();
            std::array::from_fn(|c| {
                render_plane(width, height, |x, y| {
                    let s: f64 = gratings
                        .iter()
                        .map(|&(a, period, phase, tint)| {
                            let t = x * a.cos() + y * a.sin();
                            tint[c] * (std::f64::consts::TAU * t / period + phase).sin()
                        })
                        .sum();
                    128.0 + 30.0 * s
                })
            })
        }
        Pattern::Rings => {
            let noise = ValueNoise::new(&mut rng);
            let (cx, cy) = (
                width as f64 * rng.gen_range(0.3..0.7),
                height as f64 * rng.gen_range(0.3..0.7),
            );
            std::array::from_fn(|c| {
                render_plane(width, height, |x, y| {
                    let d = (x - cx).hypot(y - cy);
                    let n = noise.fbm(x / scale * 8.0, y / scale * 8.0, 4);
                    let ring = (d / (9.0 + 3.0 * c as f64) + 4.0 * n).sin();
                    128.0 + 70.0 * ring + 40.0 * (n - 0.5)
                })
            })
        }
    };
    RasterImage::from_fn(width, height, 3, |x, y, c| {
        planes[c][y * width + x].round().clamp(0.0, 255.0) as u8
    })
    .expect("positive dimensions")
}

fn render_plane(width: usize, height: usize, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            out.push(f(x as f64, y as f64));
        }
    }
    out
}

fn shapes(width: usize, height: usize, rng: &mut ChaCha8Rng) -> [Vec<f64>; 3] {
    let (w, h) = (width as f64, height as f64);
    let top: [f64; 3] = std::array::from_fn(|_| rng.gen_range(40.0..220.0));
    let bottom: [f64; 3] = std::array::from_fn(|_| rng.gen_range(40.0..220.0));
    let mut planes: [Vec<f64>; 3] = std::array::from_fn(|c| {
        render_plane(width, height, |_, y| top[c] + (bottom[c] - top[c]) * y / h)
    });
    let count = 12 + (w * h / 20_000.0) as usize;
    for _ in 0..count {
        let color: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.0..255.0));
        let (cx, cy) = (rng.gen_range(0.0..w), rng.gen_range(0.0..h));
        let size = rng.gen_range(0.03..0.2) * w.min(h);
        let disc = rng.gen_bool(0.5);
        let shade = rng.gen_range(-0.6..0.6);
        for y in 0..height {
            for x in 0..width {
                let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                let inside = if disc {
                    dx.hypot(dy) <= size
                } else {
                    dx.abs() <= size && dy.abs() <= size * 0.6
                };
                if inside {
                    let s = 1.0 + shade * (dx + dy) / (2.0 * size);
                    for c in 0..3 {
                        planes[c][y * width + x] = color[c] * s;
                    }
                }
            }
        }
    }
    planes
}

fn mosaic(width: usize, height: usize, rng: &mut ChaCha8Rng) -> [Vec<f64>; 3] {
    let (w, h) = (width as f64, height as f64);
    let count = 40 + (w * h / 4_000.0) as usize;
    let sites: Vec<(f64, f64, [f64; 3])> = (0..count)
        .map(|_| {
            (
                rng.gen_range(0.0..w),
                rng.gen_range(0.0..h),
                std::array::from_fn(|_| rng.gen_range(30.0..230.0)),
            )
        })
        .collect();
    let mut planes: [Vec<f64>; 3] = std::array::from_fn(|_| vec![0.0; width * height]);
    for y in 0..height {
        for x in 0..width {
            let (px, py) = (x as f64, y as f64);
            let (mut best, mut second, mut color) = (f64::MAX, f64::MAX, [0.0; 3]);
            for &(sx, sy, col) in &sites {
                let d = (px - sx).hypot(py - sy);
                if d < best {
                    second = best;
                    best = d;
                    color = col;
                } else if d < second {
                    second = d;
                }
            }
            let edge = ((second - best) / 2.0).min(1.0);
            for c in 0..3 {
                planes[c][y * width + x] = color[c] * (0.35 + 0.65 * edge);
            }
        }
    }
    planes
}

/// Smooth lattice noise in [0, 1].
struct ValueNoise {
    perm: Vec<u8>,
    values: Vec<f64>,
}

impl ValueNoise {
    fn new(rng: &mut ChaCha8Rng) -> Self {
        let mut perm: Vec<u8> = (0..=255).collect();
        for i in (1..256).rev() {
            let j = rng.gen_range(0..=i);
            perm.swap(i, j);
        }
        let values = (0..256).map(|_| rng.gen::<f64>()).collect();
        Self { perm, values }
    }

    fn lattice(&self, x: i64, y: i64) -> f64 {
        let a = self.perm[(x & 255) as usize] as i64;
        let b = self.perm[((a + y) & 255) as usize];
        self.values[b as usize]
    }

    fn sample(&self, x: f64, y: f64) -> f64 {
        let (x0, y0) = (x.floor(), y.floor());
        let (fx, fy) = (smooth(x - x0), smooth(y - y0));
        let (ix, iy) = (x0 as i64, y0 as i64);
        let top = lerp(self.lattice(ix, iy), self.lattice(ix + 1, iy), fx);
        let bot = lerp(self.lattice(ix, iy + 1), self.lattice(ix + 1, iy + 1), fx);
        lerp(top, bot, fy)
    }

    fn fbm(&self, x: f64, y: f64, octaves: u32) -> f64 {
        let (mut sum, mut amp, mut freq, mut norm) = (0.0, 1.0, 1.0, 0.0);
        for _ in 0..octaves {
            sum += amp * self.sample(x * freq, y * freq);
            norm += amp;
            amp *= 0.55;
            freq *= 2.0;
        }
        sum / norm
    }
}

fn smooth(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + (b - a) * t
}
