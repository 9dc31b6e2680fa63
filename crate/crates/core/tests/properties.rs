use foveate::filter_bank::filter_length;
use foveate::fixtures::{synthetic, Pattern};
use foveate::retinal::eccentricity_of;
use foveate::{
    build_bank, compute_fragment_shift, foveate, foveate_exact, gaussian_filter_1d, plan_frame,
    render, render_with_workers, sigma_at, ssim_map, total_coefficients, BlurGrid, BlurSource,
    DensityInput, FilterBank, FoveationParams, RasterImage, Tiling,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_raster(w: usize, h: usize, ch: usize, seed: u64) -> RasterImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..w * h * ch).map(|_| rng.gen::<u8>()).collect();
    RasterImage::new(w, h, ch, data).unwrap()
}

fn pattern() -> impl Strategy<Value = Pattern> {
    prop::sample::select(Pattern::ALL.to_vec())
}

/// Patterns without hard edges; flat regions next to a step gain variation
/// when blurred, so the piecewise-constant ones are excluded.
fn smooth_pattern() -> impl Strategy<Value = Pattern> {
    prop::sample::select(vec![Pattern::Clouds, Pattern::Gratings, Pattern::Rings])
}

fn odd_length() -> impl Strategy<Value = usize> {
    (1usize..30).prop_map(|k| 2 * k + 1)
}

fn uniform_grid(
    dims: (usize, usize),
    fragment: usize,
    shift: (usize, usize),
    k: usize,
) -> BlurGrid {
    let tiling = Tiling::new(dims.0, dims.1, fragment, shift);
    BlurGrid {
        tiling,
        index: vec![k; tiling.cell_count()],
        foveal_cell: (0, 0),
    }
}

/// Direct 2-D convolution with the outer product of a sampled Gaussian.
fn two_d_gaussian(img: &RasterImage, len: usize) -> RasterImage {
    let s = len as f64 / 6.0;
    let r = (len / 2) as isize;
    let raw: Vec<f64> = (-r..=r)
        .map(|i| (-((i * i) as f64) / (2.0 * s * s)).exp())
        .collect();
    let total: f64 = raw
        .iter()
        .flat_map(|a| raw.iter().map(move |b| a * b))
        .sum();
    RasterImage::from_fn(img.width(), img.height(), img.channels(), |x, y, c| {
        let mut acc = 0.0;
        for j in -r..=r {
            for i in -r..=r {
                let k = raw[(j + r) as usize] * raw[(i + r) as usize] / total;
                acc += k * f64::from(img.get_clamped(x as isize + i, y as isize + j, c));
            }
        }
        acc.round() as u8
    })
    .unwrap()
}

fn total_variation(img: &RasterImage, x0: usize, y0: usize, x1: usize, y1: usize) -> (u64, u64) {
    let mut tv = 0u64;
    let mut pairs = 0u64;
    for c in 0..img.channels() {
        for y in y0..y1 {
            for x in x0..x1 {
                let v = i64::from(img.get(x, y, c));
                if x + 1 < x1 {
                    tv += (v - i64::from(img.get(x + 1, y, c))).unsigned_abs();
                    pairs += 1;
                }
                if y + 1 < y1 {
                    tv += (v - i64::from(img.get(x, y + 1, c))).unsigned_abs();
                    pairs += 1;
                }
            }
        }
    }
    (tv, pairs)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn filters_are_normalized_and_symmetric(sigma in 0.0f64..50.0) {
        let k = gaussian_filter_1d(sigma).unwrap();
        prop_assert_eq!(k.len() % 2, 1);
        prop_assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for i in 0..k.len() {
            prop_assert_eq!(k[i], k[k.len() - 1 - i]);
        }
    }

    #[test]
    fn filter_length_is_monotone(a in 0.0f64..50.0, b in 0.0f64..50.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(filter_length(lo) <= filter_length(hi));
    }

    #[test]
    fn filter_spread_tracks_sigma(sigma in 0.53f64..30.0) {
        let k = gaussian_filter_1d(sigma).unwrap();
        let r = (k.len() / 2) as f64;
        let var: f64 = k.iter().enumerate().map(|(i, w)| w * (i as f64 - r).powi(2)).sum();
        prop_assert!((var.sqrt() - sigma).abs() <= 0.05 * sigma, "std {} for sigma {}", var.sqrt(), sigma);
    }

    #[test]
    fn bank_offsets_sum_to_total(lengths in prop::collection::vec(odd_length(), 0..12)) {
        let bank = FilterBank::from_lengths(lengths);
        prop_assert_eq!(bank.cumulative_sizes.len(), bank.len() + 1);
        prop_assert_eq!(total_coefficients(&bank), *bank.cumulative_sizes.last().unwrap());
        prop_assert!(bank.lengths.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(bank.lengths[0], 1);
    }

    #[test]
    fn constant_images_survive_any_filter(value: u8, len in odd_length(), fragment in 4usize..40) {
        let img = RasterImage::filled(53, 47, 3, value).unwrap();
        let bank = FilterBank::from_lengths([len]);
        let out = render(&img, &uniform_grid(img.dims(), fragment, (3 % fragment, 5 % fragment), 1), &bank).unwrap();
        prop_assert!(out.data().iter().all(|&v| (i32::from(v) - i32::from(value)).abs() <= 1));
    }

    #[test]
    fn sigma_grows_with_eccentricity(e in 0.0f64..120.0, de in 1e-6f64..20.0, strength in 0.01f64..5.0) {
        let p = FoveationParams { strength, ..Default::default() };
        prop_assert!(sigma_at(e + de, &p).unwrap() > sigma_at(e, &p).unwrap());
    }

    #[test]
    fn eccentricity_ignores_translation(
        px in 0.0f64..500.0, py in 0.0f64..500.0,
        fx in 0.0f64..500.0, fy in 0.0f64..500.0,
        tx in -200.0f64..200.0, ty in -200.0f64..200.0,
    ) {
        let a = eccentricity_of((px, py), (640, 480), (fx, fy), 30.0);
        let b = eccentricity_of((px + tx, py + ty), (640, 480), (fx + tx, fy + ty), 30.0);
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn shift_centers_fixation_fragment(x in 0usize..2000, y in 0usize..2000, fragment in 1usize..64) {
        let (w, h) = (x + 1 + fragment, y + 1 + fragment);
        let shift = compute_fragment_shift((x, y), fragment);
        let t = Tiling::new(w, h, fragment, shift);
        let (c, r) = t.cell_of(x, y);
        let rect = t.cell_rect(c, r);
        prop_assert!(rect.contains(x, y));
        // Interior fragments are whole, so their center is within half a pixel
        // (odd F) or exactly at fixation + 0.5 (even F).
        if rect.width() == fragment && rect.height() == fragment {
            let (mx, my) = rect.midpoint();
            let bound = (fragment.div_ceil(2) - fragment / 2) as f64 + 0.5;
            prop_assert!((mx - x as f64).abs() <= bound);
            prop_assert!((my - y as f64).abs() <= bound);
        }
    }

    #[test]
    fn worker_count_does_not_change_output(
        seed: u64,
        fragment in 4usize..40,
        fx in 0i64..96, fy in 0i64..80,
        e_corner in 5.0f64..80.0,
    ) {
        let img = random_raster(96, 80, 3, seed);
        let p = FoveationParams { fragment_size: fragment, fixation: Some((fx, fy)), e_corner, ..Default::default() };
        let plan = plan_frame(img.dims(), &p, DensityInput::None).unwrap();
        let one = render_with_workers(&img, &plan.grid, &plan.bank, 1).unwrap();
        for workers in [2, 8] {
            let many = render_with_workers(&img, &plan.grid, &plan.bank, workers).unwrap();
            prop_assert!(many.data() == one.data());
        }
    }

    #[test]
    fn fixation_fragment_is_passed_through(
        seed: u64,
        fragment in 4usize..48,
        fx in 0i64..120, fy in 0i64..90,
    ) {
        let img = random_raster(120, 90, 3, seed);
        let p = FoveationParams { fragment_size: fragment, fixation: Some((fx, fy)), ..Default::default() };
        let out = foveate(&img, &p, DensityInput::None).unwrap();
        let rect = out.grid.tiling.cell_rect(out.grid.foveal_cell.0, out.grid.foveal_cell.1);
        prop_assert!(rect.contains(fx as usize, fy as usize));
        for y in rect.y0..rect.y1 {
            prop_assert_eq!(&out.image.row(y)[rect.x0 * 3..rect.x1 * 3], &img.row(y)[rect.x0 * 3..rect.x1 * 3]);
        }
    }

    #[test]
    fn fragments_only_see_their_tile(seed: u64, fragment in 8usize..24, len in odd_length()) {
        let img = random_raster(72, 64, 1, seed);
        let bank = FilterBank::from_lengths([len]);
        let grid = uniform_grid(img.dims(), fragment, (0, 0), 1);
        let base = render(&img, &grid, &bank).unwrap();
        let rect = grid.tiling.cell_rect(1, 1);
        let r = len / 2;
        let mut changed = img.clone();
        for y in 0..img.height() {
            for x in 0..img.width() {
                let inside = x + r >= rect.x0 && x < rect.x1 + r && y + r >= rect.y0 && y < rect.y1 + r;
                if !inside {
                    changed.set(x, y, 0, 255 - img.get(x, y, 0));
                }
            }
        }
        let out = render(&changed, &grid, &bank).unwrap();
        for y in rect.y0..rect.y1 {
            prop_assert_eq!(&out.row(y)[rect.x0..rect.x1], &base.row(y)[rect.x0..rect.x1]);
        }
    }

    #[test]
    fn strength_zero_is_identity(seed: u64, fragment in 4usize..40) {
        let img = random_raster(50, 37, 3, seed);
        let p = FoveationParams { strength: 0.0, fragment_size: fragment, ..Default::default() };
        prop_assert!(foveate(&img, &p, DensityInput::None).unwrap().image.data() == img.data());
    }

    #[test]
    fn ssim_is_symmetric_and_bounded(a: u64, b: u64) {
        let x = random_raster(32, 24, 3, a);
        let y = random_raster(32, 24, 3, b);
        let xy = ssim_map(&x, &y).unwrap();
        let yx = ssim_map(&y, &x).unwrap();
        for (p, q) in xy.values.iter().zip(&yx.values) {
            prop_assert!((p - q).abs() < 1e-12);
            prop_assert!(*p <= 1.0 + 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn separable_matches_two_d(seed: u64, si in 0usize..3) {
        let sigma = [0.5, 1.0, 3.0][si];
        let img = random_raster(64, 64, 3, seed);
        let len = filter_length(sigma);
        let bank = FilterBank::from_lengths([len]);
        let out = render(&img, &uniform_grid(img.dims(), 16, (0, 0), 1), &bank).unwrap();
        let oracle = two_d_gaussian(&img, len);
        for (a, b) in out.data().iter().zip(oracle.data()) {
            prop_assert!((i32::from(*a) - i32::from(*b)).abs() <= 1);
        }
    }

    #[test]
    fn mean_intensity_is_preserved(pat in pattern(), seed in 0u64..1000, fragment in prop::sample::select(vec![8usize, 16, 32])) {
        let img = synthetic(pat, 256, 192, seed);
        let p = FoveationParams { fragment_size: fragment, ..Default::default() };
        let out = foveate(&img, &p, DensityInput::None).unwrap();
        prop_assert!((out.image.mean() - img.mean()).abs() <= 1.0);
    }

    #[test]
    fn blur_never_adds_variation(pat in smooth_pattern(), seed in 0u64..1000, fragment in prop::sample::select(vec![8usize, 16, 32])) {
        let img = synthetic(pat, 192, 160, seed);
        let p = FoveationParams { fragment_size: fragment, ..Default::default() };
        let out = foveate(&img, &p, DensityInput::None).unwrap();
        let t = out.grid.tiling;
        for (c, r) in t.cells() {
            if out.bank.lengths[out.grid.index_at(c, r)] < 3 {
                continue;
            }
            let rect = t.cell_rect(c, r);
            let (before, pairs) = total_variation(&img, rect.x0, rect.y0, rect.x1, rect.y1);
            let (after, _) = total_variation(&out.image, rect.x0, rect.y0, rect.x1, rect.y1);
            prop_assert!(after <= before + pairs, "cell ({}, {}): {} > {} + {}", c, r, after, before, pairs);
        }
    }

    #[test]
    fn density_map_endpoints(sigma_max in 0.0f64..25.0, mw in 1usize..32, mh in 1usize..32) {
        let dims = (90, 70);
        let tiling = Tiling::new(dims.0, dims.1, 16, (7, 2));
        let white = RasterImage::filled(mw, mh, 1, 255).unwrap();
        let black = RasterImage::filled(mw, mh, 1, 0).unwrap();
        let fw = BlurSource::density(&white, sigma_max, dims).unwrap().field(tiling);
        let fb = BlurSource::density(&black, sigma_max, dims).unwrap().field(tiling);
        prop_assert!(fw.sigma.iter().all(|&s| s == 0.0));
        prop_assert!(fb.sigma.iter().all(|&s| (s - sigma_max).abs() < 1e-12));
        let (bank, idx) = build_bank(&fw);
        prop_assert_eq!(bank.len(), 1);
        prop_assert!(idx.iter().all(|&i| i == 0));
    }
}

#[test]
fn oracle_commutes_with_quarter_turns() {
    let n = 65;
    let img = synthetic(Pattern::Shapes, n, n, 5);
    let rotate = |src: &RasterImage| {
        RasterImage::from_fn(n, n, src.channels(), |x, y, c| src.get(y, n - 1 - x, c)).unwrap()
    };
    let p = FoveationParams {
        e_corner: 40.0,
        ..Default::default()
    };
    let a = rotate(&foveate_exact(&img, &p, DensityInput::None).unwrap());
    let b = foveate_exact(&rotate(&img), &p, DensityInput::None).unwrap();
    let worst = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(p, q)| (i32::from(*p) - i32::from(*q)).abs())
        .max()
        .unwrap();
    assert!(worst <= 1, "max deviation {worst}");
}

#[test]
fn center_field_has_fourfold_symmetry() {
    let dims = (256, 256);
    let p = FoveationParams {
        fragment_size: 16,
        ..Default::default()
    };
    let plan = plan_frame(dims, &p, DensityInput::None).unwrap();
    let t = plan.grid.tiling;
    // Cells are symmetric about the foveal cell's midpoint, half a pixel off
    // the fixation, so mirrored midpoints differ in distance by at most sqrt(2).
    let center = t
        .cell_rect(plan.grid.foveal_cell.0, plan.grid.foveal_cell.1)
        .midpoint();
    let slope = sigma_at(1.0, &p).unwrap() - sigma_at(0.0, &p).unwrap();
    let per_px = slope * p.e_corner / (128f64).hypot(128.0);
    let tol = per_px * 2f64.sqrt() + 1e-9;
    let mut compared = 0;
    for (c, r) in t.cells() {
        let rect = t.cell_rect(c, r);
        if rect.width() != 16 || rect.height() != 16 {
            continue;
        }
        let (mx, my) = rect.midpoint();
        let mirrored = (2.0 * center.0 - mx, 2.0 * center.1 - my);
        let swapped = (center.0 + (my - center.1), center.1 + (mx - center.0));
        for (qx, qy) in [mirrored, swapped] {
            if qx < 0.0 || qy < 0.0 || qx >= 256.0 || qy >= 256.0 {
                continue;
            }
            let (qc, qr) = t.cell_of(qx as usize, qy as usize);
            let q = t.cell_rect(qc, qr);
            if q.width() != 16 || q.height() != 16 {
                continue;
            }
            let a = plan.field.at(c, r);
            let b = plan.field.at(qc, qr);
            assert!(
                (a - b).abs() <= tol,
                "cell ({c},{r}) {a} vs ({qc},{qr}) {b}"
            );
            compared += 1;
        }
    }
    assert!(compared > 200);
}
