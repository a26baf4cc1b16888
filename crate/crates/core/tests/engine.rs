use patchfill::engine::{init_state, inpaint, iteration_estimate, run, step, RunSummary};
use patchfill::raster::{PatchSize, PixelState, Point, RasterImage, RegionMask};
use patchfill::scene::{blob_scene, random_scene};
use patchfill::search::{BoundsPolicy, KernelKind, SearchConfig, SearchFactor};
use patchfill::Error;
use proptest::prelude::*;

fn config(alpha: SearchFactor, p: usize, kernel: KernelKind, threads: usize) -> SearchConfig {
    SearchConfig {
        alpha,
        patch_size: PatchSize::new(p).unwrap(),
        kernel,
        threads,
        ..SearchConfig::default()
    }
}

#[test]
fn kernels_and_thread_counts_agree_byte_for_byte() {
    let (image, mask) = blob_scene(64, 14);
    for policy in [BoundsPolicy::Initial, BoundsPolicy::PerIteration] {
        for alpha in [SearchFactor::Full, SearchFactor::Factor(0.5)] {
            let mut reference: Option<RunSummary> = None;
            for kernel in [KernelKind::Naive, KernelKind::Tiled] {
                for threads in [1, 2, 4, 8] {
                    let cfg = SearchConfig {
                        bounds_policy: policy,
                        ..config(alpha, 7, kernel, threads)
                    };
                    let s = inpaint(image.clone(), mask.clone(), cfg).unwrap();
                    match &reference {
                        None => reference = Some(s),
                        Some(r) => {
                            assert!(r.image == s.image, "{policy} {alpha} {kernel} x{threads}");
                            assert_eq!(r.iterations, s.iterations);
                            assert_eq!(r.counters.ssd_element_ops, s.counters.ssd_element_ops);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn pixels_outside_the_object_are_untouched() {
    for seed in 0..6 {
        let (image, mask) = random_scene(28, 24, 8, seed);
        let out = inpaint(image.clone(), mask.clone(), config(SearchFactor::Full, 5, KernelKind::Tiled, 2)).unwrap();
        for (i, ((a, b), s)) in image.pixels().iter().zip(out.image.pixels()).zip(mask.states()).enumerate() {
            if *s != PixelState::Object {
                assert_eq!(a, b, "seed {seed} pixel {i}");
            }
        }
    }
}

#[test]
fn filled_pixels_come_from_the_source_region() {
    // Two-color source: every filled pixel must be one of the two colors.
    let image = RasterImage::from_fn(30, 30, |x, _| if x < 15 { [10, 20, 30, 255] } else { [200, 100, 0, 255] }).unwrap();
    let mask = RegionMask::from_fn(30, 30, |x, y| (12..18).contains(&x) && (12..18).contains(&y));
    let out = inpaint(image.clone(), mask, config(SearchFactor::Full, 5, KernelKind::Naive, 1)).unwrap();
    for y in 12..18 {
        for x in 12..18 {
            let px = out.image.get(Point::new(x, y));
            assert!(px == [10, 20, 30, 255] || px == [200, 100, 0, 255], "{x},{y}: {px:?}");
        }
    }
}

#[test]
fn single_pixel_object_takes_one_iteration() {
    let image = RasterImage::from_fn(12, 12, |x, y| [(x * 20) as u8, (y * 20) as u8, 0, 255]).unwrap();
    let mask = RegionMask::from_fn(12, 12, |x, y| (x, y) == (6, 6));
    let mut state = init_state(image, mask, config(SearchFactor::Full, 3, KernelKind::Naive, 1)).unwrap();
    let report = step(&mut state).unwrap();
    assert_eq!((report.pixels_filled, report.remaining_object_pixels), (1, 0));
    assert!(state.is_done());
}

#[test]
fn disjoint_pixels_finish_within_their_count() {
    let image = RasterImage::from_fn(40, 40, |x, y| [(x * 6) as u8, (y * 6) as u8, ((x ^ y) * 4) as u8, 255]).unwrap();
    let spots = [(8, 8), (30, 9), (20, 20), (9, 31), (31, 30)];
    let mask = RegionMask::from_fn(40, 40, |x, y| spots.contains(&(x, y)));
    let s = inpaint(image, mask, config(SearchFactor::Full, 3, KernelKind::Tiled, 2)).unwrap();
    assert!(s.iterations <= spots.len());
}

#[test]
fn progress_reports_arrive_in_order() {
    let (image, mask) = blob_scene(48, 10);
    let mut state = init_state(image, mask, config(SearchFactor::Factor(1.0), 5, KernelKind::Naive, 1)).unwrap();
    let initial = state.initial_object_pixels();
    let mut seen = Vec::new();
    run(&mut state, |r| seen.push((r.iteration, r.remaining_object_pixels, r.pixels_filled))).unwrap();
    assert!(!seen.is_empty());
    let mut remaining = initial;
    for (i, &(iteration, left, filled)) in seen.iter().enumerate() {
        assert_eq!(iteration, i + 1);
        assert!(filled >= 1);
        assert_eq!(left, remaining - filled);
        remaining = left;
    }
    assert_eq!(remaining, 0);
}

#[test]
fn iteration_count_is_near_the_estimate() {
    let (image, mask) = blob_scene(128, 24);
    let b = mask.object_bbox().unwrap();
    // P=17 is left out: with a 24-pixel object the estimate is 2, and the
    // front fills partial patches, so the count lands at 6-7.
    for p in [9, 13] {
        let s = inpaint(image.clone(), mask.clone(), config(SearchFactor::Full, p, KernelKind::Tiled, 2)).unwrap();
        let estimate = iteration_estimate(b.width(), b.height(), p);
        assert!(
            s.iterations <= 3 * estimate && 3 * s.iterations >= estimate,
            "P={p}: {} iterations vs estimate {estimate}",
            s.iterations
        );
    }
}

#[test]
fn shrinking_alpha_does_not_add_work() {
    let ladder = [
        SearchFactor::Full,
        SearchFactor::Factor(2.0),
        SearchFactor::Factor(1.0),
        SearchFactor::Factor(0.5),
        SearchFactor::Factor(0.2),
        SearchFactor::Factor(0.05),
    ];
    let (image, mask) = blob_scene(96, 18);
    for p in [7, 9, 13] {
        let ops: Vec<u64> = ladder
            .iter()
            .map(|&a| {
                inpaint(image.clone(), mask.clone(), config(a, p, KernelKind::Naive, 1))
                    .unwrap()
                    .counters
                    .ssd_element_ops
            })
            .collect();
        assert!(ops.windows(2).all(|w| w[1] <= w[0]), "P={p}: {ops:?}");
    }
}

#[test]
fn no_candidate_anywhere_is_an_error() {
    // A 5x5 image whose only object pixel leaves no room for a 5x5 donor.
    let image = RasterImage::new(5, 5, [9, 9, 9, 255]).unwrap();
    let mask = RegionMask::from_fn(5, 5, |x, y| (x, y) == (2, 2));
    let err = inpaint(image, mask, config(SearchFactor::Factor(0.05), 5, KernelKind::Naive, 1)).unwrap_err();
    assert!(matches!(err, Error::NoCandidate));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_runs_conserve_and_agree(seed in 0u64..10_000, p in 1usize..3, alpha in 0usize..4) {
        let (image, mask) = random_scene(24, 20, 6, seed);
        let alpha = [SearchFactor::Full, SearchFactor::Factor(1.0), SearchFactor::Factor(0.2), SearchFactor::Factor(0.05)][alpha];
        let p = 2 * p + 1;
        let naive = inpaint(image.clone(), mask.clone(), config(alpha, p, KernelKind::Naive, 1));
        let tiled = inpaint(image.clone(), mask.clone(), config(alpha, p, KernelKind::Tiled, 3));
        match (naive, tiled) {
            (Ok(a), Ok(b)) => {
                prop_assert!(a.image == b.image);
                prop_assert!(a.iterations <= mask.object_count());
                for ((x, y), s) in image.pixels().iter().zip(a.image.pixels()).zip(mask.states()) {
                    if *s != PixelState::Object {
                        prop_assert_eq!(x, y);
                    }
                }
            }
            (Err(Error::NoCandidate), Err(Error::NoCandidate)) => {}
            (a, b) => prop_assert!(false, "kernels disagree: {:?} vs {:?}", a.map(|s| s.iterations), b.map(|s| s.iterations)),
        }
    }
}
