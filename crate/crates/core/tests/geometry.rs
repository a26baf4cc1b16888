//! Search-window geometry and tile loading checked by direct enumeration.

mod common;

use common::{bbox, enumerate_overlap, enumerate_search_area};
use patchfill::raster::{PatchSize, Point, RasterImage, RegionMask};
use patchfill::search::{
    compute_search_bounds, estimate_complexity, overlap_area, search_area_size, KernelCounters, SearchFactor,
};
use patchfill::tiled::{load_tile, tile_footprint_bytes};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn area_formulas_match_enumeration() {
    let mut rng = StdRng::seed_from_u64(77);
    for _ in 0..200 {
        // Multiples of 10 and of 0.05 make (1 + 2α)·w a whole number, so the
        // window is exact and no rounding enters the comparison.
        let w = 10 * rng.random_range(1..=12);
        let h = 10 * rng.random_range(1..=12);
        let alpha = 0.05 * rng.random_range(0..=40) as f64;
        let p = 2 * rng.random_range(0..=10) + 1;
        let big = 2000;
        let b = bbox(900, 900, w, h);

        let sa = search_area_size(w, h, alpha);
        let counted = enumerate_search_area(&b, alpha, big);
        assert!((sa - counted as f64).abs() < 1e-6, "SA w={w} h={h} α={alpha}: {sa} vs {counted}");

        let oa = overlap_area(w, h, p);
        let counted = enumerate_overlap(w as i64, h as i64, p as i64);
        assert_eq!(oa, counted, "OA w={w} h={h} P={p}");
    }
}

#[test]
fn extents_and_clamping() {
    let b = bbox(100, 100, 78, 126);
    let s = compute_search_bounds(&b, SearchFactor::Factor(0.05), 1000, 1000);
    assert_eq!((s.width(), s.height()), (86, 139));
    // The window stays centered on the box: the extra pixel of an odd margin
    // goes right/down.
    assert_eq!((s.left, s.right), (96, 182));
    assert_eq!((s.top, s.bottom), (94, 233));

    let s = compute_search_bounds(&bbox(2, 1, 10, 10), SearchFactor::Factor(1.0), 25, 20);
    assert_eq!((s.left, s.right, s.top, s.bottom), (0, 22, 0, 20));
}

proptest! {
    #[test]
    fn window_contains_box_and_grows_with_alpha(
        x in 0usize..60, y in 0usize..60, w in 1usize..40, h in 1usize..40,
        a in 0.0f64..3.0, extra in 0.0f64..1.0,
    ) {
        let (iw, ih) = (100, 100);
        let b = bbox(x, y, w, h);
        let small = compute_search_bounds(&b, SearchFactor::Factor(a), iw, ih);
        let large = compute_search_bounds(&b, SearchFactor::Factor(a + extra), iw, ih);
        prop_assert!(small.left <= b.min_x && small.right > b.max_x);
        prop_assert!(small.top <= b.min_y && small.bottom > b.max_y);
        prop_assert!(large.left <= small.left && large.right >= small.right);
        prop_assert!(large.top <= small.top && large.bottom >= small.bottom);
        prop_assert!(large.right <= iw && large.bottom <= ih);
    }

    #[test]
    fn complexity_grows_with_alpha(w in 10usize..200, h in 10usize..200, p in 1usize..10, a in 0.0f64..3.0, d in 0.01f64..1.0) {
        let p = 2 * p + 1;
        prop_assert!(estimate_complexity(w, h, p, a + d, 0.5) > estimate_complexity(w, h, p, a, 0.5));
    }

    #[test]
    fn tile_equals_direct_gather(
        w in 4usize..40, h in 4usize..40,
        gx in 1usize..9, gy in 1usize..9, p in 0usize..4,
        ox in 0usize..40, oy in 0usize..40, tx in 0usize..40, ty in 0usize..40,
        seed in any::<u32>(),
    ) {
        let patch = PatchSize::new(2 * p + 1).unwrap();
        let (ox, oy, tx, ty) = (ox % w, oy % h, tx % w, ty % h);
        let image = RasterImage::from_fn(w, h, |x, y| {
            let v = ((x as u32).wrapping_mul(2654435761) ^ (y as u32).wrapping_mul(40503) ^ seed) as u8;
            [v, v.wrapping_mul(3), x as u8, 255]
        }).unwrap();
        let mask = RegionMask::from_fn(w, h, |x, y| (x + y + seed as usize).is_multiple_of(3));
        let mut counters = KernelCounters::default();
        let tile = load_tile(&image, &mask, Point::new(tx, ty), Point::new(ox, oy), patch, (gx, gy), &mut counters);

        let r = patch.radius() as isize;
        let (tw, th) = tile.dims();
        prop_assert_eq!((tw, th), (patch.get() + gx - 1, patch.get() + gy - 1));
        prop_assert_eq!(tile.footprint_bytes(), tile_footprint_bytes(patch, (gx, gy)));
        let mut in_image = 0u64;
        for j in 0..th {
            for i in 0..tw {
                let x = ox as isize - r + i as isize;
                let y = oy as isize - r + j as isize;
                let expected = (x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h)
                    .then(|| image.get(Point::new(x as usize, y as usize)));
                in_image += expected.is_some() as u64;
                prop_assert_eq!(tile.source_element(i, j), expected);
            }
        }
        let mut patch_in_image = 0u64;
        for j in 0..patch.get() {
            for i in 0..patch.get() {
                let x = tx as isize - r + i as isize;
                let y = ty as isize - r + j as isize;
                let (px, known) = tile.patch_element(i, j);
                if x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h {
                    let q = Point::new(x as usize, y as usize);
                    patch_in_image += 1;
                    prop_assert_eq!(px, image.get(q));
                    prop_assert_eq!(known, !mask.is_object(q));
                } else {
                    prop_assert!(!known);
                }
            }
        }
        // Each element is loaded exactly once; patch elements carry a label.
        prop_assert_eq!(counters.global_reads, in_image + 2 * patch_in_image);
    }
}
