//! Reference implementations shared by the test targets. Written directly
//! from the definitions, without the library's helpers.

#![allow(dead_code)]

use patchfill::raster::{extract_border, BBox, PatchSize, Point, RasterImage, RegionMask};
use patchfill::search::{compute_search_bounds, SearchBounds, SearchFactor};
use rand::rngs::StdRng;
use rand::Rng;

pub struct Instance {
    pub image: RasterImage,
    pub mask: RegionMask,
    pub patch: PatchSize,
    pub target: Point,
    pub bounds: SearchBounds,
}

pub fn random_instance(rng: &mut StdRng) -> Instance {
    let w = rng.random_range(8..=32);
    let h = rng.random_range(8..=32);
    let pixels = (0..w * h)
        .map(|_| {
            // Few distinct levels so that ties actually happen.
            let level = |rng: &mut StdRng| rng.random_range(0..4u8) * 60;
            [level(rng), level(rng), level(rng), 255]
        })
        .collect();
    let image = RasterImage::from_pixels(w, h, pixels).unwrap();
    let ow = rng.random_range(1..=8.min(w - 1));
    let oh = rng.random_range(1..=8.min(h - 1));
    let ox = rng.random_range(0..=w - ow);
    let oy = rng.random_range(0..=h - oh);
    let holes: Vec<bool> = (0..ow * oh).map(|_| rng.random_bool(0.8)).collect();
    let mut mask = RegionMask::from_fn(w, h, |x, y| {
        (ox..ox + ow).contains(&x) && (oy..oy + oh).contains(&y) && holes[(y - oy) * ow + (x - ox)]
    });
    if mask.object_count() == 0 {
        mask = RegionMask::from_fn(w, h, |x, y| (x, y) == (ox, oy));
    }
    let patch = PatchSize::new([3, 5, 7][rng.random_range(0..3)]).unwrap();
    let border = extract_border(&mask);
    let target = border.points()[rng.random_range(0..border.len())];
    let alpha = match rng.random_range(0..6) {
        0..3 => SearchFactor::Full,
        k => SearchFactor::Factor([0.2, 0.5, 1.0][k - 3]),
    };
    let bounds = compute_search_bounds(&mask.object_bbox().unwrap(), alpha, w, h);
    Instance {
        image,
        mask,
        patch,
        target,
        bounds,
    }
}

/// Every center in the window whose whole patch is inside the image and free
/// of object pixels, scored over the target's known, in-image offsets.
pub fn brute_force(inst: &Instance) -> Option<(Point, u64)> {
    let (w, h) = inst.image.dims();
    let r = (inst.patch.get() / 2) as i64;
    let px = |x: i64, y: i64| inst.image.pixels()[y as usize * w + x as usize];
    let inside = |x: i64, y: i64| x >= 0 && y >= 0 && x < w as i64 && y < h as i64;
    let object = |x: i64, y: i64| inst.mask.is_object(Point::new(x as usize, y as usize));
    let (tx, ty) = (inst.target.x as i64, inst.target.y as i64);
    let mut best: Option<(u64, i64, i64)> = None;
    for qy in inst.bounds.top as i64..inst.bounds.bottom as i64 {
        for qx in inst.bounds.left as i64..inst.bounds.right as i64 {
            let donor_ok = (-r..=r).all(|dy| {
                (-r..=r).all(|dx| inside(qx + dx, qy + dy) && !object(qx + dx, qy + dy))
            });
            if !donor_ok {
                continue;
            }
            let mut ssd = 0u64;
            for dy in -r..=r {
                for dx in -r..=r {
                    let (sx, sy) = (tx + dx, ty + dy);
                    if !inside(sx, sy) || object(sx, sy) {
                        continue;
                    }
                    let (a, b) = (px(sx, sy), px(qx + dx, qy + dy));
                    for c in 0..3 {
                        let d = a[c] as i64 - b[c] as i64;
                        ssd += (d * d) as u64;
                    }
                }
            }
            let key = (ssd, qy, qx);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
    }
    best.map(|(ssd, y, x)| (Point::new(x as usize, y as usize), ssd))
}

pub fn bbox(x: usize, y: usize, w: usize, h: usize) -> BBox {
    BBox {
        min_x: x,
        min_y: y,
        max_x: x + w - 1,
        max_y: y + h - 1,
    }
}

/// Counts window centers that are outside the object box.
pub fn enumerate_search_area(b: &BBox, alpha: f64, big: usize) -> usize {
    let s = compute_search_bounds(b, SearchFactor::Factor(alpha), big, big);
    let mut n = 0;
    for y in s.top..s.bottom {
        for x in s.left..s.right {
            if !b.contains(Point::new(x, y)) {
                n += 1;
            }
        }
    }
    n
}

/// Counts centers outside the box that lie within `P − 1` pixels of it
/// (Chebyshev distance), the ring in which a candidate is taken to overlap
/// the object.
pub fn enumerate_overlap(w: i64, h: i64, p: i64) -> usize {
    let reach = p - 1;
    let mut n = 0;
    for y in -2 * p..h + 2 * p {
        for x in -2 * p..w + 2 * p {
            let inside = (0..w).contains(&x) && (0..h).contains(&y);
            let dx = (-x).max(x - (w - 1)).max(0);
            let dy = (-y).max(y - (h - 1)).max(0);
            if !inside && dx.max(dy) <= reach {
                n += 1;
            }
        }
    }
    n
}
