//! Deterministic synthetic test scenes.
//!
//! The background mixes smooth gradients, a diagonal stripe pattern and
//! hashed noise so patch matching has real structure to work with; the
//! object is a flat, saturated disc that is easy to spot if it leaks into
//! the result.

use crate::raster::{RasterImage, RegionMask, Rgba};

/// Color the scene generators paint object pixels with.
pub const OBJECT_COLOR: Rgba = [230, 20, 40, 255];

fn hash(x: usize, y: usize, seed: u64) -> u64 {
    let mut h = (x as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (y as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
        ^ seed.wrapping_mul(0x1656_67B1_9E37_79F9);
    h ^= h >> 29;
    h = h.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    h ^ (h >> 32)
}

/// Textured background of the given size.
pub fn background(width: usize, height: usize, seed: u64) -> RasterImage {
    RasterImage::from_fn(width, height, |x, y| {
        let n = (hash(x, y, seed) % 24) as i32 - 12;
        let stripe = if ((x + 2 * y) / 6) % 2 == 0 { 30 } else { 0 };
        let r = 60 + (x * 120 / width.max(1)) as i32 + stripe + n;
        let g = 90 + (y * 100 / height.max(1)) as i32 + n;
        let b = 140 - (x * 60 / width.max(1)) as i32 + stripe / 2 + n;
        [r.clamp(0, 255) as u8, g.clamp(0, 255) as u8, b.clamp(0, 255) as u8, 255]
    })
    .expect("non-empty scene")
}

/// A disc whose bounding box is exactly `diameter × diameter`, centered at
/// `(cx, cy)` (the box spans `cx - diameter/2 .. cx - diameter/2 + diameter`).
pub fn disc_mask(width: usize, height: usize, cx: usize, cy: usize, diameter: usize) -> RegionMask {
    let x0 = cx as f64 - (diameter / 2) as f64;
    let y0 = cy as f64 - (diameter / 2) as f64;
    let r = diameter as f64 / 2.0;
    let (mx, my) = (x0 + r, y0 + r);
    RegionMask::from_fn(width, height, |x, y| {
        let dx = x as f64 + 0.5 - mx;
        let dy = y as f64 + 0.5 - my;
        dx * dx + dy * dy <= r * r
    })
}

/// Square scene with a centered disc object painted into the image.
pub fn blob_scene(size: usize, diameter: usize) -> (RasterImage, RegionMask) {
    let mut image = background(size, size, 7);
    let mask = disc_mask(size, size, size / 2, size / 2, diameter);
    paint_object(&mut image, &mask);
    (image, mask)
}

/// Random-ish instance for property tests: `seed` drives both texture and
/// the placement of a rectangular object of at most `max_obj` per side.
pub fn random_scene(width: usize, height: usize, max_obj: usize, seed: u64) -> (RasterImage, RegionMask) {
    let mut image = RasterImage::from_fn(width, height, |x, y| {
        let h = hash(x, y, seed);
        [(h & 0xFF) as u8, ((h >> 8) & 0xFF) as u8, ((h >> 16) & 0xFF) as u8, 255]
    })
    .expect("non-empty scene");
    let pick = |k: u64, n: usize| (hash(k as usize, 0, seed ^ 0xABCD) % n.max(1) as u64) as usize;
    let ow = 1 + pick(1, max_obj.min(width));
    let oh = 1 + pick(2, max_obj.min(height));
    let ox = pick(3, width - ow + 1);
    let oy = pick(4, height - oh + 1);
    let mask = RegionMask::from_fn(width, height, |x, y| {
        (ox..ox + ow).contains(&x)
            && (oy..oy + oh).contains(&y)
            && ((x, y) == (ox, oy) || !hash(x, y, seed ^ 0x55).is_multiple_of(5))
    });
    paint_object(&mut image, &mask);
    (image, mask)
}

fn paint_object(image: &mut RasterImage, mask: &RegionMask) {
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            let p = crate::raster::Point::new(x, y);
            if mask.is_object(p) {
                image.set(p, OBJECT_COLOR);
            }
        }
    }
}
