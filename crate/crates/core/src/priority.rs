//! Fill-order priority: confidence times data term, evaluated along the fill
//! front, plus the confidence field that carries over between iterations.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::raster::{BorderSet, GrayImage, PatchSize, PixelState, Point, RegionMask};

/// Normalization of the data term for 8-bit intensities.
pub const INTENSITY_RANGE: f64 = 255.0;

#[derive(Clone, Debug, PartialEq)]
pub struct ConfidenceMap {
    width: usize,
    height: usize,
    conf: Vec<f64>,
}

impl ConfidenceMap {
    #[inline]
    pub fn get(&self, p: Point) -> f64 {
        self.conf[p.y * self.width + p.x]
    }

    pub fn values(&self) -> &[f64] {
        &self.conf
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }
}

/// Known pixels start fully trusted, object pixels start at zero.
pub fn init_confidence(mask: &RegionMask) -> ConfidenceMap {
    let (width, height) = mask.dims();
    ConfidenceMap {
        width,
        height,
        conf: mask
            .states()
            .iter()
            .map(|&s| if s == PixelState::Object { 0.0 } else { 1.0 })
            .collect(),
    }
}

/// Assigns `value` to every newly filled pixel. Other entries are untouched.
pub fn update_confidence(conf: &mut ConfidenceMap, filled: &[Point], value: f64) {
    debug_assert!((0.0..=1.0).contains(&value));
    for &p in filled {
        conf.conf[p.y * conf.width + p.x] = value;
    }
}

/// Mean confidence of the known pixels in the patch around `p`, divided by
/// the full patch area even where the patch is clipped by the image edge.
pub fn confidence_term(p: Point, conf: &ConfidenceMap, mask: &RegionMask, patch: PatchSize) -> f64 {
    let (w, h) = mask.dims();
    let mut sum = 0.0;
    for dy in patch.offsets() {
        for dx in patch.offsets() {
            if let Some(q) = p.offset(dx, dy, w, h) {
                if !mask.is_object(q) {
                    sum += conf.get(q);
                }
            }
        }
    }
    sum / patch.area() as f64
}

/// Intensity gradient `(dI/dx, dI/dy)` near `p`, computed from known pixels
/// only.
///
/// Along a straight front the pixels beside `p` are themselves unknown, so the
/// gradient is evaluated at `p` and at each known 8-neighbor, and the one with
/// the largest magnitude is returned (first in row-major order on ties).
pub fn image_gradient(p: Point, gray: &GrayImage, mask: &RegionMask) -> (f64, f64) {
    let (w, h) = mask.dims();
    let mut best = local_gradient(p, gray, mask);
    let mut best_mag = best.0.hypot(best.1);
    for dy in -1..=1 {
        for dx in -1..=1 {
            let Some(q) = p.offset(dx, dy, w, h) else {
                continue;
            };
            if (dx, dy) == (0, 0) || mask.is_object(q) {
                continue;
            }
            let g = local_gradient(q, gray, mask);
            let mag = g.0.hypot(g.1);
            if mag > best_mag {
                best = g;
                best_mag = mag;
            }
        }
    }
    best
}

/// Per axis: central difference when both neighbors are known, otherwise a
/// forward/backward difference on the known side, otherwise 0.
fn local_gradient(c: Point, gray: &GrayImage, mask: &RegionMask) -> (f64, f64) {
    (
        axis_derivative(c, gray, mask, 1, 0),
        axis_derivative(c, gray, mask, 0, 1),
    )
}

fn axis_derivative(c: Point, gray: &GrayImage, mask: &RegionMask, ux: isize, uy: isize) -> f64 {
    let (w, h) = mask.dims();
    let known = |k: isize| {
        c.offset(ux * k, uy * k, w, h)
            .filter(|&q| !mask.is_object(q))
            .map(|q| f64::from(gray.get(q)))
    };
    match (known(-1), known(0), known(1)) {
        (Some(a), _, Some(b)) => (b - a) / 2.0,
        (None, Some(m), Some(b)) => b - m,
        (Some(a), Some(m), None) => m - a,
        (None, None, Some(b)) => known(2).map_or(0.0, |far| far - b),
        (Some(a), None, None) => known(-2).map_or(0.0, |far| a - far),
        _ => 0.0,
    }
}

/// Unit normal of the fill front at `p`, from central differences of the
/// object indicator. Out-of-bounds neighbors replicate `p`. `None` when the
/// difference vanishes.
pub fn front_normal(p: Point, mask: &RegionMask) -> Option<(f64, f64)> {
    let (w, h) = mask.dims();
    let center = f64::from(u8::from(mask.is_object(p)));
    let ind = |dx: isize, dy: isize| {
        p.offset(dx, dy, w, h)
            .map_or(center, |q| f64::from(u8::from(mask.is_object(q))))
    };
    let nx = (ind(1, 0) - ind(-1, 0)) / 2.0;
    let ny = (ind(0, 1) - ind(0, -1)) / 2.0;
    let norm = nx.hypot(ny);
    (norm > 0.0).then(|| (nx / norm, ny / norm))
}

/// `|isophote · normal| / 255`, where the isophote is the gradient rotated
/// by 90°.
pub fn isophote_strength(gradient: (f64, f64), normal: (f64, f64)) -> f64 {
    let isophote = (-gradient.1, gradient.0);
    (isophote.0 * normal.0 + isophote.1 * normal.1).abs() / INTENSITY_RANGE
}

pub fn data_term(p: Point, gray: &GrayImage, mask: &RegionMask) -> f64 {
    match front_normal(p, mask) {
        Some(n) => isophote_strength(image_gradient(p, gray, mask), n),
        None => 0.0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct PriorityRecord {
    pub pixel: Point,
    pub confidence: f64,
    pub data: f64,
    pub priority: f64,
}

impl PriorityRecord {
    pub fn new(pixel: Point, confidence: f64, data: f64) -> Self {
        Self {
            pixel,
            confidence,
            data,
            priority: confidence * data,
        }
    }
}

pub fn evaluate_priority(
    p: Point,
    conf: &ConfidenceMap,
    mask: &RegionMask,
    gray: &GrayImage,
    patch: PatchSize,
) -> PriorityRecord {
    PriorityRecord::new(
        p,
        confidence_term(p, conf, mask, patch),
        data_term(p, gray, mask),
    )
}

/// Higher priority wins; equal priorities go to the earlier row-major pixel.
/// Associative and commutative, so any reduction order gives the same answer.
fn higher_priority(a: PriorityRecord, b: PriorityRecord) -> PriorityRecord {
    if a.priority > b.priority || (a.priority == b.priority && a.pixel < b.pixel) {
        a
    } else {
        b
    }
}

pub fn argmax_priority(records: &[PriorityRecord]) -> Option<PriorityRecord> {
    records.iter().copied().reduce(higher_priority)
}

/// Evaluates the priority of every front pixel (in parallel on the current
/// rayon pool) and returns the maximum.
pub fn select_max_priority(
    border: &BorderSet,
    conf: &ConfidenceMap,
    mask: &RegionMask,
    gray: &GrayImage,
    patch: PatchSize,
) -> Result<PriorityRecord> {
    border
        .points()
        .par_iter()
        .map(|&p| evaluate_priority(p, conf, mask, gray, patch))
        .reduce_with(higher_priority)
        .ok_or(Error::EmptyBorder)
}
