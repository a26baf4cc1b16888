//! Pixel grids, region masks and the per-pixel preparation steps of the fill
//! loop: grayscale conversion, fill-front extraction and source-candidate
//! marking.
//!
//! Coordinates are `(x, y)` with `x` the column and `y` the row. All buffers
//! are row-major.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// One RGBA pixel, 8 bits per channel. Alpha is carried but never compared.
pub type Rgba = [u8; 4];

/// A pixel coordinate. Ordered row-major: first by `y`, then by `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
pub struct Point {
    pub x: usize,
    pub y: usize,
}

impl Point {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }

    /// Offsets the point by a signed delta, returning `None` if it leaves
    /// the `width × height` grid.
    pub fn offset(self, dx: isize, dy: isize, width: usize, height: usize) -> Option<Point> {
        let x = self.x as isize + dx;
        let y = self.y as isize + dy;
        if x < 0 || y < 0 || x >= width as isize || y >= height as isize {
            None
        } else {
            Some(Point::new(x as usize, y as usize))
        }
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Side length of a square patch. Always odd so the patch has a center pixel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatchSize(usize);

impl PatchSize {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || size.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "patch size must be odd (got {size})"
            )));
        }
        Ok(Self(size))
    }

    pub const fn get(self) -> usize {
        self.0
    }

    /// Half-width `(P - 1) / 2`.
    pub const fn radius(self) -> usize {
        (self.0 - 1) / 2
    }

    pub const fn area(self) -> usize {
        self.0 * self.0
    }

    /// Signed offsets `-r..=r` along one axis.
    pub fn offsets(self) -> std::ops::RangeInclusive<isize> {
        let r = self.radius() as isize;
        -r..=r
    }
}

impl fmt::Display for PatchSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    pixels: Vec<Rgba>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, fill: Rgba) -> Result<Self> {
        Self::from_pixels(width, height, vec![fill; width * height])
    }

    pub fn from_pixels(width: usize, height: usize, pixels: Vec<Rgba>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidRaster(format!(
                "image must be at least 1x1 (got {width}x{height})"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidRaster(format!(
                "expected {} pixels for {width}x{height}, got {}",
                width * height,
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> Rgba) -> Result<Self> {
        let pixels = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::from_pixels(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[Rgba] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<Rgba> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, p: Point) -> Rgba {
        self.pixels[p.y * self.width + p.x]
    }

    #[inline]
    pub fn set(&mut self, p: Point, value: Rgba) {
        self.pixels[p.y * self.width + p.x] = value;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    luma: Vec<u8>,
}

impl GrayImage {
    pub fn from_luma(width: usize, height: usize, luma: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || luma.len() != width * height {
            return Err(Error::InvalidRaster(format!(
                "gray buffer of {} bytes does not fit {width}x{height}",
                luma.len()
            )));
        }
        Ok(Self {
            width,
            height,
            luma,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn luma(&self) -> &[u8] {
        &self.luma
    }

    #[inline]
    pub fn get(&self, p: Point) -> u8 {
        self.luma[p.y * self.width + p.x]
    }

    /// Re-derives the luma of the given pixels from `image`.
    pub fn refresh(&mut self, image: &RasterImage, points: &[Point]) {
        for &p in points {
            self.luma[p.y * self.width + p.x] = luma(image.get(p));
        }
    }
}

/// BT.601 luma, rounded half-up in exact integer arithmetic.
#[inline]
pub fn luma(px: Rgba) -> u8 {
    let [r, g, b, _] = px;
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

pub fn to_grayscale(image: &RasterImage) -> GrayImage {
    GrayImage {
        width: image.width,
        height: image.height,
        luma: image.pixels.iter().map(|&px| luma(px)).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PixelState {
    /// Original, known content.
    Source,
    /// Still to be synthesized.
    Object,
    /// Synthesized by an earlier fill iteration.
    Filled,
}

/// Inclusive bounding box of a pixel set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct BBox {
    pub min_x: usize,
    pub min_y: usize,
    pub max_x: usize,
    pub max_y: usize,
}

impl BBox {
    pub fn width(&self) -> usize {
        self.max_x - self.min_x + 1
    }

    pub fn height(&self) -> usize {
        self.max_y - self.min_y + 1
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    /// Geometric center of the box, treating pixels as unit squares.
    pub fn center(&self) -> (f64, f64) {
        (
            self.min_x as f64 + self.width() as f64 / 2.0,
            self.min_y as f64 + self.height() as f64 / 2.0,
        )
    }

    pub fn contains(&self, p: Point) -> bool {
        (self.min_x..=self.max_x).contains(&p.x) && (self.min_y..=self.max_y).contains(&p.y)
    }

    fn include(self, p: Point) -> Self {
        Self {
            min_x: self.min_x.min(p.x),
            min_y: self.min_y.min(p.y),
            max_x: self.max_x.max(p.x),
            max_y: self.max_y.max(p.y),
        }
    }
}

/// Per-pixel region labels plus a tight bounding box of the remaining
/// object pixels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionMask {
    width: usize,
    height: usize,
    state: Vec<PixelState>,
    bbox: Option<BBox>,
    object_count: usize,
}

impl RegionMask {
    /// Builds a mask where `is_object(x, y)` selects the object region.
    pub fn from_fn(width: usize, height: usize, is_object: impl Fn(usize, usize) -> bool) -> Self {
        let state = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| {
                if is_object(x, y) {
                    PixelState::Object
                } else {
                    PixelState::Source
                }
            })
            .collect();
        Self::from_states(width, height, state)
    }

    pub fn from_states(width: usize, height: usize, state: Vec<PixelState>) -> Self {
        assert_eq!(state.len(), width * height, "state buffer size");
        let mut mask = Self {
            width,
            height,
            state,
            bbox: None,
            object_count: 0,
        };
        mask.rescan(0, 0, width, height);
        mask
    }

    /// Mask ingestion rule: luma ≥ 128 is object, everything else source.
    pub fn from_mask_image(mask: &GrayImage) -> Self {
        Self::from_fn(mask.width, mask.height, |x, y| {
            mask.luma[y * mask.width + x] >= 128
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn states(&self) -> &[PixelState] {
        &self.state
    }

    #[inline]
    pub fn state(&self, p: Point) -> PixelState {
        self.state[p.y * self.width + p.x]
    }

    #[inline]
    pub fn is_object(&self, p: Point) -> bool {
        self.state(p) == PixelState::Object
    }

    pub fn object_count(&self) -> usize {
        self.object_count
    }

    /// Tight bounding box of the remaining object pixels.
    pub fn object_bbox(&self) -> Option<BBox> {
        self.bbox
    }

    pub fn object_center(&self) -> Option<(f64, f64)> {
        self.bbox.map(|b| b.center())
    }

    /// Marks object pixels as filled and re-tightens the bounding box.
    /// Points that are not currently object pixels are ignored.
    pub fn mark_filled(&mut self, points: &[Point]) {
        let mut changed = false;
        for &p in points {
            let slot = &mut self.state[p.y * self.width + p.x];
            if *slot == PixelState::Object {
                *slot = PixelState::Filled;
                changed = true;
            }
        }
        if changed {
            if let Some(b) = self.bbox {
                self.rescan(b.min_x, b.min_y, b.max_x + 1, b.max_y + 1);
            }
        }
    }

    fn rescan(&mut self, x0: usize, y0: usize, x1: usize, y1: usize) {
        let mut bbox: Option<BBox> = None;
        let mut count = 0;
        for y in y0..y1 {
            for x in x0..x1 {
                if self.state[y * self.width + x] == PixelState::Object {
                    let p = Point::new(x, y);
                    count += 1;
                    bbox = Some(match bbox {
                        None => BBox {
                            min_x: x,
                            min_y: y,
                            max_x: x,
                            max_y: y,
                        },
                        Some(b) => b.include(p),
                    });
                }
            }
        }
        self.bbox = bbox;
        self.object_count = count;
    }
}

/// Fill-front pixels in row-major order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BorderSet(Vec<Point>);

impl BorderSet {
    pub fn points(&self) -> &[Point] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Point> {
        self.0.iter()
    }
}

const FOUR_NEIGHBORS: [(isize, isize); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];

/// Object pixels with at least one in-bounds 4-neighbor that is not object.
pub fn extract_border(mask: &RegionMask) -> BorderSet {
    let Some(b) = mask.bbox else {
        return BorderSet::default();
    };
    let mut out = Vec::new();
    for y in b.min_y..=b.max_y {
        for x in b.min_x..=b.max_x {
            let p = Point::new(x, y);
            if !mask.is_object(p) {
                continue;
            }
            let on_front = FOUR_NEIGHBORS.iter().any(|&(dx, dy)| {
                p.offset(dx, dy, mask.width, mask.height)
                    .is_some_and(|n| !mask.is_object(n))
            });
            if on_front {
                out.push(p);
            }
        }
    }
    BorderSet(out)
}

/// Which pixels may serve as the center of a donor patch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidMap {
    width: usize,
    height: usize,
    valid: Vec<bool>,
    count: usize,
}

impl ValidMap {
    #[inline]
    pub fn is_valid(&self, p: Point) -> bool {
        self.valid[p.y * self.width + p.x]
    }

    /// Number of valid centers.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.valid
    }
}

/// Marks every center whose `P × P` patch lies inside the image and touches
/// only source pixels.
///
/// Uses a summed-area table of non-source pixels, so the cost is linear in
/// the image size regardless of `P`.
pub fn mark_valid_sources(mask: &RegionMask, patch: PatchSize) -> ValidMap {
    let (w, h) = (mask.width, mask.height);
    let stride = w + 1;
    let mut sat = vec![0u32; stride * (h + 1)];
    for y in 0..h {
        let mut row = 0u32;
        for x in 0..w {
            row += u32::from(mask.state[y * w + x] != PixelState::Source);
            sat[(y + 1) * stride + x + 1] = sat[y * stride + x + 1] + row;
        }
    }

    let r = patch.radius();
    let size = patch.get();
    let mut valid = vec![false; w * h];
    let mut count = 0;
    if size <= w && size <= h {
        for cy in r..h - r {
            for cx in r..w - r {
                let (x0, y0, x1, y1) = (cx - r, cy - r, cx + r + 1, cy + r + 1);
                let blocked = sat[y1 * stride + x1] + sat[y0 * stride + x0]
                    - sat[y0 * stride + x1]
                    - sat[y1 * stride + x0];
                if blocked == 0 {
                    valid[cy * w + cx] = true;
                    count += 1;
                }
            }
        }
    }
    ValidMap {
        width: w,
        height: h,
        valid,
        count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn rgba(r: u8, g: u8, b: u8) -> Rgba {
        [r, g, b, 255]
    }

    #[test]
    fn grayscale_fixed_points() {
        assert_eq!(luma(rgba(255, 255, 255)), 255);
        assert_eq!(luma(rgba(0, 0, 0)), 0);
        // round(0.299 * 255) = round(76.245)
        assert_eq!(luma(rgba(255, 0, 0)), 76);
    }

    #[test]
    fn grayscale_is_identity_on_gray() {
        for v in 0..=255u8 {
            assert_eq!(luma(rgba(v, v, v)), v);
        }
    }

    #[test]
    fn grayscale_ignores_alpha() {
        assert_eq!(luma([10, 200, 30, 0]), luma([10, 200, 30, 255]));
    }

    #[test]
    fn to_grayscale_keeps_dims() {
        let img = RasterImage::from_fn(5, 3, |x, y| rgba(x as u8 * 40, y as u8 * 60, 7)).unwrap();
        let g = to_grayscale(&img);
        assert_eq!((g.width(), g.height()), (5, 3));
        assert_eq!(g.get(Point::new(4, 2)), luma(rgba(160, 120, 7)));
    }

    #[test]
    fn raster_rejects_bad_buffers() {
        assert!(RasterImage::new(0, 4, [0; 4]).is_err());
        assert!(RasterImage::from_pixels(2, 2, vec![[0; 4]; 3]).is_err());
    }

    #[test]
    fn patch_size_must_be_odd() {
        assert!(PatchSize::new(8).is_err());
        assert!(PatchSize::new(0).is_err());
        let p = PatchSize::new(9).unwrap();
        assert_eq!((p.radius(), p.area()), (4, 81));
    }

    #[test]
    fn point_order_is_row_major() {
        assert!(Point::new(9, 0) < Point::new(0, 1));
        assert!(Point::new(1, 3) < Point::new(2, 3));
    }

    #[test]
    fn border_of_full_object_is_empty() {
        let mask = RegionMask::from_fn(6, 4, |_, _| true);
        assert!(extract_border(&mask).is_empty());
    }

    #[test]
    fn border_of_single_pixel() {
        let mask = RegionMask::from_fn(5, 5, |x, y| (x, y) == (2, 3));
        assert_eq!(extract_border(&mask).points(), &[Point::new(2, 3)]);
    }

    #[test]
    fn border_of_3x3_block_is_its_perimeter() {
        let mask = RegionMask::from_fn(9, 9, |x, y| (3..6).contains(&x) && (3..6).contains(&y));
        let border = extract_border(&mask);
        assert_eq!(border.len(), 8);
        assert!(!border.points().contains(&Point::new(4, 4)));
        let mut sorted = border.points().to_vec();
        sorted.sort();
        assert_eq!(sorted, border.points());
    }

    #[test]
    fn edge_object_pixels_need_an_in_bounds_non_object_neighbor() {
        // Left two columns are object; column 0 pixels only touch the edge
        // and other object pixels.
        let mask = RegionMask::from_fn(4, 3, |x, _| x < 2);
        let border = extract_border(&mask);
        assert!(border.iter().all(|p| p.x == 1));
        assert_eq!(border.len(), 3);
    }

    #[test]
    fn bbox_tracks_fills() {
        let mut mask = RegionMask::from_fn(8, 8, |x, y| (2..5).contains(&x) && (1..4).contains(&y));
        assert_eq!(mask.object_count(), 9);
        let b = mask.object_bbox().unwrap();
        assert_eq!((b.min_x, b.min_y, b.max_x, b.max_y), (2, 1, 4, 3));
        assert_eq!(b.center(), (3.5, 2.5));
        let top_row: Vec<_> = (2..5).map(|x| Point::new(x, 1)).collect();
        mask.mark_filled(&top_row);
        assert_eq!(mask.object_count(), 6);
        assert_eq!(mask.object_bbox().unwrap().min_y, 2);
        assert_eq!(mask.state(Point::new(3, 1)), PixelState::Filled);
        let rest: Vec<_> = (2..5).flat_map(|x| (2..4).map(move |y| Point::new(x, y))).collect();
        mask.mark_filled(&rest);
        assert_eq!(mask.object_bbox(), None);
        assert_eq!(mask.object_count(), 0);
    }

    #[test]
    fn mask_ingestion_threshold() {
        let g = GrayImage::from_luma(3, 1, vec![127, 128, 255]).unwrap();
        let mask = RegionMask::from_mask_image(&g);
        assert_eq!(
            mask.states(),
            &[PixelState::Source, PixelState::Object, PixelState::Object]
        );
    }

    #[test]
    fn valid_centers_in_all_source_10x10() {
        let mask = RegionMask::from_fn(10, 10, |_, _| false);
        let v = mark_valid_sources(&mask, PatchSize::new(9).unwrap());
        assert_eq!(v.count(), 4);
        for (x, y) in [(4, 4), (4, 5), (5, 4), (5, 5)] {
            assert!(v.is_valid(Point::new(x, y)));
        }
    }

    #[test]
    fn valid_centers_when_patch_too_large_or_all_object() {
        let mask = RegionMask::from_fn(10, 6, |_, _| false);
        assert_eq!(mark_valid_sources(&mask, PatchSize::new(7).unwrap()).count(), 0);
        let mask = RegionMask::from_fn(10, 10, |_, _| true);
        assert_eq!(mark_valid_sources(&mask, PatchSize::new(3).unwrap()).count(), 0);
    }

    #[test]
    fn filled_pixels_block_candidates() {
        let mut mask = RegionMask::from_fn(7, 7, |x, y| (x, y) == (3, 3));
        mask.mark_filled(&[Point::new(3, 3)]);
        let v = mark_valid_sources(&mask, PatchSize::new(3).unwrap());
        // Every 3x3 window in a 7x7 grid except the nine touching (3,3).
        assert_eq!(v.count(), 25 - 9);
    }

    fn arb_mask() -> impl Strategy<Value = RegionMask> {
        (1usize..14, 1usize..14).prop_flat_map(|(w, h)| {
            proptest::collection::vec(0u8..3, w * h).prop_map(move |cells| {
                let state = cells
                    .into_iter()
                    .map(|c| match c {
                        0 => PixelState::Source,
                        1 => PixelState::Object,
                        _ => PixelState::Filled,
                    })
                    .collect();
                RegionMask::from_states(w, h, state)
            })
        })
    }

    proptest! {
        #[test]
        fn border_matches_set_comprehension(mask in arb_mask()) {
            let (w, h) = mask.dims();
            let mut expected = BTreeSet::new();
            for y in 0..h {
                for x in 0..w {
                    let p = Point::new(x, y);
                    if !mask.is_object(p) { continue; }
                    let neighbors = [(x.wrapping_sub(1), y), (x + 1, y), (x, y.wrapping_sub(1)), (x, y + 1)];
                    if neighbors.iter().any(|&(nx, ny)| nx < w && ny < h && !mask.is_object(Point::new(nx, ny))) {
                        expected.insert(p);
                    }
                }
            }
            let got: BTreeSet<_> = extract_border(&mask).iter().copied().collect();
            prop_assert_eq!(got, expected);
        }

        #[test]
        fn valid_centers_never_touch_object_or_filled(mask in arb_mask(), p in prop::sample::select(vec![1usize, 3, 5, 7])) {
            let patch = PatchSize::new(p).unwrap();
            let v = mark_valid_sources(&mask, patch);
            let r = patch.radius() as isize;
            let (w, h) = mask.dims();
            let mut brute = 0;
            for y in 0..h {
                for x in 0..w {
                    let c = Point::new(x, y);
                    let clean = (-r..=r).all(|dy| (-r..=r).all(|dx| {
                        c.offset(dx, dy, w, h).is_some_and(|q| mask.state(q) == PixelState::Source)
                    }));
                    prop_assert_eq!(v.is_valid(c), clean);
                    brute += usize::from(clean);
                }
            }
            prop_assert_eq!(v.count(), brute);
        }
    }
}
