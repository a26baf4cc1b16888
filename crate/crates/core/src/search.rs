//! Best-patch search: the search-window geometry around the object, the SSD
//! patch distance, the exhaustive (naive) search, and the analytic cost model
//! used to reason about search factor and patch size.

use std::fmt;
use std::ops::{Add, AddAssign, Sub};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{BBox, PatchSize, Point, RasterImage, RegionMask, ValidMap};

/// How far the search window extends beyond the object bounding box, as a
/// multiple of the box size on each side, or the whole image.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FactorRepr", into = "FactorRepr")]
pub enum SearchFactor {
    Full,
    Factor(f64),
}

/// Escalation order used when a reduced window holds no usable candidate.
pub const ALPHA_LADDER: [SearchFactor; 6] = [
    SearchFactor::Factor(0.05),
    SearchFactor::Factor(0.2),
    SearchFactor::Factor(0.5),
    SearchFactor::Factor(1.0),
    SearchFactor::Factor(2.0),
    SearchFactor::Full,
];

impl SearchFactor {
    /// Next ladder entry strictly wider than `self`, if any.
    pub fn next_wider(self) -> Option<SearchFactor> {
        match self {
            SearchFactor::Full => None,
            SearchFactor::Factor(a) => Some(
                ALPHA_LADDER
                    .iter()
                    .copied()
                    .find(|s| matches!(s, SearchFactor::Factor(b) if *b > a))
                    .unwrap_or(SearchFactor::Full),
            ),
        }
    }

    pub fn is_full(self) -> bool {
        matches!(self, SearchFactor::Full)
    }
}

impl fmt::Display for SearchFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchFactor::Full => f.write_str("full"),
            SearchFactor::Factor(a) => write!(f, "{a}"),
        }
    }
}

impl FromStr for SearchFactor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("full") {
            return Ok(SearchFactor::Full);
        }
        let a: f64 = s
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("search factor must be a number or 'full' (got '{s}')")))?;
        SearchFactor::try_from(FactorRepr::Number(a))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FactorRepr {
    Number(f64),
    Text(String),
}

impl TryFrom<FactorRepr> for SearchFactor {
    type Error = Error;

    fn try_from(repr: FactorRepr) -> Result<Self> {
        match repr {
            FactorRepr::Number(a) if a.is_finite() && a >= 0.0 => Ok(SearchFactor::Factor(a)),
            FactorRepr::Number(a) => Err(Error::InvalidConfig(format!(
                "search factor must be finite and >= 0 (got {a})"
            ))),
            FactorRepr::Text(s) => s.parse(),
        }
    }
}

impl From<SearchFactor> for FactorRepr {
    fn from(s: SearchFactor) -> Self {
        match s {
            SearchFactor::Full => FactorRepr::Text("full".into()),
            SearchFactor::Factor(a) => FactorRepr::Number(a),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// One candidate per task, every pixel read straight from the image.
    Naive,
    /// Work groups sharing a cooperatively loaded scratch tile.
    Tiled,
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelKind::Naive => "naive",
            KernelKind::Tiled => "tiled",
        })
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "naive" => Ok(KernelKind::Naive),
            "tiled" => Ok(KernelKind::Tiled),
            other => Err(Error::InvalidConfig(format!(
                "kernel must be 'naive' or 'tiled' (got '{other}')"
            ))),
        }
    }
}

/// Default per-group scratch budget in bytes, after the 8 KB local memory of
/// the mobile GPU the tiling scheme was designed for.
pub const DEFAULT_LOCAL_MEM_CAP: usize = 8 * 1024;

/// Which object box the search window is built around.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundsPolicy {
    /// The box of the initial object, fixed for the whole run.
    #[default]
    Initial,
    /// The box of the pixels still to fill, recomputed every iteration.
    PerIteration,
}

impl fmt::Display for BoundsPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundsPolicy::PerIteration => "per-iteration",
            BoundsPolicy::Initial => "initial",
        })
    }
}

impl FromStr for BoundsPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "per-iteration" => Ok(BoundsPolicy::PerIteration),
            "initial" => Ok(BoundsPolicy::Initial),
            other => Err(Error::InvalidConfig(format!(
                "unknown bounds policy '{other}' (expected per-iteration or initial)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub alpha: SearchFactor,
    pub patch_size: PatchSize,
    pub kernel: KernelKind,
    /// Work-group dimensions `(gx, gy)` for the tiled kernel.
    pub group_dim: (usize, usize),
    pub threads: usize,
    pub bounds_policy: BoundsPolicy,
    /// Soft cap on the tiled kernel's scratch footprint. Exceeding it only
    /// logs a warning.
    pub local_mem_cap: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            alpha: SearchFactor::Full,
            patch_size: PatchSize::new(9).expect("9 is odd"),
            kernel: KernelKind::Naive,
            group_dim: (8, 8),
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            bounds_policy: BoundsPolicy::Initial,
            local_mem_cap: DEFAULT_LOCAL_MEM_CAP,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.patch_size.get() < 3 {
            return Err(Error::InvalidConfig(format!(
                "patch size must be at least 3 (got {})",
                self.patch_size
            )));
        }
        if let SearchFactor::Factor(a) = self.alpha {
            if !a.is_finite() || a < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "search factor must be finite and >= 0 (got {a})"
                )));
            }
        }
        if self.group_dim.0 == 0 || self.group_dim.1 == 0 {
            return Err(Error::InvalidConfig("work-group dimensions must be >= 1".into()));
        }
        if self.threads == 0 {
            return Err(Error::InvalidConfig("thread count must be >= 1".into()));
        }
        Ok(())
    }
}

/// Half-open window `[left, right) × [top, bottom)` of candidate centers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchBounds {
    pub left: usize,
    pub right: usize,
    pub top: usize,
    pub bottom: usize,
}

impl SearchBounds {
    pub fn full(width: usize, height: usize) -> Self {
        Self {
            left: 0,
            right: width,
            top: 0,
            bottom: height,
        }
    }

    pub fn width(&self) -> usize {
        self.right - self.left
    }

    pub fn height(&self) -> usize {
        self.bottom - self.top
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    pub fn is_empty(&self) -> bool {
        self.area() == 0
    }

    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        (self.left..self.right).contains(&p.x) && (self.top..self.bottom).contains(&p.y)
    }
}

pub fn round_half_up(v: f64) -> f64 {
    // The epsilon keeps exact halves (e.g. 2.5 from 1.25 * 2) from being
    // pushed below .5 by binary representation error.
    (v + 0.5 + 1e-9).floor()
}

/// Length of the search window along one axis before clamping:
/// `round((1 + 2α) · extent)`.
pub fn expanded_extent(extent: usize, alpha: f64) -> usize {
    round_half_up((1.0 + 2.0 * alpha) * extent as f64) as usize
}

/// Expands the object box by `α·w` left/right and `α·h` up/down around its
/// center, rounds the total extent to whole pixels and clamps to the image.
/// When the expansion margin is odd the extra pixel goes right/down.
pub fn compute_search_bounds(
    bbox: &BBox,
    alpha: SearchFactor,
    width: usize,
    height: usize,
) -> SearchBounds {
    let a = match alpha {
        SearchFactor::Full => return SearchBounds::full(width, height),
        SearchFactor::Factor(a) => a,
    };
    let axis = |min: usize, extent: usize, limit: usize| {
        let margin = (expanded_extent(extent, a) - extent) as i64;
        let before = margin / 2;
        let after = margin - before;
        let lo = (min as i64 - before).max(0) as usize;
        let hi = ((min + extent) as i64 + after).min(limit as i64) as usize;
        (lo, hi)
    };
    let (left, right) = axis(bbox.min_x, bbox.width(), width);
    let (top, bottom) = axis(bbox.min_y, bbox.height(), height);
    SearchBounds {
        left,
        right,
        top,
        bottom,
    }
}

/// Analytic candidate area of the reduced window minus the object box:
/// `((2α + 1)² − 1) · w · h`, ignoring image clamping.
pub fn search_area_size(w: usize, h: usize, alpha: f64) -> f64 {
    let s = 2.0 * alpha + 1.0;
    (s * s - 1.0) * (w * h) as f64
}

/// Ring of candidate centers within `P − 1` pixels of the object box, where
/// a candidate patch can meet a patch centered inside the box:
/// `(2(P − 1) + w) · (2(P − 1) + h) − w · h`.
pub fn overlap_area(w: usize, h: usize, patch: usize) -> usize {
    assert!(patch >= 1, "patch size must be >= 1");
    let ring = 2 * (patch - 1);
    (ring + w) * (ring + h) - w * h
}

/// Closed-form estimate of total SSD work for a whole fill run:
///
/// `w²h² · ((2α + 1)² − (1 − k)(2(P − 1)/w + 1)(2(P − 1)/h + 1) − k)`
///
/// where `k` is the average fraction of a patch that is usable when the
/// candidate overlaps the object ring.
pub fn estimate_complexity(w: usize, h: usize, patch: usize, alpha: f64, k: f64) -> f64 {
    debug_assert!(k > 0.0 && k < 1.0, "k must lie in (0, 1)");
    let (wf, hf) = (w as f64, h as f64);
    let s = 2.0 * alpha + 1.0;
    let ring = 2.0 * (patch as f64 - 1.0);
    wf * wf * hf * hf * (s * s - (1.0 - k) * (ring / wf + 1.0) * (ring / hf + 1.0) - k)
}

/// Instrumentation shared by both kernels. Every field only grows during a
/// run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct KernelCounters {
    /// Per-pixel squared-difference evaluations.
    pub ssd_element_ops: u64,
    /// Pixel reads served from the image itself.
    pub global_reads: u64,
    /// Pixel reads served from a work group's scratch tile.
    pub tile_reads: u64,
    pub candidates_evaluated: u64,
}

impl Add for KernelCounters {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            ssd_element_ops: self.ssd_element_ops + o.ssd_element_ops,
            global_reads: self.global_reads + o.global_reads,
            tile_reads: self.tile_reads + o.tile_reads,
            candidates_evaluated: self.candidates_evaluated + o.candidates_evaluated,
        }
    }
}

impl AddAssign for KernelCounters {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for KernelCounters {
    type Output = Self;

    fn sub(self, o: Self) -> Self {
        Self {
            ssd_element_ops: self.ssd_element_ops - o.ssd_element_ops,
            global_reads: self.global_reads - o.global_reads,
            tile_reads: self.tile_reads - o.tile_reads,
            candidates_evaluated: self.candidates_evaluated - o.candidates_evaluated,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SsdResult {
    pub center: Point,
    pub ssd: u64,
    /// Offsets that contributed to `ssd`.
    pub compared: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BestMatch {
    pub center: Point,
    pub ssd: u64,
}

impl BestMatch {
    /// Smaller SSD wins, ties go to the earlier row-major center.
    pub fn better(a: Option<BestMatch>, b: Option<BestMatch>) -> Option<BestMatch> {
        match (a, b) {
            (Some(x), Some(y)) => Some(if (x.ssd, x.center) <= (y.ssd, y.center) { x } else { y }),
            (x, None) => x,
            (None, y) => y,
        }
    }
}

#[inline]
pub(crate) fn squared_distance(a: [u8; 4], b: [u8; 4]) -> u64 {
    let d = |i: usize| {
        let v = i64::from(a[i]) - i64::from(b[i]);
        (v * v) as u64
    };
    d(0) + d(1) + d(2)
}

/// Sum of squared RGB differences between the patch around `target` and the
/// patch around `candidate`, over offsets where both pixels are in the image
/// and the target pixel is known.
pub fn patch_ssd(
    image: &RasterImage,
    mask: &RegionMask,
    target: Point,
    candidate: Point,
    patch: PatchSize,
    counters: &mut KernelCounters,
) -> SsdResult {
    let (w, h) = image.dims();
    let mut ssd = 0u64;
    let mut compared = 0usize;
    for dy in patch.offsets() {
        for dx in patch.offsets() {
            let (Some(src), Some(tgt)) = (
                candidate.offset(dx, dy, w, h),
                target.offset(dx, dy, w, h),
            ) else {
                continue;
            };
            if mask.is_object(tgt) {
                continue;
            }
            ssd += squared_distance(image.get(tgt), image.get(src));
            compared += 1;
        }
    }
    counters.ssd_element_ops += compared as u64;
    counters.global_reads += 2 * compared as u64;
    SsdResult {
        center: candidate,
        ssd,
        compared,
    }
}

/// Exhaustive best-match search over the valid centers inside `bounds`.
///
/// Rows are scanned in parallel on the current rayon pool; the reduction uses
/// [`BestMatch::better`], so the answer does not depend on thread count.
pub fn find_best_patch(
    image: &RasterImage,
    mask: &RegionMask,
    target: Point,
    bounds: &SearchBounds,
    valid: &ValidMap,
    patch: PatchSize,
    counters: &mut KernelCounters,
) -> Result<BestMatch> {
    let (best, delta) = (bounds.top..bounds.bottom)
        .into_par_iter()
        .map(|y| {
            let mut local = KernelCounters::default();
            let mut best = None;
            for x in bounds.left..bounds.right {
                let q = Point::new(x, y);
                if !valid.is_valid(q) {
                    continue;
                }
                local.candidates_evaluated += 1;
                let r = patch_ssd(image, mask, target, q, patch, &mut local);
                best = BestMatch::better(
                    best,
                    Some(BestMatch {
                        center: q,
                        ssd: r.ssd,
                    }),
                );
            }
            (best, local)
        })
        .reduce(
            || (None, KernelCounters::default()),
            |a, b| (BestMatch::better(a.0, b.0), a.1 + b.1),
        );
    *counters += delta;
    best.ok_or(Error::NoCandidate)
}
