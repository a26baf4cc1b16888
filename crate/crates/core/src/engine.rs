//! The iterative fill driver.
//!
//! Initialization converts the image to gray, builds the region mask, the
//! confidence field and the donor-candidate map. Each iteration then walks
//! the fill front, picks the highest-priority target, searches for the best
//! donor patch (escalating the search window when a reduced window is empty),
//! copies the donor into the unknown part of the target patch and updates
//! mask, confidence and gray image.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::priority::{init_confidence, select_max_priority, update_confidence, ConfidenceMap, PriorityRecord};
use crate::raster::{
    extract_border, mark_valid_sources, BBox, to_grayscale, GrayImage, Point, RasterImage, RegionMask, ValidMap,
};
use crate::search::{compute_search_bounds, find_best_patch, BoundsPolicy, KernelCounters, KernelKind, SearchBounds, SearchConfig, SearchFactor};
use crate::tiled::{dispatch_find_best_patch, tile_footprint_bytes};

/// Mask reads per pixel visited while scanning for the fill front: the pixel
/// and its four neighbors.
const BORDER_READS_PER_PIXEL: u64 = 5;
/// Upper bound on gray and mask reads for one data-term evaluation: nine
/// local gradients of up to six reads each, plus four for the front normal.
const DATA_TERM_READS: u64 = 9 * 6 + 4;

/// Element-operation counts per workflow phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PhaseOps {
    pub grayscale: u64,
    pub border_update: u64,
    pub mark_sources: u64,
    pub priority_update: u64,
    pub confidence_update: u64,
    pub best_patch: u64,
    pub image_update: u64,
}

impl PhaseOps {
    pub fn total(&self) -> u64 {
        self.grayscale
            + self.border_update
            + self.mark_sources
            + self.priority_update
            + self.confidence_update
            + self.best_patch
            + self.image_update
    }

    /// Fraction of all counted operations spent in the best-patch search.
    pub fn best_patch_share(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            t => self.best_patch as f64 / t as f64,
        }
    }

    pub fn rows(&self) -> [(&'static str, u64); 7] {
        [
            ("grayscale conversion", self.grayscale),
            ("fill front update", self.border_update),
            ("source marking", self.mark_sources),
            ("priority update", self.priority_update),
            ("confidence update", self.confidence_update),
            ("best patch search", self.best_patch),
            ("image update", self.image_update),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationReport {
    pub iteration: usize,
    pub target: PriorityRecord,
    pub source: Point,
    pub ssd: u64,
    /// Search factor that produced the match, after any escalation.
    pub alpha_used: SearchFactor,
    pub pixels_filled: usize,
    pub remaining_object_pixels: usize,
    pub counters_delta: KernelCounters,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub image: RasterImage,
    pub iterations: usize,
    pub initial_object_pixels: usize,
    pub counters: KernelCounters,
    pub phases: PhaseOps,
    /// Iterations that had to widen the search window at least once.
    pub escalations: usize,
}

pub struct InpaintState {
    image: RasterImage,
    gray: GrayImage,
    mask: RegionMask,
    conf: ConfidenceMap,
    valid: ValidMap,
    counters: KernelCounters,
    phases: PhaseOps,
    iteration: usize,
    escalations: usize,
    initial_object_pixels: usize,
    initial_bbox: BBox,
    config: SearchConfig,
    pool: rayon::ThreadPool,
}

impl InpaintState {
    pub fn image(&self) -> &RasterImage {
        &self.image
    }

    pub fn gray(&self) -> &GrayImage {
        &self.gray
    }

    pub fn mask(&self) -> &RegionMask {
        &self.mask
    }

    pub fn confidence(&self) -> &ConfidenceMap {
        &self.conf
    }

    pub fn valid_map(&self) -> &ValidMap {
        &self.valid
    }

    pub fn counters(&self) -> KernelCounters {
        self.counters
    }

    pub fn phases(&self) -> PhaseOps {
        self.phases
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    pub fn initial_object_pixels(&self) -> usize {
        self.initial_object_pixels
    }

    pub fn remaining_object_pixels(&self) -> usize {
        self.mask.object_count()
    }

    pub fn is_done(&self) -> bool {
        self.mask.object_count() == 0
    }

    /// Search window the next iteration starts from.
    pub fn current_bounds(&self) -> Option<SearchBounds> {
        let (w, h) = self.image.dims();
        self.window_box()
            .map(|b| compute_search_bounds(&b, self.config.alpha, w, h))
    }

    fn window_box(&self) -> Option<BBox> {
        let current = self.mask.object_bbox()?;
        Some(match self.config.bounds_policy {
            BoundsPolicy::PerIteration => current,
            BoundsPolicy::Initial => self.initial_bbox,
        })
    }

    pub fn into_summary(self) -> RunSummary {
        RunSummary {
            image: self.image,
            iterations: self.iteration,
            initial_object_pixels: self.initial_object_pixels,
            counters: self.counters,
            phases: self.phases,
            escalations: self.escalations,
        }
    }
}

pub fn init_state(image: RasterImage, mask: RegionMask, config: SearchConfig) -> Result<InpaintState> {
    config.validate()?;
    if image.dims() != mask.dims() {
        return Err(Error::DimensionMismatch {
            image_width: image.width(),
            image_height: image.height(),
            mask_width: mask.width(),
            mask_height: mask.height(),
        });
    }
    let pixel_count = image.width() * image.height();
    match mask.object_count() {
        0 => return Err(Error::EmptyObjectRegion),
        n if n == pixel_count => return Err(Error::ObjectCoversImage),
        _ => {}
    }
    if config.kernel == KernelKind::Tiled {
        let footprint = tile_footprint_bytes(config.patch_size, config.group_dim);
        if footprint > config.local_mem_cap {
            log::warn!(
                "tile footprint of {footprint} bytes exceeds the {} byte local memory cap",
                config.local_mem_cap
            );
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;

    let gray = to_grayscale(&image);
    let conf = init_confidence(&mask);
    let valid = mark_valid_sources(&mask, config.patch_size);
    let phases = PhaseOps {
        grayscale: pixel_count as u64,
        // One pass to build the summed-area table, one to query it.
        mark_sources: 2 * pixel_count as u64,
        ..PhaseOps::default()
    };
    Ok(InpaintState {
        image,
        gray,
        initial_object_pixels: mask.object_count(),
        initial_bbox: mask.object_bbox().expect("object region is non-empty"),
        mask,
        conf,
        valid,
        counters: KernelCounters::default(),
        phases,
        iteration: 0,
        escalations: 0,
        config,
        pool,
    })
}

/// One fill iteration.
pub fn step(state: &mut InpaintState) -> Result<IterationReport> {
    let bbox = state.mask.object_bbox().ok_or(Error::EmptyObjectRegion)?;
    let window = state.window_box().ok_or(Error::EmptyObjectRegion)?;
    let patch = state.config.patch_size;
    let (w, h) = state.image.dims();

    let border = extract_border(&state.mask);
    state.phases.border_update += BORDER_READS_PER_PIXEL * bbox.area() as u64;

    let target = state
        .pool
        .install(|| select_max_priority(&border, &state.conf, &state.mask, &state.gray, patch))?;
    state.phases.priority_update += border.len() as u64 * (patch.area() as u64 + DATA_TERM_READS);

    let before = state.counters;
    let mut alpha = state.config.alpha;
    let found = loop {
        let bounds = compute_search_bounds(&window, alpha, w, h);
        let result = state.pool.install(|| match state.config.kernel {
            KernelKind::Naive => find_best_patch(
                &state.image,
                &state.mask,
                target.pixel,
                &bounds,
                &state.valid,
                patch,
                &mut state.counters,
            ),
            KernelKind::Tiled => dispatch_find_best_patch(
                &state.image,
                &state.mask,
                target.pixel,
                &bounds,
                &state.valid,
                patch,
                state.config.group_dim,
                &mut state.counters,
            ),
        });
        match result {
            Ok(m) => break m,
            Err(Error::NoCandidate) => match alpha.next_wider() {
                Some(wider) => {
                    log::debug!("no candidate at alpha {alpha}, widening to {wider}");
                    alpha = wider;
                }
                None => return Err(Error::NoCandidate),
            },
            Err(e) => return Err(e),
        }
    };
    if alpha != state.config.alpha {
        state.escalations += 1;
    }
    let delta = state.counters - before;
    state.phases.best_patch += delta.ssd_element_ops;

    let mut filled = Vec::with_capacity(patch.area());
    for dy in patch.offsets() {
        for dx in patch.offsets() {
            let Some(t) = target.pixel.offset(dx, dy, w, h) else {
                continue;
            };
            if !state.mask.is_object(t) {
                continue;
            }
            let s = found
                .center
                .offset(dx, dy, w, h)
                .expect("valid donor patches lie inside the image");
            state.image.set(t, state.image.get(s));
            filled.push(t);
        }
    }
    state.mask.mark_filled(&filled);
    update_confidence(&mut state.conf, &filled, target.confidence);
    state.gray.refresh(&state.image, &filled);
    state.phases.confidence_update += filled.len() as u64;
    state.phases.image_update += 2 * filled.len() as u64;

    state.iteration += 1;
    Ok(IterationReport {
        iteration: state.iteration,
        target,
        source: found.center,
        ssd: found.ssd,
        alpha_used: alpha,
        pixels_filled: filled.len(),
        remaining_object_pixels: state.mask.object_count(),
        counters_delta: delta,
    })
}

/// Iterates until the object region is empty, reporting every iteration to
/// `progress` in order.
pub fn run(state: &mut InpaintState, mut progress: impl FnMut(&IterationReport)) -> Result<()> {
    while !state.is_done() {
        let report = step(state)?;
        progress(&report);
    }
    Ok(())
}

/// Convenience wrapper: initialize, run to completion, summarize.
pub fn inpaint(image: RasterImage, mask: RegionMask, config: SearchConfig) -> Result<RunSummary> {
    let mut state = init_state(image, mask, config)?;
    run(&mut state, |_| {})?;
    Ok(state.into_summary())
}

/// Rough iteration count for filling a `w × h` object with `P × P` patches.
pub fn iteration_estimate(w: usize, h: usize, patch: usize) -> usize {
    assert!(patch >= 1, "patch size must be >= 1");
    (w * h).div_ceil(patch * patch)
}
