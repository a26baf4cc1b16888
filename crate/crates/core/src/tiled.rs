//! Work-group execution of the best-patch search.
//!
//! The search window is cut into `gx × gy` groups of candidate centers. Each
//! group first copies everything its candidates need into a private scratch
//! tile: the `(P + gx − 1) × (P + gy − 1)` source window covering all of its
//! candidate patches, plus the target patch and its known-pixel labels. The
//! copy follows a strided cooperative schedule in which every scratch element
//! is fetched from the image exactly once. The SSD loop then reads only from
//! the tile.
//!
//! Results are bit-identical to [`crate::search::find_best_patch`]; what
//! changes is where the reads are served from, which the counters record.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::raster::{PatchSize, Point, RasterImage, RegionMask, Rgba, ValidMap};
use crate::search::{squared_distance, BestMatch, KernelCounters, SearchBounds};

/// Bytes per scratch element: one RGBA pixel or one 32-bit label.
const ELEMENT_BYTES: usize = 4;

/// Partition of a search window into work groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WorkGroupGrid {
    pub bounds: SearchBounds,
    pub group_dim: (usize, usize),
    pub group_count: (usize, usize),
}

impl WorkGroupGrid {
    pub fn new(bounds: SearchBounds, group_dim: (usize, usize)) -> Self {
        let (gx, gy) = group_dim;
        Self {
            bounds,
            group_dim,
            group_count: (bounds.width().div_ceil(gx), bounds.height().div_ceil(gy)),
        }
    }

    pub fn len(&self) -> usize {
        self.group_count.0 * self.group_count.1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Top-left candidate of every group, row-major. Work items of edge
    /// groups that fall outside the bounds are inert.
    pub fn origins(&self) -> impl Iterator<Item = Point> + '_ {
        let (gx, gy) = self.group_dim;
        (0..self.group_count.1).flat_map(move |j| {
            (0..self.group_count.0)
                .map(move |i| Point::new(self.bounds.left + i * gx, self.bounds.top + j * gy))
        })
    }
}

/// Scratch size of one group: source window, target patch pixels and target
/// patch labels, each element 4 bytes.
pub fn tile_footprint_bytes(patch: PatchSize, group_dim: (usize, usize)) -> usize {
    let p = patch.get();
    ELEMENT_BYTES * (p + group_dim.0 - 1) * (p + group_dim.1 - 1) + 2 * ELEMENT_BYTES * p * p
}

/// A group's private copy of everything its SSD evaluations read.
#[derive(Clone, Debug)]
pub struct TileBuffer {
    /// Image coordinate of the source window's top-left element.
    anchor: (isize, isize),
    tile_width: usize,
    tile_height: usize,
    source: Vec<Rgba>,
    source_valid: Vec<bool>,
    patch: PatchSize,
    patch_data: Vec<Rgba>,
    /// True where the target patch pixel is inside the image and known.
    patch_label: Vec<bool>,
}

impl TileBuffer {
    pub fn dims(&self) -> (usize, usize) {
        (self.tile_width, self.tile_height)
    }

    pub fn anchor(&self) -> (isize, isize) {
        self.anchor
    }

    /// Source element at tile coordinate `(tx, ty)`, or `None` where the
    /// window hangs over the image edge.
    pub fn source_element(&self, tx: usize, ty: usize) -> Option<Rgba> {
        let i = ty * self.tile_width + tx;
        self.source_valid[i].then(|| self.source[i])
    }

    /// Target patch pixel and label at patch coordinate `(px, py)`.
    pub fn patch_element(&self, px: usize, py: usize) -> (Rgba, bool) {
        let i = py * self.patch.get() + px;
        (self.patch_data[i], self.patch_label[i])
    }

    pub fn footprint_bytes(&self) -> usize {
        ELEMENT_BYTES * (self.source.len() + self.patch_data.len() + self.patch_label.len())
    }
}

/// Fills a group's scratch tile with the strided cooperative schedule: work
/// item `l` of `G` loads elements `l, l + G, l + 2G, …`, taking a target patch
/// element and its label along with the source element while the index is
/// below `P²`. Each in-image element costs one global read.
pub fn load_tile(
    image: &RasterImage,
    mask: &RegionMask,
    target: Point,
    group_origin: Point,
    patch: PatchSize,
    group_dim: (usize, usize),
    counters: &mut KernelCounters,
) -> TileBuffer {
    let (w, h) = image.dims();
    let p = patch.get();
    let r = patch.radius() as isize;
    let tile_width = p + group_dim.0 - 1;
    let tile_height = p + group_dim.1 - 1;
    let anchor = (group_origin.x as isize - r, group_origin.y as isize - r);

    let tile_len = tile_width * tile_height;
    let patch_len = p * p;
    let mut tile = TileBuffer {
        anchor,
        tile_width,
        tile_height,
        source: vec![[0; 4]; tile_len],
        source_valid: vec![false; tile_len],
        patch,
        patch_data: vec![[0; 4]; patch_len],
        patch_label: vec![false; patch_len],
    };

    let group_size = group_dim.0 * group_dim.1;
    let local_mem_len = tile_len.max(patch_len);
    let mut reads = 0u64;
    for local_id in 0..group_size {
        let mut index = local_id;
        while index < local_mem_len {
            if index < patch_len {
                let dx = (index % p) as isize - r;
                let dy = (index / p) as isize - r;
                if let Some(t) = target.offset(dx, dy, w, h) {
                    tile.patch_label[index] = !mask.is_object(t);
                    tile.patch_data[index] = image.get(t);
                    reads += 2;
                }
            }
            if index < tile_len {
                let x = anchor.0 + (index % tile_width) as isize;
                let y = anchor.1 + (index / tile_width) as isize;
                if x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h {
                    tile.source[index] = image.get(Point::new(x as usize, y as usize));
                    tile.source_valid[index] = true;
                    reads += 1;
                }
            }
            index += group_size;
        }
    }
    counters.global_reads += reads;
    tile
}

/// Runs every work item of one group against its tile. Work item `(i, j)`
/// evaluates candidate `origin + (i, j)`, whose patch starts at tile
/// coordinate `(i, j)`.
fn evaluate_group(
    tile: &TileBuffer,
    origin: Point,
    bounds: &SearchBounds,
    valid: &ValidMap,
    group_dim: (usize, usize),
    counters: &mut KernelCounters,
) -> Option<BestMatch> {
    let p = tile.patch.get();
    let mut best = None;
    for j in 0..group_dim.1 {
        for i in 0..group_dim.0 {
            let q = Point::new(origin.x + i, origin.y + j);
            if !bounds.contains(q) || !valid.is_valid(q) {
                continue;
            }
            counters.candidates_evaluated += 1;
            let mut ssd = 0u64;
            let mut compared = 0u64;
            for py in 0..p {
                let row = (j + py) * tile.tile_width + i;
                for px in 0..p {
                    let pi = py * p + px;
                    if !tile.patch_label[pi] {
                        continue;
                    }
                    let si = row + px;
                    if !tile.source_valid[si] {
                        continue;
                    }
                    ssd += squared_distance(tile.patch_data[pi], tile.source[si]);
                    compared += 1;
                }
            }
            counters.ssd_element_ops += compared;
            counters.tile_reads += 2 * compared;
            best = BestMatch::better(best, Some(BestMatch { center: q, ssd }));
        }
    }
    best
}

fn group_has_candidate(
    origin: Point,
    bounds: &SearchBounds,
    valid: &ValidMap,
    group_dim: (usize, usize),
) -> bool {
    let x_end = (origin.x + group_dim.0).min(bounds.right);
    let y_end = (origin.y + group_dim.1).min(bounds.bottom);
    (origin.y..y_end).any(|y| (origin.x..x_end).any(|x| valid.is_valid(Point::new(x, y))))
}

/// Drop-in replacement for [`crate::search::find_best_patch`] that executes
/// the search as work groups on the current rayon pool. Groups without a
/// single valid candidate are not dispatched.
#[allow(clippy::too_many_arguments)]
pub fn dispatch_find_best_patch(
    image: &RasterImage,
    mask: &RegionMask,
    target: Point,
    bounds: &SearchBounds,
    valid: &ValidMap,
    patch: PatchSize,
    group_dim: (usize, usize),
    counters: &mut KernelCounters,
) -> Result<BestMatch> {
    let grid = WorkGroupGrid::new(*bounds, group_dim);
    let origins: Vec<Point> = grid.origins().collect();
    let (best, delta) = origins
        .par_iter()
        .filter(|&&origin| group_has_candidate(origin, bounds, valid, group_dim))
        .map(|&origin| {
            let mut local = KernelCounters::default();
            let tile = load_tile(image, mask, target, origin, patch, group_dim, &mut local);
            let best = evaluate_group(&tile, origin, bounds, valid, group_dim, &mut local);
            (best, local)
        })
        .reduce(
            || (None, KernelCounters::default()),
            |a, b| (BestMatch::better(a.0, b.0), a.1 + b.1),
        );
    *counters += delta;
    best.ok_or(Error::NoCandidate)
}
