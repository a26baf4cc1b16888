//! Parameter sweeps over search factor, patch size and kernel.
//!
//! Each cell runs a full fill and records median wall time plus the kernel
//! counters. The counters are deterministic; only wall time varies between
//! repeats.
//!
//! CSV columns, in order:
//!
//! ```text
//! alpha,search_extent,patch_size,kernel,wall_time_seconds,ssd_element_ops,global_reads,tile_reads,iterations
//! ```
//!
//! `alpha` is a number or `full`; `search_extent` is `WIDTHxHEIGHT` of the
//! initial search window. The JSON report is an array of objects with the
//! same keys.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::engine::inpaint;
use crate::error::{Error, Result};
use crate::raster::{PatchSize, RasterImage, RegionMask};
use crate::search::{compute_search_bounds, BoundsPolicy, KernelKind, SearchConfig, SearchFactor, DEFAULT_LOCAL_MEM_CAP};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub alpha: String,
    pub search_extent: String,
    pub patch_size: usize,
    pub kernel: String,
    pub wall_time_seconds: f64,
    pub ssd_element_ops: u64,
    pub global_reads: u64,
    pub tile_reads: u64,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub alphas: Vec<SearchFactor>,
    pub patch_sizes: Vec<PatchSize>,
    pub kernels: Vec<KernelKind>,
    pub repeat: usize,
    pub threads: usize,
    pub group_dim: (usize, usize),
    pub bounds_policy: BoundsPolicy,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            alphas: vec![
                SearchFactor::Full,
                SearchFactor::Factor(2.0),
                SearchFactor::Factor(1.0),
                SearchFactor::Factor(0.5),
                SearchFactor::Factor(0.2),
                SearchFactor::Factor(0.05),
            ],
            patch_sizes: [9, 13, 17]
                .into_iter()
                .map(|p| PatchSize::new(p).expect("odd"))
                .collect(),
            kernels: vec![KernelKind::Naive, KernelKind::Tiled],
            repeat: 1,
            threads: SearchConfig::default().threads,
            group_dim: (8, 8),
            bounds_policy: BoundsPolicy::default(),
        }
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Runs every `(alpha, patch size, kernel)` cell in that nesting order,
/// passing each finished row to `on_row` as it completes.
pub fn run_sweep(
    image: &RasterImage,
    mask: &RegionMask,
    spec: &SweepSpec,
    mut on_row: impl FnMut(&BenchRow),
) -> Result<Vec<BenchRow>> {
    if spec.repeat == 0 {
        return Err(Error::InvalidConfig("repeat must be >= 1".into()));
    }
    let bbox = mask.object_bbox().ok_or(Error::EmptyObjectRegion)?;
    let (w, h) = image.dims();
    let mut rows = Vec::new();
    for &alpha in &spec.alphas {
        let bounds = compute_search_bounds(&bbox, alpha, w, h);
        for &patch_size in &spec.patch_sizes {
            for &kernel in &spec.kernels {
                let config = SearchConfig {
                    alpha,
                    patch_size,
                    kernel,
                    group_dim: spec.group_dim,
                    threads: spec.threads,
                    bounds_policy: spec.bounds_policy,
                    local_mem_cap: DEFAULT_LOCAL_MEM_CAP,
                };
                let mut times = Vec::with_capacity(spec.repeat);
                let mut last = None;
                for _ in 0..spec.repeat {
                    let start = Instant::now();
                    let summary = inpaint(image.clone(), mask.clone(), config.clone())?;
                    times.push(start.elapsed().as_secs_f64());
                    if let Some((counters, iterations)) = last {
                        debug_assert_eq!((counters, iterations), (summary.counters, summary.iterations));
                    }
                    last = Some((summary.counters, summary.iterations));
                }
                let (counters, iterations) = last.expect("repeat >= 1");
                let row = BenchRow {
                    alpha: alpha.to_string(),
                    search_extent: format!("{}x{}", bounds.width(), bounds.height()),
                    patch_size: patch_size.get(),
                    kernel: kernel.to_string(),
                    wall_time_seconds: median(&mut times),
                    ssd_element_ops: counters.ssd_element_ops,
                    global_reads: counters.global_reads,
                    tile_reads: counters.tile_reads,
                    iterations,
                };
                on_row(&row);
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

pub fn write_csv(rows: &[BenchRow], out: impl Write) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_json(rows: &[BenchRow], mut out: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    writeln!(out)?;
    Ok(())
}
