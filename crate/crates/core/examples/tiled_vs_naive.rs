// Memory traffic of the plain and the tiled best-patch kernels.
//
// Part one counts a single fully valid 8x8 group; part two runs the full
// fill with each kernel and checks the outputs agree.

use patchfill::engine::inpaint;
use patchfill::raster::{mark_valid_sources, PatchSize, Point, RasterImage, RegionMask};
use patchfill::scene::blob_scene;
use patchfill::search::{find_best_patch, KernelCounters, KernelKind, SearchBounds, SearchConfig, SearchFactor};
use patchfill::tiled::{dispatch_find_best_patch, tile_footprint_bytes};

pub struct GroupTraffic {
    pub naive_reads: u64,
    pub tiled_reads: u64,
}

/// One 8x8 group of candidates; the target patch is fully known so every
/// candidate compares all P² pixels.
pub fn one_group(p: usize) -> patchfill::Result<GroupTraffic> {
    let patch = PatchSize::new(p)?;
    let image = RasterImage::from_fn(96, 96, |x, y| [(x * 3) as u8, (y * 5) as u8, (x ^ y) as u8, 255])?;
    let mask = RegionMask::from_fn(96, 96, |x, y| (x, y) == (93, 93));
    let valid = mark_valid_sources(&mask, patch);
    let bounds = SearchBounds {
        left: 24,
        right: 32,
        top: 24,
        bottom: 32,
    };
    let target = Point::new(70, 70);
    let mut naive = KernelCounters::default();
    let mut tiled = KernelCounters::default();
    let a = find_best_patch(&image, &mask, target, &bounds, &valid, patch, &mut naive)?;
    let b = dispatch_find_best_patch(&image, &mask, target, &bounds, &valid, patch, (8, 8), &mut tiled)?;
    assert_eq!(a, b);
    Ok(GroupTraffic {
        naive_reads: naive.global_reads,
        tiled_reads: tiled.global_reads,
    })
}

fn main() -> patchfill::Result<()> {
    println!("{:>3} {:>10} {:>11} {:>11} {:>7}", "P", "footprint", "naive", "tiled", "ratio");
    for p in [9, 13, 17] {
        let t = one_group(p)?;
        println!(
            "{p:>3} {:>9}B {:>11} {:>11} {:>6.1}%",
            tile_footprint_bytes(PatchSize::new(p)?, (8, 8)),
            t.naive_reads,
            t.tiled_reads,
            100.0 * t.tiled_reads as f64 / t.naive_reads as f64
        );
    }

    let (image, mask) = blob_scene(128, 24);
    let mut outputs = Vec::new();
    for kernel in [KernelKind::Naive, KernelKind::Tiled] {
        let config = SearchConfig {
            alpha: SearchFactor::Full,
            kernel,
            ..SearchConfig::default()
        };
        let start = std::time::Instant::now();
        let s = inpaint(image.clone(), mask.clone(), config)?;
        println!(
            "{kernel:>5}: {:.3}s, {} ssd ops, {} global reads, {} tile reads",
            start.elapsed().as_secs_f64(),
            s.counters.ssd_element_ops,
            s.counters.global_reads,
            s.counters.tile_reads
        );
        outputs.push(s.image);
    }
    println!("outputs identical: {}", outputs[0] == outputs[1]);
    Ok(())
}
