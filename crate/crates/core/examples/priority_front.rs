// The fill front of a small scene and the priority of every front pixel.

use patchfill::priority::{evaluate_priority, init_confidence, select_max_priority, PriorityRecord};
use patchfill::raster::{extract_border, to_grayscale, PatchSize, Point, RasterImage, RegionMask};

/// A vertical edge (dark left, light right) with a square hole across it.
pub fn front_priorities() -> patchfill::Result<(Vec<PriorityRecord>, PriorityRecord)> {
    let image = RasterImage::from_fn(24, 24, |x, _| if x < 12 { [30, 30, 30, 255] } else { [220, 220, 220, 255] })?;
    let mask = RegionMask::from_fn(24, 24, |x, y| (8..16).contains(&x) && (8..16).contains(&y));
    let gray = to_grayscale(&image);
    let conf = init_confidence(&mask);
    let patch = PatchSize::new(5)?;
    let border = extract_border(&mask);
    let records = border
        .iter()
        .map(|&p| evaluate_priority(p, &conf, &mask, &gray, patch))
        .collect();
    let best = select_max_priority(&border, &conf, &mask, &gray, patch)?;
    Ok((records, best))
}

fn main() -> patchfill::Result<()> {
    let (records, best) = front_priorities()?;
    println!("{:>8} {:>7} {:>7} {:>8}", "pixel", "C", "D", "C*D");
    for r in &records {
        println!(
            "{:>8} {:>7.3} {:>7.3} {:>8.4}",
            format!("{},{}", r.pixel.x, r.pixel.y),
            r.confidence,
            r.data,
            r.priority
        );
    }
    let Point { x, y } = best.pixel;
    println!("filled first: ({x},{y}), where the edge meets the hole");
    Ok(())
}
