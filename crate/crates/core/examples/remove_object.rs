// Removes the object from an image, printing per-iteration progress.
//
// ```text
// cargo run --release --example remove_object [image mask out]
// ```
//
// Without arguments it uses the bundled scene and writes
// `target/remove_object.png`.

use std::path::{Path, PathBuf};

use patchfill::engine::{init_state, run, RunSummary};
use patchfill::io::{load_image, load_mask, save_image};
use patchfill::raster::PatchSize;
use patchfill::search::{KernelKind, SearchConfig, SearchFactor};

pub fn remove_object(image: &Path, mask: &Path, out: &Path, verbose: bool) -> patchfill::Result<RunSummary> {
    let config = SearchConfig {
        alpha: SearchFactor::Factor(0.5),
        patch_size: PatchSize::new(9)?,
        kernel: KernelKind::Tiled,
        ..SearchConfig::default()
    };
    let mut state = init_state(load_image(image)?, load_mask(mask)?, config)?;
    let total = state.initial_object_pixels();
    run(&mut state, |r| {
        if verbose {
            println!(
                "#{:<3} target ({:>3},{:>3}) P={:.4} <- ({:>3},{:>3}) ssd {:>7}  {:>3}/{} filled",
                r.iteration,
                r.target.pixel.x,
                r.target.pixel.y,
                r.target.priority,
                r.source.x,
                r.source.y,
                r.ssd,
                total - r.remaining_object_pixels,
                total
            );
        }
    })?;
    let summary = state.into_summary();
    save_image(&summary.image, out)?;
    Ok(summary)
}

fn main() -> patchfill::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let args: Vec<PathBuf> = std::env::args_os().skip(1).map(PathBuf::from).collect();
    let (image, mask, out) = match args.as_slice() {
        [i, m, o] => (i.clone(), m.clone(), o.clone()),
        _ => (
            root.join("assets/scene128.png"),
            root.join("assets/scene128_mask.png"),
            root.join("../../target/remove_object.png"),
        ),
    };
    let s = remove_object(&image, &mask, &out, true)?;
    println!(
        "{} iterations, {} ssd element ops, wrote {}",
        s.iterations,
        s.counters.ssd_element_ops,
        out.display()
    );
    Ok(())
}
