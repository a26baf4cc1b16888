// Sweeps search factor x patch size on the bundled scene and prints the
// benchmark CSV followed by ops normalized to P=9.

use std::path::Path;

use patchfill::bench::{run_sweep, write_csv, BenchRow, SweepSpec};
use patchfill::io::{load_image, load_mask};
use patchfill::search::{KernelKind, SearchFactor};

pub fn sweep() -> patchfill::Result<Vec<BenchRow>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let image = load_image(root.join("assets/scene128.png"))?;
    let mask = load_mask(root.join("assets/scene128_mask.png"))?;
    let spec = SweepSpec {
        alphas: vec![
            SearchFactor::Factor(2.0),
            SearchFactor::Factor(1.0),
            SearchFactor::Factor(0.5),
            SearchFactor::Factor(0.2),
            SearchFactor::Factor(0.05),
        ],
        kernels: vec![KernelKind::Tiled],
        ..SweepSpec::default()
    };
    run_sweep(&image, &mask, &spec, |_| {})
}

fn main() -> patchfill::Result<()> {
    let rows = sweep()?;
    write_csv(&rows, std::io::stdout().lock())?;
    println!();
    println!("{:>6} {:>8} {:>8}", "alpha", "P13/P9", "P17/P9");
    for cell in rows.chunks(3) {
        let base = cell[0].ssd_element_ops.max(1) as f64;
        println!(
            "{:>6} {:>8.3} {:>8.3}",
            cell[0].alpha,
            cell[1].ssd_element_ops as f64 / base,
            cell[2].ssd_element_ops as f64 / base
        );
    }
    Ok(())
}
