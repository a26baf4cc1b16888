// Regenerates the bundled test scene under `assets/`.
//
// ```text
// cargo run --example make_assets
// ```

use std::path::{Path, PathBuf};

use patchfill::io::{save_image, save_mask};
use patchfill::scene::blob_scene;

pub const SCENE_SIZE: usize = 128;
pub const OBJECT_DIAMETER: usize = 24;

/// Writes `scene128.png` and `scene128_mask.png` into `dir`.
pub fn write_assets(dir: &Path) -> patchfill::Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let (image, mask) = blob_scene(SCENE_SIZE, OBJECT_DIAMETER);
    let image_path = dir.join("scene128.png");
    let mask_path = dir.join("scene128_mask.png");
    save_image(&image, &image_path)?;
    save_mask(&mask, &mask_path)?;
    Ok((image_path, mask_path))
}

fn main() -> patchfill::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("assets");
    let (image, mask) = write_assets(&dir)?;
    println!("wrote {}", image.display());
    println!("wrote {}", mask.display());
    Ok(())
}
