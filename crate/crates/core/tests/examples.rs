//! Every example under `examples/` is compiled in here and exercised.

macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }
    };
}

example!(make_assets);
example!(remove_object);
example!(search_geometry);
example!(tiled_vs_naive);
example!(patch_size_sweep);
example!(priority_front);
example!(edit_session);

fn scratch_dir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("patchfill-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn bundled_assets_are_current() {
    let dir = scratch_dir("assets");
    let (image, mask) = make_assets::write_assets(&dir).unwrap();
    let bundled = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("assets");
    assert_eq!(std::fs::read(image).unwrap(), std::fs::read(bundled.join("scene128.png")).unwrap());
    assert_eq!(std::fs::read(mask).unwrap(), std::fs::read(bundled.join("scene128_mask.png")).unwrap());
}

#[test]
fn remove_object_fills_the_bundled_scene() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = scratch_dir("remove").join("out.png");
    let s = remove_object::remove_object(
        &root.join("assets/scene128.png"),
        &root.join("assets/scene128_mask.png"),
        &out,
        false,
    )
    .unwrap();
    assert_eq!(s.initial_object_pixels, 448);
    let written = patchfill::io::load_image(&out).unwrap();
    assert!(written == s.image);
    // The red object is gone.
    assert!(written.pixels().iter().all(|p| *p != patchfill::scene::OBJECT_COLOR));
}

#[test]
fn search_geometry_table() {
    let rows = search_geometry::geometry_table(78, 126);
    assert_eq!(rows[0].extent, (86, 139));
    assert!(rows.windows(2).all(|w| w[1].search_area > w[0].search_area));
}

#[test]
fn tiled_traffic_per_group() {
    let t = tiled_vs_naive::one_group(9).unwrap();
    assert_eq!((t.naive_reads, t.tiled_reads), (10368, 418));
}

#[test]
fn patch_size_sweep_shape() {
    let rows = patch_size_sweep::sweep().unwrap();
    assert_eq!(rows.len(), 15);
    assert!(rows.iter().all(|r| r.kernel == "tiled"));
}

#[test]
fn priority_front_prefers_the_edge() {
    let (records, best) = priority_front::front_priorities().unwrap();
    assert!(records.iter().all(|r| r.priority <= best.priority));
    // The strongest isophote is the vertical edge at x = 11/12.
    assert!((10..=13).contains(&best.pixel.x), "{:?}", best.pixel);
}

#[tokio::test]
async fn edit_session_round_trip() {
    let states = edit_session::edit_session(false).await.unwrap();
    assert_eq!(states, ["done", "done"]);
}
