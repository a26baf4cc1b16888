// Reduced search windows and the analytic cost model.
//
// Prints, for a 78x126 object, the window extent per search factor, the
// candidate and overlap areas and the complexity estimate per patch size.

use patchfill::raster::BBox;
use patchfill::search::{
    compute_search_bounds, estimate_complexity, overlap_area, search_area_size, SearchFactor,
};

pub struct GeometryRow {
    pub alpha: SearchFactor,
    pub extent: (usize, usize),
    pub search_area: f64,
}

pub fn geometry_table(w: usize, h: usize) -> Vec<GeometryRow> {
    // Far from the image edge so nothing is clamped.
    let bbox = BBox {
        min_x: 500,
        min_y: 500,
        max_x: 500 + w - 1,
        max_y: 500 + h - 1,
    };
    [0.05, 0.2, 0.5, 1.0, 2.0]
        .into_iter()
        .map(|a| {
            let alpha = SearchFactor::Factor(a);
            let b = compute_search_bounds(&bbox, alpha, 2000, 2000);
            GeometryRow {
                alpha,
                extent: (b.width(), b.height()),
                search_area: search_area_size(w, h, a),
            }
        })
        .collect()
}

fn main() {
    let (w, h) = (78, 126);
    println!("object {w}x{h}");
    println!("{:>6} {:>9} {:>10}", "alpha", "extent", "SA");
    for row in geometry_table(w, h) {
        println!(
            "{:>6} {:>9} {:>10.0}",
            row.alpha.to_string(),
            format!("{}x{}", row.extent.0, row.extent.1),
            row.search_area
        );
    }
    println!();
    // At small factors the overlap ring outgrows the window and the estimate
    // drops below zero; it only ranks configurations there.
    println!("{:>3} {:>6} {:>14} {:>14}", "P", "OA", "cost a=0.05", "cost a=2");
    for p in [9, 13, 17] {
        println!(
            "{p:>3} {:>6} {:>14.4e} {:>14.4e}",
            overlap_area(w, h, p),
            estimate_complexity(w, h, p, 0.05, 0.5),
            estimate_complexity(w, h, p, 2.0, 0.5)
        );
    }
}
