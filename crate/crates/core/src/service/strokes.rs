//! Brush strokes to object masks.

use serde::Deserialize;

use crate::raster::{PixelState, RegionMask};

/// A polyline painted with a round brush. Points are `[x, y]` pixel
/// coordinates and may lie outside the image.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct Stroke {
    pub points: Vec<[i64; 2]>,
    pub radius: u32,
}

fn stamp(state: &mut [PixelState], width: usize, height: usize, cx: i64, cy: i64, radius: i64) {
    let r2 = radius * radius;
    for dy in -radius..=radius {
        for dx in -radius..=radius {
            if dx * dx + dy * dy > r2 {
                continue;
            }
            let (x, y) = (cx + dx, cy + dy);
            if x >= 0 && y >= 0 && (x as usize) < width && (y as usize) < height {
                state[y as usize * width + x as usize] = PixelState::Object;
            }
        }
    }
}

/// Inclusive discs (`dx² + dy² ≤ r²`) stamped at every point and at every
/// unit step of the line between consecutive points.
pub fn rasterize_strokes(width: usize, height: usize, strokes: &[Stroke]) -> RegionMask {
    let mut state = vec![PixelState::Source; width * height];
    for stroke in strokes {
        let r = i64::from(stroke.radius);
        let Some(&[x0, y0]) = stroke.points.first() else {
            continue;
        };
        stamp(&mut state, width, height, x0, y0, r);
        for pair in stroke.points.windows(2) {
            let ([ax, ay], [bx, by]) = (pair[0], pair[1]);
            let steps = (bx - ax).abs().max((by - ay).abs());
            for i in 1..=steps {
                let t = i as f64 / steps as f64;
                let x = (ax as f64 + t * (bx - ax) as f64).round() as i64;
                let y = (ay as f64 + t * (by - ay) as f64).round() as i64;
                stamp(&mut state, width, height, x, y, r);
            }
        }
    }
    RegionMask::from_states(width, height, state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Point;

    fn lattice_disc(r: i64) -> usize {
        (-r..=r)
            .flat_map(|dy| (-r..=r).map(move |dx| (dx, dy)))
            .filter(|(dx, dy)| dx * dx + dy * dy <= r * r)
            .count()
    }

    #[test]
    fn dot_is_a_disc() {
        let m = rasterize_strokes(40, 40, &[Stroke { points: vec![[20, 20]], radius: 5 }]);
        assert_eq!(lattice_disc(5), 81);
        assert_eq!(m.object_count(), 81);
        let b = m.object_bbox().unwrap();
        assert_eq!((b.min_x, b.max_x, b.min_y, b.max_y), (15, 25, 15, 25));
    }

    #[test]
    fn drag_is_connected_and_clipped() {
        let m = rasterize_strokes(30, 10, &[Stroke { points: vec![[-3, 5], [40, 5]], radius: 0 }]);
        assert_eq!(m.object_count(), 30);
        assert!((0..30).all(|x| m.is_object(Point::new(x, 5))));

        let diag = rasterize_strokes(20, 20, &[Stroke { points: vec![[2, 2], [12, 7]], radius: 1 }]);
        // Every interpolated center is covered.
        for i in 0..=10 {
            let y = (2.0 + i as f64 * 0.5).round() as usize;
            assert!(diag.is_object(Point::new(2 + i, y)));
        }
    }

    #[test]
    fn empty_stroke_list() {
        let m = rasterize_strokes(5, 5, &[Stroke { points: vec![], radius: 3 }]);
        assert_eq!(m.object_count(), 0);
    }
}
