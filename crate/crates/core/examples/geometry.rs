//! Rectangle overlap, curvature-profile roads and self-intersection.

use std::f64::consts::FRAC_PI_2;

use latentgen::geometry::{kappa_to_polyline, rects_intersect, OrientedRect, Pose, Vec2};

fn main() {
    let a = OrientedRect::new(Vec2::new(0.0, 0.0), 2.0, 1.0, 0.0);
    for angle in [0.0, 0.4, 0.8, 1.2] {
        let b = OrientedRect::new(Vec2::new(3.2, 1.5), 1.5, 0.5, angle);
        println!("rotation {angle:.1} rad: overlap = {}", rects_intersect(&a, &b));
    }

    let start = Pose::new(Vec2::new(100.0, 10.0), FRAC_PI_2);
    let gentle = kappa_to_polyline(&[0.01; 17], 10.0, start);
    let tight = kappa_to_polyline(&[0.07; 17], 10.0, start);
    for (name, road) in [("gentle", &gentle), ("tight", &tight)] {
        let end = road.points.last().unwrap();
        println!(
            "{name} road: {} points, length {:.1} m, ends at ({:.1}, {:.1}), self-intersecting = {}",
            road.len(),
            road.length(),
            end.x,
            end.y,
            road.self_intersects()
        );
    }
}
