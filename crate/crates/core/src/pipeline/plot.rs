//! Deterministic SVG rendering of scenarios, latent traversals and failure
//! distributions. Coordinates are printed with fixed precision so equal
//! inputs give byte-identical files.

use std::fmt::Write;

use crate::domain::{Genome, ObstacleScene, Phenotype, RoadSpec, UseCase, LATENT_BOX};
use crate::geometry::{smoothed_road, Polyline, Vec2, LANE_HALF_WIDTH};
use crate::neural::VaeModel;
use crate::surrogate::road::Drive;

/// Panels of a latent traversal: -3, -2, ..., 3 standard deviations.
pub const TRAVERSAL_STEPS: usize = 7;
/// Side of one panel in pixels.
pub const PANEL_PX: f64 = 240.0;

/// Maps a world rectangle onto a square panel, y pointing up.
#[derive(Debug, Clone, Copy)]
struct Frame {
    min: Vec2,
    scale: f64,
    height: f64,
    offset_x: f64,
}

impl Frame {
    fn fit(min: Vec2, max: Vec2, px: f64, offset_x: f64) -> Self {
        let span = (max.x - min.x).max(max.y - min.y).max(1e-9);
        Self {
            min,
            scale: px / span,
            height: px,
            offset_x,
        }
    }

    fn map(&self, p: Vec2) -> (f64, f64) {
        (
            self.offset_x + (p.x - self.min.x) * self.scale,
            self.height - (p.y - self.min.y) * self.scale,
        )
    }

    fn points(&self, pts: &[Vec2]) -> String {
        pts.iter()
            .map(|&p| {
                let (x, y) = self.map(p);
                format!("{x:.2},{y:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn document(width: f64, height: f64, body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}

fn scene_body(scene: &ObstacleScene, path: Option<&Polyline>, f: &Frame) -> String {
    let mut s = String::new();
    let a = &scene.arena;
    let corners = [a.min, Vec2::new(a.max.x, a.min.y), a.max, Vec2::new(a.min.x, a.max.y)];
    let _ = writeln!(s, "<polygon class=\"arena\" points=\"{}\" fill=\"none\" stroke=\"#999\"/>", f.points(&corners));
    for o in &scene.obstacles {
        let _ = writeln!(
            s,
            "<polygon class=\"obstacle\" points=\"{}\" fill=\"#c44\" fill-opacity=\"0.7\"/>",
            f.points(&o.footprint().corners())
        );
    }
    if let Some(p) = path {
        let _ = writeln!(
            s,
            "<polyline class=\"path\" points=\"{}\" fill=\"none\" stroke=\"#24a\" stroke-width=\"1.5\"/>",
            f.points(&p.points)
        );
    }
    for (class, p) in [("start", scene.mission.start), ("goal", scene.mission.goal)] {
        let (x, y) = f.map(p);
        let _ = writeln!(s, "<circle class=\"{class}\" cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"#2a2\"/>");
    }
    s
}

/// Left and right lane boundaries of a centreline.
pub fn lane_boundaries(line: &Polyline, half_width: f64) -> (Vec<Vec2>, Vec<Vec2>) {
    let p = &line.points;
    let n = p.len();
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for i in 0..n {
        let d = p[(i + 1).min(n - 1)] - p[i.saturating_sub(1)];
        let len = d.norm();
        let normal = if len > 0.0 { Vec2::new(-d.y / len, d.x / len) } else { Vec2::new(0.0, 0.0) };
        left.push(p[i] + normal * half_width);
        right.push(p[i] - normal * half_width);
    }
    (left, right)
}

fn road_extent(road: &RoadSpec) -> (Vec2, Vec2) {
    let line = smoothed_road(road);
    let margin = 2.0 * LANE_HALF_WIDTH;
    let (mut min, mut max) = (Vec2::new(f64::INFINITY, f64::INFINITY), Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in &line.points {
        min = Vec2::new(min.x.min(p.x), min.y.min(p.y));
        max = Vec2::new(max.x.max(p.x), max.y.max(p.y));
    }
    if line.points.is_empty() {
        return (Vec2::new(0.0, 0.0), Vec2::new(road.map_size, road.map_size));
    }
    (min - Vec2::new(margin, margin), max + Vec2::new(margin, margin))
}

fn road_body(road: &RoadSpec, drive: Option<&Drive>, f: &Frame) -> String {
    let mut s = String::new();
    let line = smoothed_road(road);
    let (left, right) = lane_boundaries(&line, LANE_HALF_WIDTH);
    let mut outline = left.clone();
    outline.extend(right.iter().rev());
    let _ = writeln!(s, "<polygon class=\"lane\" points=\"{}\" fill=\"#ddd\"/>", f.points(&outline));
    for (class, pts) in [("boundary", &left), ("boundary", &right)] {
        let _ = writeln!(s, "<polyline class=\"{class}\" points=\"{}\" fill=\"none\" stroke=\"#333\"/>", f.points(pts));
    }
    let _ = writeln!(
        s,
        "<polyline class=\"centre\" points=\"{}\" fill=\"none\" stroke=\"#fa0\" stroke-dasharray=\"4 3\"/>",
        f.points(&line.points)
    );
    if let Some(d) = drive {
        let _ = writeln!(
            s,
            "<polyline class=\"trace\" points=\"{}\" fill=\"none\" stroke=\"#24a\" stroke-width=\"1.5\"/>",
            f.points(&d.positions)
        );
    }
    s
}

/// An obstacle scene with an optional flown path.
pub fn scene_svg(scene: &ObstacleScene, path: Option<&Polyline>) -> String {
    let f = Frame::fit(scene.arena.min, scene.arena.max, PANEL_PX, 0.0);
    document(PANEL_PX, PANEL_PX, &scene_body(scene, path, &f))
}

/// A road with its lane and an optional vehicle trace.
pub fn road_svg(road: &RoadSpec, drive: Option<&Drive>) -> String {
    let (min, max) = road_extent(road);
    let f = Frame::fit(min, max, PANEL_PX, 0.0);
    document(PANEL_PX, PANEL_PX, &road_body(road, drive, &f))
}

fn phenotype_body(p: &Phenotype, offset_x: f64) -> String {
    match p {
        Phenotype::Scene(s) => scene_body(s, None, &Frame::fit(s.arena.min, s.arena.max, PANEL_PX, offset_x)),
        Phenotype::Road(r) => {
            let (min, max) = road_extent(r);
            road_body(r, None, &Frame::fit(min, max, PANEL_PX, offset_x))
        }
    }
}

/// Latent codes of a traversal: `base` with dimension `dim` swept over
/// `-3..=3` in [`TRAVERSAL_STEPS`] steps.
pub fn traversal_codes(base: &Genome, dim: usize) -> Vec<Genome> {
    (0..TRAVERSAL_STEPS)
        .map(|i| {
            let mut z = base.clone();
            z.values[dim] = -LATENT_BOX + 2.0 * LATENT_BOX * i as f64 / (TRAVERSAL_STEPS - 1) as f64;
            z
        })
        .collect()
}

/// Decoded scenarios of a traversal, side by side, one `<g class="panel">`
/// per step.
pub fn traversal_svg(model: &VaeModel, use_case: UseCase, base: &Genome, dim: usize) -> Result<String, String> {
    if dim >= model.latent_dim || base.len() != model.latent_dim {
        return Err(format!("latent dimension {dim} or base length {} does not fit a {}-d model", base.len(), model.latent_dim));
    }
    let mut body = String::new();
    for (i, z) in traversal_codes(base, dim).iter().enumerate() {
        let g = model.decode(z).map_err(|e| e.to_string())?;
        let p = Phenotype::decode(use_case, &g).map_err(|e| e.to_string())?;
        let x = i as f64 * PANEL_PX;
        let _ = writeln!(body, "<g class=\"panel\" data-z=\"{:.2}\">", z.values[dim]);
        body.push_str(&phenotype_body(&p, x));
        let _ = writeln!(body, "<text x=\"{:.1}\" y=\"14\" font-size=\"12\">z{dim} = {:+.1}</text>", x + 4.0, z.values[dim]);
        body.push_str("</g>\n");
    }
    Ok(document(PANEL_PX * TRAVERSAL_STEPS as f64, PANEL_PX, &body))
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// One box (quartiles, median, min-max whiskers) per non-empty group.
pub fn boxplot_svg(groups: &[(String, Vec<f64>)]) -> String {
    let groups: Vec<&(String, Vec<f64>)> = groups.iter().filter(|g| !g.1.is_empty()).collect();
    let (w, h, pad) = (120.0 * groups.len().max(1) as f64 + 60.0, 300.0, 30.0);
    let top = groups
        .iter()
        .flat_map(|g| g.1.iter().copied())
        .fold(1.0_f64, f64::max);
    let y = |v: f64| h - pad - (v / top) * (h - 2.0 * pad);
    let mut s = String::new();
    let _ = writeln!(s, "<line x1=\"40\" y1=\"{0:.2}\" x2=\"{1:.2}\" y2=\"{0:.2}\" stroke=\"#333\"/>", y(0.0), w - 10.0);
    let _ = writeln!(s, "<text x=\"4\" y=\"{:.2}\" font-size=\"11\">{top}</text>", y(top) + 4.0);
    for (i, (name, v)) in groups.iter().enumerate() {
        let mut v = v.clone();
        v.sort_by(f64::total_cmp);
        let cx = 60.0 + 120.0 * i as f64 + 40.0;
        let (q1, q2, q3) = (quantile(&v, 0.25), quantile(&v, 0.5), quantile(&v, 0.75));
        let _ = writeln!(s, "<g class=\"box\">");
        let _ = writeln!(
            s,
            "<line x1=\"{cx:.2}\" y1=\"{:.2}\" x2=\"{cx:.2}\" y2=\"{:.2}\" stroke=\"#333\"/>",
            y(v[0]),
            y(v[v.len() - 1])
        );
        let _ = writeln!(
            s,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"50\" height=\"{:.2}\" fill=\"#9bd\" stroke=\"#333\"/>",
            cx - 25.0,
            y(q3),
            y(q1) - y(q3)
        );
        let _ = writeln!(s, "<line x1=\"{:.2}\" y1=\"{2:.2}\" x2=\"{:.2}\" y2=\"{2:.2}\" stroke=\"#000\" stroke-width=\"2\"/>", cx - 25.0, cx + 25.0, y(q2));
        let _ = writeln!(s, "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">{name}</text>", cx, h - 8.0);
        s.push_str("</g>\n");
    }
    document(w, h, &s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{sample_genome, BoundsTable};
    use crate::neural::Architecture;
    use crate::seed;

    #[test]
    fn scene_has_one_polygon_per_obstacle() {
        let mut rng = seed::rng(1);
        let g = sample_genome(UseCase::Uav, &mut rng);
        let Phenotype::Scene(s) = Phenotype::decode(UseCase::Uav, &g).unwrap() else { unreachable!() };
        let svg = scene_svg(&s, None);
        assert_eq!(svg.matches("class=\"obstacle\"").count(), s.obstacles.len());
        assert_eq!(svg, scene_svg(&s, None));
    }

    #[test]
    fn traversal_has_seven_panels() {
        let m = VaeModel::new(Architecture::Vae1, 17, 4, BoundsTable::road(), &mut seed::rng(2)).unwrap();
        let svg = traversal_svg(&m, UseCase::Ads, &Genome::latent(vec![0.0; 4]), 2).unwrap();
        assert_eq!(svg.matches("class=\"panel\"").count(), TRAVERSAL_STEPS);
        assert!(traversal_svg(&m, UseCase::Ads, &Genome::latent(vec![0.0; 4]), 4).is_err());
    }

    #[test]
    fn traversal_codes_span_the_box() {
        let codes = traversal_codes(&Genome::latent(vec![0.5, 0.5]), 1);
        let swept: Vec<f64> = codes.iter().map(|z| z.values[1]).collect();
        assert_eq!(swept, vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        assert!(codes.iter().all(|z| z.values[0] == 0.5));
    }

    #[test]
    fn boxplot_draws_each_group() {
        let svg = boxplot_svg(&[("a".into(), vec![1.0, 2.0, 3.0]), ("b".into(), vec![4.0])]);
        assert_eq!(svg.matches("class=\"box\"").count(), 2);
    }
}
