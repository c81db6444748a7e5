//! Planar geometry kernel: oriented rectangles, polylines, curvature
//! integration, spline smoothing and the scenario validity checks.

use std::collections::VecDeque;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{ObstacleScene, RoadSpec, ValidityReport, Violation, KAPPA_BOUND};

/// Minimum clearance the UAV must keep from every obstacle (m).
pub const UAV_SAFETY_RADIUS: f64 = 1.5;
/// Cell size of the reachability grid (m).
pub const FLOOD_RESOLUTION: f64 = 0.5;
/// Half of the lane width (m).
pub const LANE_HALF_WIDTH: f64 = 2.0;
/// Spline samples per control segment used for road smoothing.
pub const ROAD_SPLINE_SAMPLES: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("spline needs at least 4 control points, got {0}")]
    TooFewControlPoints(usize),
    #[error("samples per segment must be at least 1")]
    ZeroSamples,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    /// Rotate by `theta` radians counter-clockwise.
    pub fn rotate(self, theta: f64) -> Vec2 {
        let (s, c) = theta.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Position plus heading (radians from +x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Vec2,
    pub heading: f64,
}

impl Pose {
    pub const fn new(position: Vec2, heading: f64) -> Self {
        Self { position, heading }
    }
}

/// Rectangle rotated about its centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedRect {
    pub center: Vec2,
    pub half_len: f64,
    pub half_wid: f64,
    /// Radians; the length axis points along this angle.
    pub rotation: f64,
}

impl OrientedRect {
    pub fn new(center: Vec2, half_len: f64, half_wid: f64, rotation: f64) -> Self {
        Self {
            center,
            half_len,
            half_wid,
            rotation,
        }
    }

    /// Unit vectors of the length and width axes.
    pub fn axes(&self) -> [Vec2; 2] {
        let u = Vec2::from_angle(self.rotation);
        [u, Vec2::new(-u.y, u.x)]
    }

    pub fn corners(&self) -> [Vec2; 4] {
        let [u, v] = self.axes();
        let (a, b) = (u * self.half_len, v * self.half_wid);
        let c = self.center;
        [c + a + b, c - a + b, c - a - b, c + a - b]
    }

    pub fn translated(&self, d: Vec2) -> Self {
        Self {
            center: self.center + d,
            ..*self
        }
    }

    /// Coordinates of `p` in the rectangle's own frame.
    fn local(&self, p: Vec2) -> Vec2 {
        (p - self.center).rotate(-self.rotation)
    }

    /// Closed containment.
    pub fn contains(&self, p: Vec2) -> bool {
        let q = self.local(p);
        q.x.abs() <= self.half_len && q.y.abs() <= self.half_wid
    }

    /// Euclidean distance from `p` to the rectangle (0 inside).
    pub fn distance_to_point(&self, p: Vec2) -> f64 {
        let q = self.local(p);
        let dx = (q.x.abs() - self.half_len).max(0.0);
        let dy = (q.y.abs() - self.half_wid).max(0.0);
        dx.hypot(dy)
    }

    /// Distance between segment `a`-`b` and the rectangle (0 when they touch).
    pub fn distance_to_segment(&self, a: Vec2, b: Vec2) -> f64 {
        let (la, lb) = (self.local(a), self.local(b));
        if segment_hits_box(la, lb, self.half_len, self.half_wid) {
            return 0.0;
        }
        let mut best = self.distance_to_point(a).min(self.distance_to_point(b));
        for c in self.corners() {
            best = best.min(point_segment_distance(c, a, b));
        }
        best
    }
}

/// Liang-Barsky clip of a segment against the box `|x| <= hx, |y| <= hy`.
fn segment_hits_box(a: Vec2, b: Vec2, hx: f64, hy: f64) -> bool {
    let d = b - a;
    let (mut t0, mut t1) = (0.0_f64, 1.0_f64);
    for (p, q) in [
        (-d.x, a.x + hx),
        (d.x, hx - a.x),
        (-d.y, a.y + hy),
        (d.y, hy - a.y),
    ] {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// Separating-axis test over the four edge normals; touching counts as overlap.
pub fn rects_intersect(a: &OrientedRect, b: &OrientedRect) -> bool {
    let ca = a.corners();
    let cb = b.corners();
    let [a0, a1] = a.axes();
    let [b0, b1] = b.axes();
    for axis in [a0, a1, b0, b1] {
        let (amin, amax) = project(&ca, axis);
        let (bmin, bmax) = project(&cb, axis);
        if amax < bmin || bmax < amin {
            return false;
        }
    }
    true
}

fn project(corners: &[Vec2; 4], axis: Vec2) -> (f64, f64) {
    corners.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
        let d = c.dot(axis);
        (lo.min(d), hi.max(d))
    })
}

/// Ordered list of points.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Polyline {
    pub points: Vec<Vec2>,
}

/// Closest point on a polyline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub segment: usize,
    pub point: Vec2,
    pub distance: f64,
    /// Arc length from the first point to the projection.
    pub arc: f64,
}

impl Polyline {
    pub fn new(points: Vec<Vec2>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn segments(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| a.distance(b)).sum()
    }

    /// Cumulative arc length at every vertex.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = Vec::with_capacity(self.points.len());
        let mut s = 0.0;
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                s += self.points[i - 1].distance(*p);
            }
            acc.push(s);
        }
        acc
    }

    /// Closest point over segments `from..to` (vertex indices, clamped).
    pub fn project_range(&self, p: Vec2, from: usize, to: usize, cumulative: &[f64]) -> Projection {
        let last = self.points.len().saturating_sub(1);
        let (from, to) = (from.min(last), to.min(last));
        let mut best = Projection {
            segment: from,
            point: self.points[from],
            distance: p.distance(self.points[from]),
            arc: cumulative[from],
        };
        for i in from..to {
            let (a, b) = (self.points[i], self.points[i + 1]);
            let ab = b - a;
            let len2 = ab.dot(ab);
            let t = if len2 > 0.0 {
                ((p - a).dot(ab) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let q = a + ab * t;
            let d = p.distance(q);
            if d < best.distance {
                best = Projection {
                    segment: i,
                    point: q,
                    distance: d,
                    arc: cumulative[i] + t * len2.sqrt(),
                };
            }
        }
        best
    }

    pub fn project(&self, p: Vec2) -> Projection {
        let cum = self.cumulative();
        self.project_range(p, 0, self.points.len(), &cum)
    }

    pub fn distance_to_point(&self, p: Vec2) -> f64 {
        match self.points.len() {
            0 => f64::INFINITY,
            1 => p.distance(self.points[0]),
            _ => self
                .segments()
                .map(|(a, b)| point_segment_distance(p, a, b))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Point at arc length `s` (clamped to the ends).
    pub fn point_at(&self, s: f64, cumulative: &[f64]) -> Vec2 {
        let n = self.points.len();
        if s <= 0.0 || n == 1 {
            return self.points[0];
        }
        if s >= cumulative[n - 1] {
            return self.points[n - 1];
        }
        let i = cumulative.partition_point(|&c| c <= s).saturating_sub(1);
        let seg = cumulative[i + 1] - cumulative[i];
        let t = if seg > 0.0 { (s - cumulative[i]) / seg } else { 0.0 };
        self.points[i] + (self.points[i + 1] - self.points[i]) * t
    }

    /// Points spaced `spacing` apart along the curve, always including both ends.
    pub fn resample(&self, spacing: f64) -> Polyline {
        let cum = self.cumulative();
        let total = *cum.last().unwrap_or(&0.0);
        let steps = (total / spacing).ceil().max(1.0) as usize;
        Polyline::new(
            (0..=steps)
                .map(|k| self.point_at(total * k as f64 / steps as f64, &cum))
                .collect(),
        )
    }

    /// True if any two non-adjacent segments touch or cross.
    pub fn self_intersects(&self) -> bool {
        let segs: Vec<(Vec2, Vec2)> = self.segments().collect();
        for i in 0..segs.len() {
            for j in i + 2..segs.len() {
                if segments_intersect(segs[i].0, segs[i].1, segs[j].0, segs[j].1) {
                    return true;
                }
            }
        }
        false
    }
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Vec2, b: Vec2, p: Vec2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed segment intersection test.
pub fn segments_intersect(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// Integrate a curvature sequence into a polyline.
///
/// Each curvature is held for arc length `ds`, so every step is an exact
/// circular arc: the heading advances by `kappa * ds` and the emitted point is
/// the arc's end. Consecutive points are `ds` apart along the curve, and a
/// constant curvature places every point on the circle of radius `1/kappa`.
pub fn kappa_to_polyline(kappas: &[f64], ds: f64, start: Pose) -> Polyline {
    let mut points = Vec::with_capacity(kappas.len() + 1);
    let mut p = start.position;
    let mut theta = start.heading;
    points.push(p);
    for &k in kappas {
        let half = 0.5 * k * ds;
        // Chord of an arc: length ds * sin(half)/half along the mid-arc heading.
        let sinc = if half.abs() < 1e-8 {
            1.0 - half * half / 6.0
        } else {
            half.sin() / half
        };
        p = p + Vec2::from_angle(theta + half) * (ds * sinc);
        theta += k * ds;
        points.push(p);
    }
    Polyline::new(points)
}

/// Centripetal Catmull-Rom interpolation through every control point.
///
/// Each control segment contributes `samples_per_segment` points (the first
/// of which is the control point itself); the last control point closes the
/// curve. End tangents use mirrored phantom points.
pub fn smooth_spline(p: &Polyline, samples_per_segment: usize) -> Result<Polyline, GeometryError> {
    let n = p.points.len();
    if n < 4 {
        return Err(GeometryError::TooFewControlPoints(n));
    }
    if samples_per_segment == 0 {
        return Err(GeometryError::ZeroSamples);
    }
    let pts = &p.points;
    let ext = |i: isize| -> Vec2 {
        if i < 0 {
            pts[0] * 2.0 - pts[1]
        } else if i as usize >= n {
            pts[n - 1] * 2.0 - pts[n - 2]
        } else {
            pts[i as usize]
        }
    };
    let mut out = Vec::with_capacity((n - 1) * samples_per_segment + 1);
    for i in 0..n - 1 {
        let (p0, p1, p2, p3) = (
            ext(i as isize - 1),
            pts[i],
            pts[i + 1],
            ext(i as isize + 2),
        );
        out.push(p1);
        for k in 1..samples_per_segment {
            out.push(catmull_rom(p0, p1, p2, p3, k as f64 / samples_per_segment as f64));
        }
    }
    out.push(pts[n - 1]);
    Ok(Polyline::new(out))
}

/// Barry-Goldman evaluation of a centripetal segment at fraction `u` of `p1`-`p2`.
fn catmull_rom(p0: Vec2, p1: Vec2, p2: Vec2, p3: Vec2, u: f64) -> Vec2 {
    let knot = |a: Vec2, b: Vec2| a.distance(b).sqrt().max(1e-12);
    let t0 = 0.0;
    let t1 = t0 + knot(p0, p1);
    let t2 = t1 + knot(p1, p2);
    let t3 = t2 + knot(p2, p3);
    let t = t1 + (t2 - t1) * u;
    let lerp = |a: Vec2, b: Vec2, ta: f64, tb: f64| a * ((tb - t) / (tb - ta)) + b * ((t - ta) / (tb - ta));
    let a1 = lerp(p0, p1, t0, t1);
    let a2 = lerp(p1, p2, t1, t2);
    let a3 = lerp(p2, p3, t2, t3);
    let b1 = lerp(a1, a2, t0, t2);
    let b2 = lerp(a2, a3, t1, t3);
    lerp(b1, b2, t1, t2)
}

/// Occupancy grid over the arena; a cell is blocked when its centre lies
/// within `inflation` of any obstacle footprint.
pub fn corridor_reachable(scene: &ObstacleScene, inflation: f64, resolution: f64) -> bool {
    let rects = scene.footprints();
    let (min, max) = (scene.arena.min, scene.arena.max);
    let nx = ((max.x - min.x) / resolution).ceil() as usize;
    let ny = ((max.y - min.y) / resolution).ceil() as usize;
    let cell_of = |p: Vec2| -> (usize, usize) {
        let i = ((p.x - min.x) / resolution).floor().clamp(0.0, (nx - 1) as f64) as usize;
        let j = ((p.y - min.y) / resolution).floor().clamp(0.0, (ny - 1) as f64) as usize;
        (i, j)
    };
    let free = |i: usize, j: usize| -> bool {
        let c = Vec2::new(
            min.x + (i as f64 + 0.5) * resolution,
            min.y + (j as f64 + 0.5) * resolution,
        );
        rects.iter().all(|r| r.distance_to_point(c) > inflation)
    };
    let start = cell_of(scene.mission.start);
    let goal = cell_of(scene.mission.goal);
    if !free(start.0, start.1) || !free(goal.0, goal.1) {
        return false;
    }
    let mut seen = vec![false; nx * ny];
    let mut queue = VecDeque::from([start]);
    seen[start.1 * nx + start.0] = true;
    while let Some((i, j)) = queue.pop_front() {
        if (i, j) == goal {
            return true;
        }
        let mut visit = |a: usize, b: usize| {
            if !seen[b * nx + a] {
                seen[b * nx + a] = true;
                if free(a, b) {
                    queue.push_back((a, b));
                }
            }
        };
        if i > 0 {
            visit(i - 1, j);
        }
        if i + 1 < nx {
            visit(i + 1, j);
        }
        if j > 0 {
            visit(i, j - 1);
        }
        if j + 1 < ny {
            visit(i, j + 1);
        }
    }
    false
}

/// Obstacles must not intersect and must leave a path from start to goal that
/// keeps the safety radius.
pub fn scene_validity(s: &ObstacleScene) -> ValidityReport {
    let mut report = ValidityReport::default();
    let rects = s.footprints();
    for i in 0..rects.len() {
        for j in i + 1..rects.len() {
            if rects_intersect(&rects[i], &rects[j]) {
                report.flag(Violation::ObstacleOverlap);
            }
        }
    }
    if !corridor_reachable(s, UAV_SAFETY_RADIUS, FLOOD_RESOLUTION) {
        report.flag(Violation::PathBlocked);
    }
    report
}

/// Smoothed road centreline used for validity checks and vehicle tracking.
pub fn smoothed_road(r: &RoadSpec) -> Polyline {
    smooth_spline(&r.polyline, ROAD_SPLINE_SAMPLES).unwrap_or_else(|_| r.polyline.clone())
}

/// The road must stay on the map (lane included), respect the curvature
/// bound, and not cross itself.
pub fn road_validity(r: &RoadSpec) -> ValidityReport {
    let mut report = ValidityReport::default();
    let smooth = smoothed_road(r);
    let (lo, hi) = (LANE_HALF_WIDTH, r.map_size - LANE_HALF_WIDTH);
    if smooth
        .points
        .iter()
        .any(|p| !(p.x >= lo && p.x <= hi && p.y >= lo && p.y <= hi))
    {
        report.flag(Violation::OutOfMap);
    }
    if r.kappas.iter().any(|k| !(k.abs() <= KAPPA_BOUND + 1e-12)) {
        report.flag(Violation::TooSharp);
    }
    if smooth.self_intersects() {
        report.flag(Violation::SelfIntersect);
    }
    report
}
