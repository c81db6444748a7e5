//! Lane-keeping fitness: a kinematic bicycle model steered by pure pursuit.

use serde::{Deserialize, Serialize};

use crate::domain::RoadSpec;
use crate::geometry::{road_validity, smoothed_road, Vec2, LANE_HALF_WIDTH};

use super::{FitnessOutcome, Trace, TraceSample, WorstPoint};

/// A test fails when more than this fraction of the vehicle leaves the lane.
pub const OUT_OF_LANE_LIMIT: f64 = 0.85;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BicycleParams {
    pub wheelbase: f64,
    pub vehicle_width: f64,
    pub lane_half_width: f64,
    pub speed: f64,
    pub lookahead: f64,
    pub dt: f64,
    /// Grip limit on lateral acceleration (m/s^2); caps the followable
    /// curvature at `max_lateral_accel / speed^2`.
    pub max_lateral_accel: f64,
}

impl Default for BicycleParams {
    fn default() -> Self {
        Self {
            wheelbase: 2.5,
            vehicle_width: 2.0,
            lane_half_width: LANE_HALF_WIDTH,
            speed: 12.0,
            lookahead: 8.0,
            dt: 0.05,
            max_lateral_accel: 0.8 * 9.81,
        }
    }
}

impl BicycleParams {
    /// Largest steering angle the grip limit allows at the set speed.
    pub fn max_steer(&self) -> f64 {
        (self.wheelbase * self.max_lateral_accel / (self.speed * self.speed)).atan()
    }

    /// Share of the vehicle width outside the lane for lateral offset `d`.
    pub fn fraction_out(&self, d: f64) -> f64 {
        ((d.abs() + 0.5 * self.vehicle_width - self.lane_half_width) / self.vehicle_width)
            .clamp(0.0, 1.0)
    }
}

/// Simplified fitness: the negated largest absolute curvature.
pub fn f_s_road(r: &RoadSpec) -> FitnessOutcome {
    if !road_validity(r).valid() {
        return FitnessOutcome::invalid();
    }
    let max = r.kappas.iter().fold(0.0_f64, |m, k| m.max(k.abs()));
    FitnessOutcome::heuristic(-max)
}

/// Result of driving one road.
#[derive(Debug, Clone, PartialEq)]
pub struct Drive {
    /// Vehicle centre at every step.
    pub positions: Vec<Vec2>,
    /// Fraction of the vehicle out of the lane at every step.
    pub fraction_out: Vec<f64>,
}

/// Drive the smoothed centreline from the road's start pose.
pub fn simulate(r: &RoadSpec, p: &BicycleParams) -> Drive {
    let line = smoothed_road(r);
    let cum = line.cumulative();
    let total = *cum.last().unwrap_or(&0.0);
    let start = line.points[0];
    let dir0 = line.points[1] - start;
    let mut heading = dir0.y.atan2(dir0.x);
    let mut rear = start;
    let mut segment = 0usize;
    let max_steps = (3.0 * total / (p.speed * p.dt)).ceil() as usize + 10;
    let max_steer = p.max_steer();

    let mut positions = Vec::new();
    let mut fraction_out = Vec::new();
    for _ in 0..max_steps {
        let proj = line.project_range(rear, segment.saturating_sub(2), segment + 12, &cum);
        segment = proj.segment;
        let centre = rear + Vec2::from_angle(heading) * (0.5 * p.wheelbase);
        let at_centre = line.project_range(centre, segment.saturating_sub(2), segment + 12, &cum);
        // The run ends once the vehicle centre reaches the end of the road.
        if at_centre.arc >= total - 1e-6 {
            break;
        }
        positions.push(centre);
        fraction_out.push(p.fraction_out(at_centre.distance));
        let target = line.point_at(proj.arc + p.lookahead, &cum);
        let to = target - rear;
        let dist = to.norm().max(1e-6);
        let alpha = to.y.atan2(to.x) - heading;
        let steer = (2.0 * p.wheelbase * alpha.sin() / dist)
            .atan()
            .clamp(-max_steer, max_steer);

        // Exact arc motion under constant steering over the step.
        let ds = p.speed * p.dt;
        let turn = steer.tan() / p.wheelbase * ds;
        rear = rear + Vec2::from_angle(heading + 0.5 * turn) * (ds * sinc(0.5 * turn));
        heading += turn;
    }
    Drive {
        positions,
        fraction_out,
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Simulated fitness: the negated worst out-of-lane fraction. The trace
/// holds the in-lane fraction, whose requirement threshold is 0.15.
pub fn f_sim_road(r: &RoadSpec, p: &BicycleParams) -> FitnessOutcome {
    if !road_validity(r).valid() {
        return FitnessOutcome::invalid();
    }
    let drive = simulate(r, p);
    let (worst_i, worst) = drive
        .fraction_out
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, f)| if f > best.1 { (i, f) } else { best });
    let samples = drive
        .fraction_out
        .iter()
        .enumerate()
        .map(|(i, f)| TraceSample {
            t: i as f64 * p.dt,
            signal: 1.0 - f,
        })
        .collect();
    let robustness = OUT_OF_LANE_LIMIT - worst;
    FitnessOutcome {
        fitness: -worst,
        robustness,
        failed: robustness < 0.0,
        valid: true,
        trace: Trace { samples },
        worst: Some(WorstPoint {
            index: worst_i,
            position: drive.positions[worst_i],
        }),
    }
}
