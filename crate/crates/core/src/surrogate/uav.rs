//! UAV obstacle-placement fitness.

use crate::domain::ObstacleScene;
use crate::geometry::{scene_validity, smooth_spline, Polyline, UAV_SAFETY_RADIUS};

use super::planner::{rrt_star, PlannerParams};
use super::{FitnessOutcome, Trace, TraceSample, WorstPoint, CLEARANCE_SENTINEL};

/// Margin the surrogate autopilot plans with (m). Smaller than the safety
/// radius, so a planned path can succeed and still violate the requirement.
pub const PLANNING_MARGIN: f64 = 1.0;
/// Spacing of the walked trajectory samples (m).
pub const WALK_STEP: f64 = 0.25;
/// Cruise speed used to timestamp the trace (m/s).
pub const CRUISE_SPEED: f64 = 5.0;

/// Simplified fitness: the negated ratio of planned path length to the
/// straight-line mission distance. Longer detours score lower (better).
pub fn f_s_uav(scene: &ObstacleScene, params: &PlannerParams) -> FitnessOutcome {
    if !scene_validity(scene).valid() {
        return FitnessOutcome::invalid();
    }
    let params = params.with_inflation(0.0);
    match rrt_star(scene, &params) {
        Some(path) => FitnessOutcome::heuristic(-path.length() / scene.mission.distance()),
        None => FitnessOutcome::invalid(),
    }
}

/// Trajectory the surrogate UAV flies: the margin-inflated plan, densified
/// and smoothed with a centripetal spline.
pub fn flown_trajectory(scene: &ObstacleScene, params: &PlannerParams) -> Option<Polyline> {
    let plan = rrt_star(scene, &params.with_inflation(PLANNING_MARGIN))?;
    let dense = plan.resample(2.0);
    let smooth = if dense.len() >= 4 {
        smooth_spline(&dense, 4).unwrap_or(dense)
    } else {
        dense
    };
    Some(smooth.resample(WALK_STEP))
}

/// Simulated fitness: minimum clearance to any obstacle along the flown
/// trajectory. The requirement is a clearance above 1.5 m.
///
/// If the autopilot finds no route, the mission is not completed and the
/// test counts as a failure with zero clearance.
pub fn f_sim_uav(scene: &ObstacleScene, params: &PlannerParams) -> FitnessOutcome {
    if !scene_validity(scene).valid() {
        return FitnessOutcome::invalid();
    }
    let rects = scene.footprints();
    let Some(path) = flown_trajectory(scene, params) else {
        return FitnessOutcome {
            fitness: 0.0,
            robustness: -UAV_SAFETY_RADIUS,
            failed: true,
            valid: true,
            trace: Trace::default(),
            worst: None,
        };
    };
    let mut samples = Vec::with_capacity(path.len());
    let mut worst = WorstPoint {
        index: 0,
        position: path.points[0],
    };
    let mut min_clear = f64::INFINITY;
    let mut s = 0.0;
    for (i, p) in path.points.iter().enumerate() {
        if i > 0 {
            s += path.points[i - 1].distance(*p);
        }
        let clear = rects
            .iter()
            .map(|r| r.distance_to_point(*p))
            .fold(CLEARANCE_SENTINEL, f64::min);
        if clear < min_clear {
            min_clear = clear;
            worst = WorstPoint {
                index: i,
                position: *p,
            };
        }
        samples.push(TraceSample {
            t: s / CRUISE_SPEED,
            signal: clear,
        });
    }
    let robustness = min_clear - UAV_SAFETY_RADIUS;
    FitnessOutcome {
        fitness: min_clear,
        robustness,
        failed: robustness < 0.0,
        valid: true,
        trace: Trace { samples },
        worst: Some(worst),
    }
}
