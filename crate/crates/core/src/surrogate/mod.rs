//! Fitness functions.
//!
//! Two families live here. The *simplified* functions (`fs_*`) are cheap
//! heuristics used to guide dataset collection. The *simulation* functions
//! (`fsim_*`) are deterministic surrogates for a simulator run: they execute
//! the scenario with a kinematic stand-in of the system under test, record a
//! state-signal trace, and score it by robustness against the requirement.
//!
//! All fitness values are minimized. Invalid scenarios receive
//! [`PENALTY_FITNESS`] and never count as failures.

pub mod planner;
pub mod road;
pub mod uav;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{Phenotype, UseCase};
use crate::geometry::Vec2;

pub use planner::{rrt_star, PlannerParams};
pub use road::{f_s_road, f_sim_road, BicycleParams};
pub use uav::{f_s_uav, f_sim_uav};

/// Fitness assigned to invalid scenarios. Genuine fitness values are <= 0
/// for the road problem and small positive clearances for the UAV problem.
pub const PENALTY_FITNESS: f64 = 10.0;

/// Stand-in for an unbounded clearance (no obstacles at all).
pub const CLEARANCE_SENTINEL: f64 = 1e6;

/// Robustness reported by functions without failure semantics.
pub const NO_REQUIREMENT: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub t: f64,
    pub signal: f64,
}

/// Time series of the requirement's state signal.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trace {
    pub samples: Vec<TraceSample>,
}

impl Trace {
    pub fn min_signal(&self) -> Option<f64> {
        self.samples.iter().map(|s| s.signal).reduce(f64::min)
    }

    /// Minimum signal minus the requirement threshold.
    pub fn robustness(&self, threshold: f64) -> Option<f64> {
        self.min_signal().map(|m| m - threshold)
    }
}

/// Where the trace was worst; used to locate road failures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstPoint {
    pub index: usize,
    pub position: Vec2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessOutcome {
    pub fitness: f64,
    pub robustness: f64,
    pub failed: bool,
    pub valid: bool,
    #[serde(default)]
    pub trace: Trace,
    #[serde(default)]
    pub worst: Option<WorstPoint>,
}

impl FitnessOutcome {
    pub fn invalid() -> Self {
        Self {
            fitness: PENALTY_FITNESS,
            robustness: NO_REQUIREMENT,
            failed: false,
            valid: false,
            trace: Trace::default(),
            worst: None,
        }
    }

    pub(crate) fn heuristic(fitness: f64) -> Self {
        Self {
            fitness,
            robustness: NO_REQUIREMENT,
            failed: false,
            valid: true,
            trace: Trace::default(),
            worst: None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("unknown oracle `{0}` (expected fs_uav, fsim_uav, fs_road or fsim_road)")]
    Unknown(String),
}

/// A named fitness function over decoded scenarios.
///
/// `seed` feeds any internal randomness (the UAV planner); callers derive it
/// from the genome so results do not depend on evaluation order.
pub trait FitnessOracle: Send + Sync {
    fn name(&self) -> &'static str;
    fn use_case(&self) -> UseCase;
    fn evaluate(&self, phenotype: &Phenotype, seed: u64) -> FitnessOutcome;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    FsUav,
    FsimUav,
    FsRoad,
    FsimRoad,
}

impl OracleKind {
    pub fn name(self) -> &'static str {
        match self {
            OracleKind::FsUav => "fs_uav",
            OracleKind::FsimUav => "fsim_uav",
            OracleKind::FsRoad => "fs_road",
            OracleKind::FsimRoad => "fsim_road",
        }
    }

    pub fn use_case(self) -> UseCase {
        match self {
            OracleKind::FsUav | OracleKind::FsimUav => UseCase::Uav,
            OracleKind::FsRoad | OracleKind::FsimRoad => UseCase::Ads,
        }
    }

    pub fn simplified(use_case: UseCase) -> Self {
        match use_case {
            UseCase::Uav => OracleKind::FsUav,
            UseCase::Ads => OracleKind::FsRoad,
        }
    }

    pub fn simulated(use_case: UseCase) -> Self {
        match use_case {
            UseCase::Uav => OracleKind::FsimUav,
            UseCase::Ads => OracleKind::FsimRoad,
        }
    }
}

impl std::str::FromStr for OracleKind {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fs_uav" => Ok(OracleKind::FsUav),
            "fsim_uav" => Ok(OracleKind::FsimUav),
            "fs_road" => Ok(OracleKind::FsRoad),
            "fsim_road" => Ok(OracleKind::FsimRoad),
            other => Err(OracleError::Unknown(other.to_string())),
        }
    }
}

/// The built-in surrogate oracles.
#[derive(Debug, Clone, PartialEq)]
pub struct Surrogate {
    pub kind: OracleKind,
    pub planner: PlannerParams,
    pub vehicle: BicycleParams,
}

impl Surrogate {
    pub fn new(kind: OracleKind) -> Self {
        Self {
            kind,
            planner: PlannerParams::default(),
            vehicle: BicycleParams::default(),
        }
    }

    pub fn with_planner(mut self, planner: PlannerParams) -> Self {
        self.planner = planner;
        self
    }
}

impl FitnessOracle for Surrogate {
    fn name(&self) -> &'static str {
        self.kind.name()
    }

    fn use_case(&self) -> UseCase {
        self.kind.use_case()
    }

    fn evaluate(&self, phenotype: &Phenotype, seed: u64) -> FitnessOutcome {
        let planner = self.planner.with_seed(seed);
        match (self.kind, phenotype) {
            (OracleKind::FsUav, Phenotype::Scene(s)) => f_s_uav(s, &planner),
            (OracleKind::FsimUav, Phenotype::Scene(s)) => f_sim_uav(s, &planner),
            (OracleKind::FsRoad, Phenotype::Road(r)) => f_s_road(r),
            (OracleKind::FsimRoad, Phenotype::Road(r)) => f_sim_road(r, &self.vehicle),
            // A phenotype of the wrong problem can never be a valid test.
            _ => FitnessOutcome::invalid(),
        }
    }
}

/// Look up a built-in oracle by its configured name.
pub fn oracle_by_name(name: &str) -> Result<Surrogate, OracleError> {
    name.parse().map(Surrogate::new)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_round_trip() {
        for name in ["fs_uav", "fsim_uav", "fs_road", "fsim_road"] {
            assert_eq!(oracle_by_name(name).unwrap().name(), name);
        }
        assert!(matches!(oracle_by_name("beamng"), Err(OracleError::Unknown(_))));
    }

    #[test]
    fn mismatched_phenotype_is_invalid() {
        let o = oracle_by_name("fs_road").unwrap();
        let scene = Phenotype::Scene(crate::domain::ObstacleScene::new(vec![]));
        let out = o.evaluate(&scene, 0);
        assert!(!out.valid);
        assert_eq!(out.fitness, PENALTY_FITNESS);
    }

    #[test]
    fn trace_robustness_is_min_minus_threshold() {
        let t = Trace {
            samples: vec![
                TraceSample { t: 0.0, signal: 3.0 },
                TraceSample { t: 1.0, signal: 1.2 },
                TraceSample { t: 2.0, signal: 2.0 },
            ],
        };
        assert!((t.robustness(1.5).unwrap() + 0.3).abs() < 1e-12);
        assert_eq!(Trace::default().robustness(1.5), None);
    }
}
