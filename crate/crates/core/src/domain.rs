//! Scenario genotypes and phenotypes for the two testing problems.
//!
//! A [`Genome`] is a fixed-length real vector. For the UAV problem it holds an
//! obstacle count followed by three 6-value obstacle blocks; for the driving
//! problem it holds 17 road curvatures. Decoding is total: any finite or
//! non-finite vector of the right length decodes to a phenotype, because
//! latent-space decoders emit unconstrained reals.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, Polyline, Pose, Vec2};

/// Length of a UAV obstacle-placement genome: one count gene plus 3 x 6 obstacle genes.
pub const UAV_DIM: usize = 19;
/// Length of a road genome: 17 curvature values.
pub const ROAD_DIM: usize = 17;
/// Genes per obstacle: cx, cy, length, width, height, rotation.
pub const OBSTACLE_GENES: usize = 6;
pub const MAX_OBSTACLES: usize = 3;

/// Global curvature bound for road genomes (1/m).
pub const KAPPA_BOUND: f64 = 0.07;
/// Largest allowed change between consecutive sampled curvatures (1/m).
pub const KAPPA_RELATIVE_BOUND: f64 = 0.05;

/// Box of the latent search space, in prior standard deviations.
pub const LATENT_BOX: f64 = 3.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("genome has {actual} values, expected {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("bounds entry {index} has lo {lo} > hi {hi}")]
    InvertedBounds { index: usize, lo: f64, hi: f64 },
    #[error("unknown use case `{0}`")]
    UnknownUseCase(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UseCase {
    /// Obstacle placement for a UAV on a straight 50 m mission.
    Uav,
    /// Road topology generation for a lane-keeping driving system.
    Ads,
}

impl UseCase {
    pub fn dimension(self) -> usize {
        match self {
            UseCase::Uav => UAV_DIM,
            UseCase::Ads => ROAD_DIM,
        }
    }

    pub fn bounds(self) -> BoundsTable {
        match self {
            UseCase::Uav => BoundsTable::uav(),
            UseCase::Ads => BoundsTable::road(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            UseCase::Uav => "uav",
            UseCase::Ads => "ads",
        }
    }
}

impl std::str::FromStr for UseCase {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "uav" | "uc1" => Ok(UseCase::Uav),
            "ads" | "road" | "uc2" => Ok(UseCase::Ads),
            other => Err(DomainError::UnknownUseCase(other.to_string())),
        }
    }
}

impl std::fmt::Display for UseCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceTag {
    Original,
    Latent,
}

/// A fixed-length real vector; the unit of evolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genome {
    pub values: Vec<f64>,
    pub space: SpaceTag,
}

impl Genome {
    pub fn original(values: Vec<f64>) -> Self {
        Self {
            values,
            space: SpaceTag::Original,
        }
    }

    pub fn latent(values: Vec<f64>) -> Self {
        Self {
            values,
            space: SpaceTag::Latent,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn expect_len(&self, expected: usize) -> Result<(), DomainError> {
        if self.values.len() == expected {
            Ok(())
        } else {
            Err(DomainError::DimensionMismatch {
                expected,
                actual: self.values.len(),
            })
        }
    }
}

/// Per-dimension parameter ranges, plus the optional relative bound that
/// chains consecutive road curvatures during sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsTable {
    pub ranges: Vec<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative: Option<f64>,
}

impl BoundsTable {
    /// Builds a table; zero-width ranges are allowed (they pin a gene).
    pub fn new(ranges: Vec<(f64, f64)>, relative: Option<f64>) -> Result<Self, DomainError> {
        for (index, &(lo, hi)) in ranges.iter().enumerate() {
            if !(lo <= hi) {
                return Err(DomainError::InvertedBounds { index, lo, hi });
            }
        }
        Ok(Self { ranges, relative })
    }

    /// Obstacle-placement ranges: n, then (x, y, l, w, h, r) for each of three obstacles.
    pub fn uav() -> Self {
        let block = [
            (-40.0, 30.0), // x, m
            (10.0, 40.0),  // y, m
            (2.0, 20.0),   // length, m
            (2.0, 20.0),   // width, m
            (15.0, 25.0),  // height, m
            (0.0, 90.0),   // rotation, deg
        ];
        let mut ranges = vec![(1.0, MAX_OBSTACLES as f64)];
        for _ in 0..MAX_OBSTACLES {
            ranges.extend_from_slice(&block);
        }
        Self {
            ranges,
            relative: None,
        }
    }

    /// Road ranges: 17 identical global curvature bounds plus the relative bound.
    pub fn road() -> Self {
        Self {
            ranges: vec![(-KAPPA_BOUND, KAPPA_BOUND); ROAD_DIM],
            relative: Some(KAPPA_RELATIVE_BOUND),
        }
    }

    /// The latent search box, `[-3, 3]` in every dimension.
    pub fn latent(dim: usize) -> Self {
        Self {
            ranges: vec![(-LATENT_BOX, LATENT_BOX); dim],
            relative: None,
        }
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn contains(&self, g: &Genome) -> bool {
        g.values.len() == self.ranges.len()
            && g
                .values
                .iter()
                .zip(&self.ranges)
                .all(|(v, &(lo, hi))| *v >= lo && *v <= hi)
    }

    pub fn clamp(&self, values: &mut [f64]) {
        for (v, &(lo, hi)) in values.iter_mut().zip(&self.ranges) {
            *v = clamp_total(*v, lo, hi);
        }
    }

    /// Min-max normalization onto `[0, 1]`, used for cosine-distance comparisons.
    pub fn unit_scale(&self, values: &[f64]) -> Vec<f64> {
        values
            .iter()
            .zip(&self.ranges)
            .map(|(v, &(lo, hi))| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
            .collect()
    }
}

/// Clamp that maps NaN to the lower bound.
pub(crate) fn clamp_total(v: f64, lo: f64, hi: f64) -> f64 {
    if v.is_nan() {
        lo
    } else {
        v.clamp(lo, hi)
    }
}

/// One box-shaped obstacle, in metres and degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub cx: f64,
    pub cy: f64,
    pub length: f64,
    pub width: f64,
    pub height: f64,
    /// Degrees, counter-clockwise from the +x axis.
    pub rotation: f64,
}

impl Obstacle {
    pub fn from_genes(genes: &[f64]) -> Self {
        Self {
            cx: genes[0],
            cy: genes[1],
            length: genes[2],
            width: genes[3],
            height: genes[4],
            rotation: genes[5],
        }
    }

    pub fn genes(&self) -> [f64; OBSTACLE_GENES] {
        [
            self.cx,
            self.cy,
            self.length,
            self.width,
            self.height,
            self.rotation,
        ]
    }

    /// Planar footprint; height does not enter 2D planning.
    pub fn footprint(&self) -> geometry::OrientedRect {
        geometry::OrientedRect::new(
            Vec2::new(self.cx, self.cy),
            self.length / 2.0,
            self.width / 2.0,
            self.rotation.to_radians(),
        )
    }
}

/// Axis-aligned region the UAV may fly in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arena {
    pub min: Vec2,
    pub max: Vec2,
}

impl Arena {
    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

impl Default for Arena {
    fn default() -> Self {
        Self {
            min: Vec2::new(-45.0, 0.0),
            max: Vec2::new(35.0, 55.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mission {
    pub start: Vec2,
    pub goal: Vec2,
}

impl Default for Mission {
    /// Straight 50 m flight along +y.
    fn default() -> Self {
        Self {
            start: Vec2::new(0.0, 0.0),
            goal: Vec2::new(0.0, 50.0),
        }
    }
}

impl Mission {
    pub fn distance(&self) -> f64 {
        self.start.distance(self.goal)
    }
}

/// Decoded UAV scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstacleScene {
    pub obstacles: Vec<Obstacle>,
    pub arena: Arena,
    pub mission: Mission,
}

impl ObstacleScene {
    pub fn new(obstacles: Vec<Obstacle>) -> Self {
        Self {
            obstacles,
            arena: Arena::default(),
            mission: Mission::default(),
        }
    }

    pub fn footprints(&self) -> Vec<geometry::OrientedRect> {
        self.obstacles.iter().map(Obstacle::footprint).collect()
    }
}

/// Where and how a road polyline is laid out on the map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoadFrame {
    pub map_size: f64,
    pub start: Pose,
    /// Arc length per curvature value (m).
    pub step: f64,
}

impl Default for RoadFrame {
    /// 200 m square map, start at (100, 10) heading +y, 10 m per curvature.
    fn default() -> Self {
        Self {
            map_size: 200.0,
            start: Pose::new(Vec2::new(100.0, 10.0), std::f64::consts::FRAC_PI_2),
            step: 10.0,
        }
    }
}

/// Decoded road scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadSpec {
    pub kappas: Vec<f64>,
    pub polyline: Polyline,
    pub map_size: f64,
}

/// Reasons a decoded scenario violates the constraint set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Violation {
    ObstacleOverlap,
    PathBlocked,
    OutOfMap,
    TooSharp,
    SelfIntersect,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn flag(&mut self, v: Violation) {
        if !self.violations.contains(&v) {
            self.violations.push(v);
        }
    }
}

/// Either decoded phenotype.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Phenotype {
    Scene(ObstacleScene),
    Road(RoadSpec),
}

impl Phenotype {
    /// Decode an original-space genome for `use_case`.
    pub fn decode(use_case: UseCase, g: &Genome) -> Result<Self, DomainError> {
        match use_case {
            UseCase::Uav => genome_to_scene(g).map(Phenotype::Scene),
            UseCase::Ads => genome_to_road(g, &RoadFrame::default()).map(Phenotype::Road),
        }
    }

    pub fn validity(&self) -> ValidityReport {
        match self {
            Phenotype::Scene(s) => geometry::scene_validity(s),
            Phenotype::Road(r) => geometry::road_validity(r),
        }
    }
}

fn uniform(rng: &mut impl rand::Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.random_range(lo..=hi)
    } else {
        lo
    }
}

/// Sample a UAV genome: an integer obstacle count and uniform obstacle genes.
pub fn sample_uav_genome(rng: &mut impl rand::Rng, bounds: &BoundsTable) -> Genome {
    let mut values = Vec::with_capacity(bounds.len());
    for (i, &(lo, hi)) in bounds.ranges.iter().enumerate() {
        if i == 0 {
            let (lo, hi) = (lo.round() as i64, hi.round() as i64);
            let n = if hi > lo { rng.random_range(lo..=hi) } else { lo };
            values.push(n as f64);
        } else {
            values.push(uniform(rng, lo, hi));
        }
    }
    Genome::original(values)
}

/// Sample a road genome as a curvature chain: each value is uniform within the
/// relative bound of its predecessor, intersected with the global bound.
pub fn sample_kappa_genome(rng: &mut impl rand::Rng, bounds: &BoundsTable) -> Genome {
    let rb = bounds.relative.unwrap_or(f64::INFINITY);
    let mut values = Vec::with_capacity(bounds.len());
    let mut prev: Option<f64> = None;
    for &(lo, hi) in &bounds.ranges {
        let k = match prev {
            None => uniform(rng, lo, hi),
            Some(p) => {
                let (a, b) = chain_interval(p, rb, lo, hi);
                uniform(rng, a, b)
            }
        };
        values.push(k);
        prev = Some(k);
    }
    Genome::original(values)
}

/// `[prev - rb, prev + rb]` intersected with `[lo, hi]`. Falls back to the
/// nearest global endpoint when the intersection is empty.
pub fn chain_interval(prev: f64, rb: f64, lo: f64, hi: f64) -> (f64, f64) {
    let a = (prev - rb).max(lo);
    let b = (prev + rb).min(hi);
    if a <= b {
        (a, b)
    } else {
        let p = prev.clamp(lo, hi);
        (p, p)
    }
}

/// Sample an original-space genome for either use case.
pub fn sample_genome(use_case: UseCase, rng: &mut impl rand::Rng) -> Genome {
    match use_case {
        UseCase::Uav => sample_uav_genome(rng, &BoundsTable::uav()),
        UseCase::Ads => sample_kappa_genome(rng, &BoundsTable::road()),
    }
}

/// Obstacle count encoded by the first gene: round half up, clamped to `[1, 3]`.
pub fn obstacle_count(first_gene: f64) -> usize {
    if first_gene.is_nan() {
        return 1;
    }
    ((first_gene + 0.5).floor()).clamp(1.0, MAX_OBSTACLES as f64) as usize
}

/// Decode a UAV genome. Obstacle genes are clamped into their ranges; blocks
/// beyond the encoded count are ignored.
pub fn genome_to_scene(g: &Genome) -> Result<ObstacleScene, DomainError> {
    g.expect_len(UAV_DIM)?;
    let bounds = BoundsTable::uav();
    let mut values = g.values.clone();
    bounds.clamp(&mut values);
    let n = obstacle_count(g.values[0]);
    let obstacles = values[1..]
        .chunks_exact(OBSTACLE_GENES)
        .take(n)
        .map(Obstacle::from_genes)
        .collect();
    Ok(ObstacleScene::new(obstacles))
}

/// Decode a road genome. Curvatures are kept as-is so that over-sharp roads
/// are reported by validity checking rather than silently repaired.
pub fn genome_to_road(g: &Genome, frame: &RoadFrame) -> Result<RoadSpec, DomainError> {
    g.expect_len(ROAD_DIM)?;
    let kappas = g.values.clone();
    let polyline = geometry::kappa_to_polyline(&kappas, frame.step, frame.start);
    Ok(RoadSpec {
        kappas,
        polyline,
        map_size: frame.map_size,
    })
}

/// Affine map of each dimension onto `[-1, 1]`.
pub fn normalize(g: &Genome, bounds: &BoundsTable) -> Genome {
    let values = g
        .values
        .iter()
        .zip(&bounds.ranges)
        .map(|(v, &(lo, hi))| {
            if hi > lo {
                2.0 * (v - lo) / (hi - lo) - 1.0
            } else {
                0.0
            }
        })
        .collect();
    Genome {
        values,
        space: g.space,
    }
}

/// Inverse of [`normalize`]; inputs outside `[-1, 1]` are clamped first.
pub fn denormalize(g: &Genome, bounds: &BoundsTable) -> Genome {
    let values = g
        .values
        .iter()
        .zip(&bounds.ranges)
        .map(|(v, &(lo, hi))| {
            let u = clamp_total(*v, -1.0, 1.0);
            lo + (u + 1.0) * 0.5 * (hi - lo)
        })
        .collect();
    Genome::original(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    #[test]
    fn uav_table_matches_reference_ranges() {
        let b = BoundsTable::uav();
        assert_eq!(b.len(), 19);
        assert_eq!(b.ranges[0], (1.0, 3.0));
        assert_eq!(b.ranges[1], (-40.0, 30.0));
        assert_eq!(b.ranges[2], (10.0, 40.0));
        assert_eq!(b.ranges[3], (2.0, 20.0));
        assert_eq!(b.ranges[4], (2.0, 20.0));
        assert_eq!(b.ranges[5], (15.0, 25.0));
        assert_eq!(b.ranges[6], (0.0, 90.0));
        assert_eq!(b.ranges[7..13], b.ranges[13..19]);
        let r = BoundsTable::road();
        assert_eq!(r.len(), 17);
        assert!(r.ranges.iter().all(|&x| x == (-0.07, 0.07)));
        assert_eq!(r.relative, Some(0.05));
    }

    #[test]
    fn inverted_bounds_rejected() {
        let err = BoundsTable::new(vec![(0.0, 1.0), (2.0, 1.0)], None).unwrap_err();
        assert_eq!(
            err,
            DomainError::InvertedBounds {
                index: 1,
                lo: 2.0,
                hi: 1.0
            }
        );
    }

    #[test]
    fn uav_sample_fixed_seed() {
        let mut rng = seed::rng(42);
        let g = sample_uav_genome(&mut rng, &BoundsTable::uav());
        assert_eq!(g.len(), 19);
        assert_eq!(g.space, SpaceTag::Original);
        assert!([1.0, 2.0, 3.0].contains(&g.values[0]));
        assert!((-40.0..=30.0).contains(&g.values[1]));
    }

    #[test]
    fn degenerate_bounds_pin_every_gene() {
        let ranges: Vec<_> = (0..19).map(|i| (i as f64, i as f64)).collect();
        let b = BoundsTable::new(ranges, None).unwrap();
        let g = sample_uav_genome(&mut seed::rng(1), &b);
        let lo: Vec<f64> = (0..19).map(|i| i as f64).collect();
        assert_eq!(g.values, lo);
    }

    #[test]
    fn uav_sampling_moments() {
        let b = BoundsTable::uav();
        let mut rng = seed::rng(7);
        let n = 10_000;
        let samples: Vec<Genome> = (0..n).map(|_| sample_uav_genome(&mut rng, &b)).collect();
        assert!(samples.iter().all(|g| b.contains(g)));
        for d in 1..19 {
            let (lo, hi) = b.ranges[d];
            let mean = samples.iter().map(|g| g.values[d]).sum::<f64>() / n as f64;
            // Uniform variance (hi-lo)^2/12; standard error of the mean.
            let se = (hi - lo) / 12f64.sqrt() / (n as f64).sqrt();
            let mid = 0.5 * (lo + hi);
            assert!((mean - mid).abs() < 3.0 * se, "dim {d}: {mean} vs {mid}");
        }
        for k in [1.0, 2.0, 3.0] {
            let c = samples.iter().filter(|g| g.values[0] == k).count();
            assert!((c as f64 / n as f64 - 1.0 / 3.0).abs() < 0.03);
        }
    }

    #[test]
    fn kappa_chain_respects_both_bounds() {
        let b = BoundsTable::road();
        let mut rng = seed::rng(3);
        for _ in 0..10_000 {
            let g = sample_kappa_genome(&mut rng, &b);
            assert!(b.contains(&g));
            for w in g.values.windows(2) {
                assert!((w[1] - w[0]).abs() <= 0.05 + 1e-12);
            }
        }
    }

    #[test]
    fn zero_relative_bound_gives_constant_chain() {
        let b = BoundsTable::new(vec![(-0.07, 0.07); 17], Some(0.0)).unwrap();
        let g = sample_kappa_genome(&mut seed::rng(11), &b);
        assert!(g.values.iter().all(|&k| k == g.values[0]));
    }

    #[test]
    fn chain_interval_at_upper_bound() {
        let (a, b) = chain_interval(0.07, 0.05, -0.07, 0.07);
        assert!((a - 0.02).abs() < 1e-15);
        assert_eq!(b, 0.07);
    }

    #[test]
    fn obstacle_count_rounding() {
        assert_eq!(obstacle_count(1.2), 1);
        assert_eq!(obstacle_count(1.5), 2);
        assert_eq!(obstacle_count(2.49), 2);
        assert_eq!(obstacle_count(3.0), 3);
        assert_eq!(obstacle_count(3.7), 3);
        assert_eq!(obstacle_count(-5.0), 1);
        assert_eq!(obstacle_count(f64::NAN), 1);
    }

    #[test]
    fn scene_decoding() {
        let mut values = vec![1.2];
        for i in 0..3 {
            values.extend_from_slice(&[i as f64, 20.0, 5.0, 6.0, 18.0, 30.0]);
        }
        let s = genome_to_scene(&Genome::original(values.clone())).unwrap();
        assert_eq!(s.obstacles.len(), 1);

        values[0] = 3.0;
        let s = genome_to_scene(&Genome::original(values.clone())).unwrap();
        assert_eq!(s.obstacles.len(), 3);
        for (i, o) in s.obstacles.iter().enumerate() {
            assert_eq!(o.genes().to_vec(), values[1 + 6 * i..7 + 6 * i].to_vec());
        }

        values[0] = 3.7;
        assert_eq!(
            genome_to_scene(&Genome::original(values)).unwrap().obstacles.len(),
            3
        );
        assert_eq!(s.mission.start, Vec2::new(0.0, 0.0));
        assert_eq!(s.mission.goal, Vec2::new(0.0, 50.0));
    }

    #[test]
    fn scene_decoding_wrong_length() {
        let err = genome_to_scene(&Genome::original(vec![1.0; 17])).unwrap_err();
        assert_eq!(
            err,
            DomainError::DimensionMismatch {
                expected: 19,
                actual: 17
            }
        );
        assert!(err.to_string().contains("expected 19"));
        assert!(genome_to_road(&Genome::original(vec![0.0; 19]), &RoadFrame::default()).is_err());
    }

    #[test]
    fn zero_kappas_give_straight_road() {
        let r = genome_to_road(&Genome::original(vec![0.0; 17]), &RoadFrame::default()).unwrap();
        assert_eq!(r.polyline.points.len(), 18);
        for (i, p) in r.polyline.points.iter().enumerate() {
            assert!((p.x - 100.0).abs() < 1e-9);
            assert!((p.y - (10.0 + 10.0 * i as f64)).abs() < 1e-9);
        }
    }

    #[test]
    fn normalization_endpoints_and_midpoint() {
        let b = BoundsTable::uav();
        let lo = Genome::original(b.ranges.iter().map(|r| r.0).collect());
        let hi = Genome::original(b.ranges.iter().map(|r| r.1).collect());
        let mid = Genome::original(b.ranges.iter().map(|r| 0.5 * (r.0 + r.1)).collect());
        assert!(normalize(&lo, &b).values.iter().all(|&v| v == -1.0));
        assert!(normalize(&hi, &b).values.iter().all(|&v| v == 1.0));
        assert!(normalize(&mid, &b).values.iter().all(|&v| v.abs() < 1e-15));
    }

    #[test]
    fn denormalize_clamps_overshoot() {
        let b = BoundsTable::road();
        let g = denormalize(&Genome::latent(vec![1.4; 17]), &b);
        assert!(g.values.iter().all(|&v| v == 0.07));
        assert_eq!(g.space, SpaceTag::Original);
    }

    #[test]
    fn normalization_round_trip() {
        let mut rng = seed::rng(5);
        for uc in [UseCase::Uav, UseCase::Ads] {
            let b = uc.bounds();
            for _ in 0..1000 {
                let g = sample_genome(uc, &mut rng);
                let back = denormalize(&normalize(&g, &b), &b);
                for (x, y) in g.values.iter().zip(&back.values) {
                    assert!((x - y).abs() < 1e-9);
                }
            }
        }
    }
}
