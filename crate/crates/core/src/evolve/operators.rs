//! Selection, crossover, mutation and duplicate removal.

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::Individual;
use crate::domain::{
    obstacle_count, BoundsTable, Genome, UseCase, KAPPA_BOUND, MAX_OBSTACLES, OBSTACLE_GENES,
};
use crate::metrics::cosine_distance_total;

/// Learning rate of the log-normal crossover-index self-adaptation.
pub const ETA_TAU: f64 = 0.15;
/// Range the self-adapted crossover index is kept in.
pub const ETA_RANGE: (f64, f64) = (0.5, 30.0);
/// Most road curvatures a single "change" mutation re-samples.
pub const MAX_CHANGED_KAPPAS: usize = 5;
/// Standard deviation of an obstacle tweak, as a share of each range.
pub const OBSTACLE_TWEAK: f64 = 0.1;

/// Best of `k` distinct uniformly drawn members (minimization; ties go to
/// the lower index). `keys` are the members' selection fitness values.
pub fn tournament_select(keys: &[f64], k: usize, rng: &mut impl Rng) -> usize {
    assert!(!keys.is_empty(), "tournament over an empty population");
    let k = k.clamp(1, keys.len());
    let mut best = usize::MAX;
    for i in sample(rng, keys.len(), k) {
        if best == usize::MAX || keys[i] < keys[best] || (keys[i] == keys[best] && i < best) {
            best = i;
        }
    }
    best
}

/// Exchange suffixes after a cut drawn uniformly from `1..len`.
pub fn one_point_crossover(a: &Genome, b: &Genome, rng: &mut impl Rng) -> (Genome, Genome) {
    assert_eq!(a.len(), b.len());
    assert!(a.len() >= 2, "one-point crossover needs at least two genes");
    let cut = rng.random_range(1..a.len());
    one_point_at(a, b, cut)
}

/// One-point crossover at a fixed cut.
pub fn one_point_at(a: &Genome, b: &Genome, cut: usize) -> (Genome, Genome) {
    let mut c1 = a.values[..cut].to_vec();
    c1.extend_from_slice(&b.values[cut..]);
    let mut c2 = b.values[..cut].to_vec();
    c2.extend_from_slice(&a.values[cut..]);
    (
        Genome { values: c1, space: a.space },
        Genome { values: c2, space: a.space },
    )
}

/// Spread factor of simulated binary crossover for uniform draw `u`.
pub fn sbx_beta(u: f64, eta: f64) -> f64 {
    let e = 1.0 / (eta + 1.0);
    if u <= 0.5 {
        (2.0 * u).powf(e)
    } else {
        (1.0 / (2.0 * (1.0 - u))).powf(e)
    }
}

/// Unclamped SBX of two gene vectors with index `eta`. Each child pair
/// keeps the parents' mean exactly in real arithmetic.
pub fn sbx_genes(x1: &[f64], x2: &[f64], eta: f64, rng: &mut impl Rng) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(x1.len(), x2.len());
    let mut c1 = Vec::with_capacity(x1.len());
    let mut c2 = Vec::with_capacity(x1.len());
    for (a, b) in x1.iter().zip(x2) {
        let beta = sbx_beta(rng.random::<f64>(), eta);
        // Written around the mean so equal parents reproduce exactly.
        let (mean, half) = (0.5 * (a + b), 0.5 * (a - b));
        c1.push(mean + beta * half);
        c2.push(mean - beta * half);
    }
    (c1, c2)
}

/// Self-adaptive SBX: genes cross with the parents' mean index; each child
/// inherits that index times `exp(tau N(0,1))`, kept in [`ETA_RANGE`].
/// Child genes are clamped to `bounds`.
pub fn sbx_crossover(
    a: &Individual,
    b: &Individual,
    bounds: &BoundsTable,
    rng: &mut impl Rng,
) -> (Individual, Individual) {
    let eta = 0.5 * (a.eta_c + b.eta_c);
    let (mut g1, mut g2) = sbx_genes(&a.genome.values, &b.genome.values, eta, rng);
    bounds.clamp(&mut g1);
    bounds.clamp(&mut g2);
    let child = |values: Vec<f64>, rng: &mut dyn rand::RngCore| {
        let n: f64 = StandardNormal.sample(rng);
        Individual::new(
            Genome {
                values,
                space: a.genome.space,
            },
            (eta * (ETA_TAU * n).exp()).clamp(ETA_RANGE.0, ETA_RANGE.1),
        )
    };
    let c1 = child(g1, rng);
    let c2 = child(g2, rng);
    (c1, c2)
}

/// Bounded polynomial mutation of one value with index `eta` and draw `u`.
pub fn polynomial_step(x: f64, lo: f64, hi: f64, eta: f64, u: f64) -> f64 {
    if hi <= lo {
        return lo;
    }
    let span = hi - lo;
    let (d1, d2) = ((x - lo) / span, (hi - x) / span);
    let p = 1.0 / (eta + 1.0);
    let dq = if u < 0.5 {
        let v = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1).powf(eta + 1.0);
        v.powf(p) - 1.0
    } else {
        let v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2).powf(eta + 1.0);
        1.0 - v.powf(p)
    };
    (x + dq * span).clamp(lo, hi)
}

/// Polynomial mutation with per-gene rate `1 / len`.
pub fn polynomial_mutation(g: &Genome, eta_m: f64, bounds: &BoundsTable, rng: &mut impl Rng) -> Genome {
    let rate = 1.0 / g.len().max(1) as f64;
    polynomial_mutation_rate(g, eta_m, bounds, rate, rng)
}

/// Polynomial mutation where each gene mutates with probability `rate`.
pub fn polynomial_mutation_rate(
    g: &Genome,
    eta_m: f64,
    bounds: &BoundsTable,
    rate: f64,
    rng: &mut impl Rng,
) -> Genome {
    let mut out = g.clone();
    for (v, &(lo, hi)) in out.values.iter_mut().zip(&bounds.ranges) {
        if rng.random::<f64>() < rate {
            *v = polynomial_step(*v, lo, hi, eta_m, rng.random());
        }
    }
    out
}

/// Obstacle edits available for a UAV genome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UavEdit {
    Modify,
    Add,
    Remove,
}

/// Road edits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoadEdit {
    Increase,
    Change,
    Reverse,
    Sign,
}

/// Edits allowed for a scene with `n` obstacles.
pub fn feasible_uav_edits(n: usize) -> Vec<UavEdit> {
    let mut v = vec![UavEdit::Modify];
    if n < MAX_OBSTACLES {
        v.push(UavEdit::Add);
    }
    if n > 1 {
        v.push(UavEdit::Remove);
    }
    v
}

/// Apply one UAV edit. The obstacle count gene is rewritten as an integer.
pub fn apply_uav_edit(g: &Genome, edit: UavEdit, rng: &mut impl Rng) -> Genome {
    let bounds = BoundsTable::uav();
    let mut v = g.values.clone();
    bounds.clamp(&mut v);
    let n = obstacle_count(v[0]);
    let block = |i: usize| 1 + i * OBSTACLE_GENES..1 + (i + 1) * OBSTACLE_GENES;
    match edit {
        UavEdit::Modify => {
            let i = rng.random_range(0..n);
            for j in block(i) {
                let (lo, hi) = bounds.ranges[j];
                let noise = Normal::new(0.0, OBSTACLE_TWEAK * (hi - lo)).expect("finite sigma");
                v[j] = (v[j] + noise.sample(rng)).clamp(lo, hi);
            }
            v[0] = n as f64;
        }
        UavEdit::Add => {
            let n = n.min(MAX_OBSTACLES - 1);
            for j in block(n) {
                let (lo, hi) = bounds.ranges[j];
                v[j] = rng.random_range(lo..=hi);
            }
            v[0] = (n + 1) as f64;
        }
        UavEdit::Remove => {
            let i = rng.random_range(0..n);
            // Move the removed block behind the active ones.
            let removed: Vec<f64> = v[block(i)].to_vec();
            for k in i..MAX_OBSTACLES - 1 {
                for j in 0..OBSTACLE_GENES {
                    v[block(k).start + j] = v[block(k + 1).start + j];
                }
            }
            v[block(MAX_OBSTACLES - 1)].copy_from_slice(&removed);
            v[0] = (n.max(2) - 1) as f64;
        }
    }
    Genome {
        values: v,
        space: g.space,
    }
}

/// Pick a feasible obstacle edit uniformly and apply it.
pub fn uav_domain_mutation(g: &Genome, rng: &mut impl Rng) -> Genome {
    let n = obstacle_count(g.values[0]);
    let edits = feasible_uav_edits(n);
    let e = edits[rng.random_range(0..edits.len())];
    apply_uav_edit(g, e, rng)
}

pub fn apply_road_edit(g: &Genome, edit: RoadEdit, rng: &mut impl Rng) -> Genome {
    let mut v = g.values.clone();
    match edit {
        RoadEdit::Increase => {
            let f = rng.random_range(1.10..=1.20);
            for k in &mut v {
                *k = (*k * f).clamp(-KAPPA_BOUND, KAPPA_BOUND);
            }
        }
        RoadEdit::Change => {
            let count = rng.random_range(1..=MAX_CHANGED_KAPPAS.min(v.len()));
            for i in sample(rng, v.len(), count) {
                v[i] = rng.random_range(-KAPPA_BOUND..=KAPPA_BOUND);
            }
        }
        RoadEdit::Reverse => v.reverse(),
        RoadEdit::Sign => v.iter_mut().for_each(|k| *k = -*k),
    }
    Genome {
        values: v,
        space: g.space,
    }
}

/// Pick one of the four road edits uniformly and apply it.
pub fn road_domain_mutation(g: &Genome, rng: &mut impl Rng) -> Genome {
    let edits = [RoadEdit::Increase, RoadEdit::Change, RoadEdit::Reverse, RoadEdit::Sign];
    let e = edits[rng.random_range(0..edits.len())];
    apply_road_edit(g, e, rng)
}

pub fn domain_mutation(use_case: UseCase, g: &Genome, rng: &mut impl Rng) -> Genome {
    match use_case {
        UseCase::Uav => uav_domain_mutation(g, rng),
        UseCase::Ads => road_domain_mutation(g, rng),
    }
}

/// Greedy duplicate sweep: visit members best first (by `keys`, stable on
/// index) and keep one unless it lies within `threshold` cosine distance of
/// a member already kept. Returns the kept indices in visiting order.
pub fn remove_duplicates(vectors: &[Vec<f64>], keys: &[f64], threshold: f64) -> Vec<usize> {
    assert_eq!(vectors.len(), keys.len());
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        if kept
            .iter()
            .all(|&k| cosine_distance_total(&vectors[k], &vectors[i]) >= threshold)
        {
            kept.push(i);
        }
    }
    kept
}
