//! Search representations: how genomes are sampled, varied and expressed
//! as original-space scenario genomes.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::operators::{domain_mutation, one_point_crossover, polynomial_mutation, sbx_crossover};
use super::Individual;
use crate::domain::{denormalize, normalize, sample_genome, BoundsTable, Genome, SpaceTag, UseCase, LATENT_BOX};
use crate::neural::VaeModel;
use crate::seed::Rng as SeedRng;

/// Initial self-adaptive crossover index of vector-operator individuals.
pub const INITIAL_ETA_C: f64 = 3.0;

/// Maps latent vectors to original-space genomes and back.
pub trait Decoder: Send + Sync {
    fn latent_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn decode(&self, z: &Genome) -> Genome;
    fn encode(&self, g: &Genome) -> Genome;
}

impl Decoder for VaeModel {
    fn latent_dim(&self) -> usize {
        self.latent_dim
    }

    fn output_dim(&self) -> usize {
        self.input_dim
    }

    fn decode(&self, z: &Genome) -> Genome {
        VaeModel::decode(self, z).expect("latent length checked before search")
    }

    fn encode(&self, g: &Genome) -> Genome {
        VaeModel::encode(self, g).expect("genome length checked before search")
    }
}

/// Test decoder without a network: the latent box is mapped affinely onto
/// the original bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityDecoder {
    pub bounds: BoundsTable,
}

impl Decoder for IdentityDecoder {
    fn latent_dim(&self) -> usize {
        self.bounds.len()
    }

    fn output_dim(&self) -> usize {
        self.bounds.len()
    }

    fn decode(&self, z: &Genome) -> Genome {
        let scaled = Genome::original(z.values.iter().map(|v| v / LATENT_BOX).collect());
        denormalize(&scaled, &self.bounds)
    }

    fn encode(&self, g: &Genome) -> Genome {
        let n = normalize(g, &self.bounds);
        Genome::latent(n.values.iter().map(|v| v * LATENT_BOX).collect())
    }
}

/// Everything the GA needs to know about a search space.
pub trait Representation {
    fn space(&self) -> SpaceTag;
    fn sample(&self, rng: &mut SeedRng) -> Individual;
    fn crossover(&self, a: &Individual, b: &Individual, rng: &mut SeedRng) -> (Individual, Individual);
    fn mutate(&self, ind: &Individual, rng: &mut SeedRng) -> Individual;
    /// The original-space genome a searched genome stands for.
    fn express(&self, g: &Genome) -> Genome;
    /// Vector compared by duplicate removal.
    fn dedup_key(&self, g: &Genome) -> Vec<f64>;
}

/// Original-space search with one-point crossover and domain mutations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DomainOperators {
    pub use_case: UseCase,
}

impl Representation for DomainOperators {
    fn space(&self) -> SpaceTag {
        SpaceTag::Original
    }

    fn sample(&self, rng: &mut SeedRng) -> Individual {
        Individual::new(sample_genome(self.use_case, rng), INITIAL_ETA_C)
    }

    fn crossover(&self, a: &Individual, b: &Individual, rng: &mut SeedRng) -> (Individual, Individual) {
        let (c1, c2) = one_point_crossover(&a.genome, &b.genome, rng);
        (Individual::new(c1, a.eta_c), Individual::new(c2, b.eta_c))
    }

    fn mutate(&self, ind: &Individual, rng: &mut SeedRng) -> Individual {
        Individual::new(domain_mutation(self.use_case, &ind.genome, rng), ind.eta_c)
    }

    fn express(&self, g: &Genome) -> Genome {
        g.clone()
    }

    fn dedup_key(&self, g: &Genome) -> Vec<f64> {
        self.use_case.bounds().unit_scale(&g.values)
    }
}

/// How [`VectorOperators`] draws initial genomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitKind {
    /// Uniform within the bounds.
    Uniform,
    /// The use case's own scenario sampler.
    Domain(UseCase),
    /// N(0, 1) per gene, clamped to the bounds.
    StandardNormal,
}

/// Real-vector search with self-adaptive SBX and polynomial mutation,
/// optionally through a decoder.
pub struct VectorOperators {
    pub bounds: BoundsTable,
    pub init: InitKind,
    pub eta_m: f64,
    pub decoder: Option<Box<dyn Decoder>>,
}

impl VectorOperators {
    /// Standard vector operators over a use case's original bounds.
    pub fn original(use_case: UseCase, eta_m: f64) -> Self {
        Self {
            bounds: use_case.bounds(),
            init: InitKind::Domain(use_case),
            eta_m,
            decoder: None,
        }
    }

    /// Standard vector operators over the latent box of `decoder`.
    pub fn latent(decoder: Box<dyn Decoder>, eta_m: f64) -> Self {
        Self {
            bounds: BoundsTable::latent(decoder.latent_dim()),
            init: InitKind::StandardNormal,
            eta_m,
            decoder: Some(decoder),
        }
    }
}

impl Representation for VectorOperators {
    fn space(&self) -> SpaceTag {
        if self.decoder.is_some() {
            SpaceTag::Latent
        } else {
            SpaceTag::Original
        }
    }

    fn sample(&self, rng: &mut SeedRng) -> Individual {
        let genome = match self.init {
            InitKind::Domain(uc) => sample_genome(uc, rng),
            InitKind::Uniform => Genome {
                values: self
                    .bounds
                    .ranges
                    .iter()
                    .map(|&(lo, hi)| if hi > lo { rng.random_range(lo..=hi) } else { lo })
                    .collect(),
                space: self.space(),
            },
            InitKind::StandardNormal => {
                let mut values: Vec<f64> = (0..self.bounds.len()).map(|_| StandardNormal.sample(rng)).collect();
                self.bounds.clamp(&mut values);
                Genome {
                    values,
                    space: self.space(),
                }
            }
        };
        Individual::new(genome, INITIAL_ETA_C)
    }

    fn crossover(&self, a: &Individual, b: &Individual, rng: &mut SeedRng) -> (Individual, Individual) {
        sbx_crossover(a, b, &self.bounds, rng)
    }

    fn mutate(&self, ind: &Individual, rng: &mut SeedRng) -> Individual {
        Individual::new(polynomial_mutation(&ind.genome, self.eta_m, &self.bounds, rng), ind.eta_c)
    }

    fn express(&self, g: &Genome) -> Genome {
        match &self.decoder {
            Some(d) => d.decode(g),
            None => g.clone(),
        }
    }

    fn dedup_key(&self, g: &Genome) -> Vec<f64> {
        match self.decoder {
            Some(_) => g.values.clone(),
            None => self.bounds.unit_scale(&g.values),
        }
    }
}

/// Latent-space search with the domain operators: parents are decoded,
/// varied as scenarios, and the children encoded back to latent means.
pub struct LatentDomainOperators {
    pub use_case: UseCase,
    pub decoder: Box<dyn Decoder>,
}

impl LatentDomainOperators {
    fn back(&self, g: &Genome, eta_c: f64) -> Individual {
        let mut z = self.decoder.encode(g);
        BoundsTable::latent(z.len()).clamp(&mut z.values);
        Individual::new(z, eta_c)
    }
}

impl Representation for LatentDomainOperators {
    fn space(&self) -> SpaceTag {
        SpaceTag::Latent
    }

    fn sample(&self, rng: &mut SeedRng) -> Individual {
        let mut values: Vec<f64> = (0..self.decoder.latent_dim()).map(|_| StandardNormal.sample(rng)).collect();
        BoundsTable::latent(values.len()).clamp(&mut values);
        Individual::new(Genome::latent(values), INITIAL_ETA_C)
    }

    fn crossover(&self, a: &Individual, b: &Individual, rng: &mut SeedRng) -> (Individual, Individual) {
        let (c1, c2) = one_point_crossover(&self.decoder.decode(&a.genome), &self.decoder.decode(&b.genome), rng);
        (self.back(&c1, a.eta_c), self.back(&c2, b.eta_c))
    }

    fn mutate(&self, ind: &Individual, rng: &mut SeedRng) -> Individual {
        let m = domain_mutation(self.use_case, &self.decoder.decode(&ind.genome), rng);
        self.back(&m, ind.eta_c)
    }

    fn express(&self, g: &Genome) -> Genome {
        self.decoder.decode(g)
    }

    fn dedup_key(&self, g: &Genome) -> Vec<f64> {
        g.values.clone()
    }
}
