use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{EdgeSpec, Kind, ProblemInstance};

/// Inclusive integer range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Range {
    pub lo: u64,
    pub hi: u64,
}

impl Range {
    pub const fn new(lo: u64, hi: u64) -> Self {
        Range { lo, hi }
    }

    fn sample(self, rng: &mut ChaCha8Rng) -> u64 {
        rng.gen_range(self.lo..=self.hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub density: f64,
    pub kind: Kind,
    pub supply: Range,
    pub budget: Range,
    pub profit: Range,
    pub price: Range,
    /// Capacity range for bts instances.
    pub capacity: Range,
    /// Probability that a bts edge receives a finite capacity.
    pub capacity_prob: f64,
    /// Upper limit on the number of edges; extra sampled pairs are dropped.
    pub max_edges: Option<usize>,
}

impl GenSpec {
    pub fn new(seed: u64, n: usize, m: usize, density: f64) -> Self {
        GenSpec {
            seed,
            n,
            m,
            density,
            kind: Kind::Btp,
            supply: Range::new(1, 20),
            budget: Range::new(1, 40),
            profit: Range::new(0, 20),
            price: Range::new(1, 5),
            capacity: Range::new(1, 10),
            capacity_prob: 1.0,
            max_edges: None,
        }
    }

    pub fn bts(mut self) -> Self {
        self.kind = Kind::Bts;
        self
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("density must lie in (0, 1]")]
    BadDensity,
    #[error("n and m must be positive")]
    EmptyDims,
    #[error("invalid range for {0}")]
    BadRange(&'static str),
    #[error("sampling produced no edges")]
    NoEdges,
}

/// Deterministic random instance for a given spec; the output always validates.
pub fn generate(spec: &GenSpec) -> Result<ProblemInstance, GenError> {
    if !(spec.density > 0.0 && spec.density <= 1.0) {
        return Err(GenError::BadDensity);
    }
    if spec.n == 0 || spec.m == 0 {
        return Err(GenError::EmptyDims);
    }
    for (r, what, min) in [
        (spec.supply, "supply", 1),
        (spec.budget, "budget", 1),
        (spec.profit, "profit", 0),
        (spec.price, "price", 1),
        (spec.capacity, "capacity", 1),
    ] {
        if r.lo < min || r.lo > r.hi {
            return Err(GenError::BadRange(what));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let supply = (0..spec.n).map(|_| spec.supply.sample(&mut rng)).collect();
    let budget = (0..spec.m).map(|_| spec.budget.sample(&mut rng)).collect();
    let mut edges = Vec::new();
    for i in 0..spec.n {
        for j in 0..spec.m {
            if spec.density < 1.0 && !rng.gen_bool(spec.density) {
                continue;
            }
            let mut e = EdgeSpec::new(i, j, spec.profit.sample(&mut rng), spec.price.sample(&mut rng));
            if spec.kind == Kind::Bts && rng.gen_bool(spec.capacity_prob.clamp(0.0, 1.0)) {
                e.capacity = Some(spec.capacity.sample(&mut rng));
            }
            edges.push(e);
        }
    }
    if let Some(cap) = spec.max_edges {
        while edges.len() > cap {
            let k = rng.gen_range(0..edges.len());
            edges.remove(k);
        }
    }
    if edges.is_empty() {
        return Err(GenError::NoEdges);
    }
    Ok(ProblemInstance { kind: spec.kind, supply, budget, edges })
}
