//! Problem data model: instances, validation, solver configuration and
//! instance-level diagnostics.

mod format;
mod generate;

pub use format::{parse, serialize, InstanceError};
pub(crate) use format::token_lines;
pub use generate::{generate, GenError, GenSpec, Range};

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::numeric::{ceil_log, uint, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    /// Uncapacitated: every `u_ij` is unbounded.
    Btp,
    /// Finite edge capacities allowed.
    Bts,
}

impl Kind {
    pub fn tag(self) -> &'static str {
        match self {
            Kind::Btp => "btp",
            Kind::Bts => "bts",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeSpec {
    /// 0-based source index.
    pub src: usize,
    /// 0-based sink index.
    pub dst: usize,
    pub profit: u64,
    pub price: u64,
    /// `None` means unbounded.
    pub capacity: Option<u64>,
    /// Segment tag for parallel edges produced by piecewise splitting.
    pub segment: Option<u32>,
}

impl EdgeSpec {
    pub fn new(src: usize, dst: usize, profit: u64, price: u64) -> Self {
        EdgeSpec { src, dst, profit, price, capacity: None, segment: None }
    }

    pub fn with_capacity(mut self, u: u64) -> Self {
        self.capacity = Some(u);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProblemInstance {
    pub kind: Kind,
    pub supply: Vec<u64>,
    pub budget: Vec<u64>,
    pub edges: Vec<EdgeSpec>,
}

/// Edge lists per source and per sink, in edge-index order.
#[derive(Debug, Clone)]
pub struct Adjacency {
    pub out: Vec<Vec<usize>>,
    pub inc: Vec<Vec<usize>>,
}

impl ProblemInstance {
    pub fn n(&self) -> usize {
        self.supply.len()
    }

    pub fn m(&self) -> usize {
        self.budget.len()
    }

    pub fn adjacency(&self) -> Adjacency {
        let mut out = vec![Vec::new(); self.n()];
        let mut inc = vec![Vec::new(); self.m()];
        for (e, spec) in self.edges.iter().enumerate() {
            out[spec.src].push(e);
            inc[spec.dst].push(e);
        }
        Adjacency { out, inc }
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }

    /// Profit of a flow vector, `Σ c_ij f_ij`.
    pub fn profit_of(&self, flows: &[Rational]) -> Rational {
        self.edges
            .iter()
            .zip(flows)
            .fold(Rational::zero(), |acc, (e, f)| acc + uint(e.profit) * f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoSources,
    NoSinks,
    NoEdges,
    NonPositiveSupply { source: usize },
    NonPositiveBudget { sink: usize },
    ZeroPrice { edge: usize },
    ZeroCapacity { edge: usize },
    CapacityOnBtp { edge: usize },
    DanglingSource { edge: usize, source: usize },
    DanglingSink { edge: usize, sink: usize },
    DuplicateEdge { edge: usize, first: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoSources => write!(f, "no sources"),
            Violation::NoSinks => write!(f, "no sinks"),
            Violation::NoEdges => write!(f, "no edges"),
            Violation::NonPositiveSupply { source } => {
                write!(f, "non-positive supply at source {}", source + 1)
            }
            Violation::NonPositiveBudget { sink } => {
                write!(f, "non-positive budget at sink {}", sink + 1)
            }
            Violation::ZeroPrice { edge } => write!(f, "zero price on edge {}", edge + 1),
            Violation::ZeroCapacity { edge } => write!(f, "zero capacity on edge {}", edge + 1),
            Violation::CapacityOnBtp { edge } => {
                write!(f, "capacity on edge {} of a btp instance", edge + 1)
            }
            Violation::DanglingSource { edge, source } => {
                write!(f, "dangling source {} on edge {}", source + 1, edge + 1)
            }
            Violation::DanglingSink { edge, sink } => {
                write!(f, "dangling sink {} on edge {}", sink + 1, edge + 1)
            }
            Violation::DuplicateEdge { edge, first } => {
                write!(f, "duplicate edge {} (same pair as edge {})", edge + 1, first + 1)
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let lines: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", lines.join("; "))
    }
}

/// Lists every violated invariant; an empty report means the instance is valid.
pub fn validate(inst: &ProblemInstance) -> ValidationReport {
    let mut violations = Vec::new();
    if inst.n() == 0 {
        violations.push(Violation::NoSources);
    }
    if inst.m() == 0 {
        violations.push(Violation::NoSinks);
    }
    if inst.edges.is_empty() {
        violations.push(Violation::NoEdges);
    }
    for (i, &a) in inst.supply.iter().enumerate() {
        if a == 0 {
            violations.push(Violation::NonPositiveSupply { source: i });
        }
    }
    for (j, &b) in inst.budget.iter().enumerate() {
        if b == 0 {
            violations.push(Violation::NonPositiveBudget { sink: j });
        }
    }
    let mut seen = std::collections::HashMap::new();
    for (e, spec) in inst.edges.iter().enumerate() {
        if spec.price == 0 {
            violations.push(Violation::ZeroPrice { edge: e });
        }
        match (inst.kind, spec.capacity) {
            (Kind::Btp, Some(_)) => violations.push(Violation::CapacityOnBtp { edge: e }),
            (Kind::Bts, Some(0)) => violations.push(Violation::ZeroCapacity { edge: e }),
            _ => {}
        }
        if spec.src >= inst.n() {
            violations.push(Violation::DanglingSource { edge: e, source: spec.src });
        }
        if spec.dst >= inst.m() {
            violations.push(Violation::DanglingSink { edge: e, sink: spec.dst });
        }
        if let Some(first) = seen.insert((spec.src, spec.dst, spec.segment), e) {
            violations.push(Violation::DuplicateEdge { edge: e, first });
        }
    }
    ValidationReport { violations }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    LowestIndex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NumericMode {
    ExactRational,
    /// Floating point with comparison tolerance `eta`.
    Float64 { eta: f64 },
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub epsilon: Rational,
    pub tie_break: TieBreak,
    /// Cap on the number of phases (dual price changes) before aborting.
    pub max_phases: Option<u64>,
    pub numeric_mode: NumericMode,
    /// Record one text line per derived-graph edge-set change.
    pub event_log: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("epsilon must lie strictly between 0 and 1")]
    EpsilonOutOfRange,
    #[error("float tolerance must be positive")]
    NonPositiveEta,
}

impl SolverConfig {
    pub fn new(epsilon: Rational) -> Self {
        SolverConfig {
            epsilon,
            tie_break: TieBreak::LowestIndex,
            max_phases: None,
            numeric_mode: NumericMode::ExactRational,
            event_log: false,
        }
    }

    pub fn check(&self) -> Result<(), ConfigError> {
        if self.epsilon <= Rational::zero() || self.epsilon >= Rational::one() {
            return Err(ConfigError::EpsilonOutOfRange);
        }
        if let NumericMode::Float64 { eta } = self.numeric_mode {
            if !(eta > 0.0) {
                return Err(ConfigError::NonPositiveEta);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceDiagnostics {
    /// `max(c/p) / (ε · min(c/p))` over edges with positive profit.
    pub u: Rational,
    /// `m · ⌈log_{1+ε} U⌉`.
    pub beta_rise_bound: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagnosticsError {
    #[error("U undefined: no edge has positive profit")]
    UUndefined,
    #[error("epsilon must be positive")]
    BadEpsilon,
}

/// Spread parameter and the β-rise bound it implies. `epsilon` may be 1 here
/// (the formula is well defined), although solvers require `epsilon < 1`.
pub fn diagnostics(inst: &ProblemInstance, epsilon: &Rational) -> Result<InstanceDiagnostics, DiagnosticsError> {
    if *epsilon <= Rational::zero() {
        return Err(DiagnosticsError::BadEpsilon);
    }
    let ratios: BTreeSet<Rational> = inst
        .edges
        .iter()
        .filter(|e| e.profit > 0 && e.price > 0)
        .map(|e| Rational::new(e.profit.into(), e.price.into()))
        .collect();
    let (lo, hi) = match (ratios.first(), ratios.last()) {
        (Some(lo), Some(hi)) => (lo.clone(), hi.clone()),
        _ => return Err(DiagnosticsError::UUndefined),
    };
    let u = hi / (epsilon * lo);
    let rises = ceil_log(&(Rational::one() + epsilon), &u);
    Ok(InstanceDiagnostics { u, beta_rise_bound: inst.m() as u64 * rises })
}
