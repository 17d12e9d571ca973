//! Primal and dual solver state shared by both auction variants.

use thiserror::Error;

use crate::certify::Duals;
use crate::instance::{ConfigError, ProblemInstance, ValidationReport};
use crate::numeric::{Rational, Scalar};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid instance: {0}")]
    Invalid(ValidationReport),
    #[error("the basic auction handles uncapacitated instances only")]
    Capacitated,
}

pub(crate) fn check_inputs(inst: &ProblemInstance, config: &crate::instance::SolverConfig) -> Result<(), SolveError> {
    config.check()?;
    let report = inst.validate();
    if report.is_ok() {
        Ok(())
    } else {
        Err(SolveError::Invalid(report))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimalState<S> {
    pub flow: Vec<S>,
    /// `a_i − Σ_j f_ij`
    pub surplus: Vec<S>,
    /// `b_j − Σ_i p_ij f_ij`
    pub residual: Vec<S>,
}

impl<S: Scalar> PrimalState<S> {
    pub fn zero(inst: &ProblemInstance) -> Self {
        PrimalState {
            flow: vec![S::zero(); inst.edges.len()],
            surplus: inst.supply.iter().map(|&a| S::from_u64(a)).collect(),
            residual: inst.budget.iter().map(|&b| S::from_u64(b)).collect(),
        }
    }

    /// Recomputes surpluses and residuals from the flows.
    pub fn recomputed(&self, inst: &ProblemInstance) -> (Vec<S>, Vec<S>) {
        let mut s: Vec<S> = inst.supply.iter().map(|&a| S::from_u64(a)).collect();
        let mut d: Vec<S> = inst.budget.iter().map(|&b| S::from_u64(b)).collect();
        for (e, f) in inst.edges.iter().zip(&self.flow) {
            s[e.src] -= f;
            d[e.dst] -= &(S::from_u64(e.price) * f);
        }
        (s, d)
    }

    pub fn flows_rational(&self) -> Vec<Rational> {
        self.flow.iter().map(Scalar::to_rational).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualState<S> {
    pub alpha: Vec<S>,
    pub beta: Vec<S>,
    /// Companion price, `β_j / (1+ε)` after a multiplicative rise and zero before.
    pub beta_prime: Vec<S>,
    /// Price level at which each edge's flow was last assigned.
    pub y: Vec<S>,
}

impl<S: Scalar> DualState<S> {
    pub fn to_duals(&self) -> Duals {
        Duals {
            alpha: self.alpha.iter().map(Scalar::to_rational).collect(),
            beta: self.beta.iter().map(Scalar::to_rational).collect(),
        }
    }
}

/// Exact copy of the state between iterations, handed to monitors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub iteration: u64,
    pub flow: Vec<Rational>,
    pub alpha: Vec<Rational>,
    pub beta: Vec<Rational>,
}

impl Snapshot {
    pub fn capture<S: Scalar>(iteration: u64, primal: &PrimalState<S>, dual: &DualState<S>) -> Self {
        let d = dual.to_duals();
        Snapshot { iteration, flow: primal.flows_rational(), alpha: d.alpha, beta: d.beta }
    }
}

/// Receives a snapshot after every solver iteration.
pub trait Monitor {
    fn observe(&mut self, snap: &Snapshot);
}
