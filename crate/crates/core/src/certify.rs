//! Independent duality-gap certificate for BTP/BTS solutions.
//!
//! Works from the raw instance, flows and (α, β) only. γ is rebuilt as
//! `max(0, c − pβ − α)` on saturated edges and zero elsewhere.

use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::instance::ProblemInstance;
use crate::numeric::{fmt_fraction, uint, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Duals {
    pub alpha: Vec<Rational>,
    pub beta: Vec<Rational>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertifyError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("certificate is not primal and dual feasible")]
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrimalViolation {
    NegativeFlow { edge: usize },
    OverCapacity { edge: usize, excess: Rational },
    SupplyExceeded { source: usize, excess: Rational },
    BudgetExceeded { sink: usize, excess: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DualViolation {
    NegativeAlpha { source: usize },
    NegativeBeta { sink: usize },
    EdgeConstraint { edge: usize, deficit: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CsViolation {
    /// α_i > 0 while source i keeps surplus.
    Source { source: usize },
    /// β_j > 0 while sink j has budget left.
    Sink { sink: usize },
    /// γ_ij > 0 on an edge below capacity.
    Edge { edge: usize },
    /// Reduced profit on a flow-carrying edge exceeds ε·c_ij.
    Flow { edge: usize },
}

impl fmt::Display for PrimalViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimalViolation::NegativeFlow { edge } => write!(f, "negative flow on edge {}", edge + 1),
            PrimalViolation::OverCapacity { edge, excess } => write!(f, "edge {} over capacity by {}", edge + 1, fmt_fraction(excess)),
            PrimalViolation::SupplyExceeded { source, excess } => write!(f, "source {} over supply by {}", source + 1, fmt_fraction(excess)),
            PrimalViolation::BudgetExceeded { sink, excess } => write!(f, "sink {} over budget by {}", sink + 1, fmt_fraction(excess)),
        }
    }
}

impl fmt::Display for DualViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DualViolation::NegativeAlpha { source } => write!(f, "negative alpha at source {}", source + 1),
            DualViolation::NegativeBeta { sink } => write!(f, "negative beta at sink {}", sink + 1),
            DualViolation::EdgeConstraint { edge, deficit } => write!(f, "dual constraint of edge {} short by {}", edge + 1, fmt_fraction(deficit)),
        }
    }
}

impl fmt::Display for CsViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CsViolation::Source { source } => write!(f, "source {} keeps surplus with positive alpha", source + 1),
            CsViolation::Sink { sink } => write!(f, "sink {} has budget left with positive beta", sink + 1),
            CsViolation::Edge { edge } => write!(f, "edge {} has positive gamma below capacity", edge + 1),
            CsViolation::Flow { edge } => write!(f, "edge {} reduced profit exceeds epsilon bound", edge + 1),
        }
    }
}

impl fmt::Display for GapRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GapRatio::Finite(r) => write!(f, "{}", fmt_fraction(r)),
            GapRatio::Vacuous => write!(f, "vacuous"),
            GapRatio::Undefined => write!(f, "undefined"),
        }
    }
}

/// Worst residual of each complementary-slackness condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsResiduals {
    /// max_i α_i (a_i − Σ_j f_ij)
    pub source: Rational,
    /// max_j β_j (b_j − Σ_i p_ij f_ij)
    pub sink: Rational,
    /// max_ij γ_ij (u_ij − f_ij)
    pub edge: Rational,
    /// max over f_ij > 0 of |c − α − pβ − γ| − ε·c; non-positive when satisfied.
    pub flow_excess: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GapRatio {
    Finite(Rational),
    /// Primal and dual are both zero.
    Vacuous,
    /// Primal is zero but dual is positive.
    Undefined,
}

/// Terms of `dual − primal = Δ2 + Δ3 + Δ4 − Δ1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapDecomposition {
    /// Σ f (c − α − pβ − γ), signed.
    pub d1: Rational,
    /// Σ α (a − Σf)
    pub d2: Rational,
    /// Σ β (b − Σpf)
    pub d3: Rational,
    /// Σ γ (u − f)
    pub d4: Rational,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    /// False for certificates checked with a floating-point tolerance.
    pub rigorous: bool,
    pub epsilon: Rational,
    pub tolerance: Rational,
    pub primal_feasible: bool,
    pub primal_violations: Vec<PrimalViolation>,
    pub dual_feasible: bool,
    pub dual_violations: Vec<DualViolation>,
    pub cs: CsResiduals,
    pub cs_violations: Vec<CsViolation>,
    /// Edges with γ > 0, in edge order.
    pub gamma: Vec<(usize, Rational)>,
    pub primal_value: Rational,
    pub dual_value: Rational,
    pub gap_ratio: GapRatio,
    pub decomposition: GapDecomposition,
    pub passed: bool,
}

/// Exact certificate.
pub fn certify(
    inst: &ProblemInstance,
    flows: &[Rational],
    duals: &Duals,
    epsilon: &Rational,
) -> Result<Certificate, CertifyError> {
    certify_with_tolerance(inst, flows, duals, epsilon, &Rational::zero())
}

/// Certificate with every comparison relaxed by `tol`; non-rigorous when `tol > 0`.
pub fn certify_with_tolerance(
    inst: &ProblemInstance,
    flows: &[Rational],
    duals: &Duals,
    epsilon: &Rational,
    tol: &Rational,
) -> Result<Certificate, CertifyError> {
    let (n, m) = (inst.n(), inst.m());
    if flows.len() != inst.edges.len() {
        return Err(CertifyError::Dimension(format!(
            "{} flows for {} edges",
            flows.len(),
            inst.edges.len()
        )));
    }
    if duals.alpha.len() != n || duals.beta.len() != m {
        return Err(CertifyError::Dimension(format!(
            "duals sized {}x{} for a {}x{} instance",
            duals.alpha.len(),
            duals.beta.len(),
            n,
            m
        )));
    }
    let zero = Rational::zero();
    let le = |a: &Rational, b: &Rational| a - b <= *tol;
    let is_zero = |a: &Rational| a.abs() <= *tol;

    let mut out_flow = vec![zero.clone(); n];
    let mut spend = vec![zero.clone(); m];
    let mut primal_violations = Vec::new();
    for (e, (spec, f)) in inst.edges.iter().zip(flows).enumerate() {
        if !le(&zero, f) {
            primal_violations.push(PrimalViolation::NegativeFlow { edge: e });
        }
        if let Some(u) = spec.capacity {
            let excess = f - uint(u);
            if !le(&excess, &zero) {
                primal_violations.push(PrimalViolation::OverCapacity { edge: e, excess });
            }
        }
        out_flow[spec.src] += f;
        spend[spec.dst] += uint(spec.price) * f;
    }
    let surplus: Vec<Rational> = (0..n).map(|i| uint(inst.supply[i]) - &out_flow[i]).collect();
    let residual: Vec<Rational> = (0..m).map(|j| uint(inst.budget[j]) - &spend[j]).collect();
    for (i, s) in surplus.iter().enumerate() {
        if !le(&zero, s) {
            primal_violations.push(PrimalViolation::SupplyExceeded { source: i, excess: -s });
        }
    }
    for (j, d) in residual.iter().enumerate() {
        if !le(&zero, d) {
            primal_violations.push(PrimalViolation::BudgetExceeded { sink: j, excess: -d });
        }
    }

    let (alpha, beta) = (&duals.alpha, &duals.beta);
    let mut dual_violations = Vec::new();
    for (i, a) in alpha.iter().enumerate() {
        if !le(&zero, a) {
            dual_violations.push(DualViolation::NegativeAlpha { source: i });
        }
    }
    for (j, b) in beta.iter().enumerate() {
        if !le(&zero, b) {
            dual_violations.push(DualViolation::NegativeBeta { sink: j });
        }
    }

    let mut gamma_all = Vec::with_capacity(inst.edges.len());
    let mut gamma = Vec::new();
    for (e, (spec, f)) in inst.edges.iter().zip(flows).enumerate() {
        let slack = uint(spec.profit) - uint(spec.price) * &beta[spec.dst] - &alpha[spec.src];
        let saturated = spec.capacity.is_some_and(|u| is_zero(&(uint(u) - f)));
        let g = if saturated && slack > zero { slack.clone() } else { zero.clone() };
        if !le(&(slack - &g), &zero) {
            dual_violations.push(DualViolation::EdgeConstraint {
                edge: e,
                deficit: uint(spec.profit) - uint(spec.price) * &beta[spec.dst] - &alpha[spec.src] - &g,
            });
        }
        if g > zero {
            gamma.push((e, g.clone()));
        }
        gamma_all.push(g);
    }

    let mut cs_violations = Vec::new();
    let mut cs = CsResiduals { source: zero.clone(), sink: zero.clone(), edge: zero.clone(), flow_excess: zero.clone() };
    let mut d2 = zero.clone();
    for i in 0..n {
        let r = &alpha[i] * &surplus[i];
        if !is_zero(&r) {
            cs_violations.push(CsViolation::Source { source: i });
        }
        if r.abs() > cs.source {
            cs.source = r.abs();
        }
        d2 += r;
    }
    let mut d3 = zero.clone();
    for j in 0..m {
        let r = &beta[j] * &residual[j];
        if !is_zero(&r) {
            cs_violations.push(CsViolation::Sink { sink: j });
        }
        if r.abs() > cs.sink {
            cs.sink = r.abs();
        }
        d3 += r;
    }
    let mut d1 = zero.clone();
    let mut d4 = zero.clone();
    let mut first_flow = true;
    for (e, (spec, f)) in inst.edges.iter().zip(flows).enumerate() {
        let g = &gamma_all[e];
        if let Some(u) = spec.capacity {
            let r = g * (uint(u) - f);
            if !is_zero(&r) {
                cs_violations.push(CsViolation::Edge { edge: e });
            }
            if r.abs() > cs.edge {
                cs.edge = r.abs();
            }
            d4 += r;
        }
        let reduced = uint(spec.profit) - &alpha[spec.src] - uint(spec.price) * &beta[spec.dst] - g;
        d1 += f * &reduced;
        if f > &zero {
            let excess = reduced.abs() - epsilon * uint(spec.profit);
            if !le(&excess, &zero) {
                cs_violations.push(CsViolation::Flow { edge: e });
            }
            if first_flow || excess > cs.flow_excess {
                cs.flow_excess = excess;
                first_flow = false;
            }
        }
    }

    let primal_value = inst.profit_of(flows);
    let mut dual_value = zero.clone();
    for i in 0..n {
        dual_value += &alpha[i] * uint(inst.supply[i]);
    }
    for j in 0..m {
        dual_value += &beta[j] * uint(inst.budget[j]);
    }
    for (spec, g) in inst.edges.iter().zip(&gamma_all) {
        if let Some(u) = spec.capacity {
            dual_value += g * uint(u);
        }
    }
    let gap = &dual_value - &primal_value;
    let holds = gap == &d2 + &d3 + &d4 - &d1;
    let gap_ratio = if primal_value > zero {
        GapRatio::Finite(&gap / &primal_value)
    } else if is_zero(&dual_value) {
        GapRatio::Vacuous
    } else {
        GapRatio::Undefined
    };
    let gap_ok = match &gap_ratio {
        GapRatio::Finite(r) => le(r, epsilon),
        GapRatio::Vacuous => true,
        GapRatio::Undefined => false,
    };
    let primal_feasible = primal_violations.is_empty();
    let dual_feasible = dual_violations.is_empty();
    let passed = primal_feasible && dual_feasible && cs_violations.is_empty() && gap_ok;
    Ok(Certificate {
        rigorous: tol.is_zero(),
        epsilon: epsilon.clone(),
        tolerance: tol.clone(),
        primal_feasible,
        primal_violations,
        dual_feasible,
        dual_violations,
        cs,
        cs_violations,
        gamma,
        primal_value,
        dual_value,
        gap_ratio,
        decomposition: GapDecomposition { d1, d2, d3, d4, holds },
        passed,
    })
}

/// Dual value as a certified upper bound on the optimum.
pub fn weak_duality_bound(cert: &Certificate) -> Result<Rational, CertifyError> {
    if cert.primal_feasible && cert.dual_feasible {
        Ok(cert.dual_value.clone())
    } else {
        Err(CertifyError::Infeasible)
    }
}

/// Lower bound `primal / dual` on the approximation factor, `None` when the dual is zero.
pub fn certified_factor(cert: &Certificate) -> Result<Option<Rational>, CertifyError> {
    let bound = weak_duality_bound(cert)?;
    Ok((!bound.is_zero()).then(|| &cert.primal_value / bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{EdgeSpec, Kind};
    use crate::numeric::{int, ratio};

    fn one_by_one() -> ProblemInstance {
        ProblemInstance { kind: Kind::Btp, supply: vec![5], budget: vec![10], edges: vec![EdgeSpec::new(0, 0, 3, 2)] }
    }

    #[test]
    fn optimal_pair_passes_with_zero_gap() {
        let duals = Duals { alpha: vec![int(3)], beta: vec![int(0)] };
        let c = certify(&one_by_one(), &[int(5)], &duals, &ratio(1, 4)).unwrap();
        assert!(c.passed);
        assert_eq!(c.primal_value, int(15));
        assert_eq!(c.dual_value, int(15));
        assert_eq!(c.gap_ratio, GapRatio::Finite(int(0)));
        assert!(c.decomposition.holds);
        assert_eq!(certified_factor(&c).unwrap(), Some(int(1)));
    }

    #[test]
    fn budget_excess_names_the_sink() {
        let duals = Duals { alpha: vec![int(3)], beta: vec![int(0)] };
        let c = certify(&one_by_one(), &[ratio(11, 2)], &duals, &ratio(1, 4)).unwrap();
        assert!(!c.primal_feasible);
        assert!(c.primal_violations.contains(&PrimalViolation::BudgetExceeded { sink: 0, excess: int(1) }));
        assert!(!c.passed);
    }

    #[test]
    fn initial_state_is_feasible_but_not_certified() {
        let duals = Duals { alpha: vec![int(3)], beta: vec![int(0)] };
        let c = certify(&one_by_one(), &[int(0)], &duals, &ratio(1, 4)).unwrap();
        assert!(c.primal_feasible && c.dual_feasible);
        assert_eq!(c.gap_ratio, GapRatio::Undefined);
        assert!(!c.passed);
        let zero = Duals { alpha: vec![int(0)], beta: vec![int(0)] };
        let inst = ProblemInstance { edges: vec![EdgeSpec::new(0, 0, 0, 2)], ..one_by_one() };
        let c = certify(&inst, &[int(0)], &zero, &ratio(1, 4)).unwrap();
        assert_eq!(c.gap_ratio, GapRatio::Vacuous);
        assert!(c.passed);
    }

    #[test]
    fn gamma_supports_capacity() {
        let inst = ProblemInstance { kind: Kind::Bts, edges: vec![EdgeSpec::new(0, 0, 3, 2).with_capacity(3)], ..one_by_one() };
        let duals = Duals { alpha: vec![int(0)], beta: vec![int(0)] };
        let c = certify(&inst, &[int(3)], &duals, &ratio(1, 4)).unwrap();
        assert!(c.passed, "{c:?}");
        assert_eq!(c.gamma, vec![(0, int(3))]);
        assert_eq!(c.dual_value, int(9));
    }

    #[test]
    fn weak_duality_examples() {
        let inst = ProblemInstance {
            kind: Kind::Btp,
            supply: vec![10, 10],
            budget: vec![10],
            edges: vec![EdgeSpec::new(0, 0, 2, 1), EdgeSpec::new(1, 0, 5, 2)],
        };
        // f = (0, 4) leaves budget; β = 5/2 prices both edges out exactly.
        let duals = Duals { alpha: vec![int(0), int(0)], beta: vec![ratio(5, 2)] };
        let c = certify(&inst, &[int(0), int(5)], &duals, &ratio(1, 10)).unwrap();
        assert_eq!(weak_duality_bound(&c).unwrap(), int(25));
        let c = certify(&inst, &[int(0), int(4)], &duals, &ratio(1, 10)).unwrap();
        assert_eq!(certified_factor(&c).unwrap(), Some(ratio(20, 25)));
        assert!(!c.passed);
    }

    #[test]
    fn dimension_mismatch() {
        let duals = Duals { alpha: vec![int(3)], beta: vec![] };
        assert!(matches!(certify(&one_by_one(), &[int(5)], &duals, &ratio(1, 4)), Err(CertifyError::Dimension(_))));
    }
}
