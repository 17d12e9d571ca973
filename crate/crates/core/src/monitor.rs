//! Per-iteration invariant checks over solver snapshots and event logs.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_traits::Zero;

use crate::certify::{certify, Duals};
use crate::instance::ProblemInstance;
use crate::numeric::{uint, Rational};
use crate::state::{Monitor, Snapshot};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvariantViolation {
    PrimalInfeasible { iteration: u64, detail: String },
    DualInfeasible { iteration: u64, detail: String },
    BetaDecreased { iteration: u64, sink: usize },
    PricedUnsaturatedSink { iteration: u64, sink: usize },
    /// `c − pβ − α > 0` on an edge below capacity, so γ would be positive there.
    SlackBelowCapacity { iteration: u64, edge: usize },
    TightnessLost { iteration: u64, sink: usize },
    /// `|c − α − pβ − γ| > εc` on a flow-carrying edge.
    FlowSlack { iteration: u64, edge: usize },
}

impl fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvariantViolation::PrimalInfeasible { iteration, detail } => write!(f, "iteration {iteration}: primal infeasible: {detail}"),
            InvariantViolation::DualInfeasible { iteration, detail } => write!(f, "iteration {iteration}: dual infeasible: {detail}"),
            InvariantViolation::BetaDecreased { iteration, sink } => write!(f, "iteration {iteration}: beta of sink {} decreased", sink + 1),
            InvariantViolation::PricedUnsaturatedSink { iteration, sink } => {
                write!(f, "iteration {iteration}: sink {} has budget left and positive beta", sink + 1)
            }
            InvariantViolation::SlackBelowCapacity { iteration, edge } => {
                write!(f, "iteration {iteration}: edge {} has positive slack below capacity", edge + 1)
            }
            InvariantViolation::TightnessLost { iteration, sink } => write!(f, "iteration {iteration}: sink {} lost tightness", sink + 1),
            InvariantViolation::FlowSlack { iteration, edge } => write!(f, "iteration {iteration}: edge {} violates the epsilon slack bound", edge + 1),
        }
    }
}

/// Checks feasibility and the solver invariants on every snapshot, exactly.
pub struct InvariantMonitor<'a> {
    inst: &'a ProblemInstance,
    epsilon: Rational,
    prev_beta: Option<Vec<Rational>>,
    tight: Vec<bool>,
    pub observed: u64,
    pub violations: Vec<InvariantViolation>,
    /// Also check the ε-slack bound on flow-carrying edges.
    pub check_flow_slack: bool,
}

impl<'a> InvariantMonitor<'a> {
    pub fn new(inst: &'a ProblemInstance, epsilon: Rational) -> Self {
        InvariantMonitor {
            inst,
            epsilon,
            prev_beta: None,
            tight: vec![false; inst.m()],
            observed: 0,
            violations: Vec::new(),
            check_flow_slack: true,
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Monitor for InvariantMonitor<'_> {
    fn observe(&mut self, snap: &Snapshot) {
        self.observed += 1;
        let it = snap.iteration;
        let inst = self.inst;
        let duals = Duals { alpha: snap.alpha.clone(), beta: snap.beta.clone() };
        let cert = match certify(inst, &snap.flow, &duals, &self.epsilon) {
            Ok(c) => c,
            Err(e) => {
                self.violations.push(InvariantViolation::PrimalInfeasible { iteration: it, detail: e.to_string() });
                return;
            }
        };
        for v in &cert.primal_violations {
            self.violations.push(InvariantViolation::PrimalInfeasible { iteration: it, detail: v.to_string() });
        }
        for v in &cert.dual_violations {
            self.violations.push(InvariantViolation::DualInfeasible { iteration: it, detail: v.to_string() });
        }

        let mut spent = vec![Rational::zero(); inst.m()];
        for (e, f) in inst.edges.iter().zip(&snap.flow) {
            spent[e.dst] += uint(e.price) * f;
        }
        for j in 0..inst.m() {
            let tight = spent[j] == uint(inst.budget[j]);
            if !tight && !snap.beta[j].is_zero() {
                self.violations.push(InvariantViolation::PricedUnsaturatedSink { iteration: it, sink: j });
            }
            if self.tight[j] && !tight {
                self.violations.push(InvariantViolation::TightnessLost { iteration: it, sink: j });
            }
            self.tight[j] |= tight;
        }
        if let Some(prev) = &self.prev_beta {
            for j in 0..inst.m() {
                if snap.beta[j] < prev[j] {
                    self.violations.push(InvariantViolation::BetaDecreased { iteration: it, sink: j });
                }
            }
        }
        self.prev_beta = Some(snap.beta.clone());

        for (k, e) in inst.edges.iter().enumerate() {
            let slack = uint(e.profit) - uint(e.price) * &snap.beta[e.dst] - &snap.alpha[e.src];
            let saturated = e.capacity.is_some_and(|u| snap.flow[k] >= uint(u));
            if slack > Rational::zero() && !saturated {
                self.violations.push(InvariantViolation::SlackBelowCapacity { iteration: it, edge: k });
            }
            if self.check_flow_slack && snap.flow[k] > Rational::zero() {
                let gamma = if saturated && slack > Rational::zero() { slack.clone() } else { Rational::zero() };
                let reduced = slack - gamma;
                let bound = &self.epsilon * uint(e.profit);
                if reduced.clone() > bound || -reduced > bound {
                    self.violations.push(InvariantViolation::FlowSlack { iteration: it, edge: k });
                }
            }
        }
    }
}

/// Checks that an edge whose flow was zeroed re-enters a back-edge set only
/// after the price of its sink has changed.
///
/// Lines are `zero <edge> <i> <j>`, `back+ <edge> <i> <j>`, `rise <j> <β>`
/// and `activate <j> <β>`, all 1-based; other lines are ignored.
pub fn check_reentry(events: &[String]) -> Result<(), String> {
    let mut zeroed: HashMap<usize, usize> = HashMap::new();
    let mut sinks_with_zeroed: HashMap<usize, HashSet<usize>> = HashMap::new();
    for (n, line) in events.iter().enumerate() {
        let mut it = line.split_whitespace();
        let tag = it.next().unwrap_or("");
        let nums: Vec<usize> = it.filter_map(|t| t.parse().ok()).collect();
        match tag {
            "zero" if nums.len() >= 3 => {
                zeroed.insert(nums[0], nums[2]);
                sinks_with_zeroed.entry(nums[2]).or_default().insert(nums[0]);
            }
            "back+" if nums.len() >= 3 => {
                if zeroed.contains_key(&nums[0]) {
                    return Err(format!("event {}: edge {} re-entered the back set of sink {} without a price change", n + 1, nums[0], nums[2]));
                }
            }
            "rise" | "activate" if !nums.is_empty() => {
                if let Some(edges) = sinks_with_zeroed.remove(&nums[0]) {
                    for e in edges {
                        zeroed.remove(&e);
                    }
                }
            }
            _ => {}
        }
    }
    Ok(())
}
