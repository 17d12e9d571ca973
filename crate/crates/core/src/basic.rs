//! Reference auction for uncapacitated instances.
//!
//! Sources bid for their most profitable sink; saturated sinks displace flow
//! assigned at the companion price and raise β by a factor of `1 + ε` once no
//! such flow is left. Used as a differential baseline for `bts`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::instance::{Adjacency, Kind, ProblemInstance, SolverConfig};
use crate::numeric::{max_s, min_s, uint, Rational};
use crate::state::{check_inputs, DualState, Monitor, PrimalState, Snapshot, SolveError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    /// Flow pushed into a sink with budget left.
    Pushed { sink: usize, amount: Rational, saturated: bool },
    /// Flow of `displaced` at the companion price replaced by the stepping source.
    Replaced { sink: usize, displaced: usize, amount: Rational },
    /// The stepping source was itself the lowest-level bidder and re-bid at β.
    Promoted { sink: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaChange {
    None,
    /// β went from zero to `ε · min c/p`.
    Activated,
    /// β multiplied by `1 + ε`.
    Raised,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stop {
    Done,
    MaxPhases,
    Stalled,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BasicStats {
    pub steps: u64,
    pub pushes: u64,
    pub replacements: u64,
    pub promotions: u64,
    pub beta_activations: u64,
    pub beta_rises: u64,
    pub deactivations: u64,
}

impl BasicStats {
    pub fn to_map(&self) -> BTreeMap<&'static str, u64> {
        BTreeMap::from([
            ("steps", self.steps),
            ("pushes", self.pushes),
            ("replacements", self.replacements),
            ("promotions", self.promotions),
            ("beta_activations", self.beta_activations),
            ("beta_rises", self.beta_rises),
            ("deactivations", self.deactivations),
        ])
    }
}

pub struct BasicAuction<'a> {
    inst: &'a ProblemInstance,
    adj: Adjacency,
    eps: Rational,
    pub primal: PrimalState<Rational>,
    pub dual: DualState<Rational>,
    pub stats: BasicStats,
}

#[derive(Debug, Clone)]
pub struct BasicRun {
    pub primal: PrimalState<Rational>,
    pub dual: DualState<Rational>,
    pub stats: BasicStats,
    pub terminated: bool,
    /// Stopped because prices stopped changing while steps kept shrinking.
    pub stalled: bool,
}

impl<'a> BasicAuction<'a> {
    /// Zero flow and prices, `α_i = max_j c_ij`.
    pub fn initialize(inst: &'a ProblemInstance, config: &SolverConfig) -> Result<Self, SolveError> {
        check_inputs(inst, config)?;
        if inst.kind == Kind::Bts {
            return Err(SolveError::Capacitated);
        }
        let adj = inst.adjacency();
        let alpha = adj
            .out
            .iter()
            .map(|es| es.iter().map(|&e| uint(inst.edges[e].profit)).max().unwrap_or_else(Rational::zero))
            .collect();
        let dual = DualState {
            alpha,
            beta: vec![Rational::zero(); inst.m()],
            beta_prime: vec![Rational::zero(); inst.m()],
            y: vec![Rational::zero(); inst.edges.len()],
        };
        Ok(BasicAuction { inst, adj, eps: config.epsilon.clone(), primal: PrimalState::zero(inst), dual, stats: BasicStats::default() })
    }

    fn key(&self, e: usize) -> Rational {
        let spec = &self.inst.edges[e];
        uint(spec.profit) - uint(spec.price) * &self.dual.beta[spec.dst]
    }

    /// Edge of `i` maximizing `c − pβ`, lowest sink index on ties.
    fn best_edge(&self, i: usize) -> Option<usize> {
        let mut best: Option<(Rational, usize, usize)> = None;
        for &e in &self.adj.out[i] {
            let k = self.key(e);
            let j = self.inst.edges[e].dst;
            let better = match &best {
                None => true,
                Some((bk, bj, _)) => k > *bk || (k == *bk && j < *bj),
            };
            if better {
                best = Some((k, j, e));
            }
        }
        best.map(|(_, _, e)| e)
    }

    /// `max(0, max_j c_ij − p_ij β_j)`.
    pub fn current_alpha(&self, i: usize) -> Rational {
        self.best_edge(i).map_or_else(Rational::zero, |e| max_s(self.key(e), Rational::zero()))
    }

    /// Must be called only when sink `j` is saturated.
    pub fn update_beta(&mut self, j: usize) -> BetaChange {
        if self.dual.beta[j].is_zero() {
            let floor = self.adj.inc[j]
                .iter()
                .map(|&e| &self.inst.edges[e])
                .filter(|s| s.profit > 0)
                .map(|s| Rational::new(s.profit.into(), s.price.into()))
                .min();
            let Some(floor) = floor else { return BetaChange::None };
            self.dual.beta[j] = &self.eps * floor;
            self.stats.beta_activations += 1;
            return BetaChange::Activated;
        }
        let all_current = self.adj.inc[j]
            .iter()
            .all(|&e| self.primal.flow[e].is_zero() || self.dual.y[e] == self.dual.beta[j]);
        if !all_current {
            return BetaChange::None;
        }
        self.dual.beta_prime[j] = self.dual.beta[j].clone();
        self.dual.beta[j] = &self.dual.beta[j] * (Rational::one() + &self.eps);
        self.stats.beta_rises += 1;
        BetaChange::Raised
    }

    /// One bid of source `i`; requires `α_i > 0` and `s_i > 0`.
    pub fn auction_step(&mut self, i: usize) -> StepOutcome {
        self.stats.steps += 1;
        let e = self.best_edge(i).expect("active source has an edge");
        let spec = self.inst.edges[e].clone();
        let j = spec.dst;
        let p = uint(spec.price);
        let outcome = if self.primal.residual[j].is_zero() {
            let lowest = self.adj.inc[j]
                .iter()
                .copied()
                .filter(|&g| !self.primal.flow[g].is_zero() && self.dual.y[g] == self.dual.beta_prime[j])
                .min_by_key(|&g| self.inst.edges[g].src);
            let outcome = match lowest {
                Some(g) if self.inst.edges[g].src != i => {
                    let pg = uint(self.inst.edges[g].price);
                    let x = min_s(self.primal.surplus[i].clone(), &self.primal.flow[g] * &pg / &p);
                    let back = &x * &p / &pg;
                    self.primal.flow[e] += &x;
                    self.primal.surplus[i] -= &x;
                    self.primal.flow[g] -= &back;
                    self.primal.surplus[self.inst.edges[g].src] += &back;
                    self.dual.y[e] = self.dual.beta[j].clone();
                    self.stats.replacements += 1;
                    StepOutcome::Replaced { sink: j, displaced: self.inst.edges[g].src, amount: x }
                }
                _ => {
                    self.dual.y[e] = self.dual.beta[j].clone();
                    self.stats.promotions += 1;
                    StepOutcome::Promoted { sink: j }
                }
            };
            self.update_beta(j);
            outcome
        } else {
            let x = min_s(self.primal.surplus[i].clone(), &self.primal.residual[j] / &p);
            self.primal.flow[e] += &x;
            self.primal.surplus[i] -= &x;
            self.primal.residual[j] -= &x * &p;
            self.dual.y[e] = self.dual.beta[j].clone();
            self.stats.pushes += 1;
            let saturated = self.primal.residual[j].is_zero();
            if saturated {
                self.update_beta(j);
            }
            StepOutcome::Pushed { sink: j, amount: x, saturated }
        };
        self.refresh_alpha(i);
        outcome
    }

    /// Recomputes `α_i`; a source priced out demotes its flow to the companion level.
    fn refresh_alpha(&mut self, i: usize) {
        self.dual.alpha[i] = self.current_alpha(i);
        if self.dual.alpha[i].is_zero() {
            for &e in &self.adj.out[i] {
                self.dual.y[e] = self.dual.beta_prime[self.inst.edges[e].dst].clone();
            }
        }
    }

    fn is_active(&self, i: usize) -> bool {
        !self.dual.alpha[i].is_zero() && !self.primal.surplus[i].is_zero()
    }

    /// Round-robin over active sources until none is left.
    ///
    /// Two sources can displace each other around a cycle of decreasing gain
    /// forever without any price change; such runs end with `Stop::Stalled`.
    pub fn run_to_end(&mut self, max_phases: Option<u64>, mut monitor: Option<&mut dyn Monitor>) -> Stop {
        let n = self.inst.n();
        let stall_limit = 64 * (n + self.inst.m() + self.inst.edges.len()) as u64 + 1000;
        let mut last_phase = 0u64;
        let mut quiet = 0u64;
        let mut cursor = 0usize;
        let mut idle = 0usize;
        while idle < n {
            let i = cursor;
            cursor = (cursor + 1) % n;
            if !self.is_active(i) {
                idle += 1;
                continue;
            }
            let fresh = self.current_alpha(i);
            if fresh != self.dual.alpha[i] {
                self.refresh_alpha(i);
                if fresh.is_zero() {
                    self.stats.deactivations += 1;
                    idle += 1;
                    continue;
                }
            }
            idle = 0;
            self.auction_step(i);
            if let Some(mon) = monitor.as_deref_mut() {
                mon.observe(&Snapshot::capture(self.stats.steps, &self.primal, &self.dual));
            }
            let phases = self.stats.beta_rises + self.stats.beta_activations;
            if max_phases.is_some_and(|cap| phases > cap) {
                return Stop::MaxPhases;
            }
            if phases != last_phase {
                last_phase = phases;
                quiet = 0;
            } else {
                quiet += 1;
                if quiet > stall_limit {
                    return Stop::Stalled;
                }
            }
        }
        Stop::Done
    }
}

/// Runs the reference auction to completion.
pub fn run(inst: &ProblemInstance, config: &SolverConfig) -> Result<BasicRun, SolveError> {
    run_monitored(inst, config, None)
}

pub fn run_monitored(
    inst: &ProblemInstance,
    config: &SolverConfig,
    monitor: Option<&mut dyn Monitor>,
) -> Result<BasicRun, SolveError> {
    let mut auction = BasicAuction::initialize(inst, config)?;
    let stop = auction.run_to_end(config.max_phases, monitor);
    Ok(BasicRun { primal: auction.primal, dual: auction.dual, stats: auction.stats, terminated: stop == Stop::Done, stalled: stop == Stop::Stalled })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::certify;
    use crate::instance::EdgeSpec;
    use crate::numeric::{int, ratio};

    fn inst(supply: Vec<u64>, budget: Vec<u64>, edges: Vec<EdgeSpec>) -> ProblemInstance {
        ProblemInstance { kind: Kind::Btp, supply, budget, edges }
    }

    fn cfg(eps: Rational) -> SolverConfig {
        SolverConfig::new(eps)
    }

    #[test]
    fn initialize_prices() {
        let i = inst(vec![5, 5], vec![10, 10], vec![
            EdgeSpec::new(0, 0, 2, 1),
            EdgeSpec::new(0, 1, 7, 1),
            EdgeSpec::new(1, 0, 0, 1),
        ]);
        let a = BasicAuction::initialize(&i, &cfg(ratio(1, 4))).unwrap();
        assert_eq!(a.dual.alpha, vec![int(7), int(0)]);
        assert!(a.dual.beta.iter().all(Zero::is_zero));
        assert!(a.primal.flow.iter().all(Zero::is_zero));
    }

    #[test]
    fn update_beta_examples() {
        let i = inst(vec![5, 5], vec![1], vec![EdgeSpec::new(0, 0, 10, 2), EdgeSpec::new(1, 0, 6, 3)]);
        let mut a = BasicAuction::initialize(&i, &cfg(ratio(1, 10))).unwrap();
        assert_eq!(a.update_beta(0), BetaChange::Activated);
        assert_eq!(a.dual.beta[0], ratio(1, 5));
        assert_eq!(a.update_beta(0), BetaChange::Raised);
        assert_eq!(a.dual.beta_prime[0], ratio(1, 5));
        assert_eq!(a.dual.beta[0], ratio(11, 50));
        a.primal.flow[0] = int(1);
        a.dual.y[0] = ratio(1, 5);
        assert_eq!(a.update_beta(0), BetaChange::None);
        assert_eq!(a.dual.beta[0], ratio(11, 50));
    }

    #[test]
    fn single_push() {
        let i = inst(vec![5], vec![10], vec![EdgeSpec::new(0, 0, 3, 2)]);
        let mut a = BasicAuction::initialize(&i, &cfg(ratio(1, 4))).unwrap();
        let out = a.auction_step(0);
        assert_eq!(out, StepOutcome::Pushed { sink: 0, amount: int(5), saturated: true });
        assert!(a.primal.surplus[0].is_zero());
    }

    #[test]
    fn replacement_trace() {
        // Source 0 holds 4 units at the companion level; source 1 bids with 1 unit.
        let i = inst(vec![4, 1], vec![4], vec![EdgeSpec::new(0, 0, 1, 1), EdgeSpec::new(1, 0, 10, 2)]);
        let mut a = BasicAuction::initialize(&i, &cfg(ratio(1, 4))).unwrap();
        a.primal.flow[0] = int(4);
        a.primal.surplus[0] = int(0);
        a.primal.residual[0] = int(0);
        a.dual.beta[0] = ratio(5, 4);
        a.dual.beta_prime[0] = int(1);
        a.dual.y[0] = int(1);
        let out = a.auction_step(1);
        assert_eq!(out, StepOutcome::Replaced { sink: 0, displaced: 0, amount: int(1) });
        assert_eq!(a.primal.flow, vec![int(2), int(1)]);
        assert_eq!(a.primal.surplus, vec![int(2), int(0)]);
    }

    #[test]
    fn own_lowest_level_promotes() {
        let i = inst(vec![5, 5], vec![4], vec![EdgeSpec::new(0, 0, 10, 1), EdgeSpec::new(1, 0, 1, 1)]);
        let mut a = BasicAuction::initialize(&i, &cfg(ratio(1, 4))).unwrap();
        a.primal.flow = vec![int(2), int(2)];
        a.primal.surplus = vec![int(3), int(3)];
        a.primal.residual = vec![int(0)];
        a.dual.beta[0] = ratio(5, 4);
        a.dual.beta_prime[0] = int(1);
        a.dual.y = vec![int(1), int(1)];
        assert_eq!(a.auction_step(0), StepOutcome::Promoted { sink: 0 });
        assert_eq!(a.primal.flow, vec![int(2), int(2)]);
        assert_eq!(a.dual.y[0], ratio(5, 4));
    }

    #[test]
    fn one_by_one_run() {
        let i = inst(vec![5], vec![10], vec![EdgeSpec::new(0, 0, 3, 2)]);
        let r = run(&i, &cfg(ratio(1, 4))).unwrap();
        assert!(r.terminated);
        let c = certify(&i, &r.primal.flow, &r.dual.to_duals(), &ratio(1, 4)).unwrap();
        assert!(c.passed);
        assert_eq!(c.primal_value, int(15));
        assert_eq!(c.dual_value, int(15));
    }

    #[test]
    fn two_sources_compete() {
        let i = inst(vec![10, 10], vec![10], vec![EdgeSpec::new(0, 0, 2, 1), EdgeSpec::new(1, 0, 5, 2)]);
        for eps in [ratio(1, 2), ratio(1, 4), ratio(1, 10)] {
            let r = run(&i, &cfg(eps.clone())).unwrap();
            let c = certify(&i, &r.primal.flow, &r.dual.to_duals(), &eps).unwrap();
            assert!(c.passed, "{c:?}");
            assert!(c.primal_value >= (Rational::one() - &eps) * int(25));
        }
    }

    #[test]
    fn zero_profit_does_nothing() {
        let i = inst(vec![3], vec![3], vec![EdgeSpec::new(0, 0, 0, 1)]);
        let r = run(&i, &cfg(ratio(1, 4))).unwrap();
        assert_eq!(r.stats.steps, 0);
        assert!(r.primal.flow[0].is_zero());
    }

    #[test]
    fn decreasing_gain_cycle_stalls() {
        // Sources 1 and 3 keep displacing each other on sinks 1 and 4.
        let i = inst(vec![15, 2, 18], vec![31, 8, 35, 20], vec![
            EdgeSpec::new(0, 0, 19, 5),
            EdgeSpec::new(0, 1, 7, 1),
            EdgeSpec::new(0, 3, 10, 1),
            EdgeSpec::new(1, 0, 14, 1),
            EdgeSpec::new(1, 1, 4, 4),
            EdgeSpec::new(2, 0, 14, 2),
            EdgeSpec::new(2, 2, 6, 1),
            EdgeSpec::new(2, 3, 14, 2),
        ]);
        let r = run(&i, &cfg(ratio(1, 2))).unwrap();
        assert!(!r.terminated);
        assert!(r.stalled);
    }

    #[test]
    fn rejects_capacitated() {
        let i = ProblemInstance { kind: Kind::Bts, ..inst(vec![3], vec![3], vec![EdgeSpec::new(0, 0, 1, 1)]) };
        assert_eq!(run(&i, &cfg(ratio(1, 4))).unwrap_err(), SolveError::Capacitated);
    }
}
