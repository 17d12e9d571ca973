//! Modified auction for capacitated instances; uncapacitated ones are the
//! special case with unbounded forward residuals.
//!
//! Each iteration walks the derived graph from an active source and pushes
//! along the resulting path or cycle, then runs one β-update pass and
//! removes 2-cycles. A saturated edge whose signed slack `c − pβ − α` is
//! non-negative is *protected*: it is kept out of the back-edge sets and its
//! slack is carried by γ. Once a rise makes the slack negative the edge is
//! released at the pre-rise price level and can be bought out like any other
//! back edge.

mod push;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

pub use push::{
    bulk_cycle_push, max_pow_le, push_along, revolution_limit, CycleDelta, CycleGeometry, CycleModel, PathDelta, PathModel,
    RevolutionLimit,
};

use crate::certify::{certify_with_tolerance, Certificate, Duals};
use crate::graph::{BackSets, BestSinkHeap, GraphView, Path, PathKind};
use crate::instance::{Adjacency, NumericMode, ProblemInstance, SolverConfig};
use crate::numeric::{uint, Rational, Scalar, Tol};
use crate::state::{check_inputs, DualState, Monitor, PrimalState, Snapshot, SolveError};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunStats {
    pub iterations: u64,
    pub find_path_steps: u64,
    pub path_pushes: u64,
    pub cycle_pushes: u64,
    /// Full revolutions applied in bulk by cycle pushes.
    pub bulk_revolutions: u64,
    pub unbounded_cycles: u64,
    pub two_cycle_eliminations: u64,
    pub blocked_paths: u64,
    /// Multiplicative rises per sink.
    pub beta_rises: Vec<u64>,
    pub beta_activations: u64,
    pub releases: u64,
    pub promotions: u64,
    pub back_edge_zeroings: u64,
    pub forward_saturations: u64,
    pub surplus_disappearances: u64,
    pub heap_updates: u64,
    pub operations: u64,
}

impl RunStats {
    pub fn total_beta_rises(&self) -> u64 {
        self.beta_rises.iter().sum()
    }

    /// Price changes of any kind.
    pub fn phases(&self) -> u64 {
        self.total_beta_rises() + self.beta_activations
    }

    /// Operations per price change.
    pub fn charge_per_phase(&self) -> f64 {
        self.operations as f64 / self.phases().max(1) as f64
    }

    pub fn to_map(&self) -> BTreeMap<&'static str, u64> {
        BTreeMap::from([
            ("iterations", self.iterations),
            ("find_path_steps", self.find_path_steps),
            ("path_pushes", self.path_pushes),
            ("cycle_pushes", self.cycle_pushes),
            ("bulk_revolutions", self.bulk_revolutions),
            ("unbounded_cycles", self.unbounded_cycles),
            ("two_cycle_eliminations", self.two_cycle_eliminations),
            ("blocked_paths", self.blocked_paths),
            ("beta_rises", self.total_beta_rises()),
            ("beta_activations", self.beta_activations),
            ("releases", self.releases),
            ("promotions", self.promotions),
            ("back_edge_zeroings", self.back_edge_zeroings),
            ("forward_saturations", self.forward_saturations),
            ("surplus_disappearances", self.surplus_disappearances),
            ("heap_updates", self.heap_updates),
            ("operations", self.operations),
        ])
    }
}

/// What a single push did to the state.
#[derive(Debug, Clone, PartialEq)]
pub struct PushReport<S> {
    /// Surplus that left the starting source.
    pub consumed: S,
    /// Sources other than the start whose surplus grew, with the amount.
    pub deposits: Vec<(usize, S)>,
    pub saturated: Vec<usize>,
    pub zeroed: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaChange {
    None,
    Activated,
    Raised,
}

/// Why a run stopped early.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Abort {
    MaxPhases,
    Stalled,
}

pub struct Auction<'a, S: Scalar> {
    inst: &'a ProblemInstance,
    adj: Adjacency,
    src: Vec<usize>,
    dst: Vec<usize>,
    profit: Vec<S>,
    price: Vec<S>,
    cap: Vec<Option<S>>,
    growth: S,
    tol: Tol<S>,
    /// `ε · min c/p` over in-edges with positive profit.
    floor: Vec<Option<S>>,
    pub primal: PrimalState<S>,
    pub dual: DualState<S>,
    heap: BestSinkHeap<S>,
    preferred: Vec<Option<usize>>,
    back: BackSets,
    tight: Vec<bool>,
    dirty: BTreeSet<usize>,
    touched: Vec<usize>,
    touched_flag: Vec<bool>,
    cursor: usize,
    pub stats: RunStats,
    events: Option<Vec<String>>,
}

impl<'a, S: Scalar> Auction<'a, S> {
    /// Zero flow, zero prices, `α_i = max(0, max_j c_ij)` over unsaturated edges.
    pub fn new(inst: &'a ProblemInstance, config: &SolverConfig, tol: Tol<S>) -> Result<Self, SolveError> {
        check_inputs(inst, config)?;
        let (n, m, e) = (inst.n(), inst.m(), inst.edges.len());
        let dual = DualState { alpha: vec![S::zero(); n], beta: vec![S::zero(); m], beta_prime: vec![S::zero(); m], y: vec![S::zero(); e] };
        let mut a = Self::with_parts(inst, config, tol, PrimalState::zero(inst), dual);
        a.rebuild(true);
        Ok(a)
    }

    /// Starts from a caller-supplied state; `α` is taken as given.
    pub fn from_state(
        inst: &'a ProblemInstance,
        config: &SolverConfig,
        tol: Tol<S>,
        primal: PrimalState<S>,
        dual: DualState<S>,
    ) -> Result<Self, SolveError> {
        check_inputs(inst, config)?;
        let mut a = Self::with_parts(inst, config, tol, primal, dual);
        a.rebuild(false);
        Ok(a)
    }

    fn with_parts(inst: &'a ProblemInstance, config: &SolverConfig, tol: Tol<S>, primal: PrimalState<S>, dual: DualState<S>) -> Self {
        let adj = inst.adjacency();
        let (n, m) = (inst.n(), inst.m());
        let src: Vec<usize> = inst.edges.iter().map(|e| e.src).collect();
        let dst: Vec<usize> = inst.edges.iter().map(|e| e.dst).collect();
        let eps = S::from_rational(&config.epsilon);
        let floor = adj
            .inc
            .iter()
            .map(|es| {
                es.iter()
                    .map(|&e| &inst.edges[e])
                    .filter(|s| s.profit > 0)
                    .map(|s| uint(s.profit) / uint(s.price))
                    .min()
                    .map(|q| eps.clone() * &S::from_rational(&q))
            })
            .collect();
        Auction {
            inst,
            heap: BestSinkHeap::new(n, src.clone(), dst.clone()),
            adj,
            profit: inst.edges.iter().map(|e| S::from_u64(e.profit)).collect(),
            price: inst.edges.iter().map(|e| S::from_u64(e.price)).collect(),
            cap: inst.edges.iter().map(|e| e.capacity.map(S::from_u64)).collect(),
            src,
            dst,
            growth: S::one() + &eps,
            tol,
            floor,
            primal,
            dual,
            preferred: vec![None; n],
            back: BackSets::new(m, inst.edges.len()),
            tight: vec![false; m],
            dirty: BTreeSet::new(),
            touched: Vec::new(),
            touched_flag: vec![false; n],
            cursor: 0,
            stats: RunStats { beta_rises: vec![0; m], ..RunStats::default() },
            events: config.event_log.then(Vec::new),
        }
    }

    fn rebuild(&mut self, recompute_alpha: bool) {
        for e in 0..self.inst.edges.len() {
            if !self.saturated(e) && !self.heap.contains(e) {
                let k = self.key(e);
                self.heap.insert(e, k);
            }
        }
        for i in 0..self.inst.n() {
            self.preferred[i] = self.heap.top(i);
            if recompute_alpha {
                self.dual.alpha[i] = self.top_alpha(i);
            }
        }
        for j in 0..self.inst.m() {
            self.tight[j] = self.tol.zero(&self.primal.residual[j]);
        }
        for e in 0..self.inst.edges.len() {
            self.refresh_back(e);
        }
        self.dirty = (0..self.inst.m()).collect();
    }

    pub fn instance(&self) -> &ProblemInstance {
        self.inst
    }

    pub fn preferred(&self, i: usize) -> Option<usize> {
        self.preferred[i]
    }

    pub fn back_edges(&self, j: usize) -> Vec<usize> {
        self.back.iter(j).map(|(_, e)| e).collect()
    }

    pub fn is_tight(&self, j: usize) -> bool {
        self.tight[j]
    }

    pub fn heap_key(&self, e: usize) -> Option<&S> {
        self.heap.contains(e).then(|| self.heap.key(e))
    }

    pub fn events(&self) -> &[String] {
        self.events.as_deref().unwrap_or(&[])
    }

    /// `c − pβ`
    pub fn key(&self, e: usize) -> S {
        self.profit[e].clone() - self.price[e].clone() * &self.dual.beta[self.dst[e]]
    }

    pub fn saturated(&self, e: usize) -> bool {
        match &self.cap[e] {
            Some(u) => !self.tol.lt(&self.primal.flow[e], u),
            None => false,
        }
    }

    /// Saturated with non-negative signed slack.
    pub fn protected(&self, e: usize) -> bool {
        self.saturated(e) && self.tol.le(&self.dual.alpha[self.src[e]], &self.key(e))
    }

    fn wants_back(&self, e: usize) -> bool {
        let j = self.dst[e];
        self.tol.pos(&self.primal.flow[e]) && self.dual.y[e] < self.dual.beta[j] && !self.protected(e)
    }

    fn top_alpha(&self, i: usize) -> S {
        match self.heap.top(i) {
            Some(e) if *self.heap.key(e) > S::zero() => self.heap.key(e).clone(),
            _ => S::zero(),
        }
    }

    fn log(&mut self, line: impl FnOnce() -> String) {
        if let Some(ev) = &mut self.events {
            ev.push(line());
        }
    }

    fn log_edge(&mut self, tag: &str, e: usize) {
        let (i, j) = (self.src[e], self.dst[e]);
        self.log(|| format!("{tag} {} {} {}", e + 1, i + 1, j + 1));
    }

    fn touch(&mut self, i: usize) {
        if !self.touched_flag[i] {
            self.touched_flag[i] = true;
            self.touched.push(i);
        }
    }

    fn refresh_back(&mut self, e: usize) {
        let want = self.wants_back(e);
        let (i, j) = (self.src[e], self.dst[e]);
        if want && self.back.insert(j, i, e) {
            self.log_edge("back+", e);
        } else if !want && self.back.remove(j, i, e) {
            self.log_edge("back-", e);
            if self.back.is_empty(j) {
                self.dirty.insert(j);
            }
        }
    }

    /// Heap membership plus back-edge status of one edge.
    fn refresh(&mut self, e: usize) {
        let sat = self.saturated(e);
        if !sat && !self.heap.contains(e) {
            let k = self.key(e);
            self.heap.insert(e, k);
            self.touch(self.src[e]);
        } else if sat && self.heap.contains(e) {
            self.heap.remove(e);
            self.touch(self.src[e]);
        }
        self.refresh_back(e);
    }

    /// Re-reads `Pr_i` and `α_i` for every touched source.
    fn settle(&mut self) {
        while let Some(i) = self.touched.pop() {
            self.touched_flag[i] = false;
            self.preferred[i] = self.heap.top(i);
            let alpha = self.top_alpha(i);
            if alpha != self.dual.alpha[i] {
                self.dual.alpha[i] = alpha;
                for k in 0..self.adj.out[i].len() {
                    let e = self.adj.out[i][k];
                    if self.saturated(e) {
                        self.refresh_back(e);
                    }
                }
            }
        }
    }

    fn snap_flow(&mut self, e: usize) {
        if S::EXACT {
            return;
        }
        if self.primal.flow[e] < S::zero() {
            self.primal.flow[e] = S::zero();
        }
        self.tol.snap_zero(&mut self.primal.flow[e]);
        if let Some(u) = &self.cap[e] {
            let u = u.clone();
            self.tol.snap_to(&mut self.primal.flow[e], &u);
        }
    }

    fn add_surplus(&mut self, i: usize, delta: &S) {
        self.primal.surplus[i] += delta;
        self.tol.snap_zero(&mut self.primal.surplus[i]);
    }

    /// Applies flow deltas and returns (saturated forward edges, zeroed back edges).
    fn apply_flows(&mut self, forward: &[usize], fwd: &[S], back: &[usize], bk: &[S]) -> (Vec<usize>, Vec<usize>) {
        let mut saturated = Vec::new();
        let mut zeroed = Vec::new();
        for (&e, x) in forward.iter().zip(fwd) {
            if !(*x > S::zero()) {
                continue;
            }
            self.primal.flow[e] += x;
            self.snap_flow(e);
            self.dual.y[e] = self.dual.beta[self.dst[e]].clone();
            if self.saturated(e) {
                saturated.push(e);
            }
        }
        for (&e, x) in back.iter().zip(bk) {
            if !(*x > S::zero()) {
                continue;
            }
            self.primal.flow[e] -= x;
            self.snap_flow(e);
            if !self.tol.pos(&self.primal.flow[e]) {
                zeroed.push(e);
                self.log_edge("zero", e);
            }
        }
        self.stats.forward_saturations += saturated.len() as u64;
        self.stats.back_edge_zeroings += zeroed.len() as u64;
        self.stats.operations += (forward.len() + back.len()) as u64;
        for &e in forward.iter().chain(back) {
            self.refresh(e);
        }
        self.settle();
        (saturated, zeroed)
    }

    fn path_model(&self, sources: &[usize], forward: &[usize], back: &[usize], tail: bool) -> PathModel<S> {
        PathModel {
            start_surplus: self.primal.surplus[sources[0]].clone(),
            fwd_price: forward.iter().map(|&e| self.price[e].clone()).collect(),
            fwd_room: forward.iter().map(|&e| self.cap[e].as_ref().map(|u| u.clone() - &self.primal.flow[e])).collect(),
            back_price: back.iter().map(|&e| self.price[e].clone()).collect(),
            back_flow: back.iter().map(|&e| self.primal.flow[e].clone()).collect(),
            tail_budget: tail.then(|| self.primal.residual[self.dst[*forward.last().expect("tail edge")]].clone()),
        }
    }

    /// Pushes the start surplus along `sources[0] → … → sources[k]`, optionally
    /// ending on the sink of the extra forward edge.
    fn push_segment(&mut self, sources: &[usize], forward: &[usize], back: &[usize], tail: bool) -> PushReport<S> {
        let model = self.path_model(sources, forward, back, tail);
        let delta = push_along(&model);
        let change = delta.surplus_change();
        let (saturated, zeroed) = self.apply_flows(forward, &delta.fwd, back, &delta.back);
        if tail {
            let last = *forward.last().expect("tail edge");
            let j = self.dst[last];
            let spent = self.price[last].clone() * delta.fwd.last().expect("tail amount");
            self.primal.residual[j] -= &spent;
            self.tol.snap_zero(&mut self.primal.residual[j]);
            if !self.tight[j] && self.primal.residual[j].is_zero() {
                self.tight[j] = true;
                self.dirty.insert(j);
            }
        }
        let had = self.tol.pos(&self.primal.surplus[sources[0]]);
        let mut deposits = Vec::new();
        for (k, d) in change.iter().enumerate() {
            self.add_surplus(sources[k], d);
            if k > 0 && *d > S::zero() {
                deposits.push((sources[k], d.clone()));
            }
        }
        if had && !self.tol.pos(&self.primal.surplus[sources[0]]) {
            self.stats.surplus_disappearances += 1;
        }
        self.stats.path_pushes += 1;
        PushReport { consumed: -change[0].clone(), deposits, saturated, zeroed }
    }

    /// Pushes along a path returned by `find_path` (types I only).
    pub fn push_flow_path(&mut self, path: &Path) -> PushReport<S> {
        let tail = path.kind == PathKind::EndsAtSink;
        self.push_segment(&path.sources, &path.forward, &path.back, tail)
    }

    fn cycle_model(&self, sources: &[usize], forward: &[usize], back: &[usize]) -> CycleModel<S> {
        CycleModel {
            entry_surplus: self.primal.surplus[sources[0]].clone(),
            fwd_price: forward.iter().map(|&e| self.price[e].clone()).collect(),
            fwd_room: forward.iter().map(|&e| self.cap[e].as_ref().map(|u| u.clone() - &self.primal.flow[e])).collect(),
            back_price: back.iter().map(|&e| self.price[e].clone()).collect(),
            back_flow: back.iter().map(|&e| self.primal.flow[e].clone()).collect(),
        }
    }

    /// Geometry of the cycle part of a type-III path.
    pub fn cycle_geometry(&self, path: &Path) -> Option<CycleGeometry<S>> {
        let PathKind::Cycle { entry } = path.kind else { return None };
        Some(CycleGeometry::new(&self.cycle_model(&path.sources[entry..], &path.forward[entry..], &path.back[entry..])))
    }

    fn push_cycle(&mut self, sources: &[usize], forward: &[usize], back: &[usize]) -> PushReport<S> {
        let model = self.cycle_model(sources, forward, back);
        let delta = bulk_cycle_push(&model);
        match delta.revolutions {
            Some(r) => self.stats.bulk_revolutions += r,
            None => self.stats.unbounded_cycles += 1,
        }
        let (saturated, zeroed) = self.apply_flows(forward, &delta.fwd, back, &delta.back);
        let had = self.tol.pos(&self.primal.surplus[sources[0]]);
        let mut deposits = Vec::new();
        for (k, d) in delta.surplus.iter().enumerate() {
            self.add_surplus(sources[k], d);
            if k > 0 && *d > S::zero() {
                deposits.push((sources[k], d.clone()));
            }
        }
        if had && !self.tol.pos(&self.primal.surplus[sources[0]]) {
            self.stats.surplus_disappearances += 1;
        }
        self.stats.cycle_pushes += 1;
        PushReport { consumed: -delta.surplus[0].clone(), deposits, saturated, zeroed }
    }

    /// Prefix push to the cycle entry, then the geometric cycle push.
    pub fn push_flow_cycle(&mut self, path: &Path) -> PushReport<S> {
        let PathKind::Cycle { entry } = path.kind else { panic!("push_flow_cycle needs a type-III path") };
        if entry > 0 {
            self.push_segment(&path.sources[..=entry], &path.forward[..entry], &path.back[..entry], false);
        }
        let c = path.sources[entry];
        if !self.tol.pos(&self.primal.surplus[c]) {
            return PushReport { consumed: S::zero(), deposits: Vec::new(), saturated: Vec::new(), zeroed: Vec::new() };
        }
        self.push_cycle(&path.sources[entry..], &path.forward[entry..], &path.back[entry..])
    }

    fn promote(&mut self, e: usize) {
        self.dual.y[e] = self.dual.beta[self.dst[e]].clone();
        self.refresh_back(e);
        self.log_edge("promote", e);
    }

    /// Applies the price rule to one sink.
    pub fn update_beta(&mut self, j: usize) -> BetaChange {
        let old = self.dual.beta[j].clone();
        let (new, change) = if old.is_zero() {
            match (&self.floor[j], self.tight[j]) {
                (Some(f), true) => (f.clone(), BetaChange::Activated),
                _ => return BetaChange::None,
            }
        } else {
            if !self.back.is_empty(j) {
                return BetaChange::None;
            }
            // A sink nobody can profit from has no reason to rise further.
            if !self.adj.inc[j].iter().any(|&e| self.key(e) > S::zero()) {
                return BetaChange::None;
            }
            (old.clone() * &self.growth, BetaChange::Raised)
        };
        let inc = self.adj.inc[j].clone();
        let was_protected: Vec<bool> = inc.iter().map(|&e| self.protected(e)).collect();
        if change == BetaChange::Raised {
            self.dual.beta_prime[j] = old.clone();
            self.stats.beta_rises[j] += 1;
        } else {
            self.stats.beta_activations += 1;
        }
        self.dual.beta[j] = new;
        let tag = if change == BetaChange::Raised { "rise" } else { "activate" };
        let shown = self.dual.beta[j].to_f64();
        self.log(|| format!("{tag} {} {shown}", j + 1));
        self.stats.operations += inc.len() as u64;
        for &e in &inc {
            if self.heap.contains(e) {
                let k = self.key(e);
                self.heap.update(e, k);
                self.touch(self.src[e]);
            }
        }
        self.settle();
        for (k, &e) in inc.iter().enumerate() {
            if was_protected[k] && self.tol.pos(&self.primal.flow[e]) && !self.protected(e) {
                self.dual.y[e] = old.clone();
                self.stats.releases += 1;
                self.log_edge("release", e);
            }
            self.refresh_back(e);
        }
        if self.back.is_empty(j) {
            self.dirty.insert(j);
        }
        change
    }

    /// At most one price change per sink whose state changed since the last pass.
    pub fn beta_update_pass(&mut self) -> usize {
        let sinks = std::mem::take(&mut self.dirty);
        let mut changed = 0;
        for j in sinks {
            if self.update_beta(j) != BetaChange::None {
                changed += 1;
            }
        }
        changed
    }

    /// Promotes every preferred edge that is a back edge of a sink with other back edges.
    pub fn remove_two_cycles(&mut self) {
        for i in 0..self.inst.n() {
            if !self.tol.pos(&self.dual.alpha[i]) {
                continue;
            }
            if let Some(e) = self.preferred[i] {
                if self.back.contains(e) && self.back.len(self.dst[e]) >= 2 {
                    self.promote(e);
                    self.stats.promotions += 1;
                }
            }
        }
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.tol.pos(&self.dual.alpha[i]) && self.tol.pos(&self.primal.surplus[i])
    }

    fn next_active(&mut self) -> Option<usize> {
        let n = self.inst.n();
        for k in 0..n {
            let i = (self.cursor + k) % n;
            if self.is_active(i) {
                self.cursor = (i + 1) % n;
                return Some(i);
            }
        }
        None
    }

    pub fn find_path(&self, start: usize) -> Path {
        let alpha = &self.dual.alpha;
        let beta = &self.dual.beta;
        let tol = &self.tol;
        let alpha_positive = |i: usize| tol.pos(&alpha[i]);
        let beta_zero = |j: usize| beta[j].is_zero();
        let view = GraphView {
            src: &self.src,
            dst: &self.dst,
            preferred: &self.preferred,
            back: &self.back,
            alpha_positive: &alpha_positive,
            beta_zero: &beta_zero,
        };
        view.find_path(start)
    }

    /// One iteration of the main loop; `None` once no source is active.
    pub fn step(&mut self) -> Option<PathKind> {
        let i = self.next_active()?;
        let path = self.find_path(i);
        self.stats.iterations += 1;
        self.stats.find_path_steps += path.steps;
        self.stats.operations += path.steps;
        match path.kind {
            PathKind::EndsAtSink | PathKind::EndsAtSource => {
                self.push_flow_path(&path);
            }
            PathKind::TwoCycle => {
                let l = path.back.len();
                if l > 0 {
                    self.push_segment(&path.sources, &path.forward[..l], &path.back, false);
                }
                self.promote(path.forward[l]);
                self.stats.two_cycle_eliminations += 1;
                self.dirty.insert(path.sinks[l]);
            }
            PathKind::Cycle { .. } => {
                self.push_flow_cycle(&path);
            }
            PathKind::Blocked => {
                self.stats.blocked_paths += 1;
                self.dirty.insert(*path.sinks.last().expect("blocked path has a sink"));
            }
        }
        self.beta_update_pass();
        self.remove_two_cycles();
        Some(path.kind)
    }

    /// Runs until no source is active or a guard trips.
    pub fn run(&mut self, max_phases: Option<u64>, mut monitor: Option<&mut dyn Monitor>) -> Result<(), Abort> {
        let inst = self.inst;
        let stall_limit = 16 * (inst.n() + inst.m() + inst.edges.len()) as u64 + 1000;
        let mut last_phase = self.stats.phases();
        let mut quiet = 0u64;
        loop {
            if max_phases.is_some_and(|cap| self.stats.phases() > cap) {
                return Err(Abort::MaxPhases);
            }
            if self.step().is_none() {
                return Ok(());
            }
            if let Some(mon) = monitor.as_deref_mut() {
                mon.observe(&Snapshot::capture(self.stats.iterations, &self.primal, &self.dual));
            }
            if self.stats.phases() != last_phase {
                last_phase = self.stats.phases();
                quiet = 0;
            } else {
                quiet += 1;
                if quiet > stall_limit {
                    return Err(Abort::Stalled);
                }
            }
        }
    }

    fn finish_stats(&mut self) {
        self.stats.operations += self.heap.updates - self.stats.heap_updates;
        self.stats.heap_updates = self.heap.updates;
    }
}

/// Solver output: exact flows and duals plus the independent certificate.
#[derive(Debug, Clone)]
pub struct Solution {
    pub flows: Vec<Rational>,
    pub duals: Duals,
    pub beta_prime: Vec<Rational>,
    pub certificate: Certificate,
    pub stats: RunStats,
    pub terminated: bool,
    pub abort: Option<Abort>,
    pub epsilon: Rational,
    pub mode: NumericMode,
    pub events: Vec<String>,
}

impl Solution {
    pub fn primal_value(&self) -> &Rational {
        &self.certificate.primal_value
    }

    pub fn dual_value(&self) -> &Rational {
        &self.certificate.dual_value
    }
}

pub fn solve(inst: &ProblemInstance, config: &SolverConfig) -> Result<Solution, SolveError> {
    solve_monitored(inst, config, None)
}

pub fn solve_monitored(inst: &ProblemInstance, config: &SolverConfig, monitor: Option<&mut dyn Monitor>) -> Result<Solution, SolveError> {
    match config.numeric_mode {
        NumericMode::ExactRational => run_in::<Rational>(inst, config, Tol::exact(), Rational::zero(), monitor),
        NumericMode::Float64 { eta } => {
            config.check()?;
            let tol = Rational::from_float(eta).unwrap_or_else(Rational::zero);
            run_in::<f64>(inst, config, Tol::new(eta), tol, monitor)
        }
    }
}

fn run_in<S: Scalar>(
    inst: &ProblemInstance,
    config: &SolverConfig,
    tol: Tol<S>,
    cert_tol: Rational,
    monitor: Option<&mut dyn Monitor>,
) -> Result<Solution, SolveError> {
    let mut auction = Auction::<S>::new(inst, config, tol)?;
    let outcome = auction.run(config.max_phases, monitor);
    auction.finish_stats();
    let flows = auction.primal.flows_rational();
    let duals = auction.dual.to_duals();
    let certificate =
        certify_with_tolerance(inst, &flows, &duals, &config.epsilon, &cert_tol).expect("solver output has instance dimensions");
    Ok(Solution {
        flows,
        duals,
        beta_prime: auction.dual.beta_prime.iter().map(Scalar::to_rational).collect(),
        certificate,
        stats: auction.stats.clone(),
        terminated: outcome.is_ok(),
        abort: outcome.err(),
        epsilon: config.epsilon.clone(),
        mode: config.numeric_mode,
        events: auction.events.take().unwrap_or_default(),
    })
}

#[cfg(test)]
mod tests;
