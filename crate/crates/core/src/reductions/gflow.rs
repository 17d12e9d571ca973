//! Min-cost generalized flow as an equality-constrained min-cost BTP.
//!
//! Each node `v` becomes a source `s_v`; each arc `a = (i, j)` becomes a sink
//! `t_a` with budget `u_a`, fed by `s_i` (cost 0, price 1) and by `s_j`
//! (cost `c/μ`, price `1/μ`). One extra sink `t_s` with budget `d_s` hangs
//! off `s_s`. The node `t` gets supply `d_t`, every other node `Σ_k u_vk`.

use std::fmt::{self, Write as _};

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ReductionError;
use crate::instance::token_lines;
use crate::numeric::{fmt_fraction, parse_fraction, ratio, Rational};
use crate::oracle::{LpOutcome, LpTableau, Sense};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub cost: Rational,
    pub cap: Rational,
    pub mu: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenFlowInstance {
    pub nodes: usize,
    pub arcs: Vec<Arc>,
    pub source: usize,
    pub supply: Rational,
    pub sink: usize,
    pub demand: Rational,
}

/// A constraint of the generalized-flow program that a flow violates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenFlowViolation {
    Length { expected: usize, found: usize },
    Negative { arc: usize },
    OverCapacity { arc: usize },
    Conservation { node: usize, net: Rational },
    SourceSupply { sent: Rational },
    SinkDemand { received: Rational },
}

impl fmt::Display for GenFlowViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenFlowViolation::Length { expected, found } => write!(f, "expected {expected} arc flows, found {found}"),
            GenFlowViolation::Negative { arc } => write!(f, "negative flow on arc {}", arc + 1),
            GenFlowViolation::OverCapacity { arc } => write!(f, "flow above capacity on arc {}", arc + 1),
            GenFlowViolation::Conservation { node, net } => write!(f, "node {} has net inflow {}", node + 1, fmt_fraction(net)),
            GenFlowViolation::SourceSupply { sent } => write!(f, "source sends {} instead of its supply", fmt_fraction(sent)),
            GenFlowViolation::SinkDemand { received } => write!(f, "sink receives {} instead of its demand", fmt_fraction(received)),
        }
    }
}

impl GenFlowInstance {
    pub fn check(&self) -> Result<(), ReductionError> {
        let bad = |s: String| Err(ReductionError::Invalid(s));
        if self.source >= self.nodes || self.sink >= self.nodes {
            return bad("source or sink out of range".into());
        }
        if self.source == self.sink {
            return bad("source and sink must differ".into());
        }
        if self.supply.is_negative() || self.demand.is_negative() {
            return bad("supply and demand must be non-negative".into());
        }
        for (k, a) in self.arcs.iter().enumerate() {
            let name = k + 1;
            if a.from >= self.nodes || a.to >= self.nodes {
                return bad(format!("arc {name} has an endpoint out of range"));
            }
            if a.from == a.to {
                return bad(format!("arc {name} is a self-loop"));
            }
            if !a.cap.is_positive() || !a.mu.is_positive() {
                return bad(format!("arc {name} needs positive capacity and multiplier"));
            }
            if a.to == self.source {
                return bad(format!("arc {name} enters the source"));
            }
            if a.from == self.sink {
                return bad(format!("arc {name} leaves the sink"));
            }
        }
        Ok(())
    }

    pub fn cost(&self, flow: &[Rational]) -> Rational {
        self.arcs.iter().zip(flow).map(|(a, f)| &a.cost * f).sum()
    }

    /// Every violated constraint; empty means feasible.
    pub fn violations(&self, flow: &[Rational]) -> Vec<GenFlowViolation> {
        if flow.len() != self.arcs.len() {
            return vec![GenFlowViolation::Length { expected: self.arcs.len(), found: flow.len() }];
        }
        let mut out = Vec::new();
        let mut net = vec![Rational::zero(); self.nodes];
        for (k, (a, f)) in self.arcs.iter().zip(flow).enumerate() {
            if f.is_negative() {
                out.push(GenFlowViolation::Negative { arc: k });
            }
            if *f > a.cap {
                out.push(GenFlowViolation::OverCapacity { arc: k });
            }
            net[a.to] += &a.mu * f;
            net[a.from] -= f;
        }
        for (v, x) in net.iter().enumerate() {
            if v != self.source && v != self.sink && !x.is_zero() {
                out.push(GenFlowViolation::Conservation { node: v, net: x.clone() });
            }
        }
        let sent = -&net[self.source];
        if sent != self.supply {
            out.push(GenFlowViolation::SourceSupply { sent });
        }
        if net[self.sink] != self.demand {
            out.push(GenFlowViolation::SinkDemand { received: net[self.sink].clone() });
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalEdge {
    pub src: usize,
    pub dst: usize,
    /// Cost for min-cost instances, profit for max-profit ones.
    pub weight: Rational,
    pub price: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Minimize cost; every source clears and every sink spends its budget exactly.
    MinCostEquality,
    /// Maximize profit under `≤` supply and budget rows.
    MaxProfit,
}

/// A BTP with rational data, used as the target of the generalized-flow
/// transform and of the M-shift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalBtp {
    pub objective: Objective,
    pub supply: Vec<Rational>,
    pub budget: Vec<Rational>,
    pub edges: Vec<RationalEdge>,
    /// Free-form label carried into the file format.
    pub label: Option<&'static str>,
}

/// A constraint of a `RationalBtp` that a flow violates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BtpViolation {
    Length { expected: usize, found: usize },
    Negative { edge: usize },
    Source { source: usize, sent: Rational },
    Sink { sink: usize, spent: Rational },
}

impl fmt::Display for BtpViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BtpViolation::Length { expected, found } => write!(f, "expected {expected} edge flows, found {found}"),
            BtpViolation::Negative { edge } => write!(f, "negative flow on edge {}", edge + 1),
            BtpViolation::Source { source, sent } => write!(f, "source {} sends {}", source + 1, fmt_fraction(sent)),
            BtpViolation::Sink { sink, spent } => write!(f, "sink {} spends {}", sink + 1, fmt_fraction(spent)),
        }
    }
}

impl RationalBtp {
    pub fn n(&self) -> usize {
        self.supply.len()
    }

    pub fn m(&self) -> usize {
        self.budget.len()
    }

    pub fn value(&self, flow: &[Rational]) -> Rational {
        self.edges.iter().zip(flow).map(|(e, f)| &e.weight * f).sum()
    }

    pub fn violations(&self, flow: &[Rational]) -> Vec<BtpViolation> {
        if flow.len() != self.edges.len() {
            return vec![BtpViolation::Length { expected: self.edges.len(), found: flow.len() }];
        }
        let mut out = Vec::new();
        let mut sent = vec![Rational::zero(); self.n()];
        let mut spent = vec![Rational::zero(); self.m()];
        for (k, (e, f)) in self.edges.iter().zip(flow).enumerate() {
            if f.is_negative() {
                out.push(BtpViolation::Negative { edge: k });
            }
            sent[e.src] += f;
            spent[e.dst] += &e.price * f;
        }
        let equality = self.objective == Objective::MinCostEquality;
        for (i, (x, a)) in sent.into_iter().zip(&self.supply).enumerate() {
            if if equality { x != *a } else { x > *a } {
                out.push(BtpViolation::Source { source: i, sent: x });
            }
        }
        for (j, (x, b)) in spent.into_iter().zip(&self.budget).enumerate() {
            if if equality { x != *b } else { x > *b } {
                out.push(BtpViolation::Sink { sink: j, spent: x });
            }
        }
        out
    }

    pub fn lp(&self) -> LpTableau {
        let k = self.edges.len();
        let sense = match self.objective {
            Objective::MinCostEquality => Sense::Eq,
            Objective::MaxProfit => Sense::Le,
        };
        let mut lp = LpTableau::new(k);
        lp.objective = self.edges.iter().map(|e| e.weight.clone()).collect();
        for i in 0..self.n() {
            let row = self.edges.iter().map(|e| if e.src == i { Rational::one() } else { Rational::zero() }).collect();
            lp.push_row(row, sense, self.supply[i].clone());
        }
        for j in 0..self.m() {
            let row = self.edges.iter().map(|e| if e.dst == j { e.price.clone() } else { Rational::zero() }).collect();
            lp.push_row(row, sense, self.budget[j].clone());
        }
        lp
    }

    /// Exact optimum by simplex: minimum cost or maximum profit per `objective`.
    pub fn exact_optimum(&self) -> LpOutcome {
        match self.objective {
            Objective::MinCostEquality => self.lp().minimize(),
            Objective::MaxProfit => self.lp().maximize(),
        }
    }
}

/// Edge indices of the transformed instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mapper {
    /// Edge `s_i → t_a` for each arc `a = (i, j)`.
    pub tail: Vec<usize>,
    /// Edge `s_j → t_a`.
    pub head: Vec<usize>,
    /// Edge `s_s → t_s`.
    pub source_edge: usize,
    pub mu: Vec<Rational>,
    pub cap: Vec<Rational>,
    pub supply: Rational,
}

/// Builds the min-cost BTP; sink `a` is arc `a`, the last sink is `t_s`.
pub fn gflow_to_btp(g: &GenFlowInstance) -> Result<(RationalBtp, Mapper), ReductionError> {
    g.check()?;
    let mut supply = vec![Rational::zero(); g.nodes];
    let mut edges = Vec::with_capacity(2 * g.arcs.len() + 1);
    let (mut tail, mut head) = (Vec::new(), Vec::new());
    for (k, a) in g.arcs.iter().enumerate() {
        supply[a.from] += &a.cap;
        tail.push(edges.len());
        edges.push(RationalEdge { src: a.from, dst: k, weight: Rational::zero(), price: Rational::one() });
        head.push(edges.len());
        edges.push(RationalEdge { src: a.to, dst: k, weight: &a.cost / &a.mu, price: a.mu.recip() });
    }
    supply[g.sink] = g.demand.clone();
    let source_edge = edges.len();
    edges.push(RationalEdge { src: g.source, dst: g.arcs.len(), weight: Rational::zero(), price: Rational::one() });
    let mut budget: Vec<Rational> = g.arcs.iter().map(|a| a.cap.clone()).collect();
    budget.push(g.supply.clone());
    let btp = RationalBtp { objective: Objective::MinCostEquality, supply, budget, edges, label: None };
    let mapper = Mapper {
        tail,
        head,
        source_edge,
        mu: g.arcs.iter().map(|a| a.mu.clone()).collect(),
        cap: g.arcs.iter().map(|a| a.cap.clone()).collect(),
        supply: g.supply.clone(),
    };
    Ok((btp, mapper))
}

/// `f'_head = μ f`, `f'_tail = u − f`, `f'_{s_s t_s} = d_s`; `f` must be feasible for `g`.
pub fn map_flow_forward(g: &GenFlowInstance, flow: &[Rational], mapper: &Mapper) -> Result<Vec<Rational>, ReductionError> {
    let bad = g.violations(flow);
    if !bad.is_empty() {
        return Err(ReductionError::Infeasible(bad.iter().map(ToString::to_string).collect()));
    }
    let mut out = vec![Rational::zero(); mapper.source_edge + 1];
    for (k, f) in flow.iter().enumerate() {
        out[mapper.head[k]] = &mapper.mu[k] * f;
        out[mapper.tail[k]] = &mapper.cap[k] - f;
    }
    out[mapper.source_edge] = mapper.supply.clone();
    Ok(out)
}

/// `f = f'_head / μ`; `f'` must be feasible for the equality-constrained BTP.
pub fn map_flow_back(btp: &RationalBtp, flow: &[Rational], mapper: &Mapper) -> Result<Vec<Rational>, ReductionError> {
    let bad = btp.violations(flow);
    if !bad.is_empty() {
        return Err(ReductionError::Infeasible(bad.iter().map(ToString::to_string).collect()));
    }
    Ok(mapper.head.iter().zip(&mapper.mu).map(|(&e, mu)| &flow[e] / mu).collect())
}

/// Label carried by instances produced by `mincost_to_maxprofit`.
pub const HEURISTIC_BRIDGE: &str = "heuristic bridge";

/// Profits `M − c` on the same graph with `≤` rows.
///
/// Optima coincide only when the max-profit optimum clears every source and
/// spends every budget, which needs `M` beyond the LP's value granularity;
/// approximate solutions of the result say nothing about the original.
pub fn mincost_to_maxprofit(btp: &RationalBtp, big_m: &Rational) -> Result<RationalBtp, ReductionError> {
    if btp.objective != Objective::MinCostEquality {
        return Err(ReductionError::Invalid("expected a min-cost instance".into()));
    }
    if let Some(max) = btp.edges.iter().map(|e| &e.weight).max() {
        if big_m <= max {
            return Err(ReductionError::ShiftTooSmall { max: max.clone() });
        }
    }
    let edges = btp
        .edges
        .iter()
        .map(|e| RationalEdge { weight: big_m - &e.weight, ..e.clone() })
        .collect();
    Ok(RationalBtp { objective: Objective::MaxProfit, edges, label: Some(HEURISTIC_BRIDGE), ..btp.clone() })
}

/// Parses the `g` format: `g <|V|> <|A|>`, `a <i> <j> <c> <u> <mu>`, `src <s> <d_s>`, `snk <t> <d_t>`.
pub fn parse_gflow(text: &str) -> Result<GenFlowInstance, ReductionError> {
    let syntax = |line: usize, reason: String| ReductionError::Syntax { line, reason };
    let mut lines = token_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| syntax(1, "missing header".into()))?;
    if header.len() != 3 || header[0] != "g" {
        return Err(syntax(hline, "header must be 'g <nodes> <arcs>'".into()));
    }
    let count = |tok: &str| tok.parse::<usize>().map_err(|_| syntax(hline, format!("bad count '{tok}'")));
    let (nodes, arc_count) = (count(header[1])?, count(header[2])?);
    let mut arcs = Vec::new();
    let (mut source, mut sink) = (None, None);
    for (line, toks) in lines {
        let node = |tok: &str| match tok.parse::<usize>() {
            Ok(k) if (1..=nodes).contains(&k) => Ok(k - 1),
            _ => Err(syntax(line, format!("bad node '{tok}'"))),
        };
        let frac = |tok: &str| parse_fraction(tok).ok_or_else(|| syntax(line, format!("bad number '{tok}'")));
        match (toks[0], toks.len()) {
            ("a", 6) => arcs.push(Arc { from: node(toks[1])?, to: node(toks[2])?, cost: frac(toks[3])?, cap: frac(toks[4])?, mu: frac(toks[5])? }),
            ("src", 3) | ("snk", 3) => {
                let slot = if toks[0] == "src" { &mut source } else { &mut sink };
                if slot.replace((node(toks[1])?, frac(toks[2])?)).is_some() {
                    return Err(syntax(line, format!("'{}' given twice", toks[0])));
                }
            }
            (other, _) => return Err(syntax(line, format!("malformed '{other}' line"))),
        }
    }
    if arcs.len() != arc_count {
        return Err(syntax(hline, format!("header declares {arc_count} arcs, found {}", arcs.len())));
    }
    let (source, supply) = source.ok_or_else(|| syntax(hline, "missing 'src' line".into()))?;
    let (sink, demand) = sink.ok_or_else(|| syntax(hline, "missing 'snk' line".into()))?;
    let g = GenFlowInstance { nodes, arcs, source, supply, sink, demand };
    g.check()?;
    Ok(g)
}

pub fn serialize_gflow(g: &GenFlowInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "g {} {}", g.nodes, g.arcs.len());
    for a in &g.arcs {
        let _ = writeln!(out, "a {} {} {} {} {}", a.from + 1, a.to + 1, fmt_fraction(&a.cost), fmt_fraction(&a.cap), fmt_fraction(&a.mu));
    }
    let _ = writeln!(out, "src {} {}", g.source + 1, fmt_fraction(&g.supply));
    let _ = writeln!(out, "snk {} {}", g.sink + 1, fmt_fraction(&g.demand));
    out
}

fn header_tag(obj: Objective) -> &'static str {
    match obj {
        Objective::MinCostEquality => "mcbtp",
        Objective::MaxProfit => "mpbtp",
    }
}

/// `p mcbtp|mpbtp <n> <m> <E>`, then `s`, `t` and `e <i> <j> <weight> <price>` lines with rational values.
pub fn serialize_rational(btp: &RationalBtp) -> String {
    let mut out = String::new();
    if let Some(label) = btp.label {
        let _ = writeln!(out, "# {label}");
    }
    let _ = writeln!(out, "p {} {} {} {}", header_tag(btp.objective), btp.n(), btp.m(), btp.edges.len());
    for (i, a) in btp.supply.iter().enumerate() {
        let _ = writeln!(out, "s {} {}", i + 1, fmt_fraction(a));
    }
    for (j, b) in btp.budget.iter().enumerate() {
        let _ = writeln!(out, "t {} {}", j + 1, fmt_fraction(b));
    }
    for e in &btp.edges {
        let _ = writeln!(out, "e {} {} {} {}", e.src + 1, e.dst + 1, fmt_fraction(&e.weight), fmt_fraction(&e.price));
    }
    out
}

pub fn parse_rational(text: &str) -> Result<RationalBtp, ReductionError> {
    let syntax = |line: usize, reason: String| ReductionError::Syntax { line, reason };
    let mut lines = token_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| syntax(1, "missing header".into()))?;
    let objective = match (header.len(), header.first(), header.get(1)) {
        (5, Some(&"p"), Some(&"mcbtp")) => Objective::MinCostEquality,
        (5, Some(&"p"), Some(&"mpbtp")) => Objective::MaxProfit,
        _ => return Err(syntax(hline, "header must be 'p mcbtp|mpbtp <n> <m> <E>'".into())),
    };
    let count = |tok: &str| tok.parse::<usize>().map_err(|_| syntax(hline, format!("bad count '{tok}'")));
    let (n, m, e_count) = (count(header[2])?, count(header[3])?, count(header[4])?);
    let mut supply = vec![None; n];
    let mut budget = vec![None; m];
    let mut edges = Vec::new();
    for (line, toks) in lines {
        let idx = |tok: &str, len: usize| match tok.parse::<usize>() {
            Ok(k) if (1..=len).contains(&k) => Ok(k - 1),
            _ => Err(syntax(line, format!("bad index '{tok}'"))),
        };
        let frac = |tok: &str| parse_fraction(tok).ok_or_else(|| syntax(line, format!("bad number '{tok}'")));
        match (toks[0], toks.len()) {
            ("s", 3) => supply[idx(toks[1], n)?] = Some(frac(toks[2])?),
            ("t", 3) => budget[idx(toks[1], m)?] = Some(frac(toks[2])?),
            ("e", 5) => {
                let price = frac(toks[4])?;
                if !price.is_positive() {
                    return Err(syntax(line, "prices must be positive".into()));
                }
                edges.push(RationalEdge { src: idx(toks[1], n)?, dst: idx(toks[2], m)?, weight: frac(toks[3])?, price });
            }
            (other, _) => return Err(syntax(line, format!("malformed '{other}' line"))),
        }
    }
    if edges.len() != e_count {
        return Err(syntax(hline, format!("header declares {e_count} edges, found {}", edges.len())));
    }
    let fill = |v: Vec<Option<Rational>>| v.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| syntax(hline, "missing supply or budget line".into()));
    let label = text.lines().next().filter(|l| l.trim() == format!("# {HEURISTIC_BRIDGE}")).map(|_| HEURISTIC_BRIDGE);
    Ok(RationalBtp { objective, supply: fill(supply)?, budget: fill(budget)?, edges, label })
}

/// A random generalized-flow instance on at most `max_nodes` nodes together
/// with a feasible flow built by routing along random `s`–`t` paths.
pub fn random_gflow(seed: u64, max_nodes: usize) -> (GenFlowInstance, Vec<Rational>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = rng.gen_range(2..=max_nodes.max(2));
    let (source, sink) = (0, nodes - 1);
    let mut arcs: Vec<Arc> = Vec::new();
    let mut flow: Vec<Rational> = Vec::new();
    let find_or_add = |arcs: &mut Vec<Arc>, flow: &mut Vec<Rational>, rng: &mut ChaCha8Rng, i: usize, j: usize| {
        if let Some(k) = arcs.iter().position(|a| a.from == i && a.to == j) {
            return k;
        }
        let mu = ratio(rng.gen_range(1..=4), rng.gen_range(1..=4));
        arcs.push(Arc { from: i, to: j, cost: ratio(rng.gen_range(-5..=10), 1), cap: Rational::zero(), mu });
        flow.push(Rational::zero());
        arcs.len() - 1
    };
    let mut supply = Rational::zero();
    let mut demand = Rational::zero();
    for _ in 0..rng.gen_range(0..=3) {
        let mut path = vec![source];
        let mut inner: Vec<usize> = (1..sink).collect();
        while !inner.is_empty() && rng.gen_bool(0.6) {
            path.push(inner.swap_remove(rng.gen_range(0..inner.len())));
        }
        path.push(sink);
        let mut amount = ratio(rng.gen_range(1..=6), rng.gen_range(1..=3));
        supply += &amount;
        for w in path.windows(2) {
            let k = find_or_add(&mut arcs, &mut flow, &mut rng, w[0], w[1]);
            flow[k] += &amount;
            amount = &amount * &arcs[k].mu;
        }
        demand += amount;
    }
    for _ in 0..rng.gen_range(0..=nodes) {
        let i = rng.gen_range(0..sink);
        let j = rng.gen_range(1..nodes);
        if i != j {
            find_or_add(&mut arcs, &mut flow, &mut rng, i, j);
        }
    }
    if arcs.is_empty() {
        find_or_add(&mut arcs, &mut flow, &mut rng, source, sink);
    }
    for (a, f) in arcs.iter_mut().zip(&flow) {
        a.cap = f + ratio(rng.gen_range(0..=4), 1);
        if a.cap.is_zero() {
            a.cap = Rational::one();
        }
    }
    (GenFlowInstance { nodes, arcs, source, supply, sink, demand }, flow)
}
