//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Every check below uses exact rationals with zero tolerance unless a
//! constant says otherwise.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use budget_flow::basic;
use budget_flow::bench::{ops_soft_bound, run_bench};
use budget_flow::bts::{bulk_cycle_push, solve, solve_monitored, CycleGeometry, CycleModel, RevolutionLimit};
use budget_flow::certify::{certify, Certificate, GapRatio};
use budget_flow::instance::{generate, GenError, GenSpec, Kind, NumericMode, ProblemInstance, SolverConfig};
use budget_flow::monitor::{check_reentry, InvariantMonitor};
use budget_flow::numeric::{fmt_fraction, ratio, uint, Rational, Scalar};
use budget_flow::oracle::exact_opt;
use budget_flow::reductions::{
    fill_order_violation, gflow_to_btp, map_flow_back, map_flow_forward, normalize, random_gflow, random_piecewise, random_split_flow,
    reassemble, split_piecewise, GenFlowInstance, PiecewiseInstance, RationalBtp,
};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const C1_PER_KIND: u64 = 500;
const C1_BUDGET: Duration = Duration::from_secs(120);
const C2_INSTANCES: u64 = 200;
const C2_MAX_DIM: usize = 50;
const C2_BUDGET: Duration = Duration::from_secs(300);
const C3_INSTANCES: u64 = 50;
const C5_TRIALS: usize = 1000;
const C5_MAX_REVOLUTIONS: i64 = 16;
const C6_INSTANCES: u64 = 100;
const C7_PROFILES: u64 = 200;
const C7_MAX_SEGMENTS: usize = 4;
const C8_FLOWS: u64 = 200;
const C8_MAX_NODES: usize = 5;
const MAX_ORACLE_EDGES: usize = 12;

struct Outcome {
    pass: bool,
    /// Reported but does not fail the run.
    soft: bool,
    detail: String,
}

impl Outcome {
    fn hard(pass: bool, detail: String) -> Self {
        Outcome { pass, soft: false, detail }
    }
}

fn epsilons() -> [Rational; 3] {
    [ratio(1, 2), ratio(1, 4), ratio(1, 10)]
}

/// Generates from `spec`, moving to the next seed when no edge was sampled.
fn draw(mut spec: GenSpec) -> ProblemInstance {
    loop {
        match generate(&spec) {
            Ok(inst) => return inst,
            Err(GenError::NoEdges) => spec.seed += 1_000_000,
            Err(e) => panic!("generator rejected the spec: {e}"),
        }
    }
}

fn small_instance(seed: u64, kind: Kind) -> ProblemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=4);
    let m = rng.gen_range(1..=4);
    let density = rng.gen_range(0.3..=1.0);
    let mut spec = GenSpec { max_edges: Some(MAX_ORACLE_EDGES), ..GenSpec::new(seed, n, m, density) };
    if kind == Kind::Bts {
        spec = GenSpec { capacity_prob: 0.6, ..spec.bts() };
    }
    draw(spec)
}

fn gen_flow_recomputed(inst: &ProblemInstance, flows: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut sent = vec![Rational::zero(); inst.n()];
    let mut spent = vec![Rational::zero(); inst.m()];
    for (e, f) in inst.edges.iter().zip(flows) {
        sent[e.src] += f;
        spent[e.dst] += uint(e.price) * f;
    }
    (sent, spent)
}

/// Primal value, dual value and the four gap terms, recomputed from scratch.
struct Recount {
    primal: Rational,
    dual: Rational,
    d: [Rational; 4],
}

fn recount(inst: &ProblemInstance, flows: &[Rational], alpha: &[Rational], beta: &[Rational]) -> Recount {
    let (sent, spent) = gen_flow_recomputed(inst, flows);
    let mut primal = Rational::zero();
    let mut dual = Rational::zero();
    let mut d = [Rational::zero(), Rational::zero(), Rational::zero(), Rational::zero()];
    for (i, a) in inst.supply.iter().enumerate() {
        dual += &alpha[i] * uint(*a);
        d[1] += &alpha[i] * (uint(*a) - &sent[i]);
    }
    for (j, b) in inst.budget.iter().enumerate() {
        dual += &beta[j] * uint(*b);
        d[2] += &beta[j] * (uint(*b) - &spent[j]);
    }
    for (e, f) in inst.edges.iter().zip(flows) {
        let slack = uint(e.profit) - &alpha[e.src] - uint(e.price) * &beta[e.dst];
        let gamma = match e.capacity {
            Some(u) if *f == uint(u) && slack.is_positive() => slack.clone(),
            _ => Rational::zero(),
        };
        if let Some(u) = e.capacity {
            dual += &gamma * uint(u);
            d[3] += &gamma * (uint(u) - f);
        }
        primal += uint(e.profit) * f;
        d[0] += f * (slack - gamma);
    }
    Recount { primal, dual, d }
}

fn duals_feasible(inst: &ProblemInstance, flows: &[Rational], alpha: &[Rational], beta: &[Rational]) -> bool {
    if alpha.iter().chain(beta).any(Signed::is_negative) {
        return false;
    }
    inst.edges.iter().zip(flows).all(|(e, f)| {
        let slack = uint(e.profit) - &alpha[e.src] - uint(e.price) * &beta[e.dst];
        let saturated = e.capacity.is_some_and(|u| *f == uint(u));
        !slack.is_positive() || saturated
    })
}

fn primal_feasible(inst: &ProblemInstance, flows: &[Rational]) -> bool {
    let (sent, spent) = gen_flow_recomputed(inst, flows);
    flows.iter().all(|f| !Signed::is_negative(f))
        && inst.edges.iter().zip(flows).all(|(e, f)| e.capacity.is_none_or(|u| *f <= uint(u)))
        && sent.iter().zip(&inst.supply).all(|(s, a)| *s <= uint(*a))
        && spent.iter().zip(&inst.budget).all(|(s, b)| *s <= uint(*b))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let jobs: Vec<(u64, Kind)> = (0..C1_PER_KIND).map(|s| (s, Kind::Btp)).chain((0..C1_PER_KIND).map(|s| (s, Kind::Bts))).collect();
    let failures: Vec<String> = jobs
        .par_iter()
        .filter_map(|&(seed, kind)| {
            let inst = small_instance(seed, kind);
            let eps = epsilons()[(seed % 3) as usize].clone();
            let sol = match solve(&inst, &SolverConfig::new(eps.clone())) {
                Ok(s) => s,
                Err(e) => return Some(format!("{} seed {seed}: {e}", kind.tag())),
            };
            let opt = match exact_opt(&inst) {
                Ok(o) => o.value,
                Err(e) => return Some(format!("{} seed {seed}: oracle {e}", kind.tag())),
            };
            let primal = inst.profit_of(&sol.flows);
            let ok = sol.terminated && primal_feasible(&inst, &sol.flows) && primal >= (Rational::one() - &eps) * &opt;
            (!ok).then(|| format!("{} seed {seed}: primal {} opt {}", kind.tag(), fmt_fraction(&primal), fmt_fraction(&opt)))
        })
        .collect();
    let took = start.elapsed();
    Outcome::hard(
        failures.is_empty() && took <= C1_BUDGET,
        format!("{} instances, {} failures, {:.1}s (limit {}s){}", jobs.len(), failures.len(), took.as_secs_f64(), C1_BUDGET.as_secs(), first(&failures)),
    )
}

fn first(failures: &[String]) -> String {
    failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let failures: Vec<String> = (0..C2_INSTANCES)
        .into_par_iter()
        .filter_map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(10_000 + seed);
            let n = rng.gen_range(5..=C2_MAX_DIM);
            let m = rng.gen_range(5..=C2_MAX_DIM);
            let density = rng.gen_range(0.05..=0.5);
            let mut spec = GenSpec::new(10_000 + seed, n, m, density);
            if seed % 2 == 1 {
                spec = GenSpec { capacity_prob: 0.5, ..spec.bts() };
            }
            let inst = draw(spec);
            let eps = epsilons()[(seed % 3) as usize].clone();
            let sol = match solve(&inst, &SolverConfig::new(eps.clone())) {
                Ok(s) => s,
                Err(e) => return Some(format!("seed {seed}: {e}")),
            };
            let cert = &sol.certificate;
            let r = recount(&inst, &sol.flows, &sol.duals.alpha, &sol.duals.beta);
            let gap_ok = match &cert.gap_ratio {
                GapRatio::Finite(g) => *g <= eps && (&r.dual - &r.primal) <= &eps * &r.primal,
                GapRatio::Vacuous => r.dual.is_zero(),
                GapRatio::Undefined => false,
            };
            let identity = &r.dual - &r.primal == &r.d[1] + &r.d[2] + &r.d[3] - &r.d[0];
            let matches = r.primal == cert.primal_value
                && r.dual == cert.dual_value
                && [&cert.decomposition.d1, &cert.decomposition.d2, &cert.decomposition.d3, &cert.decomposition.d4].into_iter().eq(r.d.iter())
                && cert.decomposition.holds;
            let ok = sol.terminated && cert.passed && cert.rigorous && gap_ok && identity && matches;
            (!ok).then(|| format!("seed {seed} ({n}x{m}): passed={} gap={} identity={identity} matches={matches}", cert.passed, cert.gap_ratio))
        })
        .collect();
    let took = start.elapsed();
    Outcome::hard(
        failures.is_empty() && took <= C2_BUDGET,
        format!("{C2_INSTANCES} instances up to {C2_MAX_DIM}x{C2_MAX_DIM}, {} failures, {:.1}s (limit {}s){}", failures.len(), took.as_secs_f64(), C2_BUDGET.as_secs(), first(&failures)),
    )
}

fn criterion_3() -> Outcome {
    let mut failures = Vec::new();
    let mut snapshots = 0;
    for seed in 0..C3_INSTANCES {
        let mut rng = ChaCha8Rng::seed_from_u64(20_000 + seed);
        let (n, m) = (rng.gen_range(2..=8), rng.gen_range(2..=8));
        let mut spec = GenSpec::new(20_000 + seed, n, m, 0.6);
        if seed % 2 == 1 {
            spec = GenSpec { capacity_prob: 0.5, ..spec.bts() };
        }
        let inst = draw(spec);
        let eps = epsilons()[(seed % 3) as usize].clone();
        let mut cfg = SolverConfig::new(eps.clone());
        cfg.event_log = true;
        let mut mon = InvariantMonitor::new(&inst, eps);
        let sol = match solve_monitored(&inst, &cfg, Some(&mut mon)) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        snapshots += mon.observed;
        if !mon.is_clean() {
            failures.push(format!("seed {seed}: {}", mon.violations[0]));
        } else if let Err(e) = check_reentry(&sol.events) {
            failures.push(format!("seed {seed}: {e}"));
        } else if mon.observed != sol.stats.iterations {
            failures.push(format!("seed {seed}: {} snapshots for {} iterations", mon.observed, sol.stats.iterations));
        }
    }
    Outcome::hard(failures.is_empty(), format!("{C3_INSTANCES} monitored runs, {snapshots} snapshots, {} failures{}", failures.len(), first(&failures)))
}

/// `max(c/p) / (ε min(c/p))` over edges with positive profit.
fn spread(inst: &ProblemInstance, eps: &Rational) -> Option<Rational> {
    let ratios: Vec<Rational> = inst.edges.iter().filter(|e| e.profit > 0).map(|e| ratio(e.profit as i64, e.price as i64)).collect();
    let max = ratios.iter().max()?;
    let min = ratios.iter().min()?;
    Some(max / (eps * min))
}

/// Smallest `k` with `(1 + ε)^k >= u`, by plain iteration.
fn ceil_log_scan(eps: &Rational, u: &Rational) -> u64 {
    let base = Rational::one() + eps;
    let mut k = 0;
    while Scalar::pow(&base, k) < *u {
        k += 1;
    }
    k
}

fn criterion_4() -> Outcome {
    let mut jobs = Vec::new();
    for seed in 0..60u64 {
        let n = 2 + (seed as usize % 5) * 6;
        let m = 2 + (seed as usize / 5 % 5) * 6;
        let mut spec = GenSpec::new(30_000 + seed, n, m, 0.4);
        if seed % 2 == 1 {
            spec = GenSpec { capacity_prob: 0.5, ..spec.bts() };
        }
        jobs.push((format!("bench-{seed}"), draw(spec)));
    }
    let eps = epsilons();
    let rows = run_bench(&jobs, &eps, 1, NumericMode::ExactRational);
    let mut hard = Vec::new();
    let mut soft = 0;
    let mut worst: f64 = 0.0;
    for (k, row) in rows.iter().enumerate() {
        let inst = &jobs[k / eps.len()].1;
        let e = &eps[k % eps.len()];
        let bound = spread(inst, e).map(|u| inst.m() as u64 * ceil_log_scan(e, &u));
        if row.rise_bound != bound {
            hard.push(format!("{}: rise bound {:?} vs recomputed {bound:?}", row.label, row.rise_bound));
        }
        if !row.hard_ok() {
            hard.push(row.record());
        }
        if row.ops_bound != ops_soft_bound(inst.n(), inst.m()) || !row.ops_ok() {
            soft += 1;
        }
        worst = worst.max(row.ops_per_phase / row.ops_bound);
    }
    Outcome {
        pass: hard.is_empty(),
        soft: false,
        detail: format!(
            "{} bench runs, {} over the rise bound or uncertified; ops/phase soft bound exceeded on {soft} runs (worst ratio {worst:.2}, reported only){}",
            rows.len(),
            hard.len(),
            first(&hard)
        ),
    }
}

fn random_positive(rng: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> Rational {
    ratio(rng.gen_range(1..=max_num), rng.gen_range(1..=max_den))
}

fn random_cycle(rng: &mut ChaCha8Rng) -> CycleModel<Rational> {
    let k = rng.gen_range(1..=4);
    let entry_surplus = random_positive(rng, 12, 3);
    let mut model = CycleModel { entry_surplus, fwd_price: vec![], fwd_room: vec![], back_price: vec![], back_flow: vec![] };
    for _ in 0..k {
        model.fwd_price.push(random_positive(rng, 6, 2));
        model.back_price.push(random_positive(rng, 6, 2));
        model.fwd_room.push(rng.gen_bool(0.8).then(|| random_positive(rng, 60, 2)));
        model.back_flow.push(random_positive(rng, 60, 2));
    }
    model
}

type Sim = (Vec<Rational>, Vec<Rational>, Vec<Rational>, u64);

/// Carries `carry` from `start` along edges `0..len`, clamping by room and by
/// the back flow that can be bought out. Returns the amounts and the first cut.
fn carry_along(m: &CycleModel<Rational>, room: &[Option<Rational>], flow: &[Rational], len: usize, start: Rational) -> (Vec<Rational>, Vec<Rational>, Option<usize>) {
    let mut carry = start;
    let mut fwd = Vec::new();
    let mut back = Vec::new();
    let mut cut = None;
    for l in 0..len {
        let mut x = carry.clone();
        if let Some(r) = &room[l] {
            if *r < x {
                x = r.clone();
            }
        }
        // forward x needs x·p_fwd / p_back units bought out of the back edge
        let mut released = &x * &m.fwd_price[l] / &m.back_price[l];
        if released > flow[l] {
            released = flow[l].clone();
            x = &released * &m.back_price[l] / &m.fwd_price[l];
        }
        if x < carry && cut.is_none() {
            cut = Some(l);
        }
        fwd.push(x);
        back.push(released.clone());
        carry = released;
    }
    (fwd, back, cut)
}

/// Revolution-by-revolution reference for a cycle push.
fn simulate_cycle(m: &CycleModel<Rational>, max_laps: u64) -> Option<Sim> {
    let k = m.fwd_price.len();
    let mut room = m.fwd_room.clone();
    let mut flow = m.back_flow.clone();
    let mut fwd = vec![Rational::zero(); k];
    let mut back = vec![Rational::zero(); k];
    let mut at = vec![Rational::zero(); k];
    at[0] = m.entry_surplus.clone();
    let apply = |room: &mut Vec<Option<Rational>>, flow: &mut Vec<Rational>, fwd: &mut Vec<Rational>, back: &mut Vec<Rational>, at: &mut Vec<Rational>, df: &[Rational], db: &[Rational], wrap: bool| {
        for l in 0..df.len() {
            fwd[l] += &df[l];
            back[l] += &db[l];
            if let Some(r) = &mut room[l] {
                *r -= &df[l];
            }
            flow[l] -= &db[l];
            at[l] -= &df[l];
            let next = if wrap { (l + 1) % k } else { l + 1 };
            at[next] += &db[l];
        }
    };
    for lap in 0..=max_laps {
        let (df, db, cut) = carry_along(m, &room, &flow, k, at[0].clone());
        apply(&mut room, &mut flow, &mut fwd, &mut back, &mut at, &df, &db, true);
        if let Some(c) = cut {
            if c > 0 && at[0].is_positive() {
                let (rf, rb, _) = carry_along(m, &room, &flow, c, at[0].clone());
                apply(&mut room, &mut flow, &mut fwd, &mut back, &mut at, &rf, &rb, false);
            }
            at[0] -= &m.entry_surplus;
            return Some((fwd, back, at, lap));
        }
    }
    None
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(50_000);
    let mut trials = 0;
    let mut drawn = 0;
    let mut failures = Vec::new();
    let mut max_seen = 0;
    while trials < C5_TRIALS && drawn < 200 * C5_TRIALS {
        drawn += 1;
        let model = random_cycle(&mut rng);
        let geo = CycleGeometry::new(&model);
        let RevolutionLimit::Finite(r) = geo.min_limit() else { continue };
        if r + 1 > C5_MAX_REVOLUTIONS {
            continue;
        }
        trials += 1;
        max_seen = max_seen.max(r + 1);
        let bulk = bulk_cycle_push(&model);
        match simulate_cycle(&model, C5_MAX_REVOLUTIONS as u64 + 1) {
            Some((fwd, back, surplus, laps)) => {
                let same = bulk.fwd == fwd && bulk.back == back && bulk.surplus == surplus && bulk.revolutions == Some(laps);
                if !same {
                    failures.push(format!("trial {trials}: bulk {:?} laps {laps}", bulk.revolutions));
                }
            }
            None => failures.push(format!("trial {trials}: simulation did not clamp")),
        }
    }
    Outcome::hard(
        failures.is_empty() && trials == C5_TRIALS,
        format!("{trials} cycles with R_min <= {C5_MAX_REVOLUTIONS} (max {max_seen}), {} mismatches{}", failures.len(), first(&failures)),
    )
}

fn certificate_ok(c: &Certificate) -> bool {
    c.passed && c.rigorous
}

fn criterion_6() -> Outcome {
    let eps = ratio(1, 4);
    let mut failures = Vec::new();
    let mut stalled = Vec::new();
    let mut oracle_sized = 0;
    for seed in 0..C6_INSTANCES {
        let mut rng = ChaCha8Rng::seed_from_u64(60_000 + seed);
        let (n, m) = (rng.gen_range(2..=6), rng.gen_range(2..=6));
        let spec = GenSpec::new(60_000 + seed, n, m, rng.gen_range(0.3..=0.9));
        let inst = draw(spec);
        let cfg = SolverConfig::new(eps.clone());
        let (b, t) = match (basic::run(&inst, &cfg), solve(&inst, &cfg)) {
            (Ok(b), Ok(t)) => (b, t),
            (b, t) => {
                failures.push(format!("seed {seed}: basic {:?} bts {:?}", b.err(), t.err()));
                continue;
            }
        };
        let basic_flows = b.primal.flows_rational();
        let basic_duals = b.dual.to_duals();
        let basic_cert = certify(&inst, &basic_flows, &basic_duals, &eps).expect("flows match the instance");
        let basic_dual = recount(&inst, &basic_flows, &basic_duals.alpha, &basic_duals.beta).dual;
        let bts_dual = recount(&inst, &t.flows, &t.duals.alpha, &t.duals.beta).dual;
        if !certificate_ok(&t.certificate) || !t.terminated {
            failures.push(format!("seed {seed}: bts certificate failed"));
        }
        if !primal_feasible(&inst, &basic_flows) || !duals_feasible(&inst, &basic_flows, &basic_duals.alpha, &basic_duals.beta) {
            failures.push(format!("seed {seed}: basic state infeasible"));
        }
        if b.stalled {
            stalled.push(seed);
        } else if !certificate_ok(&basic_cert) || !b.terminated {
            failures.push(format!("seed {seed}: basic certificate failed"));
        }
        if inst.edges.len() <= MAX_ORACLE_EDGES {
            oracle_sized += 1;
            let opt = exact_opt(&inst).expect("oracle-sized").value;
            if basic_dual < opt || bts_dual < opt {
                failures.push(format!("seed {seed}: dual below OPT {}", fmt_fraction(&opt)));
            }
        }
    }
    // A stalled basic run has no passing certificate, so it counts against the criterion.
    Outcome {
        pass: failures.is_empty() && stalled.is_empty(),
        soft: failures.is_empty(),
        detail: format!(
            "{C6_INSTANCES} shared instances ({oracle_sized} oracle-sized), {} failures, basic auction stalled without terminating on {} {:?}{}",
            failures.len(),
            stalled.len(),
            stalled,
            first(&failures)
        ),
    }
}

/// Piecewise profit of a total flow `f`, segment by segment.
fn piecewise_profit(pw: &PiecewiseInstance, e: usize, f: &Rational) -> Rational {
    let l = uint(pw.seg_len);
    let mut left = f.clone();
    let mut total = Rational::zero();
    for &c in &pw.edges[e].slopes {
        let take = if left < l { left.clone() } else { l.clone() };
        total += ratio(c, 1) * &take;
        left -= take;
    }
    total
}

fn criterion_7() -> Outcome {
    let mut failures = Vec::new();
    for seed in 0..C7_PROFILES {
        let pw = random_piecewise(70_000 + seed, 1 + seed as usize % 4, 1 + seed as usize / 4 % 4, C7_MAX_SEGMENTS);
        let (inst, map) = split_piecewise(&pw).expect("random profiles are concave");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_split_flow(&mut rng, &map, inst.edges.len());
        let g = normalize(&f, &map);
        let split_profit = |x: &[Rational]| -> Rational { inst.edges.iter().zip(x).map(|(e, v)| uint(e.profit) * v).sum() };
        if split_profit(&g) < split_profit(&f) {
            failures.push(format!("seed {seed}: normalize lowered profit"));
            continue;
        }
        // segments of one edge fill in order: a later segment carries flow only if every earlier one is full
        let ordered = map.segments.iter().all(|ids| ids.windows(2).all(|w| g[w[1]].is_zero() || g[w[0]] == uint(map.seg_len)));
        if !ordered || fill_order_violation(&g, &map).is_some() {
            failures.push(format!("seed {seed}: fill order"));
            continue;
        }
        let total = reassemble(&g, &map).expect("normalized flows reassemble");
        let expected: Rational = (0..pw.edges.len()).map(|e| piecewise_profit(&pw, e, &total[e])).sum();
        let sums_match = map.segments.iter().enumerate().all(|(e, ids)| ids.iter().map(|&k| &g[k]).sum::<Rational>() == total[e]);
        if expected != split_profit(&g) || !sums_match || pw.objective(&total) != Some(expected.clone()) {
            failures.push(format!("seed {seed}: reassembled profit {} vs split {}", fmt_fraction(&expected), fmt_fraction(&split_profit(&g))));
        }
    }
    Outcome::hard(failures.is_empty(), format!("{C7_PROFILES} profiles, {} failures{}", failures.len(), first(&failures)))
}

/// Generalized-flow feasibility recomputed node by node.
fn gflow_feasible(g: &GenFlowInstance, flow: &[Rational]) -> bool {
    if flow.len() != g.arcs.len() {
        return false;
    }
    let mut out = vec![Rational::zero(); g.nodes];
    let mut inflow = vec![Rational::zero(); g.nodes];
    for (a, f) in g.arcs.iter().zip(flow) {
        if Signed::is_negative(f) || *f > a.cap {
            return false;
        }
        out[a.from] += f;
        inflow[a.to] += &a.mu * f;
    }
    (0..g.nodes).all(|v| {
        if v == g.source {
            &out[v] - &inflow[v] == g.supply
        } else if v == g.sink {
            &inflow[v] - &out[v] == g.demand
        } else {
            out[v] == inflow[v]
        }
    })
}

/// Equality-constrained BTP feasibility recomputed source by source and sink by sink.
fn btp_feasible(btp: &RationalBtp, flow: &[Rational]) -> bool {
    let mut sent = vec![Rational::zero(); btp.supply.len()];
    let mut spent = vec![Rational::zero(); btp.budget.len()];
    for (e, f) in btp.edges.iter().zip(flow) {
        if Signed::is_negative(f) {
            return false;
        }
        sent[e.src] += f;
        spent[e.dst] += &e.price * f;
    }
    flow.len() == btp.edges.len() && sent == btp.supply && spent == btp.budget
}

fn criterion_8() -> Outcome {
    let mut failures = Vec::new();
    for seed in 0..C8_FLOWS {
        let (g, f) = random_gflow(80_000 + seed, C8_MAX_NODES);
        if !gflow_feasible(&g, &f) {
            failures.push(format!("seed {seed}: generated flow infeasible"));
            continue;
        }
        let (btp, mapper) = gflow_to_btp(&g).expect("generated instances are valid");
        let fwd = map_flow_forward(&g, &f, &mapper).expect("feasible flow maps");
        let cost: Rational = g.arcs.iter().zip(&f).map(|(a, x)| &a.cost * x).sum();
        let mapped_cost: Rational = btp.edges.iter().zip(&fwd).map(|(e, x)| &e.weight * x).sum();
        let back = map_flow_back(&btp, &fwd, &mapper).expect("mapped flow is feasible");
        let back_cost: Rational = g.arcs.iter().zip(&back).map(|(a, x)| &a.cost * x).sum();
        let ok = btp_feasible(&btp, &fwd) && gflow_feasible(&g, &back) && cost == mapped_cost && cost == back_cost && back == f;
        if !ok {
            failures.push(format!("seed {seed}: cost {} mapped {} back {}", fmt_fraction(&cost), fmt_fraction(&mapped_cost), fmt_fraction(&back_cost)));
        }
    }
    Outcome::hard(failures.is_empty(), format!("{C8_FLOWS} flows on digraphs with <= {C8_MAX_NODES} nodes, {} failures{}", failures.len(), first(&failures)))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("approximation vs oracle", criterion_1),
        ("self-certification", criterion_2),
        ("per-iteration feasibility", criterion_3),
        ("complexity counters", criterion_4),
        ("bulk cycle push", criterion_5),
        ("basic vs bts differential", criterion_6),
        ("piecewise reduction", criterion_7),
        ("generalized-flow reduction", criterion_8),
    ];
    let mut fatal = false;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let out = run();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        let note = if !out.pass && out.soft { " [known limitation, not fatal]" } else { "" };
        println!("criterion {} {tag}: {name}: {}{note}", k + 1, out.detail);
        fatal |= !out.pass && !out.soft;
    }
    if fatal {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
