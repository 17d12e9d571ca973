use super::*;
use crate::basic;
use crate::certify::certify;
use crate::instance::{generate, EdgeSpec, GenSpec, Kind};
use crate::numeric::{int, ratio};
use crate::oracle::exact_opt;
use num_traits::One;

fn btp(supply: Vec<u64>, budget: Vec<u64>, edges: Vec<EdgeSpec>) -> ProblemInstance {
    ProblemInstance { kind: Kind::Btp, supply, budget, edges }
}

fn bts(supply: Vec<u64>, budget: Vec<u64>, edges: Vec<EdgeSpec>) -> ProblemInstance {
    ProblemInstance { kind: Kind::Bts, supply, budget, edges }
}

fn cfg(eps: Rational) -> SolverConfig {
    SolverConfig::new(eps)
}

fn exact(inst: &ProblemInstance, eps: Rational) -> Auction<'_, Rational> {
    Auction::new(inst, &cfg(eps), Tol::exact()).unwrap()
}

#[test]
fn one_by_one_capacity_binds() {
    let inst = bts(vec![5], vec![10], vec![EdgeSpec::new(0, 0, 3, 2).with_capacity(3)]);
    let sol = solve(&inst, &cfg(ratio(1, 4))).unwrap();
    assert!(sol.terminated);
    assert_eq!(sol.flows, vec![int(3)]);
    assert!(sol.certificate.passed, "{:?}", sol.certificate);
    assert_eq!(sol.certificate.gamma, vec![(0, int(3))]);
}

#[test]
fn one_by_one_uncapacitated() {
    let inst = btp(vec![5], vec![10], vec![EdgeSpec::new(0, 0, 3, 2)]);
    let sol = solve(&inst, &cfg(ratio(1, 4))).unwrap();
    assert_eq!(sol.flows, vec![int(5)]);
    assert_eq!(*sol.primal_value(), int(15));
    assert!(sol.certificate.passed);
}

#[test]
fn path_push_through_back_edge() {
    // i1 -> j1 <- i2 -> j2 with s1 = 4, f(i2,j1) = 3, p(i1,j1) = 1, p(i2,j1) = 2.
    let inst = btp(vec![4, 3], vec![6, 100], vec![EdgeSpec::new(0, 0, 10, 1), EdgeSpec::new(1, 0, 10, 2), EdgeSpec::new(1, 1, 10, 1)]);
    let mut primal = PrimalState::<Rational>::zero(&inst);
    primal.flow[1] = int(3);
    primal.surplus[1] = int(0);
    primal.residual[0] = int(0);
    let dual = DualState { alpha: vec![int(9), int(8)], beta: vec![int(1), int(0)], beta_prime: vec![int(0), int(0)], y: vec![int(0), int(0), int(0)] };
    let mut a = Auction::from_state(&inst, &cfg(ratio(1, 4)), Tol::exact(), primal, dual).unwrap();
    let path = Path { sources: vec![0, 1], sinks: vec![0, 1], forward: vec![0, 2], back: vec![1], kind: PathKind::EndsAtSink, steps: 2 };
    let rep = a.push_flow_path(&path);
    assert_eq!(a.primal.flow, vec![int(4), int(1), int(2)]);
    assert_eq!(rep.consumed, int(4));
    assert!(a.primal.surplus.iter().all(Zero::is_zero));
    // intermediate sink budget is unchanged
    assert_eq!(a.primal.residual[0], int(0));
    assert_eq!(a.primal.residual[1], int(98));
}

#[test]
fn path_push_forward_cap() {
    let inst = bts(vec![4], vec![100], vec![EdgeSpec::new(0, 0, 10, 1).with_capacity(1)]);
    let mut a = exact(&inst, ratio(1, 4));
    let path = a.find_path(0);
    assert_eq!(path.kind, PathKind::EndsAtSink);
    let rep = a.push_flow_path(&path);
    assert_eq!(rep.consumed, int(1));
    assert_eq!(rep.saturated, vec![0]);
    assert_eq!(a.primal.surplus[0], int(3));
    assert!(a.dual.alpha[0].is_zero());
}

#[test]
fn revolution_limit_examples() {
    assert_eq!(revolution_limit(&int(1), &ratio(19, 10), &ratio(1, 2)), RevolutionLimit::Finite(3));
    assert_eq!(revolution_limit(&int(1), &int(2), &ratio(1, 2)), RevolutionLimit::Unbounded);
    assert_eq!(revolution_limit(&int(1), &ratio(5, 2), &int(1)), RevolutionLimit::Finite(1));
    assert_eq!(revolution_limit(&int(1), &ratio(1, 2), &int(1)), RevolutionLimit::Finite(-1));
}

#[test]
fn beta_rise_example() {
    let inst = btp(vec![5], vec![1], vec![EdgeSpec::new(0, 0, 10, 1)]);
    let mut primal = PrimalState::<Rational>::zero(&inst);
    primal.flow[0] = int(1);
    primal.surplus[0] = int(4);
    primal.residual[0] = int(0);
    let dual = DualState { alpha: vec![int(9)], beta: vec![int(1)], beta_prime: vec![int(0)], y: vec![int(1)] };
    let mut a = Auction::from_state(&inst, &cfg(ratio(1, 10)), Tol::exact(), primal, dual).unwrap();
    assert_eq!(a.update_beta(0), BetaChange::Raised);
    assert_eq!(a.dual.beta[0], ratio(11, 10));
    assert_eq!(a.dual.beta_prime[0], int(1));
    // the in-edge is now below the current level, so no further rise
    assert_eq!(a.back_edges(0), vec![0]);
    assert_eq!(a.update_beta(0), BetaChange::None);
}

#[test]
fn saturated_edge_released_by_rise() {
    // alpha = 9 comes from the edge to sink 1.
    let inst = bts(vec![5], vec![2, 50], vec![EdgeSpec::new(0, 0, 10, 2).with_capacity(1), EdgeSpec::new(0, 1, 9, 1)]);
    let mut primal = PrimalState::<Rational>::zero(&inst);
    primal.flow[0] = int(1);
    primal.surplus[0] = int(4);
    primal.residual[0] = int(0);
    let dual = DualState { alpha: vec![int(9)], beta: vec![ratio(1, 2), int(0)], beta_prime: vec![int(0), int(0)], y: vec![ratio(1, 2), int(0)] };
    let mut a = Auction::from_state(&inst, &cfg(ratio(1, 10)), Tol::exact(), primal, dual).unwrap();
    assert!(a.protected(0));
    assert!(a.back_edges(0).is_empty());
    assert_eq!(a.update_beta(0), BetaChange::Raised);
    assert_eq!(a.dual.beta[0], ratio(11, 20));
    assert_eq!(a.key(0) - &a.dual.alpha[0], ratio(-1, 10));
    assert!(!a.protected(0));
    assert_eq!(a.back_edges(0), vec![0]);
    assert_eq!(a.dual.y[0], ratio(1, 2));
    assert_eq!(a.stats.releases, 1);
}

#[test]
fn activation_uses_min_ratio() {
    let inst = btp(vec![10, 10, 10], vec![1], vec![EdgeSpec::new(0, 0, 10, 2), EdgeSpec::new(1, 0, 6, 3), EdgeSpec::new(2, 0, 0, 1)]);
    let mut primal = PrimalState::<Rational>::zero(&inst);
    primal.residual[0] = int(0);
    let dual = DualState { alpha: vec![int(10), int(6), int(0)], beta: vec![int(0)], beta_prime: vec![int(0)], y: vec![int(0); 3] };
    let mut a = Auction::from_state(&inst, &cfg(ratio(1, 10)), Tol::exact(), primal, dual).unwrap();
    assert_eq!(a.update_beta(0), BetaChange::Activated);
    assert_eq!(a.dual.beta[0], ratio(1, 5));
    assert_eq!(a.stats.beta_activations, 1);
    assert_eq!(a.stats.total_beta_rises(), 0);
}

#[test]
fn heap_keys_match_recomputation() {
    let spec = GenSpec { capacity_prob: 0.5, ..GenSpec::new(11, 4, 4, 0.8).bts() };
    let inst = generate(&spec).unwrap();
    let mut a = exact(&inst, ratio(1, 5));
    while a.step().is_some() {
        for e in 0..inst.edges.len() {
            match a.heap_key(e) {
                Some(k) => assert_eq!(*k, a.key(e)),
                None => assert!(a.saturated(e)),
            }
        }
        for i in 0..inst.n() {
            let best = inst.adjacency().out[i].iter().copied().filter(|&e| !a.saturated(e)).map(|e| a.key(e)).max();
            let expect = best.map_or_else(Rational::zero, |k| if k > Rational::zero() { k } else { Rational::zero() });
            assert_eq!(a.dual.alpha[i], expect);
        }
    }
}

#[test]
fn matches_basic_auction_verdict() {
    for seed in 0..20 {
        let inst = generate(&GenSpec::new(seed, 3, 4, 0.7)).unwrap();
        for eps in [ratio(1, 2), ratio(1, 4)] {
            let sol = solve(&inst, &cfg(eps.clone())).unwrap();
            assert!(sol.terminated, "seed {seed}");
            assert!(sol.certificate.passed, "seed {seed}: {:?}", sol.certificate);
            let base = basic::run(&inst, &cfg(eps.clone())).unwrap();
            if base.terminated {
                let bc = certify(&inst, &base.primal.flow, &base.dual.to_duals(), &eps).unwrap();
                assert!(bc.passed, "seed {seed}");
            }
        }
    }
}

#[test]
fn random_bts_within_factor_of_oracle() {
    for seed in 0..40 {
        let spec = GenSpec { capacity_prob: 0.6, max_edges: Some(9), ..GenSpec::new(seed, 3, 3, 0.9).bts() };
        let inst = generate(&spec).unwrap();
        let eps = ratio(1, 4);
        let sol = solve(&inst, &cfg(eps.clone())).unwrap();
        assert!(sol.terminated, "seed {seed}");
        assert!(sol.certificate.passed, "seed {seed}: {:?}", sol.certificate);
        let opt = exact_opt(&inst).unwrap().value;
        assert!(*sol.primal_value() >= (Rational::one() - &eps) * &opt, "seed {seed}");
        assert!(*sol.primal_value() <= opt && opt <= *sol.dual_value(), "seed {seed}");
    }
}

#[test]
fn float_mode_agrees_with_exact() {
    for seed in 0..10 {
        let spec = GenSpec { capacity_prob: 0.5, ..GenSpec::new(seed, 5, 5, 0.6).bts() };
        let inst = generate(&spec).unwrap();
        let eps = ratio(1, 5);
        let mut fc = cfg(eps.clone());
        fc.numeric_mode = NumericMode::Float64 { eta: 1e-9 };
        let fs = solve(&inst, &fc).unwrap();
        assert!(fs.terminated);
        assert!(!fs.certificate.rigorous);
        assert!(fs.certificate.passed, "seed {seed}: {:?}", fs.certificate);
    }
}

#[test]
fn event_log_records_rises() {
    let inst = btp(vec![10, 10], vec![10], vec![EdgeSpec::new(0, 0, 2, 1), EdgeSpec::new(1, 0, 5, 2)]);
    let mut c = cfg(ratio(1, 4));
    c.event_log = true;
    let sol = solve(&inst, &c).unwrap();
    assert!(sol.events.iter().any(|l| l.starts_with("activate 1")));
    assert!(sol.events.iter().any(|l| l.starts_with("back+")));
}

#[test]
fn max_phases_reports_non_termination() {
    let inst = btp(vec![10, 10], vec![10], vec![EdgeSpec::new(0, 0, 2, 1), EdgeSpec::new(1, 0, 5, 2)]);
    let mut c = cfg(ratio(1, 10));
    c.max_phases = Some(1);
    let sol = solve(&inst, &c).unwrap();
    assert!(!sol.terminated);
    assert_eq!(sol.abort, Some(Abort::MaxPhases));
}
