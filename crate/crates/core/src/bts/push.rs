//! Flow arithmetic for pushes along alternating paths and cycles.
//!
//! These functions only see arrays of prices, residual capacities and back
//! flows, so they can be checked in isolation against a naive simulation.

use crate::numeric::{min_s, Scalar};

/// An alternating path as seen by a push.
///
/// Forward edge `k` leaves source `k`; back edge `k` returns to source `k+1`.
/// With `tail_budget` set the path ends on a free sink and has one more
/// forward edge than back edges.
#[derive(Debug, Clone)]
pub struct PathModel<S> {
    pub start_surplus: S,
    pub fwd_price: Vec<S>,
    /// `u − f`, `None` when uncapacitated.
    pub fwd_room: Vec<Option<S>>,
    pub back_price: Vec<S>,
    pub back_flow: Vec<S>,
    /// Remaining budget of the terminal sink.
    pub tail_budget: Option<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathDelta<S> {
    /// Flow added on each forward edge.
    pub fwd: Vec<S>,
    /// Flow removed from each back edge.
    pub back: Vec<S>,
    /// First position where the carried amount was cut.
    pub first_clamp: Option<usize>,
}

impl<S: Scalar> PathDelta<S> {
    /// Net surplus change at every path source (`back.len() + 1` entries).
    pub fn surplus_change(&self) -> Vec<S> {
        let k = self.back.len();
        let mut out = vec![S::zero(); k + 1];
        for (l, x) in self.fwd.iter().enumerate() {
            if l <= k {
                out[l] -= x;
            }
        }
        for (l, x) in self.back.iter().enumerate() {
            out[l + 1] += x;
        }
        out
    }
}

/// Pushes the start surplus as far along the path as it goes.
pub fn push_along<S: Scalar>(model: &PathModel<S>) -> PathDelta<S> {
    let k = model.back_flow.len();
    let mut fwd = Vec::with_capacity(k + 1);
    let mut back = Vec::with_capacity(k);
    let mut first_clamp = None;
    let mut carry = model.start_surplus.clone();
    for l in 0..k {
        let mut amount = carry.clone();
        if let Some(room) = &model.fwd_room[l] {
            if *room < amount {
                amount = room.clone();
            }
        }
        let buyout = model.back_flow[l].clone() * &model.back_price[l] / &model.fwd_price[l];
        let by_back = buyout < amount;
        if by_back {
            amount = buyout;
        }
        if amount < carry && first_clamp.is_none() {
            first_clamp = Some(l);
        }
        let released = if by_back { model.back_flow[l].clone() } else { amount.clone() * &model.fwd_price[l] / &model.back_price[l] };
        fwd.push(amount);
        back.push(released.clone());
        carry = released;
    }
    if let Some(budget) = &model.tail_budget {
        let mut amount = carry.clone();
        if let Some(room) = &model.fwd_room[k] {
            amount = min_s(amount, room.clone());
        }
        amount = min_s(amount, budget.clone() / &model.fwd_price[k]);
        if amount < carry && first_clamp.is_none() {
            first_clamp = Some(k);
        }
        fwd.push(amount);
    }
    PathDelta { fwd, back, first_clamp }
}

/// Revolutions an edge tolerates before it saturates or empties.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum RevolutionLimit {
    /// Largest `r` such that `r + 1` full revolutions fit; `-1` if none do.
    Finite(i64),
    /// The geometric total never reaches the edge's limit.
    Unbounded,
}

/// Cycle `i_0 → j_0 → i_1 → … → j_{K-1} → i_0` with surplus at `i_0`.
#[derive(Debug, Clone)]
pub struct CycleModel<S> {
    pub entry_surplus: S,
    pub fwd_price: Vec<S>,
    pub fwd_room: Vec<Option<S>>,
    pub back_price: Vec<S>,
    pub back_flow: Vec<S>,
}

/// Per-edge ratios of a cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleGeometry<S> {
    /// `ρ_l = p(forward_l) / p(back_l)`
    pub rho: Vec<S>,
    /// Product of `ρ` over positions before `l`.
    pub rho_before: Vec<S>,
    /// Product of `ρ` over positions up to and including `l`.
    pub rho_through: Vec<S>,
    /// Gain of one revolution.
    pub q: S,
    pub fwd_limit: Vec<RevolutionLimit>,
    pub back_limit: Vec<RevolutionLimit>,
}

impl<S: Scalar> CycleGeometry<S> {
    pub fn new(model: &CycleModel<S>) -> Self {
        let k = model.fwd_price.len();
        let rho: Vec<S> = (0..k).map(|l| model.fwd_price[l].clone() / &model.back_price[l]).collect();
        let mut rho_before = Vec::with_capacity(k);
        let mut rho_through = Vec::with_capacity(k);
        let mut acc = S::one();
        for r in &rho {
            rho_before.push(acc.clone());
            acc *= r;
            rho_through.push(acc.clone());
        }
        let q = acc;
        let s = &model.entry_surplus;
        let fwd_limit = (0..k)
            .map(|l| match &model.fwd_room[l] {
                None => RevolutionLimit::Unbounded,
                Some(room) => revolution_limit(&(s.clone() * &rho_before[l]), room, &q),
            })
            .collect();
        let back_limit = (0..k).map(|l| revolution_limit(&(s.clone() * &rho_through[l]), &model.back_flow[l], &q)).collect();
        CycleGeometry { rho, rho_before, rho_through, q, fwd_limit, back_limit }
    }

    pub fn min_limit(&self) -> RevolutionLimit {
        self.fwd_limit.iter().chain(&self.back_limit).min().cloned().unwrap_or(RevolutionLimit::Unbounded)
    }
}

/// Largest `r` with `a·(1 + q + … + q^r) <= cap`.
pub fn revolution_limit<S: Scalar>(a: &S, cap: &S, q: &S) -> RevolutionLimit {
    if !(*a > S::zero()) {
        return RevolutionLimit::Unbounded;
    }
    let one = S::one();
    if *q == one {
        let n = (cap.clone() / a).floor_u64();
        return RevolutionLimit::Finite(n.min(i64::MAX as u64) as i64 - 1);
    }
    if *q < one {
        let denom = one.clone() - q;
        if a.clone() / &denom <= *cap {
            return RevolutionLimit::Unbounded;
        }
        // q^n >= 1 − cap(1−q)/a  <=>  (1/q)^n <= 1 / (1 − cap(1−q)/a)
        let t = one.clone() - cap.clone() * &denom / a;
        let n = max_pow_le(&(one.clone() / q), &(one / &t));
        return RevolutionLimit::Finite(n as i64 - 1);
    }
    let bound = one.clone() + cap.clone() * &(q.clone() - &one) / a;
    let n = max_pow_le(q, &bound);
    RevolutionLimit::Finite(n as i64 - 1)
}

/// Largest `n >= 0` with `base^n <= bound`, for `base > 1` and `bound >= 1`.
///
/// Repeated squaring followed by a binary descent, so no logarithms are used.
pub fn max_pow_le<S: Scalar>(base: &S, bound: &S) -> u64 {
    let mut powers = vec![base.clone()];
    while powers.last().expect("nonempty") <= bound && powers.len() < 63 {
        let last = powers.last().expect("nonempty").clone();
        powers.push(last.clone() * &last);
    }
    let mut n = 0u64;
    let mut acc = S::one();
    for k in (0..powers.len()).rev() {
        let cand = acc.clone() * &powers[k];
        if cand <= *bound {
            acc = cand;
            n += 1u64 << k;
        }
    }
    n
}

/// Result of pushing around a cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleDelta<S> {
    pub fwd: Vec<S>,
    pub back: Vec<S>,
    /// Net surplus change at each cycle source, entry first.
    pub surplus: Vec<S>,
    /// Number of full revolutions applied in bulk; `None` when unbounded.
    pub revolutions: Option<u64>,
    pub geometry: CycleGeometry<S>,
}

/// `1 + q + … + q^{n−1}`
fn geometric_sum<S: Scalar>(q: &S, n: u64) -> S {
    if *q == S::one() {
        S::from_u64(n)
    } else {
        (S::one() - q.pow(n)) / (S::one() - q)
    }
}

/// Applies as many full revolutions as fit, then one clamped revolution,
/// then relays whatever is left at the entry to the first clamped source.
pub fn bulk_cycle_push<S: Scalar>(model: &CycleModel<S>) -> CycleDelta<S> {
    let k = model.fwd_price.len();
    let geometry = CycleGeometry::new(model);
    let s = model.entry_surplus.clone();
    if !(s > S::zero()) {
        return CycleDelta { fwd: vec![S::zero(); k], back: vec![S::zero(); k], surplus: vec![S::zero(); k], revolutions: Some(0), geometry };
    }
    let (total, revolutions, entry_left) = match geometry.min_limit() {
        RevolutionLimit::Unbounded => (S::one() / (S::one() - &geometry.q), None, S::zero()),
        RevolutionLimit::Finite(r) => {
            let n = (r + 1) as u64;
            (geometric_sum(&geometry.q, n), Some(n), s.clone() * &geometry.q.pow(n))
        }
    };
    let mut fwd: Vec<S> = (0..k).map(|l| s.clone() * &geometry.rho_before[l] * &total).collect();
    let mut back: Vec<S> = (0..k).map(|l| s.clone() * &geometry.rho_through[l] * &total).collect();
    // Every interior source passes on exactly what it receives.
    let mut surplus = vec![S::zero(); k];
    surplus[0] = entry_left.clone() - &s;

    if revolutions.is_some() && entry_left > S::zero() {
        let room = |l: usize| model.fwd_room[l].as_ref().map(|u| u.clone() - &fwd[l]);
        let lap = PathModel {
            start_surplus: entry_left.clone(),
            fwd_price: model.fwd_price.clone(),
            fwd_room: (0..k).map(room).collect(),
            back_price: model.back_price.clone(),
            back_flow: (0..k).map(|l| model.back_flow[l].clone() - &back[l]).collect(),
            tail_budget: None,
        };
        let d = push_along(&lap);
        for l in 0..k {
            fwd[l] += &d.fwd[l];
            back[l] += &d.back[l];
            surplus[l] -= &d.fwd[l];
            surplus[(l + 1) % k] += &d.back[l];
        }
        if let Some(c) = d.first_clamp.filter(|&c| c > 0) {
            let entry_now = entry_left - &d.fwd[0] + &d.back[k - 1];
            if entry_now > S::zero() {
                let relay = PathModel {
                    start_surplus: entry_now,
                    fwd_price: model.fwd_price[..c].to_vec(),
                    fwd_room: (0..c).map(|l| model.fwd_room[l].as_ref().map(|u| u.clone() - &fwd[l])).collect(),
                    back_price: model.back_price[..c].to_vec(),
                    back_flow: (0..c).map(|l| model.back_flow[l].clone() - &back[l]).collect(),
                    tail_budget: None,
                };
                let r = push_along(&relay);
                for l in 0..c {
                    fwd[l] += &r.fwd[l];
                    back[l] += &r.back[l];
                    surplus[l] -= &r.fwd[l];
                    surplus[l + 1] += &r.back[l];
                }
            }
        }
    }
    CycleDelta { fwd, back, surplus, revolutions, geometry }
}
