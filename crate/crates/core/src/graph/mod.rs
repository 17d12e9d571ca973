//! Derived graph over the current auction state.
//!
//! Each source points at its preferred sink through its best unsaturated
//! edge. Each sink points back along edges whose flow was assigned at an
//! older price level and may be bought out. `find_path` alternates between
//! the two until it reaches a free endpoint, a cycle, or a sink that must
//! rise first.

mod heap;

use std::collections::BTreeSet;
use std::fmt;

pub use heap::BestSinkHeap;

/// Back-edge sets `B_j`, ordered by `(source, edge)` so the lowest source wins.
#[derive(Debug, Clone, Default)]
pub struct BackSets {
    sets: Vec<BTreeSet<(usize, usize)>>,
    member: Vec<bool>,
}

impl BackSets {
    pub fn new(m: usize, edges: usize) -> Self {
        BackSets { sets: vec![BTreeSet::new(); m], member: vec![false; edges] }
    }

    pub fn contains(&self, e: usize) -> bool {
        self.member[e]
    }

    pub fn insert(&mut self, sink: usize, src: usize, e: usize) -> bool {
        if self.member[e] {
            return false;
        }
        self.member[e] = true;
        self.sets[sink].insert((src, e));
        true
    }

    pub fn remove(&mut self, sink: usize, src: usize, e: usize) -> bool {
        if !self.member[e] {
            return false;
        }
        self.member[e] = false;
        self.sets[sink].remove(&(src, e));
        true
    }

    pub fn len(&self, sink: usize) -> usize {
        self.sets[sink].len()
    }

    pub fn is_empty(&self, sink: usize) -> bool {
        self.sets[sink].is_empty()
    }

    /// Lowest-indexed back edge of `sink`, as `(source, edge)`.
    pub fn first(&self, sink: usize) -> Option<(usize, usize)> {
        self.sets[sink].first().copied()
    }

    pub fn iter(&self, sink: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.sets[sink].iter().copied()
    }
}

/// How a walk through the derived graph ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    /// Last forward edge enters a sink whose price is still zero.
    EndsAtSink,
    /// Last back edge leads to a source with `α = 0`.
    EndsAtSource,
    /// The last source's preferred edge is the only back edge of its sink.
    TwoCycle,
    /// The walk returned to `sources[entry]`.
    Cycle { entry: usize },
    /// The last sink has a positive price and no back edges.
    Blocked,
}

impl PathKind {
    pub fn label(&self) -> &'static str {
        match self {
            PathKind::EndsAtSink | PathKind::EndsAtSource => "type-i",
            PathKind::TwoCycle => "type-ii",
            PathKind::Cycle { .. } => "type-iii",
            PathKind::Blocked => "blocked",
        }
    }
}

/// An alternating walk `i_0 → j_0 → i_1 → j_1 → …`.
///
/// `forward[k]` joins `sources[k]` to `sinks[k]`; `back[k]` joins `sinks[k]`
/// to `sources[k+1]`, or to `sources[entry]` for the closing edge of a cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
    pub forward: Vec<usize>,
    pub back: Vec<usize>,
    pub kind: PathKind,
    pub steps: u64,
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.kind.label())?;
        for (k, &i) in self.sources.iter().enumerate() {
            write!(f, " s{}", i + 1)?;
            if let Some(&j) = self.sinks.get(k) {
                write!(f, " t{}", j + 1)?;
            }
        }
        if let PathKind::Cycle { entry } = self.kind {
            write!(f, " s{}", self.sources[entry] + 1)?;
        }
        Ok(())
    }
}

/// Read-only view of the state needed to walk the derived graph.
pub struct GraphView<'a> {
    pub src: &'a [usize],
    pub dst: &'a [usize],
    pub preferred: &'a [Option<usize>],
    pub back: &'a BackSets,
    /// `α_i > 0`
    pub alpha_positive: &'a dyn Fn(usize) -> bool,
    /// `β_j = 0`
    pub beta_zero: &'a dyn Fn(usize) -> bool,
}

impl GraphView<'_> {
    /// Walks from `start`, which must have `α > 0` and a preferred edge.
    pub fn find_path(&self, start: usize) -> Path {
        let n = self.preferred.len();
        let mut position = vec![usize::MAX; n];
        let mut path = Path { sources: vec![start], sinks: Vec::new(), forward: Vec::new(), back: Vec::new(), kind: PathKind::Blocked, steps: 0 };
        position[start] = 0;
        let mut cur = start;
        loop {
            path.steps += 1;
            let e = self.preferred[cur].expect("source with positive alpha has a preferred edge");
            let j = self.dst[e];
            path.forward.push(e);
            path.sinks.push(j);
            if (self.beta_zero)(j) {
                path.kind = PathKind::EndsAtSink;
                return path;
            }
            let Some((mut next, mut be)) = self.back.first(j) else {
                path.kind = PathKind::Blocked;
                return path;
            };
            if be == e {
                if self.back.len(j) == 1 {
                    path.kind = PathKind::TwoCycle;
                    return path;
                }
                let (i2, e2) = self.back.iter(j).nth(1).expect("second back edge");
                next = i2;
                be = e2;
            }
            path.back.push(be);
            if position[next] != usize::MAX {
                path.kind = PathKind::Cycle { entry: position[next] };
                return path;
            }
            if !(self.alpha_positive)(next) {
                path.sources.push(next);
                path.kind = PathKind::EndsAtSource;
                return path;
            }
            position[next] = path.sources.len();
            path.sources.push(next);
            cur = next;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn view<'a>(src: &'a [usize], dst: &'a [usize], pr: &'a [Option<usize>], back: &'a BackSets, ap: &'a dyn Fn(usize) -> bool, bz: &'a dyn Fn(usize) -> bool) -> GraphView<'a> {
        GraphView { src, dst, preferred: pr, back, alpha_positive: ap, beta_zero: bz }
    }

    #[test]
    fn walks_to_free_sink_and_to_zero_source() {
        // edges: 0:(0,0) 1:(1,0) 2:(1,1)
        let src = [0, 1, 1];
        let dst = [0, 0, 1];
        let pr = [Some(0), Some(2)];
        let mut b = BackSets::new(2, 3);
        b.insert(0, 1, 1);
        let ap = |_: usize| true;
        let bz = |j: usize| j == 1;
        let p = view(&src, &dst, &pr, &b, &ap, &bz).find_path(0);
        assert_eq!(p.kind, PathKind::EndsAtSink);
        assert_eq!(p.sources, vec![0, 1]);
        assert_eq!(p.forward, vec![0, 2]);
        assert_eq!(p.back, vec![1]);
        assert_eq!(p.to_string(), "type-i: s1 t1 s2 t2");

        let ap0 = |i: usize| i == 0;
        let p = view(&src, &dst, &pr, &b, &ap0, &bz).find_path(0);
        assert_eq!(p.kind, PathKind::EndsAtSource);
        assert_eq!(p.sources, vec![0, 1]);
    }

    #[test]
    fn detects_two_cycle_cycle_and_block() {
        let src = [0, 1, 1, 0];
        let dst = [0, 0, 1, 1];
        let pr = [Some(0), Some(2)];
        let ap = |_: usize| true;
        let bz = |_: usize| false;

        let mut b = BackSets::new(2, 4);
        b.insert(0, 0, 0);
        let p = view(&src, &dst, &pr, &b, &ap, &bz).find_path(0);
        assert_eq!(p.kind, PathKind::TwoCycle);

        let mut b = BackSets::new(2, 4);
        b.insert(0, 1, 1);
        b.insert(1, 0, 3);
        let p = view(&src, &dst, &pr, &b, &ap, &bz).find_path(0);
        assert_eq!(p.kind, PathKind::Cycle { entry: 0 });
        assert_eq!(p.back, vec![1, 3]);

        let b = BackSets::new(2, 4);
        let p = view(&src, &dst, &pr, &b, &ap, &bz).find_path(1);
        assert_eq!(p.kind, PathKind::Blocked);
        assert_eq!(p.sinks, vec![1]);
    }

    #[test]
    fn skips_own_edge_when_sink_has_others() {
        let src = [0, 1];
        let dst = [0, 0];
        let pr = [Some(0), None];
        let mut b = BackSets::new(1, 2);
        b.insert(0, 0, 0);
        b.insert(0, 1, 1);
        let ap = |i: usize| i == 0;
        let bz = |_: usize| false;
        let p = view(&src, &dst, &pr, &b, &ap, &bz).find_path(0);
        assert_eq!(p.kind, PathKind::EndsAtSource);
        assert_eq!(p.back, vec![1]);
    }
}
