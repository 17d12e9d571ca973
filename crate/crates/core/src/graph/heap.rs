use crate::numeric::Scalar;

const ABSENT: usize = usize::MAX;

/// Per-source max-heaps over unsaturated edges keyed by `c − pβ`.
///
/// Every edge belongs to the heap of its source; ties go to the lower sink
/// index. Positions are tracked per edge so keys can be changed in place.
#[derive(Debug, Clone)]
pub struct BestSinkHeap<S> {
    heaps: Vec<Vec<usize>>,
    pos: Vec<usize>,
    keys: Vec<S>,
    owner: Vec<usize>,
    sink: Vec<usize>,
    pub updates: u64,
}

impl<S: Scalar> BestSinkHeap<S> {
    /// `owner[e]` and `sink[e]` give each edge's source and sink.
    pub fn new(n: usize, owner: Vec<usize>, sink: Vec<usize>) -> Self {
        let e = owner.len();
        BestSinkHeap { heaps: vec![Vec::new(); n], pos: vec![ABSENT; e], keys: vec![S::zero(); e], owner, sink, updates: 0 }
    }

    pub fn contains(&self, e: usize) -> bool {
        self.pos[e] != ABSENT
    }

    pub fn key(&self, e: usize) -> &S {
        &self.keys[e]
    }

    pub fn top(&self, i: usize) -> Option<usize> {
        self.heaps[i].first().copied()
    }

    pub fn len(&self, i: usize) -> usize {
        self.heaps[i].len()
    }

    pub fn edges(&self, i: usize) -> &[usize] {
        &self.heaps[i]
    }

    fn above(&self, a: usize, b: usize) -> bool {
        self.keys[a] > self.keys[b] || (self.keys[a] == self.keys[b] && self.sink[a] < self.sink[b]) || (self.keys[a] == self.keys[b] && self.sink[a] == self.sink[b] && a < b)
    }

    pub fn insert(&mut self, e: usize, key: S) {
        debug_assert!(!self.contains(e));
        self.updates += 1;
        self.keys[e] = key;
        let h = self.owner[e];
        self.heaps[h].push(e);
        let at = self.heaps[h].len() - 1;
        self.pos[e] = at;
        self.sift_up(h, at);
    }

    pub fn remove(&mut self, e: usize) {
        let at = self.pos[e];
        debug_assert!(at != ABSENT);
        self.updates += 1;
        let h = self.owner[e];
        let last = self.heaps[h].len() - 1;
        self.swap(h, at, last);
        self.heaps[h].pop();
        self.pos[e] = ABSENT;
        if at < self.heaps[h].len() {
            self.sift_up(h, at);
            self.sift_down(h, at);
        }
    }

    pub fn update(&mut self, e: usize, key: S) {
        let at = self.pos[e];
        debug_assert!(at != ABSENT);
        if self.keys[e] == key {
            return;
        }
        self.updates += 1;
        self.keys[e] = key;
        let h = self.owner[e];
        self.sift_up(h, at);
        self.sift_down(h, self.pos[e]);
    }

    fn swap(&mut self, h: usize, a: usize, b: usize) {
        self.heaps[h].swap(a, b);
        let (ea, eb) = (self.heaps[h][a], self.heaps[h][b]);
        self.pos[ea] = a;
        self.pos[eb] = b;
    }

    fn sift_up(&mut self, h: usize, mut at: usize) {
        while at > 0 {
            let parent = (at - 1) / 2;
            if self.above(self.heaps[h][at], self.heaps[h][parent]) {
                self.swap(h, at, parent);
                at = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, h: usize, mut at: usize) {
        let len = self.heaps[h].len();
        loop {
            let (l, r) = (2 * at + 1, 2 * at + 2);
            let mut best = at;
            if l < len && self.above(self.heaps[h][l], self.heaps[h][best]) {
                best = l;
            }
            if r < len && self.above(self.heaps[h][r], self.heaps[h][best]) {
                best = r;
            }
            if best == at {
                break;
            }
            self.swap(h, at, best);
            at = best;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, Rational};
    use proptest::prelude::*;

    #[test]
    fn tie_goes_to_lower_sink() {
        let mut h = BestSinkHeap::<Rational>::new(1, vec![0, 0, 0], vec![3, 1, 2]);
        h.insert(0, int(5));
        h.insert(1, int(5));
        h.insert(2, int(4));
        assert_eq!(h.top(0), Some(1));
        h.remove(1);
        assert_eq!(h.top(0), Some(0));
        h.update(2, int(6));
        assert_eq!(h.top(0), Some(2));
    }

    proptest! {
        #[test]
        fn matches_linear_scan(ops in proptest::collection::vec((0usize..8, -20i64..20, 0u8..3), 1..60)) {
            let sinks: Vec<usize> = (0..8).map(|e| (e * 5) % 8).collect();
            let mut h = BestSinkHeap::<Rational>::new(1, vec![0; 8], sinks.clone());
            let mut model: Vec<Option<i64>> = vec![None; 8];
            for (e, k, op) in ops {
                match (op, model[e]) {
                    (0, None) => { h.insert(e, int(k)); model[e] = Some(k); }
                    (1, Some(_)) => { h.remove(e); model[e] = None; }
                    (_, Some(_)) => { h.update(e, int(k)); model[e] = Some(k); }
                    _ => {}
                }
                let expect = (0..8).filter_map(|e| model[e].map(|k| (k, std::cmp::Reverse(sinks[e]), std::cmp::Reverse(e)))).max().map(|t| t.2 .0);
                prop_assert_eq!(h.top(0), expect);
            }
        }
    }
}
