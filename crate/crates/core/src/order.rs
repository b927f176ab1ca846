//! Comparison of Left dead ends, good options and canonical forms.
//!
//! `G ≥ H` holds exactly when either both are `0`, or `G` is non-zero and
//! every Right option of `G` is `≥` some Right option of `H`. The relation
//! does not depend on the universe, so this test is the whole decision
//! procedure. All recursions here run on explicit stacks.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::engine::{pair_key, unordered_key, Engine};
use crate::store::EndId;

struct GeFrame {
    g: EndId,
    h: EndId,
    i: usize,
    j: usize,
}

impl Engine {
    fn ge_known(&self, g: EndId, h: EndId) -> Option<bool> {
        if g.is_zero() {
            return Some(h.is_zero());
        }
        if h.is_zero() {
            return Some(false);
        }
        if self.prune {
            if g == h {
                return Some(true);
            }
            if !self.facts(g).terminal.is_subset(&self.facts(h).terminal) {
                return Some(false);
            }
        }
        self.ge_memo.get(&pair_key(g, h)).copied()
    }

    /// `g ≥ h`.
    pub fn ge(&mut self, g: EndId, h: EndId) -> bool {
        if let Some(r) = self.ge_known(g, h) {
            return r;
        }
        let mut stack = vec![GeFrame { g, h, i: 0, j: 0 }];
        loop {
            let top = stack.last_mut().unwrap();
            let gs = self.store.options(top.g);
            let hs = self.store.options(top.h);
            let verdict = if top.i == gs.len() {
                true
            } else if top.j == hs.len() {
                false
            } else {
                let (x, y) = (gs[top.i], hs[top.j]);
                match self.ge_known(x, y) {
                    Some(true) => {
                        top.i += 1;
                        top.j = 0;
                    }
                    Some(false) => top.j += 1,
                    None => stack.push(GeFrame {
                        g: x,
                        h: y,
                        i: 0,
                        j: 0,
                    }),
                }
                continue;
            };
            let done = stack.pop().unwrap();
            self.ge_memo.insert(pair_key(done.g, done.h), verdict);
            if stack.is_empty() {
                return verdict;
            }
        }
    }

    pub fn le(&mut self, g: EndId, h: EndId) -> bool {
        self.ge(h, g)
    }

    /// `g > h`.
    pub fn gt(&mut self, g: EndId, h: EndId) -> bool {
        self.ge(g, h) && !self.ge(h, g)
    }

    pub fn eq(&mut self, g: EndId, h: EndId) -> bool {
        self.ge(g, h) && self.ge(h, g)
    }

    /// `Some(ordering)` when comparable, `None` when incomparable.
    pub fn compare(&mut self, g: EndId, h: EndId) -> Option<Ordering> {
        match (self.ge(g, h), self.ge(h, g)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Greater),
            (false, true) => Some(Ordering::Less),
            (false, false) => None,
        }
    }

    /// Options of `g` not strictly dominated by another option, in id order.
    pub fn good_options(&mut self, g: EndId) -> Arc<[EndId]> {
        if let Some(good) = self.good_memo.get(&g) {
            return good.clone();
        }
        let options = self.options(g).to_vec();
        let mut good = Vec::with_capacity(options.len());
        for &x in &options {
            let dominated = options.iter().any(|&y| y != x && self.gt(x, y));
            if !dominated {
                good.push(x);
            }
        }
        let good: Arc<[EndId]> = good.into();
        self.good_memo.insert(g, good.clone());
        good
    }

    /// Removes dominated options from a list of canonical forms; of two equal
    /// options the smaller id is kept.
    fn undominated(&mut self, mut options: Vec<EndId>) -> Vec<EndId> {
        options.sort_unstable();
        options.dedup();
        let mut keep = Vec::with_capacity(options.len());
        'outer: for &x in &options {
            for &y in &options {
                if y != x && self.ge(x, y) && (!self.ge(y, x) || y < x) {
                    continue 'outer;
                }
            }
            keep.push(x);
        }
        keep
    }

    /// Interns `{·| options}` after removing dominated options. The options
    /// must already be canonical; the result then is canonical too.
    pub(crate) fn canonical_node(&mut self, options: Vec<EndId>) -> EndId {
        let keep = self.undominated(options);
        let c = self.intern_sorted(keep);
        self.canon_memo.insert(c, c);
        c
    }

    /// The canonical form of `g`: the unique form equal to `g` in which every
    /// subposition has pairwise incomparable options.
    pub fn canonical(&mut self, g: EndId) -> EndId {
        if let Some(&c) = self.canon_memo.get(&g) {
            return c;
        }
        let mut stack = vec![g];
        while let Some(&x) = stack.last() {
            if self.canon_memo.contains_key(&x) {
                stack.pop();
                continue;
            }
            let missing: Vec<EndId> = self
                .options(x)
                .iter()
                .copied()
                .filter(|o| !self.canon_memo.contains_key(o))
                .collect();
            if !missing.is_empty() {
                stack.extend(missing);
                continue;
            }
            let options: Vec<EndId> = self.options(x).iter().map(|o| self.canon_memo[o]).collect();
            let c = self.canonical_node(options);
            self.canon_memo.insert(x, c);
            stack.pop();
        }
        self.canon_memo[&g]
    }

    pub fn is_canonical(&mut self, g: EndId) -> bool {
        self.canonical(g) == g
    }

    fn canon_sum_lookup(&self, a: EndId, b: EndId) -> Option<EndId> {
        if a.is_zero() {
            Some(b)
        } else if b.is_zero() {
            Some(a)
        } else {
            self.canon_sum_memo.get(&unordered_key(a, b)).copied()
        }
    }

    /// The canonical form of `a + b`, built without materialising the full
    /// sum form: each option `a' + b` / `a + b'` is itself reduced first.
    pub fn sum_canonical(&mut self, a: EndId, b: EndId) -> EndId {
        let a = self.canonical(a);
        let b = self.canonical(b);
        if let Some(s) = self.canon_sum_lookup(a, b) {
            return s;
        }
        let mut stack = vec![(a, b)];
        while let Some(&(x, y)) = stack.last() {
            if self.canon_sum_lookup(x, y).is_some() {
                stack.pop();
                continue;
            }
            let mut options = Vec::new();
            let mut ready = true;
            let xs = self.options(x).to_vec();
            let ys = self.options(y).to_vec();
            for (x1, y1) in xs.iter().map(|&x1| (x1, y)).chain(ys.iter().map(|&y1| (x, y1))) {
                match self.canon_sum_lookup(x1, y1) {
                    Some(s) => options.push(s),
                    None => {
                        ready = false;
                        stack.push((x1, y1));
                    }
                }
            }
            if ready {
                let s = self.canonical_node(options);
                self.canon_sum_memo.insert(unordered_key(x, y), s);
                stack.pop();
            }
        }
        self.canon_sum_lookup(a, b).unwrap()
    }

    /// Canonical `n·g`.
    pub fn multiple_canonical(&mut self, n: u32, g: EndId) -> EndId {
        let mut acc = EndId::ZERO;
        for _ in 0..n {
            acc = self.sum_canonical(acc, g);
        }
        acc
    }
}
