//! Named families and the disjunctive sum.

use crate::engine::{unordered_key, Engine};
use crate::store::EndId;

impl Engine {
    /// The integer `n̄ = {·| n-1}`, with `0̄ = 0`.
    pub fn integer(&mut self, n: u32) -> EndId {
        while self.integers.len() <= n as usize {
            let prev = *self.integers.last().unwrap();
            let next = self.intern_sorted(vec![prev]);
            self.integers.push(next);
        }
        self.integers[n as usize]
    }

    /// The waiting game `W_n = {·| 0, W_{n-1}}`, with `W_0 = 0`.
    pub fn waiting(&mut self, n: u32) -> EndId {
        while self.waitings.len() <= n as usize {
            let prev = *self.waitings.last().unwrap();
            let next = self.intern_unsorted(vec![EndId::ZERO, prev]);
            self.waitings.push(next);
        }
        self.waitings[n as usize]
    }

    /// If `g` is exactly the form `n̄`, returns `n`.
    pub fn as_integer(&self, g: EndId) -> Option<u32> {
        let t = &self.facts(g).terminal;
        (t.len() == 1).then(|| t.min().unwrap())
    }

    /// If `g` is exactly the form `W_n` with `n ≥ 2`, returns `n`.
    pub fn as_waiting(&self, g: EndId) -> Option<u32> {
        let n = self.facts(g).terminal.max()?;
        if n < 2 {
            return None;
        }
        let mut w = EndId::ZERO;
        for _ in 0..n {
            w = self.store.lookup(&[EndId::ZERO, w])?;
        }
        (w == g).then_some(n)
    }

    fn sum_lookup(&self, a: EndId, b: EndId) -> Option<EndId> {
        if a.is_zero() {
            Some(b)
        } else if b.is_zero() {
            Some(a)
        } else {
            self.sum_memo.get(&unordered_key(a, b)).copied()
        }
    }

    /// The disjunctive sum at the level of forms: options
    /// `{a' + b} ∪ {a + b'}`.
    pub fn sum(&mut self, a: EndId, b: EndId) -> EndId {
        if let Some(s) = self.sum_lookup(a, b) {
            return s;
        }
        let mut stack = vec![(a, b)];
        while let Some(&(x, y)) = stack.last() {
            if self.sum_lookup(x, y).is_some() {
                stack.pop();
                continue;
            }
            let mut options = Vec::new();
            let mut ready = true;
            let xs = self.options(x).to_vec();
            let ys = self.options(y).to_vec();
            for &x1 in &xs {
                match self.sum_lookup(x1, y) {
                    Some(s) => options.push(s),
                    None => {
                        ready = false;
                        stack.push((x1, y));
                    }
                }
            }
            for &y1 in &ys {
                match self.sum_lookup(x, y1) {
                    Some(s) => options.push(s),
                    None => {
                        ready = false;
                        stack.push((x, y1));
                    }
                }
            }
            if ready {
                let s = self.intern_unsorted(options);
                self.sum_memo.insert(unordered_key(x, y), s);
                stack.pop();
            }
        }
        self.sum_lookup(a, b).unwrap()
    }

    /// `n·g` as a form.
    pub fn multiple(&mut self, n: u32, g: EndId) -> EndId {
        let mut acc = EndId::ZERO;
        for _ in 0..n {
            acc = self.sum(acc, g);
        }
        acc
    }

    /// Formal birthday: the height of the game tree.
    pub fn birthday(&self, g: EndId) -> u32 {
        self.facts(g).terminal.max().unwrap()
    }
}
