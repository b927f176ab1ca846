//! General misère forms and their outcomes, used as ground truth for the
//! order on Left dead ends.
//!
//! A Left dead end embeds as a general form with no Left options. If `G ≥ H`
//! then every context `X` has `o(G + X) ≥ o(H + X)`; conversely a terminal
//! length of `G` missing from `H` yields the context `C_n` separating them.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::Engine;
use crate::store::EndId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenId(u32);

impl GenId {
    pub const ZERO: GenId = GenId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GenNode {
    pub left: Box<[GenId]>,
    pub right: Box<[GenId]>,
}

/// The winner under misère play. `LeftWins > RightWins` from Left's view.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Winner {
    RightWins,
    LeftWins,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Outcome {
    pub left_first: Winner,
    pub right_first: Winner,
}

impl Outcome {
    /// Pointwise comparison for both movers.
    pub fn ge(self, other: Outcome) -> bool {
        self.left_first >= other.left_first && self.right_first >= other.right_first
    }
}

/// Separating context for `g` and `h` and the two outcomes it produces with
/// Right moving first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Witness {
    pub n: u32,
    pub g_outcome: Winner,
    pub h_outcome: Winner,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub g: EndId,
    pub h: EndId,
    pub context: GenId,
    pub g_outcome: Outcome,
    pub h_outcome: Outcome,
}

#[derive(Debug)]
pub struct GenStore {
    nodes: Vec<GenNode>,
    index: HashMap<GenNode, GenId>,
    sums: HashMap<(GenId, GenId), GenId>,
    outcomes: HashMap<GenId, Outcome>,
    embedded: HashMap<EndId, GenId>,
}

impl Default for GenStore {
    fn default() -> Self {
        Self::new()
    }
}

impl GenStore {
    pub fn new() -> Self {
        let zero = GenNode {
            left: Box::new([]),
            right: Box::new([]),
        };
        GenStore {
            nodes: vec![zero.clone()],
            index: HashMap::from([(zero, GenId::ZERO)]),
            sums: HashMap::new(),
            outcomes: HashMap::new(),
            embedded: HashMap::from([(EndId::ZERO, GenId::ZERO)]),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, g: GenId) -> &GenNode {
        &self.nodes[g.index()]
    }

    /// Interns `{left | right}`; both lists must name existing forms.
    pub fn make(&mut self, mut left: Vec<GenId>, mut right: Vec<GenId>) -> GenId {
        left.sort_unstable();
        left.dedup();
        right.sort_unstable();
        right.dedup();
        assert!(
            left.iter().chain(&right).all(|x| x.index() < self.nodes.len()),
            "options must already be interned"
        );
        let node = GenNode {
            left: left.into(),
            right: right.into(),
        };
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = GenId(self.nodes.len() as u32);
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    pub fn star(&mut self) -> GenId {
        self.make(vec![GenId::ZERO], vec![GenId::ZERO])
    }

    pub fn birthday(&self, g: GenId) -> u32 {
        let node = self.node(g);
        node.left
            .iter()
            .chain(node.right.iter())
            .map(|&x| self.birthday(x) + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn sum(&mut self, a: GenId, b: GenId) -> GenId {
        if a == GenId::ZERO {
            return b;
        }
        if b == GenId::ZERO {
            return a;
        }
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(&s) = self.sums.get(&key) {
            return s;
        }
        let (na, nb) = (self.node(a).clone(), self.node(b).clone());
        let mut left = Vec::new();
        let mut right = Vec::new();
        for &x in na.left.iter() {
            left.push(self.sum(x, b));
        }
        for &y in nb.left.iter() {
            left.push(self.sum(a, y));
        }
        for &x in na.right.iter() {
            right.push(self.sum(x, b));
        }
        for &y in nb.right.iter() {
            right.push(self.sum(a, y));
        }
        let s = self.make(left, right);
        self.sums.insert(key, s);
        s
    }

    /// Misère outcome: a player with no move wins; otherwise the mover wins
    /// iff some option is a win for them with the opponent to move.
    pub fn outcome(&mut self, g: GenId) -> Outcome {
        if let Some(&o) = self.outcomes.get(&g) {
            return o;
        }
        let node = self.node(g).clone();
        let left_first = if node.left.is_empty()
            || node.left.iter().any(|&x| self.outcome(x).right_first == Winner::LeftWins)
        {
            Winner::LeftWins
        } else {
            Winner::RightWins
        };
        let right_first = if node.right.is_empty()
            || node.right.iter().any(|&x| self.outcome(x).left_first == Winner::RightWins)
        {
            Winner::RightWins
        } else {
            Winner::LeftWins
        };
        let o = Outcome {
            left_first,
            right_first,
        };
        self.outcomes.insert(g, o);
        o
    }

    /// The dead end `g` as a general form with empty Left option sets.
    pub fn embed(&mut self, engine: &Engine, g: EndId) -> GenId {
        if let Some(&x) = self.embedded.get(&g) {
            return x;
        }
        let right: Vec<GenId> = engine.options(g).iter().map(|&o| self.embed(engine, o)).collect();
        let x = self.make(Vec::new(), right);
        self.embedded.insert(g, x);
        x
    }

    /// `C_0 = {0, * | *}` and `C_k = {C_{k-1} | 0}`.
    pub fn context(&mut self, k: u32) -> GenId {
        let star = self.star();
        let mut c = self.make(vec![GenId::ZERO, star], vec![star]);
        for _ in 0..k {
            c = self.make(vec![c], vec![GenId::ZERO]);
        }
        c
    }

    /// A random form born by day `max_birthday` with at most `max_options`
    /// options on each side.
    pub fn random_form<R: Rng>(&mut self, rng: &mut R, max_birthday: u32, max_options: usize) -> GenId {
        if max_birthday == 0 {
            return GenId::ZERO;
        }
        let mut sides = [Vec::new(), Vec::new()];
        for side in &mut sides {
            for _ in 0..rng.gen_range(0..=max_options) {
                let b = rng.gen_range(0..max_birthday);
                side.push(self.random_form(rng, b, max_options));
            }
        }
        let [left, right] = sides;
        self.make(left, right)
    }

    /// `count` forms from a fixed-seed generator.
    pub fn random_contexts(&mut self, seed: u64, count: usize, max_birthday: u32, max_options: usize) -> Vec<GenId> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| self.random_form(&mut rng, max_birthday, max_options))
            .collect()
    }

    /// If some `n ∈ terminal(g) \ terminal(h)` exists, the smallest such `n`
    /// and the Right-first outcomes of `g + C_n` and `h + C_n`.
    pub fn distinguish(&mut self, engine: &Engine, g: EndId, h: EndId) -> Option<Witness> {
        let th = engine.terminal_set(h);
        let n = engine.terminal_set(g).iter().find(|&n| !th.contains(n))?;
        let c = self.context(n);
        let (eg, eh) = (self.embed(engine, g), self.embed(engine, h));
        let (sg, sh) = (self.sum(eg, c), self.sum(eh, c));
        Some(Witness {
            n,
            g_outcome: self.outcome(sg).right_first,
            h_outcome: self.outcome(sh).right_first,
        })
    }

    /// Pairs `(g, h)` with `g ≥ h` whose outcomes in some context are not
    /// ordered the same way.
    pub fn monotonicity_violations(
        &mut self,
        engine: &mut Engine,
        games: &[EndId],
        contexts: &[GenId],
    ) -> Vec<Violation> {
        let mut found = Vec::new();
        for &g in games {
            for &h in games {
                if !engine.ge(g, h) {
                    continue;
                }
                let (eg, eh) = (self.embed(engine, g), self.embed(engine, h));
                for &x in contexts {
                    let (sg, sh) = (self.sum(eg, x), self.sum(eh, x));
                    let (og, oh) = (self.outcome(sg), self.outcome(sh));
                    if !og.ge(oh) {
                        found.push(Violation {
                            g,
                            h,
                            context: x,
                            g_outcome: og,
                            h_outcome: oh,
                        });
                    }
                }
            }
        }
        found
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding() {
        let mut e = Engine::new();
        let mut s = GenStore::new();
        assert_eq!(s.embed(&e, EndId::ZERO), GenId::ZERO);
        let one = e.integer(1);
        let x = s.embed(&e, one);
        assert!(s.node(x).left.is_empty());
        assert_eq!(&*s.node(x).right, &[GenId::ZERO]);
        let w2 = e.waiting(2);
        let y = s.embed(&e, w2);
        assert_eq!(&*s.node(y).right, &[GenId::ZERO, x]);
    }

    #[test]
    fn embedding_commutes_with_sum() {
        let mut e = Engine::new();
        let mut s = GenStore::new();
        let (a, b) = (e.waiting(2), e.integer(2));
        let ab = e.sum(a, b);
        let lhs = s.embed(&e, ab);
        let (ea, eb) = (s.embed(&e, a), s.embed(&e, b));
        assert_eq!(lhs, s.sum(ea, eb));
    }

    #[test]
    fn basic_outcomes() {
        let mut e = Engine::new();
        let mut s = GenStore::new();
        let o = s.outcome(GenId::ZERO);
        assert_eq!((o.left_first, o.right_first), (Winner::LeftWins, Winner::RightWins));
        let star = s.star();
        let o = s.outcome(star);
        assert_eq!((o.left_first, o.right_first), (Winner::RightWins, Winner::LeftWins));
        let one = e.integer(1);
        let x = s.embed(&e, one);
        assert_eq!(s.outcome(x).right_first, Winner::LeftWins);
    }

    #[test]
    fn contexts() {
        let mut s = GenStore::new();
        let c0 = s.context(0);
        let star = s.star();
        assert_eq!(&*s.node(c0).left, &[GenId::ZERO, star]);
        assert_eq!(&*s.node(c0).right, &[star]);
        let c2 = s.context(2);
        let c1 = s.node(c2).left[0];
        assert_eq!(s.node(c1).left[0], c0);
        assert_eq!(&*s.node(c2).right, &[GenId::ZERO]);
        for k in 0..5 {
            let c = s.context(k);
            assert_eq!(s.birthday(c), k + 2);
        }
    }

    #[test]
    fn distinguishing() {
        let mut e = Engine::new();
        let mut s = GenStore::new();
        let (two, w2) = (e.integer(2), e.waiting(2));
        assert_eq!(s.distinguish(&e, two, w2), None);
        assert_eq!(s.distinguish(&e, w2, w2), None);
        let w = s.distinguish(&e, w2, two).unwrap();
        assert_eq!(w.n, 1);
        assert_eq!(w.g_outcome, Winner::RightWins);
        assert_eq!(w.h_outcome, Winner::LeftWins);
    }

    #[test]
    fn random_contexts_are_reproducible() {
        let mut a = GenStore::new();
        let mut b = GenStore::new();
        let xs = a.random_contexts(7, 20, 4, 3);
        let ys = b.random_contexts(7, 20, 4, 3);
        assert_eq!(xs, ys);
        assert!(xs.iter().all(|&x| a.birthday(x) <= 4));
    }
}
