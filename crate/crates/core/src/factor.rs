//! Divisors, atoms and factorisations in the monoid of Left dead ends.
//!
//! The divisor search follows the difference lemma: if `G = H + K` with both
//! parts non-zero then either each part divides some good option of `G`
//! (and the pair is found among divisors of good options), or one part `H`
//! divides every good option `G_i' = H + X_i` and the cofactor is
//! `K = {·| X_i}`. Divisors of the good options are computed first, so the
//! search only ever looks at a thin slice of smaller games.
//!
//! Everything in this module works on canonical forms, where equality of
//! games is equality of ids.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::engine::Engine;
use crate::enumerate::Budget;
use crate::error::{Error, Result};
use crate::notation::format;
use crate::store::EndId;

/// All divisors of a game, each with its (unique) cofactor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Divisors {
    cofactor: BTreeMap<EndId, EndId>,
}

impl Divisors {
    pub fn divisors(&self) -> impl Iterator<Item = EndId> + '_ {
        self.cofactor.keys().copied()
    }

    pub fn quotient(&self, d: EndId) -> Option<EndId> {
        self.cofactor.get(&d).copied()
    }

    pub fn contains(&self, d: EndId) -> bool {
        self.cofactor.contains_key(&d)
    }

    pub fn len(&self) -> usize {
        self.cofactor.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cofactor.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (EndId, EndId)> + '_ {
        self.cofactor.iter().map(|(&d, &q)| (d, q))
    }
}

/// A multiset of atoms, sorted by id.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factorisation {
    parts: Vec<EndId>,
}

impl Factorisation {
    pub fn new(mut parts: Vec<EndId>) -> Self {
        parts.sort_unstable();
        Factorisation { parts }
    }

    pub fn parts(&self) -> &[EndId] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// Sufficient conditions for being an atom, in the order they are tried.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomRule {
    /// `race(G) = 1`.
    Race1,
    /// `flex(G) = 1`.
    Flex1,
    /// More than one good option and `birth(G) > 2·flex(G) - 2`.
    BigBirth,
    /// A good option `n̄` while `G` is not itself an integer.
    IntegerOption,
    /// At least three good options that are atoms.
    ThreeAtoms,
}

impl AtomRule {
    pub fn tag(self) -> &'static str {
        match self {
            AtomRule::Race1 => "race1",
            AtomRule::Flex1 => "flex1",
            AtomRule::BigBirth => "bigbirth",
            AtomRule::IntegerOption => "integer-option",
            AtomRule::ThreeAtoms => "three-atoms",
        }
    }
}

impl fmt::Display for AtomRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Sufficient conditions for unique factorisation. "Prime-factorisable" is
/// taken to mean "integer", as `1̄` is the only prime known.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UniqueRule {
    /// A good option that is an atom.
    GoodAtomOption,
    /// A good option that is prime-factorisable.
    GoodIntegerOption,
    /// Some factorisation uses only atoms whose good racing options are all
    /// prime-factorisable.
    RacingIntegerChain,
    /// As above with good stalling options.
    StallingIntegerChain,
}

impl UniqueRule {
    pub fn tag(self) -> &'static str {
        match self {
            UniqueRule::RacingIntegerChain => "racing-integer-chain",
            UniqueRule::StallingIntegerChain => "stalling-integer-chain",
            UniqueRule::GoodIntegerOption => "good-integer-option",
            UniqueRule::GoodAtomOption => "good-atom-option",
        }
    }
}

impl fmt::Display for UniqueRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// The four terms bounding the longest factorisation length of a game with
/// more than one good option.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LengthBounds {
    pub race: u32,
    /// Minimum over good options `G'` of `bound(G') + 1`.
    pub option_plus_one: u32,
    pub terminal_minus_one: u32,
    /// `⌊(flex(G) + 1) / 2⌋`.
    pub flex_term: u32,
}

impl LengthBounds {
    pub fn min(&self) -> u32 {
        self.race
            .min(self.option_plus_one)
            .min(self.terminal_minus_one)
            .min(self.flex_term)
    }

    pub fn as_tuple(&self) -> (u32, u32, u32, u32) {
        (self.race, self.option_plus_one, self.terminal_minus_one, self.flex_term)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorReport {
    pub target: EndId,
    pub divisors: Vec<EndId>,
    pub factorisations: Vec<Factorisation>,
    pub longest: u32,
    pub bound: u32,
    pub unique: bool,
    pub atom_rule: Option<AtomRule>,
    pub unique_rule: Option<UniqueRule>,
}

impl Engine {
    /// Runs `compute` on `root` and, first, on every transitive dependency
    /// not yet `done`, deepest first, without native recursion.
    fn post_order(
        &mut self,
        root: EndId,
        done: impl Fn(&Engine, EndId) -> bool,
        deps: impl Fn(&mut Engine, EndId) -> Vec<EndId>,
        mut compute: impl FnMut(&mut Engine, EndId),
    ) {
        let mut stack = vec![root];
        while let Some(&x) = stack.last() {
            if done(self, x) {
                stack.pop();
                continue;
            }
            let missing: Vec<EndId> = deps(self, x).into_iter().filter(|&d| !done(self, d)).collect();
            if missing.is_empty() {
                compute(self, x);
                stack.pop();
            } else {
                stack.extend(missing);
            }
        }
    }

    /// All divisors of `g` (after canonicalisation) with their cofactors.
    pub fn factors(&mut self, g: EndId) -> Arc<Divisors> {
        let g = self.canonical(g);
        self.post_order(
            g,
            |e, x| e.divisor_memo.contains_key(&x),
            |e, x| e.good_options(x).to_vec(),
            |e, x| {
                let d = e.divisors_from_good_options(x);
                e.divisor_memo.insert(x, Arc::new(d));
            },
        );
        self.divisor_memo[&g].clone()
    }

    fn divisors_from_good_options(&mut self, g: EndId) -> Divisors {
        let mut cofactor = BTreeMap::from([(EndId::ZERO, g), (g, EndId::ZERO)]);
        if g.is_zero() {
            return Divisors { cofactor };
        }
        let good = self.good_options(g);
        let option_divisors: Vec<Arc<Divisors>> =
            good.iter().map(|o| self.divisor_memo[o].clone()).collect();

        // Both parts divide some good option.
        let pool: BTreeSet<EndId> = option_divisors
            .iter()
            .flat_map(|d| d.divisors())
            .filter(|d| !d.is_zero())
            .collect();
        let pool: Vec<EndId> = pool.into_iter().collect();
        let (birth, race) = (self.birthday(g), self.race(g));
        for (i, &h) in pool.iter().enumerate() {
            for &k in &pool[i..] {
                if self.birthday(h) + self.birthday(k) != birth || self.race(h) + self.race(k) != race {
                    continue;
                }
                if self.terminal_set(h).minkowski(self.terminal_set(k)) != *self.terminal_set(g) {
                    continue;
                }
                if self.sum_canonical(h, k) == g {
                    cofactor.insert(h, k);
                    cofactor.insert(k, h);
                }
            }
        }

        // One part divides every good option; the other is {·| X_i}.
        let first = &option_divisors[0];
        for h in first.divisors().filter(|h| !h.is_zero()) {
            let xs: Option<Vec<EndId>> = option_divisors.iter().map(|d| d.quotient(h)).collect();
            let Some(xs) = xs else { continue };
            let k = self.canonical_node(xs);
            if !k.is_zero() && self.sum_canonical(h, k) == g {
                cofactor.insert(h, k);
                cofactor.insert(k, h);
            }
        }
        Divisors { cofactor }
    }

    /// The quotient `x` with `h + x = g`, if `h` divides `g`.
    pub fn divides(&mut self, h: EndId, g: EndId) -> Option<EndId> {
        let h = self.canonical(h);
        self.factors(g).quotient(h)
    }

    pub fn is_atom(&mut self, g: EndId) -> Result<bool> {
        let g = self.canonical(g);
        if g.is_zero() {
            return Err(Error::ZeroGame);
        }
        Ok(self.factors(g).len() == 2)
    }

    fn is_atom_nonzero(&mut self, g: EndId) -> bool {
        !g.is_zero() && self.factors(g).len() == 2
    }

    /// Every factorisation of `g` into atoms, sorted. `0` has the single
    /// empty factorisation.
    pub fn factorisations(&mut self, g: EndId) -> Arc<Vec<Factorisation>> {
        let g = self.canonical(g);
        self.post_order(
            g,
            |e, x| e.factorisation_memo.contains_key(&x),
            |e, x| {
                let divs = e.factors(x);
                let mut deps = Vec::new();
                for (a, q) in divs.pairs() {
                    if e.is_atom_nonzero(a) {
                        deps.push(q);
                    }
                }
                deps
            },
            |e, x| {
                let mut all = BTreeSet::new();
                if x.is_zero() {
                    all.insert(Factorisation::new(Vec::new()));
                } else {
                    let divs = e.factors(x);
                    for (a, q) in divs.pairs() {
                        if !e.is_atom_nonzero(a) {
                            continue;
                        }
                        for f in e.factorisation_memo[&q].iter() {
                            let mut parts = f.parts.clone();
                            parts.push(a);
                            all.insert(Factorisation::new(parts));
                        }
                    }
                }
                e.factorisation_memo.insert(x, Arc::new(all.into_iter().collect()));
            },
        );
        self.factorisation_memo[&g].clone()
    }

    pub fn is_uniquely_factorisable(&mut self, g: EndId) -> bool {
        self.factorisations(g).len() == 1
    }

    /// Length of a longest factorisation.
    pub fn longest_len(&mut self, g: EndId) -> u32 {
        self.factorisations(g).iter().map(|f| f.len() as u32).max().unwrap_or(0)
    }

    /// The four terms of the length bound for `g`, computed recursively.
    pub fn length_bounds(&mut self, g: EndId) -> LengthBounds {
        let g = self.canonical(g);
        if g.is_zero() {
            return LengthBounds {
                race: 0,
                option_plus_one: 0,
                terminal_minus_one: 0,
                flex_term: 0,
            };
        }
        let good = self.good_options(g);
        let option_plus_one = good.iter().map(|&o| self.longest_bound(o) + 1).min().unwrap();
        LengthBounds {
            race: self.race(g),
            option_plus_one,
            terminal_minus_one: self.terminal_set(g).len() as u32 - 1,
            flex_term: self.flex(g).div_ceil(2),
        }
    }

    /// Recursive upper bound on the longest factorisation length: one more
    /// than the bound of the only good option when there is exactly one,
    /// otherwise the minimum of the four terms of [`LengthBounds`].
    pub fn longest_bound(&mut self, g: EndId) -> u32 {
        let g = self.canonical(g);
        let mut memo: HashMap<EndId, u32> = HashMap::from([(EndId::ZERO, 0)]);
        // The memo is local: bounds are cheap next to the good-option sets
        // they are built from, which are cached on the engine.
        let mut stack = vec![g];
        while let Some(&x) = stack.last() {
            if memo.contains_key(&x) {
                stack.pop();
                continue;
            }
            let good = self.good_options(x);
            let missing: Vec<EndId> = good.iter().copied().filter(|o| !memo.contains_key(o)).collect();
            if !missing.is_empty() {
                stack.extend(missing);
                continue;
            }
            let best_option = good.iter().map(|o| memo[o] + 1).min().unwrap();
            let bound = if good.len() == 1 {
                best_option
            } else {
                best_option
                    .min(self.race(x))
                    .min(self.terminal_set(x).len() as u32 - 1)
                    .min(self.flex(x).div_ceil(2))
            };
            memo.insert(x, bound);
            stack.pop();
        }
        memo[&g]
    }

    /// First applicable sufficient atom condition for non-zero `g`.
    pub fn atom_rule(&mut self, g: EndId) -> Option<AtomRule> {
        self.atom_rules(g).first().copied()
    }

    /// Every applicable sufficient atom condition, in precedence order.
    pub fn atom_rules(&mut self, g: EndId) -> Vec<AtomRule> {
        let g = self.canonical(g);
        let mut rules = Vec::new();
        if g.is_zero() {
            return rules;
        }
        let good = self.good_options(g);
        if self.race(g) == 1 {
            rules.push(AtomRule::Race1);
        }
        if self.flex(g) == 1 {
            rules.push(AtomRule::Flex1);
        }
        if good.len() > 1 && i64::from(self.birthday(g)) > 2 * i64::from(self.flex(g)) - 2 {
            rules.push(AtomRule::BigBirth);
        }
        if !self.is_integer(g) && good.iter().any(|&o| self.is_integer(o)) {
            rules.push(AtomRule::IntegerOption);
        }
        if good.iter().filter(|&&o| self.is_atom_nonzero(o)).count() >= 3 {
            rules.push(AtomRule::ThreeAtoms);
        }
        rules
    }

    /// First applicable sufficient condition for unique factorisation, in the
    /// order good-atom-option, good-integer-option, racing-integer-chain,
    /// stalling-integer-chain.
    pub fn uniqueness_rule(&mut self, g: EndId) -> Option<UniqueRule> {
        self.uniqueness_rules(g).first().copied()
    }

    pub fn uniqueness_rules(&mut self, g: EndId) -> Vec<UniqueRule> {
        let g = self.canonical(g);
        let mut rules = Vec::new();
        if g.is_zero() {
            return rules;
        }
        let good = self.good_options(g);
        if good.iter().any(|&o| self.is_atom_nonzero(o)) {
            rules.push(UniqueRule::GoodAtomOption);
        }
        if good.iter().any(|&o| self.is_integer(o)) {
            rules.push(UniqueRule::GoodIntegerOption);
        }
        let facts = self.factorisations(g);
        let chain = |e: &mut Engine, pick: fn(&Engine, EndId) -> Vec<EndId>| {
            facts.iter().any(|f| {
                f.parts().iter().all(|&a| {
                    let good = e.good_options(a);
                    pick(e, a)
                        .into_iter()
                        .filter(|o| good.contains(o))
                        .all(|o| e.is_integer(o))
                })
            })
        };
        if chain(self, |e, a| e.racing_options(a)) {
            rules.push(UniqueRule::RacingIntegerChain);
        }
        if chain(self, |e, a| e.stalling_options(a)) {
            rules.push(UniqueRule::StallingIntegerChain);
        }
        rules
    }

    /// Whether `n·g` is uniquely factorisable for every `1 ≤ n ≤ n_max`.
    pub fn strong_atom_check(&mut self, g: EndId, n_max: u32) -> Result<bool> {
        let g = self.canonical(g);
        if !self.is_atom_nonzero(g) {
            return Err(Error::NotAnAtom(format(self, g)));
        }
        for n in 1..=n_max {
            let m = self.multiple_canonical(n, g);
            if !self.is_uniquely_factorisable(m) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The implication `1̄ | h + k ⇒ 1̄ | h or 1̄ | k`.
    pub fn one_bar_prime_check(&mut self, h: EndId, k: EndId) -> bool {
        let one = self.integer(1);
        let s = self.sum_canonical(h, k);
        self.divides(one, s).is_none()
            || self.divides(one, h).is_some()
            || self.divides(one, k).is_some()
    }

    pub fn factor_report(&mut self, g: EndId) -> FactorReport {
        let g = self.canonical(g);
        let divisors: Vec<EndId> = self.factors(g).divisors().collect();
        let factorisations = self.factorisations(g).to_vec();
        FactorReport {
            target: g,
            divisors,
            longest: factorisations.iter().map(|f| f.len() as u32).max().unwrap_or(0),
            bound: self.longest_bound(g),
            unique: factorisations.len() == 1,
            factorisations,
            atom_rule: self.atom_rule(g),
            unique_rule: self.uniqueness_rule(g),
        }
    }

    /// Divisors of `g` by exhaustive search over all canonical ends born
    /// before `g`, comparing form-level sums with the order relation. Pairs
    /// are pruned by additivity of terminal sets.
    pub fn brute_force_divisors(&mut self, g: EndId, budget: &Budget) -> Result<BTreeMap<EndId, EndId>> {
        let g = self.canonical(g);
        let mut found = BTreeMap::from([(EndId::ZERO, g), (g, EndId::ZERO)]);
        let birth = self.birthday(g);
        if birth < 2 {
            return Ok(found);
        }
        let pool: Vec<EndId> = self
            .generate_day(birth - 1, budget, 1)?
            .games
            .iter()
            .copied()
            .filter(|x| !x.is_zero())
            .collect();
        let target = self.terminal_set(g).clone();
        for (i, &x) in pool.iter().enumerate() {
            for &y in &pool[i..] {
                if self.birthday(x) + self.birthday(y) != birth {
                    continue;
                }
                if self.terminal_set(x).minkowski(self.terminal_set(y)) != target {
                    continue;
                }
                let s = self.sum(x, y);
                if self.eq(s, g) {
                    found.insert(x, y);
                    found.insert(y, x);
                }
            }
        }
        Ok(found)
    }
}
