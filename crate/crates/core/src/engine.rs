use std::collections::HashMap;
use std::sync::Arc;

use crate::error::Result;
use crate::factor::{Divisors, Factorisation};
use crate::store::{EndId, EndStore};
use crate::terminal::TerminalSet;

/// Per-node invariants, computed once when a node is interned.
#[derive(Clone, Debug)]
pub(crate) struct NodeFacts {
    pub terminal: TerminalSet,
    pub flex: u32,
}

#[inline]
pub(crate) fn pair_key(a: EndId, b: EndId) -> u64 {
    (a.0 as u64) << 32 | b.0 as u64
}

#[inline]
pub(crate) fn unordered_key(a: EndId, b: EndId) -> u64 {
    if a <= b {
        pair_key(a, b)
    } else {
        pair_key(b, a)
    }
}

/// A session over one store of Left dead ends together with every memo table
/// keyed by its ids. Ids are only meaningful within the engine that made them.
#[derive(Debug)]
pub struct Engine {
    pub(crate) store: EndStore,
    pub(crate) facts: Vec<NodeFacts>,
    /// Use terminal-set inclusion to reject `ge` early.
    pub(crate) prune: bool,
    pub(crate) sum_memo: HashMap<u64, EndId>,
    pub(crate) canon_sum_memo: HashMap<u64, EndId>,
    pub(crate) ge_memo: HashMap<u64, bool>,
    pub(crate) canon_memo: HashMap<EndId, EndId>,
    pub(crate) good_memo: HashMap<EndId, Arc<[EndId]>>,
    pub(crate) divisor_memo: HashMap<EndId, Arc<Divisors>>,
    pub(crate) factorisation_memo: HashMap<EndId, Arc<Vec<Factorisation>>>,
    pub(crate) integers: Vec<EndId>,
    pub(crate) waitings: Vec<EndId>,
    pub(crate) days: Vec<Arc<[EndId]>>,
}

impl Default for Engine {
    fn default() -> Self {
        Self::new()
    }
}

impl Engine {
    pub fn new() -> Self {
        Engine {
            store: EndStore::new(),
            facts: vec![NodeFacts {
                terminal: TerminalSet::singleton(0),
                flex: 0,
            }],
            prune: true,
            sum_memo: HashMap::new(),
            canon_sum_memo: HashMap::new(),
            ge_memo: HashMap::new(),
            canon_memo: HashMap::from([(EndId::ZERO, EndId::ZERO)]),
            good_memo: HashMap::new(),
            divisor_memo: HashMap::new(),
            factorisation_memo: HashMap::new(),
            integers: vec![EndId::ZERO],
            waitings: vec![EndId::ZERO],
            days: vec![Arc::from(vec![EndId::ZERO])],
        }
    }

    /// An engine whose comparison runs the bare recursive test with no
    /// terminal-set shortcut. Used to check properties independently.
    pub fn unpruned() -> Self {
        Engine {
            prune: false,
            ..Self::new()
        }
    }

    pub fn store(&self) -> &EndStore {
        &self.store
    }

    pub fn options(&self, g: EndId) -> &[EndId] {
        self.store.options(g)
    }

    /// Number of interned forms.
    pub fn len(&self) -> usize {
        self.store.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Interns `{·| options}`. Duplicates are removed and order is ignored.
    pub fn make_end(&mut self, options: &[EndId]) -> Result<EndId> {
        let (id, fresh) = self.store.intern(options)?;
        if fresh {
            self.record_facts(id);
        }
        Ok(id)
    }

    pub(crate) fn intern_sorted(&mut self, sorted: Vec<EndId>) -> EndId {
        let (id, fresh) = self.store.intern_sorted(sorted);
        if fresh {
            self.record_facts(id);
        }
        id
    }

    pub(crate) fn intern_unsorted(&mut self, mut options: Vec<EndId>) -> EndId {
        options.sort_unstable();
        options.dedup();
        self.intern_sorted(options)
    }

    fn record_facts(&mut self, id: EndId) {
        debug_assert_eq!(id.index(), self.facts.len());
        let options = self.store.options(id);
        let mut terminal = TerminalSet::empty();
        let mut max_flex = 0;
        for o in options {
            let f = &self.facts[o.index()];
            terminal.union_with(&f.terminal.shifted(1));
            max_flex = max_flex.max(f.flex);
        }
        if options.is_empty() {
            terminal = TerminalSet::singleton(0);
        }
        let flex = if terminal.len() == 1 { 0 } else { max_flex + 1 };
        self.facts.push(NodeFacts { terminal, flex });
    }

    pub(crate) fn facts(&self, g: EndId) -> &NodeFacts {
        &self.facts[g.index()]
    }
}
