//! Hash-consed storage of Left dead end forms.
//!
//! A Left dead end is identified by its set of Right options. Each distinct
//! option set is stored once and referred to by a dense [`EndId`], so two ids
//! are equal exactly when the game trees they denote are isomorphic.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Handle to an interned Left dead end form. `EndId::ZERO` is `{·|·}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EndId(pub(crate) u32);

impl EndId {
    pub const ZERO: EndId = EndId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn raw(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for EndId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// The Right options of a form, strictly increasing by id.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EndNode {
    options: Box<[EndId]>,
}

impl EndNode {
    pub fn options(&self) -> &[EndId] {
        &self.options
    }
}

/// Append-only intern table. Children always precede their parents, so the
/// id order is a topological order of the options DAG.
#[derive(Debug)]
pub struct EndStore {
    nodes: Vec<EndNode>,
    index: HashMap<Box<[EndId]>, EndId>,
}

impl Default for EndStore {
    fn default() -> Self {
        Self::new()
    }
}

impl EndStore {
    pub fn new() -> Self {
        let zero: Box<[EndId]> = Box::new([]);
        let mut index = HashMap::new();
        index.insert(zero.clone(), EndId::ZERO);
        EndStore {
            nodes: vec![EndNode { options: zero }],
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, id: EndId) -> bool {
        id.index() < self.nodes.len()
    }

    pub fn node(&self, id: EndId) -> &EndNode {
        &self.nodes[id.index()]
    }

    pub fn options(&self, id: EndId) -> &[EndId] {
        self.nodes[id.index()].options()
    }

    /// Looks up the form with exactly these options without inserting.
    pub fn lookup(&self, options: &[EndId]) -> Option<EndId> {
        let mut sorted = options.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        self.index.get(sorted.as_slice()).copied()
    }

    /// Interns the form `{·| options}`. Returns the id and whether it is new.
    pub fn intern(&mut self, options: &[EndId]) -> Result<(EndId, bool)> {
        if let Some(bad) = options.iter().find(|o| !self.contains(**o)) {
            return Err(Error::InvalidOption(*bad));
        }
        let mut sorted = options.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        Ok(self.intern_sorted(sorted))
    }

    /// Interns an already sorted, duplicate-free option list of known ids.
    pub(crate) fn intern_sorted(&mut self, sorted: Vec<EndId>) -> (EndId, bool) {
        debug_assert!(sorted.windows(2).all(|w| w[0] < w[1]));
        if let Some(&id) = self.index.get(sorted.as_slice()) {
            return (id, false);
        }
        let id = EndId(u32::try_from(self.nodes.len()).expect("store exceeds u32 ids"));
        let options: Box<[EndId]> = sorted.into_boxed_slice();
        self.index.insert(options.clone(), id);
        self.nodes.push(EndNode { options });
        (id, true)
    }

    pub fn ids(&self) -> impl Iterator<Item = EndId> + '_ {
        (0..self.nodes.len() as u32).map(EndId)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_is_preinterned() {
        let store = EndStore::new();
        assert_eq!(store.lookup(&[]), Some(EndId::ZERO));
        assert!(store.options(EndId::ZERO).is_empty());
    }

    #[test]
    fn intern_is_idempotent_and_set_like() {
        let mut store = EndStore::new();
        let (one, fresh) = store.intern(&[EndId::ZERO]).unwrap();
        assert!(fresh);
        let (again, fresh) = store.intern(&[EndId::ZERO]).unwrap();
        assert_eq!(one, again);
        assert!(!fresh);
        let (a, _) = store.intern(&[EndId::ZERO, one]).unwrap();
        let (b, _) = store.intern(&[one, EndId::ZERO, one]).unwrap();
        assert_eq!(a, b);
        assert_eq!(store.options(a), &[EndId::ZERO, one]);
    }

    #[test]
    fn unknown_child_is_rejected() {
        let mut store = EndStore::new();
        assert_eq!(
            store.intern(&[EndId(7)]),
            Err(Error::InvalidOption(EndId(7)))
        );
    }
}
