use std::fmt;

/// A finite set of nonnegative integers stored as a dense bitset.
///
/// Used for the terminal lengths of a game: the lengths of runs that end at
/// `0`. The set of any Left dead end is nonempty.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct TerminalSet {
    words: Vec<u64>,
}

impl TerminalSet {
    pub fn empty() -> Self {
        TerminalSet { words: Vec::new() }
    }

    pub fn singleton(n: u32) -> Self {
        let mut s = Self::empty();
        s.insert(n);
        s
    }

    pub fn from_iter_values<I: IntoIterator<Item = u32>>(values: I) -> Self {
        let mut s = Self::empty();
        for v in values {
            s.insert(v);
        }
        s
    }

    pub fn insert(&mut self, n: u32) {
        let (w, b) = (n as usize / 64, n % 64);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << b;
    }

    pub fn contains(&self, n: u32) -> bool {
        let (w, b) = (n as usize / 64, n % 64);
        self.words.get(w).is_some_and(|x| x >> b & 1 == 1)
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn min(&self) -> Option<u32> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i as u32 * 64 + w.trailing_zeros())
    }

    pub fn max(&self) -> Option<u32> {
        let last = self.words.last()?;
        Some((self.words.len() as u32 - 1) * 64 + 63 - last.leading_zeros())
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros();
                rest &= rest - 1;
                Some(i as u32 * 64 + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().collect()
    }

    /// `{t + k : t ∈ self}`.
    pub fn shifted(&self, k: u32) -> Self {
        if self.is_empty() {
            return Self::empty();
        }
        let (ws, bs) = (k as usize / 64, k % 64);
        let mut words = vec![0u64; self.words.len() + ws + 1];
        for (i, &w) in self.words.iter().enumerate() {
            words[i + ws] |= w << bs;
            if bs != 0 {
                words[i + ws + 1] |= w >> (64 - bs);
            }
        }
        let mut s = TerminalSet { words };
        s.trim();
        s
    }

    pub fn union_with(&mut self, other: &TerminalSet) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    /// Minkowski sum `{a + b : a ∈ self, b ∈ other}`.
    pub fn minkowski(&self, other: &TerminalSet) -> Self {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = Self::empty();
        for k in small.iter() {
            out.union_with(&large.shifted(k));
        }
        out
    }

    pub fn is_subset(&self, other: &TerminalSet) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

impl fmt::Debug for TerminalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn naive(s: &BTreeSet<u32>) -> TerminalSet {
        TerminalSet::from_iter_values(s.iter().copied())
    }

    #[test]
    fn min_max_len() {
        let s = TerminalSet::from_iter_values([2, 3, 4]);
        assert_eq!((s.min(), s.max(), s.len()), (Some(2), Some(4), 3));
        assert_eq!(TerminalSet::singleton(0).to_vec(), vec![0]);
        assert_eq!(TerminalSet::singleton(200).max(), Some(200));
    }

    proptest! {
        #[test]
        fn minkowski_matches_pairwise_sums(
            a in proptest::collection::btree_set(0u32..150, 1..8),
            b in proptest::collection::btree_set(0u32..150, 1..8),
        ) {
            let expected: BTreeSet<u32> =
                a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect();
            prop_assert_eq!(naive(&a).minkowski(&naive(&b)).to_vec(),
                            expected.into_iter().collect::<Vec<_>>());
        }

        #[test]
        fn subset_matches_btreeset(
            a in proptest::collection::btree_set(0u32..130, 0..6),
            b in proptest::collection::btree_set(0u32..130, 0..6),
        ) {
            prop_assert_eq!(naive(&a).is_subset(&naive(&b)), a.is_subset(&b));
        }
    }
}
