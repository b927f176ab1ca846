//! Terminal lengths, race, birthday and flexibility.
//!
//! Every value here is computed on forms when a node is interned and read
//! back from the per-node table. For Left dead ends these form values are
//! invariant under equality, so they can be quoted for any representative.

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::notation::format;
use crate::store::EndId;
use crate::terminal::TerminalSet;

/// Flexibility together with a longest flexible run: successive versatile
/// options from the game down to the first integer reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlexInfo {
    pub flex: u32,
    /// `run[0]` is the game itself; the run has `flex` moves.
    pub run: Vec<EndId>,
}

impl Engine {
    pub fn terminal_set(&self, g: EndId) -> &TerminalSet {
        &self.facts(g).terminal
    }

    /// Length of a shortest run to `0`.
    pub fn race(&self, g: EndId) -> u32 {
        self.facts(g).terminal.min().unwrap()
    }

    pub fn is_integer(&self, g: EndId) -> bool {
        self.facts(g).terminal.len() == 1
    }

    pub fn flex(&self, g: EndId) -> u32 {
        self.facts(g).flex
    }

    pub fn flexibility(&self, g: EndId) -> FlexInfo {
        let mut run = vec![g];
        let mut cur = g;
        while !self.is_integer(cur) {
            let want = self.flex(cur) - 1;
            cur = *self
                .options(cur)
                .iter()
                .find(|&&o| self.flex(o) == want)
                .expect("a non-integer has an option of flexibility one less");
            run.push(cur);
        }
        FlexInfo {
            flex: self.flex(g),
            run,
        }
    }

    /// Options `g'` with `race(g') = race(g) - 1`.
    pub fn racing_options(&self, g: EndId) -> Vec<EndId> {
        let want = self.race(g).wrapping_sub(1);
        self.filter_options(g, |e, o| e.race(o) == want)
    }

    /// Options `g'` with `birth(g') = birth(g) - 1`.
    pub fn stalling_options(&self, g: EndId) -> Vec<EndId> {
        let want = self.birthday(g).wrapping_sub(1);
        self.filter_options(g, |e, o| e.birthday(o) == want)
    }

    /// Options `g'` with `flex(g') ≥ flex(g) - 1`.
    pub fn versatile_options(&self, g: EndId) -> Vec<EndId> {
        let want = self.flex(g).saturating_sub(1);
        self.filter_options(g, |e, o| e.flex(o) >= want)
    }

    pub fn racing_option(&self, g: EndId) -> Result<EndId> {
        self.racing_options(g).first().copied().ok_or(Error::ZeroGame)
    }

    pub fn stalling_option(&self, g: EndId) -> Result<EndId> {
        self.stalling_options(g).first().copied().ok_or(Error::ZeroGame)
    }

    pub fn versatile_option(&self, g: EndId) -> Result<EndId> {
        self.versatile_options(g).first().copied().ok_or(Error::ZeroGame)
    }

    fn filter_options(&self, g: EndId, keep: impl Fn(&Engine, EndId) -> bool) -> Vec<EndId> {
        self.options(g).iter().copied().filter(|&o| keep(self, o)).collect()
    }

    /// `flex(g + h)` by recursion on the sum, checked against the closed form:
    /// integers contribute their value to a non-integer's flexibility, two
    /// non-integers give `max(birth g + flex h, flex g + birth h)`.
    pub fn flex_of_sum_check(&mut self, g: EndId, h: EndId) -> Result<u32> {
        let s = self.sum(g, h);
        let actual = self.flex(s);
        let expected = match (self.as_integer(g), self.as_integer(h)) {
            (Some(_), Some(_)) => 0,
            (Some(n), None) => self.flex(h) + n,
            (None, Some(n)) => self.flex(g) + n,
            (None, None) => (self.birthday(g) + self.flex(h)).max(self.flex(g) + self.birthday(h)),
        };
        if actual == expected {
            Ok(actual)
        } else {
            Err(Error::ClosedFormMismatch {
                g: format(self, g),
                h: format(self, h),
                expected,
                actual,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::parse;

    #[test]
    fn worked_terminal_set() {
        let mut e = Engine::new();
        assert_eq!(e.terminal_set(EndId::ZERO).to_vec(), vec![0]);
        let g = parse(&mut e, "{|W2,#3}").unwrap();
        assert_eq!(e.terminal_set(g).to_vec(), vec![2, 3, 4]);
        assert_eq!((e.race(g), e.birthday(g)), (2, 4));
        let w3 = e.waiting(3);
        assert_eq!(e.terminal_set(w3).to_vec(), vec![1, 2, 3]);
        for n in 0..6 {
            let i = e.integer(n);
            assert_eq!(e.terminal_set(i).to_vec(), vec![n]);
            assert_eq!((e.race(i), e.birthday(i)), (n, n));
        }
    }

    #[test]
    fn integers() {
        let mut e = Engine::new();
        assert!(e.is_integer(EndId::ZERO));
        let w2 = e.waiting(2);
        assert!(!e.is_integer(w2));
        let g = parse(&mut e, "{|{|0}}").unwrap();
        assert!(e.is_integer(g));
        assert_eq!(g, e.integer(2));
    }

    #[test]
    fn flexibility_values() {
        let mut e = Engine::new();
        for n in 1..=8 {
            let w = e.waiting(n);
            assert_eq!(e.flex(w), n - 1);
        }
        let g = parse(&mut e, "{|W3,#7}").unwrap();
        let info = e.flexibility(g);
        assert_eq!(info.flex, 3);
        assert_eq!(info.run.len(), 4);
        assert!(info.run[..3].iter().all(|&x| !e.is_integer(x)));
        assert!(e.is_integer(*info.run.last().unwrap()));
        let s = parse(&mut e, "{|0,#2} + #1").unwrap();
        assert_eq!(e.flex(s), 2);
    }

    #[test]
    fn flex_closed_forms() {
        let mut e = Engine::new();
        let (a, b) = (e.integer(2), e.integer(3));
        assert_eq!(e.flex_of_sum_check(a, b), Ok(0));
        let g = parse(&mut e, "{|0,#2}").unwrap();
        let one = e.integer(1);
        assert_eq!(e.flex_of_sum_check(g, one), Ok(2));
        assert_ne!(e.birthday(g) + e.flex(one), 2);
        let w2 = e.waiting(2);
        assert_eq!(e.flex_of_sum_check(w2, w2), Ok(3));
    }

    #[test]
    fn option_classes() {
        let mut e = Engine::new();
        let w3 = e.waiting(3);
        assert_eq!(e.racing_options(w3), vec![EndId::ZERO]);
        let three = e.integer(3);
        assert_eq!(e.stalling_options(three), vec![e.integer(2)]);
        let g = parse(&mut e, "{|W3,#7}").unwrap();
        assert_eq!(e.versatile_options(g), vec![w3]);
        assert!(e.racing_options(EndId::ZERO).is_empty());
        assert_eq!(e.racing_option(EndId::ZERO), Err(Error::ZeroGame));
        assert_eq!(e.stalling_option(EndId::ZERO), Err(Error::ZeroGame));
    }
}
