//! Canonical Left dead ends born by day `n`, their census, and Hasse diagrams.
//!
//! The canonical ends born by day `n` are `0` together with `{·| S}` for every
//! non-empty antichain `S` of the canonical ends born by day `n - 1`. Antichains
//! are enumerated depth-first over a linear extension of the order, only ever
//! extending by elements incomparable with everything chosen so far.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::factor::Factorisation;
use crate::notation::format;
use crate::store::EndId;

/// Caps on work: a count of abstract steps (comparisons, antichains, sums)
/// and optional wall-clock time. Spending is cumulative over the budget's
/// lifetime; a refused charge is not recorded.
#[derive(Debug)]
pub struct Budget {
    max_nodes: u64,
    max_time: Option<Duration>,
    started: Instant,
    spent: AtomicU64,
}

impl Budget {
    pub const DEFAULT_NODES: u64 = 200_000_000;

    pub fn new(max_nodes: u64, max_seconds: Option<f64>) -> Self {
        Budget {
            max_nodes,
            max_time: max_seconds.map(Duration::from_secs_f64),
            started: Instant::now(),
            spent: AtomicU64::new(0),
        }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX, None)
    }

    pub fn spent(&self) -> u64 {
        self.spent.load(AtomicOrdering::Relaxed)
    }

    /// Records `n` steps, or fails with `Overflow` if that would exceed a cap.
    pub fn charge(&self, n: u64, stage: &str) -> Result<()> {
        let before = self.spent.fetch_add(n, AtomicOrdering::Relaxed);
        if before.saturating_add(n) > self.max_nodes {
            self.spent.fetch_sub(n, AtomicOrdering::Relaxed);
            return Err(Error::Overflow {
                stage: stage.to_string(),
                progress: format!(
                    "{before} steps spent, {n} more requested, cap {}",
                    self.max_nodes
                ),
            });
        }
        if let Some(limit) = self.max_time {
            let elapsed = self.started.elapsed();
            if elapsed > limit {
                return Err(Error::Overflow {
                    stage: stage.to_string(),
                    progress: format!(
                        "{:.1}s elapsed, cap {:.1}s, {} steps spent",
                        elapsed.as_secs_f64(),
                        limit.as_secs_f64(),
                        before
                    ),
                });
            }
        }
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(Self::DEFAULT_NODES, None)
    }
}

/// The canonical ends born by a given day, sorted by id. The covers relation
/// is derived on demand by [`Engine::covers`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DayPoset {
    pub day: u32,
    pub games: Vec<EndId>,
}

impl DayPoset {
    pub fn nonzero(&self) -> impl Iterator<Item = EndId> + '_ {
        self.games.iter().copied().filter(|g| !g.is_zero())
    }
}

/// One row of the census. `None` marks a count that could not be computed
/// within the budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusRow {
    pub day: u32,
    pub ends: Option<u64>,
    pub atoms: Option<u64>,
    pub molecules: Option<u64>,
    pub nontrivial_molecules: Option<u64>,
}

impl CensusRow {
    pub const TSV_HEADER: &'static str = "day\tends\tatoms\tmolecules\tnontrivial";

    /// Tab-separated row, with `?` for unavailable counts.
    pub fn tsv(&self) -> String {
        let cell = |v: Option<u64>| v.map_or_else(|| "?".to_string(), |v| v.to_string());
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.day,
            cell(self.ends),
            cell(self.atoms),
            cell(self.molecules),
            cell(self.nontrivial_molecules)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniquenessReport {
    pub day: u32,
    pub checked: usize,
    pub counterexamples: Vec<(EndId, Vec<Factorisation>)>,
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn clear_upto(&mut self, i: usize) {
        for (w, word) in self.0.iter_mut().enumerate() {
            let lo = w * 64;
            if lo + 64 <= i + 1 {
                *word = 0;
            } else if lo <= i {
                *word &= !0u64 << (i + 1 - lo);
            }
        }
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + b)
            })
        })
    }
}

/// Depth-first antichain emission. `incomp[i]` holds the positions
/// incomparable with `i`; antichains are emitted as increasing position lists.
fn antichains_from(
    start: usize,
    incomp: &[Bits],
    budget: &Budget,
    stop: &AtomicBool,
    stage: &str,
) -> Result<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    let mut first = incomp[start].clone();
    first.clear_upto(start);
    let mut chosen = vec![start as u32];
    let mut stack: Vec<(Bits, Vec<usize>, usize)> = Vec::new();
    let cands: Vec<usize> = first.ones().collect();
    stack.push((first, cands, 0));
    budget.charge(1, stage)?;
    out.push(chosen.clone());
    while let Some((cand, list, next)) = stack.last_mut() {
        if *next == list.len() {
            stack.pop();
            chosen.pop();
            continue;
        }
        if stop.load(AtomicOrdering::Relaxed) {
            return Ok(out);
        }
        let i = list[*next];
        *next += 1;
        let mut narrowed = cand.and(&incomp[i]);
        narrowed.clear_upto(i);
        chosen.push(i as u32);
        if let Err(e) = budget.charge(1, stage) {
            stop.store(true, AtomicOrdering::Relaxed);
            return Err(e);
        }
        out.push(chosen.clone());
        let list: Vec<usize> = narrowed.ones().collect();
        stack.push((narrowed, list, 0));
    }
    Ok(out)
}

impl Engine {
    /// The canonical ends born by day `n`. Days are cached on the engine, so
    /// each is generated once.
    pub fn generate_day(&mut self, n: u32, budget: &Budget, jobs: usize) -> Result<DayPoset> {
        while self.days.len() <= n as usize {
            let d = self.days.len() as u32;
            let prev = self.days[d as usize - 1].clone();
            let next = self.next_day(d, &prev, budget, jobs)?;
            self.days.push(next);
        }
        Ok(DayPoset {
            day: n,
            games: self.days[n as usize].to_vec(),
        })
    }

    /// Largest day generated so far.
    pub fn generated_days(&self) -> u32 {
        self.days.len() as u32 - 1
    }

    /// Installs the canonical ends born by day `n`, as read from a snapshot.
    /// Earlier days are recovered by birthday.
    pub(crate) fn install_day(&mut self, n: u32, games: &[EndId]) {
        let mut games = games.to_vec();
        games.sort_unstable();
        for d in self.days.len() as u32..=n {
            let day: Vec<EndId> = games.iter().copied().filter(|&g| self.birthday(g) <= d).collect();
            self.days.push(day.into());
        }
    }

    fn next_day(&mut self, d: u32, prev: &[EndId], budget: &Budget, jobs: usize) -> Result<Arc<[EndId]>> {
        let m = prev.len();
        let stage = format!("day {d} generation");
        budget.charge((m as u64).saturating_mul(m as u64), &format!("{stage}: comparing day {} games", d - 1))?;

        let mut comparable = vec![Bits::new(m); m];
        let mut below = vec![0usize; m];
        for i in 0..m {
            for j in i + 1..m {
                let (a, b) = (self.ge(prev[i], prev[j]), self.ge(prev[j], prev[i]));
                if a || b {
                    comparable[i].set(j);
                    comparable[j].set(i);
                }
                if a && !b {
                    below[i] += 1;
                } else if b && !a {
                    below[j] += 1;
                }
            }
        }
        // Linear extension: strict down-set size never decreases along it.
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&i| (below[i], prev[i]));
        let mut incomp = vec![Bits::new(m); m];
        for (pi, &i) in order.iter().enumerate() {
            for (pj, &j) in order.iter().enumerate() {
                if i != j && !comparable[i].get(j) {
                    incomp[pi].set(pj);
                }
            }
        }

        let stop = AtomicBool::new(false);
        let run = |s: usize| antichains_from(s, &incomp, budget, &stop, &stage);
        let parts: Vec<Result<Vec<Vec<u32>>>> = if jobs > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::Overflow {
                    stage: stage.clone(),
                    progress: format!("could not start {jobs} workers: {e}"),
                })?;
            pool.install(|| (0..m).into_par_iter().map(run).collect())
        } else {
            (0..m).map(run).collect()
        };

        let mut games = vec![EndId::ZERO];
        for part in parts {
            for antichain in part? {
                let mut options: Vec<EndId> = antichain.iter().map(|&p| prev[order[p as usize]]).collect();
                options.sort_unstable();
                let g = self.intern_sorted(options);
                self.canon_memo.insert(g, g);
                games.push(g);
            }
        }
        games.sort_unstable();
        games.dedup();
        Ok(games.into())
    }

    /// Number of non-empty antichains of `games`, by include/exclude
    /// recursion on the first remaining element.
    pub fn count_antichains(&mut self, games: &[EndId]) -> u64 {
        let m = games.len();
        let mut incomp = vec![Bits::new(m); m];
        for i in 0..m {
            for j in 0..m {
                if i != j && self.compare(games[i], games[j]).is_none() {
                    incomp[i].set(j);
                }
            }
        }
        let mut all = Bits::new(m);
        for i in 0..m {
            all.set(i);
        }
        let mut total = 0u64;
        let mut stack = vec![all];
        while let Some(cand) = stack.pop() {
            let Some(x) = cand.ones().next() else {
                total += 1;
                continue;
            };
            let mut without = cand.clone();
            without.0[x / 64] &= !(1 << (x % 64));
            let with = without.and(&incomp[x]);
            stack.push(without);
            stack.push(with);
        }
        total - 1
    }

    /// Census of day `n`. Counts that exceed the budget are left as `None`.
    pub fn census(&mut self, n: u32, budget: &Budget, jobs: usize) -> CensusRow {
        let (ends, atoms) = match self.generate_day(n, budget, jobs) {
            Ok(day) => {
                let atoms = day.nonzero().filter(|&g| self.is_atom(g).unwrap_or(false)).count();
                (Some(day.games.len() as u64), Some(atoms as u64))
            }
            Err(_) => (None, None),
        };
        CensusRow {
            day: n,
            ends,
            atoms,
            molecules: self.molecule_count(n, budget, jobs).ok(),
            nontrivial_molecules: self.nontrivial_molecule_count(n, budget, jobs).ok(),
        }
    }

    /// Molecules born by day `n`: distinct sums `h + k` of non-zero games
    /// with `birth(h) + birth(k) ≤ n`. Only day `n - 1` is generated.
    pub fn molecule_count(&mut self, n: u32, budget: &Budget, jobs: usize) -> Result<u64> {
        if n < 2 {
            return Ok(0);
        }
        let pool: Vec<EndId> = self.generate_day(n - 1, budget, jobs)?.nonzero().collect();
        Ok(self.distinct_sums(&pool, n, budget, "molecule census")?.len() as u64)
    }

    /// Molecules born by day `n` not divisible by `1̄`. Both parts of such a
    /// sum are themselves not divisible by `1̄`, hence born on day 2 or later,
    /// so only day `n - 2` is generated.
    pub fn nontrivial_molecule_count(&mut self, n: u32, budget: &Budget, jobs: usize) -> Result<u64> {
        if n < 4 {
            return Ok(0);
        }
        let one = self.integer(1);
        let day = self.generate_day(n - 2, budget, jobs)?;
        let pool: Vec<EndId> = day
            .nonzero()
            .filter(|&g| self.divides(one, g).is_none())
            .collect();
        let sums = self.distinct_sums(&pool, n, budget, "non-trivial molecule census")?;
        Ok(sums.into_iter().filter(|&s| self.divides(one, s).is_none()).count() as u64)
    }

    fn distinct_sums(&mut self, pool: &[EndId], n: u32, budget: &Budget, stage: &str) -> Result<HashSet<EndId>> {
        let mut by_birth: BTreeMap<u32, Vec<EndId>> = BTreeMap::new();
        for &g in pool {
            by_birth.entry(self.birthday(g)).or_default().push(g);
        }
        let births: Vec<u32> = by_birth.keys().copied().collect();
        let mut sums = HashSet::new();
        for (bi, &b1) in births.iter().enumerate() {
            for &b2 in &births[bi..] {
                if b1 + b2 > n {
                    break;
                }
                let (xs, ys) = (&by_birth[&b1], &by_birth[&b2]);
                for (i, &h) in xs.iter().enumerate() {
                    let ks = if b1 == b2 { &ys[i..] } else { &ys[..] };
                    budget.charge(ks.len() as u64, stage)?;
                    for &k in ks {
                        sums.insert(self.sum_canonical(h, k));
                    }
                }
            }
        }
        Ok(sums)
    }

    /// Checks that every non-zero game born by day `n` has exactly one
    /// factorisation, collecting those that do not.
    pub fn verify_unique_factorisation(&mut self, n: u32, budget: &Budget, jobs: usize) -> Result<UniquenessReport> {
        let day = self.generate_day(n, budget, jobs)?;
        let mut report = UniquenessReport {
            day: n,
            checked: 0,
            counterexamples: Vec::new(),
        };
        for g in day.nonzero() {
            budget.charge(1, "unique factorisation check")?;
            let fs = self.factorisations(g);
            report.checked += 1;
            if fs.len() != 1 {
                report.counterexamples.push((g, fs.to_vec()));
            }
        }
        Ok(report)
    }

    /// Covering pairs `(upper, lower)` of the strict order on `games`.
    pub fn covers(&mut self, games: &[EndId], budget: &Budget) -> Result<Vec<(EndId, EndId)>> {
        let m = games.len();
        let stage = "covers";
        budget.charge((m as u64).saturating_mul(m as u64), stage)?;
        let mut down = vec![Bits::new(m); m];
        for i in 0..m {
            for j in 0..m {
                if i != j && self.gt(games[i], games[j]) {
                    down[i].set(j);
                }
            }
        }
        let mut out = Vec::new();
        for i in 0..m {
            budget.charge(m as u64, stage)?;
            let mut covered = down[i].clone();
            for j in down[i].ones() {
                for (w, word) in covered.0.iter_mut().enumerate() {
                    *word &= !down[j].0[w];
                }
            }
            out.extend(covered.ones().map(|j| (games[i], games[j])));
        }
        Ok(out)
    }

    /// Graphviz digraph of the covers relation on the non-zero canonical
    /// ends born by day `n`, with an edge from each game to those it covers.
    pub fn hasse_dot(&mut self, n: u32, budget: &Budget, jobs: usize) -> Result<String> {
        let games: Vec<EndId> = self.generate_day(n, budget, jobs)?.nonzero().collect();
        let covers = self.covers(&games, budget)?;
        let mut out = format!("digraph day{n} {{\n  node [shape=plaintext];\n");
        for &g in &games {
            writeln!(out, "  g{} [label=\"{}\"];", g.raw(), format(self, g)).unwrap();
        }
        for (a, b) in covers {
            writeln!(out, "  g{} -> g{};", a.raw(), b.raw()).unwrap();
        }
        out.push_str("}\n");
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_days() {
        let mut e = Engine::new();
        let b = Budget::default();
        let sizes: Vec<usize> = (0..=4).map(|n| e.generate_day(n, &b, 1).unwrap().games.len()).collect();
        assert_eq!(sizes, [1, 2, 4, 10, 52]);
        let day2 = e.generate_day(2, &b, 1).unwrap();
        let expected = {
            let mut v = vec![EndId::ZERO, e.integer(1), e.integer(2), e.waiting(2)];
            v.sort();
            v
        };
        assert_eq!(day2.games, expected);
    }

    #[test]
    fn parallel_generation_matches() {
        let b = Budget::default();
        let mut a = Engine::new();
        let mut c = Engine::new();
        let seq = a.generate_day(4, &b, 1).unwrap();
        let par = c.generate_day(4, &b, 4).unwrap();
        let fa: Vec<String> = seq.games.iter().map(|&g| format(&a, g)).collect();
        let fc: Vec<String> = par.games.iter().map(|&g| format(&c, g)).collect();
        assert_eq!(fa, fc);
    }

    #[test]
    fn independent_antichain_count() {
        let mut e = Engine::new();
        let b = Budget::default();
        for n in 1..=4 {
            let prev = e.generate_day(n - 1, &b, 1).unwrap();
            let ends = e.generate_day(n, &b, 1).unwrap().games.len() as u64;
            assert_eq!(ends, 1 + e.count_antichains(&prev.games), "day {n}");
        }
    }

    #[test]
    fn census_rows() {
        let mut e = Engine::new();
        let b = Budget::default();
        let row = e.census(3, &b, 1);
        assert_eq!(row.tsv(), "3\t10\t6\t3\t0");
        let row = e.census(4, &b, 1);
        assert_eq!(row.tsv(), "4\t52\t41\t10\t1");
    }

    #[test]
    fn overflow_is_reported() {
        let mut e = Engine::new();
        let tight = Budget::new(100, None);
        assert!(matches!(e.generate_day(4, &tight, 1), Err(Error::Overflow { .. })));
        let row = e.census(4, &tight, 1);
        assert_eq!(row.ends, None);
        assert!(row.tsv().contains('?'));
    }

    #[test]
    fn hasse_small() {
        let mut e = Engine::new();
        let b = Budget::default();
        let dot = e.hasse_dot(1, &b, 1).unwrap();
        assert!(dot.contains("label=\"#1\""));
        assert!(!dot.contains("->"));
        let dot = e.hasse_dot(2, &b, 1).unwrap();
        assert_eq!(dot.matches("label=").count(), 3);
        // #1 > W2 and #2 > W2, while #1 and #2 are incomparable.
        let (one, two, w2) = (e.integer(1), e.integer(2), e.waiting(2));
        assert!(dot.contains(&format!("g{} -> g{};", one.raw(), w2.raw())));
        assert!(dot.contains(&format!("g{} -> g{};", two.raw(), w2.raw())));
        assert_eq!(dot.matches("->").count(), 2);
    }

    #[test]
    fn unique_factorisation_small_days() {
        let mut e = Engine::new();
        let b = Budget::default();
        let r = e.verify_unique_factorisation(3, &b, 1).unwrap();
        assert_eq!(r.checked, 9);
        assert!(r.counterexamples.is_empty());
    }
}
