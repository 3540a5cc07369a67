//! Exhaustive schedule-parameter search.
//!
//! The design space is the product of
//!
//! * all partitions of the plant set `{1..N}` into `v = N/M` blocks of
//!   size `M` — enumerated *unordered*, blocks canonically ordered by
//!   smallest element (the fully ordered space is identical up to block
//!   relabeling, a `v!`-fold duplication), and
//! * all ordered `v`-tuples of grid probabilities `p_j = k_j·h` that sum
//!   to 1 — the sum test is exact rational arithmetic, never floating
//!   point.
//!
//! A candidate is feasible when every plant admits a certificate at its
//! block's probability.  Feasibility couples a plant only with its own
//! block probability, so per-`(plant, probability)` results are memoized
//! across candidates, and the partition walk prunes any block whose
//! members are already known infeasible at that block's probability.
//! Pruning only skips candidates that would have failed, so the first
//! feasible candidate — probability vectors outer, partitions inner, both
//! lexicographic — is the same one a naive nested loop finds.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::certify::{self, StabilityCertificate};
use crate::error::Error;
use crate::model::{closed_loop_matrix, NcsConfig};
use crate::rational::{self, Prob};
use crate::tol::Tolerances;
use crate::Result;

/// A partition of `{1..N}` into equal-size blocks, canonically ordered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds a partition from blocks, canonicalizing the order (each
    /// block ascending, blocks by smallest element) and validating:
    /// at least two blocks, equal sizes, disjoint, union `{1..N}`.
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        if blocks.len() < 2 {
            return Err(Error::InvalidPartition {
                reason: "fewer than two blocks",
            });
        }
        let m = blocks[0].len();
        if m == 0 || blocks.iter().any(|b| b.len() != m) {
            return Err(Error::InvalidPartition {
                reason: "blocks must share one nonzero size",
            });
        }
        for block in &mut blocks {
            block.sort_unstable();
        }
        blocks.sort_by_key(|b| b[0]);
        let n = blocks.len() * m;
        let mut seen = alloc::vec![false; n + 1];
        for &plant in blocks.iter().flatten() {
            if plant == 0 || plant > n {
                return Err(Error::InvalidPartition {
                    reason: "plant id outside 1..N",
                });
            }
            if seen[plant] {
                return Err(Error::InvalidPartition {
                    reason: "plant id repeated across blocks",
                });
            }
            seen[plant] = true;
        }
        Ok(Partition { blocks })
    }

    /// Number of blocks `v`.
    pub fn v(&self) -> usize {
        self.blocks.len()
    }

    /// Block size `M`.
    pub fn m(&self) -> usize {
        self.blocks[0].len()
    }

    /// Number of plants `N = v·M`.
    pub fn n(&self) -> usize {
        self.v() * self.m()
    }

    /// The blocks, each ascending, ordered by smallest element.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Zero-based position of the block containing the plant — exactly
    /// one exists for every plant in `1..N`.
    pub fn block_of(&self, plant: usize) -> Result<usize> {
        self.blocks
            .iter()
            .position(|b| b.binary_search(&plant).is_ok())
            .ok_or(Error::UnknownPlant { plant })
    }
}

/// A grid probability vector: `v` entries `p_j = k_j·h` summing to 1
/// exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbabilityVector {
    probs: Vec<Prob>,
    h: Prob,
    r: i64,
}

impl ProbabilityVector {
    /// Builds a vector, validating: at least two entries, every entry an
    /// integer multiple of `h` inside `]0,1[`, exact sum 1.
    pub fn new(probs: Vec<Prob>, h: Prob) -> Result<Self> {
        rational::check_probability(h)?;
        if probs.len() < 2 {
            return Err(Error::TooFewBlocks);
        }
        for &p in &probs {
            if rational::check_probability(p).is_err() {
                return Err(Error::InvalidProbabilityVector {
                    reason: "entry outside ]0,1[",
                });
            }
            match rational::exact_multiple(p, h) {
                Some(k) if k >= 1 => {}
                _ => {
                    return Err(Error::InvalidProbabilityVector {
                        reason: "entry is not a positive multiple of the step",
                    })
                }
            }
        }
        if !rational::sums_to_one(&probs) {
            return Err(Error::InvalidProbabilityVector {
                reason: "entries do not sum to 1",
            });
        }
        let r = rational::grid_max_multiple(h)?;
        Ok(ProbabilityVector { probs, h, r })
    }

    /// Number of entries `v`.
    pub fn v(&self) -> usize {
        self.probs.len()
    }

    /// The entries, exact.
    pub fn probs(&self) -> &[Prob] {
        &self.probs
    }

    /// The grid step `h`.
    pub fn h(&self) -> Prob {
        self.h
    }

    /// Largest integer `r` with `r·h < 1`.
    pub fn r(&self) -> i64 {
        self.r
    }
}

/// Lazy stream over every partition of `{1..N}` into `N/M` blocks of
/// size `M`, in canonical (anchor-lexicographic) order.
pub fn enumerate_partitions(n: usize, m: usize) -> Result<PartitionIter> {
    if m == 0 || m >= n {
        return Err(Error::InvalidCapacity { n, m });
    }
    if !n.is_multiple_of(m) {
        return Err(Error::NotDivisible { n, m });
    }
    Ok(PartitionIter::new(n, m))
}

/// One in-progress block of the partition walk: its anchor (smallest
/// element unused when the block was opened), the pool of candidate
/// companions, and the current companion combination (indices into the
/// pool, strictly increasing).
struct Level {
    anchor: usize,
    pool: Vec<usize>,
    comb: Vec<usize>,
}

/// Iterator behind [`enumerate_partitions`].
pub struct PartitionIter {
    n: usize,
    m: usize,
    v: usize,
    used: Vec<bool>,
    stack: Vec<Level>,
    started: bool,
    done: bool,
}

impl PartitionIter {
    fn new(n: usize, m: usize) -> Self {
        PartitionIter {
            n,
            m,
            v: n / m,
            used: alloc::vec![false; n + 1],
            stack: Vec::new(),
            started: false,
            done: false,
        }
    }

    /// Opens blocks with first-combination companions until `v` blocks
    /// stand.  Always succeeds here: with all plants admissible the pool
    /// can never run short (sizes work out by divisibility).
    fn descend(&mut self) {
        while self.stack.len() < self.v {
            let anchor = (1..=self.n).find(|&x| !self.used[x]).expect("pool exhausted");
            self.used[anchor] = true;
            let pool: Vec<usize> = (anchor + 1..=self.n).filter(|&x| !self.used[x]).collect();
            let comb: Vec<usize> = (0..self.m - 1).collect();
            for &i in &comb {
                self.used[pool[i]] = true;
            }
            self.stack.push(Level { anchor, pool, comb });
        }
    }

    /// Advances the deepest level to its next companion combination,
    /// popping exhausted levels.  Returns false when the walk is over.
    fn advance(&mut self) -> bool {
        while let Some(level) = self.stack.last_mut() {
            for &i in &level.comb {
                self.used[level.pool[i]] = false;
            }
            if next_combination(&mut level.comb, level.pool.len()) {
                for &i in &level.comb {
                    self.used[level.pool[i]] = true;
                }
                return true;
            }
            self.used[level.anchor] = false;
            self.stack.pop();
        }
        false
    }

    fn current(&self) -> Partition {
        let blocks = self
            .stack
            .iter()
            .map(|level| {
                let mut block = Vec::with_capacity(self.m);
                block.push(level.anchor);
                block.extend(level.comb.iter().map(|&i| level.pool[i]));
                block
            })
            .collect();
        // Canonical by construction: anchors increase, companions ascend.
        Partition { blocks }
    }
}

impl Iterator for PartitionIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.descend();
        } else if self.advance() {
            self.descend();
        } else {
            self.done = true;
            return None;
        }
        Some(self.current())
    }
}

/// Next strictly-increasing `c`-combination of `{0..pool_len-1}` in
/// lexicographic order; false when exhausted.
fn next_combination(comb: &mut [usize], pool_len: usize) -> bool {
    let c = comb.len();
    for i in (0..c).rev() {
        if comb[i] < pool_len - (c - i) {
            comb[i] += 1;
            for k in i + 1..c {
                comb[k] = comb[k - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Lazy stream over every ordered `v`-tuple of grid probabilities
/// summing exactly to 1, lexicographically ascending.  The stream is
/// empty when the grid admits no such tuple (e.g. `1/h` not an integer).
pub fn enumerate_probability_vectors(v: usize, h: Prob) -> Result<ProbabilityVectorIter> {
    if v < 2 {
        return Err(Error::TooFewBlocks);
    }
    rational::check_probability(h)?;
    let r = rational::grid_max_multiple(h)?;
    // Σ k_j·h = 1 needs numer(h) | denom(h); the parts then sum to S.
    let (num, den) = (*h.numer(), *h.denom());
    let total = if den % num == 0 { den / num } else { 0 };
    let feasible = total >= v as i64;
    let mut ks = alloc::vec![1i64; v];
    if feasible {
        ks[v - 1] = total - (v as i64 - 1);
    }
    Ok(ProbabilityVectorIter {
        v,
        h,
        r,
        total,
        ks,
        started: false,
        done: !feasible,
    })
}

/// Iterator behind [`enumerate_probability_vectors`].
pub struct ProbabilityVectorIter {
    v: usize,
    h: Prob,
    r: i64,
    total: i64,
    ks: Vec<i64>,
    started: bool,
    done: bool,
}

impl ProbabilityVectorIter {
    fn advance(&mut self) -> bool {
        // Increment the latest position that still leaves every later
        // part at least 1; reset the tail minimal.
        let v = self.v;
        let mut prefix: i64 = self.ks[..v - 1].iter().sum();
        for i in (0..v - 1).rev() {
            prefix -= self.ks[i];
            let remaining = self.total - prefix - (self.ks[i] + 1);
            if remaining >= (v - 1 - i) as i64 {
                self.ks[i] += 1;
                for k in i + 1..v - 1 {
                    self.ks[k] = 1;
                }
                self.ks[v - 1] = remaining - (v - 2 - i) as i64;
                return true;
            }
        }
        false
    }

    fn current(&self) -> ProbabilityVector {
        let probs = self
            .ks
            .iter()
            .map(|&k| Prob::new(k, 1) * self.h)
            .collect();
        ProbabilityVector {
            probs,
            h: self.h,
            r: self.r,
        }
    }
}

impl Iterator for ProbabilityVectorIter {
    type Item = ProbabilityVector;

    fn next(&mut self) -> Option<ProbabilityVector> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
        } else if !self.advance() {
            self.done = true;
            return None;
        }
        Some(self.current())
    }
}

/// A found candidate: the partition, its probability vector, and one
/// feasibility witness per plant (index `i` at position `i−1`).
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult<C> {
    /// The feasible partition.
    pub partition: Partition,
    /// The feasible probability vector.
    pub probabilities: ProbabilityVector,
    /// Per-plant witnesses, in plant-id order.
    pub items: Vec<C>,
}

/// Outcome of a search run.
#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome<C> {
    /// First feasible candidate in enumeration order.
    Found(SearchResult<C>),
    /// The whole space was enumerated without a feasible candidate.
    Infeasible,
    /// The stop callback fired before the space was exhausted.
    BudgetExhausted,
}

/// Generic exhaustive search: probability vectors outer, partitions
/// inner, both lexicographic.  `feasible(plant, p)` returns a witness
/// when the plant is feasible at probability `p`; results are memoized.
/// `should_stop` is polled between candidates; a `true` aborts with
/// [`SearchOutcome::BudgetExhausted`].
pub fn search_with<C: Clone>(
    n: usize,
    m: usize,
    h: Prob,
    mut feasible: impl FnMut(usize, Prob) -> Result<Option<C>>,
    mut should_stop: impl FnMut() -> bool,
) -> Result<SearchOutcome<C>> {
    if m == 0 || m >= n {
        return Err(Error::InvalidCapacity { n, m });
    }
    if !n.is_multiple_of(m) {
        return Err(Error::NotDivisible { n, m });
    }
    let v = n / m;
    let mut memo: BTreeMap<(usize, Prob), Option<C>> = BTreeMap::new();
    let mut stopped = false;

    for pv in enumerate_probability_vectors(v, h)? {
        if should_stop() {
            stopped = true;
            break;
        }
        let mut known = |plant: usize, p: Prob, memo: &mut BTreeMap<(usize, Prob), Option<C>>|
         -> Result<bool> {
            if let Some(cached) = memo.get(&(plant, p)) {
                return Ok(cached.is_some());
            }
            let witness = feasible(plant, p)?;
            let hit = witness.is_some();
            memo.insert((plant, p), witness);
            Ok(hit)
        };

        // Depth-first canonical partition walk; a block is only ever
        // assembled from plants feasible at that block's probability, so
        // pruned branches are exactly the infeasible candidates.
        let mut used = alloc::vec![false; n + 1];
        let mut blocks: Vec<Vec<usize>> = Vec::with_capacity(v);
        let found = walk(
            n, m, v, &mut used, &mut blocks, pv.probs(), &mut known, &mut memo,
        )?;
        if found {
            let partition = Partition::new(blocks)?;
            let mut items = Vec::with_capacity(n);
            for plant in 1..=n {
                let p = pv.probs()[partition.block_of(plant)?];
                let witness = memo
                    .get(&(plant, p))
                    .and_then(|w| w.clone())
                    .expect("feasible candidate must have memoized witnesses");
                items.push(witness);
            }
            return Ok(SearchOutcome::Found(SearchResult {
                partition,
                probabilities: pv,
                items,
            }));
        }
    }
    if stopped {
        Ok(SearchOutcome::BudgetExhausted)
    } else {
        Ok(SearchOutcome::Infeasible)
    }
}

/// Recursive block construction for [`search_with`]; `blocks` holds the
/// feasible prefix and receives the full partition on success.
#[allow(clippy::too_many_arguments)]
fn walk<C: Clone>(
    n: usize,
    m: usize,
    v: usize,
    used: &mut [bool],
    blocks: &mut Vec<Vec<usize>>,
    probs: &[Prob],
    known: &mut impl FnMut(usize, Prob, &mut BTreeMap<(usize, Prob), Option<C>>) -> Result<bool>,
    memo: &mut BTreeMap<(usize, Prob), Option<C>>,
) -> Result<bool> {
    if blocks.len() == v {
        return Ok(true);
    }
    let p = probs[blocks.len()];
    let anchor = match (1..=n).find(|&x| !used[x]) {
        Some(a) => a,
        None => return Ok(false),
    };
    // The smallest unused plant must open this block (canonical order),
    // so its infeasibility kills the whole branch.
    if !known(anchor, p, memo)? {
        return Ok(false);
    }
    let mut pool = Vec::new();
    #[allow(clippy::needless_range_loop)] // plant ids index `used`; `known` is fallible
    for x in anchor + 1..=n {
        if !used[x] && known(x, p, memo)? {
            pool.push(x);
        }
    }
    if pool.len() < m - 1 {
        return Ok(false);
    }
    let mut comb: Vec<usize> = (0..m - 1).collect();
    used[anchor] = true;
    loop {
        let mut block = Vec::with_capacity(m);
        block.push(anchor);
        block.extend(comb.iter().map(|&i| pool[i]));
        for &x in &block[1..] {
            used[x] = true;
        }
        blocks.push(block);
        if walk(n, m, v, used, blocks, probs, known, memo)? {
            return Ok(true);
        }
        let block = blocks.pop().expect("pushed above");
        for &x in &block[1..] {
            used[x] = false;
        }
        if !next_combination(&mut comb, pool.len()) {
            break;
        }
    }
    used[anchor] = false;
    Ok(false)
}

/// Certificate search over a configuration's plants: a candidate is
/// feasible when every plant's closed/open mode pair admits a verified
/// certificate at its block probability.
///
/// Every plant needs its gain; the caller is responsible for the
/// standing assumptions (`check_assumptions`).
pub fn search_schedule_parameters(
    config: &NcsConfig,
    h: Prob,
    kappa: f64,
) -> Result<SearchOutcome<StabilityCertificate>> {
    search_schedule_parameters_with(config, h, kappa, &Tolerances::default(), || false)
}

/// [`search_schedule_parameters`] with explicit tolerances and a stop
/// callback (wall-clock budgets live in the caller).
pub fn search_schedule_parameters_with(
    config: &NcsConfig,
    h: Prob,
    kappa: f64,
    tol: &Tolerances,
    should_stop: impl FnMut() -> bool,
) -> Result<SearchOutcome<StabilityCertificate>> {
    let mut modes = Vec::with_capacity(config.n());
    for plant in &config.plants {
        let a_s = closed_loop_matrix(plant).map_err(|e| match e {
            Error::GainNotSet { plant } => Error::SynthesisRequired { plant },
            other => other,
        })?;
        modes.push((a_s, plant.a.clone()));
    }
    search_with(
        config.n(),
        config.capacity,
        h,
        |plant, p| {
            let (a_s, a_u) = &modes[plant - 1];
            certify::find_certificate_with(a_s, a_u, p, kappa, tol)
        },
        should_stop,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{NcsConfig, PlantModel};
    use nalgebra::DMatrix;
    use num_rational::Ratio;

    fn prob(n: i64, d: i64) -> Prob {
        Ratio::new(n, d)
    }

    fn collect_partitions(n: usize, m: usize) -> Vec<Partition> {
        enumerate_partitions(n, m).unwrap().collect()
    }

    #[test]
    fn partition_counts_match_formula() {
        // N! / ((M!)^v · v!)
        assert_eq!(collect_partitions(2, 1).len(), 1);
        assert_eq!(collect_partitions(4, 2).len(), 3);
        assert_eq!(collect_partitions(6, 2).len(), 15);
        assert_eq!(collect_partitions(6, 3).len(), 10);
        assert_eq!(collect_partitions(9, 3).len(), 280);
    }

    #[test]
    fn partition_enumeration_is_canonical_and_exact() {
        let got = collect_partitions(4, 2);
        let want: Vec<Vec<Vec<usize>>> = alloc::vec![
            alloc::vec![alloc::vec![1, 2], alloc::vec![3, 4]],
            alloc::vec![alloc::vec![1, 3], alloc::vec![2, 4]],
            alloc::vec![alloc::vec![1, 4], alloc::vec![2, 3]],
        ];
        let got_blocks: Vec<_> = got.iter().map(|p| p.blocks().to_vec()).collect();
        assert_eq!(got_blocks, want);
    }

    #[test]
    fn every_partition_covers_each_plant_once() {
        for part in collect_partitions(8, 2) {
            for plant in 1..=8 {
                // Exactly one block contains the plant.
                let hits = part
                    .blocks()
                    .iter()
                    .filter(|b| b.contains(&plant))
                    .count();
                assert_eq!(hits, 1);
                assert!(part.block_of(plant).is_ok());
            }
            assert!(matches!(
                part.block_of(9),
                Err(Error::UnknownPlant { plant: 9 })
            ));
        }
    }

    #[test]
    fn partition_preconditions() {
        assert!(matches!(
            enumerate_partitions(4, 3),
            Err(Error::NotDivisible { n: 4, m: 3 })
        ));
        assert!(matches!(
            enumerate_partitions(4, 4),
            Err(Error::InvalidCapacity { .. })
        ));
        assert!(matches!(
            enumerate_partitions(4, 0),
            Err(Error::InvalidCapacity { .. })
        ));
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(alloc::vec![alloc::vec![2, 1], alloc::vec![4, 3]]).is_ok());
        assert!(Partition::new(alloc::vec![alloc::vec![1, 2]]).is_err());
        assert!(Partition::new(alloc::vec![alloc::vec![1, 2], alloc::vec![2, 3]]).is_err());
        assert!(Partition::new(alloc::vec![alloc::vec![1, 2], alloc::vec![4, 5]]).is_err());
        assert!(Partition::new(alloc::vec![alloc::vec![1], alloc::vec![2, 3]]).is_err());
    }

    #[test]
    fn probability_vectors_quarter_grid() {
        let got: Vec<Vec<Prob>> = enumerate_probability_vectors(2, prob(1, 4))
            .unwrap()
            .map(|pv| pv.probs().to_vec())
            .collect();
        assert_eq!(
            got,
            alloc::vec![
                alloc::vec![prob(1, 4), prob(3, 4)],
                alloc::vec![prob(1, 2), prob(1, 2)],
                alloc::vec![prob(3, 4), prob(1, 4)],
            ]
        );
    }

    #[test]
    fn probability_vectors_half_grid_and_empty_grid() {
        let got: Vec<_> = enumerate_probability_vectors(2, prob(1, 2))
            .unwrap()
            .collect();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].probs(), &[prob(1, 2), prob(1, 2)]);

        // No multiples of 3/10 sum to 1.
        let got: Vec<_> = enumerate_probability_vectors(2, prob(3, 10))
            .unwrap()
            .collect();
        assert!(got.is_empty());
    }

    #[test]
    fn probability_vectors_three_blocks() {
        let got: Vec<Vec<Prob>> = enumerate_probability_vectors(3, prob(1, 4))
            .unwrap()
            .map(|pv| pv.probs().to_vec())
            .collect();
        assert_eq!(
            got,
            alloc::vec![
                alloc::vec![prob(1, 4), prob(1, 4), prob(1, 2)],
                alloc::vec![prob(1, 4), prob(1, 2), prob(1, 4)],
                alloc::vec![prob(1, 2), prob(1, 4), prob(1, 4)],
            ]
        );
        for pv in enumerate_probability_vectors(3, prob(1, 4)).unwrap() {
            assert!(rational::sums_to_one(pv.probs()));
        }
    }

    #[test]
    fn probability_vector_count_fine_grid() {
        // v = 2, h = 1/1000: k ∈ {1..999} paired with 1000−k.
        let count = enumerate_probability_vectors(2, prob(1, 1000))
            .unwrap()
            .count();
        assert_eq!(count, 999);
    }

    #[test]
    fn probability_vector_validation() {
        assert!(ProbabilityVector::new(alloc::vec![prob(1, 2), prob(1, 2)], prob(1, 4)).is_ok());
        assert!(matches!(
            ProbabilityVector::new(alloc::vec![prob(1, 3), prob(2, 3)], prob(1, 4)),
            Err(Error::InvalidProbabilityVector { .. })
        ));
        assert!(matches!(
            ProbabilityVector::new(alloc::vec![prob(1, 4), prob(1, 4)], prob(1, 4)),
            Err(Error::InvalidProbabilityVector { .. })
        ));
        assert!(matches!(
            ProbabilityVector::new(alloc::vec![prob(1, 1)], prob(1, 2)),
            Err(Error::TooFewBlocks)
        ));
        assert!(matches!(
            enumerate_probability_vectors(1, prob(1, 2)),
            Err(Error::TooFewBlocks)
        ));
    }

    #[test]
    fn generic_search_memoizes_feasibility_calls() {
        let mut calls = 0usize;
        // Nothing is feasible: every (plant, probability) pair must be
        // probed exactly once despite many candidate partitions.
        let outcome = search_with::<()>(
            4,
            2,
            prob(1, 4),
            |_, _| {
                calls += 1;
                Ok(None)
            },
            || false,
        )
        .unwrap();
        assert_eq!(outcome, SearchOutcome::Infeasible);
        // Grid values are 1/4, 1/2, 3/4 — but with every plant infeasible
        // the anchor check fails first: plant 1 probed per vector's first
        // entry only (3 distinct values).
        assert!(calls <= 3, "calls = {calls}");
    }

    #[test]
    fn generic_search_budget_exhaustion() {
        let mut polls = 0usize;
        let outcome = search_with::<()>(
            4,
            2,
            prob(1, 4),
            |_, _| Ok(None),
            || {
                polls += 1;
                polls > 1
            },
        )
        .unwrap();
        assert_eq!(outcome, SearchOutcome::BudgetExhausted);
    }

    fn scalar_plant(index: usize, a: f64, k: f64) -> PlantModel {
        PlantModel::new(
            index,
            DMatrix::from_element(1, 1, a),
            DMatrix::from_element(1, 1, 1.0),
            Some(DMatrix::from_element(1, 1, k)),
        )
        .unwrap()
    }

    #[test]
    fn certificate_search_reference_configuration() {
        let a1 = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.0795, -0.0045, 0.2896, -0.2367, -0.0272, 0.8101, -0.0032, 0.0323, 0.0447,
                0.1886, 0.7317, 0.2354, 0.0010, 0.1888, 0.0545, 0.9115,
            ],
        );
        let b1 = DMatrix::from_row_slice(
            4,
            2,
            &[0.0006, -0.0239, 0.2567, 0.0002, 0.0837, -0.1346, 0.0837, -0.0046],
        );
        let k1 = DMatrix::from_row_slice(
            2,
            4,
            &[
                0.0152761, -0.8159748, -0.2394377, -0.7514747, 2.3245781, 0.0798596,
                1.622477, -1.0654847,
            ],
        );
        let a2 = DMatrix::from_row_slice(2, 2, &[1.0123, 0.0502, 0.4920, 1.0123]);
        let b2 = DMatrix::from_row_slice(2, 1, &[0.0123, 0.4920]);
        let k2 = DMatrix::from_row_slice(1, 2, &[-2.3973087, -1.4308615]);
        let config = NcsConfig::new(
            alloc::vec![
                PlantModel::new(1, a1, b1, Some(k1)).unwrap(),
                PlantModel::new(2, a2, b2, Some(k2)).unwrap(),
            ],
            1,
        )
        .unwrap();
        match search_schedule_parameters(&config, prob(1, 2), 1e-8).unwrap() {
            SearchOutcome::Found(result) => {
                assert_eq!(result.partition.blocks(), &[alloc::vec![1], alloc::vec![2]]);
                assert_eq!(result.probabilities.probs(), &[prob(1, 2), prob(1, 2)]);
                assert_eq!(result.items.len(), 2);
                for (plant, cert) in config.plants.iter().zip(&result.items) {
                    let a_s = crate::model::closed_loop_matrix(plant).unwrap();
                    let outcome =
                        certify::verify_certificate(&a_s, &plant.a, cert).unwrap();
                    assert!(outcome.ok);
                }
            }
            other => panic!("expected Found, got {other:?}"),
        }
    }

    #[test]
    fn certificate_search_infeasible_pair() {
        // Both plants are deadbeat-closed but unstable open (a = 2): each
        // needs p > 3/4, and two grid probabilities cannot both exceed
        // 3/4 while summing to 1.
        let config = NcsConfig::new(
            alloc::vec![scalar_plant(1, 2.0, -2.0), scalar_plant(2, 2.0, -2.0)],
            1,
        )
        .unwrap();
        let outcome = search_schedule_parameters(&config, prob(1, 10), 1e-8).unwrap();
        assert_eq!(outcome, SearchOutcome::Infeasible);
    }

    #[test]
    fn certificate_search_mixed_pair_finds_first_feasible() {
        // Plant 1 needs p > 3/4; plant 2 is Schur in both modes and
        // feasible everywhere.  First feasible vector on the 1/10 grid is
        // (8/10, 2/10).
        let config = NcsConfig::new(
            alloc::vec![scalar_plant(1, 2.0, -2.0), scalar_plant(2, 0.5, 0.0)],
            1,
        )
        .unwrap();
        match search_schedule_parameters(&config, prob(1, 10), 1e-8).unwrap() {
            SearchOutcome::Found(result) => {
                assert_eq!(result.probabilities.probs(), &[prob(4, 5), prob(1, 5)]);
                assert_eq!(result.partition.blocks(), &[alloc::vec![1], alloc::vec![2]]);
            }
            other => panic!("expected Found, got {other:?}"),
        }
    }

    #[test]
    fn certificate_search_requires_gains() {
        let mut plant = scalar_plant(1, 2.0, -2.0);
        plant.k = None;
        let config = NcsConfig::new(alloc::vec![plant, scalar_plant(2, 2.0, -2.0)], 1).unwrap();
        assert!(matches!(
            search_schedule_parameters(&config, prob(1, 2), 1e-8),
            Err(Error::SynthesisRequired { plant: 1 })
        ));
    }
}
