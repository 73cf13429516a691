//! Randomness-preservation checks: exhaustive structure censuses for binary
//! and binomial heaps, and the coin-flip insertion model on a linked heap.

use std::collections::BTreeMap;

use itertools::Itertools;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::binomial_queue::{build_queue, pop_max, RootList};
use crate::combinatorics::{alt_model_split, c_recurrence_f64, to_f64, CForm};
use crate::error::{Error, Result};
use crate::heap_core::{build_heap, HeapArray};
use crate::probe::{shuffle_with, Key, Phase, Probe, RedRange, SplitMix64};

pub const BUILDHEAP_CENSUS_CAP: usize = 9;
pub const BINOMIAL_CENSUS_CAP: usize = 8;

/// Occurrence counts keyed by canonical structure text.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DistributionCensus {
    pub counts: BTreeMap<String, u64>,
    pub total: u64,
}

impl DistributionCensus {
    pub fn record(&mut self, structure: String) {
        *self.counts.entry(structure).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn min_count(&self) -> u64 {
        self.counts.values().copied().min().unwrap_or(0)
    }

    pub fn max_count(&self) -> u64 {
        self.counts.values().copied().max().unwrap_or(0)
    }

    pub fn is_uniform(&self) -> bool {
        self.min_count() == self.max_count()
    }

    /// Largest over smallest frequency; 1 when uniform.
    pub fn spread(&self) -> f64 {
        self.max_count() as f64 / self.min_count().max(1) as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("structure,count\n");
        for (s, c) in &self.counts {
            out.push_str(&format!("\"{s}\",{c}\n"));
        }
        out
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::TooLarge {
            what: "census size",
            got: n,
            cap,
        });
    }
    Ok(())
}

fn array_text(keys: &[Key]) -> String {
    keys.iter().map(|k| k.rank.to_string()).join(",")
}

/// Runs `build_heap` on every permutation of `0..n`.
pub fn census_buildheap(n: usize) -> Result<DistributionCensus> {
    check_cap(n, BUILDHEAP_CENSUS_CAP)?;
    let mut census = DistributionCensus::default();
    for perm in (0..n).permutations(n) {
        let mut heap = HeapArray::from_keys(perm.into_iter().map(Key::real).collect());
        build_heap(&mut heap, &mut Probe::uncolored());
        census.record(array_text(heap.live()));
    }
    Ok(census)
}

/// Every distinct binomial queue reached by inserting a permutation of `0..n`,
/// with how many insertion orders reach it.
pub fn binomial_configurations(n: usize) -> Result<BTreeMap<String, (RootList, u64)>> {
    check_cap(n, BINOMIAL_CENSUS_CAP)?;
    let mut out: BTreeMap<String, (RootList, u64)> = BTreeMap::new();
    for perm in (0..n).permutations(n) {
        let keys: Vec<Key> = perm.into_iter().map(Key::real).collect();
        let q = build_queue(&keys, &mut Probe::uncolored());
        out.entry(q.canonical()).or_insert((q, 0)).1 += 1;
    }
    Ok(out)
}

/// Census of queues built by inserting every permutation of `0..n`.
pub fn census_binomial_build(n: usize) -> Result<DistributionCensus> {
    let configs = binomial_configurations(n)?;
    Ok(DistributionCensus {
        total: configs.values().map(|(_, c)| c).sum(),
        counts: configs.into_iter().map(|(k, (_, c))| (k, c)).collect(),
    })
}

/// Applies `pop_max` once to each distinct `n`-key queue (each weighted
/// once) and counts the resulting `n-1`-key queues.
pub fn census_binomial_popmax(n: usize) -> Result<DistributionCensus> {
    let mut census = DistributionCensus::default();
    if n == 0 {
        return Ok(census);
    }
    for (_, (q, _)) in binomial_configurations(n)? {
        let (_, rest) = pop_max(q, &mut Probe::uncolored())?;
        census.record(rest.canonical());
    }
    Ok(census)
}

// ---------------------------------------------------------------------------
// Linked heap for the coin-flip insertion model

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Node {
    key: Key,
    size: usize,
    left: Option<usize>,
    right: Option<usize>,
}

/// A binary heap of arbitrary shape. Nodes live in an arena; popped nodes
/// are left unreachable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PointerHeap {
    nodes: Vec<Node>,
    root: Option<usize>,
}

impl PointerHeap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.root.map_or(0, |r| self.nodes[r].size)
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    pub fn peek(&self) -> Option<Key> {
        self.root.map(|r| self.nodes[r].key)
    }

    fn alloc(&mut self, key: Key) -> usize {
        self.nodes.push(Node {
            key,
            size: 1,
            left: None,
            right: None,
        });
        self.nodes.len() - 1
    }

    /// Size of the root's left subtree.
    pub fn left_size(&self) -> usize {
        self.root
            .and_then(|r| self.nodes[r].left)
            .map_or(0, |l| self.nodes[l].size)
    }

    /// Same shape and keys as a 1-indexed array heap.
    pub fn from_heap_array(heap: &HeapArray) -> Self {
        let mut h = PointerHeap::new();
        let live = heap.live();
        if live.is_empty() {
            return h;
        }
        for &k in live {
            h.alloc(k);
        }
        for i in (1..=live.len()).rev() {
            let (l, r) = (2 * i, 2 * i + 1);
            let node = &mut h.nodes[i - 1];
            node.left = (l <= live.len()).then_some(l - 1);
            node.right = (r <= live.len()).then_some(r - 1);
            let sizes = [node.left, node.right];
            let extra: usize = sizes.iter().flatten().map(|&c| h.nodes[c].size).sum();
            h.nodes[i - 1].size += extra;
        }
        h.root = Some(0);
        h
    }

    /// Keys in preorder, for invariant checks.
    pub fn keys(&self) -> Vec<Key> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack: Vec<usize> = self.root.into_iter().collect();
        while let Some(i) = stack.pop() {
            out.push(self.nodes[i].key);
            stack.extend(self.nodes[i].right);
            stack.extend(self.nodes[i].left);
        }
        out
    }

    /// Heap order and subtree sizes agree with the links.
    pub fn is_valid(&self) -> bool {
        fn check(h: &PointerHeap, i: usize) -> Option<usize> {
            let n = h.nodes[i];
            let mut size = 1;
            for c in [n.left, n.right].into_iter().flatten() {
                if h.nodes[c].key > n.key {
                    return None;
                }
                size += check(h, c)?;
            }
            (size == n.size).then_some(size)
        }
        self.root.is_none_or(|r| check(self, r).is_some())
    }

    /// Removes the maximum. The hole left at the root is filled by the larger
    /// child, comparing only where both children exist, down to a leaf.
    pub fn pop_max(&mut self, probe: &mut Probe) -> Result<Key> {
        let root = self.root.ok_or(Error::EmptyHeap)?;
        let top = self.nodes[root].key;
        let mut parent: Option<(usize, bool)> = None;
        let mut cur = root;
        loop {
            self.nodes[cur].size -= 1;
            let n = self.nodes[cur];
            let next = match (n.left, n.right) {
                (None, None) => None,
                (Some(l), None) => Some((l, true)),
                (None, Some(r)) => Some((r, false)),
                (Some(l), Some(r)) => {
                    if probe.less(&self.nodes[l].key, &self.nodes[r].key) {
                        Some((r, false))
                    } else {
                        Some((l, true))
                    }
                }
            };
            match next {
                Some((child, is_left)) => {
                    self.nodes[cur].key = self.nodes[child].key;
                    parent = Some((cur, is_left));
                    cur = child;
                }
                None => {
                    match parent {
                        None => self.root = None,
                        Some((p, true)) => self.nodes[p].left = None,
                        Some((p, false)) => self.nodes[p].right = None,
                    }
                    return Ok(top);
                }
            }
        }
    }
}

/// Coin-flip insertion: the larger of `x` and the current root stays, the
/// other descends into a uniformly chosen subtree; an empty subtree takes it.
pub fn insert_alternate(heap: &mut PointerHeap, x: Key, rng: &mut SplitMix64, probe: &mut Probe) {
    let Some(mut cur) = heap.root else {
        heap.root = Some(heap.alloc(x));
        return;
    };
    let mut x = x;
    loop {
        keep_larger(heap, cur, &mut x, probe);
        heap.nodes[cur].size += 1;
        let go_left = rng.coin();
        let slot = if go_left {
            heap.nodes[cur].left
        } else {
            heap.nodes[cur].right
        };
        match slot {
            Some(next) => cur = next,
            None => {
                let leaf = heap.alloc(x);
                if go_left {
                    heap.nodes[cur].left = Some(leaf);
                } else {
                    heap.nodes[cur].right = Some(leaf);
                }
                return;
            }
        }
    }
}

fn keep_larger(heap: &mut PointerHeap, at: usize, x: &mut Key, probe: &mut Probe) {
    if probe.greater(x, &heap.nodes[at].key) {
        std::mem::swap(x, &mut heap.nodes[at].key);
    }
}

/// Left-subtree sizes of the root after inserting `n` random keys, against
/// the `C(n-1, k) / 2^(n-1)` law.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitLawReport {
    pub n: usize,
    pub trials: u64,
    pub observed: Vec<u64>,
    pub expected: Vec<f64>,
    pub chi_square: f64,
    pub p_value: f64,
}

impl SplitLawReport {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value > significance
    }
}

pub fn alternate_split_law(n: usize, trials: u64, seed: u64) -> Result<SplitLawReport> {
    if n < 2 {
        return Err(Error::OutOfRange(format!(
            "split law needs n >= 2, got {n}"
        )));
    }
    let mut observed = vec![0u64; n];
    let mut keys: Vec<Key> = (0..n).map(Key::real).collect();
    for trial in 0..trials {
        let mut rng = SplitMix64::new(seed ^ trial);
        shuffle_with(&mut keys, &mut rng);
        let mut heap = PointerHeap::new();
        let mut probe = Probe::uncolored();
        for &k in &keys {
            insert_alternate(&mut heap, k, &mut rng, &mut probe);
        }
        observed[heap.left_size()] += 1;
    }
    let expected: Vec<f64> = (0..n)
        .map(|k| Ok(to_f64(&alt_model_split(n, k)?) * trials as f64))
        .collect::<Result<_>>()?;
    let chi_square = observed
        .iter()
        .zip(&expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let dist = ChiSquared::new((n - 1) as f64).expect("positive degrees of freedom");
    Ok(SplitLawReport {
        n,
        trials,
        observed,
        expected,
        chi_square,
        p_value: dist.sf(chi_square),
    })
}

/// Comparisons per pop in an all-red heap built by coin-flip insertion.
#[derive(Clone, Debug, PartialEq)]
pub struct MatureReport {
    pub n: usize,
    pub trials: u64,
    pub mean_first_pop: f64,
    pub mean_per_pop: f64,
    pub mean_total: f64,
    pub max_total: u64,
    /// `C_N` with the both-children-present probability.
    pub c_simplified: f64,
    /// `C_N` of the upper-bound recurrence.
    pub c_upper: f64,
}

impl MatureReport {
    /// `mean_per_pop - log2 N`.
    pub fn excess_over_log(&self) -> f64 {
        self.mean_per_pop - (self.n as f64).log2()
    }
}

/// Builds `n`-key heaps with [`insert_alternate`] (red = every key) and pops
/// them empty, tallying the sift-down comparisons of every pop.
pub fn mature_phase_census(n: usize, trials: u64, seed: u64) -> Result<MatureReport> {
    if n == 0 || trials == 0 {
        return Err(Error::OutOfRange("need n >= 1 and trials >= 1".into()));
    }
    let red = RedRange::top(n, n)?;
    let mut keys: Vec<Key> = (0..n).map(Key::real).collect();
    let (mut first, mut total_sum, mut max_total) = (0u64, 0u64, 0u64);
    for trial in 0..trials {
        let mut rng = SplitMix64::new(seed ^ trial);
        shuffle_with(&mut keys, &mut rng);
        let mut heap = PointerHeap::new();
        let mut probe = Probe::new(red);
        for &k in &keys {
            insert_alternate(&mut heap, k, &mut rng, &mut probe);
        }
        probe.set_phase(Phase::Sort);
        heap.pop_max(&mut probe)?;
        first += probe.sheet().phase(Phase::Sort).red_red;
        while !heap.is_empty() {
            heap.pop_max(&mut probe)?;
        }
        let total = probe.sheet().phase(Phase::Sort).red_red;
        total_sum += total;
        max_total = max_total.max(total);
    }
    let simplified = c_recurrence_f64(n, CForm::Simplified);
    let upper = c_recurrence_f64(n, CForm::UpperBound);
    let t = trials as f64;
    Ok(MatureReport {
        n,
        trials,
        mean_first_pop: first as f64 / t,
        mean_per_pop: total_sum as f64 / (t * n as f64),
        mean_total: total_sum as f64 / t,
        max_total,
        c_simplified: simplified[n],
        c_upper: upper[n],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::heap_count;

    #[test]
    fn buildheap_three_and_four() {
        let c3 = census_buildheap(3).unwrap();
        assert_eq!((c3.distinct(), c3.min_count(), c3.max_count()), (2, 3, 3));
        let c4 = census_buildheap(4).unwrap();
        assert_eq!((c4.distinct(), c4.min_count(), c4.max_count()), (3, 8, 8));
        assert!(census_buildheap(10).is_err());
    }

    #[test]
    fn buildheap_census_keys_are_heaps() {
        for (s, _) in census_buildheap(6).unwrap().counts {
            let keys: Vec<Key> = s
                .split(',')
                .map(|x| Key::real(x.parse().unwrap()))
                .collect();
            assert!(HeapArray::from_keys(keys).is_heap());
        }
        assert_eq!(
            census_buildheap(6).unwrap().distinct() as u64,
            u64::try_from(heap_count(6)).unwrap()
        );
    }

    #[test]
    fn binomial_small_censuses() {
        let c3 = census_binomial_build(3).unwrap();
        assert_eq!((c3.distinct(), c3.min_count(), c3.max_count()), (3, 2, 2));
        let c1 = census_binomial_build(1).unwrap();
        assert_eq!((c1.distinct(), c1.total), (1, 1));
        let p2 = census_binomial_popmax(2).unwrap();
        assert_eq!((p2.distinct(), p2.total), (1, 1));
        assert!(census_binomial_popmax(3).unwrap().is_uniform());
        assert!(census_binomial_build(9).is_err());
    }

    #[test]
    fn insert_alternate_basics() {
        let mut rng = SplitMix64::new(1);
        let mut p = Probe::uncolored();
        let mut h = PointerHeap::new();
        insert_alternate(&mut h, Key::real(0), &mut rng, &mut p);
        assert_eq!((h.len(), h.peek(), p.total()), (1, Some(Key::real(0)), 0));
        for i in 1..20 {
            insert_alternate(&mut h, Key::real(i), &mut rng, &mut p);
            assert_eq!(h.peek(), Some(Key::real(i)));
            assert!(h.is_valid());
        }
        assert_eq!(h.len(), 20);
    }

    #[test]
    fn pointer_pop_drains_in_order() {
        let mut rng = SplitMix64::new(5);
        let mut p = Probe::uncolored();
        let mut h = PointerHeap::new();
        let mut keys: Vec<Key> = (0..50).map(Key::real).collect();
        shuffle_with(&mut keys, &mut rng);
        for k in keys {
            insert_alternate(&mut h, k, &mut rng, &mut p);
        }
        for expect in (0..50).rev() {
            assert_eq!(h.pop_max(&mut p).unwrap(), Key::real(expect));
            assert!(h.is_valid());
        }
        assert_eq!(h.pop_max(&mut p), Err(Error::EmptyHeap));
    }

    #[test]
    fn from_array_keeps_shape() {
        let mut a = HeapArray::from_keys((0..10).map(Key::real).collect());
        build_heap(&mut a, &mut Probe::uncolored());
        let h = PointerHeap::from_heap_array(&a);
        assert!(h.is_valid());
        assert_eq!(h.len(), 10);
        assert_eq!(h.left_size(), 6);
    }

    #[test]
    fn two_keys_pop_without_comparing() {
        let r = mature_phase_census(2, 50, 3).unwrap();
        assert_eq!(r.mean_first_pop, 0.0);
        assert_eq!(r.c_simplified, 0.0);
    }

    #[test]
    fn census_csv() {
        let c = census_buildheap(3).unwrap();
        assert_eq!(c.to_csv(), "structure,count\n\"2,0,1\",3\n\"2,1,0\",3\n");
    }
}
