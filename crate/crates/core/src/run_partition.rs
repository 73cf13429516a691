//! Modified heapsort: the input is cut into blocks of sizes `2^s - 1` given by
//! the almost-binary expansion of `n`, each block is heapified, padded with a
//! bottom level of dummies and popped with Floyd's repair, and the resulting
//! runs are merged smallest first.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::heap_core::{build_heap, floyd_sort_phase, HeapArray};
use crate::probe::{Key, Phase, Probe};

/// `n = Σ (2^s_k - 1)` with `s_1 >= s_2 >= ...` and every term at least the
/// sum of all terms after it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub terms: Vec<u32>,
}

impl Expansion {
    pub fn block_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().map(|&s| (1usize << s) - 1)
    }

    pub fn total(&self) -> usize {
        self.block_sizes().sum()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Every block is at least the combined size of the blocks after it.
    pub fn is_tail_dominant(&self) -> bool {
        let sizes: Vec<usize> = self.block_sizes().collect();
        let mut tail = 0usize;
        for &size in sizes.iter().rev() {
            if size < tail {
                return false;
            }
            tail += size;
        }
        true
    }
}

/// Greedy almost-binary expansion: repeatedly take the largest `2^s - 1` that
/// fits. `n = 0` yields no terms.
pub fn almost_binary_expansion(n: usize) -> Expansion {
    let mut rest = n;
    let mut terms = Vec::new();
    while rest > 0 {
        let s = (rest + 1).ilog2();
        terms.push(s);
        rest -= (1usize << s) - 1;
    }
    Expansion { terms }
}

/// An ascending run produced by one sorted block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub keys: Vec<Key>,
    pub block_size: usize,
}

/// Extends a heapified block of `2^s - 1` keys by a full bottom level of
/// `2^s` dummies. Dummies get creation indices `0..2^s` in slot order.
pub fn pad_with_dummies(mut heap: HeapArray) -> Result<HeapArray> {
    let size = heap.slot_count();
    if !(size + 1).is_power_of_two() || size != heap.heap_size() {
        return Err(Error::OutOfRange(format!(
            "padding needs a full block of 2^s - 1 live keys, got {size} slots / {} live",
            heap.heap_size()
        )));
    }
    for id in 0..=size {
        heap.push(Key::dummy(id as u64));
    }
    Ok(heap)
}

fn merge_two(a: Vec<Key>, b: Vec<Key>, probe: &mut Probe) -> Vec<Key> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if probe.compare(&b[j], &a[i]) == Ordering::Less {
            out.push(b[j]);
            j += 1;
        } else {
            out.push(a[i]);
            i += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Two-way merges starting from the smallest run; `runs` come in descending
/// block size. Each block is at least the sum of the blocks after it, so the
/// accumulated run never outgrows the next block and block `k` (counted from
/// the small end) takes part in at most `k` merges. Comparisons are tallied
/// under [`Phase::Merge`].
pub fn merge_runs(runs: Vec<Run>, probe: &mut Probe) -> Result<Vec<Key>> {
    if runs.windows(2).any(|w| w[0].block_size < w[1].block_size) {
        return Err(Error::OutOfRange(
            "runs must be ordered by descending block size".into(),
        ));
    }
    probe.set_phase(Phase::Merge);
    let mut runs = runs.into_iter().rev();
    let Some(first) = runs.next() else {
        return Ok(Vec::new());
    };
    Ok(runs.fold(first.keys, |acc, run| merge_two(run.keys, acc, probe)))
}

/// Sorts one block: heapify, pad, pop every real key.
pub fn sort_block(block: Vec<Key>, probe: &mut Probe) -> Run {
    let block_size = block.len();
    let mut heap = HeapArray::from_keys(block);
    probe.set_phase(Phase::Build);
    build_heap(&mut heap, probe);
    let mut heap = pad_with_dummies(heap).expect("block sizes come from the expansion");
    probe.set_phase(Phase::Sort);
    floyd_sort_phase(&mut heap, block_size, probe);
    let first_popped = heap.heap_size();
    let keys = heap.slots()[first_popped..].to_vec();
    debug_assert!(keys.iter().all(|k| !k.is_dummy));
    Run { keys, block_size }
}

/// The modified heapsort. Blocks are contiguous segments of the input,
/// largest first.
pub fn heapsort_modified(keys: Vec<Key>, probe: &mut Probe) -> Vec<Key> {
    let expansion = almost_binary_expansion(keys.len());
    let mut rest = keys.into_iter();
    let runs: Vec<Run> = expansion
        .block_sizes()
        .map(|size| sort_block(rest.by_ref().take(size).collect(), probe))
        .collect();
    merge_runs(runs, probe).expect("runs follow the expansion order")
}
