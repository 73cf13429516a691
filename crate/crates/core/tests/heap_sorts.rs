use cmplab::heap_core::{
    adversarial_red_range, build_heap, construct_adversarial_heap, floyd_sort_phase,
    heapsort_classic, heapsort_floyd, sift_down, HeapArray,
};
use cmplab::probe::{shuffled_ranks, Key, Phase, Probe, RedRange};
use cmplab::run_partition::heapsort_modified;
use itertools::Itertools;
use proptest::prelude::*;

fn keys_from(ranks: &[usize]) -> Vec<Key> {
    ranks.iter().map(|&r| Key::real(r)).collect()
}

fn sorted_ranks(out: &[Key]) -> Vec<usize> {
    out.iter().map(|k| k.rank).collect()
}

proptest! {
    #[test]
    fn every_sorter_sorts(ranks in prop::collection::vec(0usize..50, 0..200)) {
        let mut expected = ranks.clone();
        expected.sort_unstable();
        for sort in [heapsort_classic, heapsort_floyd, heapsort_modified] {
            let out = sort(keys_from(&ranks), &mut Probe::uncolored());
            prop_assert_eq!(sorted_ranks(&out), expected.clone());
        }
    }

    #[test]
    fn build_heap_establishes_heap_order(ranks in prop::collection::vec(0usize..1000, 1..300)) {
        let mut heap = HeapArray::from_keys(keys_from(&ranks));
        build_heap(&mut heap, &mut Probe::uncolored());
        prop_assert!(heap.is_heap());
        let mut live = sorted_ranks(heap.live());
        live.sort_unstable();
        let mut input = ranks.clone();
        input.sort_unstable();
        prop_assert_eq!(live, input);
    }

    #[test]
    fn floyd_pops_keep_heap_order(n in 1usize..200, seed: u64, pops_frac in 0.0f64..1.0) {
        let mut heap = HeapArray::from_keys(shuffled_ranks(n, seed));
        let mut probe = Probe::uncolored();
        build_heap(&mut heap, &mut probe);
        let pops = (n as f64 * pops_frac) as usize;
        floyd_sort_phase(&mut heap, pops, &mut probe);
        prop_assert_eq!(heap.heap_size(), n - pops);
        prop_assert!(heap.is_heap());
        // Popped keys occupy the tail in ascending order.
        let tail = sorted_ranks(&heap.slots()[n - pops..]);
        prop_assert_eq!(tail, (n - pops..n).collect::<Vec<_>>());
    }

    #[test]
    fn red_tally_never_exceeds_total(n in 1usize..300, r_frac in 0.0f64..1.0, seed: u64) {
        let r = ((n as f64) * r_frac) as usize;
        let red = RedRange::top(n, r).unwrap();
        let mut probe = Probe::new(red);
        heapsort_floyd(shuffled_ranks(n, seed), &mut probe);
        let c = probe.sheet().total();
        prop_assert_eq!(c.total(), probe.total());
        // Loose quadratic cap; the sharp bounds are exercised elsewhere.
        prop_assert!(c.red_red <= (r * r) as u64);
    }
}

/// Sift by swapping the element at `i` with its larger child down to a leaf.
fn swap_sift(slots: &mut [Key], i: usize, size: usize, comparisons: &mut u64) -> usize {
    let mut i = i;
    loop {
        let (l, r) = (2 * i, 2 * i + 1);
        let child = if r <= size {
            *comparisons += 1;
            if slots[l] < slots[r] {
                r
            } else {
                l
            }
        } else if l <= size {
            l
        } else {
            return i;
        };
        slots.swap(i, child);
        i = child;
    }
}

proptest! {
    #[test]
    fn hole_sift_matches_swap_sift(n in 1usize..300, seed: u64, start_frac in 0.0f64..1.0) {
        let mut heap = HeapArray::from_keys(shuffled_ranks(n, seed));
        build_heap(&mut heap, &mut Probe::uncolored());
        let start = 1 + ((n - 1) as f64 * start_frac) as usize;
        let mut slots: Vec<Key> = std::iter::once(Key::dummy(0)).chain(heap.live().iter().copied()).collect();
        let moving = slots[start];
        let mut swaps = 0;
        let end = swap_sift(&mut slots, start, n, &mut swaps);

        let mut probe = Probe::uncolored();
        let hole = sift_down(&mut heap, start, &mut probe).unwrap();
        heap.set(hole, moving);
        prop_assert_eq!(hole, end);
        prop_assert_eq!(probe.total(), swaps);
        prop_assert_eq!(heap.live(), &slots[1..]);
    }
}

#[test]
fn classic_and_floyd_agree_on_output() {
    for seed in 0..50 {
        let keys = shuffled_ranks(257, seed);
        let a = heapsort_classic(keys.clone(), &mut Probe::uncolored());
        let b = heapsort_floyd(keys, &mut Probe::uncolored());
        assert_eq!(a, b);
    }
}

fn sort_phase_red_red(mut heap: HeapArray, red: RedRange) -> u64 {
    let mut probe = Probe::new(red);
    probe.set_phase(Phase::Sort);
    let pops = heap.heap_size() - 1;
    floyd_sort_phase(&mut heap, pops, &mut probe);
    probe.sheet().phase(Phase::Sort).red_red
}

// Keeps the blue keys and the red positions of the constructed heap fixed and
// tries every heap-ordered placement of the red ranks on those positions.
fn brute_force_max(k: u32) -> u64 {
    let red = adversarial_red_range(k).unwrap();
    let base = construct_adversarial_heap(k).unwrap();
    let positions: Vec<usize> = (1..=base.heap_size())
        .filter(|&i| red.is_red(&base.get(i)))
        .collect();
    let ranks: Vec<usize> = (red.lo..red.lo + red.len).collect();
    let mut best = 0;
    for perm in ranks.iter().permutations(ranks.len()) {
        let mut heap = base.clone();
        for (&pos, &&rank) in positions.iter().zip(&perm) {
            heap.set(pos, Key::real(rank));
        }
        if heap.is_heap() {
            best = best.max(sort_phase_red_red(heap, red));
        }
    }
    best
}

#[test]
fn adversarial_layout_is_worst_over_red_placements() {
    for k in [4u32, 5] {
        let red = adversarial_red_range(k).unwrap();
        let built = sort_phase_red_red(construct_adversarial_heap(k).unwrap(), red);
        assert_eq!(built, brute_force_max(k), "k={k}");
    }
}

#[test]
fn adversarial_count_is_quadratic_in_depth() {
    for k in 4u32..=12 {
        let red = adversarial_red_range(k).unwrap();
        let heap = construct_adversarial_heap(k).unwrap();
        assert!(heap.is_heap());
        let d = (k - 1) as u64;
        assert_eq!(sort_phase_red_red(heap, red), d * d + 2, "k={k}");
    }
}
