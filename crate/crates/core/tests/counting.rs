use cmplab::combinatorics::{
    alt_model_split, alt_model_successor_mix, binomial_queue_count, c_recurrence, c_recurrence_f64,
    heap_count, left_subtree_size, split_probability_p, table_by_name, to_f64, CForm,
    QueueCountConvention, TABLE_NAMES,
};
use cmplab::heap_core::HeapArray;
use cmplab::probe::Key;
use itertools::Itertools;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

#[test]
fn heap_count_matches_permutation_enumeration() {
    for m in 0..=9usize {
        let heaps = (0..m)
            .permutations(m)
            .filter(|p| HeapArray::from_keys(p.iter().map(|&r| Key::real(r)).collect()).is_heap())
            .count();
        assert_eq!(heap_count(m), BigUint::from(heaps), "m={m}");
    }
}

#[test]
fn left_subtree_size_matches_complete_tree() {
    fn size_below(i: usize, m: usize) -> usize {
        if i > m {
            0
        } else {
            1 + size_below(2 * i, m) + size_below(2 * i + 1, m)
        }
    }
    for m in 1..=2000usize {
        assert_eq!(left_subtree_size(m), size_below(2, m), "m={m}");
    }
}

/// Parent pointers of a binomial tree of order `k` rooted at `root`, appended
/// to `parent`.
fn binomial_tree_shape(k: u32, root: usize, parent: &mut Vec<Option<usize>>) {
    for child_order in 0..k {
        let child = parent.len();
        parent.push(Some(root));
        binomial_tree_shape(child_order, child, parent);
    }
}

fn forest_labelings(n: usize) -> usize {
    let mut parent: Vec<Option<usize>> = Vec::new();
    for bit in 0..usize::BITS {
        if n >> bit & 1 == 1 {
            let root = parent.len();
            parent.push(None);
            binomial_tree_shape(bit, root, &mut parent);
        }
    }
    assert_eq!(parent.len(), n);
    (0..n)
        .permutations(n)
        .filter(|label| (0..n).all(|v| parent[v].is_none_or(|p| label[p] > label[v])))
        .count()
}

#[test]
fn distinct_structure_count_matches_forest_labelings() {
    for n in 0..=8usize {
        assert_eq!(
            binomial_queue_count(n, QueueCountConvention::DistinctStructure),
            BigUint::from(forest_labelings(n)),
            "n={n}"
        );
    }
}

#[test]
fn ordered_join_counts() {
    let got: Vec<u64> = (0..=8)
        .map(|n| {
            binomial_queue_count(n, QueueCountConvention::OrderedJoin)
                .to_u64()
                .unwrap()
        })
        .collect();
    assert_eq!(got, vec![1, 1, 1, 3, 6, 30, 90, 630, 2520]);
}

#[test]
fn split_probability_matches_subset_enumeration() {
    // A uniformly random m-subset of the 2m+1 keys fills the subheap.
    for m in 0..=5usize {
        let total = 2 * m + 1;
        let subsets: Vec<Vec<usize>> = (0..total).combinations(m).collect();
        for r in 0..=total {
            for rp in 0..=r {
                let hits = subsets
                    .iter()
                    .filter(|s| s.iter().filter(|&&x| x >= total - r).count() == rp)
                    .count();
                let expected = BigRational::new(hits.into(), subsets.len().into());
                assert_eq!(
                    split_probability_p(m, r, rp),
                    expected,
                    "m={m} r={r} r'={rp}"
                );
            }
        }
    }
}

#[test]
fn alternate_split_law_is_a_distribution_preserved_by_insertion() {
    for n in 1..=60usize {
        let total: BigRational = (0..n).map(|k| alt_model_split(n, k).unwrap()).sum();
        assert!(total.is_one());
        for k in 0..n {
            assert_eq!(
                alt_model_successor_mix(n, k).unwrap(),
                alt_model_split(n, k).unwrap()
            );
        }
    }
    assert!(alt_model_split(3, 3).is_err());
}

#[test]
fn c_forms_are_ordered_and_agree_in_floating_point() {
    let upper = c_recurrence(200, CForm::UpperBound).unwrap();
    let simple = c_recurrence(200, CForm::Simplified).unwrap();
    let upper_f = c_recurrence_f64(200, CForm::UpperBound);
    let simple_f = c_recurrence_f64(200, CForm::Simplified);
    for n in 0..=200 {
        assert!(simple[n] <= upper[n]);
        assert!((to_f64(&upper[n]) - upper_f[n]).abs() < 1e-9 * (1.0 + upper_f[n]));
        assert!((to_f64(&simple[n]) - simple_f[n]).abs() < 1e-9 * (1.0 + simple_f[n]));
    }
    // Both grow like log2 N up to a bounded offset.
    for n in [64usize, 128, 200] {
        let excess = upper_f[n] - (n as f64).log2();
        assert!((-1.0..3.0).contains(&excess), "n={n} excess={excess}");
    }
}

#[test]
fn every_named_table_builds_and_renders() {
    for name in TABLE_NAMES {
        let t = table_by_name(name, 6).unwrap();
        assert!(!t.is_empty(), "{name}");
        let csv = t.to_csv();
        assert_eq!(csv.lines().count(), t.len() + 1, "{name}");
    }
    assert!(table_by_name("nope", 3).is_err());
}
