use std::cmp::Ordering;

use super::rng::shuffle;

/// A byte string compared symbol by symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StringKey(pub Vec<u8>);

impl StringKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl From<&str> for StringKey {
    fn from(s: &str) -> Self {
        StringKey(s.as_bytes().to_vec())
    }
}

/// Lexicographic comparison with its symbol cost.
///
/// The cost is `lcp + 1` when both strings have a symbol at position `lcp`,
/// and `lcp` when one string ends there (running off the end is not a symbol
/// comparison).
pub fn string_compare(a: &StringKey, b: &StringKey) -> (Ordering, u64) {
    let (a, b) = (a.as_bytes(), b.as_bytes());
    let lcp = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    match (a.get(lcp), b.get(lcp)) {
        (Some(x), Some(y)) => (x.cmp(y), lcp as u64 + 1),
        _ => (a.len().cmp(&b.len()), lcp as u64),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuicksortOutcome<T> {
    pub sorted: Vec<T>,
    /// Sum of the costs reported by the comparator.
    pub cost: u64,
    pub key_comparisons: u64,
}

/// First-element-pivot quicksort: the pivot is compared once against every
/// other element of its segment, then both sides are sorted recursively.
pub fn quicksort_by<T, F>(items: Vec<T>, mut cmp: F) -> QuicksortOutcome<T>
where
    F: FnMut(&T, &T) -> (Ordering, u64),
{
    let mut cost = 0u64;
    let mut key_comparisons = 0u64;
    let mut sorted = Vec::with_capacity(items.len());
    // Segments still to sort, processed so that output is emitted in order.
    enum Task<T> {
        Sort(Vec<T>),
        Emit(T),
    }
    let mut stack = vec![Task::Sort(items)];
    while let Some(task) = stack.pop() {
        match task {
            Task::Emit(x) => sorted.push(x),
            Task::Sort(mut seg) => {
                if seg.len() <= 1 {
                    sorted.append(&mut seg);
                    continue;
                }
                let mut rest = seg.into_iter();
                let pivot = rest.next().expect("segment has a pivot");
                let (mut lo, mut hi) = (Vec::new(), Vec::new());
                for x in rest {
                    let (ord, c) = cmp(&x, &pivot);
                    cost += c;
                    key_comparisons += 1;
                    if ord == Ordering::Less {
                        lo.push(x);
                    } else {
                        hi.push(x);
                    }
                }
                stack.push(Task::Sort(hi));
                stack.push(Task::Emit(pivot));
                stack.push(Task::Sort(lo));
            }
        }
    }
    QuicksortOutcome {
        sorted,
        cost,
        key_comparisons,
    }
}

/// Shuffles `keys` with `seed`, then quicksorts them, charging every string
/// comparison its symbol cost.
pub fn instrumented_quicksort(keys: &[StringKey], seed: u64) -> QuicksortOutcome<StringKey> {
    let mut input = keys.to_vec();
    shuffle(&mut input, seed);
    quicksort_by(input, string_compare)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sk(s: &str) -> StringKey {
        StringKey::from(s)
    }

    #[test]
    fn symbol_costs() {
        assert_eq!(string_compare(&sk("ab"), &sk("ac")), (Ordering::Less, 2));
        assert_eq!(string_compare(&sk("a"), &sk("ab")), (Ordering::Less, 1));
        assert_eq!(string_compare(&sk("abc"), &sk("abc")), (Ordering::Equal, 3));
        assert_eq!(string_compare(&sk("b"), &sk("a")), (Ordering::Greater, 1));
        assert_eq!(string_compare(&sk(""), &sk("a")), (Ordering::Less, 0));
    }

    #[test]
    fn cost_matches_lcp_rule_on_short_binary_strings() {
        let mut all = vec![Vec::new()];
        for len in 1..=3 {
            for bits in 0..(1u32 << len) {
                all.push(
                    (0..len)
                        .map(|i| b'a' + ((bits >> i) & 1) as u8)
                        .collect::<Vec<u8>>(),
                );
            }
        }
        for a in &all {
            for b in &all {
                let lcp = a.iter().zip(b).take_while(|(x, y)| x == y).count() as u64;
                let prefix_case = lcp as usize == a.len().min(b.len());
                let expect = if prefix_case { lcp } else { lcp + 1 };
                let (ord, cost) = string_compare(&StringKey(a.clone()), &StringKey(b.clone()));
                assert_eq!(ord, a.cmp(b));
                assert_eq!(cost, expect);
                if a != b && !a.is_empty() && !b.is_empty() && a[0] == b[0] {
                    assert!(cost >= 1);
                }
            }
        }
    }

    #[test]
    fn two_strings_always_cost_two() {
        let keys = vec![sk("ab"), sk("ac")];
        for seed in 0..20 {
            let out = instrumented_quicksort(&keys, seed);
            assert_eq!(out.cost, 2);
            assert_eq!(out.sorted, vec![sk("ab"), sk("ac")]);
        }
    }

    #[test]
    fn single_string_costs_nothing() {
        let out = instrumented_quicksort(&[sk("hello")], 3);
        assert_eq!((out.cost, out.key_comparisons), (0, 0));
    }

    #[test]
    fn quicksort_sorts() {
        let items: Vec<u32> = vec![5, 3, 9, 1, 0, 7, 2];
        let out = quicksort_by(items, |a, b| (a.cmp(b), 1));
        assert_eq!(out.sorted, vec![0, 1, 2, 3, 5, 7, 9]);
        assert_eq!(out.cost, out.key_comparisons);
    }
}
