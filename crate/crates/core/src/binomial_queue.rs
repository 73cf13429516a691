//! Binomial priority queue with instrumented joins.
//!
//! A [`RootList`] holds at most one heap-ordered [`BinomialTree`] per size,
//! smallest first, so the sizes spell out the binary expansion of the element
//! count. Merging two root lists is binary addition with carries.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::probe::{Key, Phase, Probe, RedRange};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinomialTree {
    root: Key,
    // Ascending size: children[i] has 2^i nodes.
    children: Vec<BinomialTree>,
}

impl BinomialTree {
    pub fn singleton(key: Key) -> Self {
        BinomialTree {
            root: key,
            children: Vec::new(),
        }
    }

    pub fn root_key(&self) -> Key {
        self.root
    }

    pub fn order(&self) -> u32 {
        self.children.len() as u32
    }

    pub fn size(&self) -> usize {
        1 << self.children.len()
    }

    /// Children from the largest (`2^(k-1)` nodes) down to the single node.
    pub fn children(&self) -> impl Iterator<Item = &BinomialTree> {
        self.children.iter().rev()
    }

    /// Children as a root list, smallest first.
    pub fn into_children(self) -> Vec<BinomialTree> {
        self.children
    }

    pub fn keys(&self) -> Vec<Key> {
        let mut out = vec![self.root];
        for c in &self.children {
            out.extend(c.keys());
        }
        out
    }

    /// Heap order plus the `2^(k-1), ..., 2, 1` child-size shape.
    pub fn is_valid(&self) -> bool {
        self.children
            .iter()
            .enumerate()
            .all(|(i, c)| c.order() as usize == i && c.root <= self.root && c.is_valid())
    }

    /// Whether `descendant` lies strictly below `ancestor` in this tree.
    pub fn is_ancestor(&self, ancestor: &Key, descendant: &Key) -> bool {
        if self.root == *ancestor {
            return self.children.iter().any(|c| c.contains(descendant));
        }
        self.children
            .iter()
            .any(|c| c.is_ancestor(ancestor, descendant))
    }

    pub fn contains(&self, key: &Key) -> bool {
        self.root == *key || self.children.iter().any(|c| c.contains(key))
    }

    /// `(root child child ...)` with children by ascending size.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        self.write_canonical(&mut s);
        s
    }

    fn write_canonical(&self, out: &mut String) {
        out.push('(');
        write_key(out, &self.root);
        for c in &self.children {
            out.push(' ');
            c.write_canonical(out);
        }
        out.push(')');
    }
}

fn write_key(out: &mut String, key: &Key) {
    if key.is_dummy {
        write!(out, "d{}", key.value).unwrap();
    } else {
        write!(out, "{}", key.rank).unwrap();
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RootList {
    trees: Vec<BinomialTree>,
    count: usize,
}

impl RootList {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a root list from trees already in strictly increasing size.
    pub fn from_trees(trees: Vec<BinomialTree>) -> Result<Self> {
        if trees.windows(2).any(|w| w[0].size() >= w[1].size()) {
            return Err(Error::OutOfRange(
                "root list trees must strictly increase in size".into(),
            ));
        }
        let count = trees.iter().map(BinomialTree::size).sum();
        Ok(RootList { trees, count })
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Trees, smallest first.
    pub fn trees(&self) -> &[BinomialTree] {
        &self.trees
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.trees.iter().map(BinomialTree::size).collect()
    }

    pub fn is_valid(&self) -> bool {
        let sizes = self.sizes();
        sizes.windows(2).all(|w| w[0] < w[1])
            && sizes.iter().sum::<usize>() == self.count
            && self.trees.iter().all(BinomialTree::is_valid)
    }

    /// Roots whose key is red.
    pub fn red_roots(&self, red: &RedRange) -> usize {
        self.trees.iter().filter(|t| red.is_red(&t.root)).count()
    }

    /// `[tree tree ...]`, smallest tree first.
    pub fn canonical(&self) -> String {
        let mut s = String::from("[");
        for (i, t) in self.trees.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            t.write_canonical(&mut s);
        }
        s.push(']');
        s
    }

    pub fn keys(&self) -> Vec<Key> {
        self.trees.iter().flat_map(BinomialTree::keys).collect()
    }
}

/// Joins two trees of equal size; the larger root adopts the other tree as
/// its largest child. Exactly one comparison.
pub fn merge_trees(a: BinomialTree, b: BinomialTree, probe: &mut Probe) -> Result<BinomialTree> {
    if a.size() != b.size() {
        return Err(Error::SizeMismatch {
            left: a.size(),
            right: b.size(),
        });
    }
    let (mut winner, loser) = if probe.greater(&a.root, &b.root) {
        (a, b)
    } else {
        (b, a)
    };
    winner.children.push(loser);
    Ok(winner)
}

// Joins `tree` with the pending carry when sizes agree; otherwise flushes both
// to `out`, carry first.
fn add(
    out: &mut Vec<BinomialTree>,
    carry: Option<BinomialTree>,
    tree: BinomialTree,
    probe: &mut Probe,
) -> Option<BinomialTree> {
    match carry {
        None => {
            out.push(tree);
            None
        }
        Some(c) if c.size() == tree.size() => {
            Some(merge_trees(c, tree, probe).expect("sizes checked"))
        }
        Some(c) => {
            out.push(c);
            out.push(tree);
            None
        }
    }
}

/// Merges two root lists like binary addition.
pub fn merge_root_lists(a: RootList, b: RootList, probe: &mut Probe) -> RootList {
    let count = a.count + b.count;
    let mut out = Vec::with_capacity(a.trees.len() + b.trees.len());
    let mut carry: Option<BinomialTree> = None;
    let mut xs = a.trees.into_iter().peekable();
    let mut ys = b.trees.into_iter().peekable();
    while let (Some(x), Some(y)) = (xs.peek(), ys.peek()) {
        if x.size() == y.size() {
            let (x, y) = (xs.next().unwrap(), ys.next().unwrap());
            if let Some(c) = carry.take() {
                out.push(c);
            }
            carry = Some(merge_trees(x, y, probe).expect("sizes checked"));
        } else {
            let smaller = if x.size() < y.size() {
                xs.next().unwrap()
            } else {
                ys.next().unwrap()
            };
            carry = add(&mut out, carry, smaller, probe);
        }
    }
    for t in xs.chain(ys) {
        carry = add(&mut out, carry, t, probe);
    }
    if let Some(c) = carry {
        out.push(c);
    }
    RootList { trees: out, count }
}

pub fn insert(queue: RootList, key: Key, probe: &mut Probe) -> RootList {
    let single = RootList {
        trees: vec![BinomialTree::singleton(key)],
        count: 1,
    };
    merge_root_lists(queue, single, probe)
}

/// Scans roots from the largest tree to the smallest. Returns the position of
/// the maximal root in `queue.trees()` and how many roots the scan passed
/// before reaching it.
pub fn find_max(queue: &RootList, probe: &mut Probe) -> Result<(usize, usize)> {
    let last = queue.trees.len().checked_sub(1).ok_or(Error::EmptyQueue)?;
    let mut best = last;
    for idx in (0..last).rev() {
        if probe.greater(&queue.trees[idx].root, &queue.trees[best].root) {
            best = idx;
        }
    }
    Ok((best, last - best))
}

/// Removes the maximum and merges its children back. The search is tallied
/// under [`Phase::FindMax`], the re-merge under [`Phase::PopMerge`].
pub fn pop_max(mut queue: RootList, probe: &mut Probe) -> Result<(Key, RootList)> {
    probe.set_phase(Phase::FindMax);
    let (idx, _) = find_max(&queue, probe)?;
    let tree = queue.trees.remove(idx);
    queue.count -= tree.size();
    let root = tree.root;
    let children = tree.into_children();
    let orphans = RootList {
        count: children.iter().map(BinomialTree::size).sum(),
        trees: children,
    };
    probe.set_phase(Phase::PopMerge);
    Ok((root, merge_root_lists(queue, orphans, probe)))
}

/// `n` inserts (tallied as [`Phase::Build`]) followed by `n` pops.
pub fn binomial_heapsort(keys: Vec<Key>, probe: &mut Probe) -> Vec<Key> {
    binomial_heapsort_observed(keys, probe, |_| {})
}

/// As [`binomial_heapsort`], calling `observe` on the queue before every pop.
pub fn binomial_heapsort_observed<F>(keys: Vec<Key>, probe: &mut Probe, mut observe: F) -> Vec<Key>
where
    F: FnMut(&RootList),
{
    let n = keys.len();
    probe.set_phase(Phase::Build);
    let mut queue = keys
        .into_iter()
        .fold(RootList::new(), |q, k| insert(q, k, probe));
    let mut out = Vec::with_capacity(n);
    while !queue.is_empty() {
        observe(&queue);
        let (key, rest) = pop_max(queue, probe).expect("queue is non-empty");
        out.push(key);
        queue = rest;
    }
    out.reverse();
    out
}

/// Builds a queue by inserting `keys` in order.
pub fn build_queue(keys: &[Key], probe: &mut Probe) -> RootList {
    probe.set_phase(Phase::Build);
    keys.iter()
        .fold(RootList::new(), |q, &k| insert(q, k, probe))
}
