//! Array-backed binary max-heap with classic and Floyd sift procedures.
//!
//! Positions are 1-indexed: the children of `i` are `2i` and `2i + 1`, the
//! parent is `i / 2`. Every key comparison is made through the [`Probe`].

use crate::error::{Error, Result};
use crate::probe::{Key, Phase, Probe, RedRange};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeapArray {
    slots: Vec<Key>,
    heap_size: usize,
}

pub fn left(i: usize) -> usize {
    2 * i
}

pub fn right(i: usize) -> usize {
    2 * i + 1
}

pub fn parent(i: usize) -> usize {
    i / 2
}

impl HeapArray {
    /// Wraps `keys` as slots `1..=len`; the heap size starts at `len`.
    pub fn from_keys(keys: Vec<Key>) -> Self {
        let heap_size = keys.len();
        HeapArray {
            slots: keys,
            heap_size,
        }
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn heap_size(&self) -> usize {
        self.heap_size
    }

    pub fn set_heap_size(&mut self, size: usize) {
        assert!(size <= self.slots.len(), "heap size exceeds slot count");
        self.heap_size = size;
    }

    pub fn is_empty(&self) -> bool {
        self.heap_size == 0
    }

    pub fn get(&self, i: usize) -> Key {
        self.slots[i - 1]
    }

    pub fn set(&mut self, i: usize, key: Key) {
        self.slots[i - 1] = key;
    }

    pub fn swap(&mut self, i: usize, j: usize) {
        self.slots.swap(i - 1, j - 1);
    }

    /// Appends a slot past the current end and grows the heap over it.
    pub fn push(&mut self, key: Key) {
        self.slots.push(key);
        self.heap_size = self.slots.len();
    }

    /// All slots, including any past the heap size.
    pub fn slots(&self) -> &[Key] {
        &self.slots
    }

    /// Slots `1..=heap_size`.
    pub fn live(&self) -> &[Key] {
        &self.slots[..self.heap_size]
    }

    pub fn into_keys(self) -> Vec<Key> {
        self.slots
    }

    /// Heap order over `1..=heap_size`.
    pub fn is_heap(&self) -> bool {
        (2..=self.heap_size).all(|c| self.get(parent(c)) >= self.get(c))
    }

    /// The root is red: the heap has matured with respect to `red`.
    pub fn is_mature(&self, red: &RedRange) -> bool {
        self.heap_size > 0 && red.is_red(&self.get(1))
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.heap_size {
            Err(Error::InvalidIndex {
                index: i,
                heap_size: self.heap_size,
            })
        } else {
            Ok(())
        }
    }
}

/// Restores heap order below `i`, assuming both subtrees of `i` are heaps.
/// At most two comparisons per level descended.
pub fn max_heapify(heap: &mut HeapArray, i: usize, probe: &mut Probe) -> Result<()> {
    heap.check_index(i)?;
    let size = heap.heap_size;
    let mut i = i;
    loop {
        let (l, r) = (left(i), right(i));
        let mut largest = i;
        if l <= size && probe.greater(&heap.get(l), &heap.get(i)) {
            largest = l;
        }
        if r <= size && probe.greater(&heap.get(r), &heap.get(largest)) {
            largest = r;
        }
        if largest == i {
            return Ok(());
        }
        heap.swap(i, largest);
        i = largest;
    }
}

/// Bottom-up heap construction: `max_heapify` at `heap_size, ..., 1`.
pub fn build_heap(heap: &mut HeapArray, probe: &mut Probe) {
    for i in (1..=heap.heap_size).rev() {
        max_heapify(heap, i, probe).expect("index within heap");
    }
}

/// Treats position `i` as a hole and promotes the larger child into it until
/// the hole reaches the bottom. One comparison per level with two children,
/// none with one. Returns the final hole position.
pub fn sift_down(heap: &mut HeapArray, i: usize, probe: &mut Probe) -> Result<usize> {
    heap.check_index(i)?;
    let size = heap.heap_size;
    let mut hole = i;
    loop {
        let (l, r) = (left(hole), right(hole));
        let child = if r <= size {
            if probe.less(&heap.get(l), &heap.get(r)) {
                r
            } else {
                l
            }
        } else if l <= size {
            l
        } else {
            return Ok(hole);
        };
        heap.set(hole, heap.get(child));
        hole = child;
    }
}

/// Moves the key at `i` up while it beats its parent.
pub fn sift_up(heap: &mut HeapArray, i: usize, probe: &mut Probe) -> Result<()> {
    heap.check_index(i)?;
    let mut i = i;
    while i != 1 {
        let p = parent(i);
        if !probe.less(&heap.get(p), &heap.get(i)) {
            break;
        }
        heap.swap(p, i);
        i = p;
    }
    Ok(())
}

/// Floyd's pop repair.
///
/// The key at `i` is taken as already removed. The last live slot supplies
/// the fill element and leaves the heap (`heap_size` drops by one); the hole
/// is sifted to the bottom of the shrunken heap, the fill is dropped into it
/// and sifted up. The freed slot at the old `heap_size` is left for the
/// caller to overwrite.
pub fn max_heapify_floyd(heap: &mut HeapArray, i: usize, probe: &mut Probe) -> Result<()> {
    if heap.heap_size == 0 {
        return Err(Error::EmptyHeap);
    }
    heap.check_index(i)?;
    let last = heap.heap_size;
    let fill = heap.get(last);
    heap.heap_size -= 1;
    if i == last {
        return Ok(());
    }
    let j = sift_down(heap, i, probe)?;
    heap.set(j, fill);
    sift_up(heap, j, probe)
}

/// Classic heapsort. Build-phase comparisons are tallied under
/// [`Phase::Build`], pops under [`Phase::Sort`].
pub fn heapsort_classic(keys: Vec<Key>, probe: &mut Probe) -> Vec<Key> {
    let mut heap = HeapArray::from_keys(keys);
    probe.set_phase(Phase::Build);
    build_heap(&mut heap, probe);
    probe.set_phase(Phase::Sort);
    let n = heap.slot_count();
    for end in (2..=n).rev() {
        heap.swap(1, end);
        heap.heap_size -= 1;
        max_heapify(&mut heap, 1, probe).expect("heap is non-empty");
    }
    heap.into_keys()
}

/// Pops every element of a built heap with Floyd's repair, leaving the slots
/// in ascending order.
pub fn floyd_sort_phase(heap: &mut HeapArray, pops: usize, probe: &mut Probe) {
    for _ in 0..pops {
        let end = heap.heap_size;
        let max = heap.get(1);
        max_heapify_floyd(heap, 1, probe).expect("heap is non-empty");
        heap.set(end, max);
    }
}

/// Heapsort with Floyd's improvement.
pub fn heapsort_floyd(keys: Vec<Key>, probe: &mut Probe) -> Vec<Key> {
    let mut heap = HeapArray::from_keys(keys);
    probe.set_phase(Phase::Build);
    build_heap(&mut heap, probe);
    probe.set_phase(Phase::Sort);
    let pops = heap.heap_size().saturating_sub(1);
    floyd_sort_phase(&mut heap, pops, probe);
    heap.into_keys()
}

/// Red range of the degenerate heap built by [`construct_adversarial_heap`]:
/// the top `2k - 1` ranks of `2^k - 1`.
pub fn adversarial_red_range(k: u32) -> Result<RedRange> {
    if k < 2 {
        return Err(Error::ExponentTooSmall(k));
    }
    let n = (1usize << k) - 1;
    RedRange::top(n, 2 * k as usize - 1)
}

/// A heap on `n = 2^k - 1` keys whose top `r = 2k - 1` ranks sit on the right
/// spine and on the left sibling of every spine node below the root.
///
/// The spine holds the top `k` ranks, decreasing with depth; the left
/// siblings hold the next `k - 1`, increasing with depth. Every spine key
/// beats every red sibling, so each Floyd pop runs the hole down the whole
/// remaining spine with a red/red comparison per level, and the deep siblings
/// refill the spine as it drains. Blue ranks fill the remaining positions in
/// decreasing order of position.
pub fn construct_adversarial_heap(k: u32) -> Result<HeapArray> {
    let red = adversarial_red_range(k)?;
    let n = (1usize << k) - 1;
    let mut slots = vec![None; n + 1];
    let top = n - 1;
    for depth in 0..k as usize {
        let spine = (1usize << (depth + 1)) - 1;
        slots[spine] = Some(Key::real(top - depth));
        if depth > 0 {
            slots[spine - 1] = Some(Key::real(red.lo + depth - 1));
        }
    }
    let mut next_blue = red.lo;
    let keys = (1..=n)
        .map(|i| {
            slots[i].unwrap_or_else(|| {
                next_blue -= 1;
                Key::real(next_blue)
            })
        })
        .collect();
    Ok(HeapArray::from_keys(keys))
}
