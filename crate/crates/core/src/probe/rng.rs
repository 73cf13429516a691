use super::{ranked_keys, Key};

/// SplitMix64, bit-exact:
///
/// ```text
/// state += 0x9E37_79B9_7F4A_7C15
/// z = state
/// z = (z ^ (z >> 30)) * 0xBF58_476D_1CE4_E5B9
/// z = (z ^ (z >> 27)) * 0x94D0_49BB_1331_11EB
/// return z ^ (z >> 31)
/// ```
///
/// All arithmetic wraps modulo 2^64. Bounded draws use Lemire's
/// multiply-shift with rejection (see [`SplitMix64::below`]), so a seed
/// determines every shuffle in every experiment.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform integer in `0..bound`.
    ///
    /// `m = x * bound` as a 128-bit product; if the low word is below
    /// `2^64 mod bound` the draw is rejected and repeated. The result is the
    /// high word of `m`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let m = (self.next_u64() as u128) * (bound as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    /// A fair coin.
    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }

    /// Uniform in `[0, 1)` with 53 bits.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Fisher–Yates: for `i` from `len-1` down to `1`, swap `i` with a uniform
/// index in `0..=i`.
pub fn shuffle<T>(items: &mut [T], seed: u64) {
    shuffle_with(items, &mut SplitMix64::new(seed));
}

/// [`shuffle`] drawing from an existing generator.
pub fn shuffle_with<T>(items: &mut [T], rng: &mut SplitMix64) {
    for i in (1..items.len()).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

/// Keys `0..n` in a seed-determined uniformly random order.
pub fn shuffled_ranks(n: usize, seed: u64) -> Vec<Key> {
    let mut keys = ranked_keys(n);
    shuffle(&mut keys, seed);
    keys
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn splitmix_reference_values() {
        // Reference output of the published splitmix64.c for seed 1234567.
        let mut rng = SplitMix64::new(1234567);
        let got: Vec<u64> = (0..5).map(|_| rng.next_u64()).collect();
        assert_eq!(
            got,
            vec![
                6457827717110365317,
                3203168211198807973,
                9817491932198370423,
                4593380528125082431,
                16408922859458223821
            ]
        );
    }

    #[test]
    fn same_seed_same_permutation() {
        let mut a: Vec<u32> = (0..50).collect();
        let mut b = a.clone();
        shuffle(&mut a, 42);
        shuffle(&mut b, 42);
        assert_eq!(a, b);
        let mut c: Vec<u32> = (0..50).collect();
        shuffle(&mut c, 43);
        assert_ne!(a, c);
    }

    #[test]
    fn empty_and_singleton() {
        let mut e: Vec<u8> = vec![];
        shuffle(&mut e, 1);
        assert!(e.is_empty());
        let mut s = vec![9];
        shuffle(&mut s, 1);
        assert_eq!(s, vec![9]);
    }

    #[test]
    fn permutations_of_four_are_uniform() {
        let trials = 240_000u64;
        let mut freq: HashMap<Vec<u8>, u64> = HashMap::new();
        for t in 0..trials {
            let mut v = vec![0u8, 1, 2, 3];
            shuffle(&mut v, t.wrapping_mul(0x9E37_79B9) ^ 0xABCD);
            *freq.entry(v).or_default() += 1;
        }
        assert_eq!(freq.len(), 24);
        let p = 1.0 / 24.0;
        let mean = trials as f64 * p;
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        for (perm, &count) in &freq {
            let z = (count as f64 - mean).abs() / sigma;
            assert!(z < 5.0, "{perm:?} count {count} is {z:.2} sigma off");
        }
    }

    #[test]
    fn below_stays_in_range() {
        let mut rng = SplitMix64::new(7);
        for bound in [1u64, 2, 3, 7, 1000, u64::MAX] {
            for _ in 0..200 {
                assert!(rng.below(bound) < bound);
            }
        }
    }
}
