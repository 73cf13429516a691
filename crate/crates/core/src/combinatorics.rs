//! Exact counts, split laws and recurrences behind the heapsort analyses.
//!
//! Integer and rational quantities use big-number arithmetic throughout.
//! Floating point appears only in the `H_k`/closed-form `G` sweeps and the
//! inequality checks, each of which reports its truncation bound.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest index accepted by the exact C_N tables.
pub const EXACT_C_MAX: usize = 600;

/// Pascal's triangle rows, grown on demand.
#[derive(Clone, Debug, Default)]
pub struct Pascal {
    rows: Vec<Vec<BigUint>>,
}

impl Pascal {
    pub fn new() -> Self {
        Self::default()
    }

    /// `C(n, k)`, zero when `k > n`.
    pub fn get(&mut self, n: usize, k: usize) -> BigUint {
        if k > n {
            return BigUint::zero();
        }
        self.row(n)[k].clone()
    }

    pub fn row(&mut self, n: usize) -> &[BigUint] {
        while self.rows.len() <= n {
            let next = match self.rows.last() {
                None => vec![BigUint::one()],
                Some(prev) => {
                    let mut r = Vec::with_capacity(prev.len() + 1);
                    r.push(BigUint::one());
                    r.extend(prev.windows(2).map(|w| &w[0] + &w[1]));
                    r.push(BigUint::one());
                    r
                }
            };
            self.rows.push(next);
        }
        &self.rows[n]
    }
}

/// `C(n, k)` by the multiplicative formula; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn rint(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn pow2(e: usize) -> BigUint {
    BigUint::one() << e
}

/// A table value rendered as an integer, a reduced fraction, or a decimal.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Integer(BigUint),
    Rational(BigRational),
    Real(f64),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Integer(n) => write!(f, "{n}"),
            Value::Rational(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Value::Rational(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Value::Real(x) => write!(f, "{x:.12}"),
        }
    }
}

/// Named table keyed by one or more indices.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceTable {
    name: String,
    index_names: Vec<&'static str>,
    values: BTreeMap<Vec<usize>, Value>,
}

impl RecurrenceTable {
    fn new(name: &str, index_names: &[&'static str]) -> Self {
        RecurrenceTable {
            name: name.to_string(),
            index_names: index_names.to_vec(),
            values: BTreeMap::new(),
        }
    }

    fn insert(&mut self, index: Vec<usize>, value: Value) {
        debug_assert_eq!(index.len(), self.index_names.len());
        self.values.insert(index, value);
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn index_names(&self) -> &[&'static str] {
        &self.index_names
    }

    pub fn get(&self, index: &[usize]) -> Option<&Value> {
        self.values.get(index)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], &Value)> {
        self.values.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Index columns followed by `value`.
    pub fn to_csv(&self) -> String {
        let mut out = self.index_names.join(",");
        out.push_str(",value\n");
        for (idx, v) in &self.values {
            let cols: Vec<String> = idx.iter().map(usize::to_string).collect();
            out.push_str(&format!("{},{v}\n", cols.join(",")));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Binary heaps

/// Left subtree size of the `m`-node complete binary tree.
pub fn left_subtree_size(m: usize) -> usize {
    if m <= 1 {
        return 0;
    }
    let h = m.ilog2();
    let half = 1usize << (h - 1);
    let bottom = m - ((1usize << h) - 1);
    (half - 1) + bottom.min(half)
}

/// Number of heap-ordered arrangements of `m` distinct keys.
pub fn heap_count(m: usize) -> BigUint {
    fn go(m: usize, memo: &mut HashMap<usize, BigUint>) -> BigUint {
        if m <= 1 {
            return BigUint::one();
        }
        if let Some(v) = memo.get(&m) {
            return v.clone();
        }
        let k = left_subtree_size(m);
        let v = binomial(m - 1, k) * go(k, memo) * go(m - 1 - k, memo);
        memo.insert(m, v.clone());
        v
    }
    go(m, &mut HashMap::new())
}

// ---------------------------------------------------------------------------
// Binomial queues

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueueCountConvention {
    /// `B_n = C(n, 2^k) B_{2^k} B_{n-2^k}` with `B_{2^m} = C(2^m, 2^{m-1}) B_{2^{m-1}}^2`
    /// and `B_0 = B_1 = B_2 = 1`.
    OrderedJoin,
    /// Heap-ordered labelings of the forest shape: `n! / Π subtree sizes`.
    DistinctStructure,
}

pub fn binomial_queue_count(n: usize, convention: QueueCountConvention) -> BigUint {
    match convention {
        QueueCountConvention::OrderedJoin => ordered_join_count(n),
        QueueCountConvention::DistinctStructure => {
            let mut denom = BigUint::one();
            for bit in 0..usize::BITS {
                if n >> bit & 1 == 1 {
                    denom *= tree_size_product(bit);
                }
            }
            factorial(n) / denom
        }
    }
}

fn ordered_join_count(n: usize) -> BigUint {
    if n <= 2 {
        return BigUint::one();
    }
    let top = 1usize << n.ilog2();
    if top == n {
        let half = ordered_join_count(n / 2);
        binomial(n, n / 2) * &half * &half
    } else {
        binomial(n, top) * ordered_join_count(top) * ordered_join_count(n - top)
    }
}

// Product of all subtree sizes in a binomial tree of order `k`:
// P(k) = 2^k Π_{i<k} P(i).
fn tree_size_product(k: u32) -> BigUint {
    let mut below = BigUint::one();
    let mut current = BigUint::one();
    for i in 0..=k {
        current = pow2(i as usize) * &below;
        below *= &current;
    }
    current
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

// ---------------------------------------------------------------------------
// Split laws

/// Probability that `r'` of the `r` largest keys in a `2m+1`-key heap land in
/// a fixed `m`-key subheap:
/// `C(2m+1-r, m-r') C(r, r') / C(2m+1, m)`. Out-of-range arguments give zero.
pub fn split_probability_p(m: usize, r: usize, r_prime: usize) -> BigRational {
    let total = 2 * m + 1;
    if r > total || r_prime > r || r_prime > m || m - r_prime > total - r {
        return BigRational::zero();
    }
    ratio(
        binomial(total - r, m - r_prime) * binomial(r, r_prime),
        binomial(total, m),
    )
}

/// `C(r, r') / 2^r`; zero when `r' > r`.
pub fn split_probability_t(r: usize, r_prime: usize) -> BigRational {
    ratio(binomial(r, r_prime), pow2(r))
}

/// The set `{r' : P(m, r, r') >= T(r, r')}` as an inclusive range, or `None`
/// when it is empty or has gaps.
pub fn crossing_window(m: usize, r: usize) -> Option<(usize, usize)> {
    let hits: Vec<usize> = (0..=r)
        .filter(|&rp| split_probability_p(m, r, rp) >= split_probability_t(r, rp))
        .collect();
    let (&lo, &hi) = (hits.first()?, hits.last()?);
    (hits.len() == hi - lo + 1).then_some((lo, hi))
}

/// `p^N_k = C(N-1, k) / 2^(N-1)` for `0 <= k <= N-1`.
pub fn alt_model_split(n: usize, k: usize) -> Result<BigRational> {
    if n == 0 || k >= n {
        return Err(Error::OutOfRange(format!(
            "alt_model_split needs 0 <= k <= N-1, got N={n}, k={k}"
        )));
    }
    Ok(ratio(binomial(n - 1, k), pow2(n - 1)))
}

/// `((k+1)/N) p^{N+1}_{k+1} + ((N-k)/N) p^{N+1}_k`, which should equal `p^N_k`.
pub fn alt_model_successor_mix(n: usize, k: usize) -> Result<BigRational> {
    let up =
        alt_model_split(n + 1, k + 1)? * BigRational::new(BigInt::from(k + 1), BigInt::from(n));
    let stay = alt_model_split(n + 1, k)? * BigRational::new(BigInt::from(n - k), BigInt::from(n));
    Ok(up + stay)
}

// ---------------------------------------------------------------------------
// C_N: red comparisons in a fully red heap under the alternate model

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CForm {
    /// `C_N = 1 + Σ_{k=0}^{N-2} C(N-2,k) C_{k+1} / 2^(N-2)`.
    UpperBound,
    /// `C_N = 1 - 2^(2-N) + Σ_{k=0}^{N-2} C(N-2,k) C_{k+1} / 2^(N-2)`: the
    /// root's children are compared only when both subheaps are non-empty.
    Simplified,
}

/// `C_0..=C_{n_max}` exactly, `C_0 = C_1 = C_2 = 0`.
pub fn c_recurrence(n_max: usize, form: CForm) -> Result<Vec<BigRational>> {
    if n_max > EXACT_C_MAX {
        return Err(Error::TooLarge {
            what: "exact C_N index",
            got: n_max,
            cap: EXACT_C_MAX,
        });
    }
    // scaled[N] = C_N * 2^e[N] with e[N] = e[N-1] + (N-2), all integers.
    let mut pascal = Pascal::new();
    let mut scaled: Vec<BigUint> = vec![BigUint::zero(); 3.min(n_max + 1)];
    let mut e: Vec<usize> = vec![0; scaled.len()];
    for n in 3..=n_max {
        let en = e[n - 1] + (n - 2);
        let mut acc = pow2(en);
        if form == CForm::Simplified {
            acc -= pow2(e[n - 1]);
        }
        let row = pascal.row(n - 2).to_vec();
        for (k, c) in row.iter().enumerate() {
            let j = k + 1;
            if !scaled[j].is_zero() {
                acc += (c * &scaled[j]) << (e[n - 1] - e[j]);
            }
        }
        scaled.push(acc);
        e.push(en);
    }
    Ok(scaled
        .into_iter()
        .zip(e)
        .map(|(s, ex)| ratio(s, pow2(ex)))
        .collect())
}

/// The same recurrences in `f64`, for ranges past [`EXACT_C_MAX`].
pub fn c_recurrence_f64(n_max: usize, form: CForm) -> Vec<f64> {
    let mut ln_fact = vec![0.0f64; n_max.max(1) + 1];
    for i in 1..ln_fact.len() {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    let mut c = vec![0.0f64; 3.min(n_max + 1)];
    for n in 3..=n_max {
        let m = n - 2;
        let mut acc = 1.0;
        if form == CForm::Simplified {
            acc -= 2f64.powi(2 - n as i32);
        }
        for k in 0..=m {
            let ln_pmf =
                ln_fact[m] - ln_fact[k] - ln_fact[m - k] - m as f64 * std::f64::consts::LN_2;
            acc += ln_pmf.exp() * c[k + 1];
        }
        c.push(acc);
    }
    c
}

// ---------------------------------------------------------------------------
// H_k coefficients and G(N)

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Truncated {
    pub value: f64,
    /// Upper bound on the omitted tail.
    pub tail_bound: f64,
}

/// `H_k = Σ_{j=0}^{j_cap-1} (1 - (1 - 2^-j)^k)`; the omitted tail is at most
/// `k 2^(1-j_cap)`.
pub fn h_coefficient(k: usize, j_cap: usize) -> Truncated {
    let kf = k as f64;
    let mut value = 0.0;
    for j in 0..j_cap {
        let x = 0.5f64.powi(j as i32);
        value += if j == 0 {
            if k == 0 {
                0.0
            } else {
                1.0
            }
        } else {
            -(kf * (-x).ln_1p()).exp_m1()
        };
    }
    Truncated {
        value,
        tail_bound: kf * 2f64.powi(1 - j_cap as i32),
    }
}

/// Cap giving a tail bound below `1e-12` for `k`.
pub fn h_cap(k: usize) -> usize {
    (k.max(1) as f64).log2().ceil() as usize + 42
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GVariant {
    /// Sum over `k ∈ [0, N]`, the `G(N)` terms moved to the left side.
    RecurrenceFull,
    /// Sum over `k ∈ [1, N-1]`.
    RecurrenceInner,
}

/// `G(0..=n_max)` from `G(N) = N + Σ C(N,k)(G(k) + G(N-k)) / 2^N`,
/// `G(0) = G(1) = G(2) = 0`.
pub fn g_recurrence(n_max: usize, variant: GVariant) -> Vec<BigRational> {
    let mut pascal = Pascal::new();
    let mut g = vec![BigRational::zero(); 3.min(n_max + 1)];
    for n in 3..=n_max {
        let row = pascal.row(n).to_vec();
        let mut sum = BigRational::zero();
        for k in 1..n {
            sum += BigRational::from_integer(BigInt::from(row[k].clone())) * (&g[k] + &g[n - k]);
        }
        let two_n = BigRational::from_integer(BigInt::from(pow2(n)));
        let rhs = rint(n) + sum / &two_n;
        let value = match variant {
            GVariant::RecurrenceInner => rhs,
            GVariant::RecurrenceFull => rhs / (BigRational::one() - rint(2) / two_n),
        };
        g.push(value);
    }
    g
}

/// `G(N) = N Σ_j (1 - (1 - 2^-j)^(N-1)) = N H_{N-1}`.
pub fn g_closed_form(n: usize) -> Truncated {
    if n == 0 {
        return Truncated {
            value: 0.0,
            tail_bound: 0.0,
        };
    }
    let h = h_coefficient(n - 1, h_cap(n - 1));
    Truncated {
        value: n as f64 * h.value,
        tail_bound: n as f64 * h.tail_bound,
    }
}

/// `G(N+2) - 2G(N+1) + G(N)` of the closed form, summed termwise as
/// `Σ_{j>=1} (2x - (N+2)x²)(1-x)^(N-1)` with `x = 2^-j`.
pub fn g_second_difference(n: usize) -> Truncated {
    let nf = n as f64;
    let cap = 120;
    let mut value = 0.0;
    for j in 1..cap {
        let x = 0.5f64.powi(j);
        let decay = if n <= 1 {
            1.0
        } else {
            ((nf - 1.0) * (-x).ln_1p()).exp()
        };
        value += (2.0 * x - (nf + 2.0) * x * x) * decay;
    }
    let tail = 0.5f64.powi(cap);
    Truncated {
        value,
        tail_bound: 4.0 * tail + (nf + 2.0) * tail * tail,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InequalityReport {
    pub checked: usize,
    pub failures: Vec<usize>,
    /// Smallest `lhs / rhs` or `rhs - lhs` seen, with its index, depending on the check.
    pub tightest: (usize, f64),
    pub tail_bound: f64,
}

impl InequalityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }
}

/// Checks `G(N+2) - 2G(N+1) + G(N) > (1 - 2/e)/(N+1)` for `2 <= N <= n_max`.
/// `tightest` is the smallest ratio of difference to bound.
pub fn g_concavity_check(n_max: usize) -> InequalityReport {
    let c = 1.0 - 2.0 / std::f64::consts::E;
    let mut report = InequalityReport {
        checked: 0,
        failures: Vec::new(),
        tightest: (0, f64::INFINITY),
        tail_bound: 0.0,
    };
    for n in 2..=n_max {
        let d = g_second_difference(n);
        let bound = c / (n as f64 + 1.0);
        report.checked += 1;
        report.tail_bound = report.tail_bound.max(d.tail_bound);
        if d.value - d.tail_bound <= bound {
            report.failures.push(n);
        }
        let ratio = d.value / bound;
        if ratio < report.tightest.1 {
            report.tightest = (n, ratio);
        }
    }
    report
}

/// Checks `Σ_{0<r'<r} r' log2 r' < (r-1)²/2 log2 r - (r-1)²/16` for
/// `16 <= r <= r_max`. `tightest` is the smallest slack.
pub fn log_sum_bound_check(r_max: usize) -> InequalityReport {
    let mut report = InequalityReport {
        checked: 0,
        failures: Vec::new(),
        tightest: (0, f64::INFINITY),
        tail_bound: 0.0,
    };
    let mut lhs = 0.0f64;
    for r in 2..=r_max {
        let rp = (r - 1) as f64;
        lhs += rp * rp.log2();
        if r < 16 {
            continue;
        }
        let rhs = rp * rp / 2.0 * (r as f64).log2() - rp * rp / 16.0;
        report.checked += 1;
        let slack = rhs - lhs;
        if slack <= 0.0 {
            report.failures.push(r);
        }
        if slack < report.tightest.1 {
            report.tightest = (r, slack);
        }
    }
    report
}

/// `2(ln r + 1)`: expected steps until a process halving in expectation
/// from `r` reaches zero.
pub fn drift_bound(r: f64) -> f64 {
    2.0 * (r.ln() + 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanBound {
    /// `Σ i p_i Π_{j<i} (1 - p_j)`.
    pub expected: f64,
    /// `Σ i p_i`.
    pub first_moment: f64,
    /// Whether `p_i >= 2 p_{i+1}` throughout.
    pub halving: bool,
}

/// Scan-length quantities for the maximum's position distribution `p`
/// (1-based positions).
pub fn scan_length_bound(p: &[f64]) -> Result<ScanBound> {
    if p.is_empty() || p.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(Error::InvalidDistribution(
            "probabilities must lie in [0, 1] and be non-empty".into(),
        ));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!(
            "probabilities sum to {total}, not 1"
        )));
    }
    let mut survive = 1.0;
    let mut expected = 0.0;
    let mut first_moment = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        let pos = (i + 1) as f64;
        expected += pos * pi * survive;
        first_moment += pos * pi;
        survive *= 1.0 - pi;
    }
    let halving = p.windows(2).all(|w| w[0] >= 2.0 * w[1]);
    Ok(ScanBound {
        expected,
        first_moment,
        halving,
    })
}

// ---------------------------------------------------------------------------
// Named tables

pub const TABLE_NAMES: &[&str] = &[
    "heap-count",
    "binomial-ordered",
    "binomial-distinct",
    "c-upper",
    "c-simplified",
    "alt-split",
    "split-p",
    "g-recurrence-full",
    "g-recurrence-inner",
    "g-closed",
    "h-coefficients",
];

/// Builds the named table for indices up to `max`.
pub fn table_by_name(name: &str, max: usize) -> Result<RecurrenceTable> {
    let mut t;
    match name {
        "heap-count" => {
            t = RecurrenceTable::new(name, &["m"]);
            for m in 0..=max {
                t.insert(vec![m], Value::Integer(heap_count(m)));
            }
        }
        "binomial-ordered" | "binomial-distinct" => {
            let conv = if name == "binomial-ordered" {
                QueueCountConvention::OrderedJoin
            } else {
                QueueCountConvention::DistinctStructure
            };
            t = RecurrenceTable::new(name, &["n"]);
            for n in 0..=max {
                t.insert(vec![n], Value::Integer(binomial_queue_count(n, conv)));
            }
        }
        "c-upper" | "c-simplified" => {
            let form = if name == "c-upper" {
                CForm::UpperBound
            } else {
                CForm::Simplified
            };
            t = RecurrenceTable::new(name, &["n"]);
            for (n, c) in c_recurrence(max, form)?.into_iter().enumerate() {
                t.insert(vec![n], Value::Rational(c));
            }
        }
        "alt-split" => {
            t = RecurrenceTable::new(name, &["n", "k"]);
            for n in 1..=max {
                for k in 0..n {
                    t.insert(vec![n, k], Value::Rational(alt_model_split(n, k)?));
                }
            }
        }
        "split-p" => {
            t = RecurrenceTable::new(name, &["m", "r", "r_prime"]);
            for m in 0..=max {
                for r in 0..=2 * m + 1 {
                    for rp in 0..=r.min(m) {
                        t.insert(
                            vec![m, r, rp],
                            Value::Rational(split_probability_p(m, r, rp)),
                        );
                    }
                }
            }
        }
        "g-recurrence-full" | "g-recurrence-inner" => {
            let v = if name == "g-recurrence-full" {
                GVariant::RecurrenceFull
            } else {
                GVariant::RecurrenceInner
            };
            t = RecurrenceTable::new(name, &["n"]);
            for (n, g) in g_recurrence(max, v).into_iter().enumerate() {
                t.insert(vec![n], Value::Rational(g));
            }
        }
        "g-closed" => {
            t = RecurrenceTable::new(name, &["n"]);
            for n in 0..=max {
                t.insert(vec![n], Value::Real(g_closed_form(n).value));
            }
        }
        "h-coefficients" => {
            t = RecurrenceTable::new(name, &["k"]);
            for k in 0..=max {
                t.insert(vec![k], Value::Real(h_coefficient(k, h_cap(k)).value));
            }
        }
        _ => {
            return Err(Error::Unknown {
                kind: "table",
                name: name.to_string(),
            })
        }
    }
    Ok(t)
}

/// Rational to `f64` via the numerator and denominator bit lengths.
pub fn to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let shift = q.denom().bits().saturating_sub(60) as usize;
    let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Lowest common multiple of the denominators, exposing how exact tables grow.
pub fn denominator_lcm(values: &[BigRational]) -> BigInt {
    values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn pascal_matches_multiplicative() {
        let mut p = Pascal::new();
        for n in 0..40 {
            for k in 0..=n + 1 {
                assert_eq!(p.get(n, k), binomial(n, k));
            }
        }
    }

    #[test]
    fn left_sizes() {
        let got: Vec<usize> = (0..=10).map(left_subtree_size).collect();
        assert_eq!(got, vec![0, 0, 1, 1, 2, 3, 3, 3, 4, 5, 6]);
    }

    #[test]
    fn heap_counts() {
        let got: Vec<u64> = (0..=7).map(|m| heap_count(m).try_into().unwrap()).collect();
        assert_eq!(got, vec![1, 1, 1, 2, 3, 8, 20, 80]);
        assert_eq!(
            heap_count(7),
            binomial(6, 3) * heap_count(3) * heap_count(3)
        );
    }

    #[test]
    fn queue_counts() {
        use QueueCountConvention::*;
        let ordered: Vec<u64> = (0..=8)
            .map(|n| binomial_queue_count(n, OrderedJoin).try_into().unwrap())
            .collect();
        assert_eq!(ordered, vec![1, 1, 1, 3, 6, 30, 90, 630, 2520]);
        let distinct: Vec<u64> = (0..=8)
            .map(|n| {
                binomial_queue_count(n, DistinctStructure)
                    .try_into()
                    .unwrap()
            })
            .collect();
        assert_eq!(distinct, vec![1, 1, 1, 3, 3, 15, 45, 315, 315]);
    }

    #[test]
    fn ordered_join_ratio() {
        for n in 2..=64usize {
            let a = binomial_queue_count(n, QueueCountConvention::OrderedJoin);
            let b = binomial_queue_count(n - 1, QueueCountConvention::OrderedJoin);
            let expect = if n % 2 == 1 {
                q(n as i64, 1)
            } else {
                q(n as i64, 2)
            };
            assert_eq!(ratio(a, b), expect, "n={n}");
        }
    }

    #[test]
    fn p_and_t_normalize() {
        for m in 0..=50usize {
            for r in 0..=2 * m + 1 {
                let sum: BigRational = (0..=r).map(|rp| split_probability_p(m, r, rp)).sum();
                assert_eq!(sum, BigRational::one(), "m={m} r={r}");
            }
        }
        for r in 0..=40 {
            let sum: BigRational = (0..=r).map(|rp| split_probability_t(r, rp)).sum();
            assert_eq!(sum, BigRational::one());
        }
        assert_eq!(split_probability_p(5, 0, 0), BigRational::one());
        assert!(split_probability_p(2, 9, 0).is_zero());
        assert!(split_probability_p(2, 3, 3).is_zero());
    }

    #[test]
    fn crossing_windows_exist() {
        for m in 1..=50usize {
            for r in 0..=20.min(2 * m + 1) {
                let (lo, hi) = crossing_window(m, r).unwrap_or_else(|| panic!("m={m} r={r}"));
                let centre = r as f64 / 2.0;
                assert!(
                    lo as f64 <= centre + 0.5 && hi as f64 >= centre - 0.5,
                    "m={m} r={r}"
                );
            }
        }
    }

    #[test]
    fn alt_split_values() {
        assert_eq!(alt_model_split(2, 0).unwrap(), q(1, 2));
        assert_eq!(alt_model_split(2, 1).unwrap(), q(1, 2));
        assert_eq!(alt_model_split(4, 1).unwrap(), q(3, 8));
        assert!(alt_model_split(4, 4).is_err());
        assert!(alt_model_split(0, 0).is_err());
        for n in 1..=64 {
            for k in 0..n {
                assert_eq!(
                    alt_model_split(n, k).unwrap(),
                    alt_model_successor_mix(n, k).unwrap()
                );
            }
        }
    }

    #[test]
    fn c_small_values() {
        let c = c_recurrence(4, CForm::UpperBound).unwrap();
        assert_eq!(c, vec![q(0, 1), q(0, 1), q(0, 1), q(1, 1), q(5, 4)]);
        let s = c_recurrence(4, CForm::Simplified).unwrap();
        assert_eq!(&s[..4], &[q(0, 1), q(0, 1), q(0, 1), q(1, 2)]);
        assert!(c_recurrence(EXACT_C_MAX + 1, CForm::UpperBound).is_err());
        assert_eq!(c_recurrence(0, CForm::UpperBound).unwrap().len(), 1);
    }

    #[test]
    fn c_exact_agrees_with_rational_recurrence() {
        // Direct BigRational evaluation as an independent path.
        let mut pascal = Pascal::new();
        let mut direct = vec![BigRational::zero(); 3];
        for n in 3..=40usize {
            let mut acc = BigRational::one();
            for k in 0..=n - 2 {
                acc += ratio(pascal.get(n - 2, k), pow2(n - 2)) * &direct[k + 1];
            }
            direct.push(acc);
        }
        assert_eq!(c_recurrence(40, CForm::UpperBound).unwrap(), direct);
    }

    #[test]
    fn c_float_tracks_exact() {
        for form in [CForm::UpperBound, CForm::Simplified] {
            let exact = c_recurrence(200, form).unwrap();
            let float = c_recurrence_f64(200, form);
            for (e, f) in exact.iter().zip(&float) {
                assert!((to_f64(e) - f).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn h_values() {
        let h1 = h_coefficient(1, 60);
        assert!((h1.value - 2.0).abs() < 1e-15);
        assert!(h_coefficient(0, 60).value == 0.0);
        let mut prev = 0.0;
        for k in 1..2000 {
            let h = h_coefficient(k, h_cap(k));
            assert!(h.tail_bound < 1e-12);
            assert!(h.value > prev);
            let resid = h.value - (k as f64).log2();
            assert!((-1.0..=2.0).contains(&resid));
            prev = h.value;
        }
    }

    #[test]
    fn g_recurrence_values() {
        let full = g_recurrence(5, GVariant::RecurrenceFull);
        let inner = g_recurrence(5, GVariant::RecurrenceInner);
        assert!(full[..3].iter().all(Zero::is_zero));
        assert_eq!(full[3], q(4, 1));
        assert_eq!(inner[3], q(3, 1));
    }

    #[test]
    fn g_closed_ratio() {
        for e in 10..=16 {
            let n = 1usize << e;
            let r = g_closed_form(n).value / (n as f64 * (n as f64).log2());
            assert!((0.8..=1.2).contains(&r));
        }
    }

    #[test]
    fn second_difference_matches_table() {
        for n in 2..200usize {
            let g = |m| g_closed_form(m).value;
            let direct = g(n + 2) - 2.0 * g(n + 1) + g(n);
            let termwise = g_second_difference(n).value;
            assert!((direct - termwise).abs() < 1e-8 * (1.0 + n as f64), "n={n}");
        }
    }

    #[test]
    fn concavity_and_log_sum() {
        let c = g_concavity_check(2000);
        assert!(c.passed(), "{c:?}");
        let a = log_sum_bound_check(2000);
        assert!(a.passed());
        assert_eq!(a.checked, 2000 - 15);
    }

    #[test]
    fn drift_values() {
        assert_eq!(drift_bound(1.0), 2.0);
        assert!((drift_bound(std::f64::consts::E) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn scan_bounds() {
        let one = scan_length_bound(&[1.0]).unwrap();
        assert_eq!((one.expected, one.first_moment), (1.0, 1.0));
        let mut geo: Vec<f64> = (1..=50).map(|i| 0.5f64.powi(i)).collect();
        geo[0] += 0.5f64.powi(50);
        let g = scan_length_bound(&geo).unwrap();
        assert!(g.halving);
        assert!(g.expected <= g.first_moment && g.first_moment <= 2.0 + 1e-12);
        assert!(scan_length_bound(&[0.5, 0.4]).is_err());
        assert!(scan_length_bound(&[]).is_err());
        assert!(scan_length_bound(&[1.5, -0.5]).is_err());
    }

    #[test]
    fn tables_render() {
        let t = table_by_name("c-upper", 4).unwrap();
        assert_eq!(t.to_csv(), "n,value\n0,0\n1,0\n2,0\n3,1\n4,5/4\n");
        for name in TABLE_NAMES {
            assert!(!table_by_name(name, 6).unwrap().is_empty());
        }
        assert!(table_by_name("nope", 3).is_err());
    }
}
