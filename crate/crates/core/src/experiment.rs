//! Monte Carlo drivers: tallied sorting runs over seeded shuffles, constant
//! fitting, build-phase and root-list measurements, and the string-sorting
//! prediction check.
//!
//! Trial `t` of a run with seed `s` shuffles with seed `s ^ t`, so results do
//! not depend on how trials are scheduled across threads.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::binomial_queue::{binomial_heapsort, binomial_heapsort_observed};
use crate::combinatorics::drift_bound;
use crate::error::{Error, Result};
use crate::heap_core::{heapsort_classic, heapsort_floyd};
use crate::probe::{
    instrumented_quicksort, quicksort_by, shuffled_ranks, Key, Phase, Probe, RedRange, RowContext,
    SplitMix64, StringKey, TallySheet, CSV_HEADER,
};
use crate::run_partition::heapsort_modified;
use crate::trie_model::{build_trie, CostFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algo {
    Classic,
    Floyd,
    Modified,
    Binomial,
    /// First-pivot quicksort on integer keys, through the probe.
    QuicksortStrings,
}

impl Algo {
    pub const ALL: [Algo; 5] = [
        Algo::Classic,
        Algo::Floyd,
        Algo::Modified,
        Algo::Binomial,
        Algo::QuicksortStrings,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Algo::Classic => "classic",
            Algo::Floyd => "floyd",
            Algo::Modified => "modified",
            Algo::Binomial => "binomial",
            Algo::QuicksortStrings => "quicksort-strings",
        }
    }

    /// Phases the algorithm tallies into, in execution order.
    pub fn phases(self) -> &'static [Phase] {
        match self {
            Algo::Classic | Algo::Floyd => &[Phase::Build, Phase::Sort],
            Algo::Modified => &[Phase::Build, Phase::Sort, Phase::Merge],
            Algo::Binomial => &[Phase::Build, Phase::FindMax, Phase::PopMerge],
            Algo::QuicksortStrings => &[Phase::Sort],
        }
    }

    /// Sorts ascending, tallying every comparison.
    pub fn sort(self, keys: Vec<Key>, probe: &mut Probe) -> Vec<Key> {
        match self {
            Algo::Classic => heapsort_classic(keys, probe),
            Algo::Floyd => heapsort_floyd(keys, probe),
            Algo::Modified => heapsort_modified(keys, probe),
            Algo::Binomial => binomial_heapsort(keys, probe),
            Algo::QuicksortStrings => {
                probe.set_phase(Phase::Sort);
                quicksort_by(keys, |a, b| (probe.compare(a, b), 1)).sorted
            }
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Algo {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Algo::ALL
            .into_iter()
            .find(|a| a.label() == s)
            .ok_or_else(|| Error::Unknown {
                kind: "algorithm",
                name: s.to_string(),
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub algo: Algo,
    pub n: usize,
    pub r: usize,
    /// Lowest red rank; `None` means `n - r`.
    pub lo: Option<usize>,
    pub trials: u64,
    pub seed: u64,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
}

impl ExperimentConfig {
    pub fn new(algo: Algo, n: usize, r: usize, trials: u64, seed: u64) -> Self {
        ExperimentConfig {
            algo,
            n,
            r,
            lo: None,
            trials,
            seed,
            jobs: 1,
        }
    }

    pub fn red(&self) -> Result<RedRange> {
        if self.trials == 0 {
            return Err(Error::OutOfRange("trials must be at least 1".into()));
        }
        if self.r > self.n {
            return Err(Error::InvalidRedRange {
                lo: self.lo.unwrap_or(0),
                len: self.r,
                n: self.n,
            });
        }
        RedRange::new(self.lo.unwrap_or(self.n - self.r), self.r, self.n)
    }
}

/// Runs `f(trial)` for every trial on a pool of `jobs` threads, in trial order.
pub fn run_trials<T, F>(trials: u64, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    pool.install(|| (0..trials).into_par_iter().map(&f).collect())
}

/// One tallied sort of a shuffled `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub seed: u64,
    pub sheet: TallySheet,
    pub sorted: bool,
}

pub fn run_trial(algo: Algo, n: usize, red: RedRange, seed: u64) -> TrialOutcome {
    let mut probe = Probe::new(red);
    let out = algo.sort(shuffled_ranks(n, seed), &mut probe);
    let sorted = out.len() == n
        && out
            .iter()
            .enumerate()
            .all(|(i, k)| k.rank == i && !k.is_dummy);
    TrialOutcome {
        seed,
        sheet: probe.into_sheet(),
        sorted,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointSummary {
    pub algo: Algo,
    pub n: usize,
    pub r: usize,
    pub lo: usize,
    pub trials: u64,
    pub mean_red_red: f64,
    pub sd_red_red: f64,
    pub max_red_red: u64,
    pub mean_total: f64,
    /// Mean red/red per phase, aligned with `algo.phases()`.
    pub phase_means: Vec<f64>,
    pub all_sorted: bool,
}

pub const SUMMARY_HEADER: &str =
    "algo,n,r,lo,trials,mean_red_red,sd_red_red,max_red_red,mean_total";

impl PointSummary {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.6},{:.6},{},{:.6}",
            self.algo,
            self.n,
            self.r,
            self.lo,
            self.trials,
            self.mean_red_red,
            self.sd_red_red,
            self.max_red_red,
            self.mean_total
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub summary: PointSummary,
    pub outcomes: Vec<TrialOutcome>,
}

impl ExperimentResult {
    /// Per-trial tally rows under [`CSV_HEADER`].
    pub fn tally_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        self.append_tally_rows(&mut out);
        out
    }

    pub fn append_tally_rows(&self, out: &mut String) {
        let s = &self.summary;
        let red = RedRange { lo: s.lo, len: s.r };
        for o in &self.outcomes {
            let ctx = RowContext {
                seed: o.seed,
                n: s.n,
                red,
                algo: s.algo.label(),
            };
            for row in o.sheet.csv_rows(&ctx, s.algo.phases()) {
                out.push_str(&row);
                out.push('\n');
            }
        }
    }
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let red = cfg.red()?;
    let outcomes = run_trials(cfg.trials, cfg.jobs, |t| {
        run_trial(cfg.algo, cfg.n, red, cfg.seed ^ t)
    });
    let rr: Vec<f64> = outcomes
        .iter()
        .map(|o| o.sheet.total().red_red as f64)
        .collect();
    let (mean_red_red, sd_red_red) = mean_sd(&rr);
    let t = cfg.trials as f64;
    let summary = PointSummary {
        algo: cfg.algo,
        n: cfg.n,
        r: red.len,
        lo: red.lo,
        trials: cfg.trials,
        mean_red_red,
        sd_red_red,
        max_red_red: outcomes
            .iter()
            .map(|o| o.sheet.total().red_red)
            .max()
            .unwrap_or(0),
        mean_total: outcomes
            .iter()
            .map(|o| o.sheet.total().total() as f64)
            .sum::<f64>()
            / t,
        phase_means: cfg
            .algo
            .phases()
            .iter()
            .map(|&p| {
                outcomes
                    .iter()
                    .map(|o| o.sheet.phase(p).red_red as f64)
                    .sum::<f64>()
                    / t
            })
            .collect(),
        all_sorted: outcomes.iter().all(|o| o.sorted),
    };
    Ok(ExperimentResult { summary, outcomes })
}

/// Least-squares fit `mean ≈ c r log2 r + b r` (no intercept).
#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    /// `(r, mean red/red)` points.
    pub points: Vec<(usize, f64)>,
    pub c_hat: f64,
    pub b: f64,
    pub residual_norm: f64,
}

/// Solves the 2x2 normal equations of the `(r log2 r, r)` design.
pub fn fit_constant(points: &[(usize, f64)]) -> Result<FitResult> {
    let (mut s11, mut s12, mut s22, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(r, y) in points {
        let x2 = r as f64;
        let x1 = if r == 0 { 0.0 } else { x2 * x2.log2() };
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        t1 += x1 * y;
        t2 += x2 * y;
    }
    let det = s11 * s22 - s12 * s12;
    if det.abs() <= 1e-9 * (s11 * s22).max(1.0) {
        return Err(Error::OutOfRange(
            "fit needs at least two distinct r values above 1".into(),
        ));
    }
    let c_hat = (t1 * s22 - t2 * s12) / det;
    let b = (s11 * t2 - s12 * t1) / det;
    let residual_norm = points
        .iter()
        .map(|&(r, y)| {
            let x2 = r as f64;
            let x1 = if r == 0 { 0.0 } else { x2 * x2.log2() };
            (y - c_hat * x1 - b * x2).powi(2)
        })
        .sum::<f64>()
        .sqrt();
    Ok(FitResult {
        points: points.to_vec(),
        c_hat,
        b,
        residual_norm,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub experiments: Vec<ExperimentResult>,
    pub fit: Option<FitResult>,
}

impl SweepResult {
    pub fn summary_csv(&self) -> String {
        let mut out = format!("{SUMMARY_HEADER}\n");
        for e in &self.experiments {
            out.push_str(&e.summary.csv_row());
            out.push('\n');
        }
        out
    }

    pub fn tally_csv(&self) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for e in &self.experiments {
            e.append_tally_rows(&mut out);
        }
        out
    }

    pub fn fit_csv(&self) -> Option<String> {
        self.fit.as_ref().map(|f| {
            format!(
                "c_hat,b,residual_norm\n{:.6},{:.6},{:.6}\n",
                f.c_hat, f.b, f.residual_norm
            )
        })
    }
}

/// Runs `base` once per red length in `rs`; fits the constant when at
/// least two lengths are given.
pub fn run_sweep(base: &ExperimentConfig, rs: &[usize]) -> Result<SweepResult> {
    let experiments = rs
        .iter()
        .map(|&r| run_experiment(&ExperimentConfig { r, ..base.clone() }))
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<(usize, f64)> = experiments
        .iter()
        .map(|e| (e.summary.r, e.summary.mean_red_red))
        .collect();
    let fit = if points.len() >= 2 {
        Some(fit_constant(&points)?)
    } else {
        None
    };
    Ok(SweepResult { experiments, fit })
}

// ---------------------------------------------------------------------------
// Build phase

#[derive(Clone, Debug, PartialEq)]
pub struct BuildPoint {
    pub n: usize,
    pub r: usize,
    pub trials: u64,
    pub mean_red_red: f64,
    pub max_red_red: u64,
}

impl BuildPoint {
    pub fn mean_over_r(&self) -> f64 {
        if self.r == 0 {
            0.0
        } else {
            self.mean_red_red / self.r as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BuildPhaseReport {
    pub algo: Algo,
    pub points: Vec<BuildPoint>,
}

impl BuildPhaseReport {
    pub fn max_mean_over_r(&self) -> f64 {
        self.points
            .iter()
            .map(BuildPoint::mean_over_r)
            .fold(0.0, f64::max)
    }

    /// Runs whose build-phase red/red count exceeded `r`.
    pub fn any_run_above_r(&self) -> bool {
        self.points.iter().any(|p| p.max_red_red > p.r as u64)
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("algo,n,r,trials,mean_red_red,max_red_red,mean_over_r\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{:.6},{},{:.6}\n",
                self.algo,
                p.n,
                p.r,
                p.trials,
                p.mean_red_red,
                p.max_red_red,
                p.mean_over_r()
            ));
        }
        out
    }
}

/// Build-phase red/red counts on shuffled inputs, top-`r` red, for each
/// `(n, r)` point.
pub fn run_buildphase_experiment(
    algo: Algo,
    points: &[(usize, usize)],
    trials: u64,
    seed: u64,
    jobs: usize,
) -> Result<BuildPhaseReport> {
    let mut out = Vec::with_capacity(points.len());
    for &(n, r) in points {
        let cfg = ExperimentConfig {
            jobs,
            ..ExperimentConfig::new(algo, n, r, trials, seed)
        };
        let red = cfg.red()?;
        let counts = run_trials(trials, jobs, |t| {
            let mut probe = Probe::new(red);
            algo.sort(shuffled_ranks(n, seed ^ t), &mut probe);
            probe.sheet().phase(Phase::Build).red_red
        });
        out.push(BuildPoint {
            n,
            r,
            trials,
            mean_red_red: counts.iter().sum::<u64>() as f64 / trials as f64,
            max_red_red: counts.iter().copied().max().unwrap_or(0),
        });
    }
    Ok(BuildPhaseReport { algo, points: out })
}

// ---------------------------------------------------------------------------
// Root-list occupancy

/// `C(a, t) / C(m, t)` as a running product; zero when `t > a`.
fn subset_ratio(a: usize, m: usize, t: usize) -> f64 {
    if t > a {
        return 0.0;
    }
    (0..t).map(|i| (a - i) as f64 / (m - i) as f64).product()
}

/// Expected number of trees holding a red key when the `m` keys of a queue
/// with tree sizes `sizes` are uniformly placed and `red` of them are red:
/// `Σ_s (1 - C(m - red, s) / C(m, s))`.
pub fn expected_red_roots(m: usize, red: usize, sizes: &[usize]) -> f64 {
    sizes
        .iter()
        .map(|&s| 1.0 - subset_ratio(m - red.min(m), m, s))
        .sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootListReport {
    pub n: usize,
    pub r: usize,
    pub trials: u64,
    pub snapshots: u64,
    pub mean_red_roots: f64,
    pub mean_prediction: f64,
    /// Standard error of the per-trial mean difference.
    pub sigma: f64,
    pub drift_bound: f64,
}

impl RootListReport {
    /// `|observed - predicted| / sigma`.
    pub fn z_score(&self) -> f64 {
        let d = (self.mean_red_roots - self.mean_prediction).abs();
        if self.sigma == 0.0 {
            if d < 1e-12 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            d / self.sigma
        }
    }

    pub fn csv(&self) -> String {
        format!(
            "n,r,trials,snapshots,mean_red_roots,mean_prediction,sigma,z,drift_bound\n{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
            self.n,
            self.r,
            self.trials,
            self.snapshots,
            self.mean_red_roots,
            self.mean_prediction,
            self.sigma,
            self.z_score(),
            self.drift_bound
        )
    }
}

/// Binomial heapsort with the top `r` keys red. Before each pop that still
/// leaves a red key in the queue, counts red roots and evaluates the
/// uniform-placement prediction for the current tree sizes.
pub fn run_rootlist_experiment(
    n: usize,
    r: usize,
    trials: u64,
    seed: u64,
    jobs: usize,
) -> Result<RootListReport> {
    let red = ExperimentConfig::new(Algo::Binomial, n, r, trials, seed).red()?;
    let per_trial = run_trials(trials, jobs, |t| {
        let mut probe = Probe::uncolored();
        let (mut count, mut predicted, mut snaps) = (0.0f64, 0.0f64, 0u64);
        binomial_heapsort_observed(shuffled_ranks(n, seed ^ t), &mut probe, |q| {
            let popped = n - q.len();
            if popped >= r && r > 0 {
                return;
            }
            count += q.red_roots(&red) as f64;
            predicted += expected_red_roots(q.len(), r - popped.min(r), &q.sizes());
            snaps += 1;
        });
        (count, predicted, snaps)
    });
    let snapshots: u64 = per_trial.iter().map(|x| x.2).sum();
    let denom = snapshots.max(1) as f64;
    let diffs: Vec<f64> = per_trial
        .iter()
        .map(|&(c, p, s)| if s == 0 { 0.0 } else { (c - p) / s as f64 })
        .collect();
    let (_, sd) = mean_sd(&diffs);
    Ok(RootListReport {
        n,
        r,
        trials,
        snapshots,
        mean_red_roots: per_trial.iter().map(|x| x.0).sum::<f64>() / denom,
        mean_prediction: per_trial.iter().map(|x| x.1).sum::<f64>() / denom,
        sigma: sd / (trials as f64).sqrt(),
        drift_bound: drift_bound(r.max(1) as f64),
    })
}

// ---------------------------------------------------------------------------
// String sorting

#[derive(Clone, Debug, PartialEq)]
pub struct TrieReport {
    pub strings: usize,
    pub trials: u64,
    pub prediction: f64,
    pub mean_cost: f64,
    pub min_cost: u64,
    pub max_cost: u64,
}

impl TrieReport {
    pub fn relative_error(&self) -> f64 {
        if self.prediction == 0.0 {
            if self.mean_cost == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean_cost - self.prediction).abs() / self.prediction
        }
    }

    pub fn csv(&self) -> String {
        format!(
            "strings,trials,prediction,mean_cost,min_cost,max_cost,relative_error\n{},{},{:.6},{:.6},{},{},{:.6}\n",
            self.strings,
            self.trials,
            self.prediction,
            self.mean_cost,
            self.min_cost,
            self.max_cost,
            self.relative_error()
        )
    }
}

/// Predicts the expected quicksort symbol cost from the trie and measures
/// it over `trials` shuffles.
pub fn predict_and_measure(
    corpus: &[StringKey],
    trials: u64,
    seed: u64,
    jobs: usize,
) -> Result<TrieReport> {
    if trials == 0 {
        return Err(Error::OutOfRange("trials must be at least 1".into()));
    }
    let prediction = build_trie(corpus)?.predict_cost(&CostFunction::Quicksort)?;
    let costs = run_trials(trials, jobs, |t| {
        instrumented_quicksort(corpus, seed ^ t).cost
    });
    Ok(TrieReport {
        strings: corpus.len(),
        trials,
        prediction,
        mean_cost: costs.iter().sum::<u64>() as f64 / trials as f64,
        min_cost: costs.iter().copied().min().unwrap_or(0),
        max_cost: costs.iter().copied().max().unwrap_or(0),
    })
}

/// `count` distinct random strings over `alphabet` with lengths in
/// `1..=max_len`. With `prefix_free`, no string is a prefix of another.
pub fn random_corpus(
    rng: &mut SplitMix64,
    count: usize,
    max_len: usize,
    alphabet: &[u8],
    prefix_free: bool,
) -> Result<Vec<StringKey>> {
    if alphabet.is_empty() || max_len == 0 {
        return Err(Error::OutOfRange(
            "need a non-empty alphabet and max_len >= 1".into(),
        ));
    }
    let a = alphabet.len() as f64;
    let capacity = if prefix_free {
        a.powi(max_len as i32)
    } else {
        (1..=max_len as i32).map(|l| a.powi(l)).sum()
    };
    if (count as f64) > capacity {
        return Err(Error::OutOfRange(format!(
            "cannot draw {count} strings of length at most {max_len} from {} symbols",
            alphabet.len()
        )));
    }
    let conflicts =
        |a: &[u8], b: &[u8]| a == b || (prefix_free && (a.starts_with(b) || b.starts_with(a)));
    'restart: loop {
        let mut out: Vec<Vec<u8>> = Vec::with_capacity(count);
        let mut misses = 0;
        while out.len() < count {
            let len = 1 + rng.below(max_len as u64) as usize;
            let s: Vec<u8> = (0..len)
                .map(|_| alphabet[rng.below(alphabet.len() as u64) as usize])
                .collect();
            if out.iter().any(|t| conflicts(t, &s)) {
                misses += 1;
                if misses > 1000 {
                    continue 'restart;
                }
                continue;
            }
            out.push(s);
        }
        out.sort();
        return Ok(out.into_iter().map(StringKey).collect());
    }
}

/// Whether `keys` is `0..n` ascending.
pub fn is_rank_sorted(keys: &[Key]) -> bool {
    keys.iter()
        .enumerate()
        .all(|(i, k)| k.rank == i && !k.is_dummy)
}
