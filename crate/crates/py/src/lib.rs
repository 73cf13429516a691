//! Python bindings. Counts come back as plain ints, exact values as
//! `fractions.Fraction`, tallies as nested dicts keyed by phase label.

use lab::binomial_queue::{insert, pop_max, RootList};
use lab::combinatorics::{self, CForm, QueueCountConvention};
use lab::experiment::{self, Algo, ExperimentConfig};
use lab::heap_core::construct_adversarial_heap;
use lab::probe::{Counts, Key, Phase, Probe, RedRange, StringKey, TallySheet};
use lab::run_partition::almost_binary_expansion as expansion;
use lab::trie_model::{self, CostFunction};
use lab::uniformity_lab;
use num_bigint::BigUint;
use num_rational::BigRational;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: lab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn algo(name: &str) -> PyResult<Algo> {
    name.parse().map_err(to_py)
}

fn convention(name: &str) -> PyResult<QueueCountConvention> {
    match name {
        "ordered" => Ok(QueueCountConvention::OrderedJoin),
        "distinct" => Ok(QueueCountConvention::DistinctStructure),
        _ => Err(PyValueError::new_err(format!(
            "unknown convention `{name}`; expected `ordered` or `distinct`"
        ))),
    }
}

fn c_form(name: &str) -> PyResult<CForm> {
    match name {
        "upper" => Ok(CForm::UpperBound),
        "simplified" => Ok(CForm::Simplified),
        _ => Err(PyValueError::new_err(format!(
            "unknown form `{name}`; expected `upper` or `simplified`"
        ))),
    }
}

/// Red window over rank space `0..n`, defaulting to the top `r` ranks.
fn red_window(n: usize, r: usize, lo: Option<usize>) -> PyResult<RedRange> {
    if r > n {
        return Err(to_py(lab::Error::InvalidRedRange {
            lo: lo.unwrap_or(0),
            len: r,
            n,
        }));
    }
    RedRange::new(lo.unwrap_or(n - r), r, n).map_err(to_py)
}

fn fraction<'py>(py: Python<'py>, q: &BigRational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((q.numer().clone(), q.denom().clone()))
}

fn counts_dict<'py>(py: Python<'py>, c: &Counts) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("red_red", c.red_red)?;
    d.set_item("red_blue", c.red_blue)?;
    d.set_item("blue_blue", c.blue_blue)?;
    d.set_item("dummy", c.dummy_involved)?;
    d.set_item("dummy_dummy", c.dummy_dummy)?;
    d.set_item("total", c.total())?;
    Ok(d)
}

fn sheet_dict<'py>(
    py: Python<'py>,
    sheet: &TallySheet,
    phases: &[Phase],
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for &p in phases {
        d.set_item(p.label(), counts_dict(py, &sheet.phase(p))?)?;
    }
    d.set_item("all", counts_dict(py, &sheet.total())?)?;
    Ok(d)
}

/// Sorts `ranks` with `algo` and returns `(sorted, tally)`. Red keys are the
/// ranks in `lo..lo + r`; `lo` defaults to the top `r` of `0..=max(ranks)`.
#[pyfunction]
#[pyo3(signature = (algo_name, ranks, r = 0, lo = None))]
fn sort<'py>(
    py: Python<'py>,
    algo_name: &str,
    ranks: Vec<usize>,
    r: usize,
    lo: Option<usize>,
) -> PyResult<(Vec<usize>, Bound<'py, PyDict>)> {
    let a = algo(algo_name)?;
    let span = ranks.iter().max().map_or(0, |&m| m + 1).max(r);
    let mut probe = Probe::new(red_window(span, r, lo)?);
    let out = a.sort(ranks.into_iter().map(Key::real).collect(), &mut probe);
    let tally = sheet_dict(py, probe.sheet(), a.phases())?;
    Ok((out.into_iter().map(|k| k.rank).collect(), tally))
}

/// Mean and spread of red/red comparisons over `trials` shuffles.
#[pyfunction]
#[pyo3(signature = (algo_name, n, r, trials = 100, seed = 0, lo = None, jobs = 1))]
#[allow(clippy::too_many_arguments)]
fn run_experiment<'py>(
    py: Python<'py>,
    algo_name: &str,
    n: usize,
    r: usize,
    trials: u64,
    seed: u64,
    lo: Option<usize>,
    jobs: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = ExperimentConfig {
        lo,
        jobs,
        ..ExperimentConfig::new(algo(algo_name)?, n, r, trials, seed)
    };
    let res = experiment::run_experiment(&cfg).map_err(to_py)?;
    let s = &res.summary;
    let d = PyDict::new(py);
    d.set_item("n", s.n)?;
    d.set_item("r", s.r)?;
    d.set_item("lo", s.lo)?;
    d.set_item("trials", s.trials)?;
    d.set_item("mean_red_red", s.mean_red_red)?;
    d.set_item("sd_red_red", s.sd_red_red)?;
    d.set_item("max_red_red", s.max_red_red)?;
    d.set_item("mean_total", s.mean_total)?;
    d.set_item("all_sorted", s.all_sorted)?;
    let phases = PyDict::new(py);
    for (p, m) in cfg.algo.phases().iter().zip(&s.phase_means) {
        phases.set_item(p.label(), m)?;
    }
    d.set_item("phase_means", phases)?;
    d.set_item("tally_csv", res.tally_csv())?;
    Ok(d)
}

/// Runs every `r` in `rs` and fits `mean ≈ c r log2 r + b r`.
#[pyfunction]
#[pyo3(signature = (algo_name, n, rs, trials = 100, seed = 0, jobs = 1))]
fn run_sweep<'py>(
    py: Python<'py>,
    algo_name: &str,
    n: usize,
    rs: Vec<usize>,
    trials: u64,
    seed: u64,
    jobs: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let base = ExperimentConfig {
        jobs,
        ..ExperimentConfig::new(algo(algo_name)?, n, 0, trials, seed)
    };
    let sweep = experiment::run_sweep(&base, &rs).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("summary_csv", sweep.summary_csv())?;
    let means: Vec<(usize, f64)> = sweep
        .experiments
        .iter()
        .map(|e| (e.summary.r, e.summary.mean_red_red))
        .collect();
    d.set_item("means", means)?;
    if let Some(fit) = &sweep.fit {
        d.set_item("c_hat", fit.c_hat)?;
        d.set_item("b", fit.b)?;
        d.set_item("residual_norm", fit.residual_norm)?;
    }
    Ok(d)
}

/// Red roots of the binomial root list against the uniform-placement formula.
#[pyfunction]
#[pyo3(signature = (n, r, trials = 200, seed = 0, jobs = 1))]
fn root_list<'py>(
    py: Python<'py>,
    n: usize,
    r: usize,
    trials: u64,
    seed: u64,
    jobs: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let rep = experiment::run_rootlist_experiment(n, r, trials, seed, jobs).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("snapshots", rep.snapshots)?;
    d.set_item("mean_red_roots", rep.mean_red_roots)?;
    d.set_item("mean_prediction", rep.mean_prediction)?;
    d.set_item("sigma", rep.sigma)?;
    d.set_item("z", rep.z_score())?;
    d.set_item("drift_bound", rep.drift_bound)?;
    Ok(d)
}

/// Trie prediction of the quicksort symbol cost and its measured mean.
#[pyfunction]
#[pyo3(signature = (strings, trials = 1000, seed = 0, jobs = 1))]
fn predict_and_measure<'py>(
    py: Python<'py>,
    strings: Vec<String>,
    trials: u64,
    seed: u64,
    jobs: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let corpus: Vec<StringKey> = strings
        .into_iter()
        .map(|s| StringKey(s.into_bytes()))
        .collect();
    let rep = experiment::predict_and_measure(&corpus, trials, seed, jobs).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("prediction", rep.prediction)?;
    d.set_item("mean_cost", rep.mean_cost)?;
    d.set_item("min_cost", rep.min_cost)?;
    d.set_item("max_cost", rep.max_cost)?;
    d.set_item("relative_error", rep.relative_error())?;
    Ok(d)
}

/// A named recurrence or counting table as CSV.
#[pyfunction]
#[pyo3(signature = (name, max = 10))]
fn table(name: &str, max: usize) -> PyResult<String> {
    Ok(combinatorics::table_by_name(name, max)
        .map_err(to_py)?
        .to_csv())
}

#[pyfunction]
fn table_names() -> Vec<&'static str> {
    combinatorics::TABLE_NAMES.to_vec()
}

#[pyfunction]
fn heap_count(m: usize) -> BigUint {
    combinatorics::heap_count(m)
}

#[pyfunction]
#[pyo3(signature = (n, convention_name = "ordered"))]
fn binomial_queue_count(n: usize, convention_name: &str) -> PyResult<BigUint> {
    Ok(combinatorics::binomial_queue_count(
        n,
        convention(convention_name)?,
    ))
}

/// `C_0..=C_n_max` as fractions.
#[pyfunction]
#[pyo3(signature = (n_max, form = "upper"))]
fn c_recurrence<'py>(
    py: Python<'py>,
    n_max: usize,
    form: &str,
) -> PyResult<Vec<Bound<'py, PyAny>>> {
    combinatorics::c_recurrence(n_max, c_form(form)?)
        .map_err(to_py)?
        .iter()
        .map(|q| fraction(py, q))
        .collect()
}

#[pyfunction]
fn almost_binary_expansion(n: usize) -> Vec<u32> {
    expansion(n).terms
}

/// Ranks of the worst-case heap on `2^k - 1` keys, in array order.
#[pyfunction]
fn adversarial_heap(k: u32) -> PyResult<Vec<usize>> {
    let heap = construct_adversarial_heap(k).map_err(to_py)?;
    Ok(heap.live().iter().map(|key| key.rank).collect())
}

/// Exhaustive structure census: `buildheap`, `binomial-build` or `binomial-pop`.
#[pyfunction]
fn census(kind: &str, n: usize) -> PyResult<Vec<(String, u64)>> {
    let c = match kind {
        "buildheap" => uniformity_lab::census_buildheap(n),
        "binomial-build" => uniformity_lab::census_binomial_build(n),
        "binomial-pop" => uniformity_lab::census_binomial_popmax(n),
        _ => {
            return Err(PyValueError::new_err(format!(
                "unknown census `{kind}`; expected buildheap, binomial-build or binomial-pop"
            )))
        }
    }
    .map_err(to_py)?;
    Ok(c.counts.into_iter().collect())
}

/// Root split sizes under coin-flip insertion against the binomial law.
#[pyfunction]
#[pyo3(signature = (n, trials = 20_000, seed = 0))]
fn split_law<'py>(
    py: Python<'py>,
    n: usize,
    trials: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let rep = uniformity_lab::alternate_split_law(n, trials, seed).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("observed", rep.observed)?;
    d.set_item("expected", rep.expected)?;
    d.set_item("chi_square", rep.chi_square)?;
    d.set_item("p_value", rep.p_value)?;
    Ok(d)
}

/// Trie over every prefix of a set of distinct strings.
#[pyclass(name = "PrefixTrie", frozen)]
struct PyPrefixTrie {
    inner: trie_model::PrefixTrie,
}

#[pymethods]
impl PyPrefixTrie {
    #[new]
    fn new(strings: Vec<String>) -> PyResult<Self> {
        let keys: Vec<StringKey> = strings
            .into_iter()
            .map(|s| StringKey(s.into_bytes()))
            .collect();
        Ok(PyPrefixTrie {
            inner: trie_model::build_trie(&keys).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_corpus(text: &[u8]) -> PyResult<Self> {
        let keys = trie_model::parse_corpus(text).map_err(to_py)?;
        Ok(PyPrefixTrie {
            inner: trie_model::build_trie(&keys).map_err(to_py)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Thickness of the node for `prefix`, or None when absent.
    fn thickness(&self, prefix: &str) -> Option<usize> {
        self.inner.get(prefix.as_bytes()).map(|n| n.thickness)
    }

    fn thicknesses(&self) -> Vec<usize> {
        self.inner.thicknesses()
    }

    /// `(depth, thickness, nodes)` rows.
    fn histogram(&self) -> Vec<(usize, usize, usize)> {
        self.inner
            .histogram()
            .into_iter()
            .map(|((depth, thickness), count)| (depth, thickness, count))
            .collect()
    }

    fn histogram_csv(&self) -> String {
        self.inner.histogram_csv()
    }

    /// `Σ f(thickness)` for cost function `q`, `r` or `zero`.
    #[pyo3(signature = (cost = "q"))]
    fn predict(&self, cost: &str) -> PyResult<f64> {
        let f = CostFunction::by_name(cost).map_err(to_py)?;
        self.inner.predict_cost(&f).map_err(to_py)
    }

    fn predict_exact<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.predict_q_exact())
    }
}

/// A binomial queue over integer ranks with its own comparison tally.
#[pyclass(name = "BinomialQueue")]
struct PyBinomialQueue {
    queue: RootList,
    probe: Probe,
}

#[pymethods]
impl PyBinomialQueue {
    /// Keys with rank in `red_lo..red_lo + red_len` are tallied as red.
    #[new]
    #[pyo3(signature = (red_lo = 0, red_len = 0))]
    fn new(red_lo: usize, red_len: usize) -> Self {
        PyBinomialQueue {
            queue: RootList::new(),
            probe: Probe::new(RedRange {
                lo: red_lo,
                len: red_len,
            }),
        }
    }

    fn __len__(&self) -> usize {
        self.queue.len()
    }

    fn insert(&mut self, rank: usize) {
        self.probe.set_phase(Phase::Build);
        let q = std::mem::take(&mut self.queue);
        self.queue = insert(q, Key::real(rank), &mut self.probe);
    }

    fn pop_max(&mut self) -> PyResult<usize> {
        let q = std::mem::take(&mut self.queue);
        match pop_max(q.clone(), &mut self.probe) {
            Ok((key, rest)) => {
                self.queue = rest;
                Ok(key.rank)
            }
            Err(e) => {
                self.queue = q;
                Err(to_py(e))
            }
        }
    }

    /// Tree sizes in root-list order.
    fn sizes(&self) -> Vec<usize> {
        self.queue.sizes()
    }

    fn red_roots(&self) -> usize {
        self.queue.red_roots(self.probe.red())
    }

    fn is_valid(&self) -> bool {
        self.queue.is_valid()
    }

    fn canonical(&self) -> String {
        self.queue.canonical()
    }

    fn tally<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        sheet_dict(py, self.probe.sheet(), Algo::Binomial.phases())
    }
}

#[pymodule]
#[pyo3(name = "cmplab")]
fn cmplab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(sort, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(root_list, m)?)?;
    m.add_function(wrap_pyfunction!(predict_and_measure, m)?)?;
    m.add_function(wrap_pyfunction!(table, m)?)?;
    m.add_function(wrap_pyfunction!(table_names, m)?)?;
    m.add_function(wrap_pyfunction!(heap_count, m)?)?;
    m.add_function(wrap_pyfunction!(binomial_queue_count, m)?)?;
    m.add_function(wrap_pyfunction!(c_recurrence, m)?)?;
    m.add_function(wrap_pyfunction!(almost_binary_expansion, m)?)?;
    m.add_function(wrap_pyfunction!(adversarial_heap, m)?)?;
    m.add_function(wrap_pyfunction!(census, m)?)?;
    m.add_function(wrap_pyfunction!(split_law, m)?)?;
    m.add_class::<PyPrefixTrie>()?;
    m.add_class::<PyBinomialQueue>()?;
    m.add("ALGORITHMS", Algo::ALL.map(Algo::label).to_vec())?;
    Ok(())
}
