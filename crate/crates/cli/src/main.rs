//! `bench_cli`: runs the lab's experiments and checks from the command line.
//!
//! Every subcommand writes CSV. Exit status is 0 when every configured
//! assertion holds, 1 when one fails and 2 on bad input or I/O errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cmplab::combinatorics::{
    binomial_queue_count, g_concavity_check, heap_count, log_sum_bound_check, table_by_name,
    QueueCountConvention, TABLE_NAMES,
};
use cmplab::experiment::{
    predict_and_measure, run_buildphase_experiment, run_rootlist_experiment, run_sweep, Algo,
    ExperimentConfig,
};
use cmplab::probe::CSV_HEADER;
use cmplab::trie_model::{build_trie, parse_corpus, CostFunction};
use cmplab::uniformity_lab::{
    alternate_split_law, census_binomial_build, census_binomial_popmax, census_buildheap,
    mature_phase_census, DistributionCensus,
};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Lab(#[from] cmplab::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "bench_cli",
    version,
    about = "Comparison-counting experiments for heapsort variants"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Base seed; trial t uses seed XOR t.
    #[arg(long, env = "CMPLAB_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 lets the pool decide).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Output file for the main CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sorts shuffled inputs and tallies comparisons by color and phase.
    ///
    /// Per-trial tally rows go to --out (or stdout); the per-r summary and,
    /// for two or more r values, the fitted constant go to --summary (or
    /// stdout after the tally rows).
    Experiment {
        #[arg(long)]
        algo: Algo,
        #[arg(long)]
        n: usize,
        /// Red range lengths, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<usize>,
        /// Lowest red rank; defaults to n - r.
        #[arg(long)]
        lo: Option<usize>,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Fail unless the fitted constant lies in LO,HI.
        #[arg(long, value_name = "LO,HI", value_parser = parse_band)]
        c_band: Option<(f64, f64)>,
        #[command(flatten)]
        common: Common,
    },
    /// Build-phase red/red comparisons per red key.
    BuildPhase {
        #[arg(long, default_value = "classic")]
        algo: Algo,
        /// Input sizes, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Red lengths matching --n (or one value for all); defaults to n/4.
        #[arg(long, value_delimiter = ',')]
        r: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        /// Fail if any mean exceeds this multiple of r.
        #[arg(long, default_value_t = 4.0)]
        max_ratio: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Red roots in the binomial root list against the placement formula.
    RootList {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        /// Fail if the observed mean is more than this many standard errors away.
        #[arg(long, default_value_t = 3.0)]
        max_z: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Prefix-trie histogram and predicted symbol comparisons for a corpus.
    ///
    /// The (depth, thickness) histogram goes to --out (or stdout); the
    /// predictions, and the quicksort measurement when --trials > 0, follow
    /// on stdout.
    PredictTrie {
        corpus: PathBuf,
        /// Cost functions: q (quicksort), r (n log2 n), zero.
        #[arg(long, value_delimiter = ',', default_value = "q,r")]
        cost: Vec<String>,
        /// Shuffled quicksort runs to measure; 0 skips the measurement.
        #[arg(long, default_value_t = 0)]
        trials: u64,
        /// Fail if the measured mean deviates from the prediction by more than this fraction.
        #[arg(long)]
        max_error: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Runs one named check and prints a pass/fail line plus its CSV.
    Verify {
        /// One of: buildheap-uniformity, binomial-build-uniformity,
        /// binomial-pop-uniformity, split-law, mature, g-concavity, log-sum.
        check: String,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 20_000)]
        trials: u64,
        /// Upper index for the inequality checks.
        #[arg(long, default_value_t = 10_000)]
        max: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Emits a recurrence or counting table with exact values.
    Table {
        name: String,
        #[arg(long, default_value_t = 10)]
        max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_band(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected LO,HI")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("bad LO: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("bad HI: {e}"))?;
    if lo > hi {
        return Err(format!("empty band {lo} > {hi}"));
    }
    Ok((lo, hi))
}

fn write_to(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `text` to `path`, or to stdout when there is none.
fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => write_to(p, text),
        None => {
            let mut out = io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
                // A closed reader (`| head`) is not an error.
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source: e,
                }),
                _ => Ok(()),
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_experiment_cmd(
    algo: Algo,
    n: usize,
    rs: &[usize],
    lo: Option<usize>,
    trials: u64,
    summary: Option<&Path>,
    c_band: Option<(f64, f64)>,
    common: &Common,
) -> CliResult<bool> {
    let base = ExperimentConfig {
        lo,
        jobs: common.jobs,
        ..ExperimentConfig::new(algo, n, 0, trials, common.seed)
    };
    let sweep = run_sweep(&base, rs)?;
    let mut tally = String::from(CSV_HEADER);
    tally.push('\n');
    for e in &sweep.experiments {
        e.append_tally_rows(&mut tally);
    }
    emit(common.out.as_deref(), &tally)?;

    let mut report = sweep.summary_csv();
    if let Some(fit) = sweep.fit_csv() {
        report.push_str(&fit);
    }
    emit(summary, &report)?;

    let mut ok = sweep.experiments.iter().all(|e| e.summary.all_sorted);
    if !ok {
        eprintln!("FAIL: some trial produced unsorted output");
    }
    if let Some((lo, hi)) = c_band {
        match &sweep.fit {
            Some(fit) if (lo..=hi).contains(&fit.c_hat) => {
                eprintln!("PASS: c_hat = {:.6} in [{lo}, {hi}]", fit.c_hat);
            }
            Some(fit) => {
                eprintln!("FAIL: c_hat = {:.6} outside [{lo}, {hi}]", fit.c_hat);
                ok = false;
            }
            None => {
                return Err(CliError::Usage(
                    "--c-band needs at least two --r values".into(),
                ));
            }
        }
    }
    Ok(ok)
}

fn run_buildphase_cmd(
    algo: Algo,
    ns: &[usize],
    rs: &[usize],
    trials: u64,
    max_ratio: f64,
    common: &Common,
) -> CliResult<bool> {
    let points: Vec<(usize, usize)> = match rs.len() {
        0 => ns.iter().map(|&n| (n, n / 4)).collect(),
        1 => ns.iter().map(|&n| (n, rs[0])).collect(),
        k if k == ns.len() => ns.iter().copied().zip(rs.iter().copied()).collect(),
        _ => {
            return Err(CliError::Usage(
                "--r must have one value or as many values as --n".into(),
            ))
        }
    };
    let rep = run_buildphase_experiment(algo, &points, trials, common.seed, common.jobs)?;
    emit(common.out.as_deref(), &rep.csv())?;
    let worst = rep.max_mean_over_r();
    let ok = worst <= max_ratio;
    eprintln!(
        "{}: max mean build red/red / r = {worst:.6} (limit {max_ratio})",
        if ok { "PASS" } else { "FAIL" }
    );
    Ok(ok)
}

fn run_rootlist_cmd(
    n: usize,
    r: usize,
    trials: u64,
    max_z: f64,
    common: &Common,
) -> CliResult<bool> {
    let rep = run_rootlist_experiment(n, r, trials, common.seed, common.jobs)?;
    emit(common.out.as_deref(), &rep.csv())?;
    let z = rep.z_score();
    let ok = z <= max_z;
    eprintln!(
        "{}: z = {z:.4} (limit {max_z})",
        if ok { "PASS" } else { "FAIL" }
    );
    Ok(ok)
}

fn run_predict_cmd(
    corpus_path: &Path,
    costs: &[String],
    trials: u64,
    max_error: Option<f64>,
    common: &Common,
) -> CliResult<bool> {
    let bytes = fs::read(corpus_path).map_err(|source| CliError::Io {
        path: corpus_path.to_path_buf(),
        source,
    })?;
    let corpus = parse_corpus(&bytes)?;
    let trie = build_trie(&corpus)?;
    emit(common.out.as_deref(), &trie.histogram_csv())?;
    let mut text = String::from(if common.out.is_none() { "\n" } else { "" });
    text.push_str("cost_function,prediction\n");
    for name in costs {
        let f = CostFunction::by_name(name)?;
        text.push_str(&format!("{name},{:.6}\n", trie.predict_cost(&f)?));
    }
    emit(None, &text)?;
    if trials == 0 {
        if max_error.is_some() {
            return Err(CliError::Usage("--max-error needs --trials > 0".into()));
        }
        return Ok(true);
    }
    let rep = predict_and_measure(&corpus, trials, common.seed, common.jobs)?;
    emit(None, &format!("\n{}", rep.csv()))?;
    let Some(limit) = max_error else {
        return Ok(true);
    };
    let err = rep.relative_error();
    let ok = err <= limit;
    eprintln!(
        "{}: relative error {err:.6} (limit {limit})",
        if ok { "PASS" } else { "FAIL" }
    );
    Ok(ok)
}

/// Uniform counts over exactly `expected` structures (a decimal big integer).
fn census_verdict(name: &str, census: &DistributionCensus, expected: String) -> (bool, String) {
    let ok = census.is_uniform() && census.distinct().to_string() == expected;
    let line = format!(
        "{name}: {} structures (expected {expected}), counts {}..{}",
        census.distinct(),
        census.min_count(),
        census.max_count()
    );
    (ok, line)
}

fn run_verify_cmd(
    check: &str,
    n: usize,
    trials: u64,
    max: usize,
    common: &Common,
) -> CliResult<bool> {
    let forests = |m| binomial_queue_count(m, QueueCountConvention::DistinctStructure).to_string();
    let (ok, line, csv) = match check {
        "buildheap-uniformity" => {
            let c = census_buildheap(n)?;
            let (ok, line) = census_verdict(check, &c, heap_count(n).to_string());
            (ok, line, c.to_csv())
        }
        "binomial-build-uniformity" => {
            let c = census_binomial_build(n)?;
            let (ok, line) = census_verdict(check, &c, forests(n));
            (ok, line, c.to_csv())
        }
        "binomial-pop-uniformity" => {
            let c = census_binomial_popmax(n)?;
            let (ok, line) = census_verdict(check, &c, forests(n.saturating_sub(1)));
            (ok, line, c.to_csv())
        }
        "split-law" => {
            let rep = alternate_split_law(n, trials, common.seed)?;
            let ok = rep.passes(1e-6);
            let mut csv = String::from("k,observed,expected\n");
            for (k, (o, e)) in rep.observed.iter().zip(&rep.expected).enumerate() {
                csv.push_str(&format!("{k},{o},{e:.6}\n"));
            }
            let line = format!(
                "{check}: chi2 = {:.4}, p = {:.6}",
                rep.chi_square, rep.p_value
            );
            (ok, line, csv)
        }
        "mature" => {
            let rep = mature_phase_census(n, trials, common.seed)?;
            let r = n as f64;
            let rel = (rep.mean_first_pop - rep.c_simplified).abs() / rep.c_simplified;
            let ok = rel <= 0.10 && rep.mean_total <= r * r.log2() + 4.0 * r;
            let csv = format!(
                "n,trials,mean_first_pop,c_simplified,c_upper,mean_per_pop,mean_total,max_total\n{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{}\n",
                rep.n, rep.trials, rep.mean_first_pop, rep.c_simplified, rep.c_upper,
                rep.mean_per_pop, rep.mean_total, rep.max_total
            );
            let line = format!(
                "{check}: first pop {:.4} vs C_N {:.4} ({:.2}% off)",
                rep.mean_first_pop,
                rep.c_simplified,
                100.0 * rel
            );
            (ok, line, csv)
        }
        "g-concavity" | "log-sum" => {
            let rep = if check == "g-concavity" {
                g_concavity_check(max)
            } else {
                log_sum_bound_check(max)
            };
            let csv = format!(
                "checked,failures,tightest_index,tightest_value,tail_bound\n{},{},{},{:.6},{:e}\n",
                rep.checked,
                rep.failures.len(),
                rep.tightest.0,
                rep.tightest.1,
                rep.tail_bound
            );
            let line = format!(
                "{check}: {} indices, {} failures",
                rep.checked,
                rep.failures.len()
            );
            (rep.passed(), line, csv)
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown check `{other}`; expected one of buildheap-uniformity, \
                 binomial-build-uniformity, binomial-pop-uniformity, split-law, mature, \
                 g-concavity, log-sum"
            )))
        }
    };
    emit(
        None,
        &format!("{} {line}\n", if ok { "PASS" } else { "FAIL" }),
    )?;
    emit(common.out.as_deref(), &csv)?;
    Ok(ok)
}

fn run_table_cmd(name: &str, max: usize, out: Option<&Path>) -> CliResult<bool> {
    let table = table_by_name(name, max).map_err(|e| match e {
        cmplab::Error::Unknown { .. } => CliError::Usage(format!(
            "unknown table `{name}`; expected one of {}",
            TABLE_NAMES.join(", ")
        )),
        other => other.into(),
    })?;
    emit(out, &table.to_csv())?;
    Ok(true)
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Experiment {
            algo,
            n,
            r,
            lo,
            trials,
            summary,
            c_band,
            common,
        } => run_experiment_cmd(algo, n, &r, lo, trials, summary.as_deref(), c_band, &common),
        Command::BuildPhase {
            algo,
            n,
            r,
            trials,
            max_ratio,
            common,
        } => run_buildphase_cmd(algo, &n, &r, trials, max_ratio, &common),
        Command::RootList {
            n,
            r,
            trials,
            max_z,
            common,
        } => run_rootlist_cmd(n, r, trials, max_z, &common),
        Command::PredictTrie {
            corpus,
            cost,
            trials,
            max_error,
            common,
        } => run_predict_cmd(&corpus, &cost, trials, max_error, &common),
        Command::Verify {
            check,
            n,
            trials,
            max,
            common,
        } => run_verify_cmd(&check, n, trials, max, &common),
        Command::Table { name, max, out } => run_table_cmd(&name, max, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
