use std::path::PathBuf;
use std::process::{Command, Output};

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bench_cli"))
        .args(args)
        .env_remove("CMPLAB_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn experiment_output_is_identical_across_job_counts() {
    let run = |jobs: &str| {
        let out = scratch(&format!("tally-{jobs}.csv"));
        let o = bench(&[
            "experiment",
            "--algo",
            "binomial",
            "--n",
            "300",
            "--r",
            "16,32,64",
            "--trials",
            "12",
            "--seed",
            "99",
            "--jobs",
            jobs,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        (std::fs::read(out).unwrap(), o.stdout)
    };
    let (tally1, summary1) = run("1");
    let (tally3, summary3) = run("3");
    assert_eq!(tally1, tally3);
    assert_eq!(summary1, summary3);
    let text = String::from_utf8(tally1).unwrap();
    assert!(text.starts_with("seed,n,r,lo,algo,phase,red_red,red_blue,blue_blue,dummy,total\n"));
    // 3 r values x 12 trials x (3 phases + total).
    assert_eq!(text.lines().count(), 1 + 3 * 12 * 4);
}

#[test]
fn seed_falls_back_to_the_environment() {
    let run = |seed: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_bench_cli"));
        cmd.args([
            "experiment",
            "--algo",
            "floyd",
            "--n",
            "200",
            "--r",
            "20",
            "--trials",
            "3",
        ]);
        cmd.env_remove("CMPLAB_SEED");
        if let Some(s) = seed {
            cmd.env("CMPLAB_SEED", s);
        }
        cmd.output().unwrap().stdout
    };
    let explicit = bench(&[
        "experiment",
        "--algo",
        "floyd",
        "--n",
        "200",
        "--r",
        "20",
        "--trials",
        "3",
        "--seed",
        "5",
    ]);
    assert_eq!(run(Some("5")), explicit.stdout);
    assert_ne!(run(Some("5")), run(None));
}

#[test]
fn single_key_makes_no_comparisons() {
    let o = bench(&[
        "experiment",
        "--algo",
        "classic",
        "--n",
        "1",
        "--r",
        "1",
        "--trials",
        "1",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let all_row = text.lines().find(|l| l.contains(",all,")).unwrap();
    assert!(all_row.ends_with(",0,0,0,0,0"), "{all_row}");
}

#[test]
fn failed_assertions_exit_with_one() {
    let o = bench(&[
        "build-phase",
        "--n",
        "255",
        "--trials",
        "5",
        "--max-ratio",
        "0.1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = bench(&["build-phase", "--n", "255", "--trials", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let o = bench(&[
        "experiment",
        "--algo",
        "modified",
        "--n",
        "511",
        "--r",
        "16,32,64",
        "--trials",
        "5",
        "--c-band",
        "5,6",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_input_exits_with_two() {
    assert_eq!(
        bench(&["experiment", "--algo", "bogo", "--n", "3", "--r", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bench(&["experiment", "--algo", "floyd", "--n", "3", "--r", "4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bench(&["verify", "buildheap-uniformity", "--n", "12"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(bench(&["verify", "no-such-check"]).status.code(), Some(2));
    assert_eq!(bench(&["table", "nope"]).status.code(), Some(2));
    let o = bench(&["predict-trie", "/definitely/missing/corpus.txt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/definitely/missing/corpus.txt"));
}

#[test]
fn predict_trie_reports_histogram_and_predictions() {
    let corpus = scratch("pair.txt");
    std::fs::write(&corpus, "ab\nac\n").unwrap();
    let o = bench(&[
        "predict-trie",
        corpus.to_str().unwrap(),
        "--cost",
        "q,zero",
        "--trials",
        "50",
        "--max-error",
        "0",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("depth,thickness,nodes\n0,2,1\n1,2,1\n2,1,2\n"));
    assert!(text.contains("q,2.000000\n"));
    assert!(text.contains("zero,0.000000\n"));
    assert!(text.contains("2,50,2.000000,2.000000,2,2,0.000000"));
}

#[test]
fn verify_checks_pass_at_small_sizes() {
    for check in [
        "buildheap-uniformity",
        "binomial-build-uniformity",
        "binomial-pop-uniformity",
    ] {
        let o = bench(&["verify", check, "--n", "5"]);
        assert!(o.status.success(), "{check}");
        assert!(stdout(&o).starts_with("PASS "));
    }
    let o = bench(&[
        "verify",
        "split-law",
        "--n",
        "8",
        "--trials",
        "5000",
        "--seed",
        "1",
    ]);
    assert!(o.status.success());
    let o = bench(&["verify", "g-concavity", "--max", "500"]);
    assert!(o.status.success());
}

#[test]
fn tables_render_exact_values() {
    let out = scratch("c-upper.csv");
    let o = bench(&[
        "table",
        "c-upper",
        "--max",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(
        std::fs::read_to_string(out).unwrap(),
        "n,value\n0,0\n1,0\n2,0\n3,1\n4,5/4\n"
    );
}
