//! Black-box checks of the command-line front end: every subcommand is
//! exercised through the compiled binary, and failures land on the
//! documented exit codes (0 ok, 1 usage or invalid input, 2 numerical,
//! 3 file I/O or format).

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mcg-sparse"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary spawns")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn assert_code(out: &Output, want: i32, what: &str) {
    assert_eq!(
        out.status.code(),
        Some(want),
        "{what}: expected exit {want}, got {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        stdout_of(out),
        stderr_of(out)
    );
}

#[test]
fn help_and_version_exit_zero() {
    assert_code(&run(&["--help"]), 0, "--help");
    assert_code(&run(&["--version"]), 0, "--version");
    assert_code(&run(&["solve", "--help"]), 0, "solve --help");
}

#[test]
fn unknown_subcommand_and_missing_flags_are_usage_errors() {
    assert_code(&run(&["bogus"]), 1, "unknown subcommand");
    assert_code(&run(&["perror", "--k", "10"]), 1, "missing perror flags");
    // flag parsing succeeds but the family needs --n and --k
    assert_code(&run(&["gen", "gaussian"]), 1, "gen without dimensions");
}

#[test]
fn perror_prints_exact_value_and_bound() {
    let out = run(&["perror", "--k", "200", "--s", "12", "--m2", "20", "--p", "6"]);
    assert_code(&out, 0, "perror");
    let text = stdout_of(&out);
    let mut exact = None;
    let mut bound = None;
    for line in text.lines() {
        if let Some(v) = line.strip_prefix("exact ") {
            exact = Some(v.parse::<f64>().expect("parsable exact value"));
        }
        if let Some(v) = line.strip_prefix("bound ") {
            bound = Some(v.parse::<f64>().expect("parsable bound value"));
        }
    }
    let exact = exact.expect("an `exact` line");
    let bound = bound.expect("a `bound` line");
    let reference = 1.979587533826156e-5;
    assert!(
        ((exact - reference) / reference).abs() < 1e-12,
        "exact {exact:e} should match {reference:e}"
    );
    assert!(bound > exact, "the union bound {bound:e} sits above {exact:e}");

    // impossible settings are rejected as usage errors
    assert_code(
        &run(&["perror", "--k", "10", "--s", "20", "--m2", "4", "--p", "1"]),
        1,
        "s > K",
    );
}

#[test]
fn gen_writes_deterministic_dictionaries() {
    let dir = tempfile::tempdir().expect("temp dir");
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for path in [&a, &b] {
        let out = run(&[
            "gen", "gaussian", "--n", "15", "--k", "25", "--seed", "0", "--out",
            path.to_str().unwrap(),
        ]);
        assert_code(&out, 0, "gen gaussian");
    }
    let bytes_a = std::fs::read(&a).expect("dictionary written");
    let bytes_b = std::fs::read(&b).expect("dictionary written");
    assert_eq!(bytes_a, bytes_b, "same seed must give identical files");

    // stdout mode emits the same text format, header first
    let out = run(&["gen", "gaussian", "--n", "15", "--k", "25", "--seed", "0"]);
    assert_code(&out, 0, "gen to stdout");
    assert_eq!(stdout_of(&out).as_bytes(), bytes_a.as_slice());

    let odct = run(&["gen", "odct", "--n", "16", "--k", "32"]);
    assert_code(&odct, 0, "gen odct");
    assert!(stdout_of(&odct).starts_with("16 32\n"));
}

fn write_dict(dir: &Path) -> String {
    let path = dir.join("dict.txt");
    let out = run(&[
        "gen", "gaussian", "--n", "15", "--k", "25", "--seed", "0", "--out",
        path.to_str().unwrap(),
    ]);
    assert_code(&out, 0, "gen for fixture");
    path.to_str().unwrap().to_owned()
}

#[test]
fn mcg_exports_parse_and_report_subset_counts() {
    let dir = tempfile::tempdir().expect("temp dir");
    let dict = write_dict(dir.path());
    let graph_path = dir.path().join("graph.json");

    let out = run(&[
        "mcg", "--dict", &dict, "--order", "3", "--threshold", "0.5", "--out",
        graph_path.to_str().unwrap(),
    ]);
    assert_code(&out, 0, "mcg");
    let stderr = stderr_of(&out);
    assert!(
        stderr.contains("ill subsets at order 3 threshold 0.5"),
        "summary line missing from: {stderr}"
    );
    let text = std::fs::read_to_string(&graph_path).expect("graph written");
    let v: serde_json::Value = serde_json::from_str(&text).expect("valid JSON");
    assert_eq!(v["order"], 3);
    assert_eq!(v["num_nodes"], 25);
    assert!(v["ill_subsets"].as_array().is_some_and(|s| !s.is_empty()));

    // dot output by extension sniffing
    let dot_path = dir.path().join("graph.dot");
    let out = run(&["mcg", "--dict", &dict, "--out", dot_path.to_str().unwrap()]);
    assert_code(&out, 0, "mcg dot");
    let dot = std::fs::read_to_string(&dot_path).expect("dot written");
    assert!(dot.starts_with("graph"), "dot export starts with `graph`");

    // a caps failure is an invalid-input error and leaves no output file
    let capped = dir.path().join("capped.json");
    let out = run(&[
        "mcg", "--dict", &dict, "--cap", "5", "--out", capped.to_str().unwrap(),
    ]);
    assert_code(&out, 1, "mcg over cap");
    assert!(!capped.exists(), "failed runs must not leave partial files");
}

#[test]
fn solve_emits_solution_json_on_stdout_and_disk() {
    let dir = tempfile::tempdir().expect("temp dir");
    let dict = write_dict(dir.path());

    let out = run(&[
        "solve", "--dict", &dict, "--synth-s", "3", "--synth-seed", "11",
        "--solver", "l1",
    ]);
    assert_code(&out, 0, "solve l1");
    let v: serde_json::Value =
        serde_json::from_str(&stdout_of(&out)).expect("solution JSON on stdout");
    let coefficients = v["coefficients"].as_array().expect("coefficients array");
    assert_eq!(coefficients.len(), 25);
    assert!(v["support"].as_array().is_some());
    assert!(v["residual_norm"].as_f64().expect("residual") < 1e-6);
    assert!(v["converged"].as_bool().is_some());
    assert!(stderr_of(&out).contains("exact-support recovery"));

    // same trial through a file: identical bytes modulo the output channel
    let sol_path = dir.path().join("solution.json");
    let again = run(&[
        "solve", "--dict", &dict, "--synth-s", "3", "--synth-seed", "11",
        "--solver", "l1", "--out", sol_path.to_str().unwrap(),
    ]);
    assert_code(&again, 0, "solve l1 to file");
    let from_disk = std::fs::read_to_string(&sol_path).expect("solution written");
    assert_eq!(from_disk, stdout_of(&out), "reruns are byte-identical");

    // the graph-weighted solver requires a graph file
    assert_code(
        &run(&["solve", "--dict", &dict, "--synth-s", "3", "--solver", "mcg-irls"]),
        1,
        "mcg-irls without --graph",
    );
    // and exactly one signal source
    assert_code(
        &run(&["solve", "--dict", &dict, "--solver", "l1"]),
        1,
        "no signal source",
    );

    // a graph built by one subcommand feeds the next
    let graph_path = dir.path().join("graph.json");
    let built = run(&[
        "mcg", "--dict", &dict, "--order", "3", "--threshold", "0.5", "--out",
        graph_path.to_str().unwrap(),
    ]);
    assert_code(&built, 0, "mcg for solve");
    let out = run(&[
        "solve", "--dict", &dict, "--synth-s", "3", "--synth-seed", "11",
        "--solver", "mcg-irls", "--graph", graph_path.to_str().unwrap(),
    ]);
    assert_code(&out, 0, "solve mcg-irls");

    let out = run(&[
        "solve", "--dict", &dict, "--synth-s", "2", "--synth-seed", "5",
        "--solver", "combinatorial", "--m", "6", "--p", "2",
    ]);
    assert_code(&out, 0, "solve combinatorial");
    assert!(stderr_of(&out).contains("subproblems="));
}

#[test]
fn io_failures_exit_three() {
    let dir = tempfile::tempdir().expect("temp dir");
    let missing = dir.path().join("absent.txt").to_str().unwrap().to_owned();
    assert_code(
        &run(&["solve", "--dict", &missing, "--synth-s", "3", "--solver", "l1"]),
        3,
        "missing dictionary",
    );
    assert_code(&run(&["mcg", "--dict", &missing]), 3, "missing dictionary for mcg");

    let mangled = dir.path().join("mangled.txt");
    std::fs::write(&mangled, "15 25\n1.0 2.0 not-a-number\n").expect("fixture written");
    assert_code(
        &run(&["mcg", "--dict", mangled.to_str().unwrap()]),
        3,
        "malformed dictionary",
    );

    let dict = write_dict(dir.path());
    let bad_signal = dir.path().join("short.txt");
    std::fs::write(&bad_signal, "1.0 2.0\n").expect("fixture written");
    assert_code(
        &run(&[
            "solve", "--dict", &dict, "--y", bad_signal.to_str().unwrap(),
            "--solver", "l1",
        ]),
        1,
        "signal length mismatch",
    );
}

#[test]
fn experiment_runs_a_small_spec_end_to_end() {
    let dir = tempfile::tempdir().expect("temp dir");
    let spec_path = dir.path().join("spec.json");
    let spec = serde_json::json!({
        "dict_source": { "kind": "gaussian", "n": 10, "k": 15, "seed": 5 },
        "sparsity_range": [1, 2],
        "trials_per_s": 40,
        "master_seed": 11,
        "solvers": [ { "kind": "l1" } ],
        "success_criterion": { "kind": "exact-support" },
        "mcg_params": { "order": 2, "threshold": 0.4 },
        "partition_params": null,
        "correlation_orders": [2]
    });
    std::fs::write(&spec_path, serde_json::to_string_pretty(&spec).unwrap())
        .expect("spec written");
    let out_dir = dir.path().join("report");

    let out = run(&[
        "experiment", "--spec", spec_path.to_str().unwrap(), "--out",
        out_dir.to_str().unwrap(), "--trials-per-s", "20",
    ]);
    assert_code(&out, 0, "experiment");
    let text = stdout_of(&out);
    assert!(text.contains("l1 s=1"), "per-sparsity lines on stdout: {text}");
    for f in [
        "report.json",
        "success_rates.csv",
        "atom_errors.csv",
        "iterations.csv",
        "plot.py",
    ] {
        assert!(out_dir.join(f).exists(), "{f} must be written");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .expect("report JSON");
    // the override wins over the spec's trial count
    assert_eq!(report["spec"]["trials_per_s"], 20);
    assert_eq!(report["solvers"][0]["per_sparsity"][0]["trials"], 20);

    // an unreadable spec is an I/O failure
    let out = run(&[
        "experiment", "--spec",
        dir.path().join("absent.json").to_str().unwrap(), "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_code(&out, 3, "missing spec");
}
