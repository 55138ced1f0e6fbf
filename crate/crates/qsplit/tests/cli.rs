//! End-to-end checks of the command-line interface through the built binary.

use std::path::Path;
use std::process::{Command, Output};

use qsplit::bench::read_trace_csv;
use qsplit::ising::IsingModel;

fn qsplit() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qsplit"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("binary runs");
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn run_benchmark(out_dir: &Path) {
    run_ok(
        qsplit()
            .args([
                "run",
                "--instance",
                "reg:16",
                "--method",
                "splitting",
                "--method",
                "lnls",
                "--m",
                "8",
                "--method",
                "sa-full",
                "--topology",
                "chimera:1,2,4",
                "--maxiter",
                "3",
                "--maxsubiter",
                "4",
                "--seeds",
                "0,1",
                "--out",
            ])
            .arg(out_dir)
            .env("QSPLIT_THREADS", "1"),
    );
}

#[test]
fn run_writes_trace_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    run_benchmark(dir.path());

    let rows = read_trace_csv(&dir.path().join("trace.csv")).unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.instance == "reg:16"));
    let methods: std::collections::BTreeSet<&str> =
        rows.iter().map(|r| r.method.as_str()).collect();
    assert_eq!(
        methods.into_iter().collect::<Vec<_>>(),
        vec!["lnls-m8", "sa-full", "splitting"]
    );

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary.as_array().unwrap().len(), 3 * 2);
    assert!(summary[0]["ratio"].as_f64().is_some());
}

#[test]
fn repeated_runs_agree_except_wall_time() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    run_benchmark(dir_a.path());
    run_benchmark(dir_b.path());

    let mut a = read_trace_csv(&dir_a.path().join("trace.csv")).unwrap();
    let mut b = read_trace_csv(&dir_b.path().join("trace.csv")).unwrap();
    for r in a.iter_mut().chain(b.iter_mut()) {
        r.wall_ms = 0.0;
    }
    assert_eq!(a, b);
}

#[test]
fn curves_and_rank_consume_run_output() {
    let dir = tempfile::tempdir().unwrap();
    run_benchmark(dir.path());
    let trace = dir.path().join("trace.csv");

    let out = run_ok(qsplit().arg("curves").arg("--trace").arg(&trace));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "method,iteration,mean_ratio,n_instances");
    assert!(lines.next().unwrap().split(',').count() == 4);

    let curves_file = dir.path().join("curves.csv");
    run_ok(qsplit().arg("curves").arg("--trace").arg(&trace).arg("--out").arg(&curves_file));
    assert!(std::fs::read_to_string(&curves_file).unwrap().starts_with("method,iteration"));

    let out = run_ok(
        qsplit()
            .arg("rank")
            .arg("--trace")
            .arg(&trace)
            .args(["--ablation", "splitting,lnls-m8"]),
    );
    let text = stdout(&out);
    assert!(text.starts_with("instance,"), "rank table first: {text}");
    let json_start = text.find('{').expect("ablation JSON follows the table");
    let counts: serde_json::Value = serde_json::from_str(&text[json_start..]).unwrap();
    assert_eq!(counts["total"], 1);
    let sum = counts["better"].as_u64().unwrap()
        + counts["equal"].as_u64().unwrap()
        + counts["worse"].as_u64().unwrap();
    assert_eq!(sum, 1);
}

#[test]
fn topology_dump_formats() {
    let out = run_ok(qsplit().args(["topology", "dump", "--topology", "chimera:1,1,2"]));
    assert_eq!(stdout(&out), "0 2\n0 3\n1 2\n1 3\n");

    // Flag spelling used by the graph tooling: family + size + format.
    let out = run_ok(qsplit().args([
        "topology", "dump", "--family", "pegasus", "--size", "2", "--format", "edgelist",
    ]));
    assert_eq!(stdout(&out).lines().count(), 168);

    let out = run_ok(qsplit().args(["topology", "dump", "--topology", "pegasus", "--n", "10"]));
    for line in stdout(&out).lines() {
        let mut parts = line.split_whitespace();
        let i: usize = parts.next().unwrap().parse().unwrap();
        let j: usize = parts.next().unwrap().parse().unwrap();
        assert!(i < j && j < 10);
    }
}

#[test]
fn instance_gen_and_oracle() {
    let out = run_ok(qsplit().args(["instance", "gen", "reg", "--n", "12"]));
    let model = IsingModel::from_json(&stdout(&out)).unwrap();
    assert_eq!(model.n(), 12);
    assert_eq!(model.b()[0], 1.0);

    let out = run_ok(qsplit().args(["oracle", "reg", "--n", "12"]));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["n"], 12);
    let spins: Vec<i8> = doc["spins"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_i64().unwrap() as i8)
        .collect();
    let s = qsplit::SpinVector::new(spins).unwrap();
    let e = model.energy(&s).unwrap();
    assert!((e - doc["energy"].as_f64().unwrap()).abs() < 1e-9);
}

#[test]
fn bad_arguments_fail_cleanly() {
    let out = qsplit()
        .args(["run", "--instance", "reg:10", "--method", "teleport"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown method"));

    let out = qsplit()
        .args(["run", "--instance", "reg:10", "--method", "splitting", "--seeds", "a,b"])
        .output()
        .unwrap();
    assert!(!out.status.success());

    let out = qsplit()
        .args(["topology", "dump", "--topology", "chimera:1,1,2", "--format", "dot"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
