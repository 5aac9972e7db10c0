use std::path::Path;
use std::process::{Command, Output};

const HEADER: &str = "instance_id,family,sides,k,algorithm,base2d_config,distinct_queries,total_queries,rounds,valid,wall_time_ns,seed";

fn tarski(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tarski"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_doc(dir: &Path, name: &str, doc: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, doc).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn solve_hidden_point_with_each_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_doc(
        dir.path(),
        "hp.json",
        r#"{"kind":"hidden_point","sides":[3,3,3],"p":[2,2,2]}"#,
    );
    for algo in ["new", "dqy", "brute"] {
        let o = tarski(&["solve", "--instance", &path, "--algo", algo]);
        assert_eq!(o.status.code(), Some(0), "{algo}: {}", stderr(&o));
        let out = stdout(&o);
        assert!(out.contains("fixed point: (2,2,2)"), "{out}");
        assert!(out.contains("verified: yes"));
        assert!(out.contains("distinct"));
    }
    let o = tarski(&["solve", "--instance", &path, "--base2d", "staircase"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn non_monotone_table_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_doc(
        dir.path(),
        "bad.json",
        r#"{"kind":"explicit_table","sides":[2,2],"values":[[2,2],[1,1],[2,2],[2,2]]}"#,
    );
    let o = tarski(&["solve", "--instance", &path]);
    assert_ne!(o.status.code(), Some(0));
    assert!(
        stderr(&o).contains("monotonicity violated at (1,1) <= (1,2)"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn missing_instance_file_fails() {
    let o = tarski(&["solve", "--instance", "/nonexistent/instance.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sign_instances_print_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_doc(
        dir.path(),
        "s.json",
        r#"{"kind":"hidden_sign_point","sides":[9,9,9],"p":[4,7,2]}"#,
    );
    let o = tarski(&["solve", "--instance", &path]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("solution: (4,7,2)"), "{}", stdout(&o));
    let o = tarski(&["solve", "--instance", &path, "--algo", "dqy"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn debug_checks_follow_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_doc(
        dir.path(),
        "hp.json",
        r#"{"kind":"coupled_point","sides":[16,16,16,16],"p":[3,9,12,5]}"#,
    );
    let run = |flag: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_tarski"))
            .args(["solve", "--instance", &path])
            .env("TARSKI_DEBUG_CHECKS", flag)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        stdout(&o)
    };
    assert!(run("0").contains(", 0 debug"));
    let on = run("1");
    assert!(!on.contains(", 0 debug"), "{on}");
    let distinct = |s: &str| {
        s.lines()
            .find(|l| l.starts_with("queries"))
            .unwrap()
            .split(' ')
            .nth(1)
            .unwrap()
            .to_string()
    };
    assert_eq!(distinct(&run("0")), distinct(&on));
}

#[test]
fn bench_with_zero_reps_writes_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.csv");
    let o = tarski(&[
        "bench",
        "--family",
        "hidden_point",
        "--k",
        "3",
        "--n-grid",
        "16..64",
        "--reps",
        "0",
        "--seed",
        "1",
        "--algos",
        "new,dqy",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        std::fs::read_to_string(&out).unwrap(),
        format!("{HEADER}\n")
    );
}

#[test]
fn bench_csv_is_stable_apart_from_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = tarski(&[
            "bench",
            "--family",
            "random_steps",
            "--k",
            "3",
            "--n-grid",
            "8,32",
            "--reps",
            "3",
            "--seed",
            "9",
            "--algos",
            "new,dqy,brute",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(stdout(&o).contains("algorithm=dqy"));
        let text = std::fs::read_to_string(out).unwrap();
        assert!(!text.contains('\r'));
        text.lines()
            .map(|l| {
                let mut cols: Vec<&str> = l.split(',').collect();
                cols.remove(10);
                cols.join(",")
            })
            .collect::<Vec<_>>()
    };
    let a = run("a.csv");
    assert_eq!(a.len(), 1 + 2 * 3 * 3);
    assert!(a[1..].iter().all(|l| l.contains(",true,")));
    assert_eq!(a, run("b.csv"));
}

#[test]
fn bench_rejects_bad_grids_and_families() {
    let o = tarski(&[
        "bench",
        "--family",
        "nope",
        "--k",
        "2",
        "--n-grid",
        "4",
        "--out",
        "/tmp/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = tarski(&[
        "bench",
        "--family",
        "hidden_point",
        "--k",
        "2",
        "--n-grid",
        "9..3",
        "--out",
        "/tmp/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_reports_counts() {
    for suite in [
        "exhaustive-small",
        "random",
        "invariants",
        "differential-2d",
    ] {
        let o = tarski(&["verify", "--suite", suite, "--seed", "7", "--cap", "30"]);
        assert_eq!(o.status.code(), Some(0), "{suite}: {}", stdout(&o));
        let out = stdout(&o);
        assert!(
            out.contains("instances") && out.contains("assertions") && out.ends_with("PASS\n"),
            "{out}"
        );
    }
    let o = tarski(&["verify", "--suite", "unknown"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn enumerate_writes_documents_and_index() {
    for (sides, count) in [("2", 3), ("2,2", 36), ("3", 10)] {
        let dir = tempfile::tempdir().unwrap();
        let o = tarski(&[
            "enumerate",
            "--sides",
            sides,
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let index: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("index.json")).unwrap())
                .unwrap();
        assert_eq!(index["count"], count);
        let files = index["files"].as_array().unwrap();
        assert_eq!(files.len(), count);
        for f in files {
            let path = dir.path().join(f.as_str().unwrap());
            let o = tarski(&["solve", "--instance", path.to_str().unwrap()]);
            assert_eq!(o.status.code(), Some(0));
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let o = tarski(&[
        "enumerate",
        "--sides",
        "3,3",
        "--out",
        dir.path().to_str().unwrap(),
        "--cap",
        "100",
    ]);
    assert_ne!(o.status.code(), Some(0));
}
