//! The `fibsum` binary: output, exit codes and catalog selection.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fibsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibsum"))
        .args(args)
        .env_remove("FIBSUM_CATALOG")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const GOOD: &str = "# group: G-P1
# source: test, line 1
identity T2F { params n in 0..., s in int;
  lhs = 2*sum(k=0..fdiv(n,2); C(n,2*k)*F(2*k+s));
  rhs = F(2*n+s) - (-1)^(s)*F(n-s) }
";

const BROKEN: &str = "# group: G-P1
# source: test, line 2
identity broken { params n in 0...; lhs = F(n); rhs = F(n) + 1 }
";

const SUSPECT: &str = "# group: G-P1
# source: test, line 3
# status: suspect
identity shaky { params n in 0...; lhs = F(n); rhs = F(n) + 1 }
";

fn catalog_with(files: &[(&str, &str)]) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in files {
        fs::write(dir.path().join(name), text).unwrap();
    }
    dir
}

#[test]
fn fib_and_lucas() {
    let o = fibsum(&["fib", "10"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "55\n"));
    assert_eq!(stdout(&fibsum(&["fib", "-8"])), "-21\n");
    assert_eq!(stdout(&fibsum(&["lucas", "-4"])), "7\n");
    assert_eq!(
        stdout(&fibsum(&["fib", "300"])),
        "222232244629420445529739893461909967206666939096499764990979600\n"
    );
}

#[test]
fn usage_errors_exit_2() {
    let o = fibsum(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).contains("Usage"), "{}", stderr(&o));
    assert_eq!(fibsum(&[]).status.code(), Some(2));
    assert_eq!(fibsum(&["fib", "ten"]).status.code(), Some(2));
    assert_eq!(fibsum(&["verify"]).status.code(), Some(2));
    assert_eq!(fibsum(&["verify", "--all", "--grid", "n=9..1"]).status.code(), Some(2));
    assert_eq!(fibsum(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_one_shipped_entry() {
    let o = fibsum(&["verify", "--id", "T2F", "--jobs", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "pass G-P1/T2F cases=403 skipped=0\n1 entries: 1 passed, 0 failed (0 suspect); 403 cases\n"
    );
}

#[test]
fn unknown_id_suggests() {
    let o = fibsum(&["verify", "--id", "T2G"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown id `T2G`; did you mean"), "{}", stderr(&o));
    assert!(stderr(&o).contains("G-P1/T2F"));
}

#[test]
fn exit_1_only_for_normal_failures() {
    let dir = catalog_with(&[("a.fib", GOOD), ("b.fib", BROKEN)]);
    let path = dir.path().to_str().unwrap();
    let o = fibsum(&["--catalog", path, "verify", "--all", "--grid", "n=0..5;s=0..1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stdout(&o).contains("fail G-P1/broken cases=6 skipped=0\n  at n=0: lhs=0 rhs=1\n"),
        "{}",
        stdout(&o)
    );

    let dir = catalog_with(&[("a.fib", GOOD), ("c.fib", SUSPECT)]);
    let o = fibsum(&["--catalog", dir.path().to_str().unwrap(), "verify", "--all"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).ends_with("2 entries: 1 passed, 1 failed (1 suspect); 434 cases\n"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn catalog_sources_and_precedence() {
    let missing = fibsum(&["--catalog", "/nonexistent/catalog", "list"]);
    assert_eq!(missing.status.code(), Some(3));

    let dir = catalog_with(&[("a.fib", GOOD)]);
    let env_only = Command::new(env!("CARGO_BIN_EXE_fibsum"))
        .args(["list"])
        .env("FIBSUM_CATALOG", dir.path())
        .output()
        .unwrap();
    assert_eq!(stdout(&env_only), "G-P1/T2F\tnormal\tn,s\ttest, line 1\n");

    // --catalog beats the environment
    let both = Command::new(env!("CARGO_BIN_EXE_fibsum"))
        .args(["--catalog", "/nonexistent/catalog", "list"])
        .env("FIBSUM_CATALOG", dir.path())
        .output()
        .unwrap();
    assert_eq!(both.status.code(), Some(3));

    let bad = catalog_with(&[("a.fib", "# group: G\nidentity x { lhs = ; rhs = 1 }")]);
    let o = fibsum(&["--catalog", bad.path().to_str().unwrap(), "list"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("a.fib:2:"), "{}", stderr(&o));

    let empty = tempfile::tempdir().unwrap();
    let o = fibsum(&["--catalog", empty.path().to_str().unwrap(), "list"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning: no .fib files"));
}

#[test]
fn list_shipped_group() {
    let o = fibsum(&["list", "--group", "G-L3"]);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 2, "{out}");
    assert!(out.lines().all(|l| l.starts_with("G-L3/")));
}

#[test]
fn eval_a_file() {
    let dir = catalog_with(&[
        ("t.fib", GOOD),
        ("two.fib", &format!("{GOOD}{BROKEN}")),
        ("bad.fib", "identity x {"),
    ]);
    let file = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let o = fibsum(&["eval", &file("t.fib"), "--bind", "n=2,s=0"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "lhs = 2\nrhs = 2\n"));
    assert_eq!(
        stdout(&fibsum(&["eval", &file("t.fib"), "--bind", "n=7,s=3", "--side", "rhs"])),
        "1600\n"
    );
    assert_eq!(
        fibsum(&["eval", &file("two.fib"), "--bind", "n=1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        stdout(&fibsum(&["eval", &file("two.fib"), "--id", "broken", "--bind", "n=1"])),
        "lhs = 1\nrhs = 2\n"
    );
    assert_eq!(
        fibsum(&["eval", &file("t.fib"), "--bind", "n=-1,s=0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        fibsum(&["eval", &file("t.fib"), "--bind", "n=1"]).status.code(),
        Some(2)
    );
    assert_eq!(fibsum(&["eval", &file("bad.fib")]).status.code(), Some(2));
    assert_eq!(fibsum(&["eval", &file("missing.fib")]).status.code(), Some(3));
}

#[test]
fn json_report_roundtrips_grid() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("out.json");
    let o = fibsum(&[
        "verify",
        "--group",
        "G-L3",
        "--grid",
        "p=-3..3;q=-2..2",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc["grid"], "p=-3..3;q=-2..2");
    assert_eq!(doc["summary"]["entries"], 2);
    for r in doc["reports"].as_array().unwrap() {
        assert_eq!(r["grid"], "p=-3..3;q=-2..2");
        assert_eq!(r["cases_checked"], 35);
    }
    let unwritable = fibsum(&["verify", "--id", "T2F", "--json", "/nonexistent/dir/out.json"]);
    assert_eq!(unwritable.status.code(), Some(3));
}

#[test]
fn bench_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fib.csv");
    let o = fibsum(&[
        "bench",
        "fib",
        "--n",
        "1000,2000",
        "--reps",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(&out).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0], ["subject", "n", "reps", "median_ns", "digest"]);
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[1][4], rows[2][4]);
    assert_eq!(
        (rows[3][0], rows[4][0], rows[4][1]),
        ("fib-iterative", "fib-fast-doubling", "2000")
    );

    let o = fibsum(&["bench", "entry", "T2F", "--n", "200", "--reps", "3"]);
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!((rows[0][0], rows[1][0]), ("T2F-lhs", "T2F-rhs"));
    assert_eq!(rows[0][4], rows[1][4]);
    assert_eq!(fibsum(&["bench", "entry", "nope"]).status.code(), Some(2));
    assert_eq!(fibsum(&["bench", "fib", "--reps", "2"]).status.code(), Some(2));
}

#[test]
fn stdout_is_stable_across_runs() {
    let a = stdout(&fibsum(&["verify", "--group", "G-L5", "--jobs", "1"]));
    let b = stdout(&fibsum(&["verify", "--group", "G-L5", "--jobs", "4"]));
    assert_eq!(a, b);
    assert!(Path::new(env!("CARGO_BIN_EXE_fibsum")).exists());
}
