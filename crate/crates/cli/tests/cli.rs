use std::path::Path;
use std::process::{Command, Output};

fn mlpit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlpit"))
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

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn gen(dir: &Path, args: &[&str]) -> String {
    let out = dir.join("h.txt");
    let out = out.to_str().unwrap();
    let mut all = vec!["gen-hs"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", out]);
    let o = mlpit(&all);
    assert!(o.status.success(), "{}", stderr(&o));
    out.to_owned()
}

#[test]
fn gen_hs_then_pit_finds_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let h = gen(dir.path(), &["--class", "d3", "--n", "4", "--delta", "0.5"]);
    let text = std::fs::read_to_string(&h).unwrap();
    assert!(text.starts_with("n=4 p=2305843009213693951 construction=depth3"));
    let f = write(dir.path(), "f.txt", "(x1 + x2)*(x3 + -1*x4)\n");
    let o = mlpit(&["pit", "--formula", &f, "--hs", &h]);
    assert!(o.status.success());
    let line = stdout(&o);
    assert!(line.starts_with("nonzero witness="), "{line}");
    let w: Vec<i64> = line["nonzero witness=".len()..]
        .split_whitespace()
        .next()
        .unwrap()
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect();
    assert_ne!((w[0] + w[1]) * (w[2] - w[3]), 0);
}

#[test]
fn zero_formula_is_zero_on_h() {
    let dir = tempfile::tempdir().unwrap();
    let h = gen(
        dir.path(),
        &["--class", "d4", "--n", "3", "--M", "2", "--S", "7"],
    );
    let f = write(dir.path(), "z.txt", "(x1*x2 + x3) + (-1*x3 + -1*x1*x2)\n");
    let o = mlpit(&["pit", "--formula", &f, "--hs", &h]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("zero-on-H"));
}

#[test]
fn regular_hs_defaults() {
    let o = mlpit(&["gen-hs", "--class", "regular", "--n", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("n=5 "));
    assert!(text.contains("# points=32"));
}

#[test]
fn outputs_are_reproducible() {
    let a = mlpit(&["gen-hs", "--class", "d3", "--n", "5", "--delta", "0.5"]);
    let b = mlpit(&["gen-hs", "--class", "d3", "--n", "5", "--delta", "0.5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let h = write(
        dir.path(),
        "h.txt",
        "n=3 p=2305843009213693951 construction=manual\n0,0,0\n1,1,0\n1,0,1\n",
    );
    let a = mlpit(&["lowerbound", "--hs", &h]);
    let b = mlpit(&["lowerbound", "--hs", &h]);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn lowerbound_output_vanishes_on_h() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(
        dir.path(),
        "h.txt",
        "n=3 p=2305843009213693951 construction=manual\n0,0,0\n1,1,0\n1,0,1\n0,1,1\n",
    );
    let out = dir.path().join("v.txt");
    let o = mlpit(&["lowerbound", "--hs", &h, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let poly = std::fs::read_to_string(&out).unwrap();
    assert!(poly.contains("# n: 3"));
    let body: String = poly.lines().filter(|l| !l.starts_with('#')).collect();
    let f = write(dir.path(), "f.txt", &format!("# n: 3\n({body})\n"));
    let o = mlpit(&["pit", "--formula", &f, "--hs", &h]);
    assert!(
        stdout(&o).starts_with("zero-on-H"),
        "{}{}",
        stdout(&o),
        stderr(&o)
    );
}

#[test]
fn lowerbound_on_full_cube_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let h = gen(dir.path(), &["--class", "d3", "--n", "3", "--delta", "0.5"]);
    let o = mlpit(&["lowerbound", "--hs", &h]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("precondition"), "{}", stderr(&o));
}

#[test]
fn reduce_prints_formula_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.txt", "(x1*x2 + x3)*(x4)\n");
    let o = mlpit(&["reduce", "--formula", &f, "--tau", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("# A = {x1}"));
    assert!(text.contains("# step 1: derive x1"));
    assert!(text.trim_end().ends_with("(x2)*(x4)"), "{text}");
}

#[test]
fn reduce_regular_reports_case() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "f.txt",
        "# class: regular\n((x1)*(x2) + (x3)*(x4))*((x5)*(x6) + (x7)*(x8))\n",
    );
    let o = mlpit(&["reduce", "--formula", &f]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("case="), "{}", stdout(&o));
}

#[test]
fn roabp_dump() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.txt", "(x1 + x2)*(x3)\n");
    let o = mlpit(&["roabp", "--formula", &f, "--order", "3,2,1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("roabp n=3"));
    assert!(stdout(&o).contains("order=x3,x2,x1"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(mlpit(&[]).status.code(), Some(2));
    assert_eq!(
        mlpit(&["gen-hs", "--class", "d5", "--n", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(mlpit(&["pit", "--formula", "x"]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_1() {
    let o = mlpit(&[
        "--modulus",
        "15",
        "gen-hs",
        "--class",
        "d3",
        "--n",
        "3",
        "--delta",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: "));
    let o = mlpit(&["gen-hs", "--class", "d4", "--n", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let o = mlpit(&["pit", "--formula", "/nonexistent", "--hs", "/nonexistent"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn selftest_subset() {
    let o = mlpit(&["selftest", "--quick", "--only", "6,10"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let lines: Vec<String> = stdout(&o).lines().map(str::to_owned).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("AC6  PASS"));
    assert!(lines[1].starts_with("AC10 PASS"));
}
