use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SINGLE: &str = "Nodes 2\nA 1 2 5\nRoot 1\nT 2\n";
const E2: &str = "Nodes 6\nA 1 2 3\nA 1 3 1\nA 1 4 1\nA 2 5 0\nA 2 6 0\nA 3 5 0\nA 4 6 0\nRoot 1\nT 5\nT 6\n";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quasi-dst")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn solve_single_arc() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "single.txt", SINGLE);
    let o = run(&["solve", &file]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for line in ["cost=5", "lb=5", "bound=10", "phases=1"] {
        assert!(out.lines().any(|l| l == line), "missing {line} in {out}");
    }
}

#[test]
fn solve_e2_writes_certificate_and_solution() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "e2.txt", E2);
    let (cert, sol) = (path(&dir, "cert.json"), path(&dir, "sol.txt"));
    let o = run(&["solve", &file, "--cert", &cert, "--solution", &sol, "--checked"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("cost=2\n") && out.contains("lb=2\n") && out.contains("bound=6\n"));
    assert_eq!(fs::read_to_string(&sol).unwrap(), "1 3 1\n1 4 1\n3 5 0\n4 6 0\n");
    assert!(fs::read_to_string(&cert).unwrap().contains("\"version\": 1"));

    let v = run(&["verify", &file, &cert]);
    assert_eq!(v.status.code(), Some(0));
    let out = stdout(&v);
    assert!(out.contains("dual_feasibility=pass") && out.contains("approximation_bound=pass"));
}

#[test]
fn infeasible_instance_exits_two() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "bad.txt", "Nodes 3\nA 1 2 1\nRoot 1\nT 2\nT 3\n");
    let o = run(&["solve", &file]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("terminal 3"));
    assert!(o.stdout.is_empty());
}

#[test]
fn malformed_instance_exits_two() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "bad.txt", "Nodes 3\nA 1 2 1\nA 2 3 1\nRoot 1\nT 2\nT 3\nA 4 5\n");
    assert_eq!(run(&["solve", &file]).status.code(), Some(2));
}

#[test]
fn tampered_certificate_fails_verification() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "e2.txt", E2);
    let cert = path(&dir, "cert.json");
    assert_eq!(run(&["solve", &file, "--cert", &cert]).status.code(), Some(0));
    let text = fs::read_to_string(&cert).unwrap();
    let tampered = text.replacen("\"delta\": \"1/1\"", "\"delta\": \"1001/1000\"", 1);
    assert_ne!(text, tampered);
    fs::write(&cert, tampered).unwrap();
    let o = run(&["verify", &file, &cert]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("=fail"));
}

#[test]
fn certificate_for_another_instance_is_rejected() {
    let dir = TempDir::new().unwrap();
    let e2 = write(&dir, "e2.txt", E2);
    let single = write(&dir, "single.txt", SINGLE);
    let cert = path(&dir, "cert.json");
    run(&["solve", &e2, "--cert", &cert]);
    let o = run(&["verify", &single, &cert]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("instance_match"));
}

#[test]
fn malformed_certificate_exits_two() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "e2.txt", E2);
    let cert = write(&dir, "cert.json", "{\"version\": 1}");
    assert_eq!(run(&["verify", &file, &cert]).status.code(), Some(2));
}

#[test]
fn exact_on_e2() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "e2.txt", E2);
    let o = run(&["exact", &file]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("opt=2\n"));
    let o = run(&["exact", &file, "--brute"]);
    assert!(stdout(&o).starts_with("opt=2\n"));
    assert_eq!(run(&["exact", &file, "--k-limit", "1"]).status.code(), Some(2));
}

#[test]
fn gen_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (path(&dir, "a.txt"), path(&dir, "b.txt"));
    for out in [&a, &b] {
        let o = run(&["gen", "random", "4", "6", "3/10", "1", "20", "--seed", "99", "-o", out]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let o = run(&["solve", &a]);
    assert_eq!(o.status.code(), Some(0));

    let sc = path(&dir, "sc.txt");
    assert_eq!(run(&["gen", "setcover", "5", "4", "--seed", "3", "-o", &sc]).status.code(), Some(0));
    assert!(Path::new(&sc).exists());
    assert_eq!(run(&["gen", "random", "2", "2", "0", "1", "5"]).status.code(), Some(2));
}

#[test]
fn golden_file_from_cli() {
    let o = run(&["gen", "random", "2", "2", "1.0", "1", "5", "--seed", "1"]);
    assert_eq!(stdout(&o), include_str!("data/random_seed1.txt"));
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest", "--count", "200", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("instances=200\n") && out.contains("failures=0\n"));
}
