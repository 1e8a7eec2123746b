use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn corpus(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "corpus", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn rgbp(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_rgbp"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    // the child may exit before reading its input
    let _ = child.stdin.take().unwrap().write_all(stdin.as_bytes());
    child.wait_with_output().unwrap()
}

fn text(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch(name: &str, body: &str) -> String {
    let dir = std::env::temp_dir().join(format!("rgbp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const TRIANGLE: &str = "rgbp 1\nmode vertex\nvertices 3\nedge 0 1\nedge 1 2\nedge 0 2\nforced 0 1\nhabitat 0 1 2\nbudget 3\n";

#[test]
fn generate_then_stats() {
    let gen = rgbp(&["generate", "h22d3", &corpus("k4.hcvc")], "");
    assert_eq!(gen.status.code(), Some(0));
    let stats = rgbp(&["stats", "-"], &text(&gen));
    let out = text(&stats);
    assert!(out.contains("eta=22\n") && out.contains("delta=3\n"), "{out}");
}

#[test]
fn trivial_yes_instance() {
    let out = rgbp(&["solve", "-"], "rgbp 1\nvertices 2\nedge 0 1\nbudget 0\n");
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out).contains("answer yes"));
}

#[test]
fn solve_exit_codes() {
    assert_eq!(rgbp(&["solve", "-"], TRIANGLE).status.code(), Some(0));
    let tight = TRIANGLE.replace("budget 3", "budget 2");
    let out = rgbp(&["solve", "-"], &tight);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out).contains("cost 3"));
    let broken = rgbp(&["solve", "-"], "rgbp 1\nvertices 2\nedge 0 5\n");
    assert_eq!(broken.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&broken.stderr).contains("line 3"));
}

#[test]
fn verify_reports_missing_forced_edge() {
    let inst = scratch("tri.rgbp", TRIANGLE);
    let good = scratch("good.sol", "status optimal\ncost 3\nselected 0 1\nselected 1 2\nselected 0 2\n");
    assert_eq!(rgbp(&["verify", &inst, &good], "").status.code(), Some(0));
    let out = rgbp(&["verify", &inst, "-"], "cost 2\nselected 1 2\nselected 0 2\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out).contains("forced edge missing"));
}

#[test]
fn solve_output_verifies() {
    let gen = rgbp(&["generate", "h5d6", &corpus("sat3.cnf")], "");
    let inst = scratch("sat3.rgbp", &text(&gen));
    let sol = rgbp(&["solve", &inst], "");
    assert_eq!(sol.status.code(), Some(0));
    assert_eq!(rgbp(&["verify", &inst, "-"], &text(&sol)).status.code(), Some(0));
    let unsat = rgbp(&["generate", "h5d6", &corpus("unsat3.cnf")], "");
    assert_eq!(rgbp(&["solve", "-"], &text(&unsat)).status.code(), Some(1));
}

#[test]
fn reduce_prints_trace() {
    let out = rgbp(&["reduce", "-"], TRIANGLE);
    assert_eq!(out.status.code(), Some(0));
    let t = text(&out);
    assert!(t.starts_with("rgbp 1\n"));
    assert!(t.contains("#! step RR3"));
    let path = rgbp(&["reduce", "-"], "rgbp 1\nvertices 3\nedge 0 1\nedge 1 2\nhabitat 0 1 2\nbudget 9\n");
    assert_eq!(path.status.code(), Some(1));
    assert!(text(&path).starts_with("infeasible"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(rgbp(&["frobnicate"], "").status.code(), Some(2));
    assert_eq!(rgbp(&["generate", "h9d9", "-"], "").status.code(), Some(2));
    assert_eq!(rgbp(&["generate", "h5d6", &corpus("sat3.cnf"), "--mode", "edge"], "").status.code(), Some(2));
    assert_eq!(rgbp(&["solve", "-", "--sequential", "--threads", "2"], TRIANGLE).status.code(), Some(2));
    assert_eq!(rgbp(&["solve", "/nonexistent/file"], "").status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let a = rgbp(&["generate", "h4d7", &corpus("prism.hcvc"), "--mode", "edge"], "");
    let b = rgbp(&["generate", "h4d7", &corpus("prism.hcvc"), "--mode", "edge"], "");
    assert_eq!(a.stdout, b.stdout);
    let s1 = rgbp(&["solve", "-"], &text(&a));
    let s2 = rgbp(&["solve", "-", "--sequential"], &text(&a));
    assert_eq!(s1.stdout, s2.stdout);
}

#[test]
fn bench_runs_a_directory() {
    let dir = std::env::temp_dir().join(format!("rgbp-bench-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("a.rgbp"), TRIANGLE).unwrap();
    let gen = rgbp(&["generate", "h13d4", &corpus("k33.hcvc")], "");
    std::fs::write(dir.join("b.rgbp"), &gen.stdout).unwrap();
    let out = rgbp(&["bench", dir.to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(0));
    let t = text(&out);
    assert!(t.contains("reduce_ms") && t.contains("a.rgbp") && t.contains("b.rgbp"), "{t}");
}
