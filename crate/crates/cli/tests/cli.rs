use std::path::Path;
use std::process::{Command, Output};

fn wudlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wudlab")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn density_reports_exact_alpha() {
    let o = wudlab(&["density", "--poly", "phi", "--q", "35"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["alpha"], "5/8");
    assert_eq!(v["locals"].as_array().unwrap().len(), 2);
    assert_eq!(v["flags"]["admissible"], true);
    assert_eq!(v["xi"]["xi"], 1);
}

#[test]
fn chars_rows_carry_bounds() {
    let o = wudlab(&["chars", "--poly", "[1,0,1]", "--ell", "13", "--all-chars", "--curve", "2"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r["ok"] == true));
    assert!(rows[1]["Z_re"].is_number() && rows[1]["conductor"] == 13);
    assert_eq!(v["curve"]["within_bound"], true);
}

#[test]
fn tuples_csv_shape() {
    let o = wudlab(&["tuples", "--q", "7", "-J", "3", "--method", "cross-check"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "w,v_double,ratio,bound");
    assert_eq!(lines.len(), 1 + 6);
    let total: u64 = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 5u64.pow(3));

    let o = wudlab(&["tuples", "--q", "8", "-J", "2", "--additive", "--w", "2"]);
    assert_eq!(stdout(&o).lines().nth(1).unwrap().split(',').nth(1).unwrap(), "4");
}

#[test]
fn sieve_dump_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("n.csv");
    let o = wudlab(&["--out", dir.path().to_str().unwrap(), "sieve", "--q", "5", "--x", "1000", "--dump", dump.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = std::fs::read_to_string(&dump).unwrap();
    assert_eq!(rows.lines().count(), 1001);
    assert_eq!(rows.lines().nth(12).unwrap(), "12,4,1,3,3,2,0");
    let summary = std::fs::read_to_string(dir.path().join("sieve.csv")).unwrap();
    let counted: u64 = summary.lines().skip(1).map(|l| l.split(',').nth(6).unwrap().parse::<u64>().unwrap()).sum();
    let coprime = rows.lines().skip(1).filter(|l| l.split(',').nth(2) == Some("1")).count() as u64;
    assert_eq!(counted, coprime);
}

#[test]
fn dist_output_is_thread_independent() {
    let run = |threads: &str| stdout(&wudlab(&["--threads", threads, "--format", "json", "dist", "--q", "5,7", "--x", "200000", "--filter", "none,p2>q"]));
    let one = run("1");
    assert!(one.contains("\"schema_version\": 1"));
    assert_eq!(one, run("4"));
}

#[test]
fn config_runs_every_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        "[phi-small]\nx = [20000]\nq = [5]\n\n[counterexample-ii]\nx = [20000]\ndegree = 2\nformat = \"json\"\n",
    )
    .unwrap();
    let out = dir.path().join("reports");
    let o = wudlab(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "scenario"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(Path::new(&out.join("phi-small.csv")).exists());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("counterexample-ii.json")).unwrap()).unwrap();
    assert!(v["records"].as_array().unwrap().iter().any(|r| r["kind"] == "highlight"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[a]\nbogus = 1\n").unwrap();
    assert_eq!(wudlab(&["--config", bad.to_str().unwrap(), "dist"]).status.code(), Some(2));
    assert_eq!(wudlab(&["density", "--poly", "[1,0,0]", "--q", "5"]).status.code(), Some(2));
    assert_eq!(wudlab(&["tuples", "--q", "5", "-J", "30", "--method", "brute"]).status.code(), Some(3));
    assert_eq!(wudlab(&["sieve", "--q", "5", "--x", "1000000000000"]).status.code(), Some(3));
    assert_eq!(wudlab(&["--config", "/nonexistent/x.toml", "scenario"]).status.code(), Some(1));
}
