use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_freeprob"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("freeprob-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json_report(args: &[&str]) -> (i32, serde_json::Value) {
    let mut all = args.to_vec();
    all.extend(["--out", "-"]);
    let out = run(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("invalid JSON ({e}): {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    });
    (out.status.code().unwrap(), v)
}

/// Report text with the timestamp line removed.
fn without_timestamp(text: &str) -> String {
    text.lines().filter(|l| !l.trim_start().starts_with("\"generated_at\"")).collect::<Vec<_>>().join("\n")
}

const PQPQ: &str = r#"{"algebras":[{"weights":[[1,2],[1,2]]},{"weights":[[1,2],[1,2]]}],
 "word":[{"algebra":1,"values":[1,0]},{"algebra":2,"values":[1,0]},{"algebra":1,"values":[1,0]},{"algebra":2,"values":[1,0]}]}"#;

#[test]
fn no_arguments_prints_usage_and_exits_2() {
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["radial", "--N", "abc"]).status.code(), Some(2));
    assert_eq!(run(&["radial", "--trials", "5"]).status.code(), Some(2));
    assert_eq!(run(&["radial", "--i", "1", "--j", "1", "--N", "8", "--trials", "30"]).status.code(), Some(2));
    assert_eq!(run(&["two-proj", "--alpha", "3/4"]).status.code(), Some(2));
    assert_eq!(run(&["semicircular", "--t", "1,1", "--t-prime", "1,1", "--N", "8"]).status.code(), Some(2));
    let out = bin().args(["exact-trace"]).env("FREEPROB_THREADS", "zero").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FREEPROB_THREADS"));
}

#[test]
fn help_exits_0() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn exact_trace_of_pqpq() {
    let out = run(&["exact-trace", "--word", PQPQ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("3/16"));
    let (code, v) = json_report(&["exact-trace"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["suites"][0]["details"]["trace"], "3/16");
    assert_eq!(v["config"]["alpha"], "1/2");
}

#[test]
fn malformed_word_and_config_exit_2() {
    assert_eq!(run(&["exact-trace", "--word", "{"]).status.code(), Some(2));
    let path = tmp("bad.json");
    std::fs::write(&path, r#"{"seed": 1, "unknown": 2}"#).unwrap();
    assert_eq!(run(&["exact-trace", "--config", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["exact-trace", "--config", "/nonexistent/config.json"]).status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let path = tmp("cfg.json");
    std::fs::write(&path, r#"{"alpha": "1/4", "seed": 3, "N": 40}"#).unwrap();
    let p = path.to_str().unwrap();
    let (code, v) = json_report(&["convolve", "--config", p]);
    assert_eq!(code, 0);
    assert_eq!(v["config"]["alpha"], "1/4");
    assert_eq!(v["config"]["seed"], 3);
    assert_eq!(v["config"]["N"], 40);
    let (_, v) = json_report(&["convolve", "--config", p, "--alpha", "1/3", "--N", "30"]);
    assert_eq!(v["config"]["alpha"], "1/3");
    assert_eq!(v["config"]["seed"], 3);
    assert_eq!(v["suites"][0]["details"]["kernel"]["N"], 30);
}

#[test]
fn csv_reports_parse() {
    let path = tmp("semi.csv");
    let out = run(&["semicircular", "--N", "32", "--trials", "30", "--max-len", "3", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(&path).unwrap();
    let headers: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(headers, ["pattern", "mean_abs_trace", "stderr", "trials", "N", "verdict"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2 + 2 + 2);
    for r in &rows {
        assert!(r[1].parse::<f64>().unwrap() >= 0.0);
        assert_eq!(&r[3], "30");
        assert_eq!(&r[4], "32");
        assert_eq!(&r[5], "pass");
    }
}

#[test]
fn statistical_failure_exits_1() {
    // At N = 16 the bias allowance 10/N swamps the weak-fc control, so the
    // control passes and the suite reports failure.
    let (code, v) = json_report(&["weak-fc", "--kind", "product", "--N", "16", "--trials", "30", "--max-len", "2"]);
    assert_eq!(code, 1);
    assert_eq!(v["verdict"], "fail");
    let checks = v["suites"][0]["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["passed"] == false && c["name"].as_str().unwrap().contains("control")));
}

#[test]
fn reports_are_reproducible_across_runs_and_threads() {
    let args = ["reassemble", "--N", "32", "--trials", "30", "--max-len", "3", "--gen-N", "8", "--gen-seeds", "2", "--seed", "5"];
    let a = tmp("r1.json");
    let b = tmp("r2.json");
    let o1 = bin().args(args).args(["--out", a.to_str().unwrap()]).env("FREEPROB_THREADS", "1").output().unwrap();
    let o2 = bin().args(args).args(["--out", b.to_str().unwrap()]).env("FREEPROB_THREADS", "3").output().unwrap();
    assert_eq!(o1.status.code(), Some(0), "{}", String::from_utf8_lossy(&o1.stderr));
    assert_eq!(o2.status.code(), Some(0));
    let ta = std::fs::read_to_string(&a).unwrap();
    let tb = std::fs::read_to_string(&b).unwrap();
    assert_eq!(without_timestamp(&ta), without_timestamp(&tb));
    let v: serde_json::Value = serde_json::from_str(&ta).unwrap();
    assert_eq!(v["suites"][0]["details"]["commutant_dimensions"], serde_json::json!([1, 1]));
    assert_eq!(o1.stdout, o2.stdout);
}
