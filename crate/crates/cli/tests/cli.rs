use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ringdense")).args(args).output().expect("spawn ringdense")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn count_example() {
    let v = json(&["count", "--p", "2", "--s", "2", "--n", "2", "--k", "1"]);
    assert_eq!(v["count"], "6");
}

#[test]
fn volume_example() {
    let v = json(&["volume", "--n", "2", "--radius", "3", "--format", "json"]);
    assert_eq!(v["oracle"], "12");
    assert_eq!(v["paper"], "16");
    assert_eq!(v["corrected"], "12");
}

#[test]
fn bounds_and_density_examples() {
    let b = json(&["bounds", "--n", "2", "--k", "1", "--d", "2", "--format", "json"]);
    assert_eq!(b["lower"], "2/3");
    let d = json(&["density", "--n", "2", "--k", "1", "--d", "2", "--format", "json", "--samples", "200"]);
    assert_eq!(d["exact"], "1/3");
}

#[test]
fn csv_and_json_agree() {
    let args = ["bounds", "--n", "3", "--k", "1", "--d", "2"];
    let j = json(&[&args[..], &["--format", "json"]].concat());
    let csv = stdout(&run(&[&args[..], &["--format", "csv"]].concat()));
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    for (k, v) in header.iter().zip(&row) {
        let mut node = &j;
        for part in k.split('.') {
            node = &node[part];
        }
        let want = match node {
            serde_json::Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        assert_eq!(&want, v, "column {k}");
    }
}

#[test]
fn repeat_runs_are_identical() {
    let args = ["density", "--n", "3", "--k", "1", "--d", "3", "--samples", "500", "--seed", "11"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let one = run(&[&args[..], &["--threads", "1"]].concat());
    let four = run(&[&args[..], &["--threads", "4"]].concat());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn empty_sweep_prints_header_only() {
    let o = run(&["sweep", "--param", "n", "--values", "", "--inner", "count"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "sweep_value,status,error\n");
}

#[test]
fn sweep_marks_budget_rows_and_continues() {
    let o = run(&["sweep", "--param", "n", "--values", "2,6,3", "--inner", "volume", "--radius", "2", "--budget", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let status: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(status, ["ok", "budget_exceeded", "ok"]);
    let o = run(&["sweep", "--param", "p", "--values", "2,3", "--inner", "count"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["count", "--n", "2"]).status.code(), Some(1));
    assert_eq!(run(&["volume", "--p", "4", "--n", "2", "--radius", "2"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let o = run(&["audit", "--p", "5", "--s", "2", "--n", "4", "--k", "2", "--d", "2", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_micro_passes_single_threaded() {
    let start = std::time::Instant::now();
    let o = run(&["verify", "--suite", "micro", "--threads", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(start.elapsed().as_secs() < 600);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 8);
}

#[test]
fn verify_reports_manifest_mismatch() {
    let mut f = std::env::temp_dir();
    f.push(format!("ringdense-manifest-{}.txt", std::process::id()));
    std::fs::File::create(&f).unwrap().write_all(b"# only one\nvolume-rank-paper\n").unwrap();
    let o = run(&["verify", "--findings", f.to_str().unwrap(), "--format", "json"]);
    std::fs::remove_file(&f).ok();
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], false);
    assert!(!v["unexpected_findings"].as_array().unwrap().is_empty());
}
