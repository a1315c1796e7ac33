use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run_in(cache: Option<&Path>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ramsey-forge"));
    cmd.args(args);
    match cache {
        Some(dir) => cmd.env("RAMSEY_FORGE_CACHE", dir),
        None => cmd.arg("--no-cache"),
    };
    cmd.output().expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_in(None, args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).expect("valid JSON")
}

#[test]
fn formula_for_linear_orders() {
    let o = run(&["degrees", "formula", "--class", "linear-orders", "--m", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "4\n");
}

#[test]
fn over_budget_check_exits_3_with_cost() {
    let o = run(&["ramsey", "check", "--a", "lo:1", "--b", "lo:2", "--c", "lo:40"]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("1099511627776"), "{err}");

    let o = run(&["ramsey", "check", "--a", "lo:1", "--b", "lo:2", "--c", "lo:40", "--format", "json"]);
    assert_eq!(o.status.code(), Some(3));
    let j = json(&o);
    assert_eq!(j["schema"], 1);
    assert_eq!(j["error"]["kind"], "budget");
    assert_eq!(j["error"]["detail"]["cost"], "1099511627776");
}

#[test]
fn planted_er_witness_verifies() {
    for (plant, want) in [("-", vec![]), ("0", vec![0]), ("1", vec![1]), ("0,1", vec![0, 1])] {
        let o = run(&["canonize", "er", "--m", "6", "--n", "2", "--l", "4", "--plant", plant, "--format", "json"]);
        assert_eq!(o.status.code(), Some(0));
        let j = json(&o);
        assert_eq!(j["schema"], 1);
        assert_eq!(j["result"]["verified"], true);
        assert_eq!(j["result"]["index_set"], serde_json::json!(want));
    }
}

#[test]
fn er_partition_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("min.txt");
    // classes by smallest element on [4]^2
    fs::write(&path, "0,1; 0,2; 0,3\n1,2; 1,3\n2,3\n").unwrap();
    let o = run(&["canonize", "er", "--m", "4", "--n", "2", "--l", "3", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "s: 0,1,2\nI: {0}\nverified: true\n");

    fs::write(&path, "0,1; 0,2\n").unwrap();
    let o = run(&["canonize", "er", "--m", "4", "--n", "2", "--l", "3", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn not_found_exits_2() {
    let o = run(&["ramsey", "witness", "--class", "linear-orders", "--a", "lo:2", "--b", "lo:3", "--size-cap", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["ramsey", "witness", "--class", "linear-orders", "--a", "lo:2", "--b", "lo:3", "--size-cap", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("sizes: 6\n"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(run(&["classes", "frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["degrees", "formula", "--class", "trees", "--m", "2"]).status.code(), Some(1));
    let big = (1u64 << 31).to_string();
    let o = run(&["--budget", &big, "degrees", "formula", "--class", "linear-orders", "--m", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["--budget", &big, "--allow-large", "degrees", "formula", "--class", "linear-orders", "--m", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn cache_round_trip_and_version_invalidation() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["classes", "enumerate", "--class", "clique-free:3", "--size", "4", "--format", "json"];
    let fresh = stdout(&run(&args));
    let cold = stdout(&run_in(Some(dir.path()), &args));
    let entries: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(entries.len(), 1);
    let warm = stdout(&run_in(Some(dir.path()), &args));
    assert_eq!(fresh, cold);
    assert_eq!(cold, warm);

    let mut entry: serde_json::Value = serde_json::from_str(&fs::read_to_string(&entries[0]).unwrap()).unwrap();
    assert_eq!(entry["version"], env!("CARGO_PKG_VERSION"));
    entry["version"] = "0.0.0".into();
    entry["value"]["members"] = serde_json::json!([]);
    fs::write(&entries[0], entry.to_string()).unwrap();
    let after = stdout(&run_in(Some(dir.path()), &args));
    assert_eq!(after, fresh);
    let entry: serde_json::Value = serde_json::from_str(&fs::read_to_string(&entries[0]).unwrap()).unwrap();
    assert_eq!(entry["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn iso_counts_are_cached_per_size() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["classes", "iso-count", "--class", "ordered-graphs", "--size", "3", "--up-to", "--format", "csv"];
    let a = stdout(&run_in(Some(dir.path()), &args));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 4);
    let b = stdout(&run_in(Some(dir.path()), &args));
    assert_eq!(a, b);
    assert!(a.ends_with("ordered-graphs,3,8\n"), "{a}");
}

#[test]
fn reports_are_deterministic() {
    for args in [
        &["genseq", "build", "--hypercube", "2", "--levels", "3", "--format", "json"][..],
        &["degrees", "conjecture", "--n-max", "2", "--format", "csv"][..],
        &["amalgamate", "verify-opfap", "--class", "clique-free:3", "--size-cap", "2", "--format", "json"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn degree_oracle_reports_discrepancy() {
    let o = run(&["degrees", "oracle", "--hypercube", "2", "--m", "3", "--depth-cap", "5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let j = json(&o);
    assert_eq!(j["result"]["reference_value"], 24);
    assert!(j["result"]["discrepancy"].is_string());
    assert!(j["result"]["formula"].is_null());
}

#[test]
fn unstable_oracle_exits_3() {
    let o = run(&["degrees", "oracle", "--class", "linear-orders", "--m", "3", "--depth-cap", "3"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn front_and_block_commands() {
    let o = run(&["canonize", "front", "--hypercube", "1", "--depth", "3", "--ar", "1", "--mode", "sperner"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("antichain: pass"));
    let o = run(&["canonize", "block", "--hypercube", "1", "--depth", "4", "--n", "1", "--sub-len", "2", "--plant", "trivial"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("relations:\n  empty\n"));
}
