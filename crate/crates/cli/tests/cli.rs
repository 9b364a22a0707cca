use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    format!("{}/../core/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("flowfoot-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn flowfoot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flowfoot"))
        .args(args)
        .env_remove("FLOWFOOT_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn fig3_footprint() {
    let f = fixture("fig3.json");
    for method in ["naive", "dist", "new"] {
        let out = flowfoot(&["footprint", "--input", &f, "--method", method]);
        assert_eq!(out.status.code(), Some(0), "{method}");
        let text = stdout(&out);
        assert!(text.contains("footprint: {r, u, v}"), "{text}");
        assert!(text.contains("trace: {r} -> {r, u} -> {r, u, v}"), "{text}");
    }
}

#[test]
fn fig4_is_top() {
    let out = flowfoot(&["footprint", "--input", &fixture("fig4.json"), "--method", "new"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("footprint: TOP"));
}

#[test]
fn json_output() {
    let out = flowfoot(&[
        "footprint",
        "--input",
        &fixture("fig3.json"),
        "--method",
        "new",
        "--verify",
        "oracle",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["footprint"], serde_json::json!([4, 5, 6]));
    assert_eq!(doc["trace"], serde_json::json!([[4], [4, 5], [4, 5, 6]]));
    assert_eq!(doc["method"], "new");
    assert_eq!(doc["verified"], true);
    assert!(doc["micros"].is_u64());

    let top = flowfoot(&["footprint", "--input", &fixture("fig4.json"), "--json"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&top)).unwrap();
    assert_eq!(doc["footprint"], "TOP");
}

#[test]
fn errors_and_usage() {
    let missing = flowfoot(&["footprint", "--input", "/nonexistent.json"]);
    assert_eq!(missing.status.code(), Some(2));

    let bad = scratch("bad.json");
    std::fs::write(&bad, "{\"label\": 1}").unwrap();
    let out = flowfoot(&["footprint", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    assert_eq!(
        flowfoot(&["footprint", "--method", "fast"]).status.code(),
        Some(64)
    );
    assert_eq!(flowfoot(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(flowfoot(&[]).status.code(), Some(64));
    assert_eq!(flowfoot(&["--help"]).status.code(), Some(0));
}

#[test]
fn laws_report() {
    let out = flowfoot(&["laws", "--monoid", "maxcap", "--iters", "100", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for law in ["unit", "commutativity", "associativity"] {
        assert!(text.contains(&format!("LAW {law} PASS -")), "{text}");
    }
}

#[test]
fn bench_csv_is_deterministic_apart_from_times() {
    let run = |csv: &PathBuf, seed_env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_flowfoot"));
        cmd.args([
            "bench",
            "--suite",
            "list-updates",
            "--count",
            "6",
            "--seed",
            "7",
            "--methods",
            "naive,dist,new",
            "--reps",
            "3",
            "--csv",
            csv.to_str().unwrap(),
        ]);
        match seed_env {
            Some(s) => cmd.env("FLOWFOOT_SEED", s),
            None => cmd.env_remove("FLOWFOOT_SEED"),
        };
        let out = cmd.output().unwrap();
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let text = std::fs::read_to_string(csv).unwrap();
        // drop the timing column
        text.lines()
            .map(|l| {
                let cols: Vec<&str> = l.split(',').collect();
                format!("{},{},{},{}", cols[0], cols[1], cols[2], cols[4])
            })
            .collect::<Vec<_>>()
    };
    let a = run(&scratch("a.csv"), None);
    let b = run(&scratch("b.csv"), None);
    assert_eq!(a, b);
    assert_eq!(a[0], "instance,method,footprint_size,status");
    assert_eq!(a.len(), 1 + 6 * 3);

    // the environment overrides the flag
    let c = run(&scratch("c.csv"), Some("8"));
    assert_ne!(a, c);
    let d = run(&scratch("d.csv"), Some("7"));
    assert_eq!(a, d);
}

#[test]
fn bad_seed_variable_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_flowfoot"))
        .args(["laws", "--monoid", "keyset", "--iters", "1"])
        .env("FLOWFOOT_SEED", "banana")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
}
