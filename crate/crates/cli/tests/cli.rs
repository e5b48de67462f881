use std::path::Path;
use std::process::{Command, Output};

fn vgrowth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vgrowth")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = vgrowth(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn written(path: &Path, args: &[&str]) -> Vec<u8> {
    let mut all: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap();
    all.extend(["--out", p]);
    let out = vgrowth(&all);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    std::fs::read(path).unwrap()
}

#[test]
fn separation_table_regression() {
    let csv = stdout(&["schreier", "separation", "--n-min", "4", "--n-max", "10"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,distance,bound"));
    for (line, n) in lines.zip(4..) {
        assert_eq!(line, format!("{n},{},{}", (1u64 << n) - 1, 1u64 << (n - 3)));
    }
}

#[test]
fn outputs_do_not_depend_on_threads() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 3] = [
        &["growth", "--family", "grig", "--depth", "12"],
        &["growth", "--family", "en", "--n", "3", "--n-max", "4", "--depth", "3", "--format", "json"],
        &["count-factors", "--n", "4", "--depth", "3"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let outputs: Vec<Vec<u8>> = ["1", "2", "8"]
            .iter()
            .map(|t| {
                let mut a = args.to_vec();
                a.extend(["--threads", t]);
                written(&dir.path().join(format!("run{i}_{t}")), &a)
            })
            .collect();
        assert!(outputs.windows(2).all(|w| w[0] == w[1]), "{args:?}");
    }
}

#[test]
fn growth_csv_schema() {
    let csv = stdout(&["growth", "--family", "grig", "--depth", "4"]);
    assert_eq!(csv, "ell,gamma,rate\n0,1,1.000000\n1,5,5.000000\n2,11,3.316625\n3,23,2.843867\n4,40,2.514867\n");
    let multi = stdout(&["growth", "--n", "2", "--n-max", "3", "--depth", "1"]);
    assert!(multi.starts_with("n,ell,gamma,rate\n2,0,1,1.000000\n"));
}

#[test]
fn json_outputs_parse() {
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&["count-factors", "--n", "4", "--depth", "2", "--format", "json"])).unwrap();
    assert_eq!(v["rows"][2]["tuples"], 307);
    assert_eq!(v["within_hypothesis"], true);
    let nf: serde_json::Value =
        serde_json::from_str(&stdout(&["normal-form", "--n", "6", "--word", "tau,x0,sym:(1 2 3)", "--format", "json"]))
            .unwrap();
    assert_eq!(nf["realizes_word"], true);
    let orbits: serde_json::Value =
        serde_json::from_str(&stdout(&["schreier", "orbits", "--depth", "3", "--format", "json"])).unwrap();
    assert_eq!(orbits[1]["delta"], 2);
}

#[test]
fn dot_exports() {
    let dot = stdout(&["schreier", "build", "--n", "3"]);
    assert!(dot.starts_with("graph gamma_3 {"));
    assert_eq!(dot.matches("[label=\"a\"]").count(), 4);
    let ball = stdout(&["schreier", "build", "--n", "6", "--radius", "3", "--center", "eta"]);
    assert!(ball.contains("label=\"111110\""));
}

#[test]
fn verify_suites_pass() {
    for suite in ["grig", "v", "construction"] {
        let csv = stdout(&["verify", suite, "--samples", "100", "--seed", "3"]);
        assert!(csv.lines().skip(1).all(|l| l.ends_with(",0")), "{suite}: {csv}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(vgrowth(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(vgrowth(&["growth", "--n", "4", "--depth", "9"]).status.code(), Some(2));
    assert_eq!(vgrowth(&["normal-form", "--n", "4", "--word", "tau,tau,tau,tau,tau"]).status.code(), Some(2));
    assert_eq!(vgrowth(&["growth", "--n", "4", "--depth", "6", "--budget-mb", "1"]).status.code(), Some(3));
    // Conjugates collide at level 2, so the construction suite reports failures.
    assert_eq!(vgrowth(&["verify", "construction", "--n", "2", "--samples", "20"]).status.code(), Some(1));
}

#[test]
fn partial_results_survive_the_budget() {
    let out = vgrowth(&["count-factors", "--n", "4", "--depth", "6", "--budget-mb", "1"]);
    assert_eq!(out.status.code(), Some(3));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("ell,p1,p2,p3,p4,tuples\n0,1,1,1,1,1\n1,5,24,2,5,33\n"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}
