use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lbkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lbkit"))
        .args(args)
        .env_remove("LBKIT_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn file_roundtrip_verifies_like_in_memory() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.json");
    let from_file = dir.path().join("a.json");
    let inline = dir.path().join("b.json");
    let flags = ["--construction", "radius-approx", "--k", "8", "--p", "2", "--sa", "01100001", "--sb", "0x42"];

    let mut build = vec!["build"];
    build.extend(flags);
    build.extend(["--out", p(&graph)]);
    assert!(lbkit(&build).status.success());

    assert!(lbkit(&["verify", "--graph", p(&graph), "--out", p(&from_file)]).status.success());
    let mut verify = vec!["verify"];
    verify.extend(flags);
    verify.extend(["--out", p(&inline)]);
    assert!(lbkit(&verify).status.success());

    let (a, b) = (read_json(&from_file), read_json(&inline));
    assert_eq!(a["report"], b["report"]);
    assert_eq!(a["all_pass"], Value::Bool(true));
}

#[test]
fn random_trials_all_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.json");
    let o = lbkit(&[
        "verify",
        "--construction",
        "diameter-exact",
        "--k",
        "8",
        "--exhaustive=false",
        "--trials",
        "200",
        "--out",
        p(&out),
    ]);
    assert!(o.status.success());
    let r = read_json(&out);
    // 200 random pairs plus the 7 forced ones
    assert_eq!(r["instances"], 207);
    assert_eq!(r["checks"]["diameter-iff"]["pass"], 207);
}

#[test]
fn const_degree_reports_five() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.json");
    let report = dir.path().join("r.json");
    let sa = dir.path().join("sa.txt");
    std::fs::write(&sa, "0101 0000 1111 0001\n").unwrap();
    let sa_arg = format!("@{}", p(&sa));
    let o = lbkit(&[
        "build",
        "--construction",
        "radius-const-degree",
        "--k",
        "16",
        "--sa",
        &sa_arg,
        "--sb",
        "0x8421",
        "--out",
        p(&graph),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(lbkit(&["verify", "--graph", p(&graph), "--out", p(&report)]).status.success());
    let r = read_json(&report);
    let checks = r["report"]["checks"].as_array().unwrap();
    let deg = checks.iter().find(|c| c["name"] == "max-degree").unwrap();
    assert_eq!(deg["observed"], "5");
    assert_eq!(r["report"]["max_degree"], 5);
}

#[test]
fn reduce_matches_ground_truth() {
    let dir = tempfile::tempdir().unwrap();
    for seed in ["1", "2"] {
        let out = dir.path().join(format!("r{seed}.json"));
        let o = lbkit(&[
            "reduce",
            "--construction",
            "diameter-exact",
            "--k",
            "8",
            "--algo",
            "apsp-diameter",
            "--seed",
            seed,
            "--out",
            p(&out),
        ]);
        assert!(o.status.success());
        let r = read_json(&out);
        assert_eq!(r["report"]["answer"], r["report"]["ground_truth"]);
        assert_eq!(r["equivalence_holds"], true);
        assert_eq!(r["input"]["seed"], seed.parse::<u64>().unwrap());
    }
}

#[test]
fn bad_parameters_give_json_error() {
    let o = lbkit(&["build", "--construction", "diameter-exact", "--k", "6"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "invalid-parameters");

    let o = lbkit(&["verify", "--construction", "nope", "--k", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "usage");

    let o = lbkit(&["build", "--construction", "radius-exact", "--k", "4", "--sa", "0120", "--sb", "0000"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_run_still_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = lbkit(&[
        "simulate",
        "--construction",
        "diameter-exact",
        "--k",
        "4",
        "--max-rounds",
        "2",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(read_json(&out)["terminated"], false);
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_lbkit"))
        .args(["sweep", "--construction", "eccentricity", "--k", "4", "--p", "1,2", "--trials", "5"])
        .env("LBKIT_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&dir.path().join("sweep-eccentricity.json"));
    assert_eq!(r["instances"], 2 * 12);
    let csv = std::fs::read_to_string(dir.path().join("sweep-eccentricity.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 24);
}

#[test]
fn dot_export_to_stdout() {
    let o = lbkit(&["export-dot", "--construction", "radius-exact", "--k", "4", "--shaved", "--seed", "9"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("graph instance {"));
    assert!(text.contains("lightpink"));
}
