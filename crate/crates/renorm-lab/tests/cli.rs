use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_renorm-lab"))
        .current_dir(dir)
        .env_remove("RENORM_LAB_THREADS")
        .args(args)
        .output()
        .expect("spawn renorm-lab")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn files(dir: &Path) -> Vec<String> {
    std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect()
}

#[test]
fn unknown_flag_exits_2_without_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(dir.path(), &["graphs", "--order", "7", "--emit", "t.json", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(files(dir.path()).is_empty(), "{:?}", files(dir.path()));
    assert_eq!(lab(dir.path(), &["no-such-command"]).status.code(), Some(2));
    assert_eq!(lab(dir.path(), &["graphs", "--order", "8"]).status.code(), Some(2));
}

#[test]
fn stochastic_suites_require_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["probability", "--suite", "bonami"][..],
        &["simulate", "--L", "5"],
        &["extstate"],
        &["verify", "--suite", "identities", "--report", "r.json"],
    ] {
        assert_eq!(lab(dir.path(), args).status.code(), Some(2), "{args:?}");
    }
    assert!(files(dir.path()).is_empty());
}

#[test]
fn graphs_order_7_emits_matching_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(dir.path(), &["graphs", "--order", "7", "--emit", "table.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&dir.path().join("table.json"));
    assert_eq!(v["schema"], "renorm-lab/report/1");
    assert_eq!(v["config"]["args"]["order"], 7);
    let rows = v["report"]["rows"].as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r["match"] == true && r["coefficient"] == r["paper"]));
    assert_eq!(v["report"]["partition_complete"], true);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("PASS"));
}

#[test]
fn identical_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["probability", "--seed", "9", "--trials", "20", "--chains", "3", "--report", "p.json"];
    assert_eq!(lab(dir.path(), &args).status.code(), Some(0));
    let first = std::fs::read(dir.path().join("p.json")).unwrap();
    assert_eq!(lab(dir.path(), &args).status.code(), Some(0));
    let second = std::fs::read(dir.path().join("p.json")).unwrap();
    assert_eq!(first, second);
    // A different seed changes the report.
    let other = ["probability", "--seed", "10", "--trials", "20", "--chains", "3", "--report", "q.json"];
    assert_eq!(lab(dir.path(), &other).status.code(), Some(0));
    let v1 = read_json(&dir.path().join("p.json"));
    let v2 = read_json(&dir.path().join("q.json"));
    assert_ne!(v1["report"]["bonami"]["max_ratio"], v2["report"]["bonami"]["max_ratio"]);
    // Non-integers carry 17 significant digits.
    let text = String::from_utf8(first).unwrap();
    let ratio = text.lines().find(|l| l.contains("\"max_ratio\"")).unwrap();
    let mantissa = ratio.split(':').nth(1).unwrap().trim().trim_end_matches(',').split('e').next().unwrap().to_string();
    assert_eq!(mantissa.trim_start_matches('-').replace('.', "").len(), 17, "{ratio}");
}

#[test]
fn constants_report_keys() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        lab(dir.path(), &["constants", "--d", "5", "--geometry", "torus-projected", "--L", "16", "--out", "c.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&dir.path().join("c.json"));
    for key in ["d", "sigma", "rho", "eta", "residual_M0", "residual_N0"] {
        assert!(v["report"].get(key).is_some(), "{key}");
    }
    assert!(v["report"]["residual_M0"].as_f64().unwrap() < 1e-8);
    assert!(v["report"]["residual_N0"].as_f64().unwrap() < 1e-8);
    // σ³ − ρ = Σ_{n≠0} G³ > 0.
    let (s, r) = (v["report"]["sigma"].as_f64().unwrap(), v["report"]["rho"].as_f64().unwrap());
    assert!(s.powi(3) > r);
}

#[test]
fn kernel_csv_lists_the_orthant() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(dir.path(), &["kernel", "--d", "3", "--R", "3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n1,n2,n3,value"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4 * 4 * 4);
    assert_eq!(&rows[0][..3], &["0", "0", "0"]);
    let g0: f64 = rows[0][3].parse().unwrap();
    assert!((g0 - 0.252731009858663).abs() < 1e-6);
    // Even in each coordinate: (0,0,1) and (1,0,0) carry the same value.
    let find = |c: [&str; 3]| rows.iter().find(|r| r[..3] == c).unwrap()[3];
    assert_eq!(find(["0", "0", "1"]), find(["1", "0", "0"]));
    assert!(files(dir.path()).is_empty());
}

#[test]
fn verify_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        lab(dir.path(), &["verify", "--suite", "identities", "--seed", "7", "--sites", "8", "--report", "id.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&dir.path().join("id.json"));
    let row = v["report"]["rows"].as_array().unwrap().iter().find(|r| r["check"] == "boxed6_vs_born").unwrap().clone();
    assert_eq!(row["pass"], true);
    assert_eq!(row["tolerance"].as_f64(), Some(1e-10));
    assert_eq!(lab(dir.path(), &["verify", "--suite", "lemmas"]).status.code(), Some(0));
    assert_eq!(lab(dir.path(), &["verify-offsets", "--emit", "o.json"]).status.code(), Some(0));
    let o = read_json(&dir.path().join("o.json"));
    assert_eq!(o["report"]["eta_shift_control"]["fails"], true);
}

#[test]
fn numerical_and_config_failures_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // Strong bare disorder makes the box operator indefinite.
    let indefinite =
        ["simulate", "--d", "3", "--L", "6", "--kappa", "20", "--stage", "bare", "--seed", "1", "--out", "s.json"];
    assert_eq!(lab(dir.path(), &indefinite).status.code(), Some(3));
    assert_eq!(lab(dir.path(), &["extstate", "--seed", "1", "--kappa-sweep", "0.01,-0.02"]).status.code(), Some(2));
    assert_eq!(lab(dir.path(), &["constants", "--d", "2"]).status.code(), Some(2));
    assert!(files(dir.path()).is_empty());
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_renorm-lab"))
        .current_dir(dir.path())
        .env("RENORM_LAB_THREADS", "zero")
        .args(["verify", "--suite", "lemmas"])
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
}

#[test]
fn small_simulation_report_layout() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "simulate",
        "--d",
        "3",
        "--L",
        "9",
        "--kappa",
        "0.1",
        "--rho",
        "0.01",
        "--eta",
        "0.001",
        "--seed",
        "2",
        "--seeds",
        "2",
        "--sources",
        "2",
        "--out",
        "d.json",
    ];
    let out = lab(dir.path(), &args);
    assert!(matches!(out.status.code(), Some(0 | 1)), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&dir.path().join("d.json"));
    assert_eq!(v["report"]["seeds"], serde_json::json!([2, 3]));
    assert_eq!(v["report"]["survey"]["fits"].as_array().unwrap().len(), 4);
    assert_eq!(v["report"]["geometry"]["side"], 9);
    assert_eq!(v["pass"], v["report"]["survey"]["pass"]);
    assert_eq!(out.status.code() == Some(0), v["pass"] == true);
    assert_eq!(v["report"]["hamiltonian"]["constants"]["rho"].as_f64(), Some(0.01));
    // d = 3 has no free-lattice ρ, η.
    let canonical = ["simulate", "--d", "3", "--L", "9", "--seed", "2", "--out", "e.json"];
    assert_eq!(lab(dir.path(), &canonical).status.code(), Some(2));
    assert_eq!(lab(dir.path(), &["simulate", "--d", "3", "--rho", "0.1", "--seed", "2"]).status.code(), Some(2));
}
