use std::fs;
use std::path::Path;

use assert_cmd::Command;
use tempfile::TempDir;

fn yukawa(dir: &Path) -> Command {
    let mut c = Command::cargo_bin("yukawa").unwrap();
    c.current_dir(dir);
    c
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(l.as_bytes());
            r.records().next().unwrap().unwrap().iter().map(String::from).collect()
        })
        .collect()
}

#[test]
fn eigs_writes_the_gap_and_reuses_the_cache() {
    let dir = TempDir::new().unwrap();
    let args = ["eigs", "--s", "2", "--nmax", "2", "--lmax", "0", "--cache-dir", "cache"];
    yukawa(dir.path()).args(args).assert().success();
    let out = dir.path().join("out/eigs-s2-n2-l0.csv");
    let first = fs::read(&out).unwrap();
    let rows = csv_rows(&out);
    let gap: f64 = rows.iter().find(|r| r[0] == "2" && r[1] == "0").unwrap()[2].parse().unwrap();
    assert!((gap - 0.430_964_406_3).abs() < 1e-8);
    let header = String::from_utf8(first.clone()).unwrap();
    assert!(header.starts_with("n,l,lambda,err,ratio_to_log_bound,asymptotic_leading\n"));
    assert_eq!(fs::read_dir(dir.path().join("cache")).unwrap().count(), 1);

    yukawa(dir.path()).args(args).assert().success();
    assert_eq!(fs::read(&out).unwrap(), first);
}

#[test]
fn repeated_json_runs_are_identical() {
    let dir = TempDir::new().unwrap();
    let args = ["eigs", "--s", "1", "--nmax", "6", "--lmax", "4", "--format", "json", "--cache-dir", "c"];
    yukawa(dir.path()).args(args).assert().success();
    let out = dir.path().join("out/eigs-s1-n6-l4.json");
    let first = fs::read(&out).unwrap();
    yukawa(dir.path()).args(args).assert().success();
    assert_eq!(fs::read(&out).unwrap(), first);
    let v: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 7 * 5);
}

#[test]
fn corrupt_cache_is_rejected() {
    let dir = TempDir::new().unwrap();
    let args = ["eigs", "--s", "2", "--nmax", "3", "--lmax", "1", "--cache-dir", "cache"];
    yukawa(dir.path()).args(args).assert().success();
    let entry = fs::read_dir(dir.path().join("cache")).unwrap().next().unwrap().unwrap();
    fs::write(entry.path(), b"{\"header\": 1").unwrap();
    let out = yukawa(dir.path()).args(args).assert().code(2);
    assert!(String::from_utf8_lossy(&out.get_output().stderr).contains("cache rejected"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    yukawa(dir.path()).args(["eigs", "--s", "0"]).assert().code(2);
    yukawa(dir.path()).args(["verify", "--suite", "physics"]).assert().code(2);
    let out = yukawa(dir.path())
        .args(["evolve", "--init", "modes:2,0,0=1", "--norms", "sobolevish:k=1"])
        .assert()
        .code(2);
    assert!(String::from_utf8_lossy(&out.get_output().stderr).contains("shubin:k=K"));
    yukawa(dir.path()).args(["scenario", "--scenario", "remark99"]).assert().code(2);
}

#[test]
fn evolve_single_mode_and_null_data() {
    let dir = TempDir::new().unwrap();
    yukawa(dir.path())
        .args(["evolve", "--s", "2", "--init", "modes:2,0,0=1", "--times", "0,1", "--norms", "l2;logsob:tau=1,nu=2"])
        .assert()
        .success();
    let rows = csv_rows(&dir.path().join("out/evolve.csv"));
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][2].parse::<f64>().unwrap(), 1.0);
    let exact = (-(2.0 / 3.0) * (1.0 - 2f64.powf(-1.5))).exp();
    let at_one: f64 = rows.iter().find(|r| r[0] != "0e0" && r[1] == "l2").unwrap()[2].parse().unwrap();
    assert!((at_one - exact).abs() < 1e-12);

    yukawa(dir.path())
        .args(["evolve", "--init", "modes:0,0,0=1;0,1,1=0.5", "--times", "0,1,10", "--format", "json"])
        .assert()
        .success();
    let v: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("out/evolve.json")).unwrap()).unwrap();
    let values: Vec<f64> = v["samples"].as_array().unwrap().iter().map(|s| s["value"].as_f64().unwrap()).collect();
    assert!(values.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn evolve_accepts_field_files_and_series() {
    let dir = TempDir::new().unwrap();
    let field = r#"{"label":"g","rows":[{"n":3,"l":1,"m":-1,"re":0.5,"im":0.0}]}"#;
    fs::write(dir.path().join("g.json"), field).unwrap();
    yukawa(dir.path()).args(["evolve", "--init", "file:g.json", "--times", "0,2"]).assert().success();
    yukawa(dir.path())
        .args(["evolve", "--s", "1", "--init", "delay:tau0=0.5,N=200", "--times", "1,2", "--norms", "l2;domaindual:tau=1"])
        .assert()
        .success();
}

#[test]
fn verify_suites() {
    let dir = TempDir::new().unwrap();
    yukawa(dir.path()).args(["verify", "--suite", "kernel", "--s", "2"]).assert().success();
    yukawa(dir.path()).args(["verify", "--suite", "spaces"]).assert().success();
    let v: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("out/verify-spaces.json")).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
}

fn verdicts(path: &Path) -> Vec<(String, f64, String)> {
    csv_rows(path).into_iter().map(|r| (r[3].clone(), r[2].parse().unwrap(), r[4].clone())).collect()
}

#[test]
fn scenarios_reproduce_the_delay_phenomena() {
    let dir = TempDir::new().unwrap();
    let n = ["--series-n", "3000", "--window", "300"];
    yukawa(dir.path()).args(["scenario", "--scenario", "remark14", "--times", "0.1,1"]).args(n).assert().success();
    let v = verdicts(&dir.path().join("out/scenario-remark14.csv"));
    assert_eq!(v[0].2, "divergent");
    assert_eq!(v[1].2, "convergent");

    yukawa(dir.path()).args(["scenario", "--scenario", "example42"]).args(n).assert().success();
    for (norm, _, verdict) in verdicts(&dir.path().join("out/scenario-example42.csv")) {
        let want = if norm == "shubin:k=2" { "divergent" } else { "convergent" };
        assert_eq!(verdict, want, "{norm}");
    }

    yukawa(dir.path()).args(["scenario", "--scenario", "example41"]).args(n).assert().success();
    let f = csv_rows(&dir.path().join("out/scenario-example41-frontier.csv"));
    let t_star: Vec<f64> = f.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(t_star.windows(2).all(|w| w[1] > w[0]));
}
