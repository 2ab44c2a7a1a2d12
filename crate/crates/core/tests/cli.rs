use std::path::Path;
use std::process::{Command, Output};

fn lab(dir: &Path, args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_poincare-lab"));
    cmd.current_dir(dir).args(args);
    match threads {
        Some(t) => cmd.env("POINCARE_LAB_THREADS", t),
        None => cmd.env_remove("POINCARE_LAB_THREADS"),
    };
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn usage_errors_exit_64() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&lab(d, &["solve", "--bogus"], None)), 64);
    assert_eq!(code(&lab(d, &["frobnicate"], None)), 64);
    assert_eq!(code(&lab(d, &["solve", "--domain", "nowhere", "--h", "1/8", "--out", "r.json"], None)), 64);
    assert_eq!(code(&lab(d, &["solve", "--domain", "unit-disk", "--h", "-1", "--out", "r.json"], None)), 64);
    assert_eq!(code(&lab(d, &["solve", "--domain", "unit-disk", "--h", "1/8", "--ladder", "1,x", "--out", "r.json"], None)), 64);
    assert_eq!(code(&lab(d, &["solve", "--domain", "unit-disk", "--h", "1/8", "--out", "r.json"], Some("0"))), 64);
    assert_eq!(code(&lab(d, &["solve", "--domain", "unit-disk", "--h", "1/8", "--out", "r.json"], Some("many"))), 64);
    let bad = lab(d, &["solve"], None);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("Usage"));
}

#[test]
fn help_and_version_exit_0() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["--help"][..], &["--version"], &["solve", "--help"]] {
        let o = lab(dir.path(), args, None);
        assert_eq!(code(&o), 0);
        assert!(!o.stdout.is_empty());
    }
}

#[test]
fn runtime_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let missing = d.join("no/such/dir/r.json");
    assert_eq!(code(&lab(d, &["solve", "--domain", "unit-disk", "--h", "1/16", "--out", missing.to_str().unwrap()], None)), 1);
    assert_eq!(code(&lab(d, &["verify", "--report", "absent.json", "--oracle", "poincare-disk"], None)), 1);
}

#[test]
fn solve_then_verify_on_the_disk() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("disk.json"), r#"{"kind": "Disk", "center": [0, 0], "radius": 1}"#).unwrap();
    let o = lab(d, &["solve", "--domain", "disk.json", "--h", "1/128", "--ladder", "1,2,4,6,8", "--out", "report.json", "--csv", "u.csv"], None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "CONVERGED");
    for key in ["u", "residuals", "certificates", "config"] {
        assert!(report.get(key).is_some(), "{key}");
    }
    let csv = std::fs::read_to_string(d.join("u.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("x,y,u"));
    assert_eq!(csv.lines().count() - 1, report["u"].as_array().unwrap().len());
    assert!(d.join("report.json.manifest.json").exists());

    let ok = lab(d, &["verify", "--report", "report.json", "--oracle", "poincare-disk"], None);
    assert_eq!(code(&ok), 0);
    assert!(String::from_utf8_lossy(&ok.stdout).contains("max |u - oracle|"));
    // The same data fails a tolerance below the discretisation error.
    let strict = lab(d, &["verify", "--report", "report.json", "--oracle", "poincare-disk", "--tol", "1e-6"], None);
    assert_eq!(code(&strict), 2);
    // The half-plane metric is singular inside the disk.
    assert_eq!(code(&lab(d, &["verify", "--report", "report.json", "--oracle", "half-plane"], None)), 1);
}

#[test]
fn outputs_do_not_depend_on_the_worker_count_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut bytes = Vec::new();
    for t in ["1", "3"] {
        let (out, csv) = (format!("r{t}.json"), format!("u{t}.csv"));
        let o = lab(d, &["solve", "--domain", "unit-square", "--h", "1/32", "--out", &out, "--csv", &csv], Some(t));
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        bytes.push((std::fs::read(d.join(&out)).unwrap(), std::fs::read(d.join(&csv)).unwrap()));
    }
    assert!(bytes[0] == bytes[1]);
    let r = lab(d, &["replay", "--manifest", "r1.json.manifest.json"], Some("2"));
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stdout));

    // A tampered digest is caught: the rerun is compared with what was recorded.
    let path = d.join("r1.json.manifest.json");
    let mut m: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    m["outputs"][1]["sha256"] = "0".repeat(64).into();
    std::fs::write(&path, serde_json::to_vec(&m).unwrap()).unwrap();
    assert_eq!(code(&lab(d, &["replay", "--manifest", "r1.json.manifest.json"], None)), 2);
}

#[test]
fn oracle_and_probe_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = lab(d, &["oracle", "eval", "--metric", "poincare-disk", "--spacing", "1/8", "--window", "-1,1,-1,1", "--out", "o.csv"], None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(d.join("o.csv")).unwrap();
    assert_eq!(table.lines().next(), Some("x,y,u,e2u,K"));
    for line in table.lines().skip(1) {
        let k: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((k + 1.0).abs() < 1e-6, "{line}");
    }

    assert_eq!(code(&lab(d, &["solve", "--domain", "unit-disk", "--h", "1/32", "--out", "r.json"], None)), 0);
    let p = lab(d, &["probe", "--report", "r.json", "--from", "0,0", "--toward", "0", "--offsets", "0.5,0.25,0.125", "--out", "p.csv"], None);
    assert_eq!(code(&p), 0, "{}", String::from_utf8_lossy(&p.stderr));
    let rows: Vec<Vec<f64>> = std::fs::read_to_string(d.join("p.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|t| t.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.windows(2).all(|w| w[1][2] > w[0][2]));
}
