use std::path::Path;
use std::process::{Command, Output};

const TINY: &str = r#"
lead_time_hours = 1.0

[[station]]
count = 2
capacity_mw = 50.0
outage_rate_per_hour = 0.1

[[station]]
count = 1
capacity_mw = 100.0
outage_rate_per_hour = 0.2
"#;

fn gsrisk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsrisk")).args(args).output().expect("binary runs")
}

fn records(csv_text: &[u8]) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(csv_text).records().map(Result::unwrap).collect()
}

fn write_tiny(dir: &Path) -> String {
    let path = dir.join("tiny.toml");
    std::fs::write(&path, TINY).unwrap();
    path.display().to_string()
}

fn column(out: &Output, name: &str) -> Vec<String> {
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let idx = rdr.headers().unwrap().iter().position(|h| h == name).unwrap();
    rdr.records().map(|r| r.unwrap()[idx].to_string()).collect()
}

#[test]
fn oracle_on_a_model_file() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_tiny(dir.path());
    let out = gsrisk(&["--model", &model, "--method", "oracle", "--loads", "100,50,200"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let risks: Vec<f64> = column(&out, "risk").iter().map(|r| r.parse().unwrap()).collect();
    assert!((risks[0] - 0.208).abs() < 1e-12);
    assert!((risks[1] - 0.038).abs() < 1e-12);
    assert!((risks[2] - 1.0).abs() < 1e-12);
    assert_eq!(column(&out, "load"), ["100.0", "50.0", "200.0"]);
}

#[test]
fn header_has_the_record_columns() {
    let out = gsrisk(&["--method", "oracle", "--loads", "3000"]);
    let header = String::from_utf8_lossy(&out.stdout).lines().next().unwrap().to_string();
    for c in ["load", "method", "risk", "relative_error", "evaluations", "wall_time", "seed", "levels", "agreement", "config", "error"] {
        assert!(header.split(',').any(|h| h == c), "missing {c} in {header}");
    }
}

#[test]
fn compare_is_deterministic_apart_from_wall_time() {
    let args = [
        "--method", "compare", "--loads", "3000,2900", "--samples", "2000", "--replications", "3", "--pilot", "2000",
        "--max-evaluations", "100000", "--seed", "9",
    ];
    let a = gsrisk(&args);
    let b = gsrisk(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let (ra, rb) = (records(&a.stdout), records(&b.stdout));
    assert_eq!(ra.len(), 6);
    let wall = 6;
    for (x, y) in ra.iter().zip(&rb) {
        for i in 0..x.len() {
            if i != wall {
                assert_eq!(x[i], y[i]);
            }
        }
    }
    let methods: Vec<&str> = ra.iter().map(|r| &r[1]).collect();
    assert_eq!(methods, ["oracle", "cmcs", "fegs", "oracle", "cmcs", "fegs"]);
    let agreement = column(&a, "agreement");
    assert!(agreement[0].is_empty());
    assert!(!agreement[2].is_empty());
}

#[test]
fn sequential_flag_gives_identical_records() {
    let base = ["--method", "fegs", "--loads", "2900", "--samples", "2000", "--replications", "3", "--pilot", "2000"];
    let par = records(&gsrisk(&base).stdout);
    let mut with_seq = base.to_vec();
    with_seq.push("--sequential");
    let seq = records(&gsrisk(&with_seq).stdout);
    assert_eq!(par[0][2].to_string(), seq[0][2].to_string());
    assert_eq!(par[0][4].to_string(), seq[0][4].to_string());
}

#[test]
fn percent_sigma_is_resolved_against_each_load() {
    let out = gsrisk(&["--method", "oracle", "--loads", "2850", "--sigma-load", "2%"]);
    let mw = gsrisk(&["--method", "oracle", "--loads", "2850", "--sigma-load", "57"]);
    assert!(out.status.success());
    assert_eq!(column(&out, "risk"), column(&mw, "risk"));
    let r: f64 = column(&out, "risk")[0].parse().unwrap();
    assert!((r - 2.5157e-4).abs() < 1e-7, "{r}");
}

#[test]
fn wind_farm_case_through_flags() {
    let out = gsrisk(&[
        "--method", "oracle", "--loads", "2850", "--sigma-load", "0.1%", "--wind-forecast", "200",
    ]);
    assert!(out.status.success());
    let with_wind: f64 = column(&out, "risk")[0].parse().unwrap();
    let without: f64 = column(&gsrisk(&["--method", "oracle", "--loads", "2850", "--sigma-load", "0.1%"]), "risk")[0]
        .parse()
        .unwrap();
    assert!(with_wind < without);
}

#[test]
fn json_output_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("run.json");
    let manifest = dir.path().join("manifest.json");
    let out = gsrisk(&[
        "--method", "oracle", "--loads", "3100,2700", "--format", "json", "--seed", "4",
        "--out", out_path.to_str().unwrap(), "--manifest", manifest.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(doc["records"].as_array().unwrap().len(), 2);
    assert_eq!(doc["manifest"]["seed"], 4);
    assert_eq!(doc["manifest"]["lead_time_hours"], 4.0);
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m, doc["manifest"]);
}

#[test]
fn oracle_capacity_limit_is_reported_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("lead_time_hours = 1.0\n");
    for i in 0..9 {
        text.push_str(&format!(
            "\n[[station]]\ncount = 7\ncapacity_mw = {}.5\noutage_rate_per_hour = 0.01\n",
            10 + i
        ));
    }
    let path = dir.path().join("big.toml");
    std::fs::write(&path, text).unwrap();
    let out = gsrisk(&["--model", path.to_str().unwrap(), "--method", "oracle", "--loads", "100,200"]);
    assert_eq!(out.status.code(), Some(2));
    let errors = column(&out, "error");
    assert_eq!(errors.len(), 2);
    assert!(errors.iter().all(|e| e.contains("state space")), "{errors:?}");
}

#[test]
fn truncated_oracle_is_unsupported() {
    let out = gsrisk(&["--method", "oracle", "--loads", "2850", "--sigma-load", "1%", "--truncate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!column(&out, "error")[0].is_empty());
}

#[test]
fn bad_input_fails_cleanly() {
    let out = gsrisk(&["--model", "/nonexistent/model.toml", "--loads", "100"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "lead_time_hours = 1.0\n[[station]]\ncount = 0\ncapacity_mw = 5.0\noutage_rate_per_hour = 0.1\n").unwrap();
    let out = gsrisk(&["--model", bad.to_str().unwrap(), "--loads", "1"]);
    assert!(!out.status.success());

    assert!(!gsrisk(&["--loads", "100", "--rho", "1.5"]).status.success());
    assert!(!gsrisk(&["--loads", "100", "--sigma-load", "-3"]).status.success());
    assert!(!gsrisk(&["--method", "oracle"]).status.success());
}

#[test]
fn study_writes_report_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = gsrisk(&["study", "table2", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let md = std::fs::read_to_string(dir.path().join("table2.md")).unwrap();
    assert!(md.contains("PASS"));
    let rows = records(&std::fs::read(dir.path().join("table2.csv")).unwrap());
    assert_eq!(rows.len(), 6);
}
