use std::process::{Command, Output};

fn mvop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mvop")).args(args).output().expect("run mvop")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn constants_report_volume() {
    let out = mvop(&["constants", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let vol = v["volume"].as_f64().unwrap();
    assert!((vol - 4.0 * std::f64::consts::PI / 9.0).abs() < 1e-14);
    assert_eq!(v["c1"], "1/6");
}

#[test]
fn weight_n2_matrix() {
    let out = mvop(&["weight", "--n", "2", "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["W_pol"]["shape"], serde_json::json!([3, 3]));
    assert_eq!(v["prefactor_times_pi_pow_n"], "9/4");
    assert_eq!(v["kind"], "closed-form");
}

#[test]
fn generate_csv_has_norms() {
    let out = mvop(&["generate", "--n", "2", "--k", "1", "--max-degree", "1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 9);
    for r in &rows {
        assert_eq!(&r[5], &r[6]);
    }
}

#[test]
fn domain_csv_to_file() {
    let dir = std::env::temp_dir().join(format!("mvop-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("boundary.csv");
    let out = mvop(&["domain", "--n", "2", "--resolution", "8", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("b1,b2,x1,x2"));
    assert!(text.lines().count() > 8);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn commutant_is_deterministic() {
    let a = mvop(&["commutant", "--n", "2"]);
    let b = mvop(&["commutant", "--n", "2", "--seed", "0"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["dim_AW"], 1);
    assert_eq!(json(&mvop(&["commutant", "--n", "1"]))["dim_AW"], 2);
}

#[test]
fn operators_json() {
    let v = json(&mvop(&["operators", "--n", "2", "--k", "1"]));
    assert_eq!(v["Gamma_plus_0"], serde_json::json!(["8/3", "16/3", "8/3"]));
}

#[test]
fn invalid_parameters_exit_2() {
    assert_eq!(mvop(&["generate", "--n", "5"]).status.code(), Some(2));
    assert_eq!(mvop(&["weight", "--n", "0"]).status.code(), Some(2));
    assert_eq!(mvop(&["operators", "--k", "3"]).status.code(), Some(2));
    assert_eq!(mvop(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn verify_reports_misprint_failures() {
    let out = mvop(&["verify", "--n", "2", "--k", "1", "--max-degree", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let fails: Vec<&str> = text.lines().filter(|l| l.starts_with("[FAIL]")).collect();
    assert_eq!(fails.len(), 2, "{text}");
    assert!(fails[0].contains("scalar density"));
    assert!(fails[1].contains("operator tables"));
    assert!(text.lines().any(|l| l.starts_with("[PASS] 11 family")));
    assert_eq!(out.status.code(), Some(1));
}
