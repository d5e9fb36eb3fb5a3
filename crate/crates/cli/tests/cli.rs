use std::process::{Command, Output};

fn qduality(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qduality")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = qduality(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn duality_single_photon() {
    let v = json(&["duality", "--state", "|1,0> + |0,1>", "--k", "1"]);
    assert!((v["v"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(v["d"].as_f64().unwrap().abs() < 1e-12);
    assert!(v["duality_slack"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn duality_zero_photons_is_an_error() {
    let out = qduality(&["duality", "--state", "|0,0>"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn duality_table_csv_has_convention_column() {
    let out = qduality(&["duality", "--table", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().next().unwrap().contains("convention"));
    assert!(text.lines().count() > 10);
}

#[test]
fn criteria_on_singlet() {
    let v = json(&["criteria", "run", "--state", "bell:psi-", "--criterion", "chsh"]);
    let verdict = &v["verdicts"][0];
    assert_eq!(verdict["criterion"], "chsh");
    assert!((verdict["lhs"].as_f64().unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-10);
    assert_eq!(verdict["violated"], true);
}

#[test]
fn tolerance_flag_rejudges() {
    // Werner p = 0.4 sits 0.1 above the PPT threshold: margin -min eig = 0.05
    let strict = json(&["criteria", "run", "--state", "werner:0.4", "--criterion", "ppt"]);
    assert_eq!(strict["verdicts"][0]["violated"], true);
    let loose = json(&["--tolerance", "0.1", "criteria", "run", "--state", "werner:0.4", "--criterion", "ppt"]);
    assert_eq!(loose["verdicts"][0]["violated"], false);
}

#[test]
fn criterion_needing_three_qubits_rejects_two() {
    let out = qduality(&["criteria", "run", "--state", "bell:phi+", "--criterion", "cauchy4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rho_alpha_scan_csv() {
    let out = qduality(&["criteria", "rho-alpha", "--scan", "2:2.2:0.1"]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "alpha,min_pt_eigenvalue,cauchy4_margin,cauchy4_violated");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].ends_with("true"));
}

#[test]
fn cauchy4_search_round_trips_through_config() {
    let dir = std::env::temp_dir().join(format!("qduality-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let choice = dir.join("choice.toml");
    let out = qduality(&["--out", choice.to_str().unwrap(), "criteria", "cauchy4-search", "--alpha", "2.1", "--restarts", "4"]);
    assert!(out.status.success());
    let cfg = dir.join("config.toml");
    std::fs::write(&cfg, "[criteria]\ncauchy4_choice = \"choice.toml\"\n").unwrap();
    let v = json(&["--config", cfg.to_str().unwrap(), "criteria", "run", "--state", "ghz3", "--criterion", "cauchy4"]);
    assert_eq!(v["verdicts"][0]["criterion"], "cauchy4");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn eraser_is_reproducible_per_seed() {
    let a = json(&["--seed", "5", "eraser", "--shots", "20000"]);
    let b = json(&["--seed", "5", "eraser", "--shots", "20000"]);
    assert_eq!(a, b);
    let vis = a["sampled_conditional_visibility"][2].as_f64().unwrap();
    assert!((vis - 1.0).abs() < 1e-12);
}

#[test]
fn collective_csv_schema() {
    let out = qduality(&["collective", "figure6", "--n", "8", "--lambdas", "1:1.5:0.5"]);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("x,value,label"));
    assert_eq!(text.lines().count(), 1 + 2 * 4);
    let out = qduality(&["collective", "depth-curve", "--n", "4", "--k", "1", "--grid", "0:1:0.5", "--restarts", "4"]);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("x,value,label"));
    assert!(text.contains(",k=1"));
}

#[test]
fn reproduce_exit_status() {
    let ok = qduality(&["reproduce", "figure6"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).starts_with("figure6: PASS"));
    // table3 carries a reference cell that does not reproduce
    let bad = qduality(&["reproduce", "table3"]);
    assert_eq!(bad.status.code(), Some(1));
    let unknown = qduality(&["reproduce", "nope"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn classical_bound_interval() {
    let p1 = (2.0 + 2f64.sqrt()) / 4.0;
    let v = json(&["classical-bound", "--p1", &p1.to_string(), "--p2", &(1.0 - p1).to_string()]);
    assert!((v["a1b2_min"].as_f64().unwrap() + 1.0).abs() < 1e-9);
    assert!((v["a1b2_max"].as_f64().unwrap() - (2.0 - 3.0 / 2f64.sqrt())).abs() < 1e-9);
}

#[test]
fn csv_not_available_for_operator_search() {
    let out = qduality(&["--format", "csv", "criteria", "cauchy4-search", "--restarts", "2"]);
    assert_eq!(out.status.code(), Some(2));
}
