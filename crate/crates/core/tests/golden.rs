//! Frozen outputs. Regenerate with `UPDATE_GOLDEN=1 cargo test --test golden`
//! after an intentional change, and review the diff.

use std::path::PathBuf;

use quantum_duality::collective::{figure6_sweep, Configuration};
use quantum_duality::criteria::{parse_grid, rho_alpha_scan, FourRootMode, StoredFourRootChoice};
use quantum_duality::reproduce::{figure6_lambdas, reproduce, ReproduceOptions, Target};

const REL_TOL: f64 = 1e-9;

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn cells_match(a: &str, b: &str) -> bool {
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => x == y || (x - y).abs() <= REL_TOL * x.abs().max(y.abs()).max(1.0),
        _ => a == b,
    }
}

fn check(name: &str, actual: &str) {
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let read = |text: &str| -> Vec<Vec<String>> {
        csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(text.as_bytes())
            .records()
            .map(|r| r.unwrap().iter().map(String::from).collect())
            .collect()
    };
    let (exp, act) = (read(&expected), read(actual));
    assert_eq!(exp.len(), act.len(), "{name}: row count");
    for (i, (e, a)) in exp.iter().zip(&act).enumerate() {
        assert_eq!(e.len(), a.len(), "{name} row {i}: column count");
        for (x, y) in e.iter().zip(a) {
            assert!(cells_match(x, y), "{name} row {i}: expected {x:?}, got {y:?}");
        }
    }
}

fn report(target: Target) -> String {
    reproduce(target, &ReproduceOptions::default()).unwrap().to_csv()
}

#[test]
fn table1() {
    check("table1.csv", &report(Target::Table1));
}

#[test]
fn table2() {
    check("table2.csv", &report(Target::Table2));
}

#[test]
fn table3() {
    check("table3.csv", &report(Target::Table3));
}

#[test]
fn bell_table() {
    check("bell_table.csv", &report(Target::BellTable));
}

#[test]
fn eraser() {
    check("eraser.csv", &report(Target::Eraser));
}

#[test]
fn rho_alpha_scan_with_bundled_operators() {
    let grid = parse_grid("2:3:0.05").unwrap();
    let mode = FourRootMode::Fixed(StoredFourRootChoice::bundled().choice);
    let rows = rho_alpha_scan(&grid, &mode).unwrap();
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        w.serialize(r).unwrap();
    }
    check("rho_alpha_scan.csv", &String::from_utf8(w.into_inner().unwrap()).unwrap());
}

#[test]
fn figure6() {
    let rows = figure6_sweep(16, &figure6_lambdas(), &Configuration::ALL).unwrap();
    let mut out = String::from("x,value,label\n");
    for r in &rows {
        out.push_str(&format!("{},{},{}\n", r.lambda, r.variance, r.configuration.label()));
    }
    check("figure6.csv", &out);
}
