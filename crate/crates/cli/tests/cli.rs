use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tauberlab"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env_remove("TAUBERLAB_OUT")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

/// Data rows of a report as string fields, skipping the comment and header rows.
fn rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("# tauberlab "), "missing provenance row in {}", path.display());
    text.lines().skip(2).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn exponential_regularity_is_ln2() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["density", "--family", "exp", "--lambda-grid", "1:1e-4:geom17", "--diag", "regular", "--r", "0.5"]);
    assert_eq!(code(&o), 0);
    let rows = rows(&d.path().join("density_exp_regular.csv"));
    let limsup = rows.iter().find(|r| r[3] == "limsup_estimate").unwrap();
    assert!((limsup[4].parse::<f64>().unwrap() - std::f64::consts::LN_2).abs() < 1e-9);
}

#[test]
fn cesaro_flatness_table_is_zero() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["density", "--family", "cesaro", "--diag", "flat"]);
    assert_eq!(code(&o), 0);
    let rows = rows(&d.path().join("density_cesaro_flat.csv"));
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r[4].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn missing_family_file_is_an_input_error() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["density", "--family", "no_such_family.txt"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("no_such_family.txt"));
}

#[test]
fn malformed_family_file_reports_line() {
    let d = TempDir::new().unwrap();
    let path = d.path().join("bad.fam");
    std::fs::write(&path, "[family]\nid broken\nkind generated\ngenerator affine 1\n").unwrap();
    let o = run(d.path(), &["density", "--family", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.fam:4"), "{err}");
}

#[test]
fn family_file_is_accepted() {
    let d = TempDir::new().unwrap();
    let path = d.path().join("lin.fam");
    std::fs::write(&path, "id lin\nkind generated\ngenerator affine 1 1\n").unwrap();
    let o = run(d.path(), &["density", "--family", path.to_str().unwrap(), "--diag", "quantile", "--lambda-grid", "1:1e-2:geom3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(&d.path().join("density_lin_quantile.csv"));
    for r in rows.iter().filter(|r| r[3] == "inversion_error") {
        assert!(r[4].parse::<f64>().unwrap() <= 1e-8);
    }
}

#[test]
fn single_state_value_brackets_cost() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["value", "--model", "bundled/single", "--family", "exp", "--lambda-grid", "1:1e-2:geom3"]);
    assert_eq!(code(&o), 0);
    for r in rows(&d.path().join("values_single_exp.csv")) {
        let (lo, hi): (f64, f64) = (r[4].parse().unwrap(), r[5].parse().unwrap());
        assert!(lo <= 0.7 + 1e-12 && 0.7 <= hi + 1e-12, "{r:?}");
        assert!(hi - lo <= 1e-3 + 1e-12);
    }
}

#[test]
fn cycle2_values_approach_half() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["value", "--model", "bundled/cycle2"]);
    assert_eq!(code(&o), 0);
    let rows = rows(&d.path().join("values_cycle2_cesaro.csv"));
    let finest: Vec<_> = rows.iter().filter(|r| r[2].parse::<f64>().unwrap() == 1e-4).collect();
    assert_eq!(finest.len(), 2);
    for r in finest {
        let mid = 0.5 * (r[4].parse::<f64>().unwrap() + r[5].parse::<f64>().unwrap());
        assert!((mid - 0.5).abs() < 1e-3, "{r:?}");
    }
}

#[test]
fn brute_force_cap_exits_three() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["value", "--model", "bundled/alt4", "--brute", "--horizon", "40", "--lambda-grid", "1:0.1:geom2"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap"));
    assert!(std::fs::read_dir(d.path()).unwrap().next().is_none());
}

#[test]
fn brute_force_orders_agree() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["value", "--model", "bundled/random", "--seed", "7", "--brute", "--horizon", "4"]);
    assert_eq!(code(&o), 0);
    let rows = rows(&d.path().join("values_random7_cesaro_brute.csv"));
    let (lower, upper): (Vec<_>, Vec<_>) = rows.iter().partition(|r| r[4] == "lower");
    assert_eq!(lower.len(), upper.len());
    for (a, b) in lower.iter().zip(&upper) {
        assert_eq!(a[5], b[5]);
    }
}

#[test]
fn model_file_round_trip() {
    let d = TempDir::new().unwrap();
    let path = d.path().join("two.model");
    std::fs::write(
        &path,
        "id two\ndt 1\n[states]\na MAX 1\nb NONE 0\n[edges]\na a\na b\nb a\n[family]\nid e\nkind exponential\n",
    )
    .unwrap();
    let o = run(d.path(), &["value", "--model", path.to_str().unwrap(), "--lambda-grid", "1e-1:1e-3:geom3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(&d.path().join("values_two_e.csv"));
    // MAX stays on the cost-1 loop
    let a = rows.iter().rfind(|r| r[3] == "a").unwrap();
    assert!(a[5].parse::<f64>().unwrap() >= 1.0 - 1e-12);
}

#[test]
fn corollary_matrix_passes_on_cycle2() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["tauber", "--model", "bundled/cycle2", "--families", "cesaro,exp", "--check", "corollary", "--svg"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let rows = rows(&d.path().join("corollary_matrix.csv"));
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[6] == "pass"));
    let svg = std::fs::read_to_string(d.path().join("gaps_corollary_cycle2.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.matches("<path").count() >= 3);
}

#[test]
fn bump_family_fails_tauber_check() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["tauber", "--model", "bundled/cycle2", "--families", "bump", "--check", "tauber", "--lambda-grid", "1:1e-3:geom7"]);
    assert_eq!(code(&o), 1);
    let rows = rows(&d.path().join("tauber_checks.csv"));
    assert_eq!(rows[0][6], "false");
    assert_eq!(rows[0][13], "fail");
}

#[test]
fn geometric_schedule_has_pk_row() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["tauber", "--schedule", "geometric", "--eps", "0.2", "--mu", "1e-3"]);
    assert_eq!(code(&o), 0);
    let rows = rows(&d.path().join("schedule_geometric_cesaro.csv"));
    let pk = rows.iter().find(|r| r[0] == "p^k=1/k").unwrap();
    assert!((pk[1].parse::<f64>().unwrap() - pk[2].parse::<f64>().unwrap()).abs() < 1e-9);
    assert_eq!(pk[3], "pass");
}

#[test]
fn partition_schedule_with_models() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["tauber", "--schedule", "partition", "--model", "bundled/cycle2,bundled/alt4", "--eps", "0.2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let iv = rows(&d.path().join("schedule_partition_exp_intervals.csv"));
    assert!(iv.iter().all(|r| r[5] == "true"));
    let bounds = rows(&d.path().join("schedule_partition_exp_bounds.csv"));
    assert_eq!(bounds.len(), 6);
}

#[test]
fn axioms_on_cycle2_pass() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["tauber", "--check", "axioms", "--model", "bundled/cycle2", "--horizon", "4"]);
    assert_eq!(code(&o), 0);
    let rows = rows(&d.path().join("axioms.csv"));
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[3] == "pass"));
}

#[test]
fn pinned_strategy_fails_playability() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["tauber", "--check", "axioms", "--model", "bundled/alt4", "--strategies", "pinned"]);
    assert_eq!(code(&o), 1);
    let rows = rows(&d.path().join("axioms.csv"));
    let p = rows.iter().find(|r| r[2] == "p").unwrap();
    assert_eq!(p[3], "fail");
    assert!(!p[5].is_empty());
}

#[test]
fn hardy_signals_match_closed_forms() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["tauber", "--check", "hardy"]);
    assert_eq!(code(&o), 0);
    assert!(d.path().join("hardy.csv").exists());
}

#[test]
fn tauber_without_task_is_an_input_error() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&run(d.path(), &["tauber"])), 2);
    assert_eq!(code(&run(d.path(), &["value", "--model", "bundled/nope"])), 2);
    assert_eq!(code(&run(d.path(), &["density", "--family", "gen:affine:1"])), 2);
}

#[test]
fn outputs_are_byte_identical() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let args = ["tauber", "--model", "bundled/alt4", "--check", "corollary", "--lambda-grid", "1:1e-3:geom7", "--svg"];
    assert_eq!(code(&run(a.path(), &args)), 0);
    assert_eq!(code(&run(b.path(), &args)), 0);
    let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(!names.is_empty());
    for n in names {
        assert_eq!(std::fs::read(a.path().join(&n)).unwrap(), std::fs::read(b.path().join(&n)).unwrap());
    }
}

#[test]
fn env_var_sets_output_directory() {
    let d = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_tauberlab"))
        .args(["density", "--family", "cesaro", "--lambda-grid", "1:1e-2:geom3"])
        .env("TAUBERLAB_OUT", d.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(d.path().join("density_cesaro_flat.csv").exists());
}
