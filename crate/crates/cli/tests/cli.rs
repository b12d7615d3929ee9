use std::path::Path;
use std::process::{Command, Output};

use fracstab_cli::output::{Table, SIDECAR};
use fracstab_core::mlmodel::MLParams;

fn fracstab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracstab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("FRACSTAB_PARAMS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn classify_negative_c_is_order_independent_unstable() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracstab(dir.path(), &["classify", "--a", "0", "--b", "1", "--c", "-1", "--q", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Unstable (order-independent)"));
    let t = Table::read(&dir.path().join("classify.csv")).unwrap();
    assert_eq!(t.rows[0][t.column("verdict").unwrap()], "Unstable");
    assert_eq!(t.rows[0][t.column("order_independent").unwrap()], "true");
}

#[test]
fn branch_folds_bracket_the_fold_currents() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracstab(dir.path(), &["branches", "--I-range", "-20:45", "--steps", "500"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let t = Table::read(&dir.path().join("branches.csv")).unwrap();
    let currents: Vec<f64> = t.numbers("I").unwrap().into_iter().map(Option::unwrap).collect();
    let b = t.column("branch").unwrap();
    let b2: Vec<f64> = t.rows.iter().zip(&currents).filter(|(r, _)| r[b] == "B2").map(|(_, &i)| i).collect();
    let (lo, hi) = b2.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &i| (l.min(i), h.max(i)));
    let step = 65.0 / 499.0;
    assert!(lo > -14.4204 && lo - step < -14.4204, "{lo}");
    assert!(hi < 39.6935 && hi + step > 39.6935, "{hi}");
    let verdict = t.column("verdict").unwrap();
    assert!(t.rows.iter().filter(|r| r[b] == "B2").all(|r| r[verdict] == "Unstable"));
}

#[test]
fn output_is_deterministic() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&d1, &d2] {
        let o = fracstab(d.path(), &["branches", "--steps", "50", "--format", "csv,svg"]);
        assert_eq!(o.status.code(), Some(0));
    }
    for f in ["branches.csv", "branches.svg", SIDECAR] {
        let a = std::fs::read(d1.path().join(f)).unwrap();
        let b = std::fs::read(d2.path().join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn csv_cells_have_nine_significant_digits_and_read_back() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracstab(dir.path(), &["special-points"]);
    assert_eq!(o.status.code(), Some(0));
    let t = Table::read(&dir.path().join("special_points.csv")).unwrap();
    assert_eq!(t.header, ["name", "value", "unit"]);
    let k = t.column("value").unwrap();
    for row in &t.rows {
        let mantissa = row[k].trim_start_matches('-').split('e').next().unwrap();
        assert_eq!(mantissa.replace('.', "").len(), 9, "{}", row[k]);
    }
    let values = t.numbers("value").unwrap();
    assert!((values[0].unwrap() + 29.568).abs() < 0.005);
}

#[test]
fn sidecar_echoes_overrides_and_is_a_valid_parameter_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracstab(dir.path(), &["special-points", "--set", "g_K=8.5", "--set", "I=12"]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join(SIDECAR)).unwrap();
    assert!(text.contains("# override: g_K=8.5"));
    let p = MLParams::parse(&text).unwrap();
    assert_eq!(p.g_k, 8.5);
    assert_eq!(p.i_app, 12.0);

    let again = tempfile::tempdir().unwrap();
    let side = dir.path().join(SIDECAR);
    let o = fracstab(again.path(), &["special-points", "--params", side.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let p2 = MLParams::parse(&std::fs::read_to_string(again.path().join(SIDECAR)).unwrap()).unwrap();
    assert_eq!(p, p2);
}

#[test]
fn environment_variable_supplies_the_parameter_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("custom.txt");
    std::fs::write(&file, "# custom\ng_L = 2.2\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_fracstab"))
        .args(["special-points", "--out"])
        .arg(dir.path())
        .env("FRACSTAB_PARAMS", &file)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let p = MLParams::parse(&std::fs::read_to_string(dir.path().join(SIDECAR)).unwrap()).unwrap();
    assert_eq!(p.g_l, 2.2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(fracstab(p, &["--help"]).status.code(), Some(0));
    assert_eq!(fracstab(p, &["nonsense"]).status.code(), Some(1));
    assert_eq!(fracstab(p, &["special-points", "--set", "nope=1"]).status.code(), Some(1));
    assert_eq!(fracstab(p, &["branches", "--I-range", "5:1"]).status.code(), Some(1));
    assert_eq!(fracstab(p, &["classify", "--a", "0", "--b", "-1", "--c", "1"]).status.code(), Some(2));
    // monotone steady-state current: no knees
    assert_eq!(fracstab(p, &["special-points", "--set", "g_L=20"]).status.code(), Some(2));
    assert_eq!(
        fracstab(p, &["simulate", "--I", "1e9", "--t-end", "5ms", "--dt", "0.05ms"]).status.code(),
        Some(3)
    );
    assert_eq!(fracstab(p, &["verify", "--set", "V1=0", "--samples", "8"]).status.code(), Some(4));
    assert_eq!(fracstab(p, &["verify", "--samples", "40"]).status.code(), Some(0));
}

#[test]
fn simulation_at_forty_fires() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracstab(
        dir.path(),
        &["simulate", "--I", "40", "--q", "0.8", "--t-end", "400ms", "--dt", "0.2ms", "--format", "csv,svg"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let t = Table::read(&dir.path().join("simulate.csv")).unwrap();
    assert_eq!(t.header, ["t", "V", "n"]);
    let v: Vec<f64> = t.numbers("V").unwrap().into_iter().map(Option::unwrap).collect();
    assert_eq!(v.len(), 2001);
    assert!(v.iter().cloned().fold(f64::MIN, f64::max) > 30.0);
    assert!(v[0] < -59.0);
    let spikes = Table::read(&dir.path().join("spikes.csv")).unwrap();
    assert!(!spikes.rows.is_empty());
    let svg = std::fs::read_to_string(dir.path().join("simulate.svg")).unwrap();
    assert!(svg.contains("<polyline"));
}

#[test]
fn critical_q_curve_on_first_branch() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracstab(dir.path(), &["critical-q", "--steps", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let t = Table::read(&dir.path().join("critical_q.csv")).unwrap();
    let q: Vec<Option<f64>> = t.numbers("q_star").unwrap();
    assert_eq!(q.len(), 20);
    // V' itself sits on the classical threshold
    assert!(q.iter().skip(1).all(|x| matches!(x, Some(v) if *v > 0.0 && *v < 1.0)));
}

#[test]
fn hopf_scan_needs_a_triple_or_voltage() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(fracstab(dir.path(), &["hopf-scan"]).status.code(), Some(1));
    let o = fracstab(dir.path(), &["hopf-scan", "--b", "1", "--c", "1", "--q-range", "0.5:1", "--steps", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let t = Table::read(&dir.path().join("hopf_scan.csv")).unwrap();
    let a: Vec<f64> = t.numbers("a_star").unwrap().into_iter().map(Option::unwrap).collect();
    assert!((a[0] + 1.5).abs() < 1e-7);
    assert!((a[1] + 1.0).abs() < 1e-7);
}
