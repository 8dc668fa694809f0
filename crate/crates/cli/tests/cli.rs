use std::path::Path;
use std::process::{Command, Output};

use casimir_core::dielectric::{DrudeParams, PermittivityModel};
use casimir_core::lifshitz::{cylinder_force, cylinder_force_gradient, Geometry, ThermalState};
use casimir_core::quadrature::QuadratureSpec;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_casimir-cyl")).args(args).output().expect("spawn casimir-cyl")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn header(csv: &str) -> String {
    csv.lines().find(|l| !l.starts_with('#')).unwrap().to_string()
}

fn geom(a: f64) -> Geometry {
    Geometry::new(a, 100e-6, 100e-6).unwrap()
}

#[test]
fn single_point_matches_library() {
    let csv = stdout(&run(&["force", "--a", "250"]));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 1);
    let lib = cylinder_force(
        &geom(250e-9),
        ThermalState::new(300.0).unwrap(),
        &PermittivityModel::Drude(DrudeParams::gold()),
        &QuadratureSpec::default(),
    )
    .unwrap();
    assert_eq!(rows[0][1], format!("{:.11e}", lib.value));
    assert_eq!(rows[0][2], format!("{:.11e}", lib.per_length));
    assert_eq!(rows[0][3], lib.l_used.to_string());

    let json = stdout(&run(&["gradient", "--a", "250", "--T", "0", "--model", "plasma", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let lib = cylinder_force_gradient(
        &geom(250e-9),
        ThermalState::zero(),
        &PermittivityModel::PlasmaOscillators(casimir_core::dielectric::OscillatorSet::simple_plasma(9.0).unwrap()),
        &QuadratureSpec::default(),
    )
    .unwrap();
    assert_eq!(v["rows"][0][1].as_f64().unwrap().to_bits(), lib.value.to_bits());
    assert_eq!(v["command"], "gradient");
}

#[test]
fn row_count_equals_sweep_points() {
    let csv = stdout(&run(&["force", "--a-sweep", "100:1000:7:log", "--model", "ideal"]));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 7);
    let a: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(a.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(header(&csv), "a [m],force [N],per_length [N/m],l_used,truncation_estimate,warnings");
}

#[test]
fn output_is_deterministic() {
    let args = ["gradient", "--a-sweep", "150:900:6", "--T", "300"];
    let first = run(&args).stdout;
    for _ in 0..2 {
        assert_eq!(run(&args).stdout, first);
    }
}

#[test]
fn one_point_sweep_equals_single_run() {
    let single = stdout(&run(&["force", "--a", "400"]));
    let sweep = stdout(&run(&["force", "--a-sweep", "400:400:1"]));
    assert_eq!(data_rows(&single), data_rows(&sweep));
    assert_eq!(header(&single), header(&sweep));
}

#[test]
fn malformed_table_exits_2_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.dat");
    std::fs::write(&path, "# omega im_eps\n0.1 100.0\n0.2 oops\n").unwrap();
    let out = run(&["kk-ingest", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    std::fs::write(&path, "0.5 10.0\n0.2 12.0\n").unwrap();
    let out = run(&["force", "--a", "200", "--model", "tabulated", "--optical-data", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn config_errors_exit_2() {
    for args in [
        vec!["force", "--a", "100", "--a-sweep", "100:200:3"],
        vec!["force", "--a-sweep", "500:100:3"],
        vec!["force", "--a", "100", "--model", "dielectric"],
        vec!["force"],
        vec!["force", "--a", "100", "--model", "copper"],
        vec!["force", "--a", "100", "--config", "/nonexistent/file.toml"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn config_file_merged_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "a = 300.0\nT = 0.0\nmodel = \"ideal\"\nR = 50.0\nL = 80.0\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = stdout(&run(&["force", "--config", cfg]));
    let by_flags = stdout(&run(&["force", "--a", "300", "--T", "0", "--model", "ideal", "--R", "50", "--L", "80"]));
    assert_eq!(data_rows(&from_file), data_rows(&by_flags));

    let overridden = stdout(&run(&["force", "--config", cfg, "--a", "600"]));
    let direct = stdout(&run(&["force", "--a", "600", "--T", "0", "--model", "ideal", "--R", "50", "--L", "80"]));
    assert_eq!(data_rows(&overridden), data_rows(&direct));
    assert!(overridden.contains("# a_nm = 600"));
}

#[test]
fn out_file_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tc.csv");
    let svg = dir.path().join("tc.svg");
    let o = run(&[
        "thermal-correction",
        "--a-sweep",
        "500:3000:4",
        "--out",
        out.to_str().unwrap(),
        "--plot",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(header(&csv), "a [m],delta_force [%],delta_gradient [%]");
    assert_eq!(data_rows(&csv).len(), 4);
    for row in data_rows(&csv) {
        assert!(row[1].parse::<f64>().unwrap() < 0.0);
    }
    let plot = std::fs::read_to_string(Path::new(&svg)).unwrap();
    assert_eq!(plot.matches("<polyline").count(), 2);
}

#[test]
fn thermal_correction_vanishes_at_zero_temperature() {
    let csv = stdout(&run(&["thermal-correction", "--a", "300", "--T", "0"]));
    let rows = data_rows(&csv);
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn table1_grid_shape() {
    let csv = stdout(&run(&["table1", "--model", "ideal", "--T", "0", "--a-theta", "0"]));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[6][0], "kappa");
    assert!(rows.iter().all(|r| r.len() == 6));
    // A = 0 column, then ideal metal at T = 0 reproduces the closed form exactly
    assert!(rows.iter().all(|r| r[1].parse::<f64>().unwrap() == 1.0));
    for (cell, closed) in rows[0][2..].iter().zip(&rows[6][2..]) {
        let k: f64 = closed.parse().unwrap();
        assert!((cell.parse::<f64>().unwrap() / k - 1.0).abs() < 1e-10);
    }
}

#[test]
fn edge_error_report() {
    let csv = stdout(&run(&["edge-error"]));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 2);
    let pct = |r: usize, c: usize| rows[r][c].parse::<f64>().unwrap();
    assert!((pct(0, 1) - 0.07).abs() < 0.01 && (pct(1, 1) - 0.37).abs() < 0.01);
    assert!(pct(0, 3) <= 1e-4 && pct(0, 4) <= 5e-7);
    assert!(header(&csv).contains("overhang_extra(L1=25um)"));
}

#[test]
fn kk_ingest_accepts_drude_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("drude.dat");
    let d = DrudeParams::gold();
    let mut text = String::from("# synthetic Drude\n");
    for i in 0..400 {
        let w = 10f64.powf(-2.0 + 5.0 * i as f64 / 399.0);
        text.push_str(&format!("{w:e} {:e}\n", d.im_eps(w)));
    }
    std::fs::write(&path, text).unwrap();
    let csv = stdout(&run(&["kk-ingest", path.to_str().unwrap()]));
    assert!(csv.contains("# rows = 400"));
    for row in data_rows(&csv) {
        assert!(row[3].parse::<f64>().unwrap().abs() < 1e-3, "{row:?}");
    }
}
