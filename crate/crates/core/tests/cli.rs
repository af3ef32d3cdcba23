//! Drives the `hv2q` binary end to end: exit codes, report contents, reproducibility.

use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_hv2q");

fn hv2q(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("HV2Q_THREADS").output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn csv_rows(o: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

const PRODUCT: &str = r#"{"amplitudes": [[0.6,0],[0,0.8],[0,0],[0,0]]}"#;

#[test]
fn singlet_zz_reports_perfect_anticorrelation() {
    let o = hv2q(&["verify", "--state", "singlet", "--obs-x", "sz", "--obs-y", "sz", "--samples", "20000"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["pass"], true);
    let xy = v["report"]["verification"]["analytic"]["xy"].as_f64().unwrap();
    assert!((xy + 1.0).abs() < 1e-12);
    assert_eq!(v["report"]["verification"]["mc"]["xy"]["mean"].as_f64().unwrap(), -1.0);
}

#[test]
fn product_state_minimal_model_has_zero_defect() {
    let o = hv2q(&[
        "verify", "--state", PRODUCT, "--obs-x", r#"{"alpha1": 0.2, "alpha2": 1.5, "axis": [1, 2, 2]}"#,
        "--obs-y", "sx", "--model", "minimal", "--samples", "20000",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let loc = &json(&o)["report"]["locality"];
    assert!(loc["sup_defect"].as_f64().unwrap() <= 1e-12);
    assert!(loc["sup_defect_all_b"].as_f64().unwrap() <= 1e-12);
    assert_eq!(loc["local"], true);
    assert_eq!(loc["entries"].as_array().unwrap().len(), 33);
}

#[test]
fn malformed_inputs_exit_2() {
    let o = hv2q(&["verify", "--state", r#"{"amplitudes": [[1,0],"#, "--obs-x", "sz", "--obs-y", "sz"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed state"));
    assert!(o.stdout.is_empty());

    let o = hv2q(&["verify", "--state", "/no/such/file.json", "--obs-x", "sz", "--obs-y", "sz"]);
    assert_eq!(o.status.code(), Some(2));
    let o = hv2q(&["verify", "--state", "singlet", "--obs-x", "sz"]);
    assert_eq!(o.status.code(), Some(2));
    let o = hv2q(&["verify", "--state", "singlet", "--obs-x", "sz", "--obs-y", "sz", "--samples", "50"]);
    assert_eq!(o.status.code(), Some(2));
    let o = hv2q(&["verify", "--state", PRODUCT, "--obs-x", "sz", "--obs-y", "sz", "--model", "bell"]);
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(BIN)
        .args(["verify", "--state", "singlet", "--obs-x", "sz", "--obs-y", "sz", "--samples", "0"])
        .env("HV2Q_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_check_exits_1() {
    // a threshold of 1e-6 standard errors cannot be met by any finite sample
    let o = hv2q(&[
        "verify", "--state", "singlet", "--obs-x", "sx", "--obs-y", "sz", "--samples", "20000", "--sigma", "1e-6",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["pass"], false);
}

#[test]
fn reports_are_byte_identical_across_runs_and_threads() {
    let args = [
        "verify", "--state", r#"{"amplitudes": [[0.3,0.1],[0.5,-0.2],[0.1,0.7],[-0.2,0.2]]}"#,
        "--obs-x", r#"{"alpha1": 1, "alpha2": 0.5, "axis": [0, 1, 1]}"#, "--obs-y", "sx",
        "--samples", "150000", "--chunk", "10000", "--seed", "9",
    ];
    let a = hv2q(&args);
    let b = hv2q(&args);
    let c = Command::new(BIN).args(args).env("HV2Q_THREADS", "3").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn out_flag_and_csv_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let o = hv2q(&[
        "verify", "--state", "singlet", "--obs-x", "sz", "--obs-y", "sx", "--samples", "0", "--format", "csv",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("quantity,oracle,analytic,mc_mean,mc_stderr,z,pass\n"));
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn theta_sweep_on_singlet_follows_minus_cos() {
    let o = hv2q(&["sweep", "--param", "theta", "--from", "0", "--to", "3.141592653589793", "--points", "7", "--samples", "20000"]);
    assert_eq!(o.status.code(), Some(0));
    let (h, rows) = csv_rows(&o);
    assert_eq!(rows.len(), 7);
    let (iv, io, ia, im, is) = (col(&h, "value"), col(&h, "oracle_xy"), col(&h, "analytic_xy"), col(&h, "mc_xy"), col(&h, "mc_xy_stderr"));
    for r in &rows {
        let theta: f64 = r[iv].parse().unwrap();
        let want = -theta.cos();
        assert!((r[io].parse::<f64>().unwrap() - want).abs() < 1e-12);
        assert!((r[ia].parse::<f64>().unwrap() - want).abs() < 1e-9);
        let se: f64 = r[is].parse().unwrap();
        assert!((r[im].parse::<f64>().unwrap() - want).abs() <= 5.0 * se.max(1e-12));
    }
}

#[test]
fn phi_sweep_defect_falls_to_zero() {
    let o = hv2q(&["sweep", "--param", "phi", "--from", "0", "--to", "0.7853981633974483", "--points", "9", "--samples", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let (h, rows) = csv_rows(&o);
    let d: Vec<f64> = rows.iter().map(|r| r[col(&h, "defect")].parse().unwrap()).collect();
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
    assert!(d[0] > 0.99 && *d.last().unwrap() < 1e-12);
}

#[test]
fn sweep_usage_errors() {
    let o = hv2q(&["sweep", "--param", "theta", "--from", "0", "--to", "1", "--points", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty range"));
    let o = hv2q(&["sweep", "--param", "t", "--from", "0", "--to", "1", "--points", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = hv2q(&["sweep", "--param", "phi", "--from", "0", "--to", "1.0", "--points", "3", "--samples", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

fn local_hamiltonian() -> String {
    // σ_z ⊗ I + 0.5 I ⊗ σ_x
    let mut m = [[[0.0f64; 2]; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i][0] = if i < 2 { 1.0 } else { -1.0 };
    }
    for (i, j) in [(0, 1), (1, 0), (2, 3), (3, 2)] {
        m[i][j][0] = 0.5;
    }
    serde_json::to_string(&m).unwrap()
}

#[test]
fn evolve_timelines() {
    let o = hv2q(&["evolve", "--state", "singlet", "--hamiltonian", "zero", "--t-max", "2", "--steps", "4", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = csv_rows(&o);
    assert_eq!(rows.len(), 5);
    let first = &rows[0][1..];
    assert!(rows.iter().all(|r| &r[1..] == first));

    let state = r#"{"amplitudes": [[0.3,0.1],[0.5,-0.2],[0.1,0.7],[-0.2,0.2]]}"#;
    let hl = local_hamiltonian();
    let o = hv2q(&["evolve", "--state", state, "--hamiltonian", &hl, "--t-max", "3", "--steps", "30", "--obs-x", "sx"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let recs = v["report"]["records"].as_array().unwrap();
    let mu0 = recs[0]["mu1"].as_f64().unwrap();
    assert!(recs.iter().all(|r| (r["mu1"].as_f64().unwrap() - mu0).abs() < 1e-10));

    let heis = r#"[[[1,0],[0,0],[0,0],[0,0]],[[0,0],[-1,0],[2,0],[0,0]],[[0,0],[2,0],[-1,0],[0,0]],[[0,0],[0,0],[0,0],[1,0]]]"#;
    let o = hv2q(&["evolve", "--state", state, "--hamiltonian", heis, "--t-max", "3", "--steps", "20", "--model", "minimal", "--samples", "20000"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["report"]["all_pass"], true);

    let o = hv2q(&["evolve", "--state", state, "--hamiltonian", r#"[[[1,0]]]"#, "--t-max", "1", "--steps", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn contextuality_demos() {
    let o = hv2q(&["contextuality", "peres"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &json(&o)["report"];
    assert_eq!(r["row_signs"], serde_json::json!([1, 1, 1]));
    assert_eq!(r["column_signs"], serde_json::json!([1, 1, -1]));
    assert_eq!(r["consistent_assignments"], 0);
    assert_eq!(r["entries"].as_array().unwrap().len(), 9);

    let o = hv2q(&["contextuality", "product-rule", "--samples", "200000"]);
    assert_eq!(o.status.code(), Some(0));
    let d = &json(&o)["report"]["lab_axis"];
    assert!((d["angle_over_pi"].as_f64().unwrap() - 1.0 / 12.0).abs() < 1e-9);

    let o = hv2q(&["contextuality", "product-rule", "--obs-y", "sz", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let (h, rows) = csv_rows(&o);
    assert!(rows.iter().all(|r| r[col(&h, "mc")].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn help_exits_0() {
    assert_eq!(hv2q(&["--help"]).status.code(), Some(0));
    assert_eq!(hv2q(&[]).status.code(), Some(2));
}
