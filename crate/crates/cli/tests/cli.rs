// Literal grid values mirror what a user types on the command line.
#![allow(clippy::approx_constant)]

use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

const PI_8: f64 = 0.39269908169872414;

fn qlds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlds"))
        .args(args)
        .env_remove("QLDS_TOL")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn f(v: &Value, key: &str) -> f64 {
    v[key]
        .as_f64()
        .unwrap_or_else(|| panic!("{key} missing in {v}"))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_json(dir: &Path, name: &str, v: &Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(v).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn chsh_violated_at_pi_over_8() {
    let out = qlds(&["chsh", "--theta", "0.39269908", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!((f(&v, "chsh_lhs") - 3.2071068).abs() < 1e-6);
    assert_eq!(v["violated"], json!(true));
    assert_eq!(v["bound"], json!(3));
    assert_eq!(v["boole_violated"], json!(true));
    assert!((f(&v, "boole_sum") - 0.79289321).abs() < 1e-6);
    assert_eq!(
        v["table"][0]["p"],
        json!([0.5000000000000001, 0.0, 0.0, 0.5000000000000001])
    );
}

#[test]
fn chsh_boundary_at_zero() {
    let out = qlds(&["chsh", "--theta", "0", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!((f(&v, "chsh_lhs") - 3.0).abs() < 1e-9);
    assert_eq!(v["violated"], json!(false));
}

#[test]
fn chsh_raw_setting_and_bad_setting() {
    let s = std::f64::consts::FRAC_1_SQRT_2.to_string();
    let out = qlds(&["chsh", "--a-re", &s, "--b-im", &s, "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!(v["theta"].is_null());
    // κ = ½(a_R² + b_I²) = ½
    assert!((f(&v, "kappa") - 0.5).abs() < 1e-12);

    let out = qlds(&["chsh", "--a-re", "1", "--b-re", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("not normalized"));
}

#[test]
fn chsh_sweep_csv() {
    let out = qlds(&["chsh", "--sweep", "0:1.5708:64", "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "theta");
    let lhs_col = header.iter().position(|h| *h == "chsh_lhs").unwrap();
    let rows: Vec<Vec<f64>> = lines
        .map(|l| {
            l.split(',')
                .map(|c| match c {
                    "true" => 1.0,
                    "false" => 0.0,
                    x => x.parse().unwrap(),
                })
                .collect()
        })
        .collect();
    assert_eq!(rows.len(), 65);
    let best = rows
        .iter()
        .max_by(|a, b| a[lhs_col].total_cmp(&b[lhs_col]))
        .unwrap();
    // 2.5 + cos 2θ − ½ cos 4θ peaks where cos 2θ = ½
    let step = 1.5708 / 64.0;
    assert!((best[0] - std::f64::consts::FRAC_PI_6).abs() <= step);
    assert!((best[lhs_col] - 3.25).abs() < 1e-3);
    let near_pi_8 = rows
        .iter()
        .min_by(|a, b| (a[0] - PI_8).abs().total_cmp(&(b[0] - PI_8).abs()))
        .unwrap();
    assert!(near_pi_8[lhs_col] > 3.0);
    // 17 significant digits
    let second = text.lines().nth(2).unwrap();
    let lhs = second.split(',').nth(lhs_col).unwrap();
    assert_eq!(
        lhs.replace(['.', '-'], "").trim_start_matches('0').len(),
        17
    );
}

#[test]
fn chsh_sweep_rejects_bad_grid() {
    let out = qlds(&["chsh", "--sweep", "0:1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn lattice_demo_matches_h3_example() {
    let out = qlds(&["lattice-demo", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let data = v["operator"]["data"].as_array().unwrap();
    let expected = [-0.5, -0.5, 0.0, -0.5, 0.5, 0.0, 0.0, 0.0, 0.0];
    for (cell, e) in data.iter().zip(expected) {
        assert!((cell[0].as_f64().unwrap() - e).abs() < 1e-12);
        assert!(cell[1].as_f64().unwrap().abs() < 1e-12);
    }
    let eig: Vec<f64> = v["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (x, e) in eig.iter().zip([-h, 0.0, h]) {
        assert!((x - e).abs() < 1e-12);
    }
    assert_eq!(v["proposition1"]["passed"], json!(true));
    assert_eq!(v["meet_dim"], json!(0));
}

#[test]
fn coherent_default_run_passes() {
    let out = qlds(&["coherent", "--d", "3", "--seed", "7", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    for key in ["resolution_residual", "overlap_residual", "pair_residual"] {
        assert!(f(&v, key) <= 1e-10, "{key}");
    }
    assert_eq!(v["seed"], json!(7));
    assert_eq!(v["operator_nonzero"], json!(true));
}

#[test]
fn coherent_rejects_even_dimension() {
    let out = qlds(&["coherent", "--d", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("dimension must be odd"));
}

#[test]
fn coherent_rejects_position_fiducial() {
    let out = qlds(&[
        "coherent",
        "--d",
        "5",
        "--fiducial",
        "[[0,0],[0,0],[1,0],[0,0],[0,0]]",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("fiducial must not be a position or momentum state"));
}

#[test]
fn coherent_fiducial_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_json(
        dir.path(),
        "f.json",
        &json!({"d": 5, "fiducial": [[1,0],[0.5,0.5],[0,0],[0,-1],[0.2,0]], "seed": 11}),
    );
    let out = qlds(&["coherent", "--fiducial", &path, "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json_of(&out);
    assert_eq!(v["d"], json!(5));
    assert_eq!(v["seed"], json!(11));
}

#[test]
fn residual_failure_exits_with_2() {
    let out = qlds(&["coherent", "--d", "3", "--tol", "1e-300", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["passed"], json!(false));
}

fn matrix_json(rows: usize, cols: usize, re: &[f64]) -> Value {
    json!({
        "rows": rows,
        "cols": cols,
        "data": re.iter().map(|x| [*x, 0.0]).collect::<Vec<_>>(),
    })
}

fn subspace_json(d: usize, cols: &[&[f64]]) -> Value {
    let mut data = vec![0.0; d * cols.len()];
    for (j, c) in cols.iter().enumerate() {
        for i in 0..d {
            data[i * cols.len() + j] = c[i];
        }
    }
    json!({"ambient_dim": d, "basis": matrix_json(d, cols.len(), &data)})
}

fn pure_rho(v: &[f64]) -> Value {
    let n: f64 = v.iter().map(|x| x * x).sum();
    let d = v.len();
    let data: Vec<f64> = (0..d * d).map(|k| v[k / d] * v[k % d] / n).collect();
    matrix_json(d, d, &data)
}

fn classify(input: &Value) -> (Option<i32>, Value) {
    let dir = tempfile::tempdir().unwrap();
    let path = write_json(dir.path(), "in.json", input);
    let out = qlds(&["classify", &path, "--no-timestamp"]);
    let v = if out.status.success() {
        json_of(&out)
    } else {
        Value::Null
    };
    (out.status.code(), v)
}

#[test]
fn classify_boolean_pair_is_kolmogorov() {
    let input = json!({
        "h1": subspace_json(3, &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]),
        "h2": subspace_json(3, &[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]),
        "rho": pure_rho(&[0.3, -0.5, 0.8]),
    });
    let (code, v) = classify(&input);
    assert_eq!(code, Some(0));
    assert_eq!(v["verdict"], json!("Kolmogorov"));
    assert_eq!(v["operator_nonzero"], json!(false));
}

#[test]
fn classify_h3_pair_on_top_eigenvector_is_lower() {
    // eigenvector of ½[[−1,−1],[−1,1]] for +√2/2
    let input = json!({
        "h1": subspace_json(3, &[&[1.0, 0.0, 0.0]]),
        "h2": subspace_json(3, &[&[1.0, 1.0, 0.0]]),
        "rho": pure_rho(&[1.0, -(1.0 + 2f64.sqrt()), 0.0]),
    });
    let (code, v) = classify(&input);
    assert_eq!(code, Some(0));
    assert_eq!(v["verdict"], json!("Lower"));
    assert!((f(&v, "d_scalar") - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    assert!((f(&v, "lambda_min") + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
}

#[test]
fn classify_h3_pair_on_maximally_mixed_state() {
    let third = 1.0 / 3.0;
    let input = json!({
        "h1": subspace_json(3, &[&[1.0, 0.0, 0.0]]),
        "h2": subspace_json(3, &[&[1.0, 1.0, 0.0]]),
        "rho": matrix_json(3, 3, &[third, 0.0, 0.0, 0.0, third, 0.0, 0.0, 0.0, third]),
    });
    let (code, v) = classify(&input);
    assert_eq!(code, Some(0));
    assert_eq!(v["verdict"], json!("Kolmogorov"));
    assert_eq!(v["operator_nonzero"], json!(true));
    assert_eq!(f(&v, "epsilon"), 1e-9);
}

#[test]
fn classify_rejects_malformed_input() {
    let (code, _) = classify(&json!({"h1": 1}));
    assert_eq!(code, Some(1));
}

#[test]
fn ds_table1_employees() {
    let out = qlds(&["ds-table1", "--employees", "2,3,5", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!((f(&v, "lower") - 0.2).abs() < 1e-15);
    assert!((f(&v, "upper") - 0.7).abs() < 1e-15);
    assert!((f(&v, "lower_sum") - 0.5).abs() < 1e-15);
    assert_eq!(v["passed"], json!(true));
}

#[test]
fn ds_table1_kolmogorov_mass_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_json(
        dir.path(),
        "m.json",
        &json!({"frame_size": 3, "masses": [
            {"subset": 1, "weight": 0.5},
            {"subset": 2, "weight": 0.25},
            {"subset": 4, "weight": 0.25},
        ]}),
    );
    let out = qlds(&["ds-table1", "--mass", &path, "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["lower_equals_upper"], json!(true));
    assert!(v["lower_boole_violation"].is_null());
}

#[test]
fn ds_table1_random_seeded_passes() {
    for seed in ["1", "2", "3"] {
        let out = qlds(&[
            "ds-table1",
            "--seed",
            seed,
            "--frame",
            "6",
            "--no-timestamp",
        ]);
        assert_eq!(out.status.code(), Some(0));
        let v = json_of(&out);
        assert_eq!(v["passed"], json!(true));
        assert_eq!(v["pairs_checked"], json!(4096));
    }
}

#[test]
fn ds_table1_rejects_bad_employee_counts() {
    assert_eq!(
        qlds(&["ds-table1", "--employees", "2,3"]).status.code(),
        Some(1)
    );
    assert_eq!(
        qlds(&["ds-table1", "--employees", "0,0,0"]).status.code(),
        Some(1)
    );
}

#[test]
fn output_is_deterministic_without_timestamp() {
    for args in [
        &["chsh", "--theta", "0.3", "--no-timestamp"][..],
        &["coherent", "--d", "5", "--seed", "3", "--no-timestamp"][..],
        &["ds-table1", "--seed", "9", "--no-timestamp"][..],
        &["lattice-demo", "--no-timestamp"][..],
    ] {
        assert_eq!(qlds(args).stdout, qlds(args).stdout, "{args:?}");
    }
}

#[test]
fn timestamp_present_by_default() {
    let v = json_of(&qlds(&["chsh"]));
    assert!(v["timestamp"].is_u64());
    assert!((f(&v, "theta") - PI_8).abs() < 1e-17);
}

#[test]
fn tolerance_from_environment_and_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_qlds"))
        .args(["lattice-demo", "--no-timestamp"])
        .env("QLDS_TOL", "1e-7")
        .output()
        .unwrap();
    assert_eq!(json_of(&out)["tolerance"]["zero_tol"], json!(1e-7));

    let out = Command::new(env!("CARGO_BIN_EXE_qlds"))
        .args(["lattice-demo", "--no-timestamp", "--tol", "1e-6"])
        .env("QLDS_TOL", "1e-7")
        .output()
        .unwrap();
    assert_eq!(json_of(&out)["tolerance"]["zero_tol"], json!(1e-6));

    let out = Command::new(env!("CARGO_BIN_EXE_qlds"))
        .args(["lattice-demo"])
        .env("QLDS_TOL", "abc")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(
        qlds(&["lattice-demo", "--tol", "-1"]).status.code(),
        Some(1)
    );
}

#[test]
fn writes_to_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = qlds(&["chsh", "--csv", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("theta,kappa,lambda,chsh_lhs"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn parse_errors_exit_with_1_and_help_with_0() {
    assert_eq!(qlds(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(qlds(&["coherent", "--d", "three"]).status.code(), Some(1));
    assert_eq!(qlds(&["--help"]).status.code(), Some(0));
    assert_eq!(qlds(&["--version"]).status.code(), Some(0));
}
