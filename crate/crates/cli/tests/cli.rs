use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qsl(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsl")).args(args).current_dir(dir).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    std::fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

fn report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn number(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn saturating_qubit_bound_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "qubit.toml",
        r#"
kind = "bound_check"
output_path = "out/qubit.json"
curve_path = "out/qubit.csv"
[parameters]
levels = [0, 1]
amplitudes = [0.7071067811865476, 0.7071067811865476]
samples = 64
"#,
    );
    let out = qsl(&["run", &cfg], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path(), "out/qubit.json");
    let bounds = &r["results"][0]["bounds"];
    for key in ["orthogonality_theta", "mt_bound", "ml_bound_ground_referenced"] {
        assert!((number(&bounds[key]) - PI).abs() < 1e-9, "{key}");
    }
    assert_eq!(r["config"]["hbar"], 1.0);
    assert_eq!(r["config"]["convention"], "wootters_angle");
    assert!(r.get("elapsed_seconds").is_none());

    let csv = std::fs::read_to_string(dir.path().join("out/qubit.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("theta,fidelity,bures_angle_wootters,rate"));
    assert_eq!(lines.count(), 65);
}

#[test]
fn counterexample_sweep_has_decreasing_tau() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sweep.toml",
        r#"
kind = "counterexample"
output_path = "sweep.json"
[parameters]
e0 = 1.0
eq = 3.0
g = 6.0
n = 8
[sweep]
parameter = "g"
values = [3.5, 6, 12]
"#,
    );
    let out = qsl(&["sweep", &cfg], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path(), "sweep.json");
    let results = r["results"].as_array().unwrap();
    let taus: Vec<f64> = results.iter().map(|p| number(&p["result"]["nominal"]["tau"])).collect();
    assert_eq!(taus.len(), 3);
    assert!(taus.windows(2).all(|w| w[1] < w[0]), "{taus:?}");
    assert!(results.iter().all(|p| p["result"]["bounds_violated"] == true));
    assert_eq!(results[0]["sweep_value"], 3.5);

    // the same config without the sweep verb is refused
    let out = qsl(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn qfi_sweep_records_no_violations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "qfi.toml",
        "kind = \"qfi_sweep\"\nseed = 5\noutput_path = \"qfi.json\"\nhbar = 0.5\n[parameters]\ncount = 400\n",
    );
    let out = qsl(&["run", &cfg], dir.path());
    assert!(out.status.success());
    let r = report(dir.path(), "qfi.json");
    assert_eq!(r["results"][0]["violations"], 0);
    assert_eq!(r["results"][0]["cases"], 400);
    assert_eq!(r["invariant_violations"].as_array().unwrap().len(), 0);
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let text = "kind = \"qfi_sweep\"\nseed = 9\noutput_path = \"a.json\"\n[parameters]\ncount = 150\n[sweep]\nparameter = \"dim_max\"\nvalues = [2, 4, 6]\n";
    let a = write_config(dir.path(), "a.toml", text);
    let b = write_config(dir.path(), "b.toml", &text.replace("a.json", "b.json"));
    assert!(qsl(&["sweep", &a], dir.path()).status.success());
    assert!(qsl(&["sweep", &b], dir.path()).status.success());
    let first = std::fs::read_to_string(dir.path().join("a.json")).unwrap();
    let again = std::fs::read_to_string(dir.path().join("b.json")).unwrap();
    assert_eq!(first.replace("a.json", "b.json"), again);
    assert!(qsl(&["sweep", &a], dir.path()).status.success());
    assert_eq!(first, std::fs::read_to_string(dir.path().join("a.json")).unwrap());
}

#[test]
fn eigenstates_report_infinite_bounds_as_strings() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "eig.toml",
        "kind = \"bound_check\"\noutput_path = \"eig.json\"\n[parameters]\nlevels = [0, 1]\namplitudes = [1, 0]\n",
    );
    assert!(qsl(&["run", &cfg], dir.path()).status.success());
    let r = report(dir.path(), "eig.json");
    assert_eq!(r["results"][0]["bounds"]["mt_bound"], "inf");
    assert_eq!(r["results"][0]["bounds"]["orthogonality_theta"], Value::Null);
}

#[test]
fn saturating_demo_and_distance_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "demo.toml",
        "kind = \"saturating_demo\"\noutput_path = \"demo.json\"\nhbar = 2.0\n[parameters]\nlevels = [-1, 0.5, 3]\nlevel = 2\nphase = 0.3\n",
    );
    assert!(qsl(&["run", &cfg], dir.path()).status.success());
    let r = report(dir.path(), "demo.json");
    assert_eq!(r["results"][0]["saturated"], true);
    assert!((number(&r["results"][0]["bounds"]["orthogonality_theta"]) - PI * 2.0 / 4.0).abs() < 1e-9);

    let cfg = write_config(
        dir.path(),
        "table.toml",
        "kind = \"distance_table\"\noutput_path = \"table.json\"\nconvention = \"fisher_angle\"\n[parameters]\ndistributions = [[0.5, 0.5], [1, 0]]\nstates = [[1, 0], [0, 1], [1, 1]]\n",
    );
    assert!(qsl(&["run", &cfg], dir.path()).status.success());
    let r = report(dir.path(), "table.json");
    assert!((number(&r["results"][0]["classical_geodesic"][0][1]) - PI / 2.0).abs() < 1e-12);
    assert!((number(&r["results"][0]["bures_angle"][0][1]) - PI).abs() < 1e-12);
    assert!((number(&r["results"][0]["wootters_distance"][0][2]) - PI / 4.0).abs() < 1e-12);
}

#[test]
fn config_errors_exit_with_one_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.toml",
        "kind = \"counterexample\"\noutput_path = \"r.json\"\n[parameters]\ne0 = 1.0\neq = 3.0\nn = 8\n",
    );
    let out = qsl(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parameters.g"));
    assert!(!dir.path().join("r.json").exists());

    let cfg = write_config(dir.path(), "syntax.toml", "kind = \"counterexample\"\noutput_path = [\n");
    let out = qsl(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("syntax.toml"));

    let out = qsl(&["run", "missing.toml"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    // level 1 is degenerate with the ground level, so no saturating state exists
    let cfg = write_config(
        dir.path(),
        "deg.toml",
        "kind = \"saturating_demo\"\noutput_path = \"deg.json\"\n[parameters]\nlevels = [0, 0, 1]\nlevel = 1\n",
    );
    assert_eq!(qsl(&["run", &cfg], dir.path()).status.code(), Some(2));
}

#[test]
fn timing_flag_adds_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "t.toml",
        "kind = \"qfi_sweep\"\noutput_path = \"t.json\"\n[parameters]\ncount = 10\n",
    );
    assert!(qsl(&["run", "--timing", &cfg], dir.path()).status.success());
    assert!(number(&report(dir.path(), "t.json")["elapsed_seconds"]) >= 0.0);
}
