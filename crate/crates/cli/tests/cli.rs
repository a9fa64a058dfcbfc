use std::path::Path;
use std::process::{Command, Output};
use teleport_cli::RunManifest;

fn teleport(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teleport"))
        .args(args)
        .env_remove("TELEPORT_CONFIG")
        .env_remove("TELEPORT_WORKERS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scalar(args: &[&str]) -> f64 {
    let o = teleport(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    stdout(&o).trim().parse().unwrap()
}

fn csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    (header, lines.map(|l| l.split(',').map(String::from).collect()).collect())
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn benchmark_examples() {
    assert!((scalar(&["benchmark", "squeezed", "--beta", "0.001"]) - 0.5002).abs() < 1e-4);
    assert_eq!(scalar(&["benchmark", "squeezed", "--beta", "2"]), 0.75);
    let g = scalar(&["benchmark", "general", "--beta", "0.001", "--lambda", "0.001"]);
    assert!((g - 0.25).abs() < 1e-3);
}

#[test]
fn usage_errors_exit_with_two() {
    let o = teleport(&["benchmark", "general", "--beta", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--lambda"));
    assert_eq!(teleport(&["benchmark", "squeezed", "--beta", "1,2"]).status.code(), Some(2));
    assert_eq!(teleport(&["figure", "fig9"]).status.code(), Some(2));
}

#[test]
fn json_output_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = teleport(&["benchmark", "squeezed", "--beta", "2", "--format", "json", "--out", out]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["benchmark"], 0.75);
    let m = RunManifest::read(&dir.path().join("benchmark.manifest.json")).unwrap();
    assert_eq!(m.command, "benchmark squeezed");
    assert_eq!(m.params["beta"], 2.0);
    assert_eq!(m.outputs, vec!["benchmark.json"]);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# defaults\nbeta = 2\nlambda = 0.001\n").unwrap();
    let c = cfg.to_str().unwrap();
    assert_eq!(scalar(&["benchmark", "squeezed", "--config", c]), 0.75);
    assert!((scalar(&["benchmark", "squeezed", "--config", c, "--beta", "0.001"]) - 0.5002).abs() < 1e-4);
    let o = Command::new(env!("CARGO_BIN_EXE_teleport"))
        .args(["benchmark", "general", "--beta", "0.001"])
        .env("TELEPORT_CONFIG", c)
        .output()
        .unwrap();
    let g: f64 = stdout(&o).trim().parse().unwrap();
    assert!((g - 0.25).abs() < 1e-3);
    std::fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(teleport(&["benchmark", "squeezed", "--config", c]).status.code(), Some(2));
}

#[test]
fn fidelity_paths_agree() {
    let get = |method: &str| -> f64 {
        let o = teleport(&[
            "fidelity", "vbk", "--alpha-re", "0.3", "--alpha-im", "-0.2", "--squeezing", "0.3", "--squeeze-phase", "1.0", "--r", "0.6",
            "--delta", "0.4", "--theta", "0.9", "--phi-zeta", "2.5", "--gain", "0.85", "--method", method, "--format", "json",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        serde_json::from_str::<serde_json::Value>(&stdout(&o)).unwrap()["fidelity"].as_f64().unwrap()
    };
    let (m, q, f) = (get("moments"), get("quadrature"), get("oracle"));
    assert!((m - q).abs() < 1e-8 && (m - f).abs() < 1e-7, "{m} {q} {f}");
    assert_eq!(teleport(&["fidelity", "ar", "--branches", "2", "--method", "quadrature"]).status.code(), Some(2));
}

#[test]
fn figure_outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = teleport(&["figure", "fig1", "--grid", "2", "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let first = std::fs::read(dir.path().join("fig1.csv")).unwrap();
    let (h, rows) = csv(&dir.path().join("fig1.csv"));
    assert_eq!(h[0], "beta");
    assert_eq!(h.last().unwrap(), "classification");
    // β = 1e-3 row
    let cell = |name: &str| rows[0][col(&h, name)].parse::<f64>().unwrap();
    assert!((cell("ar") - 0.58).abs() < 0.01);
    assert!((cell("benchmark") - 0.50).abs() < 0.01);
    assert!(cell("vbk_gain_tuned") < cell("benchmark"));
    assert_eq!(rows[0][col(&h, "classification")], "below_benchmark");
    let svg = std::fs::read_to_string(dir.path().join("fig1.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
    let m = RunManifest::read(&dir.path().join("fig1.manifest.json")).unwrap();
    assert_eq!(m.data_schema.as_deref(), Some("fig1/1"));
    assert_eq!(m.outputs, vec!["fig1.csv", "fig1.svg"]);

    assert!(teleport(&["figure", "fig1", "--grid", "2", "--out", out]).status.success());
    assert_eq!(std::fs::read(dir.path().join("fig1.csv")).unwrap(), first);
}

#[test]
fn csv_uses_scientific_notation_for_small_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert!(teleport(&["figure", "fig7", "--grid", "7", "--out", out]).status.success());
    let (h, rows) = csv(&dir.path().join("fig7.csv"));
    assert_eq!(h, ["energy", "tmsv_entropy", "tmsv_r", "tmsv_db", "ar_entropy", "classification"]);
    assert_eq!(rows.len(), 10);
    for row in &rows {
        for cell in &row[..5] {
            let x: f64 = cell.parse().unwrap();
            if x != 0.0 && x.abs() < 1e-3 {
                assert!(cell.contains('e'), "{cell}");
            } else {
                assert!(!cell.contains('e'), "{cell}");
            }
        }
        // the AR line is S = E
        assert_eq!(row[0], row[4]);
    }
}

#[test]
fn worker_count_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_teleport"))
        .args(["figure", "fig7", "--grid", "3", "--out", dir.path().to_str().unwrap()])
        .env("TELEPORT_WORKERS", "3")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(RunManifest::read(&dir.path().join("fig7.manifest.json")).unwrap().workers, 3);
}

#[test]
fn ar_sweep_over_branches() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = teleport(&["sweep", "ar", "--beta", "1", "--branches", "1,2,3,4,5", "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = csv(&dir.path().join("sweep.csv"));
    let f: Vec<f64> = rows.iter().map(|r| r[col(&h, "mean_fidelity")].parse().unwrap()).collect();
    assert_eq!(f.len(), 5);
    assert!(f.windows(2).all(|w| w[1] >= w[0]), "{f:?}");
    for r in &rows {
        assert!(r[col(&h, "integration_error")].parse::<f64>().unwrap() < 1e-3);
        assert_eq!(r[col(&h, "lambda")], "");
    }
    assert!(!dir.path().join("sweep.checkpoint.jsonl").exists());
}

#[test]
fn empty_sweep_grid_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(teleport(&["sweep", "ar", "--branches", "2", "--out", out]).status.code(), Some(2));
    assert_eq!(teleport(&["sweep", "ar", "--beta", "1", "--out", out]).status.code(), Some(2));
    assert_eq!(teleport(&["sweep", "vbk", "--beta", "1", "--out", out]).status.code(), Some(2));
}

#[test]
fn sweep_resumes_from_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = ["sweep", "vbk", "--beta", "0.5,2", "--ebits", "2", "--gain", "1", "--out", out];
    assert!(teleport(&args).status.success());
    let (h, rows) = csv(&dir.path().join("sweep.csv"));
    assert_eq!(rows.len(), 2);
    let fid = col(&h, "mean_fidelity");

    // an interrupted run left point 1 behind, with a recognisable value
    let m = RunManifest::read(&dir.path().join("sweep.manifest.json")).unwrap();
    let mut row: Vec<serde_json::Value> = rows[1]
        .iter()
        .map(|c| match c.parse::<f64>() {
            Ok(x) => serde_json::json!(x),
            Err(_) if c.is_empty() => serde_json::Value::Null,
            Err(_) => serde_json::json!(c),
        })
        .collect();
    row[fid] = serde_json::json!(0.123);
    let ckpt = format!(
        "{}\n{}\n",
        serde_json::to_string(&m.fingerprint()).unwrap(),
        serde_json::json!({ "index": 1, "row": row })
    );
    std::fs::write(dir.path().join("sweep.checkpoint.jsonl"), ckpt).unwrap();
    let o = teleport(&args);
    assert!(o.status.success());
    assert!(stdout(&o).contains("(1 from checkpoint)"), "{}", stdout(&o));
    let (_, resumed) = csv(&dir.path().join("sweep.csv"));
    assert_eq!(resumed[0], rows[0]);
    assert_eq!(resumed[1][fid], "0.123");
}

#[test]
fn failed_points_exit_nonzero_with_partial_marker() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = teleport(&["sweep", "ar", "--beta", "1", "--branches", "2,0", "--out", out]);
    assert_eq!(o.status.code(), Some(1));
    let (_, rows) = csv(&dir.path().join("sweep.partial.csv"));
    assert_eq!(rows.len(), 1);
    assert!(!dir.path().join("sweep.csv").exists());
    assert!(dir.path().join("sweep.checkpoint.jsonl").exists());
    let m = RunManifest::read(&dir.path().join("sweep.manifest.json")).unwrap();
    assert_eq!(m.status, teleport_cli::manifest::Status::Partial);
}

#[test]
fn oracle_check_passes() {
    let o = teleport(&["oracle", "check", "--cases", "3", "--seed", "5"]);
    assert!(o.status.success(), "{}\n{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("max |ΔF|"));
}
