//! End-to-end tests of the `marspec` binary: every subcommand runs against
//! real files in a temporary directory, outputs re-ingest cleanly, reruns
//! are byte-identical, and failures exit with their documented codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_marspec"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {:?} failed:\n{}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read_json(path: &Path) -> Value {
    let text = std::fs::read_to_string(path).expect("output exists");
    serde_json::from_str(&text).expect("output is valid JSON")
}

/// Data lines of a CSV output (comment and header dropped).
fn data_lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .expect("csv exists")
        .lines()
        .skip(2)
        .map(str::to_owned)
        .collect()
}

fn simulate(dir: &TempDir, name: &str, t: usize, seed: u64) -> PathBuf {
    let out = dir.path().join(name);
    run_ok(&[
        "simulate",
        "--family",
        "mixed",
        "--phi",
        "0.7",
        "--varphi",
        "0.2",
        "--alpha",
        "1.5",
        "--beta",
        "0.25",
        "--T",
        &t.to_string(),
        "--seed",
        &seed.to_string(),
        "--out",
        out.to_str().unwrap(),
    ]);
    out
}

#[test]
fn simulate_writes_dated_csv_with_manifest() {
    let dir = TempDir::new().unwrap();
    let out = simulate(&dir, "sim.csv", 40, 3);

    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 42, "comment + header + 40 rows");
    assert_eq!(lines[0], "# manifest: sim.manifest.json");
    assert_eq!(lines[1], "date,value");
    assert!(lines[2].starts_with("2000-01,"));
    assert!(lines[41].starts_with("2003-04,"));

    let manifest = read_json(&dir.path().join("sim.manifest.json"));
    assert_eq!(manifest["schema_version"], 1);
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["seed"], 3);
    assert!(manifest["outputs"][0].as_str().unwrap().ends_with("sim.csv"));
}

#[test]
fn simulate_reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let a = simulate(&dir, "a.csv", 80, 9);
    let b = simulate(&dir, "b.csv", 80, 9);
    let mut bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    // The provenance comment embeds the manifest name; align it before
    // comparing the payload.
    let head = b"# manifest: a.manifest.json";
    assert_eq!(&bytes_a[..head.len()], head);
    bytes_a[head.len() - 15..head.len() - 14].copy_from_slice(b"b");
    assert_eq!(bytes_a, bytes_b);
}

#[test]
fn missing_sample_length_is_a_usage_error() {
    let out = bin()
        .args(["simulate", "--family", "causal", "--phi", "0.5", "--alpha", "1.5", "--out", "/tmp/unused.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn estimate_reports_a_converged_mixed_fit() {
    let dir = TempDir::new().unwrap();
    let data = simulate(&dir, "y.csv", 160, 11);
    let report = dir.path().join("est.json");
    run_ok(&[
        "estimate",
        "--input",
        data.to_str().unwrap(),
        "--r",
        "1",
        "--s",
        "1",
        "--out",
        report.to_str().unwrap(),
    ]);
    let doc = read_json(&report);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["input"]["n"], 160);
    assert_eq!(doc["result"]["spec"]["family"], "mixed");
    assert!(doc["result"]["rt"].as_f64().unwrap().is_finite());
    assert_eq!(doc["manifest"], "est.manifest.json");
    assert_eq!(doc["start"]["theta"].as_array().unwrap().len(), 2);
}

#[test]
fn identify_selects_the_planted_shape() {
    let dir = TempDir::new().unwrap();
    let data = simulate(&dir, "y.csv", 200, 11);
    let report = dir.path().join("id.json");
    run_ok(&[
        "identify",
        "--input",
        data.to_str().unwrap(),
        "--p",
        "2",
        "--out",
        report.to_str().unwrap(),
    ]);
    let doc = read_json(&report);
    assert_eq!(doc["p_source"], "flag");
    assert_eq!(doc["selected"], "MAR(1,1)");
    let candidates = doc["candidates"].as_array().unwrap();
    assert_eq!(candidates.len(), 3, "AR(2,0), MAR(1,1), AR(0,2)");
    let selected_rt = doc["candidates"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["label"] == "MAR(1,1)")
        .unwrap()["rt"]
        .as_f64()
        .unwrap();
    for c in candidates {
        assert!(c["rt"].as_f64().unwrap() >= selected_rt - 1e-12);
    }
}

#[test]
fn ingest_hp_cycle_feeds_back_into_identification() {
    let dir = TempDir::new().unwrap();
    let data = simulate(&dir, "y.csv", 150, 21);
    let stem = dir.path().join("cyc");
    run_ok(&[
        "ingest",
        "--input",
        data.to_str().unwrap(),
        "--column",
        "value",
        "--transform",
        "hp",
        "--lb-lags",
        "8",
        "--out-stem",
        stem.to_str().unwrap(),
    ]);

    let diag = read_json(&dir.path().join("cyc_diagnostics.json"));
    assert_eq!(diag["transform"], "hp_cycle");
    assert_eq!(diag["lambda"], 129600.0);
    assert_eq!(diag["n"], 150);
    assert_eq!(diag["ljung_box"].as_array().unwrap().len(), 8);
    assert!(diag["order"]["p"].as_u64().unwrap() >= 1);
    let mean = diag["stats"]["mean"].as_f64().unwrap();
    assert!(mean.abs() < 1e-8, "cycle is mean zero, got {mean}");

    // The emitted series (provenance comment included) must re-ingest.
    let series = dir.path().join("cyc_series.csv");
    assert_eq!(data_lines(&series).len(), 150);
    let report = dir.path().join("est.json");
    run_ok(&[
        "estimate",
        "--input",
        series.to_str().unwrap(),
        "--r",
        "1",
        "--s",
        "0",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(read_json(&report)["result"]["spec"]["family"], "causal");
}

#[test]
fn ingest_log_returns_shortens_by_one() {
    let dir = TempDir::new().unwrap();
    let levels = dir.path().join("levels.csv");
    let mut rows = String::from("date,price\n");
    let mut x = 100.0f64;
    for i in 0..90 {
        x *= 1.001 + 0.01 * ((i * 37 % 11) as f64 / 11.0 - 0.5);
        rows.push_str(&format!("{:04}-{:02},{x}\n", 2000 + i / 12, 1 + i % 12));
    }
    std::fs::write(&levels, rows).unwrap();

    let stem = dir.path().join("ret");
    run_ok(&[
        "ingest",
        "--input",
        levels.to_str().unwrap(),
        "--column",
        "price",
        "--transform",
        "logret",
        "--pmax",
        "3",
        "--lb-lags",
        "4",
        "--out-stem",
        stem.to_str().unwrap(),
    ]);
    let diag = read_json(&dir.path().join("ret_diagnostics.json"));
    assert_eq!(diag["transform"], "log_returns");
    assert_eq!(diag["n"], 89);
    assert!(diag.get("lambda").is_none(), "lambda only applies to hp");
    assert_eq!(data_lines(&dir.path().join("ret_series.csv")).len(), 89);
}

fn montecarlo_config(dir: &TempDir, replications: usize) -> PathBuf {
    let config = dir.path().join("mc.toml");
    std::fs::write(
        &config,
        format!(
            "seed = 42\nreplications = {replications}\np = 2\nt = [80]\nalphas = [1.5]\nbeta = 0.25\n\n\
             [[dgp]]\nfamily = \"mixed\"\nphi = [0.7]\nvarphi = [0.2]\n"
        ),
    )
    .unwrap();
    config
}

#[test]
fn montecarlo_emits_rate_and_coefficient_tables() {
    let dir = TempDir::new().unwrap();
    let config = montecarlo_config(&dir, 3);
    let stem = dir.path().join("mc");
    run_ok(&[
        "montecarlo",
        "--config",
        config.to_str().unwrap(),
        "--out-stem",
        stem.to_str().unwrap(),
    ]);

    let rates = data_lines(&dir.path().join("mc_rates.csv"));
    assert_eq!(rates.len(), 1, "one dgp x alpha x T cell");
    assert!(
        rates[0].starts_with("\"MAR(1,1)\",mixed,1.5,80,3,"),
        "unexpected rates row: {}",
        rates[0]
    );

    let coef = data_lines(&dir.path().join("mc_coef.csv"));
    assert_eq!(coef.len(), 2, "phi1 and varphi1 rows");
    assert!(coef[0].starts_with("\"MAR(1,1)\",1.5,80,phi1,0.7,"));
    assert!(coef[1].starts_with("\"MAR(1,1)\",1.5,80,varphi1,0.2,"));

    let log = read_json(&dir.path().join("mc_log.json"));
    let cells = log["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 1);
    assert_eq!(cells[0]["records"].as_array().unwrap().len(), 3);
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = TempDir::new().unwrap();
    let config = montecarlo_config(&dir, 4);
    let mut payloads = Vec::new();
    for threads in ["1", "4"] {
        let stem = dir.path().join(format!("mc{threads}"));
        run_ok(&[
            "--threads",
            threads,
            "montecarlo",
            "--config",
            config.to_str().unwrap(),
            "--out-stem",
            stem.to_str().unwrap(),
        ]);
        let mut text = String::new();
        for suffix in ["_rates.csv", "_coef.csv"] {
            let path = dir.path().join(format!("mc{threads}{suffix}"));
            text.push_str(&data_lines(&path).join("\n"));
            text.push('\n');
        }
        payloads.push(text);
    }
    assert_eq!(payloads[0], payloads[1]);
}

#[test]
fn rt_surface_covers_the_requested_grid() {
    let dir = TempDir::new().unwrap();
    let data = simulate(&dir, "y.csv", 70, 5);
    let out = dir.path().join("surface.csv");
    run_ok(&[
        "rt-surface",
        "--input",
        data.to_str().unwrap(),
        "--steps",
        "5",
        "--max",
        "0.8",
        "--out",
        out.to_str().unwrap(),
    ]);
    let rows = data_lines(&out);
    assert_eq!(rows.len(), 25);
    let first: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(first[..2], ["0", "0"]);
    let last: Vec<f64> = rows[24]
        .split(',')
        .map(|v| v.parse::<f64>().unwrap())
        .collect();
    assert!((last[0] - 0.8).abs() < 1e-12 && (last[1] - 0.8).abs() < 1e-12);
    assert!(rows
        .iter()
        .all(|r| r.split(',').nth(2).unwrap().parse::<f64>().unwrap() > 0.0));
}

#[test]
fn dump_spectra_matches_grid_sizes() {
    let dir = TempDir::new().unwrap();

    // Theoretical grids on a steps-point layout.
    let stem = dir.path().join("theo");
    run_ok(&[
        "dump-spectra",
        "--family",
        "mixed",
        "--phi",
        "0.7",
        "--varphi",
        "0.2",
        "--steps",
        "8",
        "--out-stem",
        stem.to_str().unwrap(),
    ]);
    assert_eq!(data_lines(&dir.path().join("theo_i2.csv")).len(), 7);
    assert_eq!(data_lines(&dir.path().join("theo_i3.csv")).len(), 49);

    // Empirical grids on the series layout.
    let data = simulate(&dir, "y.csv", 60, 13);
    let stem = dir.path().join("emp");
    run_ok(&[
        "dump-spectra",
        "--input",
        data.to_str().unwrap(),
        "--out-stem",
        stem.to_str().unwrap(),
    ]);
    assert_eq!(data_lines(&dir.path().join("emp_i2.csv")).len(), 59);
    assert_eq!(data_lines(&dir.path().join("emp_i3.csv")).len(), 59 * 59);
}

#[test]
fn io_and_data_failures_use_distinct_exit_codes() {
    let dir = TempDir::new().unwrap();

    let missing = bin()
        .args(["estimate", "--input", "/nonexistent/file.csv", "--r", "1", "--s", "0", "--out", "/tmp/unused.json"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(3), "missing input is an I/O error");

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "date,value\n2000-01,1.0\n2000-02,oops\n").unwrap();
    let malformed = bin()
        .args(["estimate", "--input", bad.to_str().unwrap(), "--r", "1", "--s", "0", "--out", "/tmp/unused.json"])
        .output()
        .unwrap();
    assert_eq!(malformed.status.code(), Some(4), "unparseable cell is a data error");

    let explosive = bin()
        .args(["simulate", "--family", "causal", "--phi", "1.5", "--alpha", "1.5", "--T", "50", "--out", "/tmp/unused.csv"])
        .output()
        .unwrap();
    assert_eq!(explosive.status.code(), Some(5), "unit-circle violation is a model error");
}
