use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use streamfade_cli::output::{Document, CSV_COLUMNS};
use tempfile::tempdir;

fn streamfade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_streamfade")).args(args).output().expect("binary runs")
}

fn out_arg(path: &Path) -> String {
    path.to_str().unwrap().to_string()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn window_larger_than_blocks_is_a_usage_error() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("gts.csv");
    let out = streamfade(&[
        "--scheme", "gts", "--blocks", "10", "--window", "11", "--snr-db", "0", "--out", &out_arg(&path),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("window"));
    assert!(!path.exists());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0, "no partial files");
}

#[test]
fn unknown_flag_and_missing_values_exit_with_usage_code() {
    assert_eq!(streamfade(&["--bogus"]).status.code(), Some(2));
    assert_eq!(streamfade(&["--scheme", "je"]).status.code(), Some(2));
    assert_eq!(streamfade(&["--preset", "fig7", "--rate", "2"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let out = streamfade(&["--scheme", "mt", "--blocks", "5", "--snr-db", "0", "--trials", "10", "--out", &out_arg(&path)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!path.exists());
}

#[test]
fn repeat_invocations_are_byte_identical() {
    let dir = tempdir().unwrap();
    let args = ["--scheme", "st", "--blocks", "12", "--snr-db", "1", "--trials", "3000", "--seed", "5", "--sweep", "rate=0.5,1,2"];
    let mut texts = Vec::new();
    for (name, workers) in [("a.csv", None), ("b.csv", None), ("c.csv", Some("1"))] {
        let path = dir.path().join(name);
        let mut argv: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        argv.extend(["--out".to_string(), out_arg(&path)]);
        if let Some(w) = workers {
            argv.extend(["--workers".to_string(), w.to_string()]);
        }
        let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
        assert!(streamfade(&argv).status.success());
        texts.push(fs::read(&path).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    assert_eq!(texts[0], texts[2]);
}

#[test]
fn json_round_trip_is_exact_and_matches_csv() {
    let args = ["--scheme", "aje", "--blocks", "30", "--snr-db", "2", "--trials", "2000", "--sweep", "rate=0.7,1.3"];
    let json = streamfade(&[&args[..], &["--format", "json"]].concat());
    assert!(json.status.success());
    let text = String::from_utf8(json.stdout).unwrap();
    let doc: Document = serde_json::from_str(&text).unwrap();
    assert_eq!(doc.to_json(), text);
    assert_eq!(doc.records.len(), 2);

    let csv = streamfade(&args);
    let rows = data_rows(&String::from_utf8(csv.stdout).unwrap());
    for (row, rec) in rows.iter().zip(&doc.records) {
        let col = |name: &str| &row[CSV_COLUMNS.iter().position(|c| *c == name).unwrap()];
        assert_eq!(col("mean_rate").parse::<f64>().unwrap(), rec.mean_rate);
        assert_eq!(col("rate_se").parse::<f64>().unwrap(), rec.rate_se);
        assert_eq!(col("ergodic_bound").parse::<f64>().unwrap(), rec.ergodic_bound);
        assert_eq!(col("m_prime").parse::<usize>().unwrap(), rec.m_prime.unwrap());
        assert_eq!(rec.cmf.len(), 31);
        assert_eq!(*rec.cmf.last().unwrap(), 1.0);
    }
}

#[test]
fn mt_example_matches_binomial_mean() {
    let out = streamfade(&[
        "--scheme", "mt", "--blocks", "50", "--rate", "1", "--snr-db", "1.44", "--trials", "1000000", "--seed", "7",
    ]);
    assert!(out.status.success());
    let rows = data_rows(&String::from_utf8(out.stdout).unwrap());
    let mean_decoded: f64 = rows[0][9].parse().unwrap();
    let p = (-1.0 / 10f64.powf(0.144)).exp();
    let sigma = (50.0 * p * (1.0 - p) / 1e6).sqrt();
    assert!((mean_decoded - 50.0 * p).abs() <= 3.0 * sigma, "{mean_decoded} vs {}", 50.0 * p);
}

#[test]
fn preset_headers_record_parameters_and_version() {
    let out = streamfade(&["--preset", "fig4", "--trials", "20"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let header: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(header[0].contains("schema_version=1"));
    assert!(header[0].contains(&format!("code_version={}", env!("CARGO_PKG_VERSION"))));
    assert!(header.iter().any(|l| l.contains("preset fig4")));
    assert!(header.iter().any(|l| l.contains("M=2000") && l.contains("trials=20")));
    assert_eq!(data_rows(&text).len(), 20);

    let out = streamfade(&["--preset", "fig5b", "--trials", "200"]);
    let doc: Document = serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(doc.header.iter().any(|l| l.contains("preset fig5b")));
    assert_eq!(doc.records.len(), 7);
    assert!(doc.records.iter().all(|r| r.cmf.len() == 51));
    let gts = doc.records.iter().find(|r| r.scheme == "gts").unwrap();
    assert!(gts.window.is_some());
}

#[test]
fn fig7_rows_cover_every_rate_and_scheme() {
    let out = streamfade(&["--preset", "fig7", "--trials", "50"]);
    assert!(out.status.success());
    let rows = data_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 6 * 20);
    for scheme in ["mt", "je", "aje", "ts", "st", "informed-bound"] {
        assert_eq!(rows.iter().filter(|r| r[0] == scheme).count(), 20);
    }
    for row in &rows {
        let rate: f64 = row[2].parse().unwrap();
        let bound: f64 = row[10].parse().unwrap();
        assert!(bound <= rate && bound > 0.0);
    }
}
