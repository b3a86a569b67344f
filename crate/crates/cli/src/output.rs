use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;

pub const SCHEMA_VERSION: u32 = 1;
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const CSV_COLUMNS: [&str; 14] = [
    "scheme",
    "m_total",
    "rate_r",
    "power_db",
    "distance",
    "window",
    "m_prime",
    "mean_rate",
    "rate_se",
    "mean_decoded",
    "ergodic_bound",
    "approx_flag",
    "seed",
    "trials",
];

/// One operating point of one scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub scheme: String,
    pub m_total: usize,
    pub rate_r: f64,
    pub power_db: f64,
    pub distance: Option<f64>,
    pub window: Option<usize>,
    pub m_prime: Option<usize>,
    pub mean_rate: f64,
    pub rate_se: f64,
    pub mean_decoded: f64,
    /// `min(R, C)` at the received power.
    pub ergodic_bound: f64,
    pub approx_flag: bool,
    pub seed: u64,
    pub trials: u64,
    pub cmf: Vec<f64>,
}

impl OutputRecord {
    fn numbers(&self) -> impl Iterator<Item = f64> + '_ {
        [
            self.rate_r,
            self.power_db,
            self.distance.unwrap_or(0.0),
            self.mean_rate,
            self.rate_se,
            self.mean_decoded,
            self.ergodic_bound,
        ]
        .into_iter()
        .chain(self.cmf.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub schema_version: u32,
    pub code_version: String,
    pub header: Vec<String>,
    pub records: Vec<OutputRecord>,
}

impl Document {
    pub fn new(header: Vec<String>, records: Vec<OutputRecord>) -> Self {
        Document { schema_version: SCHEMA_VERSION, code_version: CODE_VERSION.to_string(), header, records }
    }

    pub fn check_finite(&self) -> Result<(), String> {
        for r in &self.records {
            if r.numbers().any(|v| !v.is_finite()) {
                return Err(format!("non-finite value in {} record at M={}", r.scheme, r.m_total));
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# streamfade schema_version={} code_version={}\n", self.schema_version, self.code_version);
        for line in &self.header {
            let _ = writeln!(out, "# {line}");
        }
        out.push_str(&CSV_COLUMNS.join(","));
        out.push('\n');
        let opt = |v: Option<String>| v.unwrap_or_default();
        for r in &self.records {
            let fields = [
                r.scheme.clone(),
                r.m_total.to_string(),
                r.rate_r.to_string(),
                r.power_db.to_string(),
                opt(r.distance.map(|d| d.to_string())),
                opt(r.window.map(|w| w.to_string())),
                opt(r.m_prime.map(|m| m.to_string())),
                r.mean_rate.to_string(),
                r.rate_se.to_string(),
                r.mean_decoded.to_string(),
                r.ergodic_bound.to_string(),
                r.approx_flag.to_string(),
                r.seed.to_string(),
                r.trials.to_string(),
            ];
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serialises");
        s.push('\n');
        s
    }
}

/// Temporary file next to `path`, so the final rename stays on one filesystem.
pub fn reserve(path: &Path) -> std::io::Result<NamedTempFile> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    NamedTempFile::new_in(dir)
}

pub fn commit(mut file: NamedTempFile, path: &Path, contents: &str) -> std::io::Result<()> {
    file.write_all(contents.as_bytes())?;
    file.as_file().sync_all()?;
    file.persist(path).map_err(|e| e.error)?;
    Ok(())
}
