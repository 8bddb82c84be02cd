//! Result rows, CSV emission and the JSON summary.
//!
//! The CSV column order is fixed and versioned in the header comment.
//! Floats are written with Rust's shortest round-trip formatting, so a CSV
//! read back with `f64::from_str` reproduces every value bit-exactly, and
//! repeated runs of the same config produce byte-identical files.

use crate::stats::spearman;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

pub const CSV_VERSION: &str = "stability-lab results v1";

pub const CSV_COLUMNS: &[&str] = &[
    "experiment",
    "sweep",
    "dataset",
    "path",
    "trial",
    "check",
    "nu2",
    "delta_t",
    "gap",
    "train_risk",
    "test_risk",
    "beta_hat",
    "rho_hat",
    "slope",
    "value",
    "bound",
    "bound_value",
    "flags",
    "master_seed",
    "config_hash",
];

/// One output row; absent cells serialize as empty fields.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ResultRow {
    pub experiment: String,
    pub sweep: Option<f64>,
    pub dataset: Option<usize>,
    pub path: Option<usize>,
    pub trial: Option<usize>,
    pub check: Option<String>,
    pub nu2: Option<f64>,
    pub delta_t: Option<f64>,
    pub gap: Option<f64>,
    pub train_risk: Option<f64>,
    pub test_risk: Option<f64>,
    pub beta_hat: Option<f64>,
    pub rho_hat: Option<f64>,
    pub slope: Option<f64>,
    pub value: Option<f64>,
    pub bound: Option<String>,
    pub bound_value: Option<f64>,
    pub flags: Vec<String>,
    pub master_seed: u64,
    pub config_hash: String,
}

fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn fmt_opt_usize(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ResultRow {
    fn csv_line(&self) -> String {
        [
            self.experiment.clone(),
            fmt_opt_f64(self.sweep),
            fmt_opt_usize(self.dataset),
            fmt_opt_usize(self.path),
            fmt_opt_usize(self.trial),
            self.check.clone().unwrap_or_default(),
            fmt_opt_f64(self.nu2),
            fmt_opt_f64(self.delta_t),
            fmt_opt_f64(self.gap),
            fmt_opt_f64(self.train_risk),
            fmt_opt_f64(self.test_risk),
            fmt_opt_f64(self.beta_hat),
            fmt_opt_f64(self.rho_hat),
            fmt_opt_f64(self.slope),
            fmt_opt_f64(self.value),
            self.bound.clone().unwrap_or_default(),
            fmt_opt_f64(self.bound_value),
            self.flags.join(";"),
            self.master_seed.to_string(),
            self.config_hash.clone(),
        ]
        .join(",")
    }
}

/// Render rows as CSV text.
pub fn to_csv(rows: &[ResultRow]) -> String {
    let mut out = format!("# {CSV_VERSION}\n{}\n", CSV_COLUMNS.join(","));
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}

/// Parse CSV text produced by [`to_csv`] back into rows (used by tests and
/// the summary consistency check).
pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>, String> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().ok_or("missing header")?;
    if header != CSV_COLUMNS.join(",") {
        return Err(format!("unexpected header `{header}`"));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != CSV_COLUMNS.len() {
            return Err(format!("row {}: {} fields, expected {}", i + 1, fields.len(), CSV_COLUMNS.len()));
        }
        let opt_f64 = |s: &str| -> Result<Option<f64>, String> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|e| format!("row {}: {e}", i + 1))
            }
        };
        let opt_usize = |s: &str| -> Result<Option<usize>, String> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|e| format!("row {}: {e}", i + 1))
            }
        };
        rows.push(ResultRow {
            experiment: fields[0].to_string(),
            sweep: opt_f64(fields[1])?,
            dataset: opt_usize(fields[2])?,
            path: opt_usize(fields[3])?,
            trial: opt_usize(fields[4])?,
            check: (!fields[5].is_empty()).then(|| fields[5].to_string()),
            nu2: opt_f64(fields[6])?,
            delta_t: opt_f64(fields[7])?,
            gap: opt_f64(fields[8])?,
            train_risk: opt_f64(fields[9])?,
            test_risk: opt_f64(fields[10])?,
            beta_hat: opt_f64(fields[11])?,
            rho_hat: opt_f64(fields[12])?,
            slope: opt_f64(fields[13])?,
            value: opt_f64(fields[14])?,
            bound: (!fields[15].is_empty()).then(|| fields[15].to_string()),
            bound_value: opt_f64(fields[16])?,
            flags: if fields[17].is_empty() {
                Vec::new()
            } else {
                fields[17].split(';').map(str::to_string).collect()
            },
            master_seed: fields[18].parse().map_err(|e| format!("row {}: {e}", i + 1))?,
            config_hash: fields[19].to_string(),
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub stderr: f64,
}

fn stat(values: &[f64]) -> Option<Stat> {
    if values.is_empty() {
        return None;
    }
    let (mean, stderr) = stability_core::estimators::mean_stderr(values);
    Some(Stat { mean, stderr })
}

/// Per-sweep-value statistics over the rows of that group.
#[derive(Debug, Clone, Serialize)]
pub struct GroupSummary {
    pub sweep: Option<f64>,
    pub rows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu2: Option<Stat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_t: Option<Stat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<Stat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_risk: Option<Stat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_risk: Option<Stat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_hat: Option<Stat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_hat: Option<Stat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<Stat>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpearmanEntry {
    pub metric: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Containment {
    pub bound: String,
    pub bound_value: f64,
    pub contained: usize,
    pub trials: usize,
    pub fraction: f64,
}

/// The JSON experiment summary: group means with standard errors, rank
/// correlations of group means against the sweep value, and containment
/// frequency for bound experiments.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub master_seed: u64,
    pub config_hash: String,
    pub rows: usize,
    pub invalid_trials: usize,
    pub groups: Vec<GroupSummary>,
    pub spearman: Vec<SpearmanEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub containment: Option<Containment>,
    /// Full evaluator report (value, assumption checks, flags, input
    /// echo) for bound experiments.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_report: Option<stability_core::bounds::BoundReport>,
    pub warnings: Vec<String>,
}

fn collect<F: Fn(&ResultRow) -> Option<f64>>(rows: &[&ResultRow], f: F) -> Vec<f64> {
    rows.iter().filter_map(|r| f(r)).collect()
}

/// Build the summary from the emitted rows, so the CSV and the JSON agree
/// by construction and can be cross-checked by recomputation.
pub fn summarize(
    rows: &[ResultRow],
    experiment: &str,
    master_seed: u64,
    config_hash: &str,
    invalid_trials: usize,
    containment: Option<Containment>,
    warnings: Vec<String>,
) -> Summary {
    let mut sweeps: Vec<Option<f64>> = Vec::new();
    for row in rows {
        if !sweeps.contains(&row.sweep) {
            sweeps.push(row.sweep);
        }
    }
    sweeps.sort_by(|a, b| {
        a.unwrap_or(f64::NEG_INFINITY).partial_cmp(&b.unwrap_or(f64::NEG_INFINITY)).unwrap()
    });
    let groups: Vec<GroupSummary> = sweeps
        .iter()
        .map(|&sweep| {
            let members: Vec<&ResultRow> = rows.iter().filter(|r| r.sweep == sweep).collect();
            GroupSummary {
                sweep,
                rows: members.len(),
                nu2: stat(&collect(&members, |r| r.nu2)),
                delta_t: stat(&collect(&members, |r| r.delta_t)),
                gap: stat(&collect(&members, |r| r.gap)),
                train_risk: stat(&collect(&members, |r| r.train_risk)),
                test_risk: stat(&collect(&members, |r| r.test_risk)),
                beta_hat: stat(&collect(&members, |r| r.beta_hat)),
                rho_hat: stat(&collect(&members, |r| r.rho_hat)),
                slope: stat(&collect(&members, |r| r.slope)),
            }
        })
        .collect();

    // Rank correlations of group means against the sweep value, for every
    // metric present in at least two groups.
    let mut entries = Vec::new();
    let metric_of: [(&str, fn(&GroupSummary) -> Option<&Stat>); 6] = [
        ("nu2", |g| g.nu2.as_ref()),
        ("delta_t", |g| g.delta_t.as_ref()),
        ("gap", |g| g.gap.as_ref()),
        ("train_risk", |g| g.train_risk.as_ref()),
        ("beta_hat", |g| g.beta_hat.as_ref()),
        ("rho_hat", |g| g.rho_hat.as_ref()),
    ];
    for (name, getter) in metric_of {
        let pairs: Vec<(f64, f64)> = groups
            .iter()
            .filter_map(|g| Some((g.sweep?, getter(g)?.mean)))
            .collect();
        if pairs.len() >= 2 {
            let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            if let Some(rho) = spearman(&xs, &ys) {
                entries.push(SpearmanEntry { metric: name.to_string(), value: rho });
            }
        }
    }

    Summary {
        experiment: experiment.to_string(),
        master_seed,
        config_hash: config_hash.to_string(),
        rows: rows.len(),
        invalid_trials,
        groups,
        spearman: entries,
        containment,
        bound_report: None,
        warnings,
    }
}

/// Write `results.csv` and `summary.json` under `out_dir`.
pub fn emit(out_dir: &Path, rows: &[ResultRow], summary: &Summary) -> std::io::Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let mut csv = std::fs::File::create(out_dir.join("results.csv"))?;
    csv.write_all(to_csv(rows).as_bytes())?;
    let mut json = std::fs::File::create(out_dir.join("summary.json"))?;
    let text = serde_json::to_string_pretty(summary).expect("summary serializes");
    json.write_all(text.as_bytes())?;
    json.write_all(b"\n")?;
    Ok(())
}
