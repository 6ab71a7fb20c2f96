use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::harness::{scenario_hash, RunRecord};
use crate::model::RequestVector;

pub const CSV_HEADER: [&str; 10] = [
    "t",
    "action_index",
    "reservation",
    "request",
    "cost_res",
    "cost_trf",
    "cost_vio",
    "cost_total",
    "regret",
    "p_dist_l2",
];

pub const MANIFEST_FILE: &str = "manifest.toml";

fn join(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(";")
}

fn split(field: &str) -> Result<Vec<i64>> {
    field
        .split(';')
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Runtime(format!("malformed vector field `{field}`")))
        })
        .collect()
}

pub fn csv_file_name(label: &str, seed: u64) -> String {
    format!("{label}_{seed}.csv")
}

/// Writes one row per slot. Floats use the shortest representation that
/// round-trips, so equal runs give byte-identical files.
pub fn write_csv(path: &Path, record: &RunRecord) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(CSV_HEADER)?;
    for r in &record.rows {
        w.write_record([
            r.t.to_string(),
            r.action.to_string(),
            join(&r.reservation),
            join(&r.request),
            r.cost.reservation.to_string(),
            r.cost.transfer.to_string(),
            r.cost.violation.to_string(),
            r.cost.total.to_string(),
            r.regret.to_string(),
            r.p_dist.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// The columns of a run CSV needed for comparisons.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvRun {
    pub requests: Vec<RequestVector>,
    pub cost_total: Vec<f64>,
    pub regret: Vec<f64>,
    pub p_dist: Vec<f64>,
}

impl CsvRun {
    pub fn scenario_hash(&self) -> String {
        scenario_hash(&self.requests)
    }

    pub fn final_regret(&self) -> f64 {
        self.regret.last().copied().unwrap_or(0.0)
    }
}

pub fn read_csv(path: &Path) -> Result<CsvRun> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers()?.clone();
    if headers.iter().ne(CSV_HEADER) {
        return Err(Error::Runtime(format!(
            "{}: unexpected CSV header",
            path.display()
        )));
    }
    let mut run = CsvRun::default();
    let float = |s: &str| -> Result<f64> {
        s.parse()
            .map_err(|_| Error::Runtime(format!("{}: malformed number `{s}`", path.display())))
    };
    for row in reader.records() {
        let row = row?;
        run.requests.push(RequestVector(split(&row[3])?));
        run.cost_total.push(float(&row[7])?);
        run.regret.push(float(&row[8])?);
        run.p_dist.push(float(&row[9])?);
    }
    Ok(run)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunEntry {
    pub file: String,
    pub label: String,
    pub seed: u64,
    pub scenario_hash: String,
    pub final_regret: f64,
    pub hindsight_best_action: usize,
    pub hindsight_best_cost: f64,
    pub regret_bound: f64,
    pub within_bound: bool,
    pub wall_clock_s: f64,
    pub policy_s: f64,
    pub ledger_s: f64,
}

impl RunEntry {
    pub fn new(record: &RunRecord, file: String, bound: f64) -> Self {
        let t = &record.timings;
        Self {
            file,
            label: record.label.clone(),
            seed: record.seed,
            scenario_hash: record.scenario_hash.clone(),
            final_regret: record.final_regret(),
            hindsight_best_action: record.hindsight_best.0,
            hindsight_best_cost: record.hindsight_best.1,
            regret_bound: bound,
            within_bound: record.final_regret() <= bound,
            wall_clock_s: (t.scenario + t.policy + t.ledger).as_secs_f64(),
            policy_s: t.policy.as_secs_f64(),
            ledger_s: t.ledger.as_secs_f64(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub artifact_version: String,
    pub theta: f64,
    pub action_space_size: usize,
    pub bound_delta: f64,
    /// Zero when the horizon is zero.
    pub regret_bound: f64,
    pub config: ExperimentConfig,
    pub runs: Vec<RunEntry>,
}

impl Manifest {
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(MANIFEST_FILE);
        let text = toml::to_string(self)
            .map_err(|e| Error::Runtime(format!("serializing manifest: {e}")))?;
        let mut file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        file.write_all(text.as_bytes())
            .map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text)
            .map_err(|e| Error::Runtime(format!("{}: {}", path.display(), e.message())))
    }

    /// Manifest entries keyed by CSV file name.
    pub fn runs_by_file(&self) -> BTreeMap<&str, &RunEntry> {
        self.runs.iter().map(|r| (r.file.as_str(), r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_fields() {
        assert_eq!(join(&[1, 5, 3]), "1;5;3");
        assert_eq!(split("1;5;3").unwrap(), vec![1, 5, 3]);
        assert!(split("1;x").is_err());
    }
}
