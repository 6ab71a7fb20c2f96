use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use super::config::{
    ExperimentConfig, ResolvedConfig, DEFAULT_CONVERGENCE_THRESHOLD, DEFAULT_CONVERGENCE_WINDOW,
};
use super::persist::{csv_file_name, read_csv, write_csv, Manifest, RunEntry, MANIFEST_FILE};
use crate::error::{Error, Result};
use crate::ew_policy::default_eta;
use crate::harness::{first_sustained_crossing, regret_bound, PolicySpec};
use crate::ARTIFACT_VERSION;

fn bound_for(resolved: &ResolvedConfig, delta: f64) -> Result<f64> {
    let exp = &resolved.experiment;
    if exp.horizon == 0 {
        return Ok(0.0);
    }
    regret_bound(exp.horizon, exp.theta(), exp.space_size(), delta)
}

/// Runs every (policy, seed) pair of the config and writes one CSV per run
/// plus the manifest. Returns the manifest path.
pub fn cmd_run(
    config_path: &Path,
    seeds: &[u64],
    outdir: Option<&Path>,
    out: &mut dyn Write,
) -> Result<PathBuf> {
    let mut config = ExperimentConfig::load(config_path)?;
    if !seeds.is_empty() {
        config.seeds = seeds.to_vec();
    }
    if let Some(dir) = outdir {
        config.output_dir = dir.to_path_buf();
    }
    let resolved = config.resolve()?;
    let bound = bound_for(&resolved, resolved.bound_delta)?;
    let dir = resolved.config.output_dir.clone();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;

    let jobs: Vec<(&PolicySpec, u64)> = resolved
        .policies
        .iter()
        .flat_map(|p| resolved.config.seeds.iter().map(move |&s| (p, s)))
        .collect();
    let evaluator = resolved.config.evaluator;
    let entries = jobs
        .par_iter()
        .map(|&(policy, seed)| {
            let clock = Instant::now();
            let record = resolved.experiment.run(policy, seed, evaluator)?;
            let file = csv_file_name(&record.label, seed);
            write_csv(&dir.join(&file), &record)?;
            let mut entry = RunEntry::new(&record, file, bound);
            entry.wall_clock_s = entry.wall_clock_s.max(clock.elapsed().as_secs_f64());
            Ok(entry)
        })
        .collect::<Result<Vec<_>>>()?;

    let manifest = Manifest {
        artifact_version: ARTIFACT_VERSION.to_string(),
        theta: resolved.experiment.theta(),
        action_space_size: resolved.experiment.space_size(),
        bound_delta: resolved.bound_delta,
        regret_bound: bound,
        config: resolved.config.clone(),
        runs: entries,
    };
    let path = manifest.write(&dir)?;
    let io = |e| Error::io("<stdout>", e);
    for e in &manifest.runs {
        writeln!(
            out,
            "{}: final regret {:.4} (bound {:.4}), {:.3} s",
            e.file, e.final_regret, e.regret_bound, e.wall_clock_s
        )
        .map_err(io)?;
    }
    writeln!(out, "manifest written to {}", path.display()).map_err(io)?;
    Ok(path)
}

/// One line of the comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub file: String,
    pub label: Option<String>,
    pub seed: Option<u64>,
    pub final_regret: f64,
    pub delta_vs_first: f64,
    pub converged_at: Option<usize>,
    pub wall_clock_s: Option<f64>,
    pub regret_bound: Option<f64>,
    pub within_bound: Option<bool>,
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), T::to_string)
}

/// Summarizes runs over the same request sequence. Files on different
/// sequences are a validation error.
pub fn compare(files: &[PathBuf]) -> Result<Vec<ComparisonRow>> {
    if files.len() < 2 {
        return Err(Error::Config("compare: at least two run files are required".into()));
    }
    let mut rows = Vec::with_capacity(files.len());
    let mut reference: Option<(String, f64)> = None;
    for path in files {
        let run = read_csv(path)?;
        let hash = run.scenario_hash();
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let manifest_path = path.parent().unwrap_or(Path::new(".")).join(MANIFEST_FILE);
        let manifest = if manifest_path.exists() {
            Some(Manifest::load(&manifest_path)?)
        } else {
            None
        };
        let entry = manifest
            .as_ref()
            .and_then(|m| m.runs.iter().find(|r| r.file == name).cloned());
        if let Some(e) = &entry {
            if e.scenario_hash != hash {
                return Err(Error::Config(format!(
                    "{}: request column does not match the manifest's scenario hash",
                    path.display()
                )));
            }
        }
        let (threshold, window) = manifest.as_ref().map_or(
            (DEFAULT_CONVERGENCE_THRESHOLD, DEFAULT_CONVERGENCE_WINDOW),
            |m| {
                (
                    m.config
                        .convergence_threshold
                        .unwrap_or(DEFAULT_CONVERGENCE_THRESHOLD),
                    m.config.convergence_window.unwrap_or(DEFAULT_CONVERGENCE_WINDOW),
                )
            },
        );
        let final_regret = run.final_regret();
        let first_regret = match &reference {
            None => {
                reference = Some((hash, final_regret));
                final_regret
            }
            Some((h, r)) => {
                if *h != hash {
                    return Err(Error::Config(format!(
                        "{}: scenario differs from {}; runs are not comparable",
                        path.display(),
                        files[0].display()
                    )));
                }
                *r
            }
        };
        rows.push(ComparisonRow {
            file: path.display().to_string(),
            label: entry.as_ref().map(|e| e.label.clone()),
            seed: entry.as_ref().map(|e| e.seed),
            final_regret,
            delta_vs_first: final_regret - first_regret,
            converged_at: first_sustained_crossing(&run.p_dist, threshold, window),
            wall_clock_s: entry.as_ref().map(|e| e.wall_clock_s),
            regret_bound: entry.as_ref().map(|e| e.regret_bound),
            within_bound: entry.as_ref().map(|e| e.within_bound),
        });
    }
    Ok(rows)
}

const COMPARE_COLUMNS: [&str; 9] = [
    "file",
    "label",
    "seed",
    "final_regret",
    "delta_vs_first",
    "converged_at",
    "wall_clock_s",
    "regret_bound",
    "within_bound",
];

fn row_fields(r: &ComparisonRow) -> [String; 9] {
    [
        r.file.clone(),
        opt(&r.label),
        opt(&r.seed),
        r.final_regret.to_string(),
        r.delta_vs_first.to_string(),
        opt(&r.converged_at),
        opt(&r.wall_clock_s),
        opt(&r.regret_bound),
        opt(&r.within_bound.map(|b| if b { "pass" } else { "fail" })),
    ]
}

pub fn cmd_compare(files: &[PathBuf], csv_out: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let rows = compare(files)?;
    let table: Vec<[String; 9]> = rows.iter().map(row_fields).collect();
    let mut widths = COMPARE_COLUMNS.map(str::len);
    for fields in &table {
        for (w, f) in widths.iter_mut().zip(fields) {
            *w = (*w).max(f.len());
        }
    }
    let io = |e| Error::io("<stdout>", e);
    let line = |fields: &[String]| {
        fields
            .iter()
            .zip(&widths)
            .map(|(f, w)| format!("{f:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let header: Vec<String> = COMPARE_COLUMNS.iter().map(|s| s.to_string()).collect();
    writeln!(out, "{}", line(&header)).map_err(io)?;
    for fields in &table {
        writeln!(out, "{}", line(fields)).map_err(io)?;
    }
    if let Some(path) = csv_out {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(COMPARE_COLUMNS)?;
        for fields in &table {
            w.write_record(fields)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

pub fn cmd_bound(config_path: &Path, delta: Option<f64>, out: &mut dyn Write) -> Result<()> {
    let resolved = ExperimentConfig::load(config_path)?.resolve()?;
    let delta = delta.unwrap_or(resolved.bound_delta);
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Config(format!("--delta: must lie in (0, 1), got {delta}")));
    }
    let exp = &resolved.experiment;
    let bound = regret_bound(exp.horizon, exp.theta(), exp.space_size(), delta)?;
    let io = |e| Error::io("<stdout>", e);
    writeln!(out, "theta = {}", exp.theta()).map_err(io)?;
    writeln!(out, "action_space_size = {}", exp.space_size()).map_err(io)?;
    writeln!(out, "horizon = {}", exp.horizon).map_err(io)?;
    writeln!(out, "eta = {}", default_eta(exp.space_size(), exp.horizon)).map_err(io)?;
    for spec in &resolved.policies {
        match spec {
            PolicySpec::EwFull { eta }
            | PolicySpec::EwDiscounted { eta, .. }
            | PolicySpec::EwExplore { eta, .. } => {
                writeln!(out, "eta[{}] = {eta}", spec.label()).map_err(io)?;
            }
            PolicySpec::RlBandit { .. } => {}
        }
    }
    writeln!(out, "delta = {delta}").map_err(io)?;
    writeln!(out, "regret_bound = {bound}").map_err(io)?;
    Ok(())
}
