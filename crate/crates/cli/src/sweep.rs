//! Rectangular sweeps. Finished points are appended to
//! `<name>.checkpoint.jsonl` as they complete; a rerun with an identical
//! manifest fingerprint reuses them. The checkpoint is removed once the full
//! table has been written.

use crate::error::{CliError, CliResult};
use crate::grid::{converged, GridOutput, RowResult};
use crate::manifest::RunManifest;
use crate::table::{Cell, Table};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;
use teleport_core::ensemble::{mean_fidelity_ar, resource_accounting};
use teleport_core::optimize::{benchmark_for, optimize_vbk, OptimizerSettings, ResourceConstraint, Search};
use teleport_core::Prior;

pub const AR_COLUMNS: [&str; 9] = [
    "lambda",
    "beta",
    "branches",
    "mean_fidelity",
    "mean_success_prob",
    "naive_cost",
    "benchmark",
    "integration_error",
    "classification",
];

pub const VBK_COLUMNS: [&str; 14] = [
    "lambda",
    "beta",
    "constraint",
    "budget",
    "gain_setting",
    "mean_fidelity",
    "gain",
    "r",
    "phi_zeta",
    "delta",
    "theta",
    "benchmark",
    "integration_error",
    "classification",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Ar {
        lambda: Option<f64>,
        beta: f64,
        branches: usize,
    },
    Vbk {
        lambda: Option<f64>,
        beta: f64,
        constraint: ResourceConstraint,
        gain: Option<f64>,
    },
}

fn prior(lambda: Option<f64>, beta: f64) -> CliResult<Prior> {
    Ok(match lambda {
        Some(l) => Prior::general(l, beta)?,
        None => Prior::squeezed(beta)?,
    })
}

fn versus_benchmark(value: f64, error: f64, bench: f64) -> &'static str {
    if (value - bench).abs() <= 2.0 * error {
        "tie"
    } else if value > bench {
        "above_benchmark"
    } else {
        "below_benchmark"
    }
}

pub fn evaluate_point(p: &Point, search: Search, settings: &OptimizerSettings, tol: f64) -> CliResult<Vec<Cell>> {
    match *p {
        Point::Ar { lambda, beta, branches } => {
            let pr = prior(lambda, beta)?;
            let rep = mean_fidelity_ar(&pr, branches)?;
            converged("AR average", rep.integration_error, tol)?;
            let (_, naive) = resource_accounting(&rep, branches)?;
            let bench = benchmark_for(&pr);
            Ok(vec![
                lambda.into(),
                beta.into(),
                branches.into(),
                rep.mean_fidelity.into(),
                rep.mean_success_prob.into(),
                naive.into(),
                bench.into(),
                rep.integration_error.into(),
                versus_benchmark(rep.mean_fidelity, rep.integration_error, bench).into(),
            ])
        }
        Point::Vbk { lambda, beta, constraint, gain } => {
            let pr = prior(lambda, beta)?;
            let s = OptimizerSettings {
                frozen_gain: gain,
                ..*settings
            };
            let opt = optimize_vbk(&pr, &constraint, search, &s)?;
            converged("VBK average", opt.integration_error, tol)?;
            let bench = benchmark_for(&pr);
            let kind = match constraint {
                ResourceConstraint::FixedEntropy(_) => "ebits",
                ResourceConstraint::FixedEnergy(_) => "energy",
            };
            Ok(vec![
                lambda.into(),
                beta.into(),
                kind.into(),
                constraint.value().into(),
                gain.into(),
                opt.mean_fidelity.into(),
                opt.gain.into(),
                opt.resource.r.into(),
                opt.resource.phi_zeta.into(),
                opt.resource.delta.into(),
                opt.resource.theta.into(),
                bench.into(),
                opt.integration_error.into(),
                versus_benchmark(opt.mean_fidelity, opt.integration_error, bench).into(),
            ])
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Done {
    index: usize,
    row: Vec<Cell>,
}

fn load_checkpoint(path: &Path, fingerprint: &serde_json::Value) -> HashMap<usize, Vec<Cell>> {
    let Ok(file) = std::fs::File::open(path) else {
        return HashMap::new();
    };
    let mut lines = BufReader::new(file).lines();
    let header: Option<serde_json::Value> = lines.next().and_then(|l| l.ok()).and_then(|l| serde_json::from_str(&l).ok());
    if header.as_ref() != Some(fingerprint) {
        return HashMap::new();
    }
    // a torn final line from an interrupted run is skipped
    lines
        .map_while(|l| l.ok())
        .filter_map(|l| serde_json::from_str::<Done>(&l).ok())
        .map(|d| (d.index, d.row))
        .collect()
}

pub struct Sweep<'a> {
    pub points: Vec<Point>,
    pub search: Search,
    pub settings: OptimizerSettings,
    pub tol: f64,
    pub output: GridOutput<'a>,
}

impl Sweep<'_> {
    /// Returns the table and the number of points taken from a checkpoint.
    pub fn run(self, manifest: RunManifest) -> CliResult<(Table, usize)> {
        if self.points.is_empty() {
            return Err(CliError::Usage("the sweep grid is empty".into()));
        }
        let columns = match self.points[0] {
            Point::Ar { .. } => AR_COLUMNS.to_vec(),
            Point::Vbk { .. } => VBK_COLUMNS.to_vec(),
        };
        let table = Table::new(format!("sweep-{}/1", if columns.len() == AR_COLUMNS.len() { "ar" } else { "vbk" }), columns);
        let mut manifest = manifest;
        manifest.data_schema = Some(table.schema.clone());
        std::fs::create_dir_all(self.output.dir)?;
        let ckpt = self.output.dir.join(format!("{}.checkpoint.jsonl", self.output.stem));
        let fingerprint = manifest.fingerprint();
        let done = load_checkpoint(&ckpt, &fingerprint);
        let resumed = done.len();
        if resumed == 0 {
            std::fs::write(&ckpt, serde_json::to_string(&fingerprint)? + "\n")?;
        }
        let log = Mutex::new(OpenOptions::new().append(true).open(&ckpt)?);

        let results: Vec<RowResult> = self
            .points
            .par_iter()
            .enumerate()
            .map(|(index, p)| {
                if let Some(row) = done.get(&index) {
                    return Ok(row.clone());
                }
                let row = evaluate_point(p, self.search, &self.settings, self.tol).map_err(|e| e.to_string())?;
                let line = serde_json::to_string(&Done { index, row: row.clone() }).map_err(|e| e.to_string())?;
                let mut f = log.lock().unwrap_or_else(|e| e.into_inner());
                writeln!(f, "{line}").and_then(|_| f.flush()).map_err(|e| e.to_string())?;
                Ok(row)
            })
            .collect();
        drop(log);
        let table = self.output.write(table, results, None, manifest)?;
        std::fs::remove_file(&ckpt)?;
        Ok((table, resumed))
    }
}
