use crate::args::Format;
use crate::error::{CliError, CliResult};
use crate::manifest::{RunManifest, Status};
use crate::table::{Cell, Table};
use rayon::prelude::*;
use std::path::{Path, PathBuf};
use std::time::Instant;
use teleport_core::optimize::Winner;

/// `n` points log-spaced over `[a, b]`, endpoints exact.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => {
            let (la, lb) = (a.log10(), b.log10());
            (0..n)
                .map(|i| match i {
                    0 => a,
                    i if i == n - 1 => b,
                    i => 10f64.powf(la + (lb - la) * i as f64 / (n - 1) as f64),
                })
                .collect()
        }
    }
}

pub type RowResult = Result<Vec<Cell>, String>;

/// Evaluates every point on the worker pool; results come back in grid order.
pub fn evaluate<P, F>(points: &[P], f: F) -> Vec<RowResult>
where
    P: Sync,
    F: Fn(&P) -> CliResult<Vec<Cell>> + Sync,
{
    points.par_iter().map(|p| f(p).map_err(|e| e.to_string())).collect()
}

pub fn converged(what: &str, error: f64, tol: f64) -> CliResult<()> {
    if error <= tol {
        Ok(())
    } else {
        Err(CliError::Check(format!("{what}: integration error {error:.3e} above tolerance {tol:.3e}")))
    }
}

pub fn winner_label(w: Winner) -> &'static str {
    match w {
        Winner::VbkDominant => "vbk_dominant",
        Winner::ArDominantOverBenchmark => "ar_over_benchmark",
        Winner::BelowBenchmark => "below_benchmark",
        Winner::Tie => "tie",
    }
}

/// Data file plus manifest (and optional SVG) for one gridded run. If any
/// point failed, the successful rows go to `<stem>.partial.<ext>` instead and
/// the manifest is marked partial.
pub struct GridOutput<'a> {
    pub dir: &'a Path,
    pub stem: &'a str,
    pub format: Format,
    pub started: Instant,
}

impl GridOutput<'_> {
    fn path(&self, suffix: &str) -> PathBuf {
        self.dir.join(format!("{}{suffix}", self.stem))
    }

    pub fn write(&self, mut table: Table, results: Vec<RowResult>, svg: Option<String>, mut manifest: RunManifest) -> CliResult<Table> {
        std::fs::create_dir_all(self.dir)?;
        let total = results.len();
        let mut failures = Vec::new();
        for (i, r) in results.into_iter().enumerate() {
            match r {
                Ok(row) => table.rows.push(row),
                Err(e) => failures.push(format!("point {i}: {e}")),
            }
        }
        let ext = match self.format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        let body = match self.format {
            Format::Csv => table.to_csv(),
            Format::Json => serde_json::to_string_pretty(&table.to_json())? + "\n",
        };
        manifest.data_schema = Some(table.schema.clone());
        let data = if failures.is_empty() {
            let _ = std::fs::remove_file(self.path(&format!(".partial.{ext}")));
            self.path(&format!(".{ext}"))
        } else {
            manifest.status = Status::Partial;
            self.path(&format!(".partial.{ext}"))
        };
        std::fs::write(&data, body)?;
        manifest.outputs.push(file_name(&data));
        if let Some(svg) = svg.filter(|_| failures.is_empty()) {
            let p = self.path(".svg");
            std::fs::write(&p, svg)?;
            manifest.outputs.push(file_name(&p));
        }
        manifest.wall_time_s = self.started.elapsed().as_secs_f64();
        manifest.write(&self.path(".manifest.json"))?;
        if let Some(first) = failures.first() {
            return Err(CliError::Partial {
                failed: failures.len(),
                total,
                first: first.clone(),
                marker: data,
            });
        }
        Ok(table)
    }
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_space_endpoints() {
        let v = log_space(1e-3, 10.0, 25);
        assert_eq!(v.len(), 25);
        assert_eq!((v[0], v[24]), (1e-3, 10.0));
        assert!((v[6] - 1e-2).abs() < 1e-15);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(log_space(2.0, 5.0, 1), vec![2.0]);
    }

    #[test]
    fn failed_points_leave_a_partial_marker() {
        let dir = std::env::temp_dir().join(format!("teleport-grid-{}", std::process::id()));
        let out = GridOutput {
            dir: &dir,
            stem: "t",
            format: Format::Csv,
            started: Instant::now(),
        };
        let table = Table::new("t/1", vec!["x"]);
        let err = out.write(table.clone(), vec![Ok(vec![Cell::Num(1.0)]), Err("boom".into())], None, RunManifest::new("t")).unwrap_err();
        assert!(matches!(err, CliError::Partial { failed: 1, total: 2, .. }));
        assert!(dir.join("t.partial.csv").exists() && !dir.join("t.csv").exists());
        assert_eq!(RunManifest::read(&dir.join("t.manifest.json")).unwrap().status, Status::Partial);

        out.write(table, vec![Ok(vec![Cell::Num(1.0)])], None, RunManifest::new("t")).unwrap();
        assert!(!dir.join("t.partial.csv").exists() && dir.join("t.csv").exists());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
