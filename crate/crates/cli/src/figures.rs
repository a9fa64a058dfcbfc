//! Figure reproductions: fidelity curves against the squeezing width
//! (fig1–fig3), region maps over both widths (fig4–fig6, fig8) and the
//! entropy–energy relation of the resources (fig7).

use crate::args::FigureId;
use crate::error::CliResult;
use crate::grid::{converged, evaluate, log_space, winner_label, RowResult};
use crate::svg::{line_chart, region_map, Axis, Series, Style};
use crate::table::{Cell, Table};
use std::f64::consts::PI;
use teleport_core::ensemble::{benchmark_squeezed, mean_fidelity_ar};
use teleport_core::gauss::squeezing_db;
use teleport_core::optimize::{
    classify, compare_schemes, optimize_vbk, solve_constraint_r, OptimizerSettings, ResourceConstraint, Search,
};
use teleport_core::resource::tmsv_entropy;
use teleport_core::Prior;

pub const BETA_RANGE: (f64, f64) = (1e-3, 10.0);
pub const LAMBDA_RANGE: (f64, f64) = (1e-2, 10.0);
pub const ENERGY_RANGE: (f64, f64) = (1e-2, 1e3);
pub const CURVE_POINTS: usize = 25;
pub const CONTOUR_POINTS: usize = 21;
pub const ENTROPY_POINTS: usize = 61;
/// Entanglement budgets marked on the entropy–energy plot.
pub const ANCHOR_EBITS: [f64; 3] = [2.0, 3.0, 5.0];

pub const CURVE_COLUMNS: [&str; 12] = [
    "beta",
    "ar",
    "ar_success_prob",
    "vbk_unit_gain",
    "vbk_gain_tuned",
    "tuned_gain",
    "tuned_r",
    "benchmark",
    "ar_error",
    "vbk_unit_gain_error",
    "vbk_gain_tuned_error",
    "classification",
];

pub const CONTOUR_COLUMNS: [&str; 11] = [
    "lambda",
    "beta",
    "vbk_opt",
    "gain",
    "r",
    "ar",
    "ar_success_prob",
    "benchmark",
    "vbk_error",
    "ar_error",
    "classification",
];

pub const ENTROPY_COLUMNS: [&str; 6] = ["energy", "tmsv_entropy", "tmsv_r", "tmsv_db", "ar_entropy", "classification"];

pub const REGIONS: [(&str, &str); 4] = [
    ("vbk_dominant", "#2a7fb8"),
    ("ar_over_benchmark", "#f0a020"),
    ("below_benchmark", "#8c8c8c"),
    ("tie", "#ffffff"),
];

pub enum Layout {
    Curve { ebits: f64 },
    Contour { constraint: ResourceConstraint },
    Entropy,
}

pub fn layout(id: FigureId) -> Layout {
    match id {
        FigureId::Fig1 => Layout::Curve { ebits: 2.0 },
        FigureId::Fig2 => Layout::Curve { ebits: 3.0 },
        FigureId::Fig3 => Layout::Curve { ebits: 5.0 },
        FigureId::Fig4 => Layout::Contour {
            constraint: ResourceConstraint::FixedEntropy(2.0),
        },
        FigureId::Fig5 => Layout::Contour {
            constraint: ResourceConstraint::FixedEntropy(3.0),
        },
        FigureId::Fig6 => Layout::Contour {
            constraint: ResourceConstraint::FixedEntropy(5.0),
        },
        FigureId::Fig7 => Layout::Entropy,
        FigureId::Fig8 => Layout::Contour {
            constraint: ResourceConstraint::FixedEnergy(5.0),
        },
    }
}

pub fn default_points(id: FigureId) -> usize {
    match layout(id) {
        Layout::Curve { .. } => CURVE_POINTS,
        Layout::Contour { .. } => CONTOUR_POINTS,
        Layout::Entropy => ENTROPY_POINTS,
    }
}

pub struct FigureRun {
    pub table: Table,
    pub results: Vec<RowResult>,
}

/// One curve row: AR with `N = S` branches, unit-gain VBK optimized over all
/// squeezed Bell-like resources, gain-tuned VBK and the benchmark.
pub fn curve_row(beta: f64, ebits: f64, tol: f64, settings: &OptimizerSettings) -> CliResult<Vec<Cell>> {
    let prior = Prior::squeezed(beta)?;
    let constraint = ResourceConstraint::FixedEntropy(ebits);
    let ar = mean_fidelity_ar(&prior, constraint.branches()?)?;
    let tuned = optimize_vbk(&prior, &constraint, Search::GaussianOnly, settings)?;
    let unit_settings = OptimizerSettings {
        frozen_gain: Some(1.0),
        ..*settings
    };
    let unit = optimize_vbk(&prior, &constraint, Search::FullSqueezedBell, &unit_settings)?;
    let bench = benchmark_squeezed(beta);
    converged("AR average", ar.integration_error, tol)?;
    converged("VBK average", tuned.integration_error.max(unit.integration_error), tol)?;
    let w = classify(tuned.mean_fidelity, tuned.integration_error, ar.mean_fidelity, ar.integration_error, bench);
    Ok(vec![
        beta.into(),
        ar.mean_fidelity.into(),
        ar.mean_success_prob.into(),
        unit.mean_fidelity.into(),
        tuned.mean_fidelity.into(),
        tuned.gain.into(),
        tuned.resource.r.into(),
        bench.into(),
        ar.integration_error.into(),
        unit.integration_error.into(),
        tuned.integration_error.into(),
        winner_label(w).into(),
    ])
}

pub fn contour_row(lambda: f64, beta: f64, constraint: &ResourceConstraint, tol: f64, settings: &OptimizerSettings) -> CliResult<Vec<Cell>> {
    let c = compare_schemes(&Prior::general(lambda, beta)?, constraint, Search::GaussianOnly, settings)?;
    converged("AR average", c.ar.integration_error, tol)?;
    converged("VBK average", c.vbk.integration_error, tol)?;
    Ok(vec![
        lambda.into(),
        beta.into(),
        c.vbk.mean_fidelity.into(),
        c.vbk.gain.into(),
        c.vbk.resource.r.into(),
        c.ar.mean_fidelity.into(),
        c.ar.mean_success_prob.into(),
        c.benchmark.into(),
        c.vbk.integration_error.into(),
        c.ar.integration_error.into(),
        winner_label(c.winner).into(),
    ])
}

/// TMSV at mean photon number `E`: `E = 2 sinh² r`. AR spends one photon per ebit.
pub fn entropy_row(energy: f64, label: &str) -> Vec<Cell> {
    let r = (0.5 * energy).sqrt().asinh();
    vec![
        energy.into(),
        tmsv_entropy(r).into(),
        r.into(),
        squeezing_db(r).into(),
        energy.into(),
        label.into(),
    ]
}

pub fn compute(id: FigureId, points: usize, tol: f64, settings: &OptimizerSettings) -> CliResult<FigureRun> {
    let schema = format!("{}/1", id.name());
    Ok(match layout(id) {
        Layout::Curve { ebits } => {
            let betas = log_space(BETA_RANGE.0, BETA_RANGE.1, points);
            FigureRun {
                table: Table::new(schema, CURVE_COLUMNS.to_vec()),
                results: evaluate(&betas, |&b| curve_row(b, ebits, tol, settings)),
            }
        }
        Layout::Contour { constraint } => {
            let lambdas = log_space(LAMBDA_RANGE.0, LAMBDA_RANGE.1, points);
            let betas = log_space(BETA_RANGE.0, BETA_RANGE.1, points);
            let cells: Vec<(f64, f64)> = lambdas.iter().flat_map(|&l| betas.iter().map(move |&b| (l, b))).collect();
            FigureRun {
                table: Table::new(schema, CONTOUR_COLUMNS.to_vec()),
                results: evaluate(&cells, |&(l, b)| contour_row(l, b, &constraint, tol, settings)),
            }
        }
        Layout::Entropy => {
            let mut results: Vec<RowResult> = log_space(ENERGY_RANGE.0, ENERGY_RANGE.1, points)
                .into_iter()
                .map(|e| Ok(entropy_row(e, "curve")))
                .collect();
            for s in ANCHOR_EBITS {
                let row = solve_constraint_r(PI, 0.0, 0.0, &ResourceConstraint::FixedEntropy(s))
                    .map(|r| entropy_row(2.0 * r.sinh().powi(2), &format!("anchor_{s}_ebits")))
                    .map_err(|e| e.to_string());
                results.push(row);
            }
            FigureRun {
                table: Table::new(schema, ENTROPY_COLUMNS.to_vec()),
                results,
            }
        }
    })
}

fn series(table: &Table, x: &str, y: &str, name: &str, color: &'static str, style: Style) -> Series {
    let points = table.values(x).into_iter().zip(table.values(y)).filter_map(|(a, b)| Some((a?, b?))).collect();
    Series {
        name: name.into(),
        color,
        style,
        points,
    }
}

pub fn render(id: FigureId, table: &Table) -> String {
    let beta_axis = Axis { label: "β", log: true };
    match layout(id) {
        Layout::Curve { ebits } => line_chart(
            &format!("Average fidelity, squeezed inputs, S = {ebits} ebits"),
            beta_axis,
            Axis { label: "mean fidelity", log: false },
            &[
                series(table, "beta", "ar", "AR", "#c000c0", Style::Squares),
                series(table, "beta", "vbk_unit_gain", "VBK, g = 1", "#2ca02c", Style::Dashed),
                series(table, "beta", "vbk_gain_tuned", "VBK, tuned g", "#d62728", Style::Circles),
                series(table, "beta", "benchmark", "benchmark", "black", Style::Solid),
            ],
        ),
        Layout::Contour { constraint } => {
            let lambdas = dedup(table.values("lambda"));
            let betas = dedup(table.values("beta"));
            let fid = table.values("vbk_opt");
            let cls = table.column("classification").unwrap();
            let (lo, hi) = fid.iter().flatten().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
            let cells: Vec<Vec<(usize, f64)>> = (0..lambdas.len())
                .map(|i| {
                    (0..betas.len())
                        .map(|j| {
                            let k = i * betas.len() + j;
                            let class = match &table.rows[k][cls] {
                                Cell::Text(t) => REGIONS.iter().position(|r| r.0 == t).unwrap_or(3),
                                _ => 3,
                            };
                            let shade = fid[k].map_or(0.0, |v| if hi > lo { (v - lo) / (hi - lo) } else { 1.0 });
                            (class, shade)
                        })
                        .collect()
                })
                .collect();
            let budget = match constraint {
                ResourceConstraint::FixedEntropy(s) => format!("S = {s} ebits"),
                ResourceConstraint::FixedEnergy(e) => format!("E = {e} units"),
            };
            region_map(
                &format!("Gain-optimized VBK, {budget}"),
                beta_axis,
                Axis { label: "λ", log: true },
                &betas,
                &lambdas,
                &cells,
                &REGIONS,
            )
        }
        Layout::Entropy => {
            let mut curve = table.clone();
            let cls = curve.column("classification").unwrap();
            curve.rows.retain(|r| r[cls] == Cell::Text("curve".into()));
            // keep the AR line on the scale of the TMSV curve
            let top = 1.2 * curve.values("tmsv_entropy").into_iter().flatten().fold(0.0, f64::max);
            let mut ar = curve.clone();
            let col = ar.column("ar_entropy").unwrap();
            ar.rows.retain(|r| r[col].as_f64().is_some_and(|s| s <= top));
            let mut anchors = table.clone();
            anchors.rows.retain(|r| r[cls] != Cell::Text("curve".into()));
            line_chart(
                "Entanglement entropy against mean energy",
                Axis { label: "E (units)", log: true },
                Axis { label: "S (ebits)", log: false },
                &[
                    series(&ar, "energy", "ar_entropy", "AR", "black", Style::Dashed),
                    series(&curve, "energy", "tmsv_entropy", "TMSV", "#d62728", Style::Solid),
                    series(&anchors, "energy", "tmsv_entropy", "S = 2, 3, 5", "#1f77b4", Style::Crosses),
                ],
            )
        }
    }
}

/// Distinct values in first-seen order.
fn dedup(v: Vec<Option<f64>>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for x in v.into_iter().flatten() {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}
