use crate::args::{
    AverageArgs, BenchmarkKind, Cli, Command, Common, FidelityArgs, FigureId, Format, InputArgs, MethodArg, OptimizeArgs, OracleAction,
    ResourceArgs, SchemeArg, SearchArg, SweepArgs,
};
use crate::error::{usage, CliError, CliResult};
use crate::figures;
use crate::grid::GridOutput;
use crate::manifest::RunManifest;
use crate::oracle;
use crate::sweep::{Point, Sweep};
use crate::table::format_number;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;
use teleport_core::ar::ar_fidelity;
use teleport_core::ensemble::{
    benchmark_general, benchmark_squeezed, mc_mean_fidelity_ar, mc_mean_fidelity_vbk, mean_fidelity_ar, mean_fidelity_vbk, resource_accounting,
    TARGET_REL_ERROR,
};
use teleport_core::fock::{oracle_ar_teleport, oracle_vbk_teleport, OracleVbkSettings, TruncationPolicy};
use teleport_core::optimize::{compare_schemes, optimize_vbk, solve_constraint_r, OptimizerSettings, ResourceConstraint, Search};
use teleport_core::vbk::{vbk_fidelity, vbk_fidelity_quadrature, VbkConfig};
use teleport_core::{GaussianPure, Prior, SqueezedBellResource};

/// Default largest accepted integration error of gridded runs.
pub const DEFAULT_TOL: f64 = 1e-3;

fn single<T: Copy>(name: &str, v: &[T]) -> CliResult<Option<T>> {
    match v {
        [] => Ok(None),
        [x] => Ok(Some(*x)),
        _ => usage(format!("--{name} takes a single value here")),
    }
}

fn required<T: Copy>(name: &str, v: &[T]) -> CliResult<T> {
    single(name, v)?.ok_or_else(|| CliError::Usage(format!("--{name} is required")))
}

impl Common {
    pub fn prior(&self) -> CliResult<Prior> {
        let beta = required("beta", &self.beta)?;
        Ok(match single("lambda", &self.lambda)? {
            Some(l) => Prior::general(l, beta)?,
            None => Prior::squeezed(beta)?,
        })
    }

    pub fn constraint(&self) -> CliResult<Option<ResourceConstraint>> {
        match (single("ebits", &self.ebits)?, single("energy", &self.energy)?) {
            (Some(_), Some(_)) => usage("give either --ebits or --energy, not both"),
            (Some(s), None) => Ok(Some(ResourceConstraint::FixedEntropy(s))),
            (None, Some(e)) => Ok(Some(ResourceConstraint::FixedEnergy(e))),
            (None, None) => Ok(None),
        }
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_TOL)
    }

    fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }

    fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}

fn search(s: SearchArg) -> Search {
    match s {
        SearchArg::Gaussian => Search::GaussianOnly,
        SearchArg::Full => Search::FullSqueezedBell,
    }
}

fn input_state(a: &InputArgs) -> GaussianPure {
    GaussianPure::new(Complex64::new(a.alpha_re, a.alpha_im), a.squeezing, a.squeeze_phase)
}

fn resource(a: &ResourceArgs, common: &Common) -> CliResult<SqueezedBellResource> {
    let r = match (a.r, common.constraint()?) {
        (Some(_), Some(_)) => return usage("give either --r or a budget (--ebits/--energy), not both"),
        (Some(r), None) => r,
        (None, Some(c)) => solve_constraint_r(a.phi_zeta, a.delta, a.theta, &c)?,
        (None, None) => return usage("the resource needs --r, --ebits or --energy"),
    };
    Ok(SqueezedBellResource::new(r, a.phi_zeta, a.delta, a.theta)?)
}

fn gain(common: &Common) -> CliResult<f64> {
    Ok(single("gain", &common.gain)?.unwrap_or(1.0))
}

/// Prints a scalar result (plain text or JSON) and, with `--out`, stores the
/// JSON next to its manifest.
fn emit(out: &mut dyn Write, common: &Common, stem: &str, text: String, value: Value, manifest: RunManifest, started: Instant) -> CliResult<()> {
    match common.format {
        Some(Format::Json) => writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?,
        _ => writeln!(out, "{text}")?,
    }
    if let Some(dir) = &common.out {
        std::fs::create_dir_all(dir)?;
        let data = dir.join(format!("{stem}.json"));
        std::fs::write(&data, serde_json::to_string_pretty(&value)? + "\n")?;
        let mut manifest = manifest;
        manifest.outputs.push(format!("{stem}.json"));
        manifest.wall_time_s = started.elapsed().as_secs_f64();
        manifest.write(&dir.join(format!("{stem}.manifest.json")))?;
    }
    Ok(())
}

fn kv(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k}: {v}")).collect::<Vec<_>>().join("\n")
}

fn num(x: f64) -> String {
    format_number(x)
}

fn to_value(x: impl Serialize) -> CliResult<Value> {
    Ok(serde_json::to_value(x)?)
}

pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    let mut common = cli.common;
    crate::config::load(&mut common)?;
    if let Some(n) = common.workers {
        if n == 0 {
            return usage("--workers must be at least 1");
        }
        // the global pool can only be configured once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let started = Instant::now();
    match cli.command {
        Command::Benchmark { kind } => benchmark(kind, &common, out, started),
        Command::Fidelity(a) => fidelity(&a, &common, out, started),
        Command::Average(a) => average(&a, &common, out, started),
        Command::Optimize(a) => optimize(&a, &common, out, started),
        Command::Figure { id } => figure(id, &common, out, started),
        Command::Sweep(a) => sweep(&a, &common, out, started),
        Command::Oracle {
            action: OracleAction::Check { cases },
        } => oracle_check(cases, &common, out, started),
    }
}

fn benchmark(kind: BenchmarkKind, common: &Common, out: &mut dyn Write, started: Instant) -> CliResult<()> {
    let beta = required("beta", &common.beta)?;
    let (value, lambda, name) = match kind {
        BenchmarkKind::Squeezed => (benchmark_squeezed(beta), None, "squeezed"),
        BenchmarkKind::General => {
            let lambda = single("lambda", &common.lambda)?.ok_or_else(|| CliError::Usage("benchmark general needs --lambda".into()))?;
            (benchmark_general(lambda, beta), Some(lambda), "general")
        }
    };
    if !(beta > 0.0) || lambda.is_some_and(|l| !(l > 0.0)) {
        return usage("inverse widths must be positive");
    }
    let manifest = RunManifest::new(format!("benchmark {name}")).param("beta", beta).param("lambda", lambda);
    let value_json = json!({ "kind": name, "beta": beta, "lambda": lambda, "benchmark": value });
    emit(out, common, "benchmark", value.to_string(), value_json, manifest, started)
}

fn fidelity(a: &FidelityArgs, common: &Common, out: &mut dyn Write, started: Instant) -> CliResult<()> {
    let input = input_state(&a.input);
    let report = match a.scheme {
        SchemeArg::Ar => {
            let n = required("branches", &common.branches)?;
            match a.method {
                MethodArg::Moments => ar_fidelity(&input, n)?,
                MethodArg::Oracle => oracle_ar_teleport(&input, n, &TruncationPolicy::with_cutoff(a.cutoff)?)?,
                MethodArg::Quadrature => return usage("the AR scheme has moments (analytic) and oracle methods only"),
            }
        }
        SchemeArg::Vbk => {
            let res = resource(&a.resource, common)?;
            let cfg = VbkConfig::new(gain(common)?)?;
            match a.method {
                MethodArg::Moments => vbk_fidelity(&input, &res, &cfg)?,
                MethodArg::Quadrature => vbk_fidelity_quadrature(&input, &res, &cfg)?,
                MethodArg::Oracle => oracle_vbk_teleport(
                    &input,
                    &res,
                    cfg.gain,
                    &TruncationPolicy::with_cutoff(a.cutoff)?,
                    &OracleVbkSettings::default(),
                )?,
            }
        }
    };
    let text = kv(&[
        ("fidelity", num(report.fidelity)),
        ("success_prob", num(report.success_prob)),
        ("entropy_ebits", num(report.entropy_ebits)),
        ("energy_units", num(report.energy_units)),
        ("error_estimate", num(report.error_estimate)),
    ]);
    let manifest = RunManifest::new(format!("fidelity {:?}", a.scheme).to_lowercase())
        .param("input", input)
        .param("method", format!("{:?}", a.method).to_lowercase())
        .param("resource", report.resource)
        .param("gain", report.gain)
        .param("branches", report.branches)
        .param("cutoff", a.cutoff);
    emit(out, common, "fidelity", text, to_value(&report)?, manifest, started)
}

fn average(a: &AverageArgs, common: &Common, out: &mut dyn Write, started: Instant) -> CliResult<()> {
    let prior = common.prior()?;
    let seed = common.seed.unwrap_or(0);
    let mut manifest = RunManifest::new(format!("average {:?}", a.scheme).to_lowercase())
        .param("prior", prior)
        .param("samples", a.samples)
        .tolerance("relative_integration_error", TARGET_REL_ERROR);
    let (report, extra) = match a.scheme {
        SchemeArg::Ar => {
            let n = required("branches", &common.branches)?;
            let rep = match a.samples {
                Some(m) => mc_mean_fidelity_ar(&prior, n, m, seed)?,
                None => mean_fidelity_ar(&prior, n)?,
            };
            let (pragmatic, naive) = resource_accounting(&rep, n)?;
            manifest = manifest.param("branches", n);
            (rep, json!({ "branches": n, "pragmatic_cost": pragmatic, "naive_cost": naive }))
        }
        SchemeArg::Vbk => {
            let res = resource(&a.resource, common)?;
            let cfg = VbkConfig::new(gain(common)?)?;
            let rep = match a.samples {
                Some(m) => mc_mean_fidelity_vbk(&prior, &res, &cfg, m, seed)?,
                None => mean_fidelity_vbk(&prior, &res, &cfg)?,
            };
            manifest = manifest.param("resource", res).param("gain", cfg.gain);
            (rep, json!({ "resource": res, "gain": cfg.gain }))
        }
    };
    if a.samples.is_some() {
        manifest.seed = Some(seed);
    }
    let mut value = to_value(report)?;
    if let (Value::Object(m), Value::Object(e)) = (&mut value, extra) {
        m.extend(e);
    }
    let mut lines = vec![
        ("mean_fidelity", num(report.mean_fidelity)),
        ("mean_success_prob", num(report.mean_success_prob)),
        ("integration_error", num(report.integration_error)),
    ];
    if let Some(naive) = value.get("naive_cost").and_then(Value::as_f64) {
        lines.push(("naive_cost", num(naive)));
    }
    emit(out, common, "average", kv(&lines), value, manifest, started)
}

fn optimizer_settings(common: &Common) -> CliResult<OptimizerSettings> {
    let mut s = OptimizerSettings::default();
    if let Some(g) = common.grid {
        if g == 0 {
            return usage("--grid must be at least 1");
        }
        s.delta_points = g;
        s.theta_points = g;
    }
    if let Some(t) = common.tol {
        s.fidelity_tol = t;
    }
    s.frozen_gain = single("gain", &common.gain)?;
    Ok(s)
}

fn optimize(a: &OptimizeArgs, common: &Common, out: &mut dyn Write, started: Instant) -> CliResult<()> {
    let prior = common.prior()?;
    let constraint = common.constraint()?.ok_or_else(|| CliError::Usage("optimize needs --ebits or --energy".into()))?;
    let settings = optimizer_settings(common)?;
    let mode = search(a.search);
    let manifest = RunManifest::new("optimize")
        .param("prior", prior)
        .param("constraint", constraint)
        .param("search", mode)
        .param("settings", settings)
        .tolerance("fidelity_tol", settings.fidelity_tol)
        .tolerance("relative_integration_error", TARGET_REL_ERROR);
    // with an integer budget the AR scheme with that many branches is reported too
    let (opt, extra) = if constraint.branches().is_ok() {
        let c = compare_schemes(&prior, &constraint, mode, &settings)?;
        let extra = json!({ "ar": c.ar, "benchmark": c.benchmark, "winner": crate::grid::winner_label(c.winner) });
        (c.vbk, extra)
    } else {
        let opt = optimize_vbk(&prior, &constraint, mode, &settings)?;
        (opt, json!({ "benchmark": teleport_core::optimize::benchmark_for(&prior) }))
    };
    let mut lines = vec![
        ("mean_fidelity", num(opt.mean_fidelity)),
        ("gain", num(opt.gain)),
        ("r", num(opt.resource.r)),
        ("phi_zeta", num(opt.resource.phi_zeta)),
        ("delta", num(opt.resource.delta)),
        ("theta", num(opt.resource.theta)),
        ("constraint_residual", num(opt.constraint_residual)),
        ("benchmark", num(extra["benchmark"].as_f64().unwrap_or(f64::NAN))),
    ];
    if let Some(f) = extra["ar"]["mean_fidelity"].as_f64() {
        lines.push(("ar_mean_fidelity", num(f)));
        lines.push(("winner", extra["winner"].as_str().unwrap_or_default().to_string()));
    }
    let mut value = to_value(&opt)?;
    if let (Value::Object(m), Value::Object(e)) = (&mut value, extra) {
        m.extend(e);
    }
    emit(out, common, "optimize", kv(&lines), value, manifest, started)
}

fn figure(id: FigureId, common: &Common, out: &mut dyn Write, started: Instant) -> CliResult<()> {
    let points = common.grid.unwrap_or_else(|| figures::default_points(id));
    if points == 0 {
        return usage("--grid must be at least 1");
    }
    let tol = common.tol();
    let settings = OptimizerSettings::default();
    let mut manifest = RunManifest::new(format!("figure {}", id.name()))
        .param("points_per_axis", points)
        .param("optimizer", settings)
        .tolerance("integration_error", tol)
        .tolerance("fidelity_tol", settings.fidelity_tol)
        .tolerance("relative_integration_error", TARGET_REL_ERROR);
    manifest = match figures::layout(id) {
        figures::Layout::Curve { ebits } => manifest.param("beta_range", figures::BETA_RANGE).param("ebits", ebits),
        figures::Layout::Contour { constraint } => manifest
            .param("beta_range", figures::BETA_RANGE)
            .param("lambda_range", figures::LAMBDA_RANGE)
            .param("constraint", constraint),
        figures::Layout::Entropy => manifest.param("energy_range", figures::ENERGY_RANGE).param("anchor_ebits", figures::ANCHOR_EBITS),
    };
    let run = figures::compute(id, points, tol, &settings)?;
    let all_ok = run.results.iter().all(Result::is_ok);
    let svg = all_ok.then(|| {
        let mut t = run.table.clone();
        t.rows = run.results.iter().filter_map(|r| r.as_ref().ok().cloned()).collect();
        figures::render(id, &t)
    });
    let dir = common.out_dir();
    let output = GridOutput {
        dir: &dir,
        stem: id.name(),
        format: common.format(),
        started,
    };
    let table = output.write(run.table, run.results, svg, manifest)?;
    writeln!(out, "{}: {} rows written to {}", id.name(), table.rows.len(), dir.display())?;
    Ok(())
}

fn sweep(a: &SweepArgs, common: &Common, out: &mut dyn Write, started: Instant) -> CliResult<()> {
    if common.beta.is_empty() {
        return usage("the sweep grid is empty: give at least one --beta");
    }
    if a.name.is_empty() || a.name.contains(['/', '\\']) {
        return usage("--name must be a plain file stem");
    }
    let lambdas: Vec<Option<f64>> = if common.lambda.is_empty() {
        vec![None]
    } else {
        common.lambda.iter().copied().map(Some).collect()
    };
    let mut points = Vec::new();
    let mut manifest = RunManifest::new(format!("sweep {:?}", a.scheme).to_lowercase())
        .param("beta", &common.beta)
        .param("lambda", &common.lambda);
    let settings = optimizer_settings_for_sweep(&OptimizerSettings::default(), common)?;
    match a.scheme {
        SchemeArg::Ar => {
            if common.branches.is_empty() {
                return usage("the sweep grid is empty: give at least one --branches");
            }
            for &l in &lambdas {
                for &b in &common.beta {
                    for &n in &common.branches {
                        points.push(Point::Ar { lambda: l, beta: b, branches: n });
                    }
                }
            }
            manifest = manifest.param("branches", &common.branches);
        }
        SchemeArg::Vbk => {
            let budgets: Vec<ResourceConstraint> = common
                .ebits
                .iter()
                .map(|&s| ResourceConstraint::FixedEntropy(s))
                .chain(common.energy.iter().map(|&e| ResourceConstraint::FixedEnergy(e)))
                .collect();
            if budgets.is_empty() {
                return usage("the sweep grid is empty: give at least one --ebits or --energy");
            }
            let gains: Vec<Option<f64>> = if common.gain.is_empty() {
                vec![None]
            } else {
                common.gain.iter().copied().map(Some).collect()
            };
            for &l in &lambdas {
                for &b in &common.beta {
                    for &c in &budgets {
                        for &g in &gains {
                            points.push(Point::Vbk {
                                lambda: l,
                                beta: b,
                                constraint: c,
                                gain: g,
                            });
                        }
                    }
                }
            }
            manifest = manifest
                .param("ebits", &common.ebits)
                .param("energy", &common.energy)
                .param("gain", &common.gain)
                .param("search", search(a.search))
                .param("optimizer", settings)
                .tolerance("fidelity_tol", settings.fidelity_tol);
        }
    }
    let tol = common.tol();
    manifest = manifest.tolerance("integration_error", tol).tolerance("relative_integration_error", TARGET_REL_ERROR);
    let dir = common.out_dir();
    let total = points.len();
    let job = Sweep {
        points,
        search: search(a.search),
        settings,
        tol,
        output: GridOutput {
            dir: &dir,
            stem: &a.name,
            format: common.format(),
            started,
        },
    };
    let (_, resumed) = job.run(manifest)?;
    writeln!(out, "{}: {total} points ({resumed} from checkpoint) written to {}", a.name, dir.display())?;
    Ok(())
}

/// Optimizer settings for sweeps: `--grid` is the grid density here too, but
/// `--tol` is the integration tolerance and `--gain` a sweep axis.
fn optimizer_settings_for_sweep(base: &OptimizerSettings, common: &Common) -> CliResult<OptimizerSettings> {
    let mut s = *base;
    if let Some(g) = common.grid {
        if g == 0 {
            return usage("--grid must be at least 1");
        }
        s.delta_points = g;
        s.theta_points = g;
    }
    Ok(s)
}

fn oracle_check(cases: usize, common: &Common, out: &mut dyn Write, started: Instant) -> CliResult<()> {
    if cases == 0 {
        return usage("--cases must be at least 1");
    }
    let seed = common.seed.unwrap_or(1);
    let summary = oracle::check(cases, seed)?;
    for line in &summary.lines {
        writeln!(out, "{line}")?;
    }
    writeln!(
        out,
        "max |ΔF| AR vs oracle {} (tol {}), VBK moments vs quadrature {} and vs oracle {} (tol {})",
        num(summary.ar_max_diff),
        num(oracle::AR_TOL),
        num(summary.vbk_quadrature_max_diff),
        num(summary.vbk_oracle_max_diff),
        num(oracle::VBK_TOL)
    )?;
    if let Some(dir) = &common.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("oracle.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
        let mut m = RunManifest::new("oracle check")
            .param("cases", cases)
            .tolerance("ar", oracle::AR_TOL)
            .tolerance("vbk", oracle::VBK_TOL);
        m.seed = Some(seed);
        m.outputs.push("oracle.json".into());
        m.wall_time_s = started.elapsed().as_secs_f64();
        m.write(&dir.join("oracle.manifest.json"))?;
    }
    if summary.passed() {
        Ok(())
    } else {
        Err(CliError::Check("fast paths disagree with the oracle".into()))
    }
}
