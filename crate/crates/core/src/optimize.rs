//! VBK resource optimization at fixed entanglement or fixed energy.
//!
//! The squeezing `r` is eliminated through the constraint, leaving the angles
//! `(δ, θ, φ_ζ)` and the gain `g`. A coarse grid is followed by Nelder–Mead
//! refinement from the best grid points.

use crate::ar::ArConfig;
use crate::ensemble::{benchmark_general, benchmark_squeezed, mean_fidelity_ar, mean_fidelity_vbk, AverageReport, Prior};
use crate::error::{Error, Result};
use crate::resource::SqueezedBellResource;
use crate::vbk::VbkConfig;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::Mutex;

/// Scan step and range of the bracketing search in `r`.
pub const R_SCAN_STEP: f64 = 0.05;
pub const R_SCAN_MAX: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ResourceConstraint {
    /// Entanglement entropy in ebits.
    FixedEntropy(f64),
    /// Mean photon number.
    FixedEnergy(f64),
}

impl ResourceConstraint {
    pub fn value(&self) -> f64 {
        match *self {
            Self::FixedEntropy(v) | Self::FixedEnergy(v) => v,
        }
    }

    fn validate(&self) -> Result<()> {
        let v = self.value();
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("constraint value {v} must be positive")))
        }
    }

    /// The constrained metric of a resource.
    pub fn metric(&self, res: &SqueezedBellResource) -> Result<f64> {
        match self {
            Self::FixedEntropy(_) => res.entropy(),
            Self::FixedEnergy(_) => Ok(res.energy()),
        }
    }

    /// Branch count of the AR scheme with the same budget.
    pub fn branches(&self) -> Result<usize> {
        let v = self.value();
        if (v - v.round()).abs() > 1e-9 || v < 1.0 {
            return Err(Error::InvalidParameter(format!("AR needs an integer budget, got {v}")));
        }
        Ok(v.round() as usize)
    }
}

/// All sign changes of `metric(r) − target` on the scan grid `r = 0, 0.05, …, 6`,
/// each refined by bisection, in increasing order.
///
/// The scan stops early if the metric can no longer be evaluated (entropy
/// cutoff exhausted at very large `r`). Roots closer than one scan step apart
/// can be missed.
pub fn constraint_roots(phi_zeta: f64, delta: f64, theta: f64, constraint: &ResourceConstraint) -> Result<Vec<f64>> {
    constraint.validate()?;
    let base = SqueezedBellResource::new(0.0, phi_zeta, delta, theta)?;
    let target = constraint.value();
    let excess = |r: f64| constraint.metric(&base.with_r(r)).map(|m| m - target);
    let mut roots = Vec::new();
    let mut lo = 0.0;
    let mut f_lo = excess(lo)?;
    if f_lo == 0.0 {
        roots.push(0.0);
    }
    let steps = (R_SCAN_MAX / R_SCAN_STEP).round() as usize;
    for k in 1..=steps {
        let hi = k as f64 * R_SCAN_STEP;
        let Ok(f_hi) = excess(hi) else { break };
        if f_hi == 0.0 {
            roots.push(hi);
        } else if f_lo != 0.0 && f_lo.signum() != f_hi.signum() {
            roots.push(bisect(&excess, lo, hi, f_lo)?);
        }
        lo = hi;
        f_lo = f_hi;
    }
    Ok(roots)
}

fn bisect<F>(f: &F, mut lo: f64, mut hi: f64, f_lo: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let sign_lo = f_lo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm.abs() < 1e-12 || hi - lo < 1e-15 {
            return Ok(mid);
        }
        if fm.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Smallest `r ≥ 0` at which the resource meets the constraint.
pub fn solve_constraint_r(phi_zeta: f64, delta: f64, theta: f64, constraint: &ResourceConstraint) -> Result<f64> {
    constraint.validate()?;
    let base = SqueezedBellResource::new(0.0, phi_zeta, delta, theta)?;
    let target = constraint.value();
    let excess = |r: f64| constraint.metric(&base.with_r(r)).map(|m| m - target);
    let f0 = excess(0.0)?;
    if f0 == 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut f_lo = f0;
    let mut r = 0.0;
    while r < R_SCAN_MAX {
        let hi = (r + R_SCAN_STEP).min(R_SCAN_MAX);
        let f_hi = match excess(hi) {
            Ok(v) => v,
            Err(e) => {
                return Err(Error::ConstraintUnreachable {
                    target,
                    reason: format!("metric not evaluable beyond r = {lo:.2}: {e}"),
                })
            }
        };
        if f_hi.signum() != f_lo.signum() {
            return bisect(&excess, lo, hi, f_lo);
        }
        lo = hi;
        f_lo = f_hi;
        r = hi;
    }
    let reason = if f0 > 0.0 {
        format!("value {:.6} at r = 0 already exceeds the target and the metric never falls to it", f0 + target)
    } else {
        format!("not reached for r ≤ {R_SCAN_MAX}")
    };
    Err(Error::ConstraintUnreachable { target, reason })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Search {
    /// Two-mode squeezed vacuum (`δ = 0`): phase and gain only.
    GaussianOnly,
    FullSqueezedBell,
}

/// Grid densities and stopping rules of [`optimize_vbk`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    pub delta_points: usize,
    pub theta_points: usize,
    pub phase_points: usize,
    pub gain_points: usize,
    /// Number of best grid points refined by the simplex.
    pub starts: usize,
    /// Simplex stops when the spread of its values falls below this.
    pub fidelity_tol: f64,
    pub max_iterations: usize,
    /// Keep `g` at this value instead of optimizing it.
    pub frozen_gain: Option<f64>,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            delta_points: 8,
            theta_points: 8,
            phase_points: 4,
            gain_points: 11,
            starts: 3,
            fidelity_tol: 1e-8,
            max_iterations: 400,
            frozen_gain: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub stage: String,
    pub iterations: usize,
    pub best_fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub resource: SqueezedBellResource,
    pub gain: f64,
    pub mean_fidelity: f64,
    pub integration_error: f64,
    pub constraint_residual: f64,
    pub search: Search,
    pub settings: OptimizerSettings,
    pub evaluations: usize,
    pub solver_trace: Vec<TraceEntry>,
}

/// Search coordinates `(δ, θ, φ_ζ, g)`.
type Point = [f64; 4];

fn key(p: &Point) -> [i64; 4] {
    p.map(|x| (x * 1e6).round() as i64)
}

fn canonical(p: &Point) -> Point {
    // δ → δ + π only flips the global sign of the resource
    [p[0].rem_euclid(PI), p[1].rem_euclid(TAU), p[2].rem_euclid(TAU), p[3]]
}

struct Objective<'a> {
    prior: &'a Prior,
    constraint: &'a ResourceConstraint,
    cache: Mutex<HashMap<[i64; 4], Option<(f64, f64, f64)>>>,
    r_cache: Mutex<HashMap<[i64; 3], Option<f64>>>,
}

impl<'a> Objective<'a> {
    fn new(prior: &'a Prior, constraint: &'a ResourceConstraint) -> Self {
        Self {
            prior,
            constraint,
            cache: Mutex::new(HashMap::new()),
            r_cache: Mutex::new(HashMap::new()),
        }
    }

    fn resource(&self, p: &Point) -> Option<SqueezedBellResource> {
        let k = [key(p)[0], key(p)[1], key(p)[2]];
        if let Some(r) = self.r_cache.lock().expect("cache poisoned").get(&k) {
            return r.and_then(|r| SqueezedBellResource::new(r, p[2], p[0], p[1]).ok());
        }
        let r = solve_constraint_r(p[2], p[0], p[1], self.constraint).ok();
        self.r_cache.lock().expect("cache poisoned").insert(k, r);
        r.and_then(|r| SqueezedBellResource::new(r, p[2], p[0], p[1]).ok())
    }

    /// `(F̄, integration error, r)` at the rounded point, `None` if the
    /// constraint cannot be met there.
    fn eval(&self, p: &Point) -> Option<(f64, f64, f64)> {
        let k = key(p);
        if let Some(v) = self.cache.lock().expect("cache poisoned").get(&k) {
            return *v;
        }
        let rounded = k.map(|x| x as f64 * 1e-6);
        let value = self.resource(&rounded).and_then(|res| {
            let cfg = VbkConfig::new(rounded[3]).ok()?;
            let rep = mean_fidelity_vbk(self.prior, &res, &cfg).ok()?;
            Some((rep.mean_fidelity, rep.integration_error, res.r))
        });
        self.cache.lock().expect("cache poisoned").insert(k, value);
        value
    }

    fn value(&self, p: &Point) -> f64 {
        self.eval(p).map_or(f64::NEG_INFINITY, |v| v.0)
    }

    fn evaluations(&self) -> usize {
        self.cache.lock().expect("cache poisoned").len()
    }
}

/// Maximizes `f` by Nelder–Mead from `start` with initial steps `steps`.
/// Returns `(best point, best value, iterations)`.
fn nelder_mead<F>(f: F, start: &[f64], steps: &[f64], tol: f64, max_iter: usize) -> (Vec<f64>, f64, usize)
where
    F: Fn(&[f64]) -> f64,
{
    let n = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += steps[i];
        let v = f(&p);
        simplex.push((p, v));
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut iter = 0;
    while iter < max_iter {
        order(&mut simplex);
        let (best, worst) = (simplex[0].1, simplex[n].1);
        if best.is_finite() && worst.is_finite() && best - worst <= tol {
            break;
        }
        iter += 1;
        let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|(p, _)| p[j]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|j| centroid[j] + t * (simplex[n].0[j] - centroid[j])).collect() };
        let refl = along(-1.0);
        let fr = f(&refl);
        if fr > simplex[0].1 {
            let exp = along(-2.0);
            let fe = f(&exp);
            simplex[n] = if fe > fr { (exp, fe) } else { (refl, fr) };
        } else if fr > simplex[n - 1].1 {
            simplex[n] = (refl, fr);
        } else {
            let (con, fc) = if fr > simplex[n].1 {
                let c = along(-0.5);
                let v = f(&c);
                (c, v)
            } else {
                let c = along(0.5);
                let v = f(&c);
                (c, v)
            };
            if fc > simplex[n].1.max(fr) {
                simplex[n] = (con, fc);
            } else {
                // shrink towards the best vertex
                let best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    let p: Vec<f64> = v.0.iter().zip(&best).map(|(x, b)| b + 0.5 * (x - b)).collect();
                    let val = f(&p);
                    *v = (p, val);
                }
            }
        }
    }
    order(&mut simplex);
    let (p, v) = simplex.swap_remove(0);
    (p, v, iter)
}

fn grid(n: usize, period: f64) -> Vec<f64> {
    (0..n).map(|i| period * i as f64 / n as f64).collect()
}

fn gains(settings: &OptimizerSettings) -> Vec<f64> {
    match settings.frozen_gain {
        Some(g) => vec![g],
        None => {
            let n = settings.gain_points.max(2);
            (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
        }
    }
}

/// Best mean VBK fidelity over resources meeting `constraint`, and over the gain
/// unless it is frozen in `settings`.
pub fn optimize_vbk(prior: &Prior, constraint: &ResourceConstraint, search: Search, settings: &OptimizerSettings) -> Result<Optimum> {
    prior.validate()?;
    constraint.validate()?;
    if let Some(g) = settings.frozen_gain {
        VbkConfig::new(g)?;
    }
    let objective = Objective::new(prior, constraint);
    let mut trace = Vec::new();

    // the Gaussian optimum seeds the full search so that it is a true superset
    let gaussian_seed = match search {
        Search::GaussianOnly => None,
        Search::FullSqueezedBell => {
            let g = optimize_vbk(prior, constraint, Search::GaussianOnly, settings)?;
            trace.extend(g.solver_trace.iter().map(|t| TraceEntry {
                stage: format!("gaussian {}", t.stage),
                ..t.clone()
            }));
            Some([g.resource.delta, g.resource.theta, g.resource.phi_zeta, g.gain])
        }
    };

    let (deltas, thetas) = match search {
        Search::GaussianOnly => (vec![0.0], vec![0.0]),
        Search::FullSqueezedBell => (grid(settings.delta_points, PI), grid(settings.theta_points, TAU)),
    };
    let mut points: Vec<Point> = Vec::new();
    for &d in &deltas {
        for &t in &thetas {
            for &p in &grid(settings.phase_points, TAU) {
                for &g in &gains(settings) {
                    points.push([d, t, p, g]);
                }
            }
        }
    }
    let values: Vec<f64> = points.par_iter().map(|p| objective.value(p)).collect();
    let mut ranked: Vec<usize> = (0..points.len()).filter(|&i| values[i].is_finite()).collect();
    ranked.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    if ranked.is_empty() {
        return Err(Error::ConstraintUnreachable {
            target: constraint.value(),
            reason: "no grid point meets the constraint".into(),
        });
    }
    trace.push(TraceEntry {
        stage: "grid".into(),
        iterations: points.len(),
        best_fidelity: values[ranked[0]],
    });

    let mut starts: Vec<Point> = ranked.iter().take(settings.starts.max(1)).map(|&i| points[i]).collect();
    if let Some(seed) = gaussian_seed {
        starts.push(seed);
    }

    // active coordinates of the search
    let mut active: Vec<usize> = match search {
        Search::GaussianOnly => vec![2, 3],
        Search::FullSqueezedBell => vec![0, 1, 2, 3],
    };
    if settings.frozen_gain.is_some() {
        active.retain(|&i| i != 3);
    }
    let steps_all = [0.1, 0.4, 0.4, 0.05];

    let refined: Vec<(Point, f64, usize)> = starts
        .par_iter()
        .map(|start| {
            let embed = |x: &[f64]| -> Point {
                let mut p = *start;
                for (slot, &i) in active.iter().enumerate() {
                    p[i] = x[slot];
                }
                p
            };
            let f = |x: &[f64]| -> f64 {
                let p = embed(x);
                // reflect the gain back into [0, 1] with a small slope penalty
                let g = p[3].clamp(0.0, 1.0);
                let excess = (p[3] - g).abs();
                objective.value(&canonical(&[p[0], p[1], p[2], g])) - excess
            };
            let x0: Vec<f64> = active.iter().map(|&i| start[i]).collect();
            let steps: Vec<f64> = active
                .iter()
                .map(|&i| if i == 3 && start[3] + steps_all[3] > 1.0 { -steps_all[3] } else { steps_all[i] })
                .collect();
            let (x, _, iters) = nelder_mead(f, &x0, &steps, settings.fidelity_tol, settings.max_iterations);
            let mut p = embed(&x);
            p[3] = p[3].clamp(0.0, 1.0);
            let p = canonical(&p);
            (p, objective.value(&p), iters)
        })
        .collect();

    // the grid best is always a candidate
    let mut best_point = canonical(&points[ranked[0]]);
    let mut best_value = values[ranked[0]];
    for (k, (p, v, iters)) in refined.iter().enumerate() {
        trace.push(TraceEntry {
            stage: format!("refine {k}"),
            iterations: *iters,
            best_fidelity: *v,
        });
        if *v > best_value {
            best_value = *v;
            best_point = *p;
        }
    }

    let (fidelity, error, r) = objective.eval(&best_point).ok_or_else(|| Error::ConstraintUnreachable {
        target: constraint.value(),
        reason: "optimum lost its constraint solution".into(),
    })?;
    let rounded = key(&best_point).map(|x| x as f64 * 1e-6);
    let resource = SqueezedBellResource::new(r, rounded[2], rounded[0], rounded[1])?;
    let residual = constraint.metric(&resource)? - constraint.value();
    Ok(Optimum {
        resource,
        gain: rounded[3],
        mean_fidelity: fidelity,
        integration_error: error,
        constraint_residual: residual,
        search,
        settings: *settings,
        evaluations: objective.evaluations(),
        solver_trace: trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Winner {
    VbkDominant,
    ArDominantOverBenchmark,
    BelowBenchmark,
    /// Differences within twice the summed integration errors.
    Tie,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub prior: Prior,
    pub constraint: ResourceConstraint,
    pub ar: AverageReport,
    pub vbk: Optimum,
    pub benchmark: f64,
    pub winner: Winner,
}

pub fn benchmark_for(prior: &Prior) -> f64 {
    match *prior {
        Prior::SqueezedOnly { beta } => benchmark_squeezed(beta),
        Prior::GeneralGaussian { lambda, beta } => benchmark_general(lambda, beta),
    }
}

/// Classifies by the three regions: VBK above both AR and the benchmark, VBK
/// below AR but above the benchmark, VBK below the benchmark.
pub fn classify(vbk: f64, vbk_err: f64, ar: f64, ar_err: f64, benchmark: f64) -> Winner {
    let margin = 2.0 * (vbk_err + ar_err);
    let above_bench = vbk - benchmark;
    let above_ar = vbk - ar;
    if above_bench.abs() <= 2.0 * vbk_err || above_ar.abs() <= margin {
        return Winner::Tie;
    }
    if above_bench < 0.0 {
        Winner::BelowBenchmark
    } else if above_ar > 0.0 {
        Winner::VbkDominant
    } else {
        Winner::ArDominantOverBenchmark
    }
}

/// AR with `N` equal to the budget against the optimized VBK scheme.
pub fn compare_schemes(prior: &Prior, constraint: &ResourceConstraint, search: Search, settings: &OptimizerSettings) -> Result<Comparison> {
    let n = constraint.branches()?;
    ArConfig::new(n)?;
    let ar = mean_fidelity_ar(prior, n)?;
    let vbk = optimize_vbk(prior, constraint, search, settings)?;
    let benchmark = benchmark_for(prior);
    let winner = classify(vbk.mean_fidelity, vbk.integration_error, ar.mean_fidelity, ar.integration_error, benchmark);
    Ok(Comparison {
        prior: *prior,
        constraint: *constraint,
        ar,
        vbk,
        benchmark,
        winner,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resource::tmsv_entropy;
    use proptest::prelude::*;

    #[test]
    fn energy_constraint_inverts_closed_form() {
        let r = solve_constraint_r(PI, 0.0, 0.0, &ResourceConstraint::FixedEnergy(2.0)).unwrap();
        assert!((r - 1f64.asinh()).abs() < 1e-9);
    }

    #[test]
    fn entropy_constraint_matches_ten_db() {
        let r = solve_constraint_r(PI, 0.0, 0.0, &ResourceConstraint::FixedEntropy(2.77)).unwrap();
        assert!((r - 1.1513).abs() < 1e-3, "{r}");
        assert!((tmsv_entropy(r) - 2.77).abs() < 1e-8);
    }

    #[test]
    fn unreachable_below_the_bell_floor() {
        // δ = π/2 at r = 0 is |1,1⟩: a product state, but two photons
        let err = solve_constraint_r(0.0, PI / 2.0, 0.0, &ResourceConstraint::FixedEnergy(1.0));
        assert!(matches!(err, Err(Error::ConstraintUnreachable { .. })), "{err:?}");
    }

    #[test]
    fn roots_list_starts_with_solution() {
        let c = ResourceConstraint::FixedEntropy(1.5);
        let (pz, d, t) = (0.7, 0.6, 2.0);
        let roots = constraint_roots(pz, d, t, &c).unwrap();
        let r = solve_constraint_r(pz, d, t, &c).unwrap();
        assert!((roots[0] - r).abs() < 1e-9);
    }

    #[test]
    fn nelder_mead_finds_quadratic_peak() {
        let (x, v, _) = nelder_mead(|x| -(x[0] - 0.3).powi(2) - 2.0 * (x[1] + 0.1).powi(2), &[0.0, 0.0], &[0.2, 0.2], 1e-14, 500);
        assert!((x[0] - 0.3).abs() < 1e-5 && (x[1] + 0.1).abs() < 1e-5 && v > -1e-10);
    }

    #[test]
    fn classification_regions() {
        assert_eq!(classify(0.8, 1e-6, 0.7, 1e-6, 0.6), Winner::VbkDominant);
        assert_eq!(classify(0.65, 1e-6, 0.7, 1e-6, 0.6), Winner::ArDominantOverBenchmark);
        assert_eq!(classify(0.55, 1e-6, 0.7, 1e-6, 0.6), Winner::BelowBenchmark);
        assert_eq!(classify(0.7, 1e-3, 0.7005, 1e-3, 0.6), Winner::Tie);
    }

    #[test]
    fn gaussian_search_is_reproducible_and_feasible() {
        let prior = Prior::squeezed(2.0).unwrap();
        let c = ResourceConstraint::FixedEntropy(2.0);
        let s = OptimizerSettings::default();
        let a = optimize_vbk(&prior, &c, Search::GaussianOnly, &s).unwrap();
        let b = optimize_vbk(&prior, &c, Search::GaussianOnly, &s).unwrap();
        assert_eq!(a, b);
        assert!(a.constraint_residual.abs() < 1e-6);
        assert!(a.mean_fidelity >= a.solver_trace[0].best_fidelity);
        assert!((a.resource.phi_zeta - PI).abs() < 1e-3, "{:?}", a.resource);
    }

    #[test]
    fn frozen_unit_gain_fades_for_flat_prior() {
        let s = OptimizerSettings {
            frozen_gain: Some(1.0),
            ..OptimizerSettings::default()
        };
        let c = ResourceConstraint::FixedEntropy(2.0);
        let wide = optimize_vbk(&Prior::squeezed(1e-3).unwrap(), &c, Search::GaussianOnly, &s).unwrap();
        let narrow = optimize_vbk(&Prior::squeezed(1.0).unwrap(), &c, Search::GaussianOnly, &s).unwrap();
        assert_eq!(wide.gain, 1.0);
        assert!(wide.mean_fidelity < 0.01 && narrow.mean_fidelity > 0.3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn solved_r_meets_constraint(pz in 0.0f64..TAU, d in 0.0f64..PI, t in 0.0f64..TAU, target in 1.5f64..4.0, entropy in proptest::bool::ANY) {
            let c = if entropy { ResourceConstraint::FixedEntropy(target) } else { ResourceConstraint::FixedEnergy(target) };
            if let Ok(r) = solve_constraint_r(pz, d, t, &c) {
                let res = SqueezedBellResource::new(r, pz, d, t).unwrap();
                prop_assert!((c.metric(&res).unwrap() - target).abs() < 1e-8);
            }
        }
    }
}
