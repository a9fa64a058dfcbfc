//! Input priors, classical benchmarks and ensemble-averaged fidelities.
//!
//! Squeezed-only prior: `p^S_β(s, φ) = β sinh s / (2π (cosh s)^{β+1})`.
//! General prior: `p^G_{λ,β}(α, s, φ) = λβ sinh s / (2π² (cosh s)^{β+2}) ·
//! exp(−λ|α|² + λ tanh s Re(e^{−iφ}α²))`.
//!
//! Writing `α = e^{iφ/2}(x + iy)` the general prior factorizes into `p^S_β(s, φ)`
//! times independent centred normals, `x ~ N(0, 1/(2λ(1 − tanh s)))` and
//! `y ~ N(0, 1/(2λ(1 + tanh s)))`. Both schemes are covariant under rotations of
//! the input, so in that frame nothing depends on `φ` and every average reduces
//! to a one-dimensional integral over the squeezing.

use crate::ar::{ar_fidelity, branch_weights, success_and_overlap, ArConfig};
use crate::error::{Error, Result};
use crate::gauss::GaussianPure;
use crate::quadrature::{fsum, integrate_adaptive, periodic_mean, AdaptiveSettings, GaussHermite, GaussLegendre};
use crate::resource::SqueezedBellResource;
use crate::vbk::{moment_fidelity, Displacement, VbkConfig, VbkKernel};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_PI, PI, TAU};

/// Smallest width parameter used to stand in for the `β → 0`, `λ → 0` limits.
pub const WIDTH_FLOOR: f64 = 1e-3;

/// Squeezing above which every fidelity and success probability is below `e^{−290}`.
const MAX_SQUEEZING: f64 = 300.0;

/// Relative accuracy demanded of every deterministic average.
pub const TARGET_REL_ERROR: f64 = 1e-3;

const S_INTEGRAL: AdaptiveSettings = AdaptiveSettings {
    abs_tol: 1e-14,
    rel_tol: 1e-10,
    max_intervals: 2000,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Prior {
    SqueezedOnly { beta: f64 },
    GeneralGaussian { lambda: f64, beta: f64 },
}

fn check_width(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

impl Prior {
    pub fn squeezed(beta: f64) -> Result<Self> {
        check_width("beta", beta)?;
        Ok(Self::SqueezedOnly { beta })
    }

    pub fn general(lambda: f64, beta: f64) -> Result<Self> {
        check_width("lambda", lambda)?;
        check_width("beta", beta)?;
        Ok(Self::GeneralGaussian { lambda, beta })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::SqueezedOnly { beta } => check_width("beta", beta),
            Self::GeneralGaussian { lambda, beta } => {
                check_width("lambda", lambda)?;
                check_width("beta", beta)
            }
        }
    }

    pub fn beta(&self) -> f64 {
        match *self {
            Self::SqueezedOnly { beta } | Self::GeneralGaussian { beta, .. } => beta,
        }
    }

    pub fn lambda(&self) -> Option<f64> {
        match *self {
            Self::SqueezedOnly { .. } => None,
            Self::GeneralGaussian { lambda, .. } => Some(lambda),
        }
    }

    /// `p^S_β(s, φ)`, or `p^G_{λ,β}(α, s, φ)` for the general prior.
    pub fn density(&self, alpha: Complex64, s: f64, phi: f64) -> f64 {
        let beta = self.beta();
        let squeezed = beta * s.sinh() / (TAU * s.cosh().powf(beta + 1.0));
        match *self {
            Self::SqueezedOnly { .. } => squeezed,
            Self::GeneralGaussian { lambda, .. } => {
                let rot = (Complex64::from_polar(1.0, -phi) * alpha * alpha).re;
                let gauss = (-lambda * alpha.norm_sqr() + lambda * rot * s.tanh()).exp();
                squeezed * lambda * FRAC_1_PI / s.cosh() * gauss
            }
        }
    }

    /// Variances of `(x, y)` given `s`, in the frame `α = e^{iφ/2}(x + iy)`.
    pub fn displacement_variances(&self, s: f64) -> Option<(f64, f64)> {
        let lambda = self.lambda()?;
        // 1 ∓ tanh s without cancellation
        let e = (-2.0 * s).exp();
        let one_minus_t = 2.0 * e / (1.0 + e);
        let one_plus_t = 2.0 / (1.0 + e);
        Some((1.0 / (2.0 * lambda * one_minus_t), 1.0 / (2.0 * lambda * one_plus_t)))
    }
}

/// `(1+β)/(2+β)`.
pub fn benchmark_squeezed(beta: f64) -> f64 {
    if beta.is_infinite() {
        return 1.0;
    }
    (1.0 + beta) / (2.0 + beta)
}

/// `((1+λ)/(2+λ))((1+β)/(2+β))`.
pub fn benchmark_general(lambda: f64, beta: f64) -> f64 {
    benchmark_squeezed(lambda) * benchmark_squeezed(beta)
}

/// Evaluates `f` at `WIDTH_FLOOR`, then at successively halved widths until two
/// consecutive values agree within `tol`. Returns `(value, width)`.
pub fn vanishing_width_limit<F>(mut f: F, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut width = WIDTH_FLOOR;
    let mut last = f(width)?;
    for _ in 0..12 {
        let next = f(0.5 * width)?;
        width *= 0.5;
        if (next - last).abs() <= tol {
            return Ok((next, width));
        }
        last = next;
    }
    Err(Error::QuadratureNotConverged { estimate: last, tol })
}

/// One draw from the prior.
///
/// `cosh s = w^{−1/β}` with `w` uniform on `(0, 1]` inverts the squeezing CDF
/// `1 − (cosh s)^{−β}`; `φ` is uniform; for the general prior `(x, y)` are then
/// drawn from the conditional normals and rotated back by `e^{iφ/2}`.
pub fn draw_prior<R: Rng + ?Sized>(prior: &Prior, rng: &mut R) -> GaussianPure {
    let w = 1.0 - rng.gen::<f64>();
    let s = squeezing_from_log_cosh(-w.ln() / prior.beta());
    let phi = rng.gen_range(0.0..TAU);
    let alpha = match prior.displacement_variances(s) {
        None => Complex64::new(0.0, 0.0),
        Some((vx, vy)) => {
            let x = Normal::new(0.0, vx.sqrt()).map_or(0.0, |d| d.sample(rng));
            let y = Normal::new(0.0, vy.sqrt()).map_or(0.0, |d| d.sample(rng));
            Complex64::from_polar(1.0, 0.5 * phi) * Complex64::new(x, y)
        }
    };
    GaussianPure::new(alpha, s, phi)
}

pub fn sample_prior(prior: &Prior, seed: u64) -> GaussianPure {
    draw_prior(prior, &mut ChaCha20Rng::seed_from_u64(seed))
}

pub fn sample_prior_many(prior: &Prior, count: usize, seed: u64) -> Vec<GaussianPure> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..count).map(|_| draw_prior(prior, &mut rng)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AverageReport {
    pub mean_fidelity: f64,
    pub mean_success_prob: f64,
    pub integration_error: f64,
    pub evaluations: usize,
}

/// `s` from `L = ln cosh s`: `acosh(e^L) = L + ln(1 + √(1 − e^{−2L}))`.
fn squeezing_from_log_cosh(l: f64) -> f64 {
    l + (-(-2.0 * l).exp_m1()).sqrt().ln_1p()
}

/// Panel boundaries in `L = ln cosh s` over `[0, 300]`.
fn squeezing_panels(beta: f64) -> Vec<f64> {
    let mut breaks = vec![0.0, MAX_SQUEEZING];
    for k in [0.25, 1.0, 4.0, 16.0, 64.0] {
        breaks.push(k);
        breaks.push(k / beta);
    }
    breaks.retain(|b| (0.0..=MAX_SQUEEZING).contains(b));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1e-300));
    breaks
}

/// `∫ ds p^S_β(s) f(s)` in the variable `L = ln cosh s`, where the prior
/// density is `β e^{−βL}`. Conditional averages are even in `s`, hence smooth
/// in `L`. The range `[0, 300]` is cut into panels at both fixed and
/// `1/β`-scaled break points so that neither a very narrow (`β ≫ 1`) nor a very
/// flat (`β ≪ 1`) prior hides its mass from the first rule.
fn outer_integral<const D: usize, F>(beta: f64, f: F) -> crate::quadrature::Integral<D>
where
    F: Fn(f64) -> [f64; D],
{
    let breaks = squeezing_panels(beta);
    let mut value = [0.0; D];
    let mut error = [0.0; D];
    let mut evaluations = 0;
    let mut converged = true;
    for pair in breaks.windows(2) {
        let r = integrate_adaptive(
            |l| {
                let w = beta * (-beta * l).exp();
                f(squeezing_from_log_cosh(l)).map(|x| w * x)
            },
            pair[0],
            pair[1],
            &S_INTEGRAL,
        );
        for d in 0..D {
            value[d] += r.value[d];
            error[d] += r.error[d];
        }
        evaluations += r.evaluations;
        converged &= r.converged;
    }
    crate::quadrature::Integral {
        value,
        error,
        evaluations,
        converged,
    }
}

fn checked(value: f64, error: f64) -> Result<()> {
    if error <= TARGET_REL_ERROR * value.abs().max(1e-12) {
        Ok(())
    } else {
        Err(Error::QuadratureNotConverged { estimate: value, tol: TARGET_REL_ERROR })
    }
}

/// VBK fidelity averaged over `(α, φ)` at squeezing `s`; `kernel` is built at `φ = 0`.
pub fn conditional_fidelity_vbk(prior: &Prior, s: f64, kernel: &VbkKernel) -> f64 {
    let disp = match prior.displacement_variances(s) {
        None => Displacement::Point(Complex64::new(0.0, 0.0)),
        Some((var_re, var_im)) => Displacement::Gaussian { var_re, var_im },
    };
    kernel.fidelity(s, disp).0
}

/// `∫ p · F_VBK` at fixed `(res, g)`.
pub fn mean_fidelity_vbk(prior: &Prior, res: &SqueezedBellResource, cfg: &VbkConfig) -> Result<AverageReport> {
    prior.validate()?;
    cfg.validate()?;
    let kernel = VbkKernel::new(res, cfg.gain, 0.0);
    let r = outer_integral(prior.beta(), |s| [conditional_fidelity_vbk(prior, s, &kernel)]);
    checked(r.value[0], r.error[0])?;
    Ok(AverageReport {
        mean_fidelity: r.value[0].clamp(0.0, 1.0),
        mean_success_prob: 1.0,
        integration_error: r.error[0],
        evaluations: r.evaluations,
    })
}

/// Reference VBK average that assumes neither the analytic `α` average nor the
/// rotation symmetry: Gauss–Legendre on each squeezing panel, tensor
/// Gauss–Hermite over the prior's `α` distribution and a periodic rule in `φ`.
/// Accurate only when the prior is not much wider than the fidelity profile;
/// squeezing beyond `s = 40` is dropped.
pub fn mean_fidelity_vbk_reference(prior: &Prior, res: &SqueezedBellResource, gain: f64, nodes: usize) -> Result<AverageReport> {
    prior.validate()?;
    let beta = prior.beta();
    let gh = GaussHermite::new(nodes);
    let mut evaluations = 0;
    let mut terms = Vec::new();
    let mut phi_error: f64 = 0.0;
    let gl = GaussLegendre::new(nodes);
    let panels = squeezing_panels(beta);
    let rule: Vec<(f64, f64)> = panels.windows(2).flat_map(|p| gl.on_interval(p[0], p[1]).collect::<Vec<_>>()).collect();
    for (l, wl) in rule {
        let s = squeezing_from_log_cosh(l);
        let wv = wl * beta * (-beta * l).exp();
        // F ≤ 2/cosh s, so the rest is below 1e-17
        if s > 40.0 {
            continue;
        }
        let at_phi = |phi: f64| -> f64 {
            let frame = Complex64::from_polar(1.0, 0.5 * phi);
            let fidelity_at = |alpha: Complex64| {
                let a0 = alpha * frame.conj();
                moment_fidelity(s, phi, Displacement::Point(a0), res, gain).0
            };
            match prior.displacement_variances(s) {
                None => fidelity_at(Complex64::new(0.0, 0.0)),
                Some((vx, vy)) => {
                    let (sx, sy) = ((2.0 * vx).sqrt(), (2.0 * vy).sqrt());
                    let mut acc = Vec::with_capacity(nodes * nodes);
                    for (x, wx) in gh.nodes.iter().zip(&gh.weights) {
                        for (y, wy) in gh.nodes.iter().zip(&gh.weights) {
                            acc.push(wx * wy * fidelity_at(frame * Complex64::new(sx * x, sy * y)));
                        }
                    }
                    fsum(acc) / PI
                }
            }
        };
        let (mean, err, n) = periodic_mean(at_phi, 8, 64, 1e-12);
        evaluations += n * if prior.lambda().is_some() { nodes * nodes } else { 1 };
        phi_error = phi_error.max(err);
        terms.push(wv * mean);
    }
    Ok(AverageReport {
        mean_fidelity: fsum(terms),
        mean_success_prob: 1.0,
        integration_error: phi_error,
        evaluations,
    })
}

/// `(∫ p·P_suc·F_AR, ∫ p·P_suc)` at fixed `s`, averaged over `(α, φ)`.
///
/// Both moments are `|ψ₀|^{2m}` (m = 2, 1) times polynomials of degree `4N`,
/// `2N` in `(x, y)`, and `|ψ₀|²` is Gaussian in `(x, y)`: Gauss–Hermite after
/// whitening by `prior × |ψ₀|^{2m}` is exact with `2N + 1` nodes.
pub fn conditional_moments_ar(prior: &Prior, s: f64, n: usize) -> [f64; 2] {
    if s > MAX_SQUEEZING {
        return [0.0, 0.0];
    }
    let weights = branch_weights(n);
    let Some(lambda) = prior.lambda() else {
        let pops: Vec<f64> = GaussianPure::squeezed(s, 0.0).fock_amplitudes(n + 1).iter().map(|a| a.norm_sqr()).collect();
        let (p, o) = success_and_overlap(&pops, &weights);
        return [o * o, p];
    };
    let e = (-2.0 * s).exp();
    let (tp, tm) = (2.0 / (1.0 + e), 2.0 * e / (1.0 + e)); // 1 ± tanh s
    let sech = 2.0 * (-s).exp() / (1.0 + e);
    let gh = GaussHermite::new(2 * n + 2);
    let mut out = [0.0; 2];
    for (slot, m) in [(0usize, 2.0f64), (1, 1.0)] {
        let cx = lambda * tm + m * tp;
        let cy = lambda * tp + m * tm;
        let mut acc = Vec::with_capacity(gh.len() * gh.len());
        for (x, wx) in gh.nodes.iter().zip(&gh.weights) {
            for (y, wy) in gh.nodes.iter().zip(&gh.weights) {
                let alpha = Complex64::new(x / cx.sqrt(), y / cy.sqrt());
                let amps = GaussianPure::new(alpha, s, 0.0).fock_amplitudes(n + 1);
                let rel: Vec<f64> = amps.iter().map(|a| (a / amps[0]).norm_sqr()).collect();
                let (p, o) = success_and_overlap(&rel, &weights);
                acc.push(wx * wy * if slot == 0 { o * o } else { p });
            }
        }
        out[slot] = lambda * sech.powf(1.0 + m) / (PI * (cx * cy).sqrt()) * fsum(acc);
    }
    out
}

/// Success-weighted `∫ p P_suc F_AR / ∫ p P_suc`, with `mean_success_prob = ∫ p P_suc`.
pub fn mean_fidelity_ar(prior: &Prior, n: usize) -> Result<AverageReport> {
    prior.validate()?;
    ArConfig::new(n)?;
    let r = outer_integral(prior.beta(), |s| conditional_moments_ar(prior, s, n));
    let [num, den] = r.value;
    if den <= 0.0 {
        return Err(Error::DivisionByZeroSuccess);
    }
    let f = num / den;
    let err = r.error[0] / den + f * r.error[1] / den;
    checked(f, err)?;
    Ok(AverageReport {
        mean_fidelity: f.clamp(0.0, 1.0),
        mean_success_prob: den,
        integration_error: err,
        evaluations: r.evaluations,
    })
}

/// Unweighted `∫ p F_AR` for squeezed-only priors, for comparison with the
/// success-weighted average.
pub fn unweighted_mean_fidelity_ar(beta: f64, n: usize) -> Result<f64> {
    check_width("beta", beta)?;
    ArConfig::new(n)?;
    let r = outer_integral(beta, |s| {
        let pops: Vec<f64> = GaussianPure::squeezed(s, 0.0).fock_amplitudes(n + 1).iter().map(|a| a.norm_sqr()).collect();
        let (p, o) = success_and_overlap(&pops, &branch_weights(n));
        [if p > 0.0 { o * o / p } else { 0.0 }]
    });
    checked(r.value[0], r.error[0])?;
    Ok(r.value[0])
}

fn mean_and_sem(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = fsum(xs.iter().copied()) / n;
    let var = fsum(xs.iter().map(|x| (x - mean).powi(2))) / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// Monte-Carlo VBK average; `integration_error` is the standard error.
pub fn mc_mean_fidelity_vbk(prior: &Prior, res: &SqueezedBellResource, cfg: &VbkConfig, samples: usize, seed: u64) -> Result<AverageReport> {
    prior.validate()?;
    cfg.validate()?;
    let draws = sample_prior_many(prior, samples, seed);
    let values: Vec<f64> = draws
        .par_iter()
        .map(|st| {
            let a0 = st.alpha * Complex64::from_polar(1.0, -0.5 * st.phi);
            moment_fidelity(st.s, st.phi, Displacement::Point(a0), res, cfg.gain).0
        })
        .collect();
    let (mean, sem) = mean_and_sem(&values);
    Ok(AverageReport {
        mean_fidelity: mean,
        mean_success_prob: 1.0,
        integration_error: sem,
        evaluations: samples,
    })
}

/// Monte-Carlo AR average (ratio estimator, delta-method standard error).
pub fn mc_mean_fidelity_ar(prior: &Prior, n: usize, samples: usize, seed: u64) -> Result<AverageReport> {
    prior.validate()?;
    ArConfig::new(n)?;
    let draws = sample_prior_many(prior, samples, seed);
    let pairs: Vec<(f64, f64)> = draws
        .par_iter()
        .map(|st| {
            if st.s > MAX_SQUEEZING {
                return Ok((0.0, 0.0));
            }
            let rep = ar_fidelity(st, n)?;
            Ok((rep.success_prob * rep.fidelity, rep.success_prob))
        })
        .collect::<Result<_>>()?;
    let nums: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let dens: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (mn, _) = mean_and_sem(&nums);
    let (md, _) = mean_and_sem(&dens);
    if md <= 0.0 {
        return Err(Error::DivisionByZeroSuccess);
    }
    let f = mn / md;
    let resid: Vec<f64> = pairs.iter().map(|(a, b)| a - f * b).collect();
    let (_, sem_resid) = mean_and_sem(&resid);
    Ok(AverageReport {
        mean_fidelity: f,
        mean_success_prob: md,
        integration_error: sem_resid / md,
        evaluations: samples,
    })
}

/// `(pragmatic, naive)` resource cost: `N` per run, and `N / P̄_suc` once
/// failed runs are charged.
pub fn resource_accounting(report: &AverageReport, n: usize) -> Result<(f64, f64)> {
    if !(report.mean_success_prob > 0.0) {
        return Err(Error::DivisionByZeroSuccess);
    }
    let n = n as f64;
    Ok((n, n / report.mean_success_prob))
}
