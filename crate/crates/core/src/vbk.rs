//! Deterministic continuous-variable teleportation of a pure Gaussian input
//! through a squeezed Bell-like resource with gain `g`:
//!
//! `F = (1/π)∫d²α χ_in(α) χ_in(−gα) χ_SB(−gα*, −α)`.
//!
//! In the frame `α = e^{iφ/2}(x + iy)` aligned with the input squeezing the
//! integrand is `exp(−vᵀMv + ikᵀv)·P(v)` with diagonal `M`, a linear phase from
//! the displacement and a degree-4 polynomial `P` from the resource, so the
//! integral is a finite sum of Gaussian moments.

use crate::error::{Error, Result};
use crate::gauss::GaussianPure;
use crate::poly::Poly2;
use crate::quadrature::{fsum, GaussHermite};
use crate::report::{FidelityReport, Method, Scheme};
use crate::resource::SqueezedBellResource;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Squeezing beyond which `1/√det M < e^{−300}` and the fidelity is reported as 0.
const MAX_INPUT_SQUEEZING: f64 = 300.0;

/// Tensor Gauss–Hermite validation integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    pub initial_nodes: usize,
    pub max_nodes: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            initial_nodes: 64,
            max_nodes: 128,
            rel_tol: 1e-6,
            abs_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VbkConfig {
    pub gain: f64,
    pub quadrature: QuadratureSettings,
}

impl VbkConfig {
    pub fn new(gain: f64) -> Result<Self> {
        let cfg = Self {
            gain,
            quadrature: QuadratureSettings::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gain) {
            return Err(Error::InvalidParameter(format!("gain {} outside [0, 1]", self.gain)));
        }
        Ok(())
    }
}

/// Displacement of the input, expressed in the input's squeezing frame
/// (`α₀ = e^{iφ/2}(a + ib)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Displacement {
    Point(Complex64),
    /// `a ~ N(0, var_re)`, `b ~ N(0, var_im)`, averaged inside the integral.
    Gaussian { var_re: f64, var_im: f64 },
}

/// Resource- and gain-dependent part of the moment evaluation, reusable across
/// inputs that share the squeezing phase `φ`.
#[derive(Debug, Clone)]
pub struct VbkKernel {
    gain: f64,
    // ½|A|² + ½|B|², the resource contribution to both diagonal entries of M
    noise: f64,
    poly: Poly2,
}

impl VbkKernel {
    pub fn new(res: &SqueezedBellResource, gain: f64, phi: f64) -> Self {
        let (cr, sr) = (res.r.cosh(), res.r.sinh());
        let rot = Complex64::from_polar(sr, res.phi_zeta);
        let big_a = gain * cr + rot;
        let big_b = cr + gain * rot;
        Self {
            gain,
            noise: 0.5 * (big_a.norm_sqr() + big_b.norm_sqr()),
            poly: resource_polynomial(phi, res, big_a, big_b),
        }
    }

    /// `(F, round-off estimate)` for squeezing `s` (at the kernel's `φ`).
    ///
    /// Averaging the displacement over a centred Gaussian multiplies the phase
    /// `exp(ikᵀv)`, `k = 2(1−g)(b, −a)`, by `exp(−2(1−g)² vᵀJᵀΣ₀Jv)`; it therefore
    /// only adds to `M`.
    pub fn fidelity(&self, s: f64, disp: Displacement) -> (f64, f64) {
        if s > MAX_INPUT_SQUEEZING {
            return (0.0, 0.0);
        }
        let gain = self.gain;
        let h = 0.5 * (1.0 + gain * gain);
        let mut m = [h * (2.0 * s).exp() + self.noise, h * (-2.0 * s).exp() + self.noise];
        let mut k = [0.0, 0.0];
        match disp {
            Displacement::Point(a0) => {
                k = [2.0 * (1.0 - gain) * a0.im, -2.0 * (1.0 - gain) * a0.re];
            }
            Displacement::Gaussian { var_re, var_im } => {
                let w = 2.0 * (1.0 - gain).powi(2);
                m[0] += w * var_im;
                m[1] += w * var_re;
            }
        }
        let det = m[0] * m[1];
        let prefactor = (-(k[0] * k[0] / m[0] + k[1] * k[1] / m[1]) / 4.0).exp() / det.sqrt();
        let mu = [
            Complex64::new(0.0, k[0] / (2.0 * m[0])),
            Complex64::new(0.0, k[1] / (2.0 * m[1])),
        ];
        let sigma = [[1.0 / (2.0 * m[0]), 0.0], [0.0, 1.0 / (2.0 * m[1])]];
        let expectation = self.poly.gaussian_expectation(mu, sigma);
        let f = (prefactor * expectation).re;
        // round-off: every moment term can carry a relative error of a few ulps
        let magnitude = self.poly.gaussian_expectation([Complex64::new(0.0, 0.0); 2], sigma).norm() + 1.0;
        (f, 64.0 * f64::EPSILON * prefactor * magnitude)
    }
}

/// The Gaussian-moment evaluation, returning `(F, round-off estimate)`.
pub fn moment_fidelity(s: f64, phi: f64, disp: Displacement, res: &SqueezedBellResource, gain: f64) -> (f64, f64) {
    if s > MAX_INPUT_SQUEEZING {
        return (0.0, 0.0);
    }
    VbkKernel::new(res, gain, phi).fidelity(s, disp)
}

/// `P(v)` of the resource factor with `ξ₁ = −e^{−iφ/2} z* A`, `ξ₂ = −e^{iφ/2} z B`.
fn resource_polynomial(phi: f64, res: &SqueezedBellResource, big_a: Complex64, big_b: Complex64) -> Poly2 {
    let (sd, cd) = res.delta.sin_cos();
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let half = Complex64::from_polar(1.0, 0.5 * phi);
    // z = x + iy, z* = x − iy
    let z = Poly2::linear(one, i);
    let zc = Poly2::linear(one, -i);
    let xi1 = zc.clone().scale(-half.conj() * big_a);
    let xi1c = z.clone().scale(-half * big_a.conj());
    let xi2 = z.scale(-half * big_b);
    let xi2c = zc.scale(-half.conj() * big_b.conj());
    let e = Complex64::from_polar(1.0, res.theta);
    let cross = (&xi1c * &xi2c).scale(e) + (&xi1 * &xi2).scale(e.conj());
    let n1 = Poly2::constant(one) + -(&xi1 * &xi1c);
    let n2 = Poly2::constant(one) + -(&xi2 * &xi2c);
    Poly2::constant(Complex64::new(cd * cd, 0.0)) + cross.scale(Complex64::new(sd * cd, 0.0)) + (&n1 * &n2).scale(Complex64::new(sd * sd, 0.0))
}

fn report(input: &GaussianPure, res: &SqueezedBellResource, gain: f64, fidelity: f64, error: f64, method: Method) -> Result<FidelityReport> {
    Ok(FidelityReport {
        scheme: Scheme::Vbk,
        method,
        input: *input,
        fidelity,
        success_prob: 1.0,
        entropy_ebits: res.entropy()?,
        energy_units: res.energy(),
        error_estimate: error,
        resource: Some(*res),
        gain: Some(gain),
        branches: None,
    })
}

/// Single-shot VBK fidelity from closed-form Gaussian moments.
pub fn vbk_fidelity(input: &GaussianPure, res: &SqueezedBellResource, cfg: &VbkConfig) -> Result<FidelityReport> {
    cfg.validate()?;
    let a0 = input.alpha * Complex64::from_polar(1.0, -0.5 * input.phi);
    let (f, err) = moment_fidelity(input.s, input.phi, Displacement::Point(a0), res, cfg.gain);
    report(input, res, cfg.gain, f, err, Method::GaussianMoments)
}

/// Closed form for a two-mode squeezed vacuum resource (`φ_ζ = π`).
pub fn vbk_fidelity_closed_gaussian(input: &GaussianPure, tmsv_r: f64, gain: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&gain) {
        return Err(Error::InvalidParameter(format!("gain {gain} outside [0, 1]")));
    }
    let (c, s) = (tmsv_r.cosh(), tmsv_r.sinh());
    let noise = (gain * c - s).powi(2) + (c - gain * s).powi(2);
    let h = 0.5 * (1.0 + gain * gain);
    let m1 = h * (2.0 * input.s).exp() + 0.5 * noise;
    let m2 = h * (-2.0 * input.s).exp() + 0.5 * noise;
    let det = m1 * m2;
    if !(det > 0.0) || !det.is_finite() {
        return Err(Error::SingularCovariance { det });
    }
    let a0 = input.alpha * Complex64::from_polar(1.0, -0.5 * input.phi);
    let k1 = 2.0 * (1.0 - gain) * a0.im;
    let k2 = -2.0 * (1.0 - gain) * a0.re;
    Ok((-(k1 * k1 / m1 + k2 * k2 / m2) / 4.0).exp() / det.sqrt())
}

/// Validation path: tensor Gauss–Hermite on the integrand assembled directly
/// from the characteristic functions, after factoring out its Gaussian envelope.
pub fn vbk_fidelity_quadrature(input: &GaussianPure, res: &SqueezedBellResource, cfg: &VbkConfig) -> Result<FidelityReport> {
    cfg.validate()?;
    let g = cfg.gain;
    let (cr, sr) = (res.r.cosh(), res.r.sinh());
    let rot = Complex64::from_polar(sr, res.phi_zeta);
    let k_res = (g * cr + rot).norm_sqr() + (cr + g * rot).norm_sqr();
    let h = 0.5 * (1.0 + g * g);
    let m = [h * (2.0 * input.s).exp() + 0.5 * k_res, h * (-2.0 * input.s).exp() + 0.5 * k_res];
    let frame = Complex64::from_polar(1.0, 0.5 * input.phi);

    let estimate = |nodes: usize| -> f64 {
        let gh = GaussHermite::new(nodes);
        let mut terms = Vec::with_capacity(nodes * nodes);
        for (u, wu) in gh.nodes.iter().zip(&gh.weights) {
            for (w, ww) in gh.nodes.iter().zip(&gh.weights) {
                let x = u / m[0].sqrt();
                let y = w / m[1].sqrt();
                let alpha = frame * Complex64::new(x, y);
                let value = input.char_fn(alpha) * input.char_fn(-g * alpha) * res.char_fn(-g * alpha.conj(), -alpha);
                terms.push(wu * ww * (value.re * (u * u + w * w).exp()));
            }
        }
        fsum(terms) / (std::f64::consts::PI * (m[0] * m[1]).sqrt())
    };

    let mut nodes = cfg.quadrature.initial_nodes;
    let mut previous = estimate(nodes);
    loop {
        let next_nodes = (2 * nodes).min(cfg.quadrature.max_nodes);
        if next_nodes == nodes {
            return Err(Error::QuadratureNotConverged {
                estimate: f64::INFINITY,
                tol: cfg.quadrature.rel_tol,
            });
        }
        let current = estimate(next_nodes);
        let diff = (current - previous).abs();
        let tol = cfg.quadrature.rel_tol * current.abs() + cfg.quadrature.abs_tol;
        if diff <= tol {
            return report(input, res, g, current, diff, Method::Quadrature);
        }
        if next_nodes >= cfg.quadrature.max_nodes {
            return Err(Error::QuadratureNotConverged { estimate: diff, tol });
        }
        nodes = next_nodes;
        previous = current;
    }
}
