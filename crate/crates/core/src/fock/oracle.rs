//! Brute-force teleportation in the truncated Fock basis.

use super::phase_space::engine_for;
use super::{
    apply_beam_splitter, apply_displace_1m, apply_squeeze_1m, entropy_bits, project_and_renormalize, schmidt_coefficients,
    FockVector, TruncationPolicy,
};
use crate::error::{Error, Result};
use crate::gauss::GaussianPure;
use crate::quadrature::{fsum, GaussLegendre};
use crate::report::{FidelityReport, Method, Scheme};
use crate::resource::SqueezedBellResource;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const MAX_ORACLE_BRANCHES: usize = 6;

/// Builds `D̂(α)Ŝ(ξ)|0⟩` by applying the truncated operators to the vacuum.
pub fn input_state(input: &GaussianPure, policy: &TruncationPolicy) -> Result<FockVector> {
    let squeezed = apply_squeeze_1m(&FockVector::vacuum(1, policy), input.xi())?;
    apply_displace_1m(&squeezed, input.alpha)
}

/// Spreads the single-mode content of mode 0 over `n` modes through a chain of
/// beam splitters, mode `j` taking `1/n` of the input intensity.
pub fn split(state: &FockVector, n: usize) -> Result<FockVector> {
    let mut out = state.clone();
    for j in 1..n {
        let t = (n - j) as f64 / (n - j + 1) as f64;
        out = apply_beam_splitter(&out, j, 0, t)?;
    }
    Ok(out)
}

/// Inverse of [`split`].
pub fn recombine(state: &FockVector, n: usize) -> Result<FockVector> {
    let mut out = state.clone();
    for j in (1..n).rev() {
        let t = (n - j) as f64 / (n - j + 1) as f64;
        out = apply_beam_splitter(&out, 0, j, t)?;
    }
    Ok(out)
}

/// Splitter, per-branch qubit truncation with ideal qubit teleporters,
/// recombination, and post-selection on vacuum in every detector.
pub fn oracle_ar_output(input: &GaussianPure, n: usize, policy: &TruncationPolicy) -> Result<FockVector> {
    if !(1..=MAX_ORACLE_BRANCHES).contains(&n) {
        return Err(Error::BranchCountUnsupported {
            branches: n,
            min: 1,
            max: MAX_ORACLE_BRANCHES,
        });
    }
    let full = input_state(input, policy)?;
    // more than n photons can never leave n single-photon branches
    let cutoffs = vec![n + 1; n];
    let mut network = FockVector::zeros(&cutoffs, policy.tail_tol)?;
    for k in 0..=n {
        let mut occ = vec![0; n];
        occ[0] = k;
        let idx = network.flat_index(&occ)?;
        network.amplitudes_mut()[idx] = full.amplitudes()[k];
    }
    let mut spread = split(&network, n)?;
    for i in 0..spread.amplitudes().len() {
        if spread.occupation(i).iter().any(|&m| m >= 2) {
            spread.amplitudes_mut()[i] = Complex64::new(0.0, 0.0);
        }
    }
    let merged = recombine(&spread, n)?;
    let mut out = merged;
    let mut prob = 1.0;
    for mode in (1..n).rev() {
        let (next, p) = project_and_renormalize(&out, mode, 0)?;
        out = next;
        prob *= p;
    }
    let scale = prob.sqrt();
    out.amplitudes_mut().iter_mut().for_each(|a| *a *= scale);
    Ok(out)
}

/// Fidelity of [`oracle_ar_output`] against the untruncated input.
pub fn oracle_ar_teleport(input: &GaussianPure, n: usize, policy: &TruncationPolicy) -> Result<FidelityReport> {
    let out = oracle_ar_output(input, n, policy)?;
    let full = input_state(input, policy)?;
    let success_prob = out.norm_sqr();
    let overlap: Complex64 = out.amplitudes().iter().zip(full.amplitudes()).map(|(o, i)| i.conj() * o).sum();
    let fidelity = if success_prob > 0.0 { overlap.norm_sqr() / success_prob } else { 0.0 };
    Ok(FidelityReport {
        scheme: Scheme::Ar,
        method: Method::FockOracle,
        input: *input,
        fidelity,
        success_prob,
        entropy_ebits: n as f64,
        energy_units: n as f64,
        error_estimate: full.tail_mass(),
        resource: None,
        gain: None,
        branches: Some(n),
    })
}

/// Radial resolution and tolerances of the phase-space oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleVbkSettings {
    pub radial_nodes: usize,
    pub coarse_radial_nodes: usize,
    pub grid_tol: f64,
    pub extent_tol: f64,
}

impl Default for OracleVbkSettings {
    fn default() -> Self {
        Self {
            radial_nodes: 96,
            coarse_radial_nodes: 64,
            grid_tol: 1e-8,
            extent_tol: 1e-15,
        }
    }
}

/// VBK fidelity `(1/π)∫d²α χ_in(α)χ_in(−gα)χ_AB(−gα*, −α)` with every
/// characteristic function evaluated as a Fock-space trace.
///
/// In polar coordinates `α = ρe^{iϕ}` each single-mode trace is a Fourier
/// series in `ϕ` whose coefficients depend on `ρ` only, and the resource factor
/// (supported on `|n, n⟩`) does not depend on `ϕ` at all, so the angular
/// integral is done exactly and only the radial one is discretized
/// (Gauss–Legendre, checked against a coarser rule).
pub fn oracle_vbk_teleport(
    input: &GaussianPure,
    res: &SqueezedBellResource,
    gain: f64,
    policy: &TruncationPolicy,
    settings: &OracleVbkSettings,
) -> Result<FidelityReport> {
    if !(0.0..=1.0).contains(&gain) {
        return Err(Error::InvalidParameter(format!("gain {gain} outside [0, 1]")));
    }
    let psi_state = input_state(input, policy)?;
    let psi = psi_state.amplitudes();
    let k_in = psi.len();
    let resource = res.fock_state(policy)?;
    let k_res = policy.cutoff;
    let diag: Vec<Complex64> = (0..k_res).map(|n| resource.amplitude(&[n, n])).collect::<Result<_>>()?;
    let diag_mass = fsum(diag.iter().map(|c| c.norm_sqr()));
    if (resource.norm_sqr() - diag_mass).abs() > 1e-14 {
        return Err(Error::InvalidParameter("resource state is not supported on |n, n⟩".into()));
    }

    let extent = radial_extent(input, res, gain, settings.extent_tol);
    let engine = engine_for(extent, k_in.max(k_res))?;

    let integrand = |rho: f64| -> f64 {
        let g_full = engine.position_block(std::f64::consts::SQRT_2 * rho, k_in.max(k_res));
        let g_scaled = engine.position_block(std::f64::consts::SQRT_2 * gain * rho, k_in.max(k_res));
        // Fourier coefficients h_d = Σ_{n−m=d} ψ_n* ψ_m G_nm
        let h = |g: &nalgebra::DMatrix<Complex64>| -> Vec<Complex64> {
            let mut out = vec![Complex64::new(0.0, 0.0); 2 * k_in - 1];
            for n in 0..k_in {
                for m in 0..k_in {
                    out[n + k_in - 1 - m] += psi[n].conj() * psi[m] * g[(n, m)];
                }
            }
            out
        };
        let (h_full, h_scaled) = (h(&g_full), h(&g_scaled));
        let mut angular = Complex64::new(0.0, 0.0);
        for d in -(k_in as isize - 1)..=(k_in as isize - 1) {
            let sign = if d.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            angular += sign * h_full[(d + k_in as isize - 1) as usize] * h_scaled[(-d + k_in as isize - 1) as usize];
        }
        let mut chi_res = Complex64::new(0.0, 0.0);
        for n in 0..k_res {
            for m in 0..k_res {
                let sign = if (n + m) % 2 == 0 { 1.0 } else { -1.0 };
                chi_res += sign * diag[n].conj() * diag[m] * g_scaled[(n, m)] * g_full[(n, m)];
            }
        }
        // (1/π)·2π·ρ
        (2.0 * rho * angular * chi_res).re
    };

    let radial = |nodes: usize| fsum(GaussLegendre::new(nodes).on_interval(0.0, extent).map(|(x, w)| w * integrand(x)));
    let fine = radial(settings.radial_nodes);
    let coarse = radial(settings.coarse_radial_nodes);
    let edge = integrand(extent).abs();
    let estimate = (fine - coarse).abs() + edge;
    if estimate > settings.grid_tol {
        return Err(Error::GridResolutionInsufficient {
            estimate,
            tol: settings.grid_tol,
        });
    }

    let lambdas = schmidt_coefficients(&resource)?;
    let energy = resource.mean_photon_number(0)? + resource.mean_photon_number(1)?;
    Ok(FidelityReport {
        scheme: Scheme::Vbk,
        method: Method::FockOracle,
        input: *input,
        fidelity: fine,
        success_prob: 1.0,
        entropy_ebits: entropy_bits(&lambdas),
        energy_units: energy,
        error_estimate: estimate,
        resource: Some(*res),
        gain: Some(gain),
        branches: None,
    })
}

/// Radius beyond which the integrand's Gaussian envelope (with a quartic
/// allowance for the resource polynomial) drops below `tol`.
fn radial_extent(input: &GaussianPure, res: &SqueezedBellResource, gain: f64, tol: f64) -> f64 {
    let (c, s) = (res.r.cosh(), res.r.sinh());
    let rot = Complex64::from_polar(s, res.phi_zeta);
    let k_res = (gain * c + rot).norm_sqr() + (c + gain * rot).norm_sqr();
    let kappa = 0.5 * ((1.0 + gain * gain) * (-2.0 * input.s).exp() + k_res);
    let mut rho = 1.0;
    while rho * (-kappa * rho * rho).exp() * (1.0 + k_res * rho * rho).powi(2) > tol {
        rho += 0.25;
    }
    rho
}
