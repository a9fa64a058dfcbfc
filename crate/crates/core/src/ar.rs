//! Probabilistic hybrid teleportation: an `N`-branch splitter, qubit
//! teleporters on every branch and post-selected recombination map `|ψ⟩` to
//! `Σ_{k≤N} w_k ⟨k|ψ⟩ |k⟩` with `w_k = C(N,k) k!/N^k`.

use crate::error::{Error, Result};
use crate::gauss::GaussianPure;
use crate::quadrature::fsum;
use crate::report::{FidelityReport, Method, Scheme};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArConfig {
    pub branches: usize,
    /// Largest Fock index kept in the overlap sums.
    pub overlap_cutoff: usize,
}

impl ArConfig {
    pub fn new(branches: usize) -> Result<Self> {
        if branches == 0 {
            return Err(Error::InvalidParameter("the splitter needs at least one branch".into()));
        }
        Ok(Self {
            branches,
            overlap_cutoff: branches,
        })
    }
}

/// `w_k = N!/((N−k)! N^k)` for `k = 0..=N`, accumulated in log space.
pub fn branch_weights(n: usize) -> Vec<f64> {
    let ln_n = (n as f64).ln();
    let mut out = Vec::with_capacity(n + 1);
    let mut log_w = 0.0;
    out.push(1.0);
    for k in 1..=n {
        // w_k / w_{k−1} = (N − k + 1)/N
        log_w += ((n - k + 1) as f64).ln() - ln_n;
        out.push(log_w.exp());
    }
    out
}

/// `(P_suc, Σ w_k |ψ_k|²)` from the populations `p_k = |⟨k|ψ⟩|²`.
pub fn success_and_overlap(populations: &[f64], weights: &[f64]) -> (f64, f64) {
    let p = fsum(populations.iter().zip(weights).map(|(p, w)| p * w * w));
    let o = fsum(populations.iter().zip(weights).map(|(p, w)| p * w));
    (p, o)
}

fn populations(input: &GaussianPure, n: usize) -> Vec<f64> {
    input.fock_amplitudes(n + 1).iter().map(|a| a.norm_sqr()).collect()
}

pub fn ar_success_prob(input: &GaussianPure, n: usize) -> Result<f64> {
    let cfg = ArConfig::new(n)?;
    let (p, _) = success_and_overlap(&populations(input, cfg.overlap_cutoff), &branch_weights(n));
    Ok(p)
}

/// `F = (Σ w_k |⟨k|ψ⟩|²)² / P_suc`.
pub fn ar_fidelity(input: &GaussianPure, n: usize) -> Result<FidelityReport> {
    let cfg = ArConfig::new(n)?;
    let (p, o) = success_and_overlap(&populations(input, cfg.overlap_cutoff), &branch_weights(n));
    let fidelity = if p > 0.0 { o * o / p } else { 0.0 };
    Ok(FidelityReport {
        scheme: Scheme::Ar,
        method: Method::Analytic,
        input: *input,
        fidelity,
        success_prob: p,
        entropy_ebits: n as f64,
        energy_units: n as f64,
        error_estimate: 16.0 * f64::EPSILON,
        resource: None,
        gain: None,
        branches: Some(n),
    })
}
