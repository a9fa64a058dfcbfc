//! Random cross-checks of the fast fidelity paths against the Fock-space
//! oracle.

use crate::error::CliResult;
use crate::table::format_number;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};
use teleport_core::ar::ar_fidelity;
use teleport_core::fock::{oracle_ar_teleport, oracle_vbk_teleport, OracleVbkSettings, TruncationPolicy};
use teleport_core::vbk::{vbk_fidelity, vbk_fidelity_quadrature, VbkConfig};
use teleport_core::{GaussianPure, SqueezedBellResource};

pub const AR_TOL: f64 = 1e-8;
pub const VBK_TOL: f64 = 1e-5;
pub const AR_CUTOFF: usize = 140;
pub const VBK_CUTOFF: usize = 80;

#[derive(Debug, Clone, Serialize)]
pub struct VbkCase {
    pub input: GaussianPure,
    pub resource: SqueezedBellResource,
    pub gain: f64,
    pub moments: f64,
    pub quadrature: f64,
    pub oracle: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ArCase {
    pub input: GaussianPure,
    pub branches: usize,
    pub fidelity: f64,
    pub oracle_fidelity: f64,
    pub success_prob: f64,
    pub oracle_success_prob: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSummary {
    pub ar: Vec<ArCase>,
    pub vbk: Vec<VbkCase>,
    pub ar_max_diff: f64,
    pub vbk_quadrature_max_diff: f64,
    pub vbk_oracle_max_diff: f64,
    #[serde(skip)]
    pub lines: Vec<String>,
}

impl OracleSummary {
    pub fn passed(&self) -> bool {
        self.ar_max_diff <= AR_TOL && self.vbk_quadrature_max_diff <= VBK_TOL && self.vbk_oracle_max_diff <= VBK_TOL
    }
}

fn random_input(rng: &mut ChaCha8Rng, max_alpha: f64, max_s: f64) -> GaussianPure {
    let a = Complex64::from_polar(rng.gen_range(0.0..max_alpha), rng.gen_range(0.0..TAU));
    GaussianPure::new(a, rng.gen_range(0.0..max_s), rng.gen_range(0.0..TAU))
}

/// `cases` inputs for AR (cycling `N = 1, 2, 3`) and `cases` small-parameter
/// input/resource/gain triples for VBK.
pub fn check(cases: usize, seed: u64) -> CliResult<OracleSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ar_inputs: Vec<(GaussianPure, usize)> = (0..cases).map(|k| (random_input(&mut rng, 1.0, 0.8), 1 + k % 3)).collect();
    let mut vbk_inputs = Vec::with_capacity(cases);
    for _ in 0..cases {
        let input = random_input(&mut rng, 0.6, 0.4);
        let res = SqueezedBellResource::new(
            rng.gen_range(0.1..0.8),
            rng.gen_range(0.0..TAU),
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..TAU),
        )?;
        vbk_inputs.push((input, res, rng.gen_range(0.5..=1.0)));
    }

    let ar_policy = TruncationPolicy::new(AR_CUTOFF, 1e-12)?;
    let ar: Vec<ArCase> = ar_inputs
        .par_iter()
        .map(|&(input, n)| {
            let fast = ar_fidelity(&input, n)?;
            let slow = oracle_ar_teleport(&input, n, &ar_policy)?;
            Ok(ArCase {
                input,
                branches: n,
                fidelity: fast.fidelity,
                oracle_fidelity: slow.fidelity,
                success_prob: fast.success_prob,
                oracle_success_prob: slow.success_prob,
            })
        })
        .collect::<teleport_core::Result<_>>()?;

    let vbk_policy = TruncationPolicy::with_cutoff(VBK_CUTOFF)?;
    let vbk: Vec<VbkCase> = vbk_inputs
        .par_iter()
        .map(|&(input, res, gain)| {
            let cfg = VbkConfig::new(gain)?;
            Ok(VbkCase {
                input,
                resource: res,
                gain,
                moments: vbk_fidelity(&input, &res, &cfg)?.fidelity,
                quadrature: vbk_fidelity_quadrature(&input, &res, &cfg)?.fidelity,
                oracle: oracle_vbk_teleport(&input, &res, gain, &vbk_policy, &OracleVbkSettings::default())?.fidelity,
            })
        })
        .collect::<teleport_core::Result<_>>()?;

    let ar_max_diff = ar
        .iter()
        .map(|c| (c.fidelity - c.oracle_fidelity).abs().max((c.success_prob - c.oracle_success_prob).abs()))
        .fold(0.0, f64::max);
    let vbk_quadrature_max_diff = vbk.iter().map(|c| (c.moments - c.quadrature).abs()).fold(0.0, f64::max);
    let vbk_oracle_max_diff = vbk.iter().map(|c| (c.moments - c.oracle).abs()).fold(0.0, f64::max);

    let mut lines = Vec::new();
    for (k, c) in ar.iter().enumerate() {
        lines.push(format!(
            "ar  case {k:>2} N={}: F {} oracle {} | P {} oracle {}",
            c.branches,
            format_number(c.fidelity),
            format_number(c.oracle_fidelity),
            format_number(c.success_prob),
            format_number(c.oracle_success_prob)
        ));
    }
    for (k, c) in vbk.iter().enumerate() {
        lines.push(format!(
            "vbk case {k:>2} g={:.3}: moments {} quadrature {} oracle {}",
            c.gain,
            format_number(c.moments),
            format_number(c.quadrature),
            format_number(c.oracle)
        ));
    }
    Ok(OracleSummary {
        ar,
        vbk,
        ar_max_diff,
        vbk_quadrature_max_diff,
        vbk_oracle_max_diff,
        lines,
    })
}
