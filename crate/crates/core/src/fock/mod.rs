//! Truncated Fock-space numerics.
//!
//! Every operator is applied as the exponential of its generator truncated to
//! the declared cutoff, and physical states are checked post hoc for a
//! negligible population near the top of the basis. This module is the
//! brute-force reference against which the closed-form modules are tested.

mod expm;
pub mod oracle;
pub mod phase_space;

pub use expm::Generator;
pub use oracle::{oracle_ar_output, oracle_ar_teleport, oracle_vbk_teleport, OracleVbkSettings};

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Cutoff and tail tolerance for a truncated basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub cutoff: usize,
    pub tail_tol: f64,
}

impl TruncationPolicy {
    pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

    pub fn new(cutoff: usize, tail_tol: f64) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::CutoffTooSmall { cutoff, min: 2 });
        }
        if !(tail_tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tail tolerance {tail_tol} must be positive")));
        }
        Ok(Self { cutoff, tail_tol })
    }

    pub fn with_cutoff(cutoff: usize) -> Result<Self> {
        Self::new(cutoff, Self::DEFAULT_TAIL_TOL)
    }
}

/// Complex amplitudes over a truncated multimode Fock basis.
///
/// Amplitudes are stored row-major with mode 0 most significant, so the flat
/// index of `(n₀, …, n_{m−1})` is `Σ nᵢ·strideᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<Complex64>,
    cutoffs: Vec<usize>,
    tail_tol: f64,
}

impl FockVector {
    /// The all-vacuum state on `modes` modes, each truncated at `policy.cutoff`.
    pub fn vacuum(modes: usize, policy: &TruncationPolicy) -> Self {
        Self::basis(&vec![0; modes], &vec![policy.cutoff; modes], policy.tail_tol)
            .expect("vacuum index is always in range")
    }

    /// The Fock basis state `|n₀, …⟩`.
    pub fn basis(occupation: &[usize], cutoffs: &[usize], tail_tol: f64) -> Result<Self> {
        let mut v = Self::zeros(cutoffs, tail_tol)?;
        let idx = v.flat_index(occupation)?;
        v.amps[idx] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn zeros(cutoffs: &[usize], tail_tol: f64) -> Result<Self> {
        if let Some(&c) = cutoffs.iter().find(|&&c| c < 2) {
            return Err(Error::CutoffTooSmall { cutoff: c, min: 2 });
        }
        let len = cutoffs.iter().product();
        Ok(Self {
            amps: vec![ZERO; len],
            cutoffs: cutoffs.to_vec(),
            tail_tol,
        })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>, cutoffs: &[usize], tail_tol: f64) -> Result<Self> {
        let mut v = Self::zeros(cutoffs, tail_tol)?;
        if amps.len() != v.amps.len() {
            return Err(Error::InvalidParameter(format!(
                "{} amplitudes for a basis of size {}",
                amps.len(),
                v.amps.len()
            )));
        }
        v.amps = amps;
        Ok(v)
    }

    pub fn modes(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.modes()];
        for m in (0..self.modes().saturating_sub(1)).rev() {
            strides[m] = strides[m + 1] * self.cutoffs[m + 1];
        }
        strides
    }

    pub fn flat_index(&self, occupation: &[usize]) -> Result<usize> {
        if occupation.len() != self.modes() {
            return Err(Error::InvalidParameter(format!(
                "occupation has {} entries for a {}-mode state",
                occupation.len(),
                self.modes()
            )));
        }
        let mut idx = 0;
        for (m, (&n, &c)) in occupation.iter().zip(&self.cutoffs).enumerate() {
            if n >= c {
                return Err(Error::InvalidParameter(format!("occupation {n} of mode {m} exceeds cutoff {c}")));
            }
            idx = idx * c + n;
        }
        Ok(idx)
    }

    pub fn occupation(&self, mut flat: usize) -> Vec<usize> {
        let mut occ = vec![0; self.modes()];
        for m in (0..self.modes()).rev() {
            occ[m] = flat % self.cutoffs[m];
            flat /= self.cutoffs[m];
        }
        occ
    }

    pub fn amplitude(&self, occupation: &[usize]) -> Result<Complex64> {
        Ok(self.amps[self.flat_index(occupation)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        crate::quadrature::fsum(self.amps.iter().map(|a| a.norm_sqr()))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockVector) -> Result<Complex64> {
        if self.cutoffs != other.cutoffs {
            return Err(Error::InvalidParameter("inner product of vectors on different bases".into()));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Population carried by basis states whose occupation of some mode lies in
    /// the top 10% of that mode's index range.
    pub fn tail_mass(&self) -> f64 {
        let thresholds: Vec<usize> = self.cutoffs.iter().map(|&c| c - c.div_ceil(10)).collect();
        crate::quadrature::fsum(self.amps.iter().enumerate().filter_map(|(i, a)| {
            let occ = self.occupation(i);
            occ.iter()
                .zip(&thresholds)
                .any(|(&n, &t)| n >= t)
                .then(|| a.norm_sqr())
        }))
    }

    pub fn check_tail(&self) -> Result<()> {
        let tail = self.tail_mass();
        if tail > self.tail_tol {
            return Err(Error::TailTooLarge {
                tail,
                tol: self.tail_tol,
                cutoff: self.cutoffs.iter().copied().max().unwrap_or(0),
            });
        }
        Ok(())
    }

    /// `⟨n̂_mode⟩` (unnormalized if the vector is sub-normalized).
    pub fn mean_photon_number(&self, mode: usize) -> Result<f64> {
        self.check_mode(mode)?;
        Ok(crate::quadrature::fsum(
            self.amps
                .iter()
                .enumerate()
                .map(|(i, a)| self.occupation(i)[mode] as f64 * a.norm_sqr()),
        ))
    }

    /// Probability distribution of the total photon number.
    pub fn total_number_distribution(&self) -> Vec<f64> {
        let max_total: usize = self.cutoffs.iter().map(|c| c - 1).sum();
        let mut dist = vec![0.0; max_total + 1];
        for (i, a) in self.amps.iter().enumerate() {
            let n: usize = self.occupation(i).iter().sum();
            dist[n] += a.norm_sqr();
        }
        dist
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes() {
            return Err(Error::ModeIndexOutOfRange {
                index: mode,
                modes: self.modes(),
            });
        }
        Ok(())
    }

    fn require_modes(&self, modes: usize) -> Result<()> {
        if self.modes() != modes {
            return Err(Error::InvalidParameter(format!(
                "operation needs a {modes}-mode state, got {} modes",
                self.modes()
            )));
        }
        Ok(())
    }

    /// Applies `exp(G)` independently to every one-mode fiber of `mode`.
    fn apply_along_mode(&mut self, mode: usize, generator: &Generator) {
        let strides = self.strides();
        let stride = strides[mode];
        let cutoff = self.cutoffs[mode];
        let mut fiber = vec![ZERO; cutoff];
        for base in 0..self.amps.len() {
            if (base / stride) % cutoff != 0 {
                continue;
            }
            let mut any = false;
            for (k, f) in fiber.iter_mut().enumerate() {
                *f = self.amps[base + k * stride];
                any |= *f != ZERO;
            }
            if !any {
                continue;
            }
            let out = generator.expm_apply(&fiber);
            for (k, v) in out.into_iter().enumerate() {
                self.amps[base + k * stride] = v;
            }
        }
    }
}

/// Truncated generator of `Ŝ(ξ) = exp[−ξ/2 â†² + ξ*/2 â²]`.
pub fn squeeze_generator(cutoff: usize, xi: Complex64) -> Generator {
    let mut g = Generator::new(cutoff);
    for n in 0..cutoff.saturating_sub(2) {
        let s = (((n + 1) * (n + 2)) as f64).sqrt();
        g.push(n + 2, n, -xi * 0.5 * s);
        g.push(n, n + 2, xi.conj() * 0.5 * s);
    }
    g
}

/// Truncated generator of `D̂(α) = exp[α â† − α* â]`.
pub fn displacement_generator(cutoff: usize, alpha: Complex64) -> Generator {
    let mut g = Generator::new(cutoff);
    for n in 0..cutoff - 1 {
        let s = ((n + 1) as f64).sqrt();
        g.push(n + 1, n, alpha * s);
        g.push(n, n + 1, -alpha.conj() * s);
    }
    g
}

/// Squeezes `mode` of a (possibly multimode) state.
pub fn apply_squeeze(state: &FockVector, mode: usize, xi: Complex64) -> Result<FockVector> {
    state.check_mode(mode)?;
    let mut out = state.clone();
    out.apply_along_mode(mode, &squeeze_generator(state.cutoffs[mode], xi));
    out.check_tail()?;
    Ok(out)
}

/// Displaces `mode` of a (possibly multimode) state.
pub fn apply_displace(state: &FockVector, mode: usize, alpha: Complex64) -> Result<FockVector> {
    state.check_mode(mode)?;
    let mut out = state.clone();
    out.apply_along_mode(mode, &displacement_generator(state.cutoffs[mode], alpha));
    out.check_tail()?;
    Ok(out)
}

/// `Ŝ(ξ)|state⟩` for a single-mode state.
pub fn apply_squeeze_1m(state: &FockVector, xi: Complex64) -> Result<FockVector> {
    state.require_modes(1)?;
    apply_squeeze(state, 0, xi)
}

/// `D̂(α)|state⟩` for a single-mode state.
pub fn apply_displace_1m(state: &FockVector, alpha: Complex64) -> Result<FockVector> {
    state.require_modes(1)?;
    apply_displace(state, 0, alpha)
}

/// `Ŝ_AB(ζ)|state⟩` with `Ŝ_AB(ζ) = exp[−ζ â_A†â_B† + ζ* â_A â_B]` on a two-mode state.
///
/// The generator preserves `n_A − n_B`, so it is exponentiated separately on
/// each (tridiagonal) difference block; blocks with no population are skipped.
pub fn apply_two_mode_squeeze(state: &FockVector, zeta: Complex64) -> Result<FockVector> {
    state.require_modes(2)?;
    let (ca, cb) = (state.cutoffs[0], state.cutoffs[1]);
    let mut out = state.clone();
    let diffs = -(cb as isize - 1)..=(ca as isize - 1);
    for d in diffs {
        // block members (m + max(d,0), m + max(-d,0))
        let (a0, b0) = (d.max(0) as usize, (-d).max(0) as usize);
        let len = (ca - a0).min(cb - b0);
        let idx: Vec<usize> = (0..len).map(|m| (a0 + m) * cb + (b0 + m)).collect();
        if idx.iter().all(|&i| out.amps[i] == ZERO) {
            continue;
        }
        let mut g = Generator::new(len);
        for m in 0..len.saturating_sub(1) {
            let s = (((a0 + m + 1) * (b0 + m + 1)) as f64).sqrt();
            g.push(m + 1, m, -zeta * s);
            g.push(m, m + 1, zeta.conj() * s);
        }
        let block: Vec<Complex64> = idx.iter().map(|&i| out.amps[i]).collect();
        for (&i, v) in idx.iter().zip(g.expm_apply(&block)) {
            out.amps[i] = v;
        }
    }
    out.check_tail()?;
    Ok(out)
}

/// Beam splitter `exp[θ(â_i†â_j − â_i â_j†)]` with `cos θ = √t`.
///
/// With all population in mode `j`, a photon ends up in mode `i` with amplitude
/// `+sin θ`. The total photon number of the pair is conserved exactly; each
/// fixed-total block is exponentiated on its own, which is exact whenever
/// `n_i + n_j` stays below both cutoffs.
pub fn apply_beam_splitter(state: &FockVector, mode_i: usize, mode_j: usize, transmissivity: f64) -> Result<FockVector> {
    state.check_mode(mode_i)?;
    state.check_mode(mode_j)?;
    if mode_i == mode_j {
        return Err(Error::InvalidParameter("beam splitter needs two distinct modes".into()));
    }
    if !(0.0..=1.0).contains(&transmissivity) {
        return Err(Error::InvalidParameter(format!("transmissivity {transmissivity} outside [0, 1]")));
    }
    let theta = transmissivity.sqrt().acos();
    let strides = state.strides();
    let (si, sj) = (strides[mode_i], strides[mode_j]);
    let (ci, cj) = (state.cutoffs[mode_i], state.cutoffs[mode_j]);
    let mut out = state.clone();
    for base in 0..state.amps.len() {
        if (base / si) % ci != 0 || (base / sj) % cj != 0 {
            continue;
        }
        for total in 0..(ci + cj - 1) {
            // members |k, total − k⟩ with both occupations inside their cutoffs
            let k_lo = total.saturating_sub(cj - 1);
            let k_hi = total.min(ci - 1);
            if k_lo > k_hi {
                continue;
            }
            let idx: Vec<usize> = (k_lo..=k_hi).map(|k| base + k * si + (total - k) * sj).collect();
            if idx.iter().all(|&i| out.amps[i] == ZERO) {
                continue;
            }
            let mut g = Generator::new(idx.len());
            for (pos, k) in (k_lo..k_hi).enumerate() {
                // â_i†â_j |k, total−k⟩ = √((k+1)(total−k)) |k+1, total−k−1⟩
                let s = (((k + 1) * (total - k)) as f64).sqrt() * theta;
                g.push(pos + 1, pos, Complex64::new(s, 0.0));
                g.push(pos, pos + 1, Complex64::new(-s, 0.0));
            }
            let block: Vec<Complex64> = idx.iter().map(|&i| out.amps[i]).collect();
            for (&i, v) in idx.iter().zip(g.expm_apply(&block)) {
                out.amps[i] = v;
            }
        }
    }
    Ok(out)
}

/// Projects `mode` onto `|outcome⟩`, returning the normalized state of the
/// remaining modes together with the outcome probability.
///
/// A zero-probability outcome yields the zero vector and probability 0.
pub fn project_and_renormalize(state: &FockVector, mode: usize, outcome: usize) -> Result<(FockVector, f64)> {
    state.check_mode(mode)?;
    if outcome >= state.cutoffs[mode] {
        return Err(Error::InvalidParameter(format!(
            "outcome {outcome} outside cutoff {} of mode {mode}",
            state.cutoffs[mode]
        )));
    }
    let remaining: Vec<usize> = state
        .cutoffs
        .iter()
        .enumerate()
        .filter_map(|(m, &c)| (m != mode).then_some(c))
        .collect();
    let mut amps = Vec::with_capacity(remaining.iter().product());
    for (i, a) in state.amps.iter().enumerate() {
        if state.occupation(i)[mode] == outcome {
            amps.push(*a);
        }
    }
    let probability = crate::quadrature::fsum(amps.iter().map(|a| a.norm_sqr()));
    if probability > 0.0 {
        let scale = 1.0 / probability.sqrt();
        amps.iter_mut().for_each(|a| *a *= scale);
    }
    let out = FockVector {
        amps,
        cutoffs: remaining,
        tail_tol: state.tail_tol,
    };
    Ok((out, probability))
}

/// Schmidt coefficients `λ_n` (descending) of a two-mode pure state.
///
/// States supported on `|n, n⟩` are read off the diagonal; anything else goes
/// through a singular value decomposition of the coefficient matrix.
pub fn schmidt_coefficients(state: &FockVector) -> Result<Vec<f64>> {
    state.require_modes(2)?;
    let (ca, cb) = (state.cutoffs[0], state.cutoffs[1]);
    let off_diagonal: f64 = state
        .amps
        .iter()
        .enumerate()
        .filter(|(i, _)| i / cb != i % cb)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    let mut lambdas: Vec<f64> = if off_diagonal == 0.0 {
        (0..ca.min(cb)).map(|n| state.amps[n * cb + n].norm_sqr()).collect()
    } else {
        let m = nalgebra::DMatrix::from_fn(ca, cb, |i, j| state.amps[i * cb + j]);
        m.singular_values().iter().map(|s| s * s).collect()
    };
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok(lambdas)
}

/// Von Neumann entropy in bits of a probability vector.
pub fn entropy_bits(probabilities: &[f64]) -> f64 {
    -crate::quadrature::fsum(
        probabilities
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.log2()),
    )
}

#[cfg(test)]
mod tests;
