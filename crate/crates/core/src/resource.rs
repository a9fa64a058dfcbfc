//! Shared entangled resources: squeezed Bell-like states `Ŝ_AB(ζ)[cos δ|0,0⟩ + e^{iθ} sin δ|1,1⟩]`
//! with `ζ = r e^{iφ_ζ}`, and bundles of two-qubit Bell pairs.

use crate::error::{Error, Result};
use crate::fock::{self, FockVector, TruncationPolicy};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Cutoffs tried by the adaptive entropy/energy evaluation.
pub const ENTROPY_INITIAL_CUTOFF: usize = 40;
pub const ENTROPY_MAX_CUTOFF: usize = 20480;
pub const ENTROPY_TAIL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezedBellResource {
    pub r: f64,
    pub phi_zeta: f64,
    pub delta: f64,
    pub theta: f64,
}

impl SqueezedBellResource {
    pub fn new(r: f64, phi_zeta: f64, delta: f64, theta: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameter(format!("squeezing r = {r} must be finite and non-negative")));
        }
        if ![phi_zeta, delta, theta].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidParameter("resource angles must be finite".into()));
        }
        Ok(Self {
            r,
            phi_zeta: phi_zeta.rem_euclid(TAU),
            delta,
            theta,
        })
    }

    /// Two-mode squeezed vacuum with the phase `φ_ζ = π` that makes the
    /// unit-gain teleporter approach the identity as `r → ∞`.
    pub fn tmsv(r: f64) -> Self {
        Self {
            r,
            phi_zeta: PI,
            delta: 0.0,
            theta: 0.0,
        }
    }

    pub fn with_r(self, r: f64) -> Self {
        Self { r, ..self }
    }

    pub fn zeta(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.phi_zeta)
    }

    /// `χ_SB(α₁, α₂) = Tr[D̂_A(−α₁)D̂_B(−α₂)ρ̂]`.
    ///
    /// The Gaussian arguments are `ξ₁ = α₁ cosh r + α₂* e^{iφ_ζ} sinh r` and
    /// `ξ₂ = α₂ cosh r + α₁* e^{iφ_ζ} sinh r`.
    pub fn char_fn(&self, alpha1: Complex64, alpha2: Complex64) -> Complex64 {
        let (c, s) = (self.r.cosh(), self.r.sinh());
        let rot = Complex64::from_polar(s, self.phi_zeta);
        let xi1 = alpha1 * c + alpha2.conj() * rot;
        let xi2 = alpha2 * c + alpha1.conj() * rot;
        let (n1, n2) = (xi1.norm_sqr(), xi2.norm_sqr());
        let (sd, cd) = self.delta.sin_cos();
        let e = Complex64::from_polar(1.0, self.theta);
        let poly = cd * cd + sd * cd * (e * xi1.conj() * xi2.conj() + e.conj() * xi1 * xi2) + sd * sd * (1.0 - n1) * (1.0 - n2);
        poly * (-0.5 * (n1 + n2)).exp()
    }

    /// Amplitudes `c_m` of `|m, m⟩` for `m < len`, up to the common phase `e^{imφ_ζ}`.
    ///
    /// `Ŝ_AB` conserves `n_A − n_B`, so the state lives on `|m, m⟩`. Conjugating
    /// `â†b̂†` through the squeezer gives
    /// `c_m = cos δ (−t)^m / cosh r + e^{i(θ−φ_ζ)} sin δ (m − sinh²r)(−t)^{m−1} / cosh³ r`
    /// with `t = tanh r` (the `m = 0` term of the second part is `sinh r / cosh² r`).
    pub fn diagonal_amplitudes(&self, len: usize) -> Vec<Complex64> {
        let (c, s, t) = (self.r.cosh(), self.r.sinh(), self.r.tanh());
        let (sd, cd) = self.delta.sin_cos();
        let mix = Complex64::from_polar(sd, self.theta - self.phi_zeta);
        let mut out = Vec::with_capacity(len);
        let mut pow = 1.0; // (−t)^{m−1}
        for m in 0..len {
            let second = if m == 0 { s / (c * c) } else { (m as f64 - s * s) * pow / (c * c * c) };
            let first = if m == 0 { 1.0 / c } else { -t * pow / c };
            out.push(cd * first + mix * second);
            if m > 0 {
                pow *= -t;
            }
        }
        out
    }

    /// Schmidt coefficients `|c_m|²` with the cutoff doubled from 40 until the top
    /// 10% of the index range carries less than 1e-12.
    pub fn schmidt_coefficients(&self) -> Result<Vec<f64>> {
        let mut cutoff = ENTROPY_INITIAL_CUTOFF;
        loop {
            let probs: Vec<f64> = self.diagonal_amplitudes(cutoff).iter().map(|a| a.norm_sqr()).collect();
            let tail: f64 = probs[cutoff - cutoff.div_ceil(10)..].iter().sum();
            if tail < ENTROPY_TAIL_TOL {
                return Ok(probs);
            }
            if cutoff >= ENTROPY_MAX_CUTOFF {
                return Err(Error::TailTooLarge {
                    tail,
                    tol: ENTROPY_TAIL_TOL,
                    cutoff,
                });
            }
            cutoff *= 2;
        }
    }

    /// Entanglement entropy in ebits.
    pub fn entropy(&self) -> Result<f64> {
        Ok(fock::entropy_bits(&self.schmidt_coefficients()?))
    }

    /// Mean photon number `⟨n̂_A + n̂_B⟩`.
    pub fn energy(&self) -> f64 {
        let (sd, cd) = self.delta.sin_cos();
        let sh = self.r.sinh();
        let ch = self.r.cosh();
        2.0 * sh * sh * (1.0 + sd * sd) + 2.0 * sd * sd * ch * ch
            - 2.0 * sd * cd * (2.0 * self.r).sinh() * (self.theta - self.phi_zeta).cos()
    }

    /// The resource as a two-mode Fock vector, built by applying the truncated
    /// two-mode squeezer to `cos δ|0,0⟩ + e^{iθ} sin δ|1,1⟩`.
    pub fn fock_state(&self, policy: &TruncationPolicy) -> Result<FockVector> {
        let cutoffs = [policy.cutoff, policy.cutoff];
        let mut seed = FockVector::zeros(&cutoffs, policy.tail_tol)?;
        let (sd, cd) = self.delta.sin_cos();
        let i00 = seed.flat_index(&[0, 0])?;
        let i11 = seed.flat_index(&[1, 1])?;
        seed.amplitudes_mut()[i00] = Complex64::new(cd, 0.0);
        seed.amplitudes_mut()[i11] = Complex64::from_polar(sd, self.theta);
        fock::apply_two_mode_squeeze(&seed, self.zeta())
    }
}

/// Closed-form TMSV entropy `cosh²r log₂ cosh²r − sinh²r log₂ sinh²r`.
pub fn tmsv_entropy(r: f64) -> f64 {
    let c2 = r.cosh().powi(2);
    let s2 = r.sinh().powi(2);
    if s2 == 0.0 {
        return 0.0;
    }
    c2 * c2.log2() - s2 * s2.log2()
}

/// Free-function form of [`SqueezedBellResource::char_fn`].
pub fn char_fn_sb(res: &SqueezedBellResource, alpha1: Complex64, alpha2: Complex64) -> Complex64 {
    res.char_fn(alpha1, alpha2)
}

pub fn entropy_sb(res: &SqueezedBellResource) -> Result<f64> {
    res.entropy()
}

pub fn energy_sb(res: &SqueezedBellResource) -> f64 {
    res.energy()
}

/// `N` two-qubit Bell pairs `(|10⟩ + |01⟩)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BellBundle {
    n: usize,
}

impl BellBundle {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("a Bell bundle needs at least one pair".into()));
        }
        Ok(Self { n })
    }

    pub fn pairs(&self) -> usize {
        self.n
    }
}

/// `(S, E)`: one ebit and one photon per Bell pair.
pub fn bundle_metrics(b: &BellBundle) -> (f64, f64) {
    (b.n as f64, b.n as f64)
}
