//! Pure single-mode Gaussian states `D̂(α)Ŝ(ξ)|0⟩`, `ξ = s e^{iφ}`.
//!
//! Conventions: `D̂(α) = exp(α â† − α* â)`, `Ŝ(ξ) = exp[−ξ/2 â†² + ξ*/2 â²]`,
//! `χ(γ) = Tr[D̂(−γ)ρ̂]`, vacuum quadrature variance 1/2.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_10, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPure {
    pub alpha: Complex64,
    pub s: f64,
    pub phi: f64,
}

impl GaussianPure {
    /// Builds a state, folding negative `s` into a phase shift of π and
    /// normalizing `φ` to `[0, 2π)`.
    pub fn new(alpha: Complex64, s: f64, phi: f64) -> Self {
        let (s, phi) = if s < 0.0 { (-s, phi + std::f64::consts::PI) } else { (s, phi) };
        Self {
            alpha,
            s,
            phi: phi.rem_euclid(TAU),
        }
    }

    pub fn vacuum() -> Self {
        Self::new(Complex64::new(0.0, 0.0), 0.0, 0.0)
    }

    pub fn coherent(alpha: Complex64) -> Self {
        Self::new(alpha, 0.0, 0.0)
    }

    pub fn squeezed(s: f64, phi: f64) -> Self {
        Self::new(Complex64::new(0.0, 0.0), s, phi)
    }

    pub fn xi(&self) -> Complex64 {
        Complex64::from_polar(self.s, self.phi)
    }

    /// `⟨n̂⟩ = |α|² + sinh² s`.
    pub fn mean_photon_number(&self) -> f64 {
        self.alpha.norm_sqr() + self.s.sinh().powi(2)
    }

    /// Symmetric-ordered characteristic function.
    pub fn char_fn(&self, gamma: Complex64) -> Complex64 {
        let eta = gamma * self.s.cosh() + gamma.conj() * Complex64::from_polar(self.s.sinh(), self.phi);
        let phase = gamma.conj() * self.alpha - gamma * self.alpha.conj();
        (phase - 0.5 * eta.norm_sqr()).exp()
    }

    /// `⟨k|α, ξ⟩`.
    pub fn fock_overlap(&self, k: usize) -> Complex64 {
        self.fock_amplitudes(k + 1)[k]
    }

    /// `⟨k|α, ξ⟩` for `k = 0..len`.
    ///
    /// Upward three-term recursion
    /// `√(k+1) ψ_{k+1} = (γ/cosh s) ψ_k − e^{iφ} tanh s √k ψ_{k−1}`
    /// with `γ = α cosh s + α* e^{iφ} sinh s`, carried as mantissa times a
    /// running log scale so neither large `k` nor a tiny `ψ₀` under/overflows.
    pub fn fock_amplitudes(&self, len: usize) -> Vec<Complex64> {
        if len == 0 {
            return Vec::new();
        }
        let t = self.s.tanh();
        let rot = Complex64::from_polar(1.0, self.phi);
        // γ/cosh s, and ln cosh s without overflow
        let a = self.alpha + self.alpha.conj() * rot * t;
        let b = rot * t;
        let ln_cosh = self.s + (-2.0 * self.s).exp().ln_1p() - std::f64::consts::LN_2;
        let log_psi0 = -0.5 * ln_cosh - 0.5 * self.alpha.norm_sqr() - 0.5 * self.alpha.conj().powi(2) * b;

        let mut log_scale = log_psi0.re;
        let mut prev = Complex64::new(0.0, 0.0);
        let mut cur = Complex64::from_polar(1.0, log_psi0.im);
        let mut out = Vec::with_capacity(len);
        out.push(cur * log_scale.exp());
        for k in 0..len - 1 {
            let next = (a * cur - b * (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
            prev = cur;
            cur = next;
            let mag = cur.norm().max(prev.norm());
            if mag > 1e150 || (mag < 1e-150 && mag > 0.0) {
                prev /= mag;
                cur /= mag;
                log_scale += mag.ln();
            }
            out.push(cur * log_scale.exp());
        }
        out
    }
}

/// Squeezing in dB, `10·log₁₀ e^{2s}`.
pub fn squeezing_db(s: f64) -> f64 {
    20.0 * s / LN_10
}

pub fn db_to_s(db: f64) -> f64 {
    db * LN_10 / 20.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_char_fn_and_normalization() {
        let vac = GaussianPure::vacuum();
        let g = c(0.4, -1.1);
        assert_relative_eq!(vac.char_fn(g).re, (-0.5 * g.norm_sqr()).exp(), max_relative = 1e-15);
        let st = GaussianPure::new(c(0.3, 0.9), 0.7, 2.0);
        assert_eq!(st.char_fn(c(0.0, 0.0)), c(1.0, 0.0));
    }

    #[test]
    fn vacuum_overlaps() {
        let amps = GaussianPure::vacuum().fock_amplitudes(6);
        assert_eq!(amps[0], c(1.0, 0.0));
        assert!(amps[1..].iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn low_order_closed_forms() {
        let st = GaussianPure::new(c(0.4, -0.3), 0.6, 1.2);
        let (ch, sh, t) = (st.s.cosh(), st.s.sinh(), st.s.tanh());
        let rot = Complex64::from_polar(1.0, st.phi);
        let a = st.alpha;
        let psi0 = (-0.5 * a.norm_sqr() - 0.5 * a.conj() * a.conj() * rot * t).exp() / ch.sqrt();
        let gam = a * ch + a.conj() * rot * sh;
        let psi1 = psi0 * gam / ch;
        let psi2 = psi0 * ((gam / ch).powi(2) - rot * t) / 2f64.sqrt();
        let amps = st.fock_amplitudes(3);
        for (x, y) in amps.iter().zip([psi0, psi1, psi2]) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn completeness_within_cutoff() {
        for (s, a, phi) in [(1.0, 2.0, 0.0), (1.0, 2.0, 1.9), (1.0, 0.0, 0.0), (0.0, 2.0, 0.0)] {
            let st = GaussianPure::new(Complex64::from_polar(a, 0.93), s, phi);
            let total: f64 = st.fock_amplitudes(121).iter().map(|z| z.norm_sqr()).sum();
            assert!((1.0 - total).abs() < 1e-10, "s={s} |α|={a}: {total}");
        }
        // s = 1.5 keeps ~1e-5 above n = 120 but is complete by n = 400
        let st = GaussianPure::new(Complex64::from_polar(2.0, 0.93), 1.5, 0.7);
        let amps = st.fock_amplitudes(401);
        let head: f64 = amps[..121].iter().map(|z| z.norm_sqr()).sum();
        let total: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        assert!(1.0 - head > 1e-6);
        assert!((1.0 - total).abs() < 1e-12);
    }

    #[test]
    fn recursion_survives_high_photon_numbers() {
        let st = GaussianPure::coherent(c(20.0, 0.0));
        let amps = st.fock_amplitudes(1200);
        // Poisson weight at n = 400: exp(−400) 400^400 / 400!
        let n = 400.0f64;
        let ln_p = -n + n * n.ln() - ln_factorial(400);
        assert_relative_eq!(amps[400].norm_sqr().ln(), ln_p, max_relative = 1e-10);
        let total: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    fn ln_factorial(n: usize) -> f64 {
        (1..=n).map(|k| (k as f64).ln()).sum()
    }

    #[test]
    fn decibel_conversion() {
        assert_eq!(squeezing_db(0.0), 0.0);
        assert!((db_to_s(10.0) - 1.1513).abs() < 5e-5);
        assert!((db_to_s(10.0) - 10.0 * LN_10 / 20.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn db_round_trip(s in 0.0f64..5.0) {
            prop_assert!((db_to_s(squeezing_db(s)) - s).abs() <= 1e-14);
        }

        #[test]
        fn char_fn_bounded(ar in -2.0f64..2.0, ai in -2.0f64..2.0, s in 0.0f64..1.5, phi in 0.0f64..TAU,
                           gr in -3.0f64..3.0, gi in -3.0f64..3.0) {
            let st = GaussianPure::new(c(ar, ai), s, phi);
            let g = c(gr, gi);
            let v = st.char_fn(g).norm();
            prop_assert!(v <= 1.0 + 1e-15);
            if g.norm() > 1e-3 {
                prop_assert!(v < 1.0);
            }
        }

        #[test]
        fn phase_covariance(ar in -2.0f64..2.0, ai in -2.0f64..2.0, s in 0.0f64..1.5, phi in 0.0f64..TAU,
                            psi in 0.0f64..TAU, gr in -2.0f64..2.0, gi in -2.0f64..2.0) {
            let rot = Complex64::from_polar(1.0, psi);
            let st = GaussianPure::new(c(ar, ai), s, phi);
            let turned = GaussianPure::new(c(ar, ai) * rot, s, phi + 2.0 * psi);
            let g = c(gr, gi);
            prop_assert!((turned.char_fn(g * rot) - st.char_fn(g)).norm() < 1e-12);
        }
    }
}
