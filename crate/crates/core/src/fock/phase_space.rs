//! Displacement-operator matrix elements and characteristic functions of
//! truncated Fock vectors.
//!
//! `D̂(β)` is rotated onto the position quadrature,
//! `⟨n|D̂(|β|e^{iϑ})|m⟩ = e^{i(n−m)(ϑ+π/2)} ⟨n|exp(−i√2|β| x̂)|m⟩`,
//! and `exp(−iτx̂)` is evaluated through one eigendecomposition of the
//! truncated tridiagonal `x̂`, reused for every `τ`.

use super::FockVector;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;
use std::sync::{Arc, Mutex, OnceLock};

const LEAKAGE_TOL: f64 = 1e-14;
const MAX_DIM: usize = 2400;

/// Eigendecomposition of the position quadrature truncated to `dim` levels.
#[derive(Debug)]
pub struct DisplacementEngine {
    dim: usize,
    q: DMatrix<f64>,
    lambda: DVector<f64>,
}

impl DisplacementEngine {
    pub fn new(dim: usize) -> Self {
        let mut x = DMatrix::<f64>::zeros(dim, dim);
        for n in 0..dim - 1 {
            let v = ((n + 1) as f64 / 2.0).sqrt();
            x[(n, n + 1)] = v;
            x[(n + 1, n)] = v;
        }
        let eig = SymmetricEigen::new(x);
        Self {
            dim,
            q: eig.eigenvectors,
            lambda: eig.eigenvalues,
        }
    }

    /// Shared engine of at least `dim` levels.
    pub fn cached(dim: usize) -> Arc<Self> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<DisplacementEngine>>>> = OnceLock::new();
        // round up so nearby requests share one decomposition
        let dim = dim.div_ceil(32) * 32;
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(e) = cache.lock().expect("engine cache poisoned").get(&dim) {
            return e.clone();
        }
        let engine = Arc::new(Self::new(dim));
        cache.lock().expect("engine cache poisoned").insert(dim, engine.clone());
        engine
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Upper-left `k × k` block of `exp(−iτx̂)`.
    pub fn position_block(&self, tau: f64, k: usize) -> DMatrix<Complex64> {
        assert!(k <= self.dim);
        let phases: Vec<Complex64> = self.lambda.iter().map(|&l| Complex64::from_polar(1.0, -tau * l)).collect();
        let mut left = DMatrix::<Complex64>::zeros(k, self.dim);
        for j in 0..self.dim {
            for n in 0..k {
                left[(n, j)] = phases[j] * self.q[(n, j)];
            }
        }
        let right = self.q.rows(0, k).transpose().map(|v| Complex64::new(v, 0.0));
        left * right
    }

    /// Upper-left `k × k` block of `D̂(β)`.
    pub fn displacement_block(&self, beta: Complex64, k: usize) -> DMatrix<Complex64> {
        let mut g = self.position_block(std::f64::consts::SQRT_2 * beta.norm(), k);
        let angle = beta.arg() + FRAC_PI_2;
        for n in 0..k {
            for m in 0..k {
                g[(n, m)] *= Complex64::from_polar(1.0, (n as f64 - m as f64) * angle);
            }
        }
        g
    }

    /// Population that `D̂(β)|column⟩` places in the top 10% of the basis.
    pub fn leakage(&self, beta_abs: f64, column: usize) -> f64 {
        let tau = std::f64::consts::SQRT_2 * beta_abs;
        let weights: Vec<Complex64> = (0..self.dim)
            .map(|j| Complex64::from_polar(self.q[(column, j)], -tau * self.lambda[j]))
            .collect();
        let start = self.dim - self.dim.div_ceil(10);
        (start..self.dim)
            .map(|n| {
                let v: Complex64 = (0..self.dim).map(|j| weights[j] * self.q[(n, j)]).sum();
                v.norm_sqr()
            })
            .sum()
    }
}

/// Engine large enough that `D̂(β)` with `|β| ≤ max_abs_beta` is exact to
/// round-off on the lowest `k` levels.
pub fn engine_for(max_abs_beta: f64, k: usize) -> Result<Arc<DisplacementEngine>> {
    let a = std::f64::consts::SQRT_2 * max_abs_beta + (k as f64).sqrt();
    let mut dim = ((a * a + 12.0 * a + 20.0).ceil() as usize).max(k + 16);
    loop {
        if dim > MAX_DIM {
            return Err(Error::TailTooLarge {
                tail: f64::NAN,
                tol: LEAKAGE_TOL,
                cutoff: MAX_DIM,
            });
        }
        let engine = DisplacementEngine::cached(dim);
        let leak = engine.leakage(max_abs_beta, k - 1);
        if leak < LEAKAGE_TOL {
            return Ok(engine);
        }
        dim = dim * 3 / 2;
    }
}

/// `Tr[D̂(−γ)ρ̂]` for a single-mode pure state.
pub fn single_mode_char_fn(state: &FockVector, gamma: Complex64) -> Result<Complex64> {
    state.require_modes(1)?;
    let k = state.cutoffs()[0];
    let d = engine_for(gamma.norm(), k)?.displacement_block(-gamma, k);
    let psi = DVector::from_column_slice(state.amplitudes());
    Ok(psi.dotc(&(d * &psi)))
}

/// `Tr[D̂_A(−α₁)D̂_B(−α₂)ρ̂]` for a two-mode pure state.
pub fn two_mode_char_fn(state: &FockVector, alpha1: Complex64, alpha2: Complex64) -> Result<Complex64> {
    state.require_modes(2)?;
    let (ka, kb) = (state.cutoffs()[0], state.cutoffs()[1]);
    let da = engine_for(alpha1.norm(), ka)?.displacement_block(-alpha1, ka);
    let db = engine_for(alpha2.norm(), kb)?.displacement_block(-alpha2, kb);
    let c = DMatrix::from_row_slice(ka, kb, state.amplitudes());
    let transformed = da * &c * db.transpose();
    Ok(c.iter().zip(transformed.iter()).map(|(x, y)| x.conj() * y).sum())
}
