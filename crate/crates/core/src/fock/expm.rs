//! Action of `exp(G)` for sparse anti-Hermitian generators of truncated bosonic
//! operators.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Sparse square generator stored as `(row, col, value)` triplets.
#[derive(Debug, Clone)]
pub struct Generator {
    dim: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl Generator {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn push(&mut self, row: usize, col: usize, value: Complex64) {
        debug_assert!(row < self.dim && col < self.dim);
        if value != Complex64::new(0.0, 0.0) {
            self.entries.push((row, col, value));
        }
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        let mut cols = vec![0.0; self.dim];
        for &(_, c, v) in &self.entries {
            cols[c] += v.norm();
        }
        cols.into_iter().fold(0.0, f64::max)
    }

    fn matvec_into(&self, x: &[Complex64], scale: f64, out: &mut [Complex64]) {
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for &(r, c, v) in &self.entries {
            out[r] += v * x[c] * scale;
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    /// Computes `exp(G) v` by `m` scaled Taylor steps with `‖G/m‖₁ ≤ 1/2`.
    pub fn expm_apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        let norm = self.norm_one();
        if norm == 0.0 {
            return v.to_vec();
        }
        let steps = (2.0 * norm).ceil().max(1.0) as usize;
        let scale = 1.0 / steps as f64;
        let mut current = v.to_vec();
        let mut term = vec![Complex64::new(0.0, 0.0); self.dim];
        let mut next = vec![Complex64::new(0.0, 0.0); self.dim];
        for _ in 0..steps {
            term.copy_from_slice(&current);
            let base = l2(&current).max(f64::MIN_POSITIVE);
            for k in 1..60 {
                self.matvec_into(&term, scale / k as f64, &mut next);
                std::mem::swap(&mut term, &mut next);
                for (c, t) in current.iter_mut().zip(&term) {
                    *c += t;
                }
                if l2(&term) <= 1e-18 * base {
                    break;
                }
            }
        }
        current
    }
}

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
