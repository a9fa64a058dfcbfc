//! Bivariate complex polynomials and their moments under a 2D Gaussian.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `Σ c_{ab} x^a y^b` with `a + b ≤ degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly2 {
    degree: usize,
    // row-major (degree+1)² table, entries with a + b > degree stay zero
    coeffs: Vec<Complex64>,
}

impl Poly2 {
    pub fn zero(degree: usize) -> Self {
        Self {
            degree,
            coeffs: vec![ZERO; (degree + 1) * (degree + 1)],
        }
    }

    pub fn constant(c: Complex64) -> Self {
        let mut p = Self::zero(0);
        p.coeffs[0] = c;
        p
    }

    /// `cx·x + cy·y`.
    pub fn linear(cx: Complex64, cy: Complex64) -> Self {
        let mut p = Self::zero(1);
        p.set(1, 0, cx);
        p.set(0, 1, cy);
        p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn stride(&self) -> usize {
        self.degree + 1
    }

    pub fn coeff(&self, a: usize, b: usize) -> Complex64 {
        if a + b > self.degree {
            return ZERO;
        }
        self.coeffs[a * self.stride() + b]
    }

    fn set(&mut self, a: usize, b: usize, c: Complex64) {
        let s = self.stride();
        self.coeffs[a * s + b] = c;
    }

    fn terms(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        let s = self.stride();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(move |(i, &c)| (i / s, i % s, c))
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        self.terms().map(|(a, b, c)| c * x.powi(a as i32) * y.powi(b as i32)).sum()
    }

    pub fn scale(mut self, k: Complex64) -> Self {
        self.coeffs.iter_mut().for_each(|c| *c *= k);
        self
    }

    /// `E[p(v)]` for `v ~ N(μ, Σ)` with a possibly complex mean.
    ///
    /// Raw moments follow from Stein's identity
    /// `E[x^a y^b] = μ_x E[x^{a−1}y^b] + (a−1)Σ_xx E[x^{a−2}y^b] + b Σ_xy E[x^{a−1}y^{b−1}]`,
    /// which holds verbatim after analytic continuation to complex `μ`.
    pub fn gaussian_expectation(&self, mu: [Complex64; 2], sigma: [[f64; 2]; 2]) -> Complex64 {
        let table = moment_table(self.degree, mu, sigma);
        let s = self.degree + 1;
        self.terms().map(|(a, b, c)| c * table[a * s + b]).sum()
    }
}

fn moment_table(degree: usize, mu: [Complex64; 2], sigma: [[f64; 2]; 2]) -> Vec<Complex64> {
    let s = degree + 1;
    let mut m = vec![ZERO; s * s];
    m[0] = Complex64::new(1.0, 0.0);
    for b in 1..=degree {
        let mut v = mu[1] * m[b - 1];
        if b >= 2 {
            v += (b - 1) as f64 * sigma[1][1] * m[b - 2];
        }
        m[b] = v;
    }
    for a in 1..=degree {
        for b in 0..=degree - a {
            let mut v = mu[0] * m[(a - 1) * s + b];
            if a >= 2 {
                v += (a - 1) as f64 * sigma[0][0] * m[(a - 2) * s + b];
            }
            if b >= 1 {
                v += b as f64 * sigma[0][1] * m[(a - 1) * s + b - 1];
            }
            m[a * s + b] = v;
        }
    }
    m
}

impl Add for &Poly2 {
    type Output = Poly2;
    fn add(self, rhs: &Poly2) -> Poly2 {
        let mut out = Poly2::zero(self.degree.max(rhs.degree));
        for (a, b, c) in self.terms().chain(rhs.terms()) {
            let cur = out.coeff(a, b);
            out.set(a, b, cur + c);
        }
        out
    }
}

impl Add for Poly2 {
    type Output = Poly2;
    fn add(self, rhs: Poly2) -> Poly2 {
        &self + &rhs
    }
}

impl Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: &Poly2) -> Poly2 {
        let mut out = Poly2::zero(self.degree + rhs.degree);
        for (a1, b1, c1) in self.terms() {
            for (a2, b2, c2) in rhs.terms() {
                let cur = out.coeff(a1 + a2, b1 + b2);
                out.set(a1 + a2, b1 + b2, cur + c1 * c2);
            }
        }
        out
    }
}

impl Mul for Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: Poly2) -> Poly2 {
        &self * &rhs
    }
}

impl Neg for Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}
