//! Quadrature building blocks: compensated summation, adaptive Gauss–Kronrod,
//! Gauss–Hermite rules and the periodic trapezoid rule.

use nalgebra::{DMatrix, SymmetricEigen};
use std::collections::BinaryHeap;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator of floats.
pub fn fsum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

// Kronrod 15-point abscissae and weights; every odd entry is also a Gauss 7-point node.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and limits for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AdaptiveSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for AdaptiveSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-9,
            max_intervals: 400,
        }
    }
}

/// Result of an adaptive integration of a `D`-component integrand.
#[derive(Debug, Clone, Copy)]
pub struct Integral<const D: usize> {
    pub value: [f64; D],
    /// Absolute error estimate per component.
    pub error: [f64; D],
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug)]
struct Segment<const D: usize> {
    a: f64,
    b: f64,
    value: [f64; D],
    error: [f64; D],
    // scalar priority: the largest component error scaled by its tolerance
    priority: f64,
}

impl<const D: usize> PartialEq for Segment<D> {
    fn eq(&self, other: &Self) -> bool {
        self.priority == other.priority
    }
}
impl<const D: usize> Eq for Segment<D> {}
impl<const D: usize> PartialOrd for Segment<D> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<const D: usize> Ord for Segment<D> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.priority.total_cmp(&other.priority)
    }
}

fn gk15<const D: usize, F>(f: &mut F, a: f64, b: f64) -> ([f64; D], [f64; D])
where
    F: FnMut(f64) -> [f64; D],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = [0.0; D];
    let mut gauss = [0.0; D];
    for d in 0..D {
        kronrod[d] = WGK[7] * fc[d];
        gauss[d] = WG[3] * fc[d];
    }
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for d in 0..D {
            let pair = f1[d] + f2[d];
            kronrod[d] += wk * pair;
            if j % 2 == 1 {
                gauss[d] += WG[j / 2] * pair;
            }
        }
    }
    let mut value = [0.0; D];
    let mut error = [0.0; D];
    for d in 0..D {
        value[d] = kronrod[d] * half;
        // the raw Kronrod-Gauss difference is a (very) conservative bound
        let raw = ((kronrod[d] - gauss[d]) * half).abs();
        error[d] = raw.max(50.0 * f64::EPSILON * value[d].abs());
    }
    (value, error)
}

/// Globally adaptive Gauss–Kronrod (7/15) integration of a vector integrand on `[a, b]`.
///
/// Convergence requires every component to satisfy `err ≤ max(abs_tol, rel_tol·|I|)`.
/// The integrand is never evaluated at the end points.
pub fn integrate_adaptive<const D: usize, F>(
    mut f: F,
    a: f64,
    b: f64,
    settings: &AdaptiveSettings,
) -> Integral<D>
where
    F: FnMut(f64) -> [f64; D],
{
    let priority = |value: &[f64; D], error: &[f64; D]| -> f64 {
        (0..D)
            .map(|d| error[d] / settings.abs_tol.max(settings.rel_tol * value[d].abs()))
            .fold(0.0, f64::max)
    };
    let mut heap = BinaryHeap::new();
    let (value, error) = gk15(&mut f, a, b);
    let mut evaluations = 15;
    heap.push(Segment {
        a,
        b,
        value,
        error,
        priority: priority(&value, &error),
    });

    let totals = |heap: &BinaryHeap<Segment<D>>| {
        let mut v = [CompensatedSum::new(); D];
        let mut e = [0.0; D];
        for seg in heap.iter() {
            for d in 0..D {
                v[d].add(seg.value[d]);
                e[d] += seg.error[d];
            }
        }
        (v.map(|s| s.value()), e)
    };

    loop {
        let (value, error) = totals(&heap);
        let done = (0..D).all(|d| error[d] <= settings.abs_tol.max(settings.rel_tol * value[d].abs()));
        if done || heap.len() >= settings.max_intervals {
            return Integral {
                value,
                error,
                evaluations,
                converged: done,
            };
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval collapsed to machine resolution; nothing more to gain
            heap.push(worst);
            let (value, error) = totals(&heap);
            return Integral {
                value,
                error,
                evaluations,
                converged: false,
            };
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk15(&mut f, lo, hi);
            evaluations += 15;
            heap.push(Segment {
                a: lo,
                b: hi,
                value,
                error,
                priority: priority(&value, &error),
            });
        }
    }
}

/// Gauss–Hermite rule for the weight `exp(-x²)` on the real line.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Builds the `n`-point rule by the Golub–Welsch eigenvalue method.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Hermite rule needs at least one node");
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        for k in 1..n {
            let off = (k as f64 / 2.0).sqrt();
            jacobi[(k - 1, k)] = off;
            jacobi[(k, k - 1)] = off;
        }
        let eig = SymmetricEigen::new(jacobi);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], std::f64::consts::PI.sqrt() * v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        // symmetrize to remove eigen-solver noise
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let x = 0.5 * (pairs[j].0 - pairs[i].0);
            let w = 0.5 * (pairs[i].1 + pairs[j].1);
            pairs[i] = (-x, w);
            pairs[j] = (x, w);
        }
        if n % 2 == 1 {
            pairs[n / 2].0 = 0.0;
        }
        let (nodes, weights) = pairs.into_iter().unzip();
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        for k in 1..n {
            let kf = k as f64;
            let off = kf / (4.0 * kf * kf - 1.0).sqrt();
            jacobi[(k - 1, k)] = off;
            jacobi[(k, k - 1)] = off;
        }
        let eig = SymmetricEigen::new(jacobi);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], 2.0 * v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Self { nodes, weights }
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }
}

/// Periodic trapezoid estimate of the mean of `f` over `[0, 2π)`, with the
/// node count doubled from `initial` until the embedded half-resolution estimate
/// agrees within `tol` (absolute) or `max_nodes` is reached.
///
/// Returns `(mean, error_estimate, nodes_used)`.
pub fn periodic_mean<F>(mut f: F, initial: usize, max_nodes: usize, tol: f64) -> (f64, f64, usize)
where
    F: FnMut(f64) -> f64,
{
    let mut n = initial.max(2);
    let mut values: Vec<f64> = (0..n)
        .map(|j| f(std::f64::consts::TAU * j as f64 / n as f64))
        .collect();
    loop {
        let fine = fsum(values.iter().copied()) / n as f64;
        let coarse = fsum(values.iter().step_by(2).copied()) / (n / 2) as f64;
        let err = (fine - coarse).abs();
        if err <= tol || 2 * n > max_nodes {
            return (fine, err, n);
        }
        // interleave the new midpoints
        let mut next = Vec::with_capacity(2 * n);
        for (j, &v) in values.iter().enumerate() {
            next.push(v);
            next.push(f(std::f64::consts::TAU * (2 * j + 1) as f64 / (2 * n) as f64));
        }
        values = next;
        n *= 2;
    }
}
