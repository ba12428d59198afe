//! Dense complex linear-algebra helpers shared by the physics modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Matrix exponential by Padé scaling-and-squaring.
pub fn expm(m: &CMatrix) -> CMatrix {
    m.exp()
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entrywise modulus of `a - b` restricted to the leading `n × n` block.
pub fn max_abs_diff_block(a: &CMatrix, b: &CMatrix, n: usize) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

pub fn vec_max_abs_diff(a: &CVector, b: &CVector) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Inner product `⟨u|v⟩` (conjugate-linear in `u`).
#[inline]
pub fn inner(u: &CVector, v: &CVector) -> Complex64 {
    u.dotc(v)
}

/// `ln n!` for `n = 0..len`, accumulated from `ln k`.
pub fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut acc = 0.0;
    for n in 0..len {
        if n > 1 {
            acc += (n as f64).ln();
        }
        out.push(acc);
    }
    out
}

/// Probability mass of a Poisson(`mean`) variable at levels `>= from`.
pub fn poisson_tail(mean: f64, from: usize) -> f64 {
    if mean <= 0.0 {
        return if from == 0 { 1.0 } else { 0.0 };
    }
    if from == 0 {
        return 1.0;
    }
    let ln_fact = ln_factorials(from + 1)[from];
    let mut term = (-mean + from as f64 * mean.ln() - ln_fact).exp();
    let mut total = 0.0;
    let mut n = from;
    loop {
        total += term;
        n += 1;
        term *= mean / n as f64;
        if n as f64 > mean && term <= total * 1e-18 {
            break;
        }
        if term == 0.0 && n as f64 > mean {
            break;
        }
    }
    total.min(1.0)
}

/// Poisson probability mass function.
pub fn poisson_pmf(mean: f64, n: usize) -> f64 {
    if mean <= 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let ln_fact = ln_factorials(n + 1)[n];
    (-mean + n as f64 * mean.ln() - ln_fact).exp()
}

/// Least-squares slope and intercept of `ln y` against `ln x`.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}
