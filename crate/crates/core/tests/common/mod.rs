//! Reference computations that share no code with the library.
#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::FRAC_2_PI;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Coherent amplitudes by the recursion `c_n = c_{n−1}·α/√n`.
pub fn coherent(alpha: Complex64, dim: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0)];
    for n in 1..dim {
        let prev = v[n - 1];
        v.push(prev * alpha / (n as f64).sqrt());
    }
    v
}

/// `(|α⟩ + s|−α⟩)` normalized by its own Fock-sum norm.
pub fn cat(alpha: Complex64, sign: f64, dim: usize) -> Vec<Complex64> {
    let plus = coherent(alpha, dim);
    let minus = coherent(-alpha, dim);
    let raw: Vec<Complex64> = plus.iter().zip(&minus).map(|(p, m)| p + m * sign).collect();
    normalize(raw)
}

pub fn normalize(v: Vec<Complex64>) -> Vec<Complex64> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    dot(a, b).norm_sqr()
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn ln_fact(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// `⟨m|D(β)|n⟩` from the normal-ordered form `e^{−|β|²/2} e^{βa†} e^{−β*a}`.
pub fn displacement_element(beta: Complex64, m: usize, n: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..=m.min(n) {
        // ⟨m|(a†)^{m−k}|k⟩ = √(m!/k!),  ⟨k|a^{n−k}|n⟩ = √(n!/k!)
        let mag = 0.5 * (ln_fact(m) - ln_fact(k)) + 0.5 * (ln_fact(n) - ln_fact(k))
            - ln_fact(m - k)
            - ln_fact(n - k);
        acc += beta.powu((m - k) as u32) * (-beta.conj()).powu((n - k) as u32) * mag.exp();
    }
    acc * (-0.5 * beta.norm_sqr()).exp()
}

/// Laguerre polynomial `L_n(x)` by the three-term recursion.
pub fn laguerre(n: usize, x: f64) -> f64 {
    let (mut l0, mut l1) = (1.0, 1.0 - x);
    if n == 0 {
        return l0;
    }
    for k in 1..n {
        let k = k as f64;
        let l2 = ((2.0 * k + 1.0 - x) * l1 - k * l0) / (k + 1.0);
        l0 = l1;
        l1 = l2;
    }
    l1
}

/// Wigner function of `|n⟩`: `(2/π)(−1)ⁿ e^{−2|β|²} Lₙ(4|β|²)`.
pub fn fock_wigner(n: usize, beta: Complex64) -> f64 {
    let r2 = beta.norm_sqr();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    FRAC_2_PI * sign * (-2.0 * r2).exp() * laguerre(n, 4.0 * r2)
}

pub fn coherent_wigner(alpha: Complex64, beta: Complex64) -> f64 {
    FRAC_2_PI * (-2.0 * (alpha - beta).norm_sqr()).exp()
}

/// Parity of a loss-damped cat: coherences `|α⟩⟨−α|` shrink by `⟨−α|α⟩^{1−η}`.
pub fn cat_parity_after_loss(alpha: f64, sign: f64, kappa_t: f64) -> f64 {
    let eta = (-kappa_t).exp();
    let a2 = alpha * alpha;
    ((-2.0 * a2 * eta).exp() + sign * (-2.0 * a2 * (1.0 - eta)).exp()) / (1.0 + sign * (-2.0 * a2).exp())
}

/// Joint fidelity of the selective-pulse recipe with `|g⟩⊗cat`, `c₀ = e^{−2α²}`.
pub fn deterministic_cat_fidelity(alpha: f64, sign: f64) -> f64 {
    let c0 = (-2.0 * alpha * alpha).exp();
    (1.0 + sign * c0) * (2.0 - sign * c0).powi(2) / 4.0
}

/// Reduced qubit matrix of amplitudes ordered `[g block, e block]`.
pub fn partial_trace_qubit(amps: &[Complex64], dim: usize) -> [[Complex64; 2]; 2] {
    let (g, e) = amps.split_at(dim);
    [[dot(g, g), dot(e, g)], [dot(g, e), dot(e, e)]]
}

/// Purity of a 2×2 density matrix.
pub fn purity2(r: &[[Complex64; 2]; 2]) -> f64 {
    (r[0][0] * r[0][0] + r[0][1] * r[1][0] + r[1][0] * r[0][1] + r[1][1] * r[1][1]).re
}

/// `Σ_n p_n (−1)^n` of a Poisson distribution, summed directly.
pub fn poisson_parity(nbar: f64, terms: usize) -> f64 {
    let mut p = (-nbar).exp();
    let mut acc = p;
    for n in 1..terms {
        p *= nbar / n as f64;
        acc += if n % 2 == 0 { p } else { -p };
    }
    acc
}

/// Binomial standard deviation of a frequency estimate.
pub fn binomial_sigma(p: f64, shots: usize) -> f64 {
    (p * (1.0 - p) / shots as f64).sqrt()
}
