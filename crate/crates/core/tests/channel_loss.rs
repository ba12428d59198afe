mod common;

use common::*;
use cqed::channel::*;
use cqed::fock::*;
use cqed::linalg::CMatrix;

fn dim(n: usize) -> FockDim {
    FockDim::new(n).unwrap()
}

/// Dense `Σ_ℓ E_ℓ ρ E_ℓ†` with `⟨n−ℓ|E_ℓ|n⟩ = √(C(n,ℓ)) (1−η)^{ℓ/2} η^{(n−ℓ)/2}`.
fn brute_force_loss(rho: &CMatrix, kappa_t: f64) -> CMatrix {
    let n = rho.nrows();
    let eta = (-kappa_t).exp();
    let mut out = CMatrix::zeros(n, n);
    for l in 0..n {
        let mut e = CMatrix::zeros(n, n);
        for m in l..n {
            let mut binom = 1.0;
            for k in 0..l {
                binom *= (m - k) as f64 / (k + 1) as f64;
            }
            let amp = (binom * (1.0 - eta).powi(l as i32) * eta.powi((m - l) as i32)).sqrt();
            e[(m - l, m)] = c(amp, 0.0);
        }
        out += &e * rho * e.adjoint();
    }
    out
}

#[test]
fn zero_time_is_identity() {
    let ks = kraus_set(0.0, 5, dim(10)).unwrap();
    assert_eq!(ks.operators()[0].matrix(), &CMatrix::identity(10, 10));
    for e in &ks.operators()[1..] {
        assert!(e.matrix().iter().all(|z| z.norm() == 0.0));
    }
}

#[test]
fn completeness_on_every_level() {
    for kt in [0.1, 1.0, 10.0] {
        let ks = kraus_set(kt, 29, dim(30)).unwrap();
        assert!(ks.completeness_defect_on(30) < 1e-10);
        let mut sum = CMatrix::zeros(30, 30);
        for e in ks.operators() {
            sum += e.matrix().adjoint() * e.matrix();
        }
        let defect = (sum - CMatrix::identity(30, 30)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(defect < 1e-10);
    }
}

#[test]
fn single_photon_loss_probability() {
    let ks = kraus_set(0.2, 1, dim(4)).unwrap();
    let one = StateVector::fock(1, dim(4)).unwrap().to_density();
    let out = apply_channel(&one, &ks).unwrap();
    assert!((out.matrix()[(0, 0)].re - (1.0 - (-0.2f64).exp())).abs() < 1e-14);
    assert!((out.matrix()[(0, 0)].re - 0.18127).abs() < 1e-5);
}

#[test]
fn channel_matches_brute_force() {
    let d = 60;
    let cat = cat_state(c(2.0, 0.0), Parity::Even, dim(d)).unwrap().to_density();
    let ks = kraus_set(0.01, d - 1, dim(d)).unwrap();
    let out = apply_channel(&cat, &ks).unwrap();
    let oracle = brute_force_loss(cat.matrix(), 0.01);
    let diff = (out.matrix() - &oracle).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(diff < 1e-12);
    let parity = out.parity_expectation();
    assert!((parity - cat_parity_after_loss(2.0, 1.0, 0.01)).abs() < 1e-8);
    // first order: 1 − 2κt·n̄ with n̄ = α² tanh α²
    let nbar = 4.0 * 4.0f64.tanh();
    assert!(((1.0 - parity) / (2.0 * 0.01 * nbar) - 1.0).abs() < 0.05);
}

#[test]
fn coherent_decays_to_smaller_coherent() {
    let d = dim(40);
    let rho = coherent_state(c(2.0, 0.0), d).unwrap().to_density();
    let ks = kraus_set(0.5, 39, d).unwrap();
    let out = apply_channel(&rho, &ks).unwrap();
    let target = coherent_state(c(2.0 * (-0.25f64).exp(), 0.0), d).unwrap();
    assert!(out.fidelity_with_pure(&target).unwrap() > 1.0 - 1e-8);
    assert!((out.purity() - 1.0).abs() < 1e-8);
    let peak = amplitude_decay(c(2.0, 0.0), 1.0, 0.5).unwrap();
    // ⟨a⟩ of the output is the decayed amplitude
    let a = cqed::fock::ladder_operators(d).a;
    let mean_a = expectation(&out, &a).unwrap();
    assert!((mean_a - peak).norm() < 1e-6);
}

#[test]
fn vacuum_is_dark() {
    let vac = StateVector::vacuum(dim(8)).to_density();
    for kt in [0.3, 3.0] {
        let out = apply_channel(&vac, &kraus_set(kt, 7, dim(8)).unwrap()).unwrap();
        assert!((out.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
    }
}

#[test]
fn amplitude_decay_arithmetic() {
    assert_eq!(amplitude_decay(c(1.5, 0.5), 2.0, 0.0).unwrap(), c(1.5, 0.5));
    let half = amplitude_decay(c(3.0, 0.0), 1.0, 2.0 * 2.0f64.ln()).unwrap();
    assert!((half - c(1.5, 0.0)).norm() < 1e-15);
}

#[test]
fn parity_curves_against_closed_form() {
    let d = dim(40);
    let odd = cat_state(c(2.0, 0.0), Parity::Odd, d).unwrap();
    let times = [0.0, 0.1, 0.5, 1.0, 10.0];
    let curve = parity_decay_curve(&odd, 1.0, &times).unwrap();
    assert!((curve[0] + 1.0).abs() < 1e-10);
    assert!(curve[4] > 0.999);
    for (t, p) in times.iter().zip(&curve) {
        assert!((p - cat_parity_after_loss(2.0, -1.0, *t)).abs() < 1e-9, "t={t}");
    }
    let even = cat_state(c(2.0, 0.0), Parity::Even, d).unwrap();
    assert!((parity_decay_curve(&even, 1.0, &[0.0]).unwrap()[0] - 1.0).abs() < 1e-12);
}

#[test]
fn trajectories_reproduce_kraus_parity() {
    let d = dim(40);
    let even = cat_state(c(2.0, 0.0), Parity::Even, d).unwrap();
    let exact = parity_decay_curve(&even, 1.0, &[0.25]).unwrap()[0];
    let mc = trajectory_average(&even, 1.0, 0.25, 10_000, 5, |r| r.final_state.parity_expectation()).unwrap();
    assert!((mc.mean - exact).abs() < 3.0 * mc.stderr, "{} ± {} vs {exact}", mc.mean, mc.stderr);
}

#[test]
fn trajectory_jump_statistics() {
    let d = dim(40);
    let vac = StateVector::vacuum(d);
    for seed in 0..5 {
        assert_eq!(trajectory_sample(&vac, 1.0, 3.0, seed).unwrap().n_jumps, 0);
    }
    let coh = coherent_state(c(2.0, 0.0), d).unwrap();
    let est = trajectory_average(&coh, 1.0, 0.5, 10_000, 9, |r| r.n_jumps as f64).unwrap();
    let mean = 4.0 * (1.0 - (-0.5f64).exp());
    assert!((est.mean - mean).abs() < 3.0 * est.stderr);
}

#[test]
fn one_jump_flips_cat_parity() {
    let d = dim(40);
    let even = cat_state(c(2.0, 0.0), Parity::Even, d).unwrap();
    let mut seen = false;
    for seed in 0..200 {
        let r = trajectory_sample(&even, 1.0, 0.2, seed).unwrap();
        assert_eq!(r.jump_times.len(), r.n_jumps);
        let expected = if r.n_jumps % 2 == 0 { 1.0 } else { -1.0 };
        assert!((r.final_state.parity_expectation() - expected).abs() < 1e-10);
        seen |= r.n_jumps == 1;
    }
    assert!(seen);
}

#[test]
fn trajectory_average_is_seed_deterministic() {
    let d = dim(30);
    let coh = coherent_state(c(1.0, 0.5), d).unwrap();
    let a = trajectory_average(&coh, 0.7, 1.0, 500, 42, |r| r.n_jumps as f64).unwrap();
    let b = trajectory_average(&coh, 0.7, 1.0, 500, 42, |r| r.n_jumps as f64).unwrap();
    assert_eq!(a, b);
}
