//! Photon loss at zero temperature, with no Kerr term.
//!
//! The exact channel is the Kraus map `ρ → Σ_ℓ E_ℓ ρ E_ℓ†` with
//! `E_ℓ = √((1−e^{−κt})^ℓ/ℓ!) · e^{−κt n̂/2} · a^ℓ`. The same dynamics unravels into
//! quantum-jump trajectories: deterministic no-jump decay `e^{−κn̂τ/2}` interrupted by
//! applications of `a`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, FockDim, OperatorMatrix, Space, StateVector, Tolerances};
use crate::linalg::{ln_factorials, poisson_tail, CMatrix, CVector};

/// Ordered Kraus operators `E_0 … E_ℓmax` for one value of `κt`.
#[derive(Debug, Clone)]
pub struct KrausSet {
    operators: Vec<OperatorMatrix>,
    /// `coeffs[ℓ][n] = ⟨n−ℓ|E_ℓ|n⟩` for `n ≥ ℓ`.
    coeffs: Vec<Vec<f64>>,
    kappa_t: f64,
    ell_max: usize,
    dim: FockDim,
    completeness_defect: f64,
}

impl KrausSet {
    pub fn operators(&self) -> &[OperatorMatrix] {
        &self.operators
    }

    pub fn kappa_t(&self) -> f64 {
        self.kappa_t
    }

    pub fn ell_max(&self) -> usize {
        self.ell_max
    }

    pub fn dim(&self) -> FockDim {
        self.dim
    }

    /// `max |Σ E†E − I|` over the safe subspace.
    pub fn completeness_defect(&self) -> f64 {
        self.completeness_defect
    }

    /// `max |Σ E†E − I|` over levels `0..levels`.
    pub fn completeness_defect_on(&self, levels: usize) -> f64 {
        let levels = levels.min(self.dim.get());
        let mut sum = CMatrix::zeros(self.dim.get(), self.dim.get());
        for e in &self.operators {
            sum += e.matrix().adjoint() * e.matrix();
        }
        let mut worst = 0.0f64;
        for j in 0..levels {
            for i in 0..levels {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((sum[(i, j)] - target).norm());
            }
        }
        worst
    }
}

/// Kraus set truncated at `ell_max` (clamped to `dim − 1`, past which every `E_ℓ`
/// vanishes).
pub fn kraus_set(kappa_t: f64, ell_max: usize, dim: FockDim) -> Result<KrausSet> {
    if !(kappa_t >= 0.0 && kappa_t.is_finite()) {
        return Err(Error::param("kappa_t", format!("must be non-negative, got {kappa_t}")));
    }
    let n = dim.get();
    let ell_max = ell_max.min(n - 1);
    let lf = ln_factorials(n);
    let ln_q = -kappa_t;
    let ln_p = if kappa_t > 0.0 {
        (-(-kappa_t).exp_m1()).ln()
    } else {
        f64::NEG_INFINITY
    };
    let coeffs: Vec<Vec<f64>> = (0..=ell_max)
        .map(|l| {
            (0..n)
                .map(|m| {
                    if m < l {
                        return 0.0;
                    }
                    let ln_binom = lf[m] - lf[l] - lf[m - l];
                    let lp = if l == 0 { 0.0 } else { l as f64 * ln_p };
                    let lq = if m == l { 0.0 } else { (m - l) as f64 * ln_q };
                    (0.5 * (ln_binom + lp + lq)).exp()
                })
                .collect()
        })
        .collect();
    let operators = coeffs
        .iter()
        .enumerate()
        .map(|(l, e)| {
            let mut m = CMatrix::zeros(n, n);
            for k in l..n {
                m[(k - l, k)] = Complex64::from(e[k]);
            }
            OperatorMatrix::from_parts(m, Space::Cavity(dim), format!("E_{l}"))
        })
        .collect();
    let mut set = KrausSet {
        operators,
        coeffs,
        kappa_t,
        ell_max,
        dim,
        completeness_defect: 0.0,
    };
    set.completeness_defect = set.completeness_defect_on(dim.safe_len());
    Ok(set)
}

/// Smallest `ℓ_max` whose neglected loss probability for a coherent state with mean
/// photon number `nbar_max` is below `tol.tail`, clamped to `dim − 1`.
pub fn default_ell_max(kappa_t: f64, nbar_max: f64, dim: FockDim, tol: &Tolerances) -> usize {
    let mean_lost = nbar_max.max(0.0) * -(-kappa_t.max(0.0)).exp_m1();
    let mut l = 0;
    while l + 1 < dim.get() && poisson_tail(mean_lost, l + 1) > tol.tail {
        l += 1;
    }
    l
}

/// `Σ_ℓ E_ℓ ρ E_ℓ†`, using the shifted-diagonal structure of each `E_ℓ`.
pub fn apply_channel(rho: &DensityMatrix, ks: &KrausSet) -> Result<DensityMatrix> {
    let n = ks.dim.get();
    if rho.dim() != ks.dim {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rho.dim().get(),
        });
    }
    let src = rho.matrix();
    let mut out = CMatrix::zeros(n, n);
    for (l, e) in ks.coeffs.iter().enumerate() {
        for j in 0..n - l {
            let ej = e[j + l];
            if ej == 0.0 {
                continue;
            }
            for i in 0..n - l {
                out[(i, j)] += src[(i + l, j + l)] * (e[i + l] * ej);
            }
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(out, ks.dim))
}

/// `⟨Π⟩(t)` under photon loss at rate `kappa`, one exact channel application per time.
pub fn parity_decay_curve(initial: &StateVector, kappa: f64, times: &[f64]) -> Result<Vec<f64>> {
    check_rate(kappa)?;
    if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(Error::param("times", "must be finite and non-negative"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::param("times", "must be ascending"));
    }
    let rho = initial.to_density();
    let ell_max = initial.dim().get() - 1;
    times
        .iter()
        .map(|t| {
            let ks = kraus_set(kappa * t, ell_max, initial.dim())?;
            Ok(apply_channel(&rho, &ks)?.parity_expectation())
        })
        .collect()
}

/// `α e^{−κt/2}`.
pub fn amplitude_decay(alpha: Complex64, kappa: f64, t: f64) -> Result<Complex64> {
    check_rate(kappa)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::param("t", format!("must be non-negative, got {t}")));
    }
    Ok(alpha * (-0.5 * kappa * t).exp())
}

fn check_rate(kappa: f64) -> Result<()> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::param("kappa", format!("must be non-negative, got {kappa}")));
    }
    Ok(())
}

/// One quantum-jump trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub jump_times: Vec<f64>,
    pub final_state: StateVector,
    pub n_jumps: usize,
}

/// Samples a trajectory on `[0, t_final]` with a generator seeded from `rng_seed`.
pub fn trajectory_sample(
    initial: &StateVector,
    kappa: f64,
    t_final: f64,
    rng_seed: u64,
) -> Result<TrajectoryRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    trajectory_sample_with(initial, kappa, t_final, &mut rng)
}

/// Waiting times are drawn exactly: with `s = κτ`, the no-jump probability is
/// `S(s) = Σ|cₙ|² e^{−ns}`, and `S(s) = u` is solved by bisection for a uniform `u`.
/// Working in `s` makes the draws independent of `κ`, so changing `κ` at a fixed
/// generator state rescales the jump times.
pub fn trajectory_sample_with<R: Rng + ?Sized>(
    initial: &StateVector,
    kappa: f64,
    t_final: f64,
    rng: &mut R,
) -> Result<TrajectoryRecord> {
    check_rate(kappa)?;
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::param("t_final", format!("must be non-negative, got {t_final}")));
    }
    let norm = initial.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::param("initial", format!("state not normalized (norm {norm})")));
    }
    let s_final = kappa * t_final;
    let mut amps = initial.amplitudes().clone();
    let mut s_now = 0.0;
    let mut jump_times = Vec::new();
    loop {
        let probs: Vec<f64> = amps.iter().map(|c| c.norm_sqr()).collect();
        let survival = |s: f64| -> f64 {
            probs
                .iter()
                .enumerate()
                .map(|(n, p)| p * (-(n as f64) * s).exp())
                .sum()
        };
        let u: f64 = rng.random();
        let remaining = s_final - s_now;
        if s_final == 0.0 || survival(remaining) >= u {
            no_jump(&mut amps, remaining);
            break;
        }
        let (mut lo, mut hi) = (0.0, remaining);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if survival(mid) > u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        no_jump(&mut amps, hi);
        s_now += hi;
        jump_times.push(s_now / kappa);
        annihilate(&mut amps);
    }
    let n_jumps = jump_times.len();
    Ok(TrajectoryRecord {
        jump_times,
        final_state: StateVector::normalized(amps)?,
        n_jumps,
    })
}

/// Applies `e^{−n̂ s/2}` and renormalizes.
fn no_jump(amps: &mut CVector, s: f64) {
    for (n, c) in amps.iter_mut().enumerate() {
        *c *= (-0.5 * n as f64 * s).exp();
    }
    let norm = amps.norm();
    *amps /= Complex64::from(norm);
}

/// Applies `a` and renormalizes.
fn annihilate(amps: &mut CVector) {
    let n = amps.len();
    for k in 0..n - 1 {
        amps[k] = amps[k + 1] * ((k + 1) as f64).sqrt();
    }
    amps[n - 1] = Complex64::from(0.0);
    let norm = amps.norm();
    *amps /= Complex64::from(norm);
}

/// Trajectory-averaged statistics of an observable evaluated on the final states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub shots: usize,
}

impl EnsembleEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let shots = samples.len();
        let mean = samples.iter().sum::<f64>() / shots as f64;
        let stderr = if shots > 1 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (shots - 1) as f64;
            (var / shots as f64).sqrt()
        } else {
            0.0
        };
        EnsembleEstimate { mean, stderr, shots }
    }
}

/// Runs `shots` trajectories (shot `k` uses stream `k` of the seeded generator) and
/// averages `observable` over the final states. The result does not depend on thread
/// scheduling.
pub fn trajectory_average<F>(
    initial: &StateVector,
    kappa: f64,
    t_final: f64,
    shots: usize,
    rng_seed: u64,
    observable: F,
) -> Result<EnsembleEstimate>
where
    F: Fn(&TrajectoryRecord) -> f64 + Sync,
{
    if shots == 0 {
        return Err(Error::param("shots", "must be at least 1"));
    }
    let samples: Vec<f64> = (0..shots as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = shot_rng(rng_seed, k);
            trajectory_sample_with(initial, kappa, t_final, &mut rng).map(|r| observable(&r))
        })
        .collect::<Result<_>>()?;
    Ok(EnsembleEstimate::from_samples(&samples))
}

/// Generator for shot `k` of a seeded Monte Carlo run.
pub fn shot_rng(rng_seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(shot);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::coherent_state;

    fn dim(n: usize) -> FockDim {
        FockDim::new(n).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let ks = kraus_set(0.0, 5, dim(8)).unwrap();
        assert_eq!(ks.operators()[0].matrix(), &CMatrix::identity(8, 8));
        for e in &ks.operators()[1..] {
            assert!(e.matrix().iter().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn negative_kappa_t_is_rejected() {
        assert!(kraus_set(-0.1, 3, dim(5)).is_err());
        assert!(amplitude_decay(Complex64::from(1.0), 1.0, -1.0).is_err());
    }

    #[test]
    fn ell_max_is_clamped() {
        let ks = kraus_set(0.3, 100, dim(6)).unwrap();
        assert_eq!(ks.ell_max(), 5);
        assert_eq!(ks.operators().len(), 6);
    }

    #[test]
    fn single_photon_decay_probability() {
        let ks = kraus_set(0.2, 1, dim(4)).unwrap();
        let one = StateVector::fock(1, dim(4)).unwrap().to_density();
        let out = apply_channel(&one, &ks).unwrap();
        assert!((out.matrix()[(0, 0)].re - (1.0 - (-0.2f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn default_ell_max_covers_loss_distribution() {
        let tol = Tolerances::default();
        assert_eq!(default_ell_max(0.0, 4.0, dim(30), &tol), 0);
        let l = default_ell_max(0.5, 4.0, dim(60), &tol);
        let mean = 4.0 * (1.0 - (-0.5f64).exp());
        assert!(poisson_tail(mean, l + 1) <= 1e-12);
        assert!(poisson_tail(mean, l) > 1e-12);
    }

    #[test]
    fn vacuum_never_jumps() {
        let vac = StateVector::vacuum(dim(5));
        for seed in 0..20 {
            let r = trajectory_sample(&vac, 1.0, 5.0, seed).unwrap();
            assert_eq!(r.n_jumps, 0);
            assert_eq!(r.final_state, vac);
        }
    }

    #[test]
    fn jump_times_increase_within_window() {
        let psi = coherent_state(Complex64::from(2.0), dim(40)).unwrap();
        for seed in 0..50 {
            let r = trajectory_sample(&psi, 1.0, 2.0, seed).unwrap();
            assert!(r.jump_times.windows(2).all(|w| w[0] < w[1]));
            assert!(r.jump_times.iter().all(|t| *t > 0.0 && *t <= 2.0));
        }
    }

    #[test]
    fn rescaled_kappa_rescales_jump_times() {
        let psi = coherent_state(Complex64::from(1.5), dim(30)).unwrap();
        let a = trajectory_sample(&psi, 1.0, 1.0, 9).unwrap();
        let b = trajectory_sample(&psi, 2.0, 0.5, 9).unwrap();
        assert_eq!(a.n_jumps, b.n_jumps);
        for (x, y) in a.jump_times.iter().zip(&b.jump_times) {
            assert!((x - 2.0 * y).abs() < 1e-12);
        }
    }

    #[test]
    fn parity_curve_rejects_unsorted_times() {
        let psi = StateVector::vacuum(dim(4));
        assert!(parity_decay_curve(&psi, 1.0, &[0.5, 0.1]).is_err());
        assert_eq!(parity_decay_curve(&psi, 1.0, &[0.0, 3.0]).unwrap(), vec![1.0, 1.0]);
    }
}
