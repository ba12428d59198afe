//! Two-legged cat code with parity-jump tracking.
//!
//! Codewords are the even cats `W₁ ∝ |α⟩ + |−α⟩` and `W₂ ∝ |iα⟩ + |−iα⟩`. Each photon
//! loss flips the parity and multiplies the `W₂` component by `i` relative to `W₁`, so
//! the decoder only needs the number of losses modulo 4. Between losses the amplitude
//! shrinks deterministically as `α e^{−κt/2}`; decoding uses codewords of the current
//! amplitude in the parity manifold implied by the jump count.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{shot_rng, trajectory_sample_with, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::fock::{cat_superposition_with, ladder_operators, FockDim, Parity, StateVector, Tolerances};
use crate::linalg::{inner, loglog_fit, CVector, I, ONE, ZERO};

/// Smallest decayed amplitude the decoder accepts.
pub const DEFAULT_ORTHOGONALITY_FLOOR: f64 = 0.8;

/// Logical state `c1·W₁ + c2·W₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogicalQubit {
    pub c1: Complex64,
    pub c2: Complex64,
}

impl LogicalQubit {
    pub fn new(c1: Complex64, c2: Complex64) -> Result<Self> {
        let norm = c1.norm_sqr() + c2.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::param("logical", format!("|c1|² + |c2|² = {norm}, expected 1")));
        }
        Ok(LogicalQubit { c1, c2 })
    }

    pub fn normalized(c1: Complex64, c2: Complex64) -> Result<Self> {
        let norm = (c1.norm_sqr() + c2.norm_sqr()).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::DegenerateState("logical coordinates vanish".into()));
        }
        Ok(LogicalQubit {
            c1: c1 / norm,
            c2: c2 / norm,
        })
    }

    pub fn zero() -> Self {
        LogicalQubit { c1: ONE, c2: ZERO }
    }

    pub fn one() -> Self {
        LogicalQubit { c1: ZERO, c2: ONE }
    }

    pub fn plus() -> Self {
        let h = Complex64::from(std::f64::consts::FRAC_1_SQRT_2);
        LogicalQubit { c1: h, c2: h }
    }

    pub fn plus_i() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        LogicalQubit {
            c1: Complex64::from(h),
            c2: Complex64::new(0.0, h),
        }
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &LogicalQubit) -> f64 {
        (self.c1.conj() * other.c1 + self.c2.conj() * other.c2).norm_sqr()
    }

    /// `1 − ⟨Z⟩²`: the infidelity a logical phase flip causes.
    pub fn phase_flip_visibility(&self) -> f64 {
        1.0 - (self.c1.norm_sqr() - self.c2.norm_sqr()).powi(2)
    }
}

/// Which codeword.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Codeword {
    W1,
    W2,
}

/// Photon-loss rate, monitoring interval and horizon of a QEC run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CodeParams {
    pub alpha0: f64,
    pub kappa: f64,
    pub delta_t: f64,
    pub t_final: f64,
    pub readout_flip_p: f64,
}

impl CodeParams {
    pub fn new(alpha0: f64, kappa: f64, delta_t: f64, t_final: f64) -> Result<Self> {
        let p = CodeParams {
            alpha0,
            kappa,
            delta_t,
            t_final,
            readout_flip_p: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_readout_flip(mut self, p: f64) -> Result<Self> {
        self.readout_flip_p = p;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha0 > 0.0 && self.alpha0.is_finite()) {
            return Err(Error::param("alpha", format!("must be positive, got {}", self.alpha0)));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(Error::param("kappa", format!("must be non-negative, got {}", self.kappa)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::param("t_final", format!("must be positive, got {}", self.t_final)));
        }
        if !(self.delta_t > 0.0 && self.delta_t < self.t_final) {
            return Err(Error::param(
                "delta_t",
                format!("must lie in (0, t_final), got {}", self.delta_t),
            ));
        }
        if !(0.0..1.0).contains(&self.readout_flip_p) {
            return Err(Error::param(
                "readout_flip_p",
                format!("must lie in [0, 1), got {}", self.readout_flip_p),
            ));
        }
        Ok(())
    }

    /// Number of monitoring intervals; the last one ends at `t_final`.
    pub fn n_intervals(&self) -> usize {
        ((self.t_final / self.delta_t) - 1e-9).ceil().max(1.0) as usize
    }

    pub fn measurement_times(&self) -> Vec<f64> {
        let n = self.n_intervals();
        (1..=n)
            .map(|k| if k == n { self.t_final } else { k as f64 * self.delta_t })
            .collect()
    }

    /// Decayed amplitude `α₀ e^{−κt/2}`.
    pub fn alpha_at(&self, t: f64) -> f64 {
        self.alpha0 * (-0.5 * self.kappa * t).exp()
    }

    /// Initial loss rate `κα₀²`.
    pub fn gamma0(&self) -> f64 {
        self.kappa * self.alpha0 * self.alpha0
    }
}

/// Parity record of one run and the jump count it implies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyndromeLog {
    pub entries: Vec<(f64, Parity)>,
    pub inferred_jumps_mod4: u8,
}

impl SyndromeLog {
    /// Every change of reported parity counts as one jump. The code starts even.
    pub fn from_record(entries: Vec<(f64, Parity)>) -> Self {
        let mut last = Parity::Even;
        let mut count = 0u8;
        for (_, p) in &entries {
            if *p != last {
                count = (count + 1) % 4;
                last = *p;
            }
        }
        SyndromeLog {
            entries,
            inferred_jumps_mod4: count,
        }
    }
}

/// The two cats of one parity manifold and their Gram matrix.
#[derive(Debug, Clone)]
struct Manifold {
    m1: CVector,
    m2: CVector,
    gram_inv: Matrix2<Complex64>,
    overlap: Complex64,
}

impl Manifold {
    fn new(alpha: f64, parity: Parity, dim: FockDim, tol: &Tolerances) -> Result<Self> {
        let a = Complex64::from(alpha);
        let m1 = cat_superposition_with(a, parity, dim, tol)?.into_amplitudes();
        let m2 = cat_superposition_with(a * I, parity, dim, tol)?.into_amplitudes();
        let overlap = inner(&m1, &m2);
        let gram = Matrix2::new(inner(&m1, &m1), overlap, overlap.conj(), inner(&m2, &m2));
        let gram_inv = gram
            .try_inverse()
            .ok_or_else(|| Error::DegenerateState("codeword Gram matrix is singular".into()))?;
        Ok(Manifold {
            m1,
            m2,
            gram_inv,
            overlap,
        })
    }

    /// Least-squares coordinates of `psi` and the weight of its projection.
    fn project(&self, psi: &CVector) -> (Vector2<Complex64>, f64) {
        let b = Vector2::new(inner(&self.m1, psi), inner(&self.m2, psi));
        let x = self.gram_inv * b;
        let weight = (b[0].conj() * x[0] + b[1].conj() * x[1]).re;
        (x, weight)
    }
}

/// Codewords of one amplitude in both parity manifolds, ready for decoding.
#[derive(Debug, Clone)]
pub struct CodeSpace {
    alpha: f64,
    dim: FockDim,
    manifolds: [Manifold; 2],
}

impl CodeSpace {
    /// Fails with [`Error::CodeCollapse`] below `floor`.
    pub fn new(alpha: f64, dim: FockDim, floor: f64, tol: &Tolerances) -> Result<Self> {
        if !(alpha >= floor) {
            return Err(Error::CodeCollapse { alpha_t: alpha, floor });
        }
        Ok(CodeSpace {
            alpha,
            dim,
            manifolds: [
                Manifold::new(alpha, Parity::Even, dim, tol)?,
                Manifold::new(alpha, Parity::Odd, dim, tol)?,
            ],
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> FockDim {
        self.dim
    }

    fn manifold(&self, parity: Parity) -> &Manifold {
        match parity {
            Parity::Even => &self.manifolds[0],
            Parity::Odd => &self.manifolds[1],
        }
    }

    /// `⟨M₁|M₂⟩` in the given manifold.
    pub fn overlap(&self, parity: Parity) -> Complex64 {
        self.manifold(parity).overlap
    }

    /// Normalized manifold codeword (`k = 0` gives `W₁`/`W₂`).
    pub fn codeword(&self, word: Codeword, parity: Parity) -> StateVector {
        let m = self.manifold(parity);
        let v = match word {
            Codeword::W1 => m.m1.clone(),
            Codeword::W2 => m.m2.clone(),
        };
        StateVector::normalized(v).expect("codewords are normalized")
    }

    /// The state `c1·W₁ + c2·W₂` after `jumps` losses, up to normalization:
    /// `c1·M₁ + i^k·c2·M₂` in the manifold of parity `(−1)^k`.
    pub fn state_after_jumps(&self, lq: &LogicalQubit, jumps: usize) -> Result<StateVector> {
        let m = self.manifold(parity_of(jumps));
        let v = &m.m1 * lq.c1 + &m.m2 * (lq.c2 * i_pow(jumps));
        StateVector::normalized(v)
    }

    /// Decodes in the manifold implied by `jumps_mod4` and undoes its frame.
    pub fn decode(&self, state: &StateVector, jumps_mod4: u8) -> Result<(LogicalQubit, DecodeReport)> {
        let frame = recovery_map(jumps_mod4)?;
        self.check_dim(state)?;
        let m = self.manifold(frame.manifold);
        let (x, weight) = m.project(state.amplitudes());
        let report = DecodeReport {
            residual: (state.amplitudes().norm_squared() - weight).max(0.0),
            code_weight: weight,
            gram_overlap: m.overlap.norm(),
        };
        Ok((frame.apply(x[0], x[1])?, report))
    }

    /// Decodes without any jump information: coordinates from both manifolds are
    /// summed and no frame correction is applied.
    pub fn decode_parity_blind(&self, state: &StateVector) -> Result<(LogicalQubit, DecodeReport)> {
        self.check_dim(state)?;
        let (xe, we) = self.manifolds[0].project(state.amplitudes());
        let (xo, wo) = self.manifolds[1].project(state.amplitudes());
        let weight = we + wo;
        let report = DecodeReport {
            residual: (state.amplitudes().norm_squared() - weight).max(0.0),
            code_weight: weight,
            gram_overlap: self.manifolds[0].overlap.norm().max(self.manifolds[1].overlap.norm()),
        };
        Ok((LogicalQubit::normalized(xe[0] + xo[0], xe[1] + xo[1])?, report))
    }

    fn check_dim(&self, state: &StateVector) -> Result<()> {
        if state.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim.get(),
                found: state.dim().get(),
            });
        }
        Ok(())
    }
}

fn parity_of(jumps: usize) -> Parity {
    Parity::of_level(jumps)
}

fn i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    }
}

/// Outcome quality of a decode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecodeReport {
    /// Squared norm of the part of the state outside the decoding manifold.
    pub residual: f64,
    pub code_weight: f64,
    /// `|⟨M₁|M₂⟩|` of the decoding manifold.
    pub gram_overlap: f64,
}

/// Even codewords `(W₁, W₂)` with exact normalization.
pub fn codewords(alpha: f64, dim: FockDim) -> Result<(StateVector, StateVector)> {
    codewords_with(alpha, dim, &Tolerances::default())
}

pub fn codewords_with(alpha: f64, dim: FockDim, tol: &Tolerances) -> Result<(StateVector, StateVector)> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::param("alpha", format!("must be positive, got {alpha}")));
    }
    let a = Complex64::from(alpha);
    Ok((
        cat_superposition_with(a, Parity::Even, dim, tol)?,
        cat_superposition_with(a * I, Parity::Even, dim, tol)?,
    ))
}

/// `⟨W₁|W₂⟩ = 2e^{−α²}cos(α²) / (1 + e^{−2α²})`.
pub fn codeword_overlap(alpha: f64) -> f64 {
    let a2 = alpha * alpha;
    2.0 * (-a2).exp() * a2.cos() / (1.0 + (-2.0 * a2).exp())
}

/// `c1·W₁ + c2·W₂`, renormalized.
pub fn encode(lq: &LogicalQubit, alpha: f64, dim: FockDim) -> Result<StateVector> {
    let (w1, w2) = codewords(alpha, dim)?;
    StateVector::normalized(w1.amplitudes() * lq.c1 + w2.amplitudes() * lq.c2)
}

/// `a^k` applied to a state, renormalized.
pub fn apply_losses(state: &StateVector, k: usize) -> Result<StateVector> {
    let a = ladder_operators(state.dim()).a;
    let mut v = state.amplitudes().clone();
    for _ in 0..k {
        v = a.matrix() * v;
    }
    StateVector::normalized(v)
}

/// `a^k W` as `phase · reference`, where `reference` is the normalized manifold
/// codeword of parity `(−1)^k`.
#[derive(Debug, Clone)]
pub struct SyndromeAction {
    pub state: StateVector,
    pub reference: StateVector,
    pub phase: Complex64,
}

pub fn syndrome_action(word: Codeword, n_jumps: u8, alpha: f64, dim: FockDim) -> Result<SyndromeAction> {
    if n_jumps > 3 {
        return Err(Error::param("n_jumps", format!("must lie in 0..=3, got {n_jumps}")));
    }
    let k = n_jumps as usize;
    let (w1, w2) = codewords(alpha, dim)?;
    let start = match word {
        Codeword::W1 => w1,
        Codeword::W2 => w2,
    };
    let state = apply_losses(&start, k)?;
    let a = match word {
        Codeword::W1 => Complex64::from(alpha),
        Codeword::W2 => Complex64::from(alpha) * I,
    };
    let reference = cat_superposition_with(a, parity_of(k), dim, &Tolerances::default())?;
    let phase = reference.inner(&state)?;
    Ok(SyndromeAction {
        state,
        reference,
        phase,
    })
}

/// Decoder-side correction for a jump count modulo 4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogicalFrame {
    /// Parity manifold the code currently occupies.
    pub manifold: Parity,
    /// Factor applied to the `W₂` coordinate, `i^{−k}`.
    pub phase_correction: Complex64,
}

impl LogicalFrame {
    pub fn is_identity(&self) -> bool {
        self.manifold == Parity::Even && self.phase_correction == ONE
    }

    pub fn apply(&self, x1: Complex64, x2: Complex64) -> Result<LogicalQubit> {
        LogicalQubit::normalized(x1, x2 * self.phase_correction)
    }
}

pub fn recovery_map(jumps_mod4: u8) -> Result<LogicalFrame> {
    if jumps_mod4 > 3 {
        return Err(Error::param("jumps_mod4", format!("must lie in 0..=3, got {jumps_mod4}")));
    }
    let k = jumps_mod4 as usize;
    Ok(LogicalFrame {
        manifold: parity_of(k),
        phase_correction: i_pow(4 - k),
    })
}

/// Decodes against codewords of amplitude `alpha_t`.
pub fn decode(
    state: &StateVector,
    alpha_t: f64,
    jumps_mod4: u8,
) -> Result<(LogicalQubit, DecodeReport)> {
    let space = CodeSpace::new(alpha_t, state.dim(), DEFAULT_ORTHOGONALITY_FLOOR, &Tolerances::default())?;
    space.decode(state, jumps_mod4)
}

/// Smallest truncation that holds the codewords of amplitude `alpha` within tolerance.
pub fn code_dim(alpha: f64, tol: &Tolerances) -> Result<FockDim> {
    let mut dim = FockDim::for_amplitude(alpha, tol.tail);
    for _ in 0..64 {
        if codewords_with(alpha, dim, tol).is_ok() {
            return Ok(dim);
        }
        dim = FockDim::new(dim.get() + 1)?;
    }
    codewords_with(alpha, dim, tol).map(|_| dim)
}

/// Mean fidelity per report time for both decoders.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub params: CodeParams,
    pub logical: LogicalQubit,
    pub dim: usize,
    pub n_shots: usize,
    pub seed: u64,
    pub times: Vec<f64>,
    pub fid_monitored: Vec<f64>,
    pub fid_unmonitored: Vec<f64>,
    pub stderr_monitored: Vec<f64>,
    pub stderr_unmonitored: Vec<f64>,
    /// Standard error of the paired difference monitored − unmonitored.
    pub stderr_difference: Vec<f64>,
    pub mean_jumps: f64,
    pub slope_fit: Option<SlopeSummary>,
}

/// Both scaling sweeps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeSummary {
    pub monitored: SweepFit,
    pub unmonitored: SweepFit,
}

/// Log-log fit of an error measure against a control parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepFit {
    /// Name of the control parameter.
    pub x_label: String,
    pub x: Vec<f64>,
    pub error: Vec<f64>,
    pub mean_fidelity: Vec<f64>,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
}

impl SweepFit {
    fn new(x_label: &str, x: Vec<f64>, error: Vec<f64>, mean_fidelity: Vec<f64>) -> Self {
        let fit = loglog_fit(&x, &error);
        SweepFit {
            x_label: x_label.into(),
            slope: fit.map(|f| f.0),
            intercept: fit.map(|f| f.1),
            x,
            error,
            mean_fidelity,
        }
    }
}

/// Sampled shot: its trajectory and the reported parity after each interval.
struct Shot {
    trajectory: TrajectoryRecord,
}

impl Shot {
    fn jumps_until(&self, t: f64) -> usize {
        self.trajectory.jump_times.iter().take_while(|s| **s <= t).count()
    }

    /// Inferred jump count mod 4 after each of the given measurement times.
    fn inferred_counts<R: Rng + ?Sized>(&self, times: &[f64], flip_p: f64, rng: &mut R) -> Vec<u8> {
        let mut last = Parity::Even;
        let mut count = 0u8;
        times
            .iter()
            .map(|t| {
                let mut reported = parity_of(self.jumps_until(*t));
                if flip_p > 0.0 && rng.random::<f64>() < flip_p {
                    reported = reported.flipped();
                }
                if reported != last {
                    count = (count + 1) % 4;
                    last = reported;
                }
                count
            })
            .collect()
    }
}

/// Fidelity of a decode; a state with no weight in the decoding manifold leaves the
/// decoder with no information, scored as the maximally mixed guess.
fn decoded_fidelity(result: Result<(LogicalQubit, DecodeReport)>, lq: &LogicalQubit) -> Result<f64> {
    match result {
        Ok((out, report)) if report.code_weight > 1e-12 => Ok(lq.fidelity(&out)),
        Ok(_) | Err(Error::DegenerateState(_)) => Ok(0.5),
        Err(e) => Err(e),
    }
}

/// Indices into the measurement times kept in the report: at most 64, always
/// including the last.
fn report_indices(n: usize) -> Vec<usize> {
    let stride = n.div_ceil(64).max(1);
    let mut idx: Vec<usize> = (stride - 1..n).step_by(stride).collect();
    if idx.last() != Some(&(n - 1)) {
        idx.push(n - 1);
    }
    idx
}

fn mean_and_stderr(samples: &[f64]) -> (f64, f64) {
    let e = crate::channel::EnsembleEstimate::from_samples(samples);
    (e.mean, e.stderr)
}

/// Monte Carlo lifetime experiment.
///
/// Each shot samples a photon-loss trajectory of the encoded state, records ideal
/// parity measurements at `kΔt` (flipped with `readout_flip_p`), and decodes at every
/// report time. The monitored arm tracks the inferred jump count; the unmonitored arm
/// uses [`CodeSpace::decode_parity_blind`].
pub fn run_qec_experiment(
    params: &CodeParams,
    lq: &LogicalQubit,
    n_shots: usize,
    rng_seed: u64,
) -> Result<ExperimentReport> {
    params.validate()?;
    if n_shots == 0 {
        return Err(Error::param("shots", "must be at least 1"));
    }
    let tol = Tolerances::default();
    let dim = code_dim(params.alpha0, &tol)?;
    let initial = encode(lq, params.alpha0, dim)?;
    let meas_times = params.measurement_times();
    let idx = report_indices(meas_times.len());
    let mut times = vec![0.0];
    times.extend(idx.iter().map(|i| meas_times[*i]));
    let spaces: Vec<CodeSpace> = times
        .iter()
        .map(|t| CodeSpace::new(params.alpha_at(*t), dim, DEFAULT_ORTHOGONALITY_FLOOR, &tol))
        .collect::<Result<_>>()?;

    struct ShotResult {
        monitored: Vec<f64>,
        unmonitored: Vec<f64>,
        jumps: usize,
    }
    let results: Vec<ShotResult> = (0..n_shots as u64)
        .into_par_iter()
        .map(|shot| -> Result<ShotResult> {
            let mut rng = shot_rng(rng_seed, shot);
            let trajectory = trajectory_sample_with(&initial, params.kappa, params.t_final, &mut rng)?;
            let s = Shot { trajectory };
            let inferred = s.inferred_counts(&meas_times, params.readout_flip_p, &mut rng);
            let mut monitored = Vec::with_capacity(times.len());
            let mut unmonitored = Vec::with_capacity(times.len());
            for (r, t) in times.iter().enumerate() {
                let space = &spaces[r];
                let last = r == times.len() - 1;
                let state = if last {
                    s.trajectory.final_state.clone()
                } else {
                    space.state_after_jumps(lq, s.jumps_until(*t))?
                };
                let k_hat = if r == 0 { 0 } else { inferred[idx[r - 1]] };
                monitored.push(decoded_fidelity(space.decode(&state, k_hat), lq)?);
                unmonitored.push(decoded_fidelity(space.decode_parity_blind(&state), lq)?);
            }
            Ok(ShotResult {
                monitored,
                unmonitored,
                jumps: s.trajectory.n_jumps,
            })
        })
        .collect::<Result<_>>()?;

    let n_t = times.len();
    let mut fid_monitored = Vec::with_capacity(n_t);
    let mut fid_unmonitored = Vec::with_capacity(n_t);
    let mut stderr_monitored = Vec::with_capacity(n_t);
    let mut stderr_unmonitored = Vec::with_capacity(n_t);
    let mut stderr_difference = Vec::with_capacity(n_t);
    for r in 0..n_t {
        let m: Vec<f64> = results.iter().map(|s| s.monitored[r]).collect();
        let u: Vec<f64> = results.iter().map(|s| s.unmonitored[r]).collect();
        let d: Vec<f64> = m.iter().zip(&u).map(|(a, b)| a - b).collect();
        let (mm, ms) = mean_and_stderr(&m);
        let (um, us) = mean_and_stderr(&u);
        fid_monitored.push(mm);
        fid_unmonitored.push(um);
        stderr_monitored.push(ms);
        stderr_unmonitored.push(us);
        stderr_difference.push(mean_and_stderr(&d).1);
    }
    let mean_jumps = results.iter().map(|s| s.jumps as f64).sum::<f64>() / n_shots as f64;
    Ok(ExperimentReport {
        params: *params,
        logical: *lq,
        dim: dim.get(),
        n_shots,
        seed: rng_seed,
        times,
        fid_monitored,
        fid_unmonitored,
        stderr_monitored,
        stderr_unmonitored,
        stderr_difference,
        mean_jumps,
        slope_fit: None,
    })
}

/// Phase-flip rate `λ` of a Poisson error process from the mean fidelity it produces:
/// `F̄ = 1 − w(1 − e^{−2λ})/2`, with `w` the logical state's phase-flip visibility.
pub fn phase_flip_rate(mean_fidelity: f64, visibility: f64) -> Option<f64> {
    let x = 1.0 - 2.0 * (1.0 - mean_fidelity) / visibility;
    (x > 0.0).then(|| -0.5 * x.ln())
}

/// Monitored arm versus monitoring interval. All intervals share the same
/// trajectories; `steps` lists the number of intervals in `[0, t_final]`. The error
/// measure is the phase-flip probability per interval, `λ/N`, plotted against `Γ₀Δt`.
pub fn delta_t_sweep(
    params: &CodeParams,
    lq: &LogicalQubit,
    steps: &[usize],
    n_shots: usize,
    rng_seed: u64,
) -> Result<SweepFit> {
    params.validate()?;
    let w = lq.phase_flip_visibility();
    if w < 1e-6 {
        return Err(Error::param("logical", "a sweep needs a state sensitive to phase flips"));
    }
    if steps.is_empty() || steps.contains(&0) {
        return Err(Error::param("sweep_steps", "must be a non-empty list of positive counts"));
    }
    if n_shots == 0 {
        return Err(Error::param("shots", "must be at least 1"));
    }
    let tol = Tolerances::default();
    let dim = code_dim(params.alpha0, &tol)?;
    let initial = encode(lq, params.alpha0, dim)?;
    let space = CodeSpace::new(params.alpha_at(params.t_final), dim, DEFAULT_ORTHOGONALITY_FLOOR, &tol)?;
    let schedules: Vec<Vec<f64>> = steps
        .iter()
        .map(|n| (1..=*n).map(|k| params.t_final * k as f64 / *n as f64).collect())
        .collect();

    let per_shot: Vec<Vec<f64>> = (0..n_shots as u64)
        .into_par_iter()
        .map(|shot| -> Result<Vec<f64>> {
            let mut rng = shot_rng(rng_seed, shot);
            let trajectory = trajectory_sample_with(&initial, params.kappa, params.t_final, &mut rng)?;
            let s = Shot { trajectory };
            schedules
                .iter()
                .map(|sched| {
                    let k_hat = *s.inferred_counts(sched, params.readout_flip_p, &mut rng).last().unwrap();
                    decoded_fidelity(space.decode(&s.trajectory.final_state, k_hat), lq)
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let gamma0 = params.gamma0();
    let mut x = Vec::new();
    let mut error = Vec::new();
    let mut fids = Vec::new();
    for (c, n) in steps.iter().enumerate() {
        let f = per_shot.iter().map(|v| v[c]).sum::<f64>() / n_shots as f64;
        let lambda = phase_flip_rate(f, w).unwrap_or(f64::INFINITY);
        x.push(gamma0 * params.t_final / *n as f64);
        error.push(lambda / *n as f64);
        fids.push(f);
    }
    Ok(SweepFit::new("gamma0_delta_t", x, error, fids))
}

/// Unmonitored arm versus loss rate at fixed `t_final`: for each `Γ₀T` the rate is
/// `κ = Γ₀T/(α₀²T)`, and the error measure is the infidelity per unit time.
/// Trajectories reuse the same generator streams, so only the time scale changes.
pub fn gamma_sweep(
    params: &CodeParams,
    lq: &LogicalQubit,
    gamma_t: &[f64],
    n_shots: usize,
    rng_seed: u64,
) -> Result<SweepFit> {
    params.validate()?;
    if gamma_t.is_empty() || gamma_t.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
        return Err(Error::param("gamma_t", "must be a non-empty list of positive values"));
    }
    if n_shots == 0 {
        return Err(Error::param("shots", "must be at least 1"));
    }
    let tol = Tolerances::default();
    let dim = code_dim(params.alpha0, &tol)?;
    let initial = encode(lq, params.alpha0, dim)?;
    let t = params.t_final;
    let kappas: Vec<f64> = gamma_t
        .iter()
        .map(|g| g / (params.alpha0 * params.alpha0 * t))
        .collect();
    let spaces: Vec<CodeSpace> = kappas
        .iter()
        .map(|k| {
            CodeSpace::new(
                params.alpha0 * (-0.5 * k * t).exp(),
                dim,
                DEFAULT_ORTHOGONALITY_FLOOR,
                &tol,
            )
        })
        .collect::<Result<_>>()?;

    let per_shot: Vec<Vec<f64>> = (0..n_shots as u64)
        .into_par_iter()
        .map(|shot| -> Result<Vec<f64>> {
            kappas
                .iter()
                .zip(&spaces)
                .map(|(k, space)| {
                    let mut rng = shot_rng(rng_seed, shot);
                    let r = trajectory_sample_with(&initial, *k, t, &mut rng)?;
                    decoded_fidelity(space.decode_parity_blind(&r.final_state), lq)
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut x = Vec::new();
    let mut error = Vec::new();
    let mut fids = Vec::new();
    for (c, g) in gamma_t.iter().enumerate() {
        let f = per_shot.iter().map(|v| v[c]).sum::<f64>() / n_shots as f64;
        x.push(g / t);
        error.push((1.0 - f) / t);
        fids.push(f);
    }
    Ok(SweepFit::new("gamma0", x, error, fids))
}
