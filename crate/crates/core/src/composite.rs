//! Qubit ⊗ cavity: dispersive evolution, the parity-measurement protocol and the
//! cat-preparation recipes.
//!
//! Product-basis amplitudes are stored qubit-major: index `q·dim + n`, with `q = 0`
//! for `|g⟩` and `q = 1` for `|e⟩`. All dynamics is in the frame rotating at the bare
//! cavity and qubit frequencies, where the only remaining term is `V = −χ a†a |e⟩⟨e|`.

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{
    cat_state_with, check_coherent_tail, coherent_state_with, displacement_operator_with,
    parity_operator, FockDim, OperatorMatrix, Parity, Space, StateVector, Tolerances,
};
use crate::linalg::{inner, kron, CMatrix, CVector, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Qubit {
    Ground,
    Excited,
}

impl Qubit {
    fn offset(self, dim: usize) -> usize {
        match self {
            Qubit::Ground => 0,
            Qubit::Excited => dim,
        }
    }
}

/// Joint pure state of the ancilla qubit and the cavity.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitCavityState {
    amplitudes: CVector,
    dim: FockDim,
}

impl QubitCavityState {
    pub fn new(amplitudes: CVector, dim: FockDim) -> Result<Self> {
        if amplitudes.len() != 2 * dim.get() {
            return Err(Error::DimensionMismatch {
                expected: 2 * dim.get(),
                found: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if !norm.is_finite() || norm > 1.0 + 1e-10 {
            return Err(Error::param("amplitudes", format!("joint norm {norm} exceeds 1")));
        }
        Ok(QubitCavityState { amplitudes, dim })
    }

    /// `(c_g|g⟩ + c_e|e⟩) ⊗ |ψ⟩`.
    pub fn product(qubit: [Complex64; 2], cavity: &StateVector) -> Result<Self> {
        let dim = cavity.dim();
        let n = dim.get();
        let psi = cavity.amplitudes();
        let amps = CVector::from_fn(2 * n, |i, _| qubit[i / n] * psi[i % n]);
        QubitCavityState::new(amps, dim)
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> FockDim {
        self.dim
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Unnormalized cavity amplitudes `⟨q|Ψ⟩`.
    pub fn block(&self, q: Qubit) -> CVector {
        let n = self.dim.get();
        self.amplitudes.rows(q.offset(n), n).into_owned()
    }

    pub fn qubit_probability(&self, q: Qubit) -> f64 {
        let n = self.dim.get();
        self.amplitudes.rows(q.offset(n), n).norm_squared()
    }

    /// Cavity state conditioned on the qubit being found in `q`.
    pub fn conditional_cavity(&self, q: Qubit) -> Result<StateVector> {
        StateVector::normalized(self.block(q))
    }

    /// Reduced qubit density matrix in the `(g, e)` basis.
    pub fn reduced_qubit(&self) -> Matrix2<Complex64> {
        let g = self.block(Qubit::Ground);
        let e = self.block(Qubit::Excited);
        let ge = inner(&e, &g);
        Matrix2::new(
            Complex64::from(g.norm_squared()),
            ge,
            ge.conj(),
            Complex64::from(e.norm_squared()),
        )
    }

    pub fn qubit_purity(&self) -> f64 {
        let r = self.reduced_qubit();
        r[(0, 0)].re.powi(2) + r[(1, 1)].re.powi(2) + 2.0 * r[(0, 1)].norm_sqr()
    }

    /// Von Neumann entropy (natural log) of the reduced qubit state.
    pub fn entanglement_entropy(&self) -> f64 {
        let r = self.reduced_qubit();
        let tr = r[(0, 0)].re + r[(1, 1)].re;
        let det = (r[(0, 0)].re * r[(1, 1)].re - r[(0, 1)].norm_sqr()).max(0.0);
        let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
        let big = 0.5 * (tr + disc);
        // small root via det/big avoids cancellation
        let small = if big > 0.0 { det / big } else { 0.0 };
        [big, small]
            .iter()
            .filter(|l| **l > 0.0)
            .map(|l| -l * l.ln())
            .sum()
    }

    pub fn fidelity(&self, other: &QubitCavityState) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim.get(),
                found: other.dim.get(),
            });
        }
        Ok(inner(&self.amplitudes, &other.amplitudes).norm_sqr()
            / (self.amplitudes.norm_squared() * other.amplitudes.norm_squared()))
    }

    pub fn apply(&self, op: &OperatorMatrix) -> Result<QubitCavityState> {
        if op.space() != Space::QubitCavity(self.dim) {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.dim.get(),
                found: op.space().size(),
            });
        }
        QubitCavityState::new(op.matrix() * &self.amplitudes, self.dim)
    }

    /// Applies a cavity operator to both qubit blocks.
    pub fn apply_cavity(&self, op: &OperatorMatrix) -> Result<QubitCavityState> {
        if op.space() != Space::Cavity(self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim.get(),
                found: op.space().size(),
            });
        }
        let n = self.dim.get();
        let mut amps = self.amplitudes.clone();
        for q in [Qubit::Ground, Qubit::Excited] {
            let out = op.matrix() * self.block(q);
            amps.rows_mut(q.offset(n), n).copy_from(&out);
        }
        QubitCavityState::new(amps, self.dim)
    }
}

impl crate::fock::QuantumState for QubitCavityState {
    fn space_size(&self) -> usize {
        self.amplitudes.len()
    }
    fn expect_matrix(&self, m: &CMatrix) -> Complex64 {
        inner(&self.amplitudes, &(m * &self.amplitudes))
    }
}

/// Dispersive-coupling parameters. Only `chi` enters the dynamics; the dressed
/// frequencies are carried for bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersiveParams {
    pub chi: f64,
    pub omega_c: f64,
    pub omega_q: f64,
}

impl DispersiveParams {
    pub fn new(chi: f64, omega_c: f64, omega_q: f64) -> Result<Self> {
        if !(chi > 0.0 && chi.is_finite()) {
            return Err(Error::param("chi", format!("must be positive, got {chi}")));
        }
        Ok(DispersiveParams {
            chi,
            omega_c,
            omega_q,
        })
    }

    /// `χ` alone, with time measured in `1/χ`.
    pub fn from_chi(chi: f64) -> Result<Self> {
        DispersiveParams::new(chi, 0.0, 0.0)
    }
}

/// `V = −χ a†a |e⟩⟨e|`.
pub fn rotating_frame_generator(params: &DispersiveParams, dim: FockDim) -> OperatorMatrix {
    let n = dim.get();
    let diag = CVector::from_fn(2 * n, |i, _| {
        if i < n {
            ZERO
        } else {
            Complex64::from(-params.chi * (i - n) as f64)
        }
    });
    OperatorMatrix::from_parts(
        CMatrix::from_diagonal(&diag),
        Space::QubitCavity(dim),
        "V",
    )
}

fn qubit_op(m: [[f64; 2]; 2]) -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::from(m[0][0]),
            Complex64::from(m[0][1]),
            Complex64::from(m[1][0]),
            Complex64::from(m[1][1]),
        ],
    )
}

/// `U_π = |g⟩⟨g| ⊗ I + |e⟩⟨e| ⊗ Π`, the dispersive evolution for `t = π/χ`.
pub fn u_pi(dim: FockDim) -> OperatorMatrix {
    let id = CMatrix::identity(dim.get(), dim.get());
    let pi = parity_operator(dim);
    let m = kron(&qubit_op([[1.0, 0.0], [0.0, 0.0]]), &id)
        + kron(&qubit_op([[0.0, 0.0], [0.0, 1.0]]), pi.matrix());
    OperatorMatrix::from_parts(m, Space::QubitCavity(dim), "U_π")
}

/// Hadamard on the qubit, identity on the cavity.
pub fn hadamard(dim: FockDim) -> OperatorMatrix {
    let h = qubit_op([[1.0, 1.0], [1.0, -1.0]]) * Complex64::from(std::f64::consts::FRAC_1_SQRT_2);
    let m = kron(&h, &CMatrix::identity(dim.get(), dim.get()));
    OperatorMatrix::from_parts(m, Space::QubitCavity(dim), "H")
}

/// The parity-to-qubit mapping `H U_π H`.
pub fn parity_protocol(dim: FockDim) -> OperatorMatrix {
    let h = hadamard(dim);
    let m = h.matrix() * u_pi(dim).matrix() * h.matrix();
    OperatorMatrix::from_parts(m, Space::QubitCavity(dim), "H·U_π·H")
}

/// Outcome of one parity measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord<S> {
    /// Parity the state was projected onto.
    pub outcome: Parity,
    /// Parity reported by the (possibly imperfect) qubit readout.
    pub reported: Parity,
    pub p_even: f64,
    pub p_odd: f64,
    /// Born probability of the realized branch.
    pub pre_probability: f64,
    pub post_state: S,
}

/// Parity measurement with a cached protocol matrix for one truncation.
///
/// The ancilla starts in `|g⟩`, `H U_π H` maps even/odd photon number to `|g⟩`/`|e⟩`,
/// and the qubit is read out projectively. A single uniform draw `u` picks the even
/// branch iff `u < p_even`.
#[derive(Debug, Clone)]
pub struct ParityMeter {
    dim: FockDim,
    protocol: OperatorMatrix,
    readout_flip_p: f64,
}

impl ParityMeter {
    pub fn new(dim: FockDim) -> Self {
        ParityMeter {
            dim,
            protocol: parity_protocol(dim),
            readout_flip_p: 0.0,
        }
    }

    /// Classical readout error: the reported outcome is flipped with this probability.
    pub fn with_readout_flip(mut self, p: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::param("readout_flip_p", format!("must lie in [0, 1), got {p}")));
        }
        self.readout_flip_p = p;
        Ok(self)
    }

    pub fn dim(&self) -> FockDim {
        self.dim
    }

    pub fn protocol(&self) -> &OperatorMatrix {
        &self.protocol
    }

    pub fn measure<R: Rng + ?Sized>(
        &self,
        state: &StateVector,
        rng: &mut R,
    ) -> Result<MeasurementRecord<StateVector>> {
        if state.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim.get(),
                found: state.dim().get(),
            });
        }
        let norm = state.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::param("state", format!("cavity state not normalized (norm {norm})")));
        }
        let n = self.dim.get();
        // ancilla in |g⟩: only the first n columns of the protocol contribute
        let out = self.protocol.matrix().columns(0, n) * state.amplitudes();
        let ground = out.rows(0, n).into_owned();
        let excited = out.rows(n, n).into_owned();
        let (outcome, p_even, p_odd, p) = self.sample_branch(
            ground.norm_squared(),
            excited.norm_squared(),
            rng,
        )?;
        let kept = match outcome {
            Parity::Even => ground,
            Parity::Odd => excited,
        };
        let post_state = StateVector::new(kept / Complex64::from(p.sqrt()))?;
        let reported = self.readout(outcome, rng);
        Ok(MeasurementRecord {
            outcome,
            reported,
            p_even,
            p_odd,
            pre_probability: p,
            post_state,
        })
    }

    /// Uses the state's own qubit as the ancilla. The post-measurement state keeps
    /// the qubit in the measured basis state.
    pub fn measure_joint<R: Rng + ?Sized>(
        &self,
        state: &QubitCavityState,
        rng: &mut R,
    ) -> Result<MeasurementRecord<QubitCavityState>> {
        let out = state.apply(&self.protocol)?;
        let (outcome, p_even, p_odd, p) = self.sample_branch(
            out.qubit_probability(Qubit::Ground),
            out.qubit_probability(Qubit::Excited),
            rng,
        )?;
        let n = self.dim.get();
        let mut amps = out.amplitudes().clone();
        let drop = match outcome {
            Parity::Even => Qubit::Excited,
            Parity::Odd => Qubit::Ground,
        };
        amps.rows_mut(drop.offset(n), n).fill(ZERO);
        amps /= Complex64::from(p.sqrt());
        let post_state = QubitCavityState::new(amps, self.dim)?;
        let reported = self.readout(outcome, rng);
        Ok(MeasurementRecord {
            outcome,
            reported,
            p_even,
            p_odd,
            pre_probability: p,
            post_state,
        })
    }

    fn sample_branch<R: Rng + ?Sized>(
        &self,
        p_even: f64,
        p_odd: f64,
        rng: &mut R,
    ) -> Result<(Parity, f64, f64, f64)> {
        let total = p_even + p_odd;
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvariantViolation(format!(
                "branch probabilities sum to {total}"
            )));
        }
        let u: f64 = rng.random();
        let (outcome, p) = if u < p_even {
            (Parity::Even, p_even)
        } else {
            (Parity::Odd, p_odd)
        };
        if p <= 0.0 {
            return Err(Error::InvariantViolation(
                "sampled a zero-probability branch".into(),
            ));
        }
        Ok((outcome, p_even, p_odd, p))
    }

    fn readout<R: Rng + ?Sized>(&self, outcome: Parity, rng: &mut R) -> Parity {
        if self.readout_flip_p > 0.0 && rng.random::<f64>() < self.readout_flip_p {
            outcome.flipped()
        } else {
            outcome
        }
    }
}

/// Parity measurement of a cavity state with a fresh `|g⟩` ancilla.
pub fn measure_parity(state: &StateVector, rng_seed: u64) -> Result<MeasurementRecord<StateVector>> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    ParityMeter::new(state.dim()).measure(state, &mut rng)
}

pub fn measure_parity_joint(
    state: &QubitCavityState,
    rng_seed: u64,
) -> Result<MeasurementRecord<QubitCavityState>> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    ParityMeter::new(state.dim()).measure_joint(state, &mut rng)
}

/// `|e⟩⟨e| ⊗ I + |g⟩⟨g| ⊗ D(α)`: the cavity drive at the bare cavity frequency only
/// displaces the branch with the qubit in `|g⟩`.
pub fn conditional_displacement(
    state: &QubitCavityState,
    alpha: Complex64,
    tol: &Tolerances,
) -> Result<QubitCavityState> {
    let dim = state.dim();
    let d = displacement_operator_with(alpha, dim, tol)?;
    let n = dim.get();
    let mut amps = state.amplitudes().clone();
    let g = d.matrix() * state.block(Qubit::Ground);
    amps.rows_mut(0, n).copy_from(&g);
    QubitCavityState::new(amps, dim)
}

/// Entangled cat `(|e⟩|0⟩ + s|g⟩|α⟩)/√2`.
///
/// Recipe: a π/2 pulse takes `|g⟩` to `(|g⟩ + |e⟩)/√2`, a virtual Z sets the relative
/// sign `s`, and the qubit-conditioned drive displaces the `|g⟩` branch by `α`.
pub fn prepare_schrodinger_cat(alpha: Complex64, sign: Parity, dim: FockDim) -> Result<QubitCavityState> {
    prepare_schrodinger_cat_with(alpha, sign, dim, &Tolerances::default())
}

pub fn prepare_schrodinger_cat_with(
    alpha: Complex64,
    sign: Parity,
    dim: FockDim,
    tol: &Tolerances,
) -> Result<QubitCavityState> {
    check_coherent_tail(alpha.norm(), dim, tol)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let qubit = [Complex64::from(sign.sign() * h), Complex64::from(h)];
    let start = QubitCavityState::product(qubit, &StateVector::vacuum(dim))?;
    conditional_displacement(&start, alpha, tol)
}

/// Number-selective π pulse on the zero-photon transition: swaps `|g,0⟩ ↔ |e,0⟩`.
pub fn selective_pi_pulse(state: &QubitCavityState) -> QubitCavityState {
    let n = state.dim().get();
    let mut amps = state.amplitudes().clone();
    amps.swap_rows(0, n);
    QubitCavityState {
        amplitudes: amps,
        dim: state.dim(),
    }
}

/// Result of the deterministic cat recipe.
#[derive(Debug, Clone)]
pub struct DeterministicCat {
    pub joint: QubitCavityState,
    /// Cavity conditioned on the qubit in `|g⟩`, with the cat phase convention.
    pub cavity: StateVector,
    /// `|⟨g, cat(α, s)|Ψ⟩|²` against the ideal photon cat.
    pub fidelity: f64,
    pub qubit_ground_probability: f64,
    pub entanglement_entropy: f64,
    /// False when the residual `⟨0|2α⟩` overlap pushes the fidelity below `min_fidelity`.
    pub product_state_ok: bool,
}

/// Schrödinger cat at `2α`, selective π pulse, then displacement by `−α`.
pub fn prepare_cat_deterministic(alpha: Complex64, sign: Parity, dim: FockDim) -> Result<DeterministicCat> {
    prepare_cat_deterministic_with(alpha, sign, dim, &Tolerances::default(), 0.999)
}

pub fn prepare_cat_deterministic_with(
    alpha: Complex64,
    sign: Parity,
    dim: FockDim,
    tol: &Tolerances,
    min_fidelity: f64,
) -> Result<DeterministicCat> {
    let schrodinger = prepare_schrodinger_cat_with(alpha * 2.0, sign, dim, tol)?;
    let flipped = selective_pi_pulse(&schrodinger);
    let back = displacement_operator_with(-alpha, dim, tol)?;
    let joint = flipped.apply_cavity(&back)?;

    let ideal = cat_state_with(alpha, sign, dim, tol)?;
    let target = QubitCavityState::product([ONE, ZERO], &ideal)?;
    let fidelity = target.fidelity(&joint)?;
    let cavity = joint.conditional_cavity(Qubit::Ground)?.with_phase_convention();
    Ok(DeterministicCat {
        qubit_ground_probability: joint.qubit_probability(Qubit::Ground),
        entanglement_entropy: joint.entanglement_entropy(),
        product_state_ok: fidelity >= min_fidelity,
        fidelity,
        cavity,
        joint,
    })
}

/// Parity measurement of `|α⟩`; the back-action leaves an even or odd cat.
pub fn prepare_cat_by_measurement(
    alpha: Complex64,
    rng_seed: u64,
    dim: FockDim,
) -> Result<(MeasurementRecord<StateVector>, StateVector)> {
    let coherent = coherent_state_with(alpha, dim, &Tolerances::default())?;
    let meter = ParityMeter::new(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    cat_by_measurement(&meter, &coherent, &mut rng)
}

/// Same as [`prepare_cat_by_measurement`] with a reusable meter and input state.
pub fn cat_by_measurement<R: Rng + ?Sized>(
    meter: &ParityMeter,
    coherent: &StateVector,
    rng: &mut R,
) -> Result<(MeasurementRecord<StateVector>, StateVector)> {
    let record = meter.measure(coherent, rng)?;
    let cat = record.post_state.clone().with_phase_convention();
    Ok((record, cat))
}

/// One line of the photon-number-resolved qubit spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stick {
    pub photons: usize,
    /// Qubit frequency offset `−n·χ`.
    pub offset: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub sticks: Vec<Stick>,
}

impl Spectrum {
    pub fn total_weight(&self) -> f64 {
        self.sticks.iter().map(|s| s.weight).sum()
    }

    pub fn strongest(&self) -> Option<&Stick> {
        self.sticks
            .iter()
            .max_by(|a, b| a.weight.total_cmp(&b.weight))
    }
}

/// Quantum-jump spectroscopy of a coherent cavity state: one stick per photon number
/// at `−n·χ` weighted by the Poisson distribution.
pub fn jump_spectroscopy(nbar: f64, chi: f64, n_peaks: usize, dim: FockDim) -> Result<Spectrum> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::param("nbar", format!("must be non-negative, got {nbar}")));
    }
    if !(chi > 0.0 && chi.is_finite()) {
        return Err(Error::param("chi", format!("must be positive, got {chi}")));
    }
    if n_peaks == 0 || n_peaks > dim.get() {
        return Err(Error::param(
            "n_peaks",
            format!("must lie in 1..={}, got {n_peaks}", dim.get()),
        ));
    }
    let sticks = (0..n_peaks)
        .map(|n| Stick {
            photons: n,
            offset: -(n as f64) * chi,
            weight: crate::linalg::poisson_pmf(nbar, n),
        })
        .collect();
    Ok(Spectrum { sticks })
}
