//! Truncated single-mode Fock space: states, ladder operators, parity and displacement.
//!
//! Only the levels `|0⟩ … |dim−1⟩` are kept. Every constructor that produces a state
//! checks the probability mass that would land in the top 10% of levels (including
//! whatever lies past the cutoff) and fails with [`Error::Truncation`] when it exceeds
//! the tail tolerance.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{expm, inner, ln_factorials, poisson_tail, CMatrix, CVector, ONE, ZERO};

/// Numerical tolerances used across the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Exact structural identities (Π² = I, block structure, projector algebra).
    pub structural: f64,
    /// Identities that go through exponentials or long sums.
    pub analysis: f64,
    /// Largest probability mass allowed in the top 10% of the retained levels.
    pub tail: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            structural: 1e-12,
            analysis: 1e-8,
            tail: 1e-12,
        }
    }
}

/// Number of retained Fock levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct FockDim(usize);

impl FockDim {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension { dim });
        }
        Ok(FockDim(dim))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    /// Highest level (inclusive) of the subspace that truncation cannot pollute:
    /// `⌈0.8·dim⌉`, clamped to the top level.
    pub fn safe_top(self) -> usize {
        ((0.8 * self.0 as f64).ceil() as usize).min(self.0 - 1)
    }

    /// Number of levels in `0..=safe_top()`.
    pub fn safe_len(self) -> usize {
        self.safe_top() + 1
    }

    /// First level of the top 10% band used for tail-mass accounting.
    pub fn tail_start(self) -> usize {
        let band = self.0.div_ceil(10).max(1);
        self.0 - band
    }

    /// Smallest dimension in which a coherent state of amplitude `radius` passes the
    /// tail check at `tail_tol`.
    pub fn for_amplitude(radius: f64, tail_tol: f64) -> FockDim {
        let mean = radius * radius;
        let mut dim = (mean.ceil() as usize).max(2);
        while poisson_tail(mean, FockDim(dim).tail_start()) > tail_tol {
            dim += 1;
        }
        FockDim(dim)
    }
}

impl TryFrom<usize> for FockDim {
    type Error = Error;
    fn try_from(value: usize) -> Result<Self> {
        FockDim::new(value)
    }
}

impl From<FockDim> for usize {
    fn from(d: FockDim) -> usize {
        d.0
    }
}

/// Photon-number parity, also used as the relative sign of a cat superposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn from_sign(sign: i64) -> Result<Self> {
        match sign {
            1 => Ok(Parity::Even),
            -1 => Ok(Parity::Odd),
            other => Err(Error::param("sign", format!("must be +1 or -1, got {other}"))),
        }
    }

    pub fn of_level(n: usize) -> Self {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn contains(self, n: usize) -> bool {
        Parity::of_level(n) == self
    }
}

/// The Hilbert space an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    Cavity(FockDim),
    /// Qubit ⊗ cavity, ordered qubit-major: index `q·dim + n` with `q = 0` for `|g⟩`.
    QubitCavity(FockDim),
}

impl Space {
    pub fn size(self) -> usize {
        match self {
            Space::Cavity(d) => d.get(),
            Space::QubitCavity(d) => 2 * d.get(),
        }
    }

    pub fn fock_dim(self) -> FockDim {
        match self {
            Space::Cavity(d) | Space::QubitCavity(d) => d,
        }
    }
}

/// Pure cavity state over the truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
    dim: FockDim,
}

impl StateVector {
    /// Wraps raw amplitudes. The norm must not exceed one.
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let dim = FockDim::new(amplitudes.len())?;
        let norm = amplitudes.norm();
        if !norm.is_finite() || norm > 1.0 + 1e-10 {
            return Err(Error::param(
                "amplitudes",
                format!("state norm {norm} is not in [0, 1]"),
            ));
        }
        Ok(StateVector { amplitudes, dim })
    }

    /// Normalizes arbitrary amplitudes.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let dim = FockDim::new(amplitudes.len())?;
        let norm = amplitudes.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::DegenerateState(format!(
                "cannot normalize a vector of norm {norm}"
            )));
        }
        Ok(StateVector {
            amplitudes: amplitudes / Complex64::from(norm),
            dim,
        })
    }

    pub fn fock(n: usize, dim: FockDim) -> Result<Self> {
        if n >= dim.get() {
            return Err(Error::param(
                "n",
                format!("Fock level {n} outside dim={}", dim.get()),
            ));
        }
        let mut amps = CVector::zeros(dim.get());
        amps[n] = ONE;
        Ok(StateVector {
            amplitudes: amps,
            dim,
        })
    }

    pub fn vacuum(dim: FockDim) -> Self {
        StateVector::fock(0, dim).expect("level 0 always exists")
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn dim(&self) -> FockDim {
        self.dim
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalize(&self) -> Result<Self> {
        StateVector::normalized(self.amplitudes.clone())
    }

    /// Probability mass held in the top 10% of the retained levels.
    pub fn tail_mass(&self) -> f64 {
        self.amplitudes
            .iter()
            .skip(self.dim.tail_start())
            .map(|a| a.norm_sqr())
            .sum()
    }

    pub fn photon_distribution(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(n, a)| n as f64 * a.norm_sqr())
            .sum()
    }

    pub fn parity_expectation(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(n, a)| Parity::of_level(n).sign() * a.norm_sqr())
            .sum()
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_same(self.dim.get(), other.dim.get())?;
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    /// `|⟨a|b⟩|² / (‖a‖²‖b‖²)`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        let ov = self.inner(other)?;
        let denom = self.amplitudes.norm_squared() * other.amplitudes.norm_squared();
        if denom == 0.0 {
            return Err(Error::DegenerateState("fidelity with a null vector".into()));
        }
        Ok(ov.norm_sqr() / denom)
    }

    /// Zero-pads into a larger truncation.
    pub fn embed(&self, dim: FockDim) -> Result<Self> {
        if dim.get() < self.dim.get() {
            return Err(Error::DimensionMismatch {
                expected: self.dim.get(),
                found: dim.get(),
            });
        }
        let mut amps = CVector::zeros(dim.get());
        amps.rows_mut(0, self.dim.get()).copy_from(&self.amplitudes);
        Ok(StateVector {
            amplitudes: amps,
            dim,
        })
    }

    /// Applies the global-phase convention: the largest-magnitude amplitude
    /// (lowest index on ties) is made real and positive.
    pub fn with_phase_convention(mut self) -> Self {
        fix_global_phase(&mut self.amplitudes);
        self
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
            dim: self.dim,
        }
    }
}

pub(crate) fn fix_global_phase(amps: &mut CVector) {
    let max = amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = amps
        .iter()
        .position(|a| a.norm() >= max * (1.0 - 1e-12))
        .expect("max is attained");
    let phase = amps[pivot].conj() / amps[pivot].norm();
    amps.iter_mut().for_each(|a| *a *= phase);
}

fn check_same(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Cavity density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    dim: FockDim,
}

impl DensityMatrix {
    /// Validates Hermiticity (to 1e-10) and a trace in (0, 1].
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let dim = FockDim::new(matrix.nrows())?;
        let rho = DensityMatrix { matrix, dim };
        let herm = rho.hermiticity_defect();
        if herm > 1e-10 {
            return Err(Error::param(
                "rho",
                format!("not Hermitian (defect {herm:.3e})"),
            ));
        }
        let tr = rho.trace();
        if !(tr > 0.0 && tr <= 1.0 + 1e-10) {
            return Err(Error::param("rho", format!("trace {tr} outside (0, 1]")));
        }
        Ok(rho)
    }

    pub fn from_pure(state: &StateVector) -> Self {
        state.to_density()
    }

    /// Convex combination `Σ wᵢ |ψᵢ⟩⟨ψᵢ|`.
    pub fn mixture(parts: &[(f64, &StateVector)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::param("parts", "empty mixture"))?;
        let dim = first.1.dim();
        let mut m = CMatrix::zeros(dim.get(), dim.get());
        for (w, s) in parts {
            check_same(dim.get(), s.dim().get())?;
            if *w < 0.0 {
                return Err(Error::param("weight", "mixture weights must be non-negative"));
            }
            m += s.to_density().matrix * Complex64::from(*w);
        }
        DensityMatrix::new(m)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> FockDim {
        self.dim
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.norm_squared()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim.get();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.hermitian_part())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Eigen-decomposition `ρ = Σ λⱼ |vⱼ⟩⟨vⱼ|`, skipping `|λⱼ| <= cutoff`.
    pub fn spectral_components(&self, cutoff: f64) -> Vec<(f64, CVector)> {
        let eig = SymmetricEigen::new(self.hermitian_part());
        eig.eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, l)| l.abs() > cutoff)
            .map(|(j, l)| (*l, eig.eigenvectors.column(j).into_owned()))
            .collect()
    }

    fn hermitian_part(&self) -> CMatrix {
        (&self.matrix + self.matrix.adjoint()) * Complex64::from(0.5)
    }

    pub fn mean_photon_number(&self) -> f64 {
        (0..self.dim.get())
            .map(|n| n as f64 * self.matrix[(n, n)].re)
            .sum()
    }

    pub fn parity_expectation(&self) -> f64 {
        (0..self.dim.get())
            .map(|n| Parity::of_level(n).sign() * self.matrix[(n, n)].re)
            .sum()
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with_pure(&self, state: &StateVector) -> Result<f64> {
        check_same(self.dim.get(), state.dim().get())?;
        let v = state.amplitudes();
        Ok(inner(v, &(&self.matrix * v)).re)
    }

    /// Mass on the diagonal in the top 10% band.
    pub fn tail_mass(&self) -> f64 {
        (self.dim.tail_start()..self.dim.get())
            .map(|n| self.matrix[(n, n)].re)
            .sum()
    }

    pub fn embed(&self, dim: FockDim) -> Result<Self> {
        let n = self.dim.get();
        if dim.get() < n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: dim.get(),
            });
        }
        let mut m = CMatrix::zeros(dim.get(), dim.get());
        m.view_mut((0, 0), (n, n)).copy_from(&self.matrix);
        Ok(DensityMatrix { matrix: m, dim })
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix, dim: FockDim) -> Self {
        DensityMatrix { matrix, dim }
    }
}

/// Dense operator on a cavity or qubit ⊗ cavity space.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    matrix: CMatrix,
    space: Space,
    label: String,
}

impl OperatorMatrix {
    pub fn new(matrix: CMatrix, space: Space, label: impl Into<String>) -> Result<Self> {
        let n = space.size();
        if matrix.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.nrows(),
            });
        }
        Ok(OperatorMatrix {
            matrix,
            space,
            label: label.into(),
        })
    }

    pub(crate) fn from_parts(matrix: CMatrix, space: Space, label: impl Into<String>) -> Self {
        debug_assert_eq!(matrix.nrows(), space.size());
        OperatorMatrix {
            matrix,
            space,
            label: label.into(),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> FockDim {
        self.space.fock_dim()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply(&self, v: &CVector) -> Result<CVector> {
        check_same(self.space.size(), v.len())?;
        Ok(&self.matrix * v)
    }

    pub fn dagger(&self) -> OperatorMatrix {
        OperatorMatrix {
            matrix: self.matrix.adjoint(),
            space: self.space,
            label: format!("{}†", self.label),
        }
    }

    pub fn compose(&self, rhs: &OperatorMatrix) -> Result<OperatorMatrix> {
        if self.space != rhs.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.size(),
                found: rhs.space.size(),
            });
        }
        Ok(OperatorMatrix {
            matrix: &self.matrix * &rhs.matrix,
            space: self.space,
            label: format!("{}·{}", self.label, rhs.label),
        })
    }

    /// `max |U†U − I|` over the leading `levels × levels` block.
    pub fn unitarity_defect(&self, levels: usize) -> f64 {
        let prod = self.matrix.adjoint() * &self.matrix;
        let n = levels.min(prod.nrows());
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((prod[(i, j)] - target).norm());
            }
        }
        worst
    }
}

/// A state whose expectation values can be taken.
pub trait QuantumState {
    fn space_size(&self) -> usize;
    fn expect_matrix(&self, m: &CMatrix) -> Complex64;
}

impl QuantumState for StateVector {
    fn space_size(&self) -> usize {
        self.dim.get()
    }
    fn expect_matrix(&self, m: &CMatrix) -> Complex64 {
        inner(&self.amplitudes, &(m * &self.amplitudes))
    }
}

impl QuantumState for DensityMatrix {
    fn space_size(&self) -> usize {
        self.dim.get()
    }
    fn expect_matrix(&self, m: &CMatrix) -> Complex64 {
        // Tr(Oρ) = Σ_ij O_ij ρ_ji
        let n = self.dim.get();
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += m[(i, j)] * self.matrix[(j, i)];
            }
        }
        acc
    }
}

/// `Tr(Oρ)` or `⟨ψ|O|ψ⟩`.
pub fn expectation<S: QuantumState + ?Sized>(state: &S, op: &OperatorMatrix) -> Result<Complex64> {
    check_same(op.space().size(), state.space_size())?;
    Ok(state.expect_matrix(op.matrix()))
}

/// Annihilation, creation and number operators.
#[derive(Debug, Clone)]
pub struct Ladder {
    pub a: OperatorMatrix,
    pub a_dagger: OperatorMatrix,
    pub number: OperatorMatrix,
}

pub fn ladder_operators(dim: FockDim) -> Ladder {
    let n = dim.get();
    let space = Space::Cavity(dim);
    let mut a = CMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = Complex64::from((k as f64).sqrt());
    }
    let a_dagger = a.adjoint();
    // integer diagonal: the exact value of a†a below the cutoff
    let number = CMatrix::from_diagonal(&CVector::from_fn(n, |k, _| Complex64::from(k as f64)));
    Ladder {
        a: OperatorMatrix::from_parts(a, space, "a"),
        a_dagger: OperatorMatrix::from_parts(a_dagger, space, "a†"),
        number: OperatorMatrix::from_parts(number, space, "n"),
    }
}

/// `Π = (−1)^n̂`.
pub fn parity_operator(dim: FockDim) -> OperatorMatrix {
    let diag = CVector::from_fn(dim.get(), |k, _| Complex64::from(Parity::of_level(k).sign()));
    OperatorMatrix::from_parts(CMatrix::from_diagonal(&diag), Space::Cavity(dim), "Π")
}

/// Projector onto the even or odd photon-number subspace.
pub fn parity_projector(parity: Parity, dim: FockDim) -> OperatorMatrix {
    let diag = CVector::from_fn(dim.get(), |k, _| {
        if parity.contains(k) {
            ONE
        } else {
            ZERO
        }
    });
    let label = match parity {
        Parity::Even => "Π₊",
        Parity::Odd => "Π₋",
    };
    OperatorMatrix::from_parts(CMatrix::from_diagonal(&diag), Space::Cavity(dim), label)
}

pub(crate) fn check_coherent_tail(radius: f64, dim: FockDim, tol: &Tolerances) -> Result<()> {
    let tail = poisson_tail(radius * radius, dim.tail_start());
    if tail > tol.tail {
        return Err(Error::Truncation {
            tail_mass: tail,
            tolerance: tol.tail,
            dim: dim.get(),
        });
    }
    Ok(())
}

/// Unnormalized Fock amplitudes `e^{−|α|²/2} αⁿ/√n!` for `n < dim`.
pub(crate) fn coherent_amplitudes(alpha: Complex64, dim: FockDim) -> CVector {
    let n = dim.get();
    let r = alpha.norm();
    if r == 0.0 {
        let mut v = CVector::zeros(n);
        v[0] = ONE;
        return v;
    }
    let theta = alpha.arg();
    let lf = ln_factorials(n);
    let ln_r = r.ln();
    CVector::from_fn(n, |k, _| {
        let mag = (-0.5 * r * r + k as f64 * ln_r - 0.5 * lf[k]).exp();
        Complex64::from_polar(mag, k as f64 * theta)
    })
}

/// Coherent state `|α⟩`.
pub fn coherent_state(alpha: Complex64, dim: FockDim) -> Result<StateVector> {
    coherent_state_with(alpha, dim, &Tolerances::default())
}

pub fn coherent_state_with(alpha: Complex64, dim: FockDim, tol: &Tolerances) -> Result<StateVector> {
    check_coherent_tail(alpha.norm(), dim, tol)?;
    StateVector::normalized(coherent_amplitudes(alpha, dim))
}

/// `D(β) = exp(βa† − β*a)` by dense matrix exponential of the truncated generator.
pub fn displacement_operator(beta: Complex64, dim: FockDim) -> Result<OperatorMatrix> {
    displacement_operator_with(beta, dim, &Tolerances::default())
}

pub fn displacement_operator_with(
    beta: Complex64,
    dim: FockDim,
    tol: &Tolerances,
) -> Result<OperatorMatrix> {
    check_coherent_tail(beta.norm(), dim, tol)?;
    let l = ladder_operators(dim);
    let generator = l.a_dagger.matrix() * beta - l.a.matrix() * beta.conj();
    Ok(OperatorMatrix::from_parts(
        expm(&generator),
        Space::Cavity(dim),
        format!("D({beta})"),
    ))
}

/// `(|α⟩ + s|−α⟩)` normalized with the exact factor `1/√(2(1 + s·e^{−2|α|²}))`,
/// without any global-phase adjustment.
pub fn cat_superposition(alpha: Complex64, parity: Parity, dim: FockDim) -> Result<StateVector> {
    cat_superposition_with(alpha, parity, dim, &Tolerances::default())
}

pub fn cat_superposition_with(
    alpha: Complex64,
    parity: Parity,
    dim: FockDim,
    tol: &Tolerances,
) -> Result<StateVector> {
    let mu = alpha.norm_sqr();
    if parity == Parity::Odd && mu == 0.0 {
        return Err(Error::DegenerateState(
            "odd cat with alpha = 0 has no support".into(),
        ));
    }
    check_cat_tail(mu, parity, dim, tol)?;
    // 1 + s·e^{−2μ}, kept accurate for the odd cat at small μ
    let overlap_term = match parity {
        Parity::Even => 1.0 + (-2.0 * mu).exp(),
        Parity::Odd => -(-2.0 * mu).exp_m1(),
    };
    let norm = 1.0 / (2.0 * overlap_term).sqrt();
    let coh = coherent_amplitudes(alpha, dim);
    let amps = CVector::from_fn(dim.get(), |k, _| {
        if parity.contains(k) {
            coh[k] * (2.0 * norm)
        } else {
            ZERO
        }
    });
    StateVector::new(amps)
}

fn check_cat_tail(mu: f64, parity: Parity, dim: FockDim, tol: &Tolerances) -> Result<()> {
    let start = dim.tail_start();
    let ln_f = ln_factorials(start + 1);
    let mut tail = 0.0;
    if mu > 0.0 {
        let mut n = start;
        let mut term = (-mu + n as f64 * mu.ln() - ln_f[start]).exp();
        loop {
            if parity.contains(n) {
                tail += 2.0 * term;
            }
            n += 1;
            term *= mu / n as f64;
            if n as f64 > mu && (term <= tail * 1e-18 || term == 0.0) {
                break;
            }
        }
        let denom = match parity {
            Parity::Even => 1.0 + (-2.0 * mu).exp(),
            Parity::Odd => -(-2.0 * mu).exp_m1(),
        };
        tail /= denom;
    }
    if tail > tol.tail {
        return Err(Error::Truncation {
            tail_mass: tail,
            tolerance: tol.tail,
            dim: dim.get(),
        });
    }
    Ok(())
}

/// Photon cat state `∝ |α⟩ + s|−α⟩` with exact normalization; the largest amplitude
/// is made real and positive.
pub fn cat_state(alpha: Complex64, parity: Parity, dim: FockDim) -> Result<StateVector> {
    cat_state_with(alpha, parity, dim, &Tolerances::default())
}

pub fn cat_state_with(
    alpha: Complex64,
    parity: Parity,
    dim: FockDim,
    tol: &Tolerances,
) -> Result<StateVector> {
    Ok(cat_superposition_with(alpha, parity, dim, tol)?.with_phase_convention())
}

/// Even and odd cats weighted by their Born probabilities in `|α⟩`, i.e. the state left
/// by an unread parity measurement of `|α⟩`. Equals `½(|α⟩⟨α| + |−α⟩⟨−α|)`.
pub fn cat_mixture(alpha: Complex64, dim: FockDim) -> Result<DensityMatrix> {
    cat_mixture_with(alpha, dim, &Tolerances::default())
}

pub fn cat_mixture_with(alpha: Complex64, dim: FockDim, tol: &Tolerances) -> Result<DensityMatrix> {
    let even = cat_superposition_with(alpha, Parity::Even, dim, tol)?;
    let mu = alpha.norm_sqr();
    if mu == 0.0 {
        return Ok(even.to_density());
    }
    let odd = cat_superposition_with(alpha, Parity::Odd, dim, tol)?;
    let p_even = 0.5 * (1.0 + (-2.0 * mu).exp());
    let p_odd = -0.5 * (-2.0 * mu).exp_m1();
    DensityMatrix::mixture(&[(p_even, &even), (p_odd, &odd)])
}
