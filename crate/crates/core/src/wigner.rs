//! Wigner functions in the complex amplitude plane.
//!
//! The canonical convention is `W(β) = (2/π) Tr{ρ D†(−β) Π D(−β)}`, normalized so
//! that `∬ dβ_R dβ_I W = 1`. With `x̂ = (a + a†)/√2` and `β = (x + ip)/√2` the
//! position-space function satisfies `W(β) = 2·W(x, p)`.

use std::f64::consts::{FRAC_2_PI, PI};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, FockDim, Parity, StateVector, Tolerances};
use crate::linalg::CVector;

/// Eigenvalues below this magnitude are dropped from mixed states.
const SPECTRAL_CUTOFF: f64 = 1e-15;
/// Largest working dimension the automatic padding will try.
const MAX_WORK_DIM: usize = 1024;

/// A pure or mixed cavity state.
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Pure(&'a StateVector),
    Mixed(&'a DensityMatrix),
}

impl<'a> From<&'a StateVector> for StateRef<'a> {
    fn from(s: &'a StateVector) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(r: &'a DensityMatrix) -> Self {
        StateRef::Mixed(r)
    }
}

impl StateRef<'_> {
    pub fn dim(&self) -> FockDim {
        match self {
            StateRef::Pure(s) => s.dim(),
            StateRef::Mixed(r) => r.dim(),
        }
    }

    fn components(&self) -> Vec<(f64, CVector)> {
        match self {
            StateRef::Pure(s) => vec![(1.0, s.amplitudes().clone())],
            StateRef::Mixed(r) => r.spectral_components(SPECTRAL_CUTOFF),
        }
    }

    fn mean_photon_number(&self) -> f64 {
        match self {
            StateRef::Pure(s) => s.mean_photon_number(),
            StateRef::Mixed(r) => r.mean_photon_number(),
        }
    }
}

/// Displacements `D(β) = T V e^{−i|β|Λ} Vᵀ T†` in a fixed working dimension, where
/// `V Λ Vᵀ` diagonalizes the real tridiagonal `a + a†` and `T = diag(e^{inφ})` with
/// `φ = arg β + π/2`. One eigendecomposition serves every point of a grid.
#[derive(Debug, Clone)]
pub struct Displacer {
    work_dim: usize,
    eigvecs: DMatrix<f64>,
    eigvals: DVector<f64>,
}

impl Displacer {
    pub fn new(work_dim: FockDim) -> Self {
        let n = work_dim.get();
        let mut x = DMatrix::<f64>::zeros(n, n);
        for k in 1..n {
            let s = (k as f64).sqrt();
            x[(k - 1, k)] = s;
            x[(k, k - 1)] = s;
        }
        let eig = SymmetricEigen::new(x);
        Displacer {
            work_dim: n,
            eigvecs: eig.eigenvectors,
            eigvals: eig.eigenvalues,
        }
    }

    pub fn work_dim(&self) -> usize {
        self.work_dim
    }

    /// `D(β)v` for `v` zero-padded to the working dimension.
    pub fn displace(&self, beta: Complex64, v: &CVector) -> CVector {
        let out = self.displace_unphased(beta, v);
        let phi = beta.arg() + 0.5 * PI;
        CVector::from_fn(self.work_dim, |n, _| out[n] * Complex64::from_polar(1.0, n as f64 * phi))
    }

    /// `T†D(β)v`; the phases of `T` drop out of photon-number statistics.
    fn displace_unphased(&self, beta: Complex64, v: &CVector) -> CVector {
        let n = self.work_dim;
        let r = beta.norm();
        let phi = beta.arg() + 0.5 * PI;
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        for (k, c) in v.iter().enumerate() {
            w[k] = c * Complex64::from_polar(1.0, -(k as f64) * phi);
        }
        let mut proj = vec![Complex64::new(0.0, 0.0); n];
        for (j, p) in proj.iter_mut().enumerate() {
            let col = self.eigvecs.column(j);
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, wk) in w.iter().enumerate().take(v.len()) {
                acc += wk * col[k];
            }
            *p = acc * Complex64::from_polar(1.0, -r * self.eigvals[j]);
        }
        let mut out = CVector::zeros(n);
        for (j, p) in proj.iter().enumerate() {
            let col = self.eigvecs.column(j);
            for k in 0..n {
                out[k] += p * col[k];
            }
        }
        out
    }

    /// `Σⱼ λⱼ Σₙ (−1)ⁿ |(D(−β)vⱼ)ₙ|²` and the largest tail mass among the displaced
    /// components.
    fn displaced_parity_raw(&self, beta: Complex64, comps: &[(f64, CVector)]) -> (f64, f64) {
        let band = FockDim::new(self.work_dim).map(|d| d.tail_start()).unwrap_or(0);
        let mut parity = 0.0;
        let mut worst_tail = 0.0f64;
        for (lambda, v) in comps {
            let out = self.displace_unphased(-beta, v);
            let mut p = 0.0;
            let mut tail = 0.0;
            for (n, z) in out.iter().enumerate() {
                let m = z.norm_sqr();
                p += Parity::of_level(n).sign() * m;
                if n >= band {
                    tail += m;
                }
            }
            parity += lambda * p;
            worst_tail = worst_tail.max(tail);
        }
        (parity, worst_tail)
    }
}

/// Working dimension large enough to hold `state` displaced by up to `radius`.
fn initial_work_dim(state: &StateRef<'_>, radius: f64, tol: &Tolerances) -> usize {
    let reach = state.mean_photon_number().max(0.0).sqrt() + radius;
    state.dim().get().max(FockDim::for_amplitude(reach, tol.tail).get())
}

/// Evaluates `f` with a [`Displacer`] whose dimension is doubled until every
/// displaced component passes the tail check.
fn with_adequate_displacer<T>(
    state: &StateRef<'_>,
    radius: f64,
    tol: &Tolerances,
    mut f: impl FnMut(&Displacer) -> (T, f64),
) -> Result<T> {
    let mut work = initial_work_dim(state, radius, tol);
    loop {
        let disp = Displacer::new(FockDim::new(work)?);
        let (value, tail) = f(&disp);
        if tail <= tol.tail {
            return Ok(value);
        }
        if work >= MAX_WORK_DIM {
            return Err(Error::Truncation {
                tail_mass: tail,
                tolerance: tol.tail,
                dim: work,
            });
        }
        work = (2 * work).min(MAX_WORK_DIM);
    }
}

/// `W(β)` of a pure or mixed state.
pub fn displaced_parity<'a>(state: impl Into<StateRef<'a>>, beta: Complex64) -> Result<f64> {
    displaced_parity_with(state, beta, &Tolerances::default())
}

pub fn displaced_parity_with<'a>(
    state: impl Into<StateRef<'a>>,
    beta: Complex64,
    tol: &Tolerances,
) -> Result<f64> {
    let state = state.into();
    let comps = state.components();
    let p = with_adequate_displacer(&state, beta.norm(), tol, |d| d.displaced_parity_raw(beta, &comps))?;
    Ok(FRAC_2_PI * p)
}

/// Rectangular grid in the `β` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub beta_re_min: f64,
    pub beta_re_max: f64,
    pub beta_im_min: f64,
    pub beta_im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            beta_re_min: -4.0,
            beta_re_max: 4.0,
            beta_im_min: -4.0,
            beta_im_max: 4.0,
            n_re: 81,
            n_im: 81,
        }
    }
}

impl GridSpec {
    pub fn new(re: (f64, f64), im: (f64, f64), n_re: usize, n_im: usize) -> Result<Self> {
        let spec = GridSpec {
            beta_re_min: re.0,
            beta_re_max: re.1,
            beta_im_min: im.0,
            beta_im_max: im.1,
            n_re,
            n_im,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Square grid `[−half, half]²` with `n` points per axis.
    pub fn square(half: f64, n: usize) -> Result<Self> {
        GridSpec::new((-half, half), (-half, half), n, n)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.beta_re_min, self.beta_re_max, self.beta_im_min, self.beta_im_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::param("grid", "bounds must be finite"));
        }
        if self.beta_re_max <= self.beta_re_min {
            return Err(Error::param("re_max", "must exceed re_min"));
        }
        if self.beta_im_max <= self.beta_im_min {
            return Err(Error::param("im_max", "must exceed im_min"));
        }
        if self.n_re < 2 {
            return Err(Error::param("n_re", "at least 2 points are required"));
        }
        if self.n_im < 2 {
            return Err(Error::param("n_im", "at least 2 points are required"));
        }
        Ok(())
    }

    pub fn step_re(&self) -> f64 {
        (self.beta_re_max - self.beta_re_min) / (self.n_re - 1) as f64
    }

    pub fn step_im(&self) -> f64 {
        (self.beta_im_max - self.beta_im_min) / (self.n_im - 1) as f64
    }

    pub fn re_axis(&self) -> Vec<f64> {
        (0..self.n_re)
            .map(|i| self.beta_re_min + i as f64 * self.step_re())
            .collect()
    }

    pub fn im_axis(&self) -> Vec<f64> {
        (0..self.n_im)
            .map(|j| self.beta_im_min + j as f64 * self.step_im())
            .collect()
    }

    fn max_radius(&self) -> f64 {
        let re = self.beta_re_min.abs().max(self.beta_re_max.abs());
        let im = self.beta_im_min.abs().max(self.beta_im_max.abs());
        re.hypot(im)
    }
}

/// `W` sampled on a [`GridSpec`]; `values[i·n_im + j]` sits at `(re[i], im[j])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WignerGrid {
    pub spec: GridSpec,
    pub values: Vec<f64>,
    /// `Σ W·Δβ_R·Δβ_I`.
    pub quadrature_norm: f64,
}

impl WignerGrid {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.spec.n_im + j]
    }

    /// Points in storage order as `(β_R, β_I, W)`.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let re = self.spec.re_axis();
        let im = self.spec.im_axis();
        let n_im = self.spec.n_im;
        self.values
            .iter()
            .enumerate()
            .map(move |(k, w)| (re[k / n_im], im[k % n_im], *w))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Displaced parity at every grid point.
pub fn wigner_grid<'a>(state: impl Into<StateRef<'a>>, spec: &GridSpec) -> Result<WignerGrid> {
    wigner_grid_with(state, spec, &Tolerances::default())
}

pub fn wigner_grid_with<'a>(
    state: impl Into<StateRef<'a>>,
    spec: &GridSpec,
    tol: &Tolerances,
) -> Result<WignerGrid> {
    spec.validate()?;
    let state = state.into();
    let comps = state.components();
    let re = spec.re_axis();
    let im = spec.im_axis();
    let values = with_adequate_displacer(&state, spec.max_radius(), tol, |d| {
        let rows: Vec<(Vec<f64>, f64)> = re
            .par_iter()
            .map(|x| {
                let mut row = Vec::with_capacity(im.len());
                let mut worst = 0.0f64;
                for y in &im {
                    let (p, tail) = d.displaced_parity_raw(Complex64::new(*x, *y), &comps);
                    row.push(FRAC_2_PI * p);
                    worst = worst.max(tail);
                }
                (row, worst)
            })
            .collect();
        let worst = rows.iter().fold(0.0f64, |m, r| m.max(r.1));
        (rows.into_iter().flat_map(|r| r.0).collect::<Vec<_>>(), worst)
    })?;
    let quadrature_norm = values.iter().sum::<f64>() * spec.step_re() * spec.step_im();
    Ok(WignerGrid {
        spec: *spec,
        values,
        quadrature_norm,
    })
}

/// Closed-form Wigner function of the cat `∝ |α⟩ + s|−α⟩` for real `α`, with the
/// large-cat normalization `1/√2`:
/// `(2/π) e^{−2|β|²} [s·cos(4α β_I) + cosh(4α β_R) e^{−2α²}]`.
pub fn analytic_cat_wigner(alpha: f64, sign: Parity, beta: Complex64) -> f64 {
    let (x, y) = (beta.re, beta.im);
    // cosh·e^{−2α²}·e^{−2x²} regrouped so large arguments cannot overflow
    let lobes = 0.5 * ((-2.0 * (x - alpha).powi(2)).exp() + (-2.0 * (x + alpha).powi(2)).exp());
    let fringes = sign.sign() * (-2.0 * (x * x)).exp() * (4.0 * alpha * y).cos();
    FRAC_2_PI * (-2.0 * y * y).exp() * (lobes + fringes)
}

/// Closed-form Wigner function of `|α⟩`: `(2/π) e^{−2|β−α|²}`.
pub fn analytic_coherent_wigner(alpha: Complex64, beta: Complex64) -> f64 {
    FRAC_2_PI * (-2.0 * (beta - alpha).norm_sqr()).exp()
}

/// Settings for the position-space quadrature oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Convergence threshold on successive trapezoid refinements.
    pub stability_tol: f64,
    /// Initial trapezoid step in oscillator lengths.
    pub initial_step: f64,
    pub max_halvings: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            stability_tol: 1e-5,
            initial_step: 0.5,
            max_halvings: 14,
        }
    }
}

/// Harmonic-oscillator eigenfunctions `ψ₀(y) … ψ_{n−1}(y)`.
fn hermite_functions(y: f64, n: usize, out: &mut [f64]) {
    out[0] = PI.powf(-0.25) * (-0.5 * y * y).exp();
    if n > 1 {
        out[1] = 2f64.sqrt() * y * out[0];
    }
    for k in 1..n.saturating_sub(1) {
        let kf = k as f64;
        out[k + 1] = (2.0 / (kf + 1.0)).sqrt() * y * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
    }
}

/// `W(x, p) = (1/2π) ∫ dξ e^{−ipξ} ρ(x + ξ/2, x − ξ/2)` by trapezoid refinement, in
/// position-space units (`ħ = 1`). Multiply by 2 for the `β`-plane value.
pub fn wigner_position_quadrature<'a>(
    state: impl Into<StateRef<'a>>,
    x: f64,
    p: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let state = state.into();
    let comps = state.components();
    let n = state.dim().get();
    let top = comps
        .iter()
        .flat_map(|(_, v)| v.iter().enumerate().filter(|(_, z)| z.norm() > 1e-16).map(|(k, _)| k))
        .max()
        .unwrap_or(0);
    // both arguments x ± ξ/2 must stay inside the classically allowed region plus margin
    let support = (2.0 * top as f64 + 1.0).sqrt() + 6.0;
    let half_width = (8.0 + 2.0 * x.abs()).max(2.0 * (support + x.abs()));

    let mut buf_a = vec![0.0; n];
    let mut buf_b = vec![0.0; n];
    let mut integrand = |xi: f64| -> f64 {
        hermite_functions(x + 0.5 * xi, n, &mut buf_a);
        hermite_functions(x - 0.5 * xi, n, &mut buf_b);
        let mut rho = Complex64::new(0.0, 0.0);
        for (lambda, v) in &comps {
            let mut fa = Complex64::new(0.0, 0.0);
            let mut fb = Complex64::new(0.0, 0.0);
            for (k, c) in v.iter().enumerate() {
                fa += c * buf_a[k];
                fb += c * buf_b[k];
            }
            rho += fa * fb.conj() * *lambda;
        }
        (Complex64::from_polar(1.0, -p * xi) * rho).re
    };

    let mut h = quad.initial_step;
    let mut m = (2.0 * half_width / h).ceil() as usize;
    h = 2.0 * half_width / m as f64;
    let mut sum = 0.5 * (integrand(-half_width) + integrand(half_width));
    for k in 1..m {
        sum += integrand(-half_width + k as f64 * h);
    }
    let mut estimate = sum * h;
    let mut stable = 0;
    let mut change = f64::INFINITY;
    for _ in 0..quad.max_halvings {
        for k in 0..m {
            sum += integrand(-half_width + (k as f64 + 0.5) * h);
        }
        m *= 2;
        h *= 0.5;
        let refined = sum * h;
        change = (refined - estimate).abs() / (2.0 * PI);
        estimate = refined;
        if change < quad.stability_tol {
            stable += 1;
            if stable == 2 {
                return Ok(estimate / (2.0 * PI));
            }
        } else {
            stable = 0;
        }
    }
    Err(Error::QuadratureNonConvergence {
        change,
        levels: quad.max_halvings,
    })
}

/// [`wigner_position_quadrature`] at `β`, in the canonical `β`-plane units.
pub fn wigner_quadrature_beta<'a>(
    state: impl Into<StateRef<'a>>,
    beta: Complex64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let s = std::f64::consts::SQRT_2;
    Ok(2.0 * wigner_position_quadrature(state, s * beta.re, s * beta.im, quad)?)
}

/// Marginals of a grid: `re[i] = Σⱼ W·Δβ_I` and `im[j] = Σᵢ W·Δβ_R`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Marginals {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

pub fn marginals(grid: &WignerGrid) -> Marginals {
    let spec = &grid.spec;
    let (dr, di) = (spec.step_re(), spec.step_im());
    let mut re = vec![0.0; spec.n_re];
    let mut im = vec![0.0; spec.n_im];
    for i in 0..spec.n_re {
        for j in 0..spec.n_im {
            let w = grid.at(i, j);
            re[i] += w * di;
            im[j] += w * dr;
        }
    }
    Marginals { re, im }
}

/// Estimate of `W(β)` from single-shot parity outcomes after displacing by `−β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampledWigner {
    pub estimate: f64,
    pub stderr: f64,
    pub shots: usize,
}

pub fn sampled_wigner<'a>(
    state: impl Into<StateRef<'a>>,
    beta: Complex64,
    shots: usize,
    rng_seed: u64,
) -> Result<SampledWigner> {
    if shots == 0 {
        return Err(Error::param("shots", "must be at least 1"));
    }
    let exact = displaced_parity(state, beta)?;
    let p_even = (0.5 * (1.0 + exact / FRAC_2_PI)).clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let evens = (0..shots).filter(|_| rng.random::<f64>() < p_even).count();
    let mean = (2.0 * evens as f64 - shots as f64) / shots as f64;
    let stderr = if shots > 1 {
        // outcomes are ±1, so Σ(x − x̄)² = shots·(1 − x̄²)
        let var = (shots as f64 * (1.0 - mean * mean)).max(0.0) / (shots - 1) as f64;
        (var / shots as f64).sqrt()
    } else {
        0.0
    };
    Ok(SampledWigner {
        estimate: FRAC_2_PI * mean,
        stderr: FRAC_2_PI * stderr,
        shots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, displacement_operator, FockDim};

    fn dim(n: usize) -> FockDim {
        FockDim::new(n).unwrap()
    }

    #[test]
    fn displacer_matches_expm() {
        let d = dim(30);
        let beta = Complex64::new(0.7, -0.4);
        let dense = displacement_operator(beta, d).unwrap();
        let fast = Displacer::new(d);
        let v = StateVector::fock(3, d).unwrap();
        let a = dense.matrix() * v.amplitudes();
        let b = fast.displace(beta, v.amplitudes());
        for k in 0..20 {
            assert!((a[k] - b[k]).norm() < 1e-12, "level {k}");
        }
    }

    #[test]
    fn vacuum_and_fock_one_at_origin() {
        let vac = StateVector::vacuum(dim(10));
        let w = displaced_parity(&vac, Complex64::new(0.0, 0.0)).unwrap();
        assert!((w - FRAC_2_PI).abs() < 1e-14);
        let one = StateVector::fock(1, dim(10)).unwrap();
        let w = displaced_parity(&one, Complex64::new(0.0, 0.0)).unwrap();
        assert!((w + FRAC_2_PI).abs() < 1e-14);
    }

    #[test]
    fn far_displacement_pads_the_working_space() {
        let psi = coherent_state(Complex64::new(1.0, 0.0), dim(20)).unwrap();
        let beta = Complex64::new(9.0, 0.0);
        let w = displaced_parity(&psi, beta).unwrap();
        let exact = analytic_coherent_wigner(Complex64::new(1.0, 0.0), beta);
        assert!((w - exact).abs() < 1e-10);
    }

    #[test]
    fn grid_spec_validation() {
        assert!(GridSpec::new((1.0, -1.0), (-1.0, 1.0), 5, 5).is_err());
        assert!(GridSpec::new((-1.0, 1.0), (-1.0, 1.0), 1, 5).is_err());
        assert!(GridSpec::new((-1.0, f64::NAN), (-1.0, 1.0), 5, 5).is_err());
        let g = GridSpec::square(3.0, 61).unwrap();
        assert!((g.step_re() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn analytic_cat_formula_at_origin() {
        let a: f64 = 1.2;
        let w = analytic_cat_wigner(a, Parity::Even, Complex64::new(0.0, 0.0));
        assert!((w - FRAC_2_PI * (1.0 + (-2.0 * a * a).exp())).abs() < 1e-15);
        assert!(analytic_cat_wigner(50.0, Parity::Odd, Complex64::new(50.0, 0.1)).is_finite());
    }

    #[test]
    fn sampled_eigenstate_has_zero_stderr() {
        let vac = StateVector::vacuum(dim(8));
        let s = sampled_wigner(&vac, Complex64::new(0.0, 0.0), 100, 3).unwrap();
        assert_eq!(s.stderr, 0.0);
        assert!((s.estimate - FRAC_2_PI).abs() < 1e-15);
        let single = sampled_wigner(&vac, Complex64::new(1.0, 0.0), 1, 3).unwrap();
        assert_eq!(single.stderr, 0.0);
    }
}
