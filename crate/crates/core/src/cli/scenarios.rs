//! Scenario execution. Everything here is pure: outputs are returned, not written.

use std::f64::consts::FRAC_2_PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::*;
use crate::catcode::{
    code_dim, codewords, delta_t_sweep, gamma_sweep, run_qec_experiment, syndrome_action, CodeParams,
    Codeword, SlopeSummary,
};
use crate::channel::{apply_channel, kraus_set, parity_decay_curve, trajectory_average};
use crate::composite::{
    cat_by_measurement, hadamard, jump_spectroscopy, parity_protocol, prepare_cat_deterministic_with,
    prepare_schrodinger_cat_with, ParityMeter, Qubit,
};
use crate::error::{Error, Result};
use crate::fock::{
    cat_mixture_with, cat_state_with, coherent_state, coherent_state_with, displacement_operator,
    parity_projector, DensityMatrix, FockDim, Parity, StateVector, Tolerances,
};
use crate::linalg::{kron, max_abs_diff, vec_max_abs_diff, CMatrix, ONE, ZERO};
use crate::wigner::{
    analytic_cat_wigner, analytic_coherent_wigner, displaced_parity, wigner_grid_with, wigner_quadrature_beta,
    GridSpec, QuadratureSpec, StateRef,
};

/// A CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

/// One cross-oracle comparison: passes when `value <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: &'static str, value: f64, tolerance: f64) -> Self {
        Check {
            name,
            passed: value <= tolerance,
            value,
            tolerance,
        }
    }
}

/// Result of one scenario run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub dim: Option<usize>,
    pub table: Table,
    /// Body of the JSON payload.
    pub result: Value,
    /// Short figures of merit for the sidecar.
    pub summary: Value,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Shortest round-trip text for a float.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        // + 0.0 folds −0.0 into 0.0
        serde_json::to_string(&(x + 0.0)).unwrap_or_else(|_| x.to_string())
    } else {
        x.to_string()
    }
}

fn tolerances(common: &Common) -> Tolerances {
    Tolerances {
        tail: common.tail_tol,
        ..Tolerances::default()
    }
}

/// Builds with the requested dimension, or with the smallest dimension from `start`
/// upwards that passes the truncation checks.
fn with_dim<T>(requested: Option<usize>, start: usize, build: impl Fn(FockDim) -> Result<T>) -> Result<(FockDim, T)> {
    if let Some(d) = requested {
        let dim = FockDim::new(d)?;
        return build(dim).map(|v| (dim, v));
    }
    let mut d = start.max(2);
    loop {
        let dim = FockDim::new(d)?;
        match build(dim) {
            Ok(v) => return Ok((dim, v)),
            Err(Error::Truncation { .. }) if d < start.max(2) + 1024 => d += 1,
            Err(e) => return Err(e),
        }
    }
}

fn amplitude_start(radius: f64, tol: &Tolerances) -> usize {
    FockDim::for_amplitude(radius, tol.tail).get()
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Outcome> {
    match &cfg.params {
        Params::Wigner(p) => run_wigner(&cfg.common, p),
        Params::CatPrepare(p) => run_cat_prepare(&cfg.common, p),
        Params::ParityDecay(p) => run_parity_decay(&cfg.common, p),
        Params::Spectroscopy(p) => run_spectroscopy(&cfg.common, p),
        Params::Qec(p) => run_qec(&cfg.common, p),
        Params::OracleCheck(p) => run_oracle_check(&cfg.common, p),
    }
}

enum Prepared {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl Prepared {
    fn as_ref(&self) -> StateRef<'_> {
        match self {
            Prepared::Pure(s) => StateRef::Pure(s),
            Prepared::Mixed(r) => StateRef::Mixed(r),
        }
    }

    fn density(&self) -> DensityMatrix {
        match self {
            Prepared::Pure(s) => s.to_density(),
            Prepared::Mixed(r) => r.clone(),
        }
    }
}

fn run_wigner(common: &Common, p: &WignerParams) -> Result<Outcome> {
    let tol = tolerances(common);
    let alpha = Complex64::from(p.alpha);
    let start = match p.state {
        WignerState::Fock => p.fock_n + 2,
        _ => amplitude_start(p.alpha, &tol),
    };
    let (dim, state) = with_dim(common.dim, start, |d| {
        Ok(match p.state {
            WignerState::Cat => Prepared::Pure(cat_state_with(alpha, p.sign, d, &tol)?),
            WignerState::Coherent => Prepared::Pure(coherent_state_with(alpha, d, &tol)?),
            WignerState::Vacuum => Prepared::Pure(StateVector::vacuum(d)),
            WignerState::Fock => {
                let s = StateVector::fock(p.fock_n, d)?;
                if s.tail_mass() > tol.tail {
                    return Err(Error::Truncation {
                        tail_mass: s.tail_mass(),
                        tolerance: tol.tail,
                        dim: d.get(),
                    });
                }
                Prepared::Pure(s)
            }
            WignerState::CatMixture => Prepared::Mixed(cat_mixture_with(alpha, d, &tol)?),
        })
    })?;
    let state = if p.kappa_t > 0.0 {
        let ks = kraus_set(p.kappa_t, dim.get() - 1, dim)?;
        Prepared::Mixed(apply_channel(&state.density(), &ks)?)
    } else {
        state
    };
    let grid = wigner_grid_with(state.as_ref(), &p.grid, &tol)?;
    let rows = grid
        .points()
        .map(|(x, y, w)| vec![fmt_f64(x), fmt_f64(y), fmt_f64(w)])
        .collect();
    let (w_min, w_max) = grid
        .values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    let summary = json!({
        "quadrature_norm": grid.quadrature_norm,
        "w_min": w_min,
        "w_max": w_max,
        "bound": FRAC_2_PI,
        "w_origin": displaced_parity(state.as_ref(), Complex64::new(0.0, 0.0))?,
    });
    Ok(Outcome {
        dim: Some(dim.get()),
        table: Table {
            header: &["beta_re", "beta_im", "w"],
            rows,
        },
        result: json!({ "grid": grid.spec, "quadrature_norm": grid.quadrature_norm, "values": grid.values }),
        summary,
        checks: Vec::new(),
    })
}

fn amplitude_rows(v: &StateVector) -> Vec<Vec<String>> {
    v.amplitudes()
        .iter()
        .enumerate()
        .map(|(n, z)| vec![n.to_string(), fmt_f64(z.re), fmt_f64(z.im)])
        .collect()
}

fn amplitude_json(v: &StateVector) -> Value {
    Value::Array(
        v.amplitudes()
            .iter()
            .map(|z| json!([z.re, z.im]))
            .collect(),
    )
}

fn run_cat_prepare(common: &Common, p: &CatPrepareParams) -> Result<Outcome> {
    let tol = tolerances(common);
    let alpha = Complex64::from(p.alpha);
    match p.method {
        CatMethod::Deterministic => {
            let (dim, cat) = with_dim(common.dim, amplitude_start(2.0 * p.alpha, &tol), |d| {
                prepare_cat_deterministic_with(alpha, p.sign, d, &tol, 0.999)
            })?;
            let summary = json!({
                "fidelity": cat.fidelity,
                "qubit_ground_probability": cat.qubit_ground_probability,
                "entanglement_entropy": cat.entanglement_entropy,
                "product_state_ok": cat.product_state_ok,
                "parity": cat.cavity.parity_expectation(),
            });
            Ok(Outcome {
                dim: Some(dim.get()),
                table: Table {
                    header: &["n", "re", "im"],
                    rows: amplitude_rows(&cat.cavity),
                },
                result: json!({ "report": summary, "amplitudes": amplitude_json(&cat.cavity) }),
                summary,
                checks: Vec::new(),
            })
        }
        CatMethod::Measurement => {
            let (dim, coherent) = with_dim(common.dim, amplitude_start(p.alpha, &tol), |d| {
                coherent_state_with(alpha, d, &tol)
            })?;
            let meter = ParityMeter::new(dim);
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            let mut evens = 0usize;
            let mut first = None;
            for _ in 0..p.shots {
                let (record, cat) = cat_by_measurement(&meter, &coherent, &mut rng)?;
                if record.outcome == Parity::Even {
                    evens += 1;
                }
                if first.is_none() {
                    first = Some((record, cat));
                }
            }
            let (record, cat) = first.expect("at least one shot");
            let ideal = cat_state_with(alpha, record.outcome, dim, &tol)?;
            let freq = evens as f64 / p.shots as f64;
            let p_even = record.p_even;
            let sigma = (p_even * (1.0 - p_even) / p.shots as f64).sqrt();
            let summary = json!({
                "p_even": p_even,
                "frequency_even": freq,
                "binomial_stderr": sigma,
                "first_outcome": record.outcome,
                "first_fidelity_to_cat": ideal.fidelity(&cat)?,
                "first_parity": cat.parity_expectation(),
            });
            Ok(Outcome {
                dim: Some(dim.get()),
                table: Table {
                    header: &["n", "re", "im"],
                    rows: amplitude_rows(&cat),
                },
                result: json!({ "report": summary, "shots": p.shots, "amplitudes": amplitude_json(&cat) }),
                summary,
                checks: Vec::new(),
            })
        }
        CatMethod::Schrodinger => {
            let (dim, joint) = with_dim(common.dim, amplitude_start(p.alpha, &tol), |d| {
                prepare_schrodinger_cat_with(alpha, p.sign, d, &tol)
            })?;
            let n = dim.get();
            let rows = joint
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(i, z)| {
                    let q = if i < n { "g" } else { "e" };
                    vec![q.to_string(), (i % n).to_string(), fmt_f64(z.re), fmt_f64(z.im)]
                })
                .collect();
            let summary = json!({
                "entanglement_entropy": joint.entanglement_entropy(),
                "qubit_purity": joint.qubit_purity(),
                "qubit_ground_probability": joint.qubit_probability(Qubit::Ground),
            });
            Ok(Outcome {
                dim: Some(n),
                table: Table {
                    header: &["q", "n", "re", "im"],
                    rows,
                },
                result: json!({
                    "report": summary,
                    "amplitudes": joint.amplitudes().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                }),
                summary,
                checks: Vec::new(),
            })
        }
    }
}

fn linspace(t_max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect()
}

fn run_parity_decay(common: &Common, p: &ParityDecayParams) -> Result<Outcome> {
    let tol = tolerances(common);
    let alpha = Complex64::from(p.alpha);
    let start = match p.state {
        DecayState::Fock => p.fock_n + 2,
        _ => amplitude_start(p.alpha, &tol),
    };
    let (dim, initial) = with_dim(common.dim, start, |d| match p.state {
        DecayState::Cat => cat_state_with(alpha, p.sign, d, &tol),
        DecayState::Coherent => coherent_state_with(alpha, d, &tol),
        DecayState::Fock => StateVector::fock(p.fock_n, d),
    })?;
    let times = linspace(p.t_max, p.n_times);
    let parity = parity_decay_curve(&initial, p.kappa, &times)?;
    let rows = times
        .iter()
        .zip(&parity)
        .map(|(t, v)| vec![fmt_f64(*t), fmt_f64(*v)])
        .collect();
    let mut summary = json!({
        "parity_start": parity.first(),
        "parity_end": parity.last(),
        "parity_min": parity.iter().cloned().fold(f64::INFINITY, f64::min),
    });
    let mut result = json!({ "times": times, "parity": parity });
    if p.trajectories > 0 {
        let mut means = Vec::with_capacity(times.len());
        let mut errs = Vec::with_capacity(times.len());
        let mut worst_z = 0.0f64;
        for (k, t) in times.iter().enumerate() {
            let est = trajectory_average(
                &initial,
                p.kappa,
                *t,
                p.trajectories,
                common.seed.wrapping_add(k as u64),
                |r| r.final_state.parity_expectation(),
            )?;
            if est.stderr > 0.0 {
                worst_z = worst_z.max((est.mean - parity[k]).abs() / est.stderr);
            }
            means.push(est.mean);
            errs.push(est.stderr);
        }
        result["trajectory_mean"] = json!(means);
        result["trajectory_stderr"] = json!(errs);
        summary["trajectories"] = json!(p.trajectories);
        summary["max_z_score"] = json!(worst_z);
    }
    Ok(Outcome {
        dim: Some(dim.get()),
        table: Table {
            header: &["t", "parity"],
            rows,
        },
        result,
        summary,
        checks: Vec::new(),
    })
}

fn run_spectroscopy(common: &Common, p: &SpectroscopyParams) -> Result<Outcome> {
    let dim = FockDim::new(common.dim.unwrap_or(p.n_peaks.max(2)))?;
    let spec = jump_spectroscopy(p.nbar, p.chi, p.n_peaks, dim)?;
    let rows = spec
        .sticks
        .iter()
        .map(|s| vec![s.photons.to_string(), fmt_f64(s.offset), fmt_f64(s.weight)])
        .collect();
    let summary = json!({
        "total_weight": spec.total_weight(),
        "strongest_n": spec.strongest().map(|s| s.photons),
    });
    Ok(Outcome {
        dim: Some(dim.get()),
        table: Table {
            header: &["n", "offset", "weight"],
            rows,
        },
        result: json!({ "sticks": spec.sticks }),
        summary,
        checks: Vec::new(),
    })
}

fn run_qec(common: &Common, p: &QecParams) -> Result<Outcome> {
    let params = CodeParams::new(p.alpha, p.kappa, p.delta_t, p.t_final)?.with_readout_flip(p.readout_flip_p)?;
    let lq = p.logical.qubit();
    let mut report = run_qec_experiment(&params, &lq, p.shots, common.seed)?;
    if p.sweep {
        report.slope_fit = Some(SlopeSummary {
            monitored: delta_t_sweep(&params, &lq, &p.sweep_steps, p.shots, common.seed)?,
            unmonitored: gamma_sweep(&params, &lq, &p.gamma_t, p.shots, common.seed)?,
        });
    }
    let rows = report
        .times
        .iter()
        .enumerate()
        .map(|(k, t)| {
            vec![
                fmt_f64(*t),
                fmt_f64(report.fid_monitored[k]),
                fmt_f64(report.fid_unmonitored[k]),
            ]
        })
        .collect();
    let last = report.times.len() - 1;
    let summary = json!({
        "fid_monitored_final": report.fid_monitored[last],
        "fid_unmonitored_final": report.fid_unmonitored[last],
        "mean_jumps": report.mean_jumps,
        "slope_monitored": report.slope_fit.as_ref().and_then(|s| s.monitored.slope),
        "slope_unmonitored": report.slope_fit.as_ref().and_then(|s| s.unmonitored.slope),
    });
    Ok(Outcome {
        dim: Some(report.dim),
        table: Table {
            header: &["t", "fid_monitored", "fid_unmonitored"],
            rows,
        },
        result: serde_json::to_value(&report).map_err(|e| Error::InvariantViolation(e.to_string()))?,
        summary,
        checks: Vec::new(),
    })
}

fn run_oracle_check(common: &Common, p: &OracleParams) -> Result<Outcome> {
    let checks = oracle_suite(p.alpha, p.shots, common.seed)?;
    let rows = checks
        .iter()
        .map(|c| vec![c.name.to_string(), c.passed.to_string(), fmt_f64(c.value), fmt_f64(c.tolerance)])
        .collect();
    let passed = checks.iter().filter(|c| c.passed).count();
    let summary = json!({ "passed": passed, "total": checks.len() });
    Ok(Outcome {
        dim: None,
        table: Table {
            header: &["check", "passed", "value", "tolerance"],
            rows,
        },
        result: json!({ "checks": checks }),
        summary,
        checks,
    })
}

/// Cross-checks between independent constructions of the same quantity.
pub fn oracle_suite(alpha: f64, shots: usize, seed: u64) -> Result<Vec<Check>> {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let a = Complex64::from(alpha);

    // displaced parity against the coherent-state Gaussian
    let dim = FockDim::for_amplitude(alpha, tol.tail);
    let coh = coherent_state(a, dim)?;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let beta = a + Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        worst = worst.max((displaced_parity(&coh, beta)? - analytic_coherent_wigner(a, beta)).abs());
    }
    checks.push(Check::new("coherent_wigner", worst, 1e-7));

    // cat: displaced parity, closed form (rescaled to the exact norm), position quadrature
    let mut cat_dim = code_dim(alpha, &tol)?;
    while [Parity::Even, Parity::Odd].iter().any(|&s| cat_state_with(a, s, cat_dim, &tol).is_err()) {
        cat_dim = FockDim::new(cat_dim.get() + 1)?;
    }
    let mut worst_formula = 0.0f64;
    let mut worst_quad = 0.0f64;
    let mut worst_center = 0.0f64;
    for sign in [Parity::Even, Parity::Odd] {
        let cat = cat_state_with(a, sign, cat_dim, &tol)?;
        let renorm = 1.0 + sign.sign() * (-2.0 * alpha * alpha).exp();
        worst_center = worst_center.max((displaced_parity(&cat, ZERO)? - sign.sign() * FRAC_2_PI).abs());
        for _ in 0..3 {
            let beta = Complex64::new(rng.random_range(-2.5..2.5), rng.random_range(-1.0..1.0));
            let w = displaced_parity(&cat, beta)?;
            worst_formula = worst_formula.max((w - analytic_cat_wigner(alpha, sign, beta) / renorm).abs());
            let q = wigner_quadrature_beta(&cat, beta, &QuadratureSpec::default())?;
            worst_quad = worst_quad.max((w - q).abs());
        }
    }
    checks.push(Check::new("cat_wigner_center", worst_center, 1e-8));
    checks.push(Check::new("cat_wigner_closed_form", worst_formula, 1e-8));
    checks.push(Check::new("cat_wigner_quadrature", worst_quad, 1e-5));

    // mixture: no fringes along the imaginary axis
    let mix = cat_mixture_with(a, cat_dim, &tol)?;
    let mut fringe = 0.0f64;
    for k in 0..41 {
        let beta = Complex64::new(0.0, -2.0 + 0.1 * k as f64);
        let lobes = 0.5 * (analytic_coherent_wigner(a, beta) + analytic_coherent_wigner(-a, beta));
        fringe = fringe.max((displaced_parity(&mix, beta)? - lobes).abs());
    }
    checks.push(Check::new("mixture_fringes", fringe, 1e-8));

    // Kraus completeness
    let d30 = FockDim::new(30)?;
    let mut defect = 0.0f64;
    for kt in [0.1, 1.0, 10.0] {
        defect = defect.max(kraus_set(kt, 29, d30)?.completeness_defect_on(30));
    }
    checks.push(Check::new("kraus_completeness", defect, 1e-10));

    // coherent amplitude decay stays pure
    let ks = kraus_set(0.5, dim.get() - 1, dim)?;
    let out = apply_channel(&coh.to_density(), &ks)?;
    let target = coherent_state(a * (-0.25f64).exp(), dim)?;
    checks.push(Check::new("coherent_decay_fidelity", 1.0 - out.fidelity_with_pure(&target)?, 1e-8));
    checks.push(Check::new("coherent_decay_purity", (1.0 - out.purity()).abs(), 1e-8));

    // D(α)|0⟩ against the Fock-series coherent state; D is built with headroom above dim
    let wide = FockDim::new(2 * dim.get())?;
    let d = displacement_operator(a, wide)?;
    let displaced = d.matrix().column(0).rows(0, dim.get()).into_owned();
    checks.push(Check::new("displacement_vs_coherent", vec_max_abs_diff(&displaced, coh.amplitudes()), 1e-8));

    // H U_π H against Π₊⊗I + Π₋⊗σx
    let d64 = FockDim::new(64)?;
    let sx = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
    let expected = kron(&CMatrix::identity(2, 2), parity_projector(Parity::Even, d64).matrix())
        + kron(&sx, parity_projector(Parity::Odd, d64).matrix());
    checks.push(Check::new(
        "parity_protocol_identity",
        max_abs_diff(parity_protocol(d64).matrix(), &expected),
        1e-12,
    ));
    let h = hadamard(d64);
    let hh = h.matrix() * h.matrix();
    checks.push(Check::new("hadamard_involution", max_abs_diff(&hh, &CMatrix::identity(128, 128)), 1e-12));

    // a² phases on the codewords
    let w1 = syndrome_action(Codeword::W1, 2, alpha, cat_dim)?;
    let w2 = syndrome_action(Codeword::W2, 2, alpha, cat_dim)?;
    checks.push(Check::new(
        "syndrome_phases",
        (w1.phase - ONE).norm().max((w2.phase + ONE).norm()),
        1e-10,
    ));
    let (c1, c2) = codewords(alpha, cat_dim)?;
    checks.push(Check::new(
        "codeword_overlap",
        (c1.inner(&c2)?.re - crate::catcode::codeword_overlap(alpha)).abs(),
        1e-10,
    ));

    // Born statistics of the parity measurement
    let d1 = FockDim::for_amplitude(1.0, tol.tail);
    let coh1 = coherent_state(ONE, d1)?;
    let meter = ParityMeter::new(d1);
    let mut evens = 0usize;
    for _ in 0..shots {
        if meter.measure(&coh1, &mut rng)?.outcome == Parity::Even {
            evens += 1;
        }
    }
    let p_even = 0.5 * (1.0 + (-2.0f64).exp());
    let sigma = (p_even * (1.0 - p_even) / shots as f64).sqrt();
    checks.push(Check::new("parity_born_z", (evens as f64 / shots as f64 - p_even).abs() / sigma, 3.0));

    // trajectory jump count against the Poisson mean
    let mean_target = alpha * alpha * (1.0 - (-0.5f64).exp());
    let jumps = trajectory_average(&coh, 1.0, 0.5, shots, seed, |r| r.n_jumps as f64)?;
    checks.push(Check::new("trajectory_jumps_z", (jumps.mean - mean_target).abs() / jumps.stderr, 3.0));

    // trajectory-averaged parity against the Kraus map
    let odd = cat_state_with(a, Parity::Odd, cat_dim, &tol)?;
    let exact = parity_decay_curve(&odd, 1.0, &[0.25])?[0];
    let mc = trajectory_average(&odd, 1.0, 0.25, shots, seed.wrapping_add(1), |r| {
        r.final_state.parity_expectation()
    })?;
    checks.push(Check::new("trajectory_parity_z", (mc.mean - exact).abs() / mc.stderr.max(1e-300), 3.0));

    // grid normalization of the vacuum
    let vac_grid = wigner_grid_with(&StateVector::vacuum(FockDim::new(2)?), &GridSpec::square(4.0, 121)?, &tol)?;
    checks.push(Check::new("wigner_normalization", (vac_grid.quadrature_norm - 1.0).abs(), 1e-3));

    Ok(checks)
}
