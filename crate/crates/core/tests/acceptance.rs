//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use common::*;
use cqed::catcode::{
    apply_losses, codewords, delta_t_sweep, gamma_sweep, run_qec_experiment, syndrome_action, CodeParams, Codeword,
    LogicalQubit,
};
use cqed::channel::{apply_channel, kraus_set, parity_decay_curve, trajectory_average};
use cqed::cli::{output::render_payload, parse_config, run_scenario};
use cqed::composite::{parity_protocol, prepare_cat_by_measurement, ParityMeter};
use cqed::fock::*;
use cqed::linalg::{kron, max_abs_diff, CMatrix};
use cqed::wigner::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_2_PI, SQRT_2};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

type Verdict = Result<(bool, String), String>;

fn dim(n: usize) -> FockDim {
    FockDim::new(n).unwrap()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn coherent_wigner_gaussian() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for alpha in [0.5, 1.5, 2.5] {
        let s = coherent_state(c(alpha, 0.0), dim(80)).map_err(err)?;
        for _ in 0..25 {
            let beta = c(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
            let w = displaced_parity(&s, beta).map_err(err)?;
            worst = worst.max((w - coherent_wigner(c(alpha, 0.0), beta)).abs());
        }
    }
    Ok((worst < 1e-7, format!("max |ΔW| = {worst:.2e} (< 1e-7)")))
}

fn cat_wigner_three_way() -> Verdict {
    let alpha = 2.5;
    let quad = QuadratureSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst, mut center) = (0.0f64, 0.0f64);
    for sign in [Parity::Even, Parity::Odd] {
        let cat = cat_state(c(alpha, 0.0), sign, dim(60)).map_err(err)?;
        let renorm = 1.0 + sign.sign() * (-2.0 * alpha * alpha).exp();
        center = center.max((displaced_parity(&cat, c(0.0, 0.0)).map_err(err)? - sign.sign() * FRAC_2_PI).abs());
        for _ in 0..10 {
            let beta = c(rng.random_range(-3.5..3.5), rng.random_range(-1.5..1.5));
            let dp = displaced_parity(&cat, beta).map_err(err)?;
            let formula = analytic_cat_wigner(alpha, sign, beta) / renorm;
            let q = 2.0 * wigner_position_quadrature(&cat, SQRT_2 * beta.re, SQRT_2 * beta.im, &quad).map_err(err)?;
            worst = worst.max((dp - formula).abs()).max((dp - q).abs()).max((formula - q).abs());
        }
    }
    Ok((
        worst < 1e-5 && center < 1e-8,
        format!("pairwise max {worst:.2e} (< 1e-5), center ±2/π error {center:.2e} (< 1e-8)"),
    ))
}

fn mixture_has_no_fringes() -> Verdict {
    let alpha = c(2.5, 0.0);
    let mix = cat_mixture(alpha, dim(60)).map_err(err)?;
    let mut fringe = 0.0f64;
    for k in 0..201 {
        let beta = c(0.0, -3.0 + 0.03 * k as f64);
        let lobes = 0.5 * (coherent_wigner(alpha, beta) + coherent_wigner(-alpha, beta));
        fringe = fringe.max((displaced_parity(&mix, beta).map_err(err)? - lobes).abs());
    }
    Ok((fringe < 1e-8, format!("Im-axis fringe amplitude {fringe:.2e} (< 1e-8)")))
}

fn kraus_completeness() -> Verdict {
    let mut worst = 0.0f64;
    for kt in [0.1, 1.0, 10.0] {
        let ks = kraus_set(kt, 29, dim(30)).map_err(err)?;
        let mut sum = CMatrix::zeros(30, 30);
        for e in ks.operators() {
            sum += e.matrix().adjoint() * e.matrix();
        }
        worst = worst.max(max_abs_diff(&sum, &CMatrix::identity(30, 30)));
    }
    Ok((worst < 1e-10, format!("‖ΣE†E − I‖_max = {worst:.2e} (< 1e-10)")))
}

fn coherent_decay() -> Verdict {
    let d = dim(40);
    let rho = coherent_state(c(2.0, 0.0), d).map_err(err)?.to_density();
    let out = apply_channel(&rho, &kraus_set(0.5, 39, d).map_err(err)?).map_err(err)?;
    let target: Vec<Complex64> = coherent(c(2.0 * (-0.25f64).exp(), 0.0), 40);
    let target = StateVector::new(cqed::linalg::CVector::from_vec(target)).map_err(err)?;
    let infid = 1.0 - out.fidelity_with_pure(&target).map_err(err)?;
    let purity = (out.purity() - 1.0).abs();
    Ok((
        infid < 1e-8 && purity < 1e-8,
        format!("1 − F = {infid:.2e}, |1 − purity| = {purity:.2e} (< 1e-8)"),
    ))
}

fn parity_decay_endpoints() -> Verdict {
    let odd = cat_state(c(2.0, 0.0), Parity::Odd, dim(40)).map_err(err)?;
    let curve = parity_decay_curve(&odd, 1.0, &[0.0, 0.5, 10.0]).map_err(err)?;
    let start = (curve[0] + 1.0).abs();
    let closed = (curve[1] - cat_parity_after_loss(2.0, -1.0, 0.5)).abs();
    let mc = trajectory_average(&odd, 1.0, 0.5, 10_000, 6, |r| r.final_state.parity_expectation()).map_err(err)?;
    let z = (mc.mean - curve[1]).abs() / mc.stderr;
    Ok((
        start < 1e-10 && curve[2] > 0.999 && z < 3.0 && closed < 1e-8,
        format!(
            "⟨Π⟩(0)+1 = {start:.1e}, ⟨Π⟩(10) = {:.6}, MC at κt=0.5 off by {z:.2}σ, closed form {closed:.1e}",
            curve[2]
        ),
    ))
}

fn measurement_back_action() -> Verdict {
    let d = dim(40);
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let (record, post) = prepare_cat_by_measurement(c(2.0, 0.0), seed, d).map_err(err)?;
        let ideal = cat(c(2.0, 0.0), record.outcome.sign(), 40);
        worst = worst.max((1.0 - fidelity(post.amplitudes().as_slice(), &ideal)).abs());
    }
    let d1 = dim(20);
    let coh = coherent_state(c(1.0, 0.0), d1).map_err(err)?;
    let meter = ParityMeter::new(d1);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let shots = 100_000;
    let mut even = 0usize;
    for _ in 0..shots {
        if meter.measure(&coh, &mut rng).map_err(err)?.outcome == Parity::Even {
            even += 1;
        }
    }
    let p = 0.5 * (1.0 + (-2.0f64).exp());
    let z = (even as f64 / shots as f64 - p).abs() / binomial_sigma(p, shots);
    Ok((
        worst < 1e-10 && z < 3.0,
        format!("post-state |1 − F| = {worst:.1e} (< 1e-10), even frequency off by {z:.2}σ"),
    ))
}

fn protocol_identity() -> Verdict {
    let d = dim(64);
    let sx = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let mut plus = CMatrix::zeros(64, 64);
    let mut minus = CMatrix::zeros(64, 64);
    for n in 0..64 {
        if n % 2 == 0 {
            plus[(n, n)] = c(1.0, 0.0);
        } else {
            minus[(n, n)] = c(1.0, 0.0);
        }
    }
    let expected = kron(&CMatrix::identity(2, 2), &plus) + kron(&sx, &minus);
    let diff = max_abs_diff(parity_protocol(d).matrix(), &expected);
    Ok((diff < 1e-12, format!("max entry error {diff:.2e} (< 1e-12)")))
}

fn qec_scaling() -> Verdict {
    let params = CodeParams::new(2.0, 1.0, 0.005, 0.5).map_err(err)?;
    let lq = LogicalQubit::plus();
    let monitored = delta_t_sweep(&params, &lq, &[200, 100, 50, 40, 20], 10_000, 0).map_err(err)?;
    let blind = gamma_sweep(&params, &lq, &[0.01, 0.02, 0.05, 0.1], 10_000, 0).map_err(err)?;
    let report = run_qec_experiment(&params, &lq, 10_000, 0).map_err(err)?;
    let paired = (0..report.times.len())
        .all(|k| report.fid_monitored[k] - report.fid_unmonitored[k] >= -3.0 * report.stderr_difference[k]);
    let (sm, su) = (monitored.slope.unwrap_or(f64::NAN), blind.slope.unwrap_or(f64::NAN));
    Ok((
        (1.8..=2.2).contains(&sm) && (0.8..=1.2).contains(&su) && paired,
        format!("Δt slope {sm:.3} ∈ [1.8, 2.2], Γ slope {su:.3} ∈ [0.8, 1.2], paired monitored ≥ unmonitored: {paired}"),
    ))
}

fn syndrome_exactness() -> Verdict {
    let (alpha, d) = (2.5, dim(60));
    let w1 = syndrome_action(Codeword::W1, 2, alpha, d).map_err(err)?;
    let w2 = syndrome_action(Codeword::W2, 2, alpha, d).map_err(err)?;
    let phases = (w1.phase - c(1.0, 0.0)).norm().max((w2.phase + c(1.0, 0.0)).norm());
    let (c1, c2) = codewords(alpha, d).map_err(err)?;
    let mut round_trip = 0.0f64;
    for w in [&c1, &c2] {
        let back = apply_losses(w, 4).map_err(err)?;
        round_trip = round_trip.max((w.inner(&back).map_err(err)? - c(1.0, 0.0)).norm());
    }
    Ok((
        phases < 1e-10 && round_trip < 1e-10,
        format!("a² phase error {phases:.1e}, a⁴ round trip {round_trip:.1e} (< 1e-10)"),
    ))
}

fn wigner_normalization() -> Verdict {
    let spec = GridSpec::square(4.0, 121).map_err(err)?;
    let vac = wigner_grid(&StateVector::vacuum(dim(4)), &spec).map_err(err)?;
    let cat = wigner_grid(&cat_state(c(2.0, 0.0), Parity::Even, dim(40)).map_err(err)?, &spec).map_err(err)?;
    let (a, b) = ((vac.quadrature_norm - 1.0).abs(), (cat.quadrature_norm - 1.0).abs());
    Ok((a < 1e-3 && b < 1e-3, format!("vacuum {a:.1e}, even cat {b:.1e} (< 1e-3)")))
}

fn cli_determinism() -> Verdict {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .map_err(err)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    let mut scenarios = Vec::new();
    for path in &files {
        let cfg = parse_config(&std::fs::read_to_string(path).map_err(err)?).map_err(err)?;
        let first = render_payload(&cfg, &run_scenario(&cfg).map_err(err)?)?;
        let second = render_payload(&cfg, &run_scenario(&cfg).map_err(err)?)?;
        if first != second {
            return Ok((false, format!("{} differs between runs", path.display())));
        }
        scenarios.push(cfg.scenario.name());
    }
    scenarios.dedup();
    Ok((
        scenarios.len() == cqed::cli::Scenario::ALL.len(),
        format!("{} configs byte-identical on rerun, scenarios: {}", files.len(), scenarios.join(", ")),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Verdict); 12] = [
        ("coherent-state Wigner", 10, coherent_wigner_gaussian),
        ("cat Wigner three-way agreement", 60, cat_wigner_three_way),
        ("mixture kills fringes", 10, mixture_has_no_fringes),
        ("Kraus completeness", 5, kraus_completeness),
        ("coherent-state decay", 5, coherent_decay),
        ("parity decay endpoints", 120, parity_decay_endpoints),
        ("measurement back-action cat", 60, measurement_back_action),
        ("parity protocol identity", 1, protocol_identity),
        ("QEC scaling", 900, qec_scaling),
        ("syndrome algebra exactness", 1, syndrome_exactness),
        ("Wigner normalization", 120, wigner_normalization),
        ("CLI determinism", 300, cli_determinism),
    ];
    let mut failures = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*budget);
        let (ok, detail) = match verdict {
            Ok((passed, detail)) => (passed && in_time, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "{} {:>2} {:<32} {detail}; {:.2}s of {budget}s",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            name,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
