mod common;

use common::*;
use cqed::catcode::*;
use cqed::channel::trajectory_sample_with;
use cqed::composite::ParityMeter;
use cqed::fock::*;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dim(n: usize) -> FockDim {
    FockDim::new(n).unwrap()
}

fn vec_of(s: &StateVector) -> Vec<Complex64> {
    s.amplitudes().iter().copied().collect()
}

/// Least-squares weight of `psi` on span{u, v} from the 2×2 normal equations.
fn span_weight(u: &[Complex64], v: &[Complex64], psi: &[Complex64]) -> f64 {
    let (g11, g12, g22) = (dot(u, u), dot(u, v), dot(v, v));
    let (b1, b2) = (dot(u, psi), dot(v, psi));
    let det = g11 * g22 - g12 * g12.conj();
    let x1 = (g22 * b1 - g12 * b2) / det;
    let x2 = (g11 * b2 - g12.conj() * b1) / det;
    (b1.conj() * x1 + b2.conj() * x2).re
}

#[test]
fn codewords_are_even_and_nearly_orthogonal() {
    let d = dim(50);
    let (w1, w2) = codewords(2.0, d).unwrap();
    assert!((w1.parity_expectation() - 1.0).abs() < 1e-10);
    assert!((w2.parity_expectation() - 1.0).abs() < 1e-10);
    let overlap = w1.inner(&w2).unwrap();
    let oracle = dot(&cat(c(2.0, 0.0), 1.0, 50), &cat(c(0.0, 2.0), 1.0, 50));
    assert!((overlap - oracle).norm() < 1e-10);
    assert!(overlap.norm() < 0.04);
    assert!((overlap.re - codeword_overlap(2.0)).abs() < 1e-12);

    let (w1, w2) = codewords(3.5, dim(80)).unwrap();
    assert!(w1.inner(&w2).unwrap().norm() < 1e-4);
}

#[test]
fn encode_basis_and_round_trip() {
    let d = dim(60);
    let (w1, w2) = codewords(3.0, d).unwrap();
    assert!(encode(&LogicalQubit::zero(), 3.0, d).unwrap().fidelity(&w1).unwrap() > 1.0 - 1e-15);
    assert!(encode(&LogicalQubit::one(), 3.0, d).unwrap().fidelity(&w2).unwrap() > 1.0 - 1e-15);

    let lq = LogicalQubit::plus();
    let state = encode(&lq, 3.0, d).unwrap();
    let (out, report) = decode(&state, 3.0, 0).unwrap();
    assert!(out.fidelity(&lq) > 1.0 - 1e-8);
    assert!(report.residual < 1e-12);
}

#[test]
fn syndrome_phases_and_four_loss_identity() {
    let d = dim(60);
    let a1 = syndrome_action(Codeword::W1, 2, 2.5, d).unwrap();
    let a2 = syndrome_action(Codeword::W2, 2, 2.5, d).unwrap();
    assert!((a1.phase - c(1.0, 0.0)).norm() < 1e-10);
    assert!((a2.phase + c(1.0, 0.0)).norm() < 1e-10);
    let one = syndrome_action(Codeword::W2, 1, 2.5, d).unwrap();
    assert!((one.phase - c(0.0, 1.0)).norm() < 1e-10);
    assert!((one.state.parity_expectation() + 1.0).abs() < 1e-10);

    let (_, w2) = codewords(2.5, d).unwrap();
    let back = apply_losses(&w2, 4).unwrap();
    assert!((w2.inner(&back).unwrap() - c(1.0, 0.0)).norm() < 1e-10);
    assert!(syndrome_action(Codeword::W1, 4, 2.5, d).is_err());
}

#[test]
fn recovery_frames() {
    assert!(recovery_map(0).unwrap().is_identity());
    let two = recovery_map(2).unwrap();
    assert_eq!(two.manifold, Parity::Even);
    assert!((two.phase_correction + c(1.0, 0.0)).norm() < 1e-15);
    assert!(recovery_map(4).is_err());
}

#[test]
fn recovery_composes_with_every_loss_count() {
    let alpha = 2.5;
    let d = dim(60);
    let states = [
        LogicalQubit::zero(),
        LogicalQubit::one(),
        LogicalQubit::plus(),
        LogicalQubit::plus_i(),
        LogicalQubit::normalized(c(0.6, 0.1), c(-0.3, 0.7)).unwrap(),
    ];
    for lq in &states {
        let encoded = encode(lq, alpha, d).unwrap();
        for k in 0..8usize {
            let lost = apply_losses(&encoded, k).unwrap();
            let (out, _) = decode(&lost, alpha, (k % 4) as u8).unwrap();
            // bounded by the overlap of the manifold codewords, computed here
            let m1 = cat(c(alpha, 0.0), if k % 2 == 0 { 1.0 } else { -1.0 }, 60);
            let m2 = cat(c(0.0, alpha), if k % 2 == 0 { 1.0 } else { -1.0 }, 60);
            let bound = dot(&m1, &m2).norm();
            assert!(1.0 - out.fidelity(lq) <= bound.max(1e-10), "k={k}");
        }
    }
}

#[test]
fn decode_after_no_jump_decay() {
    let alpha0 = 3.0;
    let d = dim(60);
    let lq = LogicalQubit::normalized(c(0.8, 0.0), c(0.0, 0.6)).unwrap();
    let state = encode(&lq, alpha0, d).unwrap();
    // no-jump evolution e^{−κt n̂/2}
    let kt: f64 = 0.3;
    let damped: Vec<Complex64> = vec_of(&state)
        .iter()
        .enumerate()
        .map(|(n, z)| z * (-kt * n as f64 / 2.0).exp())
        .collect();
    let damped = StateVector::normalized(cqed::linalg::CVector::from_vec(damped)).unwrap();
    let alpha_t = alpha0 * (-kt / 2.0).exp();
    let (out, right) = decode(&damped, alpha_t, 0).unwrap();
    assert!(out.fidelity(&lq) > 1.0 - 1e-4);

    // negative control: undecayed codewords leave a residual, pinned by the Gram oracle
    let (_, wrong) = decode(&damped, alpha0, 0).unwrap();
    assert!(wrong.residual > right.residual + 1e-3);
    let u = cat(c(alpha0, 0.0), 1.0, 60);
    let v = cat(c(0.0, alpha0), 1.0, 60);
    let oracle = 1.0 - span_weight(&u, &v, &vec_of(&damped));
    assert!((wrong.residual - oracle).abs() < 1e-10, "{} vs {oracle}", wrong.residual);
}

#[test]
fn decoding_refuses_collapsed_code() {
    let state = encode(&LogicalQubit::plus(), 1.0, dim(30)).unwrap();
    assert!(matches!(decode(&state, 0.5, 0), Err(cqed::Error::CodeCollapse { .. })));
}

#[test]
fn parity_record_tracks_jumps_per_interval() {
    let alpha = 2.0;
    let d = dim(40);
    let meter = ParityMeter::new(d);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..50 {
        let mut state = encode(&LogicalQubit::plus(), alpha, d).unwrap();
        let mut total = 0usize;
        let mut record = Vec::new();
        let mut any_double = false;
        for k in 1..=20 {
            let traj = trajectory_sample_with(&state, 1.0, 0.05, &mut rng).unwrap();
            total += traj.n_jumps;
            any_double |= traj.n_jumps > 1;
            state = traj.final_state;
            let m = meter.measure(&state, &mut rng).unwrap();
            assert_eq!(m.outcome, Parity::of_level(total));
            state = m.post_state;
            record.push((0.05 * k as f64, m.reported));
        }
        let log = SyndromeLog::from_record(record);
        if !any_double {
            assert_eq!(log.inferred_jumps_mod4 as usize, total % 4);
        }
    }
}

#[test]
fn no_loss_means_perfect_fidelity() {
    let params = CodeParams::new(2.0, 0.0, 0.01, 0.1).unwrap();
    let report = run_qec_experiment(&params, &LogicalQubit::plus(), 50, 1).unwrap();
    for k in 0..report.times.len() {
        assert!((report.fid_monitored[k] - 1.0).abs() < 1e-10);
        assert!((report.fid_unmonitored[k] - 1.0).abs() < 1e-10);
    }
}

#[test]
fn monitoring_never_loses_to_the_blind_decoder() {
    let params = CodeParams::new(2.0, 1.0, 0.005, 0.5).unwrap();
    let report = run_qec_experiment(&params, &LogicalQubit::plus(), 2000, 3).unwrap();
    for k in 0..report.times.len() {
        let gap = report.fid_monitored[k] - report.fid_unmonitored[k];
        assert!(gap >= -3.0 * report.stderr_difference[k], "t={}", report.times[k]);
    }
    let last = report.times.len() - 1;
    assert!(report.fid_monitored[last] > 0.95);
    assert!(report.fid_unmonitored[last] < 0.7);
}

#[test]
fn fine_monitoring_is_bounded_by_codeword_overlap() {
    let t_final = 0.5;
    let params = CodeParams::new(2.0, 1.0, t_final / 256.0, t_final).unwrap();
    let report = run_qec_experiment(&params, &LogicalQubit::plus(), 2000, 7).unwrap();
    let last = report.times.len() - 1;
    let alpha_t = params.alpha_at(t_final);
    let space = CodeSpace::new(alpha_t, dim(report.dim), 0.8, &Tolerances::default()).unwrap();
    let bound = space.overlap(Parity::Even).norm().max(space.overlap(Parity::Odd).norm());
    let infidelity = 1.0 - report.fid_monitored[last];
    assert!(infidelity <= bound + 3.0 * report.stderr_monitored[last]);
}

#[test]
fn experiment_is_seed_deterministic() {
    let params = CodeParams::new(2.0, 1.0, 0.02, 0.2).unwrap();
    let a = run_qec_experiment(&params, &LogicalQubit::plus_i(), 300, 11).unwrap();
    let b = run_qec_experiment(&params, &LogicalQubit::plus_i(), 300, 11).unwrap();
    assert_eq!(a, b);
}

#[test]
fn sweeps_have_the_expected_orders() {
    let params = CodeParams::new(2.0, 1.0, 0.005, 0.5).unwrap();
    let lq = LogicalQubit::plus();
    let monitored = delta_t_sweep(&params, &lq, &[200, 100, 50, 40, 20], 10_000, 0).unwrap();
    let slope = monitored.slope.unwrap();
    assert!((1.8..=2.2).contains(&slope), "{slope}");
    let blind = gamma_sweep(&params, &lq, &[0.01, 0.02, 0.05, 0.1], 10_000, 0).unwrap();
    let slope = blind.slope.unwrap();
    assert!((0.8..=1.2).contains(&slope), "{slope}");
}
