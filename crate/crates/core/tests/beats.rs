#![allow(clippy::needless_range_loop)]

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sgo_core::beats::*;
use sgo_core::Error;

/// Stiffness matrix of the coupled system.
fn stiffness(sys: &OscillatorSystem) -> Vec<Vec<f64>> {
    let n = sys.mu() + 1;
    let mut k = vec![vec![0.0; n]; n];
    k[0][0] = sys.stiffness_small;
    for s in 0..sys.mu() {
        k[s + 1][s + 1] = sys.stiffnesses_large[s];
        k[0][s + 1] = sys.coupling[s];
        k[s + 1][0] = sys.coupling[s];
    }
    k
}

fn masses(sys: &OscillatorSystem) -> Vec<f64> {
    std::iter::once(sys.mass_small)
        .chain(sys.masses_large.iter().copied())
        .collect()
}

/// Cyclic Jacobi rotations on `M^{-1/2} K M^{-1/2}`.
fn jacobi_eigenvalues(sys: &OscillatorSystem) -> Vec<f64> {
    let m = masses(sys);
    let mut a = stiffness(sys);
    let n = a.len();
    for i in 0..n {
        for j in 0..n {
            a[i][j] /= (m[i] * m[j]).sqrt();
        }
    }
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let diag: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum();
        if off <= 1e-32 * diag {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Fixed-step RK4 on `M x'' = -K x`.
fn rk4(sys: &OscillatorSystem, x0: &[f64], v0: &[f64], t: f64, dt: f64) -> (Vec<f64>, Vec<f64>) {
    let k = stiffness(sys);
    let m = masses(sys);
    let n = x0.len();
    let acc = |x: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| -(0..n).map(|j| k[i][j] * x[j]).sum::<f64>() / m[i])
            .collect()
    };
    let steps = (t / dt).ceil() as usize;
    let h = t / steps as f64;
    let (mut x, mut v) = (x0.to_vec(), v0.to_vec());
    let axpy = |a: &[f64], s: f64, b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p + s * q).collect() };
    for _ in 0..steps {
        let k1x = v.clone();
        let k1v = acc(&x);
        let k2x = axpy(&v, 0.5 * h, &k1v);
        let k2v = acc(&axpy(&x, 0.5 * h, &k1x));
        let k3x = axpy(&v, 0.5 * h, &k2v);
        let k3v = acc(&axpy(&x, 0.5 * h, &k2x));
        let k4x = axpy(&v, h, &k3v);
        let k4v = acc(&axpy(&x, h, &k3x));
        for i in 0..n {
            x[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
            v[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
        }
    }
    (x, v)
}

fn random_system(rng: &mut ChaCha8Rng, mu: usize) -> OscillatorSystem {
    let m = rng.random_range(0.5..2.0);
    let v = rng.random_range(0.5..2.0) * m;
    let masses: Vec<f64> = (0..mu).map(|_| rng.random_range(1.0..50.0)).collect();
    let stiff: Vec<f64> = masses.iter().map(|mm| mm * rng.random_range(0.5..2.0)).collect();
    let coupling: Vec<f64> = masses
        .iter()
        .map(|mm| rng.random_range(-0.15..0.15) * (m * mm).sqrt())
        .collect();
    OscillatorSystem::new(m, v, masses, stiff, coupling).unwrap()
}

fn pair(eps: f64, detuning: f64) -> OscillatorSystem {
    OscillatorSystem::from_pair(1.0, 1.0, 1.0, 1.0 + detuning, eps).unwrap()
}

#[test]
fn approximate_pair_within_bound_on_grid() {
    for i in 0..20 {
        let delta = 0.05 + 0.5 * i as f64 / 19.0;
        for j in 0..20 {
            let eps = delta / 3.0 * j as f64 / 19.0;
            let a = two_osc_approx_spectrum(1.0 + 2.0 * delta, 1.0, eps);
            assert!(!a.flagged);
            assert!(
                a.error_plus.abs() <= a.error_bound && a.error_minus.abs() <= a.error_bound,
                "{delta} {eps} {a:?}"
            );
        }
    }
    let a = two_osc_approx_spectrum(2.0, 1.0, 0.0);
    assert_eq!((a.plus, a.minus), (2.0, 1.0));
    assert!(two_osc_approx_spectrum(2.0, 1.0, 0.2).flagged);
}

#[test]
fn approximate_error_is_fourth_order() {
    let err = |eps: f64| two_osc_approx_spectrum(2.0, 1.0, eps).error_plus.abs();
    let slope = (err(0.02) / err(0.01)).log2();
    assert!((slope - 4.0).abs() < 0.05, "slope {slope}");
}

#[test]
fn two_oscillator_vectors() {
    let v = two_osc_eigenvectors(2.0, 1.0, 0.1);
    assert_eq!(v.perturbative.unwrap(), [[1.0, 0.1], [-0.1, 1.0]]);
    let zero = two_osc_eigenvectors(2.0, 1.0, 0.0);
    assert_eq!(zero.exact, [[1.0, 0.0], [-0.0, 1.0]]);
    for eps in [0.01, 0.02, 0.04] {
        let v = two_osc_eigenvectors(2.0, 1.0, eps);
        let diff = (v.exact_angle - v.perturbative_angle.unwrap()).abs();
        assert!(diff <= (eps / 0.5).powi(2), "{eps}: {diff}");
        // exact vectors solve the 2x2 problem
        let (lp, _) = two_osc_exact_spectrum(2.0, 1.0, eps);
        let [c, s] = v.exact[0];
        assert!((2.0 * c + eps * s - lp * c).abs() < 1e-14);
    }
    assert!(two_osc_eigenvectors(1.0, 1.0, 0.1).perturbative.is_none());
}

#[test]
fn secular_roots_match_pair_and_poles_are_flagged() {
    let sys = OscillatorSystem::new(1.0, 2.0, vec![1.0], vec![1.0], vec![0.1]).unwrap();
    let spec = perturbed_spectrum(&sys).unwrap();
    let (lp, lm) = two_osc_exact_spectrum(2.0, 1.0, 0.1);
    assert!((spec.eigenvalues[1] - lp).abs() <= 1e-12 && (spec.eigenvalues[0] - lm).abs() <= 1e-12);
    for l in &spec.eigenvalues {
        assert!(secular_function(&sys, *l).unwrap().abs() < 1e-12);
    }
    assert!(matches!(secular_function(&sys, 1.0), Err(Error::Pole(_))));
    // masses other than one: eps^2 = b^2 / (m M)
    let sys = OscillatorSystem::from_pair(3.0, 2.0, 7.0, 1.0, 0.1).unwrap();
    let spec = perturbed_spectrum(&sys).unwrap();
    assert!((spec.eigenvalues[1] - lp).abs() <= 1e-12 && (spec.eigenvalues[0] - lm).abs() <= 1e-12);
}

#[test]
fn uncoupled_spectrum_is_unperturbed() {
    let sys = OscillatorSystem::new(2.0, 3.0, vec![1.0, 4.0], vec![5.0, 2.0], vec![0.0, 0.0]).unwrap();
    let spec = perturbed_spectrum(&sys).unwrap();
    assert_eq!(spec.eigenvalues, vec![0.5, 1.5, 5.0]);
    assert!(spec.orthonormality_defect() < 1e-15);
}

#[test]
fn random_systems_match_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..100 {
        let mu = 1 + trial % 6;
        let sys = random_system(&mut rng, mu);
        let spec = perturbed_spectrum(&sys).unwrap();
        let oracle = jacobi_eigenvalues(&sys);
        for (a, b) in spec.eigenvalues.iter().zip(&oracle) {
            assert!((a / b - 1.0).abs() <= 1e-10, "trial {trial}: {a} vs {b}");
        }
        assert!(spec.orthonormality_defect() <= 1e-10, "trial {trial}");
        // dimensionally consistent normalization a^2 [m + sum M b^2/(V - M lambda)^2] = 1
        for (l, a) in spec.eigenvalues.iter().zip(&spec.normalization) {
            let s: f64 = (0..mu)
                .map(|s| {
                    sys.masses_large[s] * sys.coupling[s].powi(2)
                        / (sys.stiffnesses_large[s] - sys.masses_large[s] * l).powi(2)
                })
                .sum();
            assert!((a * a * (sys.mass_small + s) - 1.0).abs() <= 1e-10);
        }
        // one eigenvalue strictly between consecutive poles, one beyond each end
        let mut poles = sys.poles();
        poles.sort_by(f64::total_cmp);
        let ev = &spec.eigenvalues;
        assert!(ev[0] < poles[0] && *ev.last().unwrap() > *poles.last().unwrap());
        for j in 0..mu - 1 {
            let inside = ev.iter().filter(|&&l| l > poles[j] && l < poles[j + 1]).count();
            assert_eq!(inside, 1, "trial {trial}");
        }
    }
}

#[test]
fn starlet_splits_triple_eigenvalue() {
    let (kc, ks) = (0.03, 0.04);
    let sys = OscillatorSystem::new(1.0, 1.0, vec![2.0, 3.0], vec![2.0, 3.0], vec![kc, ks]).unwrap();
    let spec = perturbed_spectrum(&sys).unwrap();
    let oracle = jacobi_eigenvalues(&sys);
    let split = (kc * kc / 2.0 + ks * ks / 3.0).sqrt();
    let want = [1.0 - split, 1.0, 1.0 + split];
    for i in 0..3 {
        assert!((spec.eigenvalues[i] - want[i]).abs() < 1e-14);
        assert!((spec.eigenvalues[i] - oracle[i]).abs() < 1e-12);
    }
    assert!(spec.eigenvalues.windows(2).all(|w| w[1] - w[0] > 0.9 * split));
    assert!(spec.orthonormality_defect() < 1e-12);
}

#[test]
fn indefinite_system_rejected() {
    let sys = OscillatorSystem::new(1.0, 1.0, vec![1.0], vec![1.0], vec![2.0]).unwrap();
    assert!(matches!(perturbed_spectrum(&sys), Err(Error::NotPositiveDefinite(_))));
    assert!(OscillatorSystem::new(1.0, -1.0, vec![1.0], vec![1.0], vec![0.0]).is_err());
    assert!(OscillatorSystem::new(1.0, 1.0, vec![1.0], vec![1.0, 2.0], vec![0.0]).is_err());
}

#[test]
fn cauchy_reconstructs_initial_state_and_matches_rk4() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..10 {
        let sys = random_system(&mut rng, 1 + trial % 4);
        let n = sys.mu() + 1;
        let init = InitialState {
            displacement: (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
            velocity: (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
        };
        let sol = solve_cauchy(&perturbed_spectrum(&sys).unwrap(), &init).unwrap();
        assert!(sol.phases.iter().all(|p| (0.0..2.0 * PI).contains(p)));
        let (x, v) = sol.state(0.0);
        for i in 0..n {
            assert!((x[i] - init.displacement[i]).abs() < 1e-10 && (v[i] - init.velocity[i]).abs() < 1e-10);
        }
        let fast = 2.0 * PI / sol.spectrum.frequencies.last().unwrap();
        let t = rng.random_range(5.0..40.0);
        let (xr, vr) = rk4(&sys, &init.displacement, &init.velocity, t, fast / 200.0);
        let (xm, vm) = sol.state(t);
        let scale = xr.iter().chain(&vr).fold(0.0f64, |a, b| a.max(b.abs()));
        for i in 0..n {
            assert!(
                (xr[i] - xm[i]).abs() <= 1e-6 * scale && (vr[i] - vm[i]).abs() <= 1e-6 * scale,
                "trial {trial}"
            );
        }
    }
}

#[test]
fn eigenvector_initial_data_excites_one_mode() {
    let sys = pair(0.05, 1.0);
    let spec = perturbed_spectrum(&sys).unwrap();
    let init = InitialState {
        displacement: spec.vectors[1].clone(),
        velocity: vec![0.0; 2],
    };
    let sol = solve_cauchy(&spec, &init).unwrap();
    assert!(sol.amplitudes[0].abs() < 1e-14 && (sol.amplitudes[1] - 1.0).abs() < 1e-14);
    let period = 2.0 * PI / spec.frequencies[1];
    let e0 = sol.energies(0.0);
    let e1 = sol.energies(37.0 * period);
    assert!((e0.small / e1.small - 1.0).abs() < 1e-9 && (e0.large / e1.large - 1.0).abs() < 1e-9);

    // perturbative initial condition (1, eps/2delta) excites mostly the "+" mode
    let (eps, delta) = (0.05, 0.5);
    let sys = OscillatorSystem::from_pair(1.0, 2.0, 1.0, 1.0, eps).unwrap();
    let spec = perturbed_spectrum(&sys).unwrap();
    let init = InitialState {
        displacement: vec![1.0, eps / (2.0 * delta)],
        velocity: vec![0.0; 2],
    };
    let sol = solve_cauchy(&spec, &init).unwrap();
    assert!(sol.amplitudes[0] <= (eps / delta).powi(2) * sol.amplitudes[1]);
}

#[test]
fn non_orthonormal_spectrum_rejected() {
    let mut spec = perturbed_spectrum(&pair(0.1, 0.2)).unwrap();
    spec.vectors[0][0] *= 1.01;
    let init = InitialState {
        displacement: vec![1.0, 0.0],
        velocity: vec![0.0, 0.0],
    };
    assert!(matches!(solve_cauchy(&spec, &init), Err(Error::NonOrthonormal(_))));
}

#[test]
fn energy_is_conserved_and_beats_have_modal_period() {
    let sys = pair(0.02, 0.0);
    let spec = perturbed_spectrum(&sys).unwrap();
    let sol = solve_cauchy(&spec, &InitialState::small_excited(&sys, 1.0)).unwrap();
    let beat = beat_period(&spec);
    assert!((beat / (2.0 * PI / (spec.frequencies[1] - spec.frequencies[0])) - 1.0).abs() < 1e-14);
    let series = energy_series(&sol, 10.0 * beat, 40_001).unwrap();
    let e0 = series.e_total[0];
    assert!(series.e_total.iter().all(|e| (e / e0 - 1.0).abs() <= 1e-10));
    assert!(series.e_small.iter().chain(&series.e_large).all(|e| *e >= 0.0));

    // envelope period from the minima of E_small
    let dt = series.t[1];
    let mut minima = Vec::new();
    for i in 1..series.e_small.len() - 1 {
        let (a, b, c) = (series.e_small[i - 1], series.e_small[i], series.e_small[i + 1]);
        if b < a && b <= c && b < 0.01 {
            // parabolic refinement
            let shift = 0.5 * (a - c) / (a - 2.0 * b + c);
            minima.push(series.t[i] + shift * dt);
        }
    }
    // a minimum of E_small can repeat within one fast period; keep one per envelope dip
    minima.dedup_by(|b, a| *b - *a < 0.5 * beat);
    let measured = (minima.last().unwrap() - minima[0]) / (minima.len() - 1) as f64;
    assert!((measured / beat - 1.0).abs() < 0.01, "measured {measured} vs {beat}");
}

#[test]
fn energy_exchange_is_in_phase_opposition() {
    let sys = pair(0.02, 0.0);
    let spec = perturbed_spectrum(&sys).unwrap();
    let sol = solve_cauchy(&spec, &InitialState::small_excited(&sys, 1.0)).unwrap();
    let s = energy_series(&sol, beat_period(&spec), 5001).unwrap();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (ms, ml) = (mean(&s.e_small), mean(&s.e_large));
    let cov: f64 = s.e_small.iter().zip(&s.e_large).map(|(a, b)| (a - ms) * (b - ml)).sum();
    let vs: f64 = s.e_small.iter().map(|a| (a - ms).powi(2)).sum();
    let vl: f64 = s.e_large.iter().map(|b| (b - ml).powi(2)).sum();
    assert!(cov / (vs * vl).sqrt() <= -0.95);
}

#[test]
fn xi_identity_and_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for mu in [1, 2] {
        let sys = random_system(&mut rng, mu);
        let spec = perturbed_spectrum(&sys).unwrap();
        let init = InitialState {
            displacement: (0..=mu).map(|_| rng.random_range(-1.0..1.0)).collect(),
            velocity: (0..=mu).map(|_| rng.random_range(-1.0..1.0)).collect(),
        };
        let sol = solve_cauchy(&spec, &init).unwrap();
        let beat = beat_period(&spec).min(200.0);
        for i in 0..=200 {
            let t = beat * i as f64 / 200.0;
            let xi = xi_characteristic(&sol, t);
            let e = sol.energies(t).small;
            assert!((xi.energy - e).abs() <= 1e-12 * e.max(1.0));
            let closed = xi_analytic(&sol, t);
            assert!(
                (closed - xi.xi).norm() <= 1e-8 * xi.xi.norm().max(1.0),
                "mu {mu} t {t}: {closed} vs {}",
                xi.xi
            );
        }
        let x0 = xi_characteristic(&sol, 0.0).xi;
        assert!((xi_analytic(&sol, 0.0) - x0).norm() <= 1e-14 * x0.norm());
    }
}

#[test]
fn free_oscillator_xi() {
    let w0: f64 = 1.7;
    let sys = OscillatorSystem::new(1.0, w0 * w0, vec![4.0], vec![1.0], vec![0.0]).unwrap();
    let sol = solve_cauchy(
        &perturbed_spectrum(&sys).unwrap(),
        &InitialState {
            displacement: vec![1.0, 0.3],
            velocity: vec![0.0, 0.0],
        },
    )
    .unwrap();
    for t in [0.0, 0.4, 2.2, 9.1] {
        let xi = xi_characteristic(&sol, t).xi;
        assert!((xi.norm_sqr() - w0 * w0).abs() < 1e-12);
        let free = Complex64::from_polar(1.0, w0 * t) * Complex64::new(0.0, w0);
        assert!((xi_analytic(&sol, t) - free).norm() < 1e-12);
    }
}

#[test]
fn xi_closed_form_matches_quadrature_at_mid_beat() {
    let sys = pair(0.02, 0.05);
    let spec = perturbed_spectrum(&sys).unwrap();
    let sol = solve_cauchy(&spec, &InitialState::small_excited(&sys, 1.0)).unwrap();
    let w0 = sys.lambda_small().sqrt();
    let t = PI / (spec.frequencies[0] - w0).abs();
    // -(1/sqrt m) int_0^t e^{-i w0 s} b.U(s) ds by composite Simpson
    let n = 200_000;
    let h = t / n as f64;
    let f = |s: f64| {
        let (x, _) = sol.state(s);
        Complex64::from_polar(1.0, -w0 * s) * (sys.coupling[0] * x[1])
    };
    let mut acc = f(0.0) + f(t);
    for i in 1..n {
        acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let hat = -acc * (h / 3.0) / sys.mass_small.sqrt();
    let xi0 = xi_characteristic(&sol, 0.0).xi;
    let want = Complex64::from_polar(1.0, w0 * t) * (xi0 + hat);
    assert!((xi_analytic(&sol, t) - want).norm() < 1e-9 * want.norm());
    // the resonant term of the nearly co-rotating mode reaches |F| t / sqrt(m) scale
    let forces = sol.drive_amplitudes();
    let resonant = 0.5 * forces[0].abs() * t * 2.0 / PI;
    assert!(hat.norm() > 0.5 * resonant, "{} vs {resonant}", hat.norm());
}

#[test]
fn windowed_average_of_periodic_signal() {
    let nu = 0.37;
    let width = 2.0 * PI / nu;
    let dt = width / 1024.0;
    let values: Vec<f64> = (0..5000).map(|i| (nu * i as f64 * dt).cos().powi(2)).collect();
    let s = SampledSeries { t0: 0.0, dt, values };
    for c in [width, 1.3 * width, 2.71 * width] {
        assert!((windowed_average(&s, c, width).unwrap() - 0.5).abs() < 1e-6);
    }
    let constant = SampledSeries {
        t0: 2.0,
        dt: 0.5,
        values: vec![3.25; 64],
    };
    assert!((windowed_average(&constant, 10.0, 10.0).unwrap() - 3.25).abs() < 1e-14);
}

#[test]
fn optimal_window_balance_and_scaling() {
    for detuning in [0.0, 0.01, 0.2] {
        let sys = pair(0.01, detuning);
        let w = optimal_window(&sys).unwrap();
        assert!((w.drift - w.leakage).abs() <= 1e-15 * w.drift);
        let mut strong = sys.clone();
        strong.coupling[0] *= 4.0;
        assert!((optimal_window(&strong).unwrap().delta_star / w.delta_star - 0.25).abs() < 1e-14);
    }
    assert!(optimal_window(&pair(0.0, 0.1)).is_err());
}

#[test]
fn averaged_estimate_structure() {
    let sys = pair(0.01, 0.2);
    let e = averaged_energy_estimate(&sys, 0.3, 0.0).unwrap();
    let dl = sys.lambda_small() - sys.poles()[0];
    let b2 = sys.coupling[0].powi(2);
    assert!((e.value - 0.09 * 2.0 * dl.abs() * sys.lambda_small() / b2).abs() < 1e-12 * e.value);
    assert!(!e.flagged);
    let kappa = b2 / (4.0 * dl);
    assert!((e.envelope_period - PI / kappa.abs()).abs() < 1e-9 * e.envelope_period);
    let later = averaged_energy_estimate(&sys, 0.3, e.envelope_period).unwrap();
    assert!((later.value / e.value - 1.0).abs() < 1e-9);
    assert!(averaged_energy_estimate(&pair(0.1, 0.2), 0.3, 1.0).unwrap().flagged);
}

#[test]
fn transfer_coefficient_behaviour() {
    let exact = transfer_coefficient(&pair(0.01, 0.0), 1.0, None).unwrap();
    assert!(exact.k >= 0.99, "{exact:?}");
    assert_eq!(transfer_coefficient(&pair(0.0, 0.0), 1.0, None).unwrap().k, 0.0);
    let detunings: Vec<f64> = (0..10).map(|i| 0.004 * i as f64).collect();
    let sweep = transfer_sweep(&pair(0.01, 0.0), 1.0, &detunings).unwrap();
    assert!(sweep.windows(2).all(|w| w[1].1 < w[0].1), "{sweep:?}");
    match transfer_coefficient(&pair(0.01, 0.0), 1.0, Some(10.0)) {
        Err(Error::HorizonTooShort { required, .. }) => assert!(required > 10.0),
        other => panic!("{other:?}"),
    }
}

proptest! {
    #[test]
    fn trace_identity(lm in 0.1f64..10.0, lb in 0.1f64..10.0, eps in 0.0f64..2.0) {
        let (p, m) = two_osc_exact_spectrum(lm, lb, eps);
        prop_assert!(p >= m);
        prop_assert!(((p + m) - (lm + lb)).abs() <= 1e-13 * (lm + lb));
    }

    #[test]
    fn weak_random_systems_stay_orthonormal(seed in 0u64..10_000, mu in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_system(&mut rng, mu);
        let spec = perturbed_spectrum(&sys).unwrap();
        prop_assert!(spec.orthonormality_defect() <= 1e-10);
        prop_assert_eq!(spec.eigenvalues.len(), mu + 1);
    }
}
