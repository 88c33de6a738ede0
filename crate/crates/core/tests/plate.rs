use std::f64::consts::PI;

use proptest::prelude::*;
use sgo_core::plate::*;

fn profile_active() -> PlateSpec {
    PlateSpec::new(17.28e10, 0.28, 3380.0, 3e4, 3e9).unwrap()
}

fn profile_complement() -> PlateSpec {
    PlateSpec::new(17.28e10, 0.28, 3380.0, 1e5, 0.0).unwrap()
}

const EPS: f64 = 2.6e5;
const NU0: f64 = 2e-4;

fn geometry() -> CircularGeometry {
    CircularGeometry::new(EPS, 5e6).unwrap()
}

/// Plain ascending series, sign -1 for J_n, +1 for I_n (integer n).
fn series(n: u32, z: f64, sign: f64) -> f64 {
    let mut term = (0.5 * z).powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..200 {
        let k = k as f64;
        term *= sign * 0.25 * z * z / (k * (k + n as f64));
        sum += term;
    }
    sum
}

fn classical_oracle(x: f64) -> f64 {
    series(0, x, -1.0) * series(1, x, 1.0) + series(1, x, -1.0) * series(0, x, 1.0)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn published_theta() -> ThetaParam {
    ThetaParam::prescribed(11f64.ln(), 2.0 * PI * NU0)
}

#[test]
fn default_rigidity() {
    let d1 = profile_active().d1();
    assert!((d1 / 1.56e10 - 1.0).abs() < 5e-3, "D1 = {d1}");
    let spec = profile_active();
    assert!((spec.rigidity() - d1 * 2.7e13).abs() < 1e-3 * spec.rigidity());
    assert_eq!(spec.q(), 3e9 * 3e4);
}

#[test]
fn uncompressed_factorization_is_symmetric() {
    let spec = profile_active().with_tension(0.0);
    let w = factorization_wavenumbers(&spec, 1e-3).unwrap();
    let base = (1e-6 * 3380.0 / (9e8 * spec.d1())).powf(0.25);
    assert!((w.k_j / base - 1.0).abs() < 1e-14);
    assert_eq!(w.k_j, w.k_i);
}

#[test]
fn published_bessel_arguments() {
    let w = Wavenumbers::at(&profile_active(), published_theta());
    let x = w.k_j * EPS;
    let y = w.k_i * EPS;
    assert!((x / 3.9 - 1.0).abs() < 0.03, "k_J eps = {x}");
    assert!((x - 3.81).abs() < 0.01);
    assert!((y - 0.35).abs() < 0.01, "k_I eps = {y}");
}

#[test]
fn mode_is_clamped_and_matches_direct_evaluation() {
    let spec = profile_active();
    let g = geometry();
    let theta = published_theta();
    assert!(radial_mode(&spec, &g, theta, EPS).unwrap().abs() < 1e-12);
    let w = Wavenumbers::at(&spec, theta);
    let (x, y) = (w.k_j * EPS, w.k_i * EPS);
    let want = 1.0 / series(0, x, -1.0) - 1.0 / series(0, y, 1.0);
    let got = radial_mode(&spec, &g, theta, 0.0).unwrap();
    assert!((got - want).abs() < 1e-10 * want.abs());
}

#[test]
fn mode_is_continuous_at_zero_compression() {
    let spec0 = profile_active().with_tension(0.0);
    let g = geometry();
    let omega = 1e-3;
    let t0 = ThetaParam::from_omega(&spec0, omega).unwrap();
    let spec = profile_active().with_tension(1e3);
    let t = ThetaParam::from_omega(&spec, omega).unwrap();
    assert!(t.theta > 0.0 && t.theta < 1e-5);
    for i in 0..=10 {
        let r = EPS * i as f64 / 10.0;
        let a = radial_mode(&spec0, &g, t0, r).unwrap();
        let b = radial_mode(&spec, &g, t, r).unwrap();
        assert!((a - b).abs() < 1e-4 * (1.0 + a.abs()));
        // uncompressed: J0(kr)/J0(k eps) - I0(kr)/I0(k eps)
        let k = spec0.base_wavenumber(omega);
        let want = series(0, k * r, -1.0) / series(0, k * EPS, -1.0) - series(0, k * r, 1.0) / series(0, k * EPS, 1.0);
        assert!((a - want).abs() < 1e-10 * (1.0 + want.abs()));
    }
}

#[test]
fn normalization_pole_is_rejected() {
    let spec = profile_active().with_tension(0.0);
    let g = geometry();
    let k = 2.404_825_557_695_773 / EPS;
    let omega = spec.omega_from_wavenumber(k);
    let err = radial_mode(&spec, &g, ThetaParam::prescribed(0.0, omega), 0.0).unwrap_err();
    assert!(matches!(err, sgo_core::Error::Pole(_)));
}

#[test]
fn classical_clamped_root() {
    let x0 = bisect(classical_oracle, 3.0, 3.4);
    assert!((x0 - 3.196).abs() < 1e-3 * 3.196, "x0 = {x0}");
    let spec = profile_active().with_tension(0.0);
    let g = geometry();
    let omega = spec.omega_from_wavenumber(x0 / EPS);
    let r = dispersion_residual_active(&spec, &g, ThetaParam::from_omega(&spec, omega).unwrap()).unwrap();
    assert!(r.abs() < 1e-10, "residual {r}");
    // same quotient drives the complement at ka = x0
    assert!(complement_quotient(x0).unwrap().abs() < 1e-10);
}

#[test]
fn residual_changes_sign_around_roots_in_theta() {
    let spec = profile_active();
    let g = geometry();
    let omega = 2.0 * PI * NU0;
    let f = |t: f64| dispersion_residual_active(&spec, &g, ThetaParam::prescribed(t, omega)).unwrap();
    let den = |t: f64| active_denominator(&spec, &g, ThetaParam::prescribed(t, omega));
    let n = 20_000;
    let ts: Vec<f64> = (0..=n).map(|i| 0.01 + 9.99 * i as f64 / n as f64).collect();
    let mut roots = Vec::new();
    for w in ts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if den(a).signum() != den(b).signum() {
            continue;
        }
        if f(a).signum() != f(b).signum() {
            let root = bisect(f, a, b);
            assert!(f(root - 1e-9).signum() != f(root + 1e-9).signum());
            roots.push(root);
        }
    }
    assert!(roots.len() >= 3, "roots {roots:?}");
    // interlacing: a pole of J0(k_J eps) between consecutive roots
    for pair in roots.windows(2) {
        let crossings = ts
            .windows(2)
            .filter(|w| w[0] > pair[0] && w[1] < pair[1] && den(w[0]).signum() != den(w[1]).signum())
            .count();
        assert!(crossings >= 1, "no pole between {pair:?}");
    }
}

#[test]
fn complement_asymptotic_roots() {
    for l in [5u32, 10, 20] {
        let target = PI * l as f64;
        let root = bisect(|x| complement_quotient(x).unwrap(), target - 0.5, target + 0.5);
        assert!((root / target - 1.0).abs() < 1e-3, "l = {l}: {root}");
    }
    // no root below the first zero of J0
    let spec = profile_complement();
    let omega = 2.0 * PI * NU0;
    let k = complement_wavenumber(&spec, omega);
    for i in 1..1000 {
        let a = 2.4 / k * i as f64 / 1000.0;
        assert!(dispersion_residual_complement(&spec, a, omega).unwrap() < 0.0);
    }
}

#[test]
fn complement_first_principles_wavenumber() {
    let k = complement_wavenumber(&profile_complement(), 2.0 * PI * NU0);
    assert!((k / 2.42e-6 - 1.0).abs() < 0.01, "k = {k}");
}

#[test]
fn sectorial_modes() {
    let spec = profile_active();
    let g = geometry();
    let theta = published_theta();
    for i in 0..10 {
        let r = EPS * i as f64 / 9.0;
        let s = sectorial_mode(&spec, &g, 1.5, theta, Parity::Sin, r, 0.0).unwrap();
        assert_eq!(s, 0.0);
        let p0 = sectorial_mode(&spec, &g, 0.0, theta, Parity::Cos, r, 0.3).unwrap();
        let radial = radial_mode(&spec, &g, theta, r).unwrap();
        assert!((p0 - radial).abs() < 1e-12);
    }
    let edge = sectorial_mode(&spec, &g, 1.0, theta, Parity::Cos, EPS, 0.5).unwrap();
    assert!(edge.abs() < 1e-12);
    assert!(sectorial_mode(&spec, &g, 2.0, theta, Parity::Sin, 1.0, 2.0).is_err());
}

/// Root in omega of the compressed active residual near the classical root.
fn compressed_root(spec: &PlateSpec) -> ThetaParam {
    let g = geometry();
    let f = |lw: f64| {
        let t = ThetaParam::from_omega(spec, lw.exp()).unwrap();
        dispersion_residual_active(spec, &g, t).unwrap()
    };
    let den = |lw: f64| active_denominator(spec, &g, ThetaParam::from_omega(spec, lw.exp()).unwrap());
    let omega_c = spec.omega_from_wavenumber(3.196 / EPS);
    // first sign change of the residual that is not a pole of J0(k_J eps)
    let grid: Vec<f64> = (0..=4000)
        .map(|i| (omega_c * 0.05).ln() + i as f64 * 20.2f64.ln() / 4000.0)
        .collect();
    let (lo, hi) = grid
        .windows(2)
        .map(|w| (w[0], w[1]))
        .find(|&(a, b)| den(a).signum() == den(b).signum() && f(a).signum() != f(b).signum())
        .expect("bracket");
    ThetaParam::from_omega(spec, bisect(f, lo, hi).exp()).unwrap()
}

#[test]
fn boundary_residuals_at_a_root() {
    let spec = profile_active().with_tension(1e9);
    let theta = compressed_root(&spec);
    let mode = RadialMode::new(&spec, EPS, 0.0, theta, Parity::Radial).unwrap();
    let samples = mode.sample(512).unwrap();
    let clamp = BoundaryBond {
        beta: f64::INFINITY,
        curvature_radius: EPS,
    };
    let res = boundary_residuals(&spec, &clamp, &samples).unwrap();
    assert!(res.dirichlet <= 1e-10, "{res:?}");
    assert!(res.natural <= 1e-6, "{res:?}");

    // off the root the Neumann part does not vanish
    let off = ThetaParam::from_omega(&spec, theta.omega * 0.8).unwrap();
    let samples = RadialMode::new(&spec, EPS, 0.0, off, Parity::Radial)
        .unwrap()
        .sample(512)
        .unwrap();
    assert!(boundary_residuals(&spec, &clamp, &samples).unwrap().natural > 1e-3);

    // cancellation case: natural condition reduces to D Δu = 0
    let d = spec.rigidity();
    let cancel = BoundaryBond {
        beta: d * (1.0 - spec.poisson) / EPS,
        curvature_radius: EPS,
    };
    let res = boundary_residuals(&spec, &cancel, &samples).unwrap();
    // analytic Δu(eps) = -(k_J² + k_I²) for the normalized mode
    let w = Wavenumbers::at(&spec, off);
    let amp = samples.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let want = (w.k_j * w.k_j + w.k_i * w.k_i) * EPS * EPS / amp;
    assert!((res.natural / want - 1.0).abs() < 1e-6, "{} vs {want}", res.natural);

    let short = RadialSamples {
        step: 1.0,
        values: vec![0.0; 4],
    };
    assert!(boundary_residuals(&spec, &clamp, &short).is_err());
}

#[test]
fn factorization_identities_annihilate_mode_parts() {
    let spec = profile_active();
    let omega = 2.0 * PI * NU0;
    let theta = ThetaParam::from_omega(&spec, omega).unwrap();
    let w = Wavenumbers::at(&spec, theta);
    let (d1, h, q1, rho) = (spec.d1(), spec.thickness, spec.tension_q1, spec.density);
    let shift = (omega * omega * rho + q1 * q1 / (4.0 * d1 * h * h)).sqrt();
    let scale = omega * rho.sqrt() * theta.theta.cosh();
    // operator -sqrt(D1) H Δ - Q1/(2 sqrt(D1) H) -/+ shift, Δ by centred differences
    let apply = |f: &dyn Fn(f64) -> f64, r: f64, sign: f64| {
        let hh = 1e-3 / w.k_j;
        let d1f = (f(r - 2.0 * hh) - 8.0 * f(r - hh) + 8.0 * f(r + hh) - f(r + 2.0 * hh)) / (12.0 * hh);
        let d2f =
            (-f(r - 2.0 * hh) + 16.0 * f(r - hh) - 30.0 * f(r) + 16.0 * f(r + hh) - f(r + 2.0 * hh)) / (12.0 * hh * hh);
        let lap = d2f + d1f / r;
        -d1.sqrt() * h * lap - q1 / (2.0 * d1.sqrt() * h) * f(r) + sign * shift * f(r)
    };
    let jpart = |r: f64| series(0, w.k_j * r, -1.0);
    let ipart = |r: f64| series(0, w.k_i * r, 1.0);
    for i in 1..10 {
        let r = EPS * i as f64 / 10.0;
        let rj = apply(&jpart, r, -1.0) / scale;
        let ri = apply(&ipart, r, 1.0) / scale / ipart(r);
        assert!(rj.abs() < 1e-8, "J part {rj}");
        assert!(ri.abs() < 1e-8, "I part {ri}");
    }
}

#[test]
fn mode_energy_of_published_estimate() {
    let e = mode_energy(2e-4, 2e-3, 1e14, 1e5, 3380.0);
    assert!((e / 5.4e10 - 1.0).abs() < 0.05, "E = {e}");
    assert!((e / 5.336e10 - 1.0).abs() < 1e-3);
    assert_eq!(mode_energy(2e-4, 0.0, 1e14, 1e5, 3380.0), 0.0);
}

#[test]
fn hamiltonian_special_cases() {
    let spec = profile_active();
    let bond = BoundaryBond {
        beta: 1e20,
        curvature_radius: EPS,
    };
    let n = 128;
    let step = EPS / (n - 1) as f64;
    let zero = RadialSamples {
        step,
        values: vec![0.0; n],
    };
    assert_eq!(hamiltonian_energy(&spec, &bond, &zero, &zero).unwrap(), 0.0);
    let c = 0.01;
    let vel = RadialSamples {
        step,
        values: vec![c; n],
    };
    let e = hamiltonian_energy(&spec, &bond, &zero, &vel).unwrap();
    let want = 0.5 * spec.thickness * spec.density * PI * EPS * EPS * c * c;
    assert!((e / want - 1.0).abs() < 1e-12);
    let coarse = RadialSamples {
        step,
        values: vec![0.0; 63],
    };
    assert!(hamiltonian_energy(&spec, &bond, &coarse, &coarse).is_err());
}

#[test]
fn virial_balance_of_an_eigenmode() {
    for q1 in [0.0, 1e9, 2.5e9] {
        let spec = profile_active().with_tension(q1);
        let theta = compressed_root(&spec);
        let mode = RadialMode::new(&spec, EPS, 0.0, theta, Parity::Radial).unwrap();
        let u = mode.sample(512).unwrap();
        let still = RadialSamples {
            step: u.step,
            values: vec![0.0; 512],
        };
        let v = RadialSamples {
            step: u.step,
            values: u.values.iter().map(|x| x * theta.omega).collect(),
        };
        let clamp = BoundaryBond {
            beta: f64::INFINITY,
            curvature_radius: EPS,
        };
        let potential = hamiltonian_energy(&spec, &clamp, &u, &still).unwrap();
        let kinetic = hamiltonian_energy(&spec, &clamp, &still, &v).unwrap();
        assert!(
            (potential / kinetic - 1.0).abs() < 0.01,
            "Q1 = {q1}: {potential} vs {kinetic}"
        );
    }
}

proptest! {
    #[test]
    fn theta_round_trip(lw in (1e-5f64).ln()..(1e-2f64).ln(), q1 in 1e8f64..3e9) {
        let spec = profile_active().with_tension(q1);
        let omega = lw.exp();
        let t = ThetaParam::from_omega(&spec, omega).unwrap();
        let back = ThetaParam::from_theta(&spec, t.theta).unwrap();
        prop_assert!((back.omega / omega - 1.0).abs() < 1e-12);
        let lhs = t.theta.sinh() * 2.0 * omega * spec.thickness * (spec.d1() * spec.density).sqrt();
        prop_assert!((lhs / q1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wavenumber_identities(lw in (1e-5f64).ln()..(1e-2f64).ln(), q1 in 0.0f64..3e9) {
        let spec = profile_active().with_tension(q1);
        let omega = lw.exp();
        let w = factorization_wavenumbers(&spec, omega).unwrap();
        let prod = (omega * omega * spec.density / (spec.thickness * spec.thickness * spec.d1())).sqrt();
        prop_assert!((w.k_j * w.k_i / prod - 1.0).abs() < 1e-12);
        let diff = q1 / (spec.d1() * spec.thickness * spec.thickness);
        prop_assert!((w.k_j * w.k_j - w.k_i * w.k_i - diff).abs() <= 1e-10 * (w.k_j * w.k_j));
    }

    #[test]
    fn mode_energy_scaling(nu in 1e-5f64..1e-2, amp in 1e-4f64..1.0, area in 1e8f64..1e15,
                           h in 1e3f64..1e5, rho in 1e3f64..5e3, c in 0.1f64..10.0) {
        let e = mode_energy(nu, amp, area, h, rho);
        prop_assert!((mode_energy(nu, amp, c * area, h, rho) / e - c).abs() < 1e-12 * c);
        prop_assert!((mode_energy(nu, amp, area, c * h, rho) / e - c).abs() < 1e-12 * c);
        prop_assert!((mode_energy(nu, amp, area, h, c * rho) / e - c).abs() < 1e-12 * c);
        prop_assert!((mode_energy(c * nu, amp, area, h, rho) / e - c * c).abs() < 1e-12 * c * c);
        prop_assert!((mode_energy(nu, c * amp, area, h, rho) / e - c * c).abs() < 1e-12 * c * c);
    }

    #[test]
    fn stability_is_monotone_in_beta(beta in -1e20f64..1e20, extra in 0.0f64..1e20, q1 in prop::sample::select(vec![0.0, 1e9])) {
        let spec = profile_active().with_tension(q1);
        let a = BoundaryBond { beta, curvature_radius: EPS };
        let b = BoundaryBond { beta: beta + extra, curvature_radius: EPS };
        if stability_check(&spec, &a).class == Stability::Stable {
            prop_assert_eq!(stability_check(&spec, &b).class, Stability::Stable);
        }
    }
}
