//! Oracles that share no code with `sgo-core`'s solvers: plain ascending
//! Bessel series, bisection and a cyclic Jacobi eigensolver.

#![allow(clippy::needless_range_loop)]

use sgo_core::beats::OscillatorSystem;

/// Ascending series, sign -1 for J_n, +1 for I_n (integer n).
pub fn bessel_series(n: u32, z: f64, sign: f64) -> f64 {
    let mut term = (0.5 * z).powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..200 {
        let k = k as f64;
        term *= sign * 0.25 * z * z / (k * (k + n as f64));
        sum += term;
    }
    sum
}

pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
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

/// Cyclic Jacobi on `M^{-1/2} K M^{-1/2}`.
pub fn jacobi_eigenvalues(sys: &OscillatorSystem) -> Vec<f64> {
    let n = sys.mu() + 1;
    let m: Vec<f64> = std::iter::once(sys.mass_small)
        .chain(sys.masses_large.iter().copied())
        .collect();
    let mut a = vec![vec![0.0; n]; n];
    a[0][0] = sys.stiffness_small;
    for s in 0..sys.mu() {
        a[s + 1][s + 1] = sys.stiffnesses_large[s];
        a[0][s + 1] = sys.coupling[s];
        a[s + 1][0] = sys.coupling[s];
    }
    for i in 0..n {
        for j in 0..n {
            a[i][j] /= (m[i] * m[j]).sqrt();
        }
    }
    for _ in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a[i][j] * a[i][j];
                }
            }
        }
        if off <= 1e-32 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
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
