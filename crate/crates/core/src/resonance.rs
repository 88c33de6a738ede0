//! Root isolation on dispersion residuals with poles, and resonance tuning
//! between the compressed active disc and its uncompressed complement.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::plate::{
    self, active_denominator, complement_quotient, complement_wavenumber, CircularGeometry, PlateSpec, ThetaParam,
    Wavenumbers, DESTRUCTION_LIMIT_Q1, J1_FIRST_ZERO,
};
use crate::reference::ReferenceCheck;

pub const DEFAULT_GRID: usize = 4096;
pub const MIN_GRID: usize = 1024;

/// Target band accepted by the tuners (Hz).
pub const NU_BAND: (f64, f64) = (1e-5, 1e-2);
/// Admissible outer radii of the complement (m).
pub const OUTER_RADIUS_RANGE: (f64, f64) = (1e5, 1e8);
/// Rows with `|mismatch|` below this are flagged resonant.
pub const RESONANT_MISMATCH: f64 = 1e-3;

/// Lowest root of the classical clamped-disc quotient `J0 I1 + J1 I0`.
pub const CLAMPED_DISC_ROOT: f64 = 3.196_220_616_582_541;

/// An interval with a sign change of the residual and no pole inside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

fn bisect_sign(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa_pos = f(a) > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a.min(b) || mid >= a.max(b) {
            break;
        }
        if (f(mid) > 0.0) == fa_pos {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Brackets of the residual's sign changes on a uniform grid of `grid`
/// points, with intervals split at the sign changes of `denominator`.
pub fn isolate_brackets(
    residual: &dyn Fn(f64) -> f64,
    denominator: Option<&dyn Fn(f64) -> f64>,
    lo: f64,
    hi: f64,
    grid: usize,
) -> Result<Vec<RootBracket>> {
    if grid < MIN_GRID {
        return Err(Error::InvalidParameter(format!(
            "pole scan needs >= {MIN_GRID} points, got {grid}"
        )));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!("invalid search interval [{lo}, {hi}]")));
    }
    let xs: Vec<f64> = (0..grid)
        .map(|i| lo + (hi - lo) * i as f64 / (grid - 1) as f64)
        .collect();
    let dens: Option<Vec<f64>> = denominator.map(|d| xs.iter().map(|&x| d(x)).collect());
    let vals: Vec<f64> = xs.iter().map(|&x| residual(x)).collect();

    let mut pieces: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(grid);
    let mut poles = 0usize;
    let gap = 1e-9 * (hi - lo) / grid as f64;
    for i in 0..grid - 1 {
        let (a, b) = (xs[i], xs[i + 1]);
        let pole = dens
            .as_ref()
            .filter(|d| d[i] == 0.0 || d[i].signum() != d[i + 1].signum())
            .map(|_| bisect_sign(denominator.unwrap(), a, b));
        match pole {
            Some(p) => {
                poles += 1;
                let (left, right) = ((p - gap).max(a), (p + gap).min(b));
                if left > a {
                    pieces.push((a, left, vals[i], residual(left)));
                }
                if right < b {
                    pieces.push((right, b, residual(right), vals[i + 1]));
                }
            }
            None => pieces.push((a, b, vals[i], vals[i + 1])),
        }
    }
    if poles > grid / 8 {
        return Err(Error::PoleDense { poles, grid });
    }
    Ok(pieces
        .into_iter()
        .filter(|&(_, _, fa, fb)| fa.is_finite() && fb.is_finite() && (fa == 0.0 || fa.signum() != fb.signum()))
        .map(|(lo, hi, f_lo, f_hi)| RootBracket { lo, hi, f_lo, f_hi })
        .collect())
}

/// Bisection to `1e-3` relative width, then bracketed secant (Illinois) to
/// machine precision. Returns the end point with the smaller residual.
pub fn refine(residual: &dyn Fn(f64) -> f64, bracket: RootBracket) -> f64 {
    let RootBracket {
        mut lo,
        mut hi,
        mut f_lo,
        mut f_hi,
    } = bracket;
    if f_lo == 0.0 {
        return lo;
    }
    if f_hi == 0.0 {
        return hi;
    }
    while hi - lo > 1e-3 * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE) {
        let mid = 0.5 * (lo + hi);
        let fm = residual(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
    }
    let (mut a, mut b, mut fa, mut fb) = (lo, hi, f_lo, f_hi);
    let (mut ta, mut tb) = (fa, fb);
    let mut side = 0i8;
    for _ in 0..200 {
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a.min(b) && c < a.max(b)) {
            c = 0.5 * (a + b);
        }
        let fc = residual(c);
        if fc == 0.0 {
            return c;
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            tb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            ta = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() <= 2.0 * f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
    }
    if ta.abs() <= tb.abs() {
        a
    } else {
        b
    }
}

/// Ascending roots of `residual` on `[lo, hi]`, at most `max_roots`.
///
/// Sign changes caused by poles are discarded: a refined point whose
/// residual exceeds both bracket ends is a pole, not a root.
pub fn find_roots(
    residual: &dyn Fn(f64) -> f64,
    denominator: Option<&dyn Fn(f64) -> f64>,
    lo: f64,
    hi: f64,
    max_roots: usize,
    grid: usize,
) -> Result<Vec<f64>> {
    let brackets = isolate_brackets(residual, denominator, lo, hi, grid)?;
    let mut roots = Vec::new();
    for b in brackets {
        if roots.len() >= max_roots {
            break;
        }
        let r = refine(residual, b);
        let fr = residual(r).abs();
        if fr.is_finite() && fr <= b.f_lo.abs().min(b.f_hi.abs()) {
            roots.push(r);
        }
    }
    if roots.is_empty() {
        return Err(Error::NoRoot { lo, hi });
    }
    Ok(roots)
}

/// An eigenfrequency of the compressed clamped active disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActiveMode {
    pub omega: f64,
    pub nu_hz: f64,
    pub theta: f64,
    /// `k_J ε`.
    pub x_j: f64,
    /// `k_I ε`.
    pub x_i: f64,
}

/// Classical clamped-disc ground frequency (no compression).
pub fn classical_ground_omega(spec: &PlateSpec, epsilon: f64) -> f64 {
    spec.omega_from_wavenumber(CLAMPED_DISC_ROOT / epsilon)
}

/// The lowest `count` eigenfrequencies of the compressed clamped disc.
pub fn active_eigenfrequencies(spec: &PlateSpec, epsilon: f64, count: usize) -> Result<Vec<ActiveMode>> {
    let x0 = epsilon * (spec.tension_q1 / spec.d1()).sqrt() / spec.thickness;
    if x0 >= J1_FIRST_ZERO {
        return Err(Error::Unreachable(format!(
            "compression Q1 = {:e} buckles the disc (limit {:e})",
            spec.tension_q1,
            spec.buckling_q1(epsilon)
        )));
    }
    let geometry = CircularGeometry {
        epsilon,
        outer_radius: f64::INFINITY,
    };
    let omega_c = classical_ground_omega(spec, epsilon);
    let upper = if count <= 1 {
        4.0
    } else {
        ((count as f64 + 1.0) * PI / CLAMPED_DISC_ROOT).powi(2)
    };
    let theta_at = |s: f64| ThetaParam::from_omega(spec, s.exp());
    let residual = |s: f64| {
        theta_at(s)
            .and_then(|t| plate::dispersion_residual_active(spec, &geometry, t))
            .unwrap_or(f64::NAN)
    };
    let denominator = |s: f64| {
        theta_at(s)
            .map(|t| active_denominator(spec, &geometry, t))
            .unwrap_or(f64::NAN)
    };
    let lo = (1e-8 * omega_c).ln();
    let hi = (upper * omega_c).ln();
    let roots = find_roots(&residual, Some(&denominator), lo, hi, count, DEFAULT_GRID)?;
    roots
        .into_iter()
        .map(|s| {
            let t = theta_at(s)?;
            let w = Wavenumbers::at(spec, t);
            Ok(ActiveMode {
                omega: t.omega,
                nu_hz: t.omega / (2.0 * PI),
                theta: t.theta,
                x_j: w.k_j * epsilon,
                x_i: w.k_i * epsilon,
            })
        })
        .collect()
}

/// Ground eigenfrequency of the compressed clamped disc.
pub fn active_ground(spec: &PlateSpec, epsilon: f64) -> Result<ActiveMode> {
    Ok(active_eigenfrequencies(spec, epsilon, 1)?[0])
}

/// Roots `x_l` of the complement Neumann quotient, ascending, on `(0, x_max]`.
pub fn complement_roots(x_max: f64) -> Result<Vec<f64>> {
    let grid = DEFAULT_GRID.max((32.0 * x_max) as usize);
    let residual = |x: f64| complement_quotient(x).unwrap_or(f64::NAN);
    let denominator = |x: f64| crate::specfun::bessel_j(0.0, x).map(|j| j.value).unwrap_or(f64::NAN);
    find_roots(&residual, Some(&denominator), 1e-3, x_max, usize::MAX, grid)
}

/// Eigenfrequencies (rad/s) of the complement disc of radius `a` up to
/// `omega_max`.
pub fn complement_eigenfrequencies(spec_c: &PlateSpec, a: f64, omega_max: f64) -> Result<Vec<f64>> {
    let x_max = complement_wavenumber(spec_c, omega_max) * a;
    let roots = complement_roots(x_max.max(4.0))?;
    Ok(roots.into_iter().map(|x| spec_c.omega_from_wavenumber(x / a)).collect())
}

/// Outcome of a tuning run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceReport {
    pub tuned_parameter: String,
    pub tuned_value: f64,
    pub target_nu_hz: f64,
    pub nu_eps_hz: Option<f64>,
    pub nu_c_hz: Option<f64>,
    /// `(ν_achieved - ν_target) / ν_target`.
    pub mismatch: f64,
    pub mode_l: usize,
    pub theta: Option<f64>,
    /// `π l / k` from the large-argument reduction `tan(ka - π/4) = -1`.
    pub asymptotic_outer_radius: Option<f64>,
    pub references: Vec<ReferenceCheck>,
}

fn check_band(nu0: f64) -> Result<()> {
    if !(nu0 >= NU_BAND.0 && nu0 <= NU_BAND.1) {
        return Err(Error::InvalidParameter(format!(
            "target frequency {nu0} Hz outside the validated band [{}, {}]",
            NU_BAND.0, NU_BAND.1
        )));
    }
    Ok(())
}

/// Outer radius `a` whose `l`-th Neumann eigenfrequency of the complement
/// equals `nu0`.
pub fn tune_outer_radius(spec_c: &PlateSpec, nu0: f64, mode_l: usize) -> Result<ResonanceReport> {
    check_band(nu0)?;
    if mode_l == 0 {
        return Err(Error::InvalidParameter("mode index l starts at 1".into()));
    }
    let omega0 = 2.0 * PI * nu0;
    let k = complement_wavenumber(spec_c, omega0);
    let (a_min, a_max) = OUTER_RADIUS_RANGE;
    let x_max = (PI * (mode_l as f64 + 1.0)).min(k * a_max);
    let roots = complement_roots(x_max).unwrap_or_default();
    let x_l = *roots.get(mode_l - 1).ok_or(Error::NoRoot { lo: a_min, hi: a_max })?;
    let a = x_l / k;
    if !(a >= a_min && a <= a_max) {
        return Err(Error::NoRoot { lo: a_min, hi: a_max });
    }
    let nu_c = spec_c.omega_from_wavenumber(x_l / a) / (2.0 * PI);
    Ok(ResonanceReport {
        tuned_parameter: "outer_radius".into(),
        tuned_value: a,
        target_nu_hz: nu0,
        nu_eps_hz: None,
        nu_c_hz: Some(nu_c),
        mismatch: (nu_c - nu0) / nu0,
        mode_l,
        theta: None,
        asymptotic_outer_radius: Some(PI * mode_l as f64 / k),
        references: Vec::new(),
    })
}

/// Compression `Q1` in `(0, 3e9]` that brings the ground frequency of the
/// active disc down to `nu0`.
pub fn tune_tension(spec: &PlateSpec, epsilon: f64, nu0: f64) -> Result<ResonanceReport> {
    check_band(nu0)?;
    let omega0 = 2.0 * PI * nu0;
    let q_max = DESTRUCTION_LIMIT_Q1.min(spec.buckling_q1(epsilon) * (1.0 - 1e-9));
    let gap = |q: f64| active_ground(&spec.with_tension(q), epsilon).map(|m| (m.omega - omega0) / omega0);
    let g0 = gap(0.0)?;
    if g0 < 0.0 {
        return Err(Error::Unreachable(format!(
            "target {nu0} Hz lies above the uncompressed ground frequency {} Hz",
            classical_ground_omega(spec, epsilon) / (2.0 * PI)
        )));
    }
    let g_max = gap(q_max)?;
    if g_max > 0.0 {
        return Err(Error::Unreachable(format!(
            "no resonance below destruction limit: lowest reachable ground frequency {} Hz at Q1 = {q_max:e}",
            nu0 * (1.0 + g_max)
        )));
    }
    let f = |q: f64| gap(q).unwrap_or(f64::NAN);
    let q = refine(
        &f,
        RootBracket {
            lo: 0.0,
            hi: q_max,
            f_lo: g0,
            f_hi: g_max,
        },
    );
    let tuned = spec.with_tension(q);
    let ground = active_ground(&tuned, epsilon)?;
    Ok(ResonanceReport {
        tuned_parameter: "tension_q1".into(),
        tuned_value: q,
        target_nu_hz: nu0,
        nu_eps_hz: Some(ground.nu_hz),
        nu_c_hz: None,
        mismatch: (ground.nu_hz - nu0) / nu0,
        mode_l: 1,
        theta: Some(ground.theta),
        asymptotic_outer_radius: None,
        references: Vec::new(),
    })
}

/// One row of a compression scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub q1: f64,
    pub nu_eps_hz: f64,
    pub nu_c_hz: f64,
    /// `(ν_ε - ν_c) / ((ν_ε + ν_c) / 2)`.
    pub mismatch: f64,
    pub flagged: bool,
    pub error: Option<String>,
}

/// Active eigenfrequency (tracked from the ground mode by nearest-neighbour
/// continuation) against the nearest complement eigenfrequency, for every
/// compression in `q1_grid`. Failures are reported per row.
pub fn resonance_scan(
    spec_eps: &PlateSpec,
    spec_c: &PlateSpec,
    geometry: &CircularGeometry,
    q1_grid: &[f64],
) -> Result<Vec<ScanRow>> {
    if q1_grid.is_empty() {
        return Err(Error::InvalidParameter("Q1 grid is empty".into()));
    }
    let branches: Vec<Result<Vec<ActiveMode>>> = q1_grid
        .par_iter()
        .map(|&q| active_eigenfrequencies(&spec_eps.with_tension(q), geometry.epsilon, 3))
        .collect();

    let mut tracked: Vec<Result<f64>> = Vec::with_capacity(q1_grid.len());
    let mut previous: Option<f64> = None;
    for branch in &branches {
        let pick = branch.as_ref().map_err(Clone::clone).map(|modes| match previous {
            None => modes[0].omega,
            Some(p) => modes
                .iter()
                .map(|m| m.omega)
                .min_by(|a, b| (a / p).ln().abs().total_cmp(&(b / p).ln().abs()))
                .unwrap_or(modes[0].omega),
        });
        if let Ok(w) = pick {
            previous = Some(w);
        }
        tracked.push(pick);
    }

    let omega_max = tracked
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .fold(0.0f64, |m, &w| m.max(w));
    let complement = if omega_max > 0.0 {
        Some(complement_eigenfrequencies(
            spec_c,
            geometry.outer_radius,
            2.0 * omega_max + 1e-300,
        ))
    } else {
        None
    };

    Ok(q1_grid
        .iter()
        .zip(tracked)
        .map(|(&q1, omega)| {
            let row = omega.and_then(|w| {
                let spectrum = complement.clone().unwrap_or(Err(Error::NoRoot { lo: 0.0, hi: 0.0 }))?;
                let nearest = spectrum
                    .iter()
                    .copied()
                    .min_by(|a, b| (a - w).abs().total_cmp(&(b - w).abs()))
                    .ok_or(Error::NoRoot { lo: 0.0, hi: omega_max })?;
                Ok((w, nearest))
            });
            match row {
                Ok((w, wc)) => {
                    let (nu_eps, nu_c) = (w / (2.0 * PI), wc / (2.0 * PI));
                    let mismatch = (nu_eps - nu_c) / (0.5 * (nu_eps + nu_c));
                    ScanRow {
                        q1,
                        nu_eps_hz: nu_eps,
                        nu_c_hz: nu_c,
                        mismatch,
                        flagged: mismatch.abs() < RESONANT_MISMATCH,
                        error: None,
                    }
                }
                Err(e) => ScanRow {
                    q1,
                    nu_eps_hz: f64::NAN,
                    nu_c_hz: f64::NAN,
                    mismatch: f64::NAN,
                    flagged: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect())
}
