//! A small oscillator `(m, v)` coupled through a vector `b` to `μ` large
//! oscillators `(M_s, V_s)`:
//!
//! ```text
//! m u''   + v u     + Σ b_s U_s = 0
//! M_s U_s'' + V_s U_s + b_s u     = 0
//! ```
//!
//! Normal modes solve `K x = λ diag(m, M) x`. Eliminating the large
//! components gives the secular equation
//! `f(λ) = mλ - v + Σ b_s² / (V_s - M_s λ) = 0`, strictly increasing between
//! its poles `V_s / M_s`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Relative distance below which two poles are treated as one.
pub const POLE_MERGE: f64 = 1e-12;
/// Largest mass-orthonormality defect accepted by [`solve_cauchy`].
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// Exact eigenvalues `λ±` of `[[λ_m, ε], [ε, λ_M]]`, `λ+ >= λ-`.
pub fn two_osc_exact_spectrum(lambda_m: f64, lambda_big: f64, eps: f64) -> (f64, f64) {
    if eps == 0.0 {
        return (lambda_m.max(lambda_big), lambda_m.min(lambda_big));
    }
    let mean = 0.5 * (lambda_m + lambda_big);
    let half = 0.5 * (lambda_m - lambda_big);
    let r = half.hypot(eps);
    (mean + r, mean - r)
}

/// Second-order perturbative eigenvalues with their error against the exact
/// pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxSpectrum {
    pub plus: f64,
    pub minus: f64,
    pub error_plus: f64,
    pub error_minus: f64,
    /// `2 ε⁴ / |δ|³`.
    pub error_bound: f64,
    /// Set when `ε > |δ| / 3`, where the expansion is not trustworthy.
    pub flagged: bool,
}

/// `λ_m + ε²/(2δ)` and `λ_M - ε²/(2δ)` with `δ = (λ_m - λ_M)/2`.
pub fn two_osc_approx_spectrum(lambda_m: f64, lambda_big: f64, eps: f64) -> ApproxSpectrum {
    let delta = 0.5 * (lambda_m - lambda_big);
    let (exact_plus, exact_minus) = two_osc_exact_spectrum(lambda_m, lambda_big, eps);
    let (a, b) = if eps == 0.0 {
        (lambda_m, lambda_big)
    } else {
        let shift = eps * eps / (2.0 * delta);
        (lambda_m + shift, lambda_big - shift)
    };
    let (plus, minus) = if a >= b { (a, b) } else { (b, a) };
    ApproxSpectrum {
        plus,
        minus,
        error_plus: plus - exact_plus,
        error_minus: minus - exact_minus,
        error_bound: 2.0 * eps.powi(4) / delta.abs().powi(3),
        flagged: eps.abs() > delta.abs() / 3.0 * (1.0 + 1e-12) || (delta == 0.0 && eps != 0.0),
    }
}

/// Eigenvectors of the two-oscillator problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoOscVectors {
    /// `(1, ε/2δ)` and `(-ε/2δ, 1)`; absent when `δ = 0`.
    pub perturbative: Option<[[f64; 2]; 2]>,
    /// Unit eigenvectors for `λ_m`'s and `λ_M`'s branches.
    pub exact: [[f64; 2]; 2],
    /// Rotation angle of the exact pair.
    pub exact_angle: f64,
    /// Rotation angle of the perturbative pair, `atan(ε / 2δ)`.
    pub perturbative_angle: Option<f64>,
}

pub fn two_osc_eigenvectors(lambda_m: f64, lambda_big: f64, eps: f64) -> TwoOscVectors {
    let delta = 0.5 * (lambda_m - lambda_big);
    let theta = 0.5 * (2.0 * eps).atan2(lambda_m - lambda_big);
    let (c, s) = (theta.cos(), theta.sin());
    let perturbative = (delta != 0.0).then(|| {
        let r = eps / (2.0 * delta);
        [[1.0, r], [-r, 1.0]]
    });
    TwoOscVectors {
        perturbative,
        exact: [[c, s], [-s, c]],
        exact_angle: theta,
        perturbative_angle: (delta != 0.0).then(|| (eps / (2.0 * delta)).atan()),
    }
}

/// One small oscillator coupled to `μ` large ones.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillatorSystem {
    pub mass_small: f64,
    pub stiffness_small: f64,
    pub masses_large: Vec<f64>,
    pub stiffnesses_large: Vec<f64>,
    pub coupling: Vec<f64>,
}

impl OscillatorSystem {
    pub fn new(
        mass_small: f64,
        stiffness_small: f64,
        masses_large: Vec<f64>,
        stiffnesses_large: Vec<f64>,
        coupling: Vec<f64>,
    ) -> Result<Self> {
        let sys = OscillatorSystem {
            mass_small,
            stiffness_small,
            masses_large,
            stiffnesses_large,
            coupling,
        };
        sys.validate()?;
        Ok(sys)
    }

    /// Two oscillators in the `(λ_m, λ_M, ε)` parametrization with
    /// `ε = b / √(mM)`.
    pub fn from_pair(mass_small: f64, lambda_m: f64, mass_large: f64, lambda_big: f64, eps: f64) -> Result<Self> {
        Self::new(
            mass_small,
            lambda_m * mass_small,
            vec![mass_large],
            vec![lambda_big * mass_large],
            vec![eps * (mass_small * mass_large).sqrt()],
        )
    }

    pub fn validate(&self) -> Result<()> {
        let mu = self.masses_large.len();
        if self.stiffnesses_large.len() != mu || self.coupling.len() != mu {
            return Err(Error::InvalidParameter(format!(
                "masses_large, stiffnesses_large and coupling must have equal length ({mu}, {}, {})",
                self.stiffnesses_large.len(),
                self.coupling.len()
            )));
        }
        let all = [self.mass_small, self.stiffness_small]
            .into_iter()
            .chain(self.masses_large.iter().copied())
            .chain(self.stiffnesses_large.iter().copied());
        for v in all {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "masses and stiffnesses must be positive, got {v}"
                )));
            }
        }
        if self.coupling.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidParameter("coupling must be finite".into()));
        }
        Ok(())
    }

    pub fn mu(&self) -> usize {
        self.masses_large.len()
    }

    /// `λ⁰ = v / m`.
    pub fn lambda_small(&self) -> f64 {
        self.stiffness_small / self.mass_small
    }

    /// `Λ⁰_s = V_s / M_s`.
    pub fn poles(&self) -> Vec<f64> {
        self.masses_large
            .iter()
            .zip(&self.stiffnesses_large)
            .map(|(m, v)| v / m)
            .collect()
    }

    /// Mass-weighted inner product `⟨x, diag(m, M) y⟩`.
    pub fn mass_inner(&self, x: &[f64], y: &[f64]) -> f64 {
        self.mass_small * x[0] * y[0]
            + self
                .masses_large
                .iter()
                .enumerate()
                .map(|(s, m)| m * x[s + 1] * y[s + 1])
                .sum::<f64>()
    }

    /// Total energy `(m u'² + v u² + Σ M U'² + V U² + 2 u b·U) / 2`.
    pub fn energies(&self, x: &[f64], v: &[f64]) -> Energies {
        let small = 0.5 * (self.mass_small * v[0] * v[0] + self.stiffness_small * x[0] * x[0]);
        let mut large = 0.0;
        let mut coupling = 0.0;
        for s in 0..self.mu() {
            large +=
                0.5 * (self.masses_large[s] * v[s + 1] * v[s + 1] + self.stiffnesses_large[s] * x[s + 1] * x[s + 1]);
            coupling += x[0] * self.coupling[s] * x[s + 1];
        }
        Energies {
            small,
            large,
            coupling,
            total: small + large + coupling,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Energies {
    pub small: f64,
    pub large: f64,
    pub coupling: f64,
    pub total: f64,
}

/// `mλ - v + Σ b_s² / (V_s - M_s λ)`.
pub fn secular_function(sys: &OscillatorSystem, lambda: f64) -> Result<f64> {
    let mut f = sys.mass_small * lambda - sys.stiffness_small;
    for s in 0..sys.mu() {
        let b = sys.coupling[s];
        if b == 0.0 {
            continue;
        }
        let den = sys.stiffnesses_large[s] - sys.masses_large[s] * lambda;
        if den.abs() <= POLE_MERGE * sys.stiffnesses_large[s] {
            return Err(Error::Pole(format!("lambda = {lambda} sits on the pole V_{s}/M_{s}")));
        }
        f += b * b / den;
    }
    Ok(f)
}

/// Eigenvalues and mass-orthonormal eigenvectors of the coupled system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbedSpectrum {
    pub system: OscillatorSystem,
    /// Ascending `λ^b_s`.
    pub eigenvalues: Vec<f64>,
    /// `ω^b_s = √λ^b_s`.
    pub frequencies: Vec<f64>,
    /// `Ψ_s = (a_s, X_1, ..., X_μ)` with `⟨Ψ_r, diag(m,M) Ψ_s⟩ = δ_rs`.
    pub vectors: Vec<Vec<f64>>,
    /// Small-oscillator components `a_s` (the normalization constants).
    pub normalization: Vec<f64>,
}

impl PerturbedSpectrum {
    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.vectors.len();
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for s in r..n {
                let g = self.system.mass_inner(&self.vectors[r], &self.vectors[s]);
                worst = worst.max((g - if r == s { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    }
}

struct PoleGroup {
    value: f64,
    members: Vec<usize>,
    weight: f64,
}

fn group_poles(sys: &OscillatorSystem) -> Vec<PoleGroup> {
    let poles = sys.poles();
    let mut order: Vec<usize> = (0..poles.len()).collect();
    order.sort_by(|&a, &b| poles[a].total_cmp(&poles[b]));
    let mut groups: Vec<PoleGroup> = Vec::new();
    for s in order {
        let w = sys.coupling[s] * sys.coupling[s] / sys.masses_large[s];
        match groups.last_mut() {
            Some(g) if (poles[s] - g.value).abs() <= POLE_MERGE * g.value => {
                g.members.push(s);
                g.weight += w;
            }
            _ => groups.push(PoleGroup {
                value: poles[s],
                members: vec![s],
                weight: w,
            }),
        }
    }
    groups
}

/// Orthonormal basis of the complement of `c` in `R^n` (Householder).
fn complement_basis(c: &[f64]) -> Vec<Vec<f64>> {
    let n = c.len();
    let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut u: Vec<f64> = c.iter().map(|x| x / norm).collect();
    // reflect e_0 onto u: H = I - 2 w w^T with w = (u - e_0)/|u - e_0|
    let sign = if u[0] >= 0.0 { 1.0 } else { -1.0 };
    u[0] += sign;
    let wn = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let w: Vec<f64> = u.iter().map(|x| x / wn).collect();
    (1..n)
        .map(|j| {
            (0..n)
                .map(|i| (if i == j { 1.0 } else { 0.0 }) - 2.0 * w[i] * w[j])
                .collect()
        })
        .collect()
}

/// A root of the grouped secular function represented relative to a
/// reference pole, `λ = pole + τ`, so that `λ - pole` is exact.
struct SecularRoot {
    origin: f64,
    tau: f64,
}

/// Solves `m(origin + τ) - v + Σ_g w_g / (d_g - τ) = 0` for `τ` in
/// `(lo, hi)` by bisection, where `d_g = p_g - origin` (precomputed).
fn bisect_shifted(m: f64, v: f64, origin: f64, diffs: &[(f64, f64)], mut lo: f64, mut hi: f64) -> f64 {
    let f = |tau: f64| {
        let mut acc = m * (origin + tau) - v;
        for &(d, w) in diffs {
            acc += w / (d - tau);
        }
        acc
    };
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Full spectrum via the secular equation on merged poles.
///
/// Poles with zero coupling weight and the multiplicity surplus of merged
/// poles are deflated: they keep their eigenvalue exactly, with eigenvectors
/// orthogonal to the coupling. The remaining roots are found by bisection in
/// a coordinate shifted to the nearest pole.
pub fn perturbed_spectrum(sys: &OscillatorSystem) -> Result<PerturbedSpectrum> {
    sys.validate()?;
    let mu = sys.mu();
    let (m, v) = (sys.mass_small, sys.stiffness_small);
    let groups = group_poles(sys);
    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(mu + 1);

    // deflated eigenpairs
    for g in &groups {
        let members: Vec<usize> = if g.weight == 0.0 {
            for &s in &g.members {
                let mut x = vec![0.0; mu + 1];
                x[s + 1] = 1.0 / sys.masses_large[s].sqrt();
                pairs.push((g.value, x));
            }
            continue;
        } else {
            g.members.clone()
        };
        if members.len() > 1 {
            let c: Vec<f64> = members
                .iter()
                .map(|&s| sys.coupling[s] / sys.masses_large[s].sqrt())
                .collect();
            for y in complement_basis(&c) {
                let mut x = vec![0.0; mu + 1];
                for (k, &s) in members.iter().enumerate() {
                    x[s + 1] = y[k] / sys.masses_large[s].sqrt();
                }
                pairs.push((g.value, x));
            }
        }
    }

    // secular roots
    let active: Vec<&PoleGroup> = groups.iter().filter(|g| g.weight > 0.0).collect();
    let radius: f64 = (0..mu)
        .map(|s| sys.coupling[s].abs() / (m * sys.masses_large[s]).sqrt())
        .sum::<f64>();
    let lam0 = v / m;
    let mut roots: Vec<SecularRoot> = Vec::with_capacity(active.len() + 1);
    if active.is_empty() {
        roots.push(SecularRoot { origin: lam0, tau: 0.0 });
    } else {
        let k = active.len();
        let lower = active[0].value.min(lam0) - radius - 1.0 * f64::EPSILON * lam0.abs();
        let upper = active[k - 1].value.max(lam0) + radius + f64::EPSILON * lam0.abs();
        for j in 0..=k {
            let left = if j == 0 { None } else { Some(active[j - 1].value) };
            let right = if j == k { None } else { Some(active[j].value) };
            // choose the reference pole nearest the root
            let origin = match (left, right) {
                (None, Some(r)) => r,
                (Some(l), None) => l,
                (Some(l), Some(r)) => {
                    let mid = 0.5 * (l + r);
                    let mut f = m * mid - v;
                    for g in &active {
                        f += g.weight / (g.value - mid);
                    }
                    if f > 0.0 {
                        l
                    } else {
                        r
                    }
                }
                (None, None) => unreachable!(),
            };
            let diffs: Vec<(f64, f64)> = active.iter().map(|g| (g.value - origin, g.weight)).collect();
            let lo = left.map_or(lower - origin, |l| l - origin);
            let hi = right.map_or(upper - origin, |r| r - origin);
            let tau = bisect_shifted(m, v, origin, &diffs, lo, hi);
            roots.push(SecularRoot { origin, tau });
        }
    }

    for root in roots {
        let lambda = root.origin + root.tau;
        let mut x = vec![0.0; mu + 1];
        x[0] = 1.0;
        for s in 0..mu {
            let b = sys.coupling[s];
            if b != 0.0 {
                let gap = (sys.poles()[s] - root.origin) - root.tau;
                // X_s = b_s a / (M_s (λ - Λ_s))
                x[s + 1] = -b / (sys.masses_large[s] * gap);
            }
        }
        let norm = sys.mass_inner(&x, &x).sqrt();
        x.iter_mut().for_each(|c| *c /= norm);
        pairs.push((lambda, x));
    }

    if pairs.len() != mu + 1 {
        return Err(Error::InvalidParameter(format!(
            "internal: found {} eigenpairs for {} oscillators",
            pairs.len(),
            mu + 1
        )));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some((lambda, _)) = pairs.iter().find(|(l, _)| *l <= 0.0) {
        return Err(Error::NotPositiveDefinite(*lambda));
    }
    let eigenvalues: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let vectors: Vec<Vec<f64>> = pairs.into_iter().map(|p| p.1).collect();
    Ok(PerturbedSpectrum {
        system: sys.clone(),
        frequencies: eigenvalues.iter().map(|l| l.sqrt()).collect(),
        normalization: vectors.iter().map(|x| x[0]).collect(),
        eigenvalues,
        vectors,
    })
}

/// First-order perturbed eigenvalues `λ⁰ ± b² / (2 m₁ m₂ δλ)` of a single
/// detuned pair, `δλ = λ⁰_small - Λ⁰`.
pub fn first_order_pair(sys: &OscillatorSystem) -> Result<(f64, f64)> {
    if sys.mu() != 1 {
        return Err(Error::InvalidParameter(
            "first-order pair needs exactly one large oscillator".into(),
        ));
    }
    let (l1, l2) = (sys.lambda_small(), sys.poles()[0]);
    let dl = l1 - l2;
    let shift = sys.coupling[0].powi(2) / (2.0 * sys.mass_small * sys.masses_large[0] * dl);
    Ok((l1 + shift, l2 - shift))
}

/// Initial displacements and velocities `(u, U_1..U_μ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialState {
    pub displacement: Vec<f64>,
    pub velocity: Vec<f64>,
}

impl InitialState {
    /// All energy `e0` on the small oscillator, at rest at maximal
    /// displacement.
    pub fn small_excited(sys: &OscillatorSystem, e0: f64) -> Self {
        let mut displacement = vec![0.0; sys.mu() + 1];
        displacement[0] = (2.0 * e0 / sys.stiffness_small).sqrt();
        InitialState {
            displacement,
            velocity: vec![0.0; sys.mu() + 1],
        }
    }
}

/// Modal solution `x(t) = Σ_s U^s Ψ_s cos(ω_s t + φ_s)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CauchySolution {
    pub spectrum: PerturbedSpectrum,
    pub amplitudes: Vec<f64>,
    /// Phases in `[0, 2π)`.
    pub phases: Vec<f64>,
    pub initial: InitialState,
}

/// Mass-weighted projection of the initial data on the normal modes.
pub fn solve_cauchy(spectrum: &PerturbedSpectrum, initial: &InitialState) -> Result<CauchySolution> {
    let n = spectrum.vectors.len();
    if initial.displacement.len() != n || initial.velocity.len() != n {
        return Err(Error::InvalidParameter(format!(
            "initial state must have {n} components"
        )));
    }
    let defect = spectrum.orthonormality_defect();
    if !(defect <= ORTHONORMALITY_TOL) {
        return Err(Error::NonOrthonormal(defect));
    }
    let sys = &spectrum.system;
    let mut amplitudes = Vec::with_capacity(n);
    let mut phases = Vec::with_capacity(n);
    for (psi, &w) in spectrum.vectors.iter().zip(&spectrum.frequencies) {
        let c = sys.mass_inner(psi, &initial.displacement);
        let d = sys.mass_inner(psi, &initial.velocity);
        let s = -d / w;
        amplitudes.push(c.hypot(s));
        phases.push(s.atan2(c).rem_euclid(2.0 * PI));
    }
    Ok(CauchySolution {
        spectrum: spectrum.clone(),
        amplitudes,
        phases,
        initial: initial.clone(),
    })
}

/// Complex characteristic of the small oscillator and its energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XiSample {
    pub t: f64,
    pub xi: Complex64,
    /// `|ξ|² / 2`.
    pub energy: f64,
}

impl CauchySolution {
    /// Displacements and velocities at time `t`.
    pub fn state(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.amplitudes.len();
        let mut x = vec![0.0; n];
        let mut v = vec![0.0; n];
        for s in 0..n {
            let w = self.spectrum.frequencies[s];
            let phase = w * t + self.phases[s];
            let (c, d) = (self.amplitudes[s] * phase.cos(), -self.amplitudes[s] * w * phase.sin());
            for (i, psi) in self.spectrum.vectors[s].iter().enumerate() {
                x[i] += c * psi;
                v[i] += d * psi;
            }
        }
        (x, v)
    }

    pub fn energies(&self, t: f64) -> Energies {
        let (x, v) = self.state(t);
        self.spectrum.system.energies(&x, &v)
    }

    /// `F_s = U^s ⟨b, X^{(s)}⟩`: amplitude of mode `s` in the coupling force
    /// `b·U(t)` felt by the small oscillator.
    pub fn drive_amplitudes(&self) -> Vec<f64> {
        let sys = &self.spectrum.system;
        self.spectrum
            .vectors
            .iter()
            .zip(&self.amplitudes)
            .map(|(psi, amp)| amp * (0..sys.mu()).map(|s| sys.coupling[s] * psi[s + 1]).sum::<f64>())
            .collect()
    }
}

/// `ξ = √m u' + i √v u` of the modal solution at `t`.
pub fn xi_characteristic(solution: &CauchySolution, t: f64) -> XiSample {
    let sys = &solution.spectrum.system;
    let (x, v) = solution.state(t);
    let xi = Complex64::new(sys.mass_small.sqrt() * v[0], sys.stiffness_small.sqrt() * x[0]);
    XiSample {
        t,
        xi,
        energy: 0.5 * xi.norm_sqr(),
    }
}

/// `sin(z)/z` with the removable singularity filled.
fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 - z * z / 6.0
    } else {
        z.sin() / z
    }
}

/// Closed form of `ξ(t) = e^{iω⁰t} [ξ(0) + ξ̂(t)]` for the small oscillator
/// driven by `f(t) = b·U(t) = Σ_s F_s cos(ω_s t + φ_s)`:
///
/// ```text
/// ξ̂(t) = -(1/√m) Σ_s (F_s/2) t [ e^{iφ_s} e^{iα_s t/2} sinc(α_s t/2)
///                               + e^{-iφ_s} e^{-iβ_s t/2} sinc(β_s t/2) ]
/// ```
///
/// with resonant `α_s = ω_s - ω⁰` and anti-resonant `β_s = ω_s + ω⁰`.
pub fn xi_analytic(solution: &CauchySolution, t: f64) -> Complex64 {
    let sys = &solution.spectrum.system;
    let omega0 = sys.lambda_small().sqrt();
    let sqrt_m = sys.mass_small.sqrt();
    let x0 = &solution.initial.displacement;
    let v0 = &solution.initial.velocity;
    let xi0 = Complex64::new(sqrt_m * v0[0], sys.stiffness_small.sqrt() * x0[0]);
    let forces = solution.drive_amplitudes();
    let mut hat = Complex64::new(0.0, 0.0);
    for (s, f) in forces.iter().enumerate() {
        let (w, phi) = (solution.spectrum.frequencies[s], solution.phases[s]);
        let alpha = w - omega0;
        let beta = w + omega0;
        let resonant = Complex64::from_polar(t * sinc(0.5 * alpha * t), phi + 0.5 * alpha * t);
        let anti = Complex64::from_polar(t * sinc(0.5 * beta * t), -phi - 0.5 * beta * t);
        hat -= (resonant + anti) * (0.5 * f / sqrt_m);
    }
    Complex64::from_polar(1.0, omega0 * t) * (xi0 + hat)
}

/// Uniformly sampled real series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledSeries {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

impl SampledSeries {
    pub fn t_end(&self) -> f64 {
        self.t0 + self.dt * (self.values.len().saturating_sub(1)) as f64
    }

    fn at(&self, t: f64) -> f64 {
        let pos = ((t - self.t0) / self.dt).clamp(0.0, (self.values.len() - 1) as f64);
        let i = (pos.floor() as usize).min(self.values.len() - 2);
        let frac = pos - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }
}

/// Minimum samples inside an averaging window.
pub const MIN_WINDOW_SAMPLES: usize = 16;

/// `(1/Δ) ∫_{T-Δ/2}^{T+Δ/2} s(t) dt` by the trapezoid rule, with linear
/// interpolation at the window edges.
pub fn windowed_average(series: &SampledSeries, center: f64, width: f64) -> Result<f64> {
    if !(width > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "window width must be positive, got {width}"
        )));
    }
    if series.values.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: series.values.len(),
        });
    }
    let (start, end) = (center - 0.5 * width, center + 0.5 * width);
    let tol = 1e-9 * series.dt;
    if start < series.t0 - tol || end > series.t_end() + tol {
        return Err(Error::WindowOutOfRange {
            start,
            end,
            min: series.t0,
            max: series.t_end(),
        });
    }
    let (start, end) = (start.max(series.t0), end.min(series.t_end()));
    let first = ((start - series.t0) / series.dt).ceil() as usize;
    let last = (((end - series.t0) / series.dt).floor() as usize).min(series.values.len() - 1);
    let inside = if last >= first { last - first + 1 } else { 0 };
    if inside < MIN_WINDOW_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_WINDOW_SAMPLES,
            got: inside,
        });
    }
    let time = |i: usize| series.t0 + i as f64 * series.dt;
    let mut acc = 0.5 * (series.at(start) + series.values[first]) * (time(first) - start);
    for i in first..last {
        acc += 0.5 * (series.values[i] + series.values[i + 1]) * series.dt;
    }
    acc += 0.5 * (series.values[last] + series.at(end)) * (end - time(last));
    Ok(acc / width)
}

/// Windowed averages at centres `start, start + stride, ...` whose windows
/// fit inside the series.
pub fn windowed_series(series: &SampledSeries, width: f64, stride: f64) -> Result<Vec<(f64, f64)>> {
    if !(stride > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "stride must be positive, got {stride}"
        )));
    }
    let first = series.t0 + 0.5 * width;
    let count = ((series.t_end() - 0.5 * width - first) / stride + 1e-9).floor();
    if count < 0.0 {
        return Err(Error::WindowOutOfRange {
            start: series.t0,
            end: series.t0 + width,
            min: series.t0,
            max: series.t_end(),
        });
    }
    (0..=count as usize)
        .into_par_iter()
        .map(|i| {
            let c = first + i as f64 * stride;
            windowed_average(series, c, width).map(|a| (c, a))
        })
        .collect()
}

/// `(max - min) / (max + min)` of a non-negative series.
pub fn envelope_contrast(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if max + min == 0.0 {
        0.0
    } else {
        (max - min) / (max + min)
    }
}

/// Unperturbed data of a single resonant pair.
struct PairData {
    m1: f64,
    m2: f64,
    b: f64,
    lambda1: f64,
    omega1: f64,
    omega2: f64,
}

fn pair(sys: &OscillatorSystem) -> Result<PairData> {
    if sys.mu() != 1 {
        return Err(Error::InvalidParameter(
            "a single large oscillator (mu = 1) is required".into(),
        ));
    }
    let lambda1 = sys.lambda_small();
    Ok(PairData {
        m1: sys.mass_small,
        m2: sys.masses_large[0],
        b: sys.coupling[0],
        lambda1,
        omega1: lambda1.sqrt(),
        omega2: sys.poles()[0].sqrt(),
    })
}

/// The window that balances slow drift against fast leakage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalWindow {
    pub delta_star: f64,
    /// `b² Δ* / (4 m₁ m₂ ω⁰₁)`: drift bound multiplied by `δλ`.
    pub drift: f64,
    /// `(δλ / δω) / Δ*`: leakage bound multiplied by `δλ`.
    pub leakage: f64,
}

/// `Δ* = √(4 m₁ m₂ δλ ω⁰₁ / (b² δω))`.
///
/// `δλ / δω = ω⁰₁ + ω⁰₂` exactly, which keeps `Δ*` finite at exact tuning.
pub fn optimal_window(sys: &OscillatorSystem) -> Result<OptimalWindow> {
    let p = pair(sys)?;
    if p.b == 0.0 {
        return Err(Error::InvalidParameter(
            "zero coupling: optimal window undefined".into(),
        ));
    }
    let ratio = p.omega1 + p.omega2;
    let delta_star = (4.0 * p.m1 * p.m2 * ratio * p.omega1).sqrt() / p.b.abs();
    Ok(OptimalWindow {
        delta_star,
        drift: p.b * p.b * delta_star / (4.0 * p.m1 * p.m2 * p.omega1),
        leakage: ratio / delta_star,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AveragedEstimate {
    pub value: f64,
    /// Envelope period `4π m₁ m₂ δλ ω⁰₁ / b²`.
    pub envelope_period: f64,
    /// Set outside `b² <= δλ² m₁ m₂ / 25`.
    pub flagged: bool,
}

/// `|F|² [2 m₂ |δλ| λ⁰₁ / b² + sin²(κ t) / κ²]`, `κ = b² / (4 m₁ m₂ δλ ω⁰₁)`,
/// where `F = b⁺ΨU` is the drive amplitude. The offset uses `|δλ|` so the
/// estimate stays non-negative when the small oscillator is the lower one.
pub fn averaged_energy_estimate(sys: &OscillatorSystem, drive: f64, t: f64) -> Result<AveragedEstimate> {
    let p = pair(sys)?;
    let dl = p.lambda1 - sys.poles()[0];
    let b2 = p.b * p.b;
    let flagged = dl == 0.0 || b2 > dl * dl * p.m1 * p.m2 / 25.0;
    if b2 == 0.0 || dl == 0.0 {
        return Ok(AveragedEstimate {
            value: 0.0,
            envelope_period: f64::INFINITY,
            flagged: true,
        });
    }
    let kappa = b2 / (4.0 * p.m1 * p.m2 * dl * p.omega1);
    let value = drive * drive * (2.0 * p.m2 * dl.abs() * p.lambda1 / b2 + (kappa * t).sin().powi(2) / (kappa * kappa));
    Ok(AveragedEstimate {
        value,
        envelope_period: PI / kappa.abs(),
        flagged,
    })
}

/// Energy bookkeeping sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergySeries {
    pub t: Vec<f64>,
    pub e_small: Vec<f64>,
    pub e_large: Vec<f64>,
    pub e_total: Vec<f64>,
    pub xi: Vec<Complex64>,
}

/// Samples `n` points on `[0, t_end]`, evaluated in parallel and assembled
/// in time order.
pub fn energy_series(solution: &CauchySolution, t_end: f64, n: usize) -> Result<EnergySeries> {
    if n < 2 || !(t_end > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need n >= 2 samples over a positive horizon, got {n}, {t_end}"
        )));
    }
    let dt = t_end / (n - 1) as f64;
    let rows: Vec<(f64, Energies, Complex64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 * dt;
            (t, solution.energies(t), xi_characteristic(solution, t).xi)
        })
        .collect();
    Ok(EnergySeries {
        t: rows.iter().map(|r| r.0).collect(),
        e_small: rows.iter().map(|r| r.1.small).collect(),
        e_large: rows.iter().map(|r| r.1.large).collect(),
        e_total: rows.iter().map(|r| r.1.total).collect(),
        xi: rows.iter().map(|r| r.2).collect(),
    })
}

/// Shortest beat period `2π / min |ω_r - ω_s|` between distinct normal
/// modes that are both excited.
pub fn beat_period(spectrum: &PerturbedSpectrum) -> f64 {
    let w = &spectrum.frequencies;
    let mut gap = f64::INFINITY;
    for i in 1..w.len() {
        let d = w[i] - w[i - 1];
        if d > 0.0 {
            gap = gap.min(d);
        }
    }
    2.0 * PI / gap
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Transfer {
    /// `(max_t E_large(t) - E_large(0)) / E_total`.
    pub k: f64,
    pub beat_period: f64,
    pub horizon: f64,
}

/// Fraction of the energy, placed initially on the small oscillator, that
/// reaches the large oscillators over `horizon` (default three beat
/// periods).
pub fn transfer_coefficient(sys: &OscillatorSystem, e0: f64, horizon: Option<f64>) -> Result<Transfer> {
    if !(e0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "initial energy must be positive, got {e0}"
        )));
    }
    if sys.coupling.iter().all(|&b| b == 0.0) {
        return Ok(Transfer {
            k: 0.0,
            beat_period: f64::INFINITY,
            horizon: horizon.unwrap_or(0.0),
        });
    }
    let spectrum = perturbed_spectrum(sys)?;
    let beat = beat_period(&spectrum);
    let horizon = horizon.unwrap_or(3.0 * beat);
    if horizon < beat {
        return Err(Error::HorizonTooShort {
            horizon,
            required: beat,
        });
    }
    let solution = solve_cauchy(&spectrum, &InitialState::small_excited(sys, e0))?;
    let fast = 2.0 * PI / spectrum.frequencies.last().copied().unwrap_or(1.0);
    let n = ((40.0 * horizon / fast).ceil() as usize).clamp(2000, 4_000_000);
    let dt = horizon / n as f64;
    let large = |t: f64| solution.energies(t).large;
    let (best_i, _) = (0..=n).into_par_iter().map(|i| (i, large(i as f64 * dt))).reduce(
        || (0, f64::NEG_INFINITY),
        |a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a },
    );
    // golden-section polish around the best sample
    let (mut a, mut b) = (
        ((best_i as f64) - 1.0).max(0.0) * dt,
        ((best_i as f64) + 1.0).min(n as f64) * dt,
    );
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if large(c) >= large(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let peak = large(0.5 * (a + b)).max(large(best_i as f64 * dt));
    let e_total = solution.energies(0.0).total;
    Ok(Transfer {
        k: (peak - large(0.0)) / e_total,
        beat_period: beat,
        horizon,
    })
}

/// `k` over relative detunings `d` of the large stiffness,
/// `V = M λ⁰ (1 + d)`, for a single pair.
pub fn transfer_sweep(sys: &OscillatorSystem, e0: f64, detunings: &[f64]) -> Result<Vec<(f64, f64)>> {
    pair(sys)?;
    detunings
        .par_iter()
        .map(|&d| {
            let mut s = sys.clone();
            s.stiffnesses_large[0] = s.masses_large[0] * s.lambda_small() * (1.0 + d);
            transfer_coefficient(&s, e0, None).map(|t| (d, t.k))
        })
        .collect()
}
