//! Compressed Kirchhoff plate: parameters, the `Theta` parametrization of the
//! factorized biharmonic operator, clamped radial and sectorial modes,
//! dispersion residuals, boundary residuals, stability and energies.
//!
//! The equation of motion of a plate of thickness `H` under in-plane
//! compression `Q1` (per unit thickness) is
//!
//! ```text
//! D Δ²u + Q1 H Δu + ρ H u_tt = 0,      D = D1 H³,  D1 = E / (12 (1 - σ²))
//! ```
//!
//! For harmonic motion at `ω` it factorizes into two Helmholtz operators with
//! wavenumbers `k_J = K e^{Θ/2}` (oscillating, `J_p`) and `k_I = K e^{-Θ/2}`
//! (growing, `I_p`), where `K⁴ = ω²ρ / (H² D1)` and
//! `sinh Θ = Q1 / (2 ω H √(D1 ρ))`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{bessel_i_scaled, bessel_j};

/// Largest compression the plate material sustains without destruction
/// (kg m⁻¹ s⁻²).
pub const DESTRUCTION_LIMIT_Q1: f64 = 3e9;

/// First positive zero of `J_1`; clamped-disc buckling happens at
/// `ε √(Q1/D1) / H` equal to this value.
pub const J1_FIRST_ZERO: f64 = 3.831_705_970_207_512;

/// Denominators closer to zero than this are treated as poles.
pub const POLE_EPS: f64 = 1e-12;

/// Physical parameters of a Kirchhoff plate in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateSpec {
    /// Young modulus `E` (kg m⁻¹ s⁻²).
    pub young_modulus: f64,
    /// Poisson ratio `σ`.
    pub poisson: f64,
    /// Density `ρ` (kg m⁻³).
    pub density: f64,
    /// Thickness `H` (m).
    pub thickness: f64,
    /// Compression magnitude `Q1` per unit thickness (kg m⁻¹ s⁻²).
    pub tension_q1: f64,
}

impl PlateSpec {
    pub fn new(young_modulus: f64, poisson: f64, density: f64, thickness: f64, tension_q1: f64) -> Result<Self> {
        let spec = PlateSpec {
            young_modulus,
            poisson,
            density,
            thickness,
            tension_q1,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        positive("young_modulus", self.young_modulus)?;
        positive("density", self.density)?;
        positive("thickness", self.thickness)?;
        if !(self.poisson > 0.0 && self.poisson < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "poisson must lie in (0, 1), got {}",
                self.poisson
            )));
        }
        if !(self.tension_q1 >= 0.0 && self.tension_q1.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tension_q1 must be >= 0, got {}",
                self.tension_q1
            )));
        }
        Ok(())
    }

    pub fn with_tension(&self, tension_q1: f64) -> Self {
        PlateSpec { tension_q1, ..*self }
    }

    /// `D1 = E / (12 (1 - σ²))`.
    pub fn d1(&self) -> f64 {
        self.young_modulus / (12.0 * (1.0 - self.poisson * self.poisson))
    }

    /// Flexural rigidity `D = D1 H³`.
    pub fn rigidity(&self) -> f64 {
        self.d1() * self.thickness.powi(3)
    }

    /// Total in-plane force `Q = Q1 H`.
    pub fn q(&self) -> f64 {
        self.tension_q1 * self.thickness
    }

    /// `K = [ω²ρ / (H² D1)]^{1/4}`, the wavenumber of the uncompressed plate.
    pub fn base_wavenumber(&self, omega: f64) -> f64 {
        (omega * omega * self.density / (self.thickness * self.thickness * self.d1())).powf(0.25)
    }

    /// Inverse of [`PlateSpec::base_wavenumber`].
    pub fn omega_from_wavenumber(&self, k: f64) -> f64 {
        k * k * self.thickness * (self.d1() / self.density).sqrt()
    }

    /// Compression at which a clamped disc of radius `epsilon` buckles.
    pub fn buckling_q1(&self, epsilon: f64) -> f64 {
        let x = J1_FIRST_ZERO * self.thickness / epsilon;
        x * x * self.d1()
    }
}

/// The auxiliary spectral parameter: `sinh Θ = Q1 / (2 ω H √(D1 ρ))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaParam {
    pub theta: f64,
    /// Angular frequency (rad/s).
    pub omega: f64,
}

impl ThetaParam {
    /// Θ implied by the plate compression at frequency `omega`.
    pub fn from_omega(spec: &PlateSpec, omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
        }
        Ok(ThetaParam {
            theta: sinh_theta(spec, omega).asinh(),
            omega,
        })
    }

    /// Frequency at which the plate compression produces `theta`.
    pub fn from_theta(spec: &PlateSpec, theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) || spec.tension_q1 <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Theta = {theta} determines omega only for theta > 0 and Q1 > 0"
            )));
        }
        let omega = spec.tension_q1 / (2.0 * theta.sinh() * spec.thickness * (spec.d1() * spec.density).sqrt());
        Ok(ThetaParam { theta, omega })
    }

    /// A free pair, for evaluating at a prescribed `Θ` that is not tied to
    /// the plate compression.
    pub fn prescribed(theta: f64, omega: f64) -> Self {
        ThetaParam { theta, omega }
    }
}

/// `Q1 / (2 ω H √(D1 ρ))`.
pub fn sinh_theta(spec: &PlateSpec, omega: f64) -> f64 {
    spec.tension_q1 / (2.0 * omega * spec.thickness * (spec.d1() * spec.density).sqrt())
}

/// Active disc of radius `epsilon` inside the plate of outer radius
/// `outer_radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircularGeometry {
    pub epsilon: f64,
    pub outer_radius: f64,
}

impl CircularGeometry {
    pub fn new(epsilon: f64, outer_radius: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < outer_radius && outer_radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < epsilon < outer_radius, got {epsilon}, {outer_radius}"
            )));
        }
        Ok(CircularGeometry { epsilon, outer_radius })
    }

    pub fn active_area(&self) -> f64 {
        PI * self.epsilon * self.epsilon
    }

    pub fn complement_area(&self) -> f64 {
        PI * (self.outer_radius * self.outer_radius - self.epsilon * self.epsilon)
    }
}

/// Elastic bond `β` on a boundary with curvature radius `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryBond {
    /// Bond stiffness (kg m s⁻²); `f64::INFINITY` selects the clamped
    /// (Neumann) convention.
    pub beta: f64,
    pub curvature_radius: f64,
}

impl BoundaryBond {
    /// `β - D (1 - σ) / r`.
    pub fn effective(&self, spec: &PlateSpec) -> f64 {
        self.beta - spec.rigidity() * (1.0 - spec.poisson) / self.curvature_radius
    }
}

/// Radial wavenumbers of the factorized operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wavenumbers {
    pub k_j: f64,
    pub k_i: f64,
}

impl Wavenumbers {
    pub fn at(spec: &PlateSpec, theta: ThetaParam) -> Self {
        let base = spec.base_wavenumber(theta.omega);
        let half = (0.5 * theta.theta).exp();
        Wavenumbers {
            k_j: base * half,
            k_i: base / half,
        }
    }
}

/// `(k_J, k_I)` for the plate compression at frequency `omega`.
pub fn factorization_wavenumbers(spec: &PlateSpec, omega: f64) -> Result<Wavenumbers> {
    Ok(Wavenumbers::at(spec, ThetaParam::from_omega(spec, omega)?))
}

/// Angular dependence of a mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    /// No angular factor.
    Radial,
    Sin,
    Cos,
}

/// Clamped mode `J_p(k_J r)/J_p(k_J ε) - I_p(k_I r)/I_p(k_I ε)` on the disc
/// `r <= ε`, optionally times `sin pφ` or `cos pφ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialMode {
    pub order: f64,
    pub wavenumbers: Wavenumbers,
    pub epsilon: f64,
    pub parity: Parity,
    j_edge: f64,
    i_edge_scaled: f64,
}

impl RadialMode {
    pub fn new(spec: &PlateSpec, epsilon: f64, order: f64, theta: ThetaParam, parity: Parity) -> Result<Self> {
        let wavenumbers = Wavenumbers::at(spec, theta);
        Self::from_wavenumbers(wavenumbers, epsilon, order, parity)
    }

    pub fn from_wavenumbers(wavenumbers: Wavenumbers, epsilon: f64, order: f64, parity: Parity) -> Result<Self> {
        let j_edge = bessel_j(order, wavenumbers.k_j * epsilon)?.value;
        if j_edge.abs() < POLE_EPS {
            return Err(Error::Pole(format!(
                "J_{order}(k_J eps) = {j_edge:e}; perturb Theta to normalize the mode"
            )));
        }
        let i_edge_scaled = bessel_i_scaled(order, wavenumbers.k_i * epsilon)?.value;
        Ok(RadialMode {
            order,
            wavenumbers,
            epsilon,
            parity,
            j_edge,
            i_edge_scaled,
        })
    }

    /// Radial factor and its `r`-derivative.
    pub fn radial(&self, r: f64) -> Result<(f64, f64)> {
        if !(r >= 0.0 && r <= self.epsilon * (1.0 + 1e-12)) {
            return Err(Error::Domain(format!("r = {r} outside [0, {}]", self.epsilon)));
        }
        let Wavenumbers { k_j, k_i } = self.wavenumbers;
        let j = bessel_j(self.order, k_j * r)?;
        let i = bessel_i_scaled(self.order, k_i * r)?;
        // I_p(k_I r) / I_p(k_I ε) with the exponential factors cancelled
        let growth = (k_i * (r - self.epsilon)).exp() / self.i_edge_scaled;
        let value = j.value / self.j_edge - i.value * growth;
        let slope = k_j * j.derivative / self.j_edge - k_i * i.derivative * growth;
        Ok((value, slope))
    }

    /// Mode value at polar point `(r, φ)`.
    pub fn value(&self, r: f64, phi: f64) -> Result<f64> {
        let (radial, _) = self.radial(r)?;
        Ok(match self.parity {
            Parity::Radial => radial,
            Parity::Sin => radial * (self.order * phi).sin(),
            Parity::Cos => radial * (self.order * phi).cos(),
        })
    }

    /// Samples of the radial factor on `n` uniform points from 0 to `ε`.
    pub fn sample(&self, n: usize) -> Result<RadialSamples> {
        if n < 2 {
            return Err(Error::InsufficientSamples { needed: 2, got: n });
        }
        let step = self.epsilon / (n - 1) as f64;
        let values = (0..n)
            .map(|i| self.radial((i as f64 * step).min(self.epsilon)).map(|v| v.0))
            .collect::<Result<Vec<_>>>()?;
        Ok(RadialSamples { step, values })
    }
}

/// `Ψ_ε(r)` of the centrally symmetric clamped mode.
pub fn radial_mode(spec: &PlateSpec, geometry: &CircularGeometry, theta: ThetaParam, r: f64) -> Result<f64> {
    RadialMode::new(spec, geometry.epsilon, 0.0, theta, Parity::Radial)?.value(r, 0.0)
}

/// Sectorial mode of order `p` on the sector `0 <= φ <= π/p`.
pub fn sectorial_mode(
    spec: &PlateSpec,
    geometry: &CircularGeometry,
    p: f64,
    theta: ThetaParam,
    parity: Parity,
    r: f64,
    phi: f64,
) -> Result<f64> {
    if p > 0.0 && !(phi >= 0.0 && phi <= PI / p * (1.0 + 1e-12)) {
        return Err(Error::Domain(format!("phi = {phi} outside [0, pi/{p}]")));
    }
    RadialMode::new(spec, geometry.epsilon, p, theta, parity)?.value(r, phi)
}

/// `x J_p'(x)/J_p(x) - y I_p'(y)/I_p(y)` with `x = k_J ε`, `y = k_I ε`:
/// zero exactly when the clamped mode also has zero slope at `r = ε`.
pub fn clamped_quotient(p: f64, x: f64, y: f64) -> Result<f64> {
    let j = bessel_j(p, x)?;
    if j.value.abs() < POLE_EPS {
        return Err(Error::Pole(format!("J_{p}({x}) vanishes")));
    }
    let i = bessel_i_scaled(p, y)?;
    let i_term = if y == 0.0 { 0.0 } else { y * i.derivative / i.value };
    Ok(x * j.derivative / j.value - i_term)
}

/// Dispersion residual of the compressed clamped disc, scaled by `ε`.
pub fn dispersion_residual_active(spec: &PlateSpec, geometry: &CircularGeometry, theta: ThetaParam) -> Result<f64> {
    dispersion_residual_sectorial(spec, geometry, 0.0, theta)
}

/// Dispersion residual for the order-`p` sectorial modes.
pub fn dispersion_residual_sectorial(
    spec: &PlateSpec,
    geometry: &CircularGeometry,
    p: f64,
    theta: ThetaParam,
) -> Result<f64> {
    let w = Wavenumbers::at(spec, theta);
    clamped_quotient(p, w.k_j * geometry.epsilon, w.k_i * geometry.epsilon)
}

/// `J_0(k_J ε)`, the denominator whose zeros are poles of the active
/// residual.
pub fn active_denominator(spec: &PlateSpec, geometry: &CircularGeometry, theta: ThetaParam) -> f64 {
    let w = Wavenumbers::at(spec, theta);
    bessel_j(0.0, w.k_j * geometry.epsilon)
        .map(|j| j.value)
        .unwrap_or(f64::NAN)
}

/// Wavenumber of the uncompressed complement at `omega`.
pub fn complement_wavenumber(spec_c: &PlateSpec, omega: f64) -> f64 {
    spec_c.base_wavenumber(omega)
}

/// `J_0'(x)/J_0(x) - I_0'(x)/I_0(x)` at `x = k a`.
pub fn complement_quotient(x: f64) -> Result<f64> {
    let j = bessel_j(0.0, x)?;
    if j.value.abs() < POLE_EPS {
        return Err(Error::Pole(format!("J_0({x}) vanishes")));
    }
    let i = bessel_i_scaled(0.0, x)?;
    Ok(j.derivative / j.value - i.derivative / i.value)
}

/// Neumann dispersion residual of the complement disc of radius `a`; the
/// complement carries no compression.
pub fn dispersion_residual_complement(spec_c: &PlateSpec, a: f64, omega: f64) -> Result<f64> {
    if !(omega > 0.0 && a > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need omega > 0 and a > 0, got {omega}, {a}"
        )));
    }
    complement_quotient(complement_wavenumber(spec_c, omega) * a)
}

/// Uniform radial samples `u(i h)`, `i = 0..n`, the last point on the
/// boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSamples {
    pub step: f64,
    pub values: Vec<f64>,
}

impl RadialSamples {
    pub fn radius(&self) -> f64 {
        self.step * (self.values.len() - 1) as f64
    }

    fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Finite-difference weights for derivative `order` at 0 on the given
/// offsets (Fornberg).
fn fd_weights(offsets: &[f64], order: usize) -> Vec<f64> {
    let n = offsets.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = offsets[0];
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = offsets[i];
        for j in 0..i {
            let c3 = offsets[i] - offsets[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// First and second derivatives at sample `i`: centred five-point stencils,
/// mirrored through the axis near `r = 0` and one-sided near the edge.
fn derivatives(s: &RadialSamples, i: usize) -> (f64, f64) {
    let n = s.values.len() as isize;
    let i = i as isize;
    let lo = if i + 2 >= n { n - 5 - i } else { -2 };
    let offsets: Vec<f64> = (lo..lo + 5).map(|o| o as f64).collect();
    let w1 = fd_weights(&offsets, 1);
    let w2 = fd_weights(&offsets, 2);
    let (mut d1, mut d2) = (0.0, 0.0);
    for (k, o) in (lo..lo + 5).enumerate() {
        let v = s.values[(i + o).unsigned_abs()];
        d1 += w1[k] * v;
        d2 += w2[k] * v;
    }
    (d1 / s.step, d2 / (s.step * s.step))
}

fn laplacian(s: &RadialSamples, i: usize) -> (f64, f64) {
    let (d1, d2) = derivatives(s, i);
    if i == 0 {
        (0.0, 2.0 * d2)
    } else {
        (d1, d2 + d1 / (i as f64 * s.step))
    }
}

/// Boundary residuals of a sampled mode, each normalized by its amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryResiduals {
    /// `|u(ε)| / max|u|`.
    pub dirichlet: f64,
    /// Natural condition `[β - D(1-σ)/r] u' + D Δu` over
    /// `max|u| (|β_eff|/ε + D/ε²)`; with `β = ∞` the Neumann residual
    /// `|u'(ε)| ε / max|u|`.
    pub natural: f64,
}

/// Residuals of the Dirichlet and `β`-natural conditions at `r = ε`.
pub fn boundary_residuals(spec: &PlateSpec, bond: &BoundaryBond, samples: &RadialSamples) -> Result<BoundaryResiduals> {
    let n = samples.values.len();
    if n < 5 {
        return Err(Error::InsufficientSamples { needed: 5, got: n });
    }
    let amp = samples.max_abs();
    if amp == 0.0 {
        return Ok(BoundaryResiduals {
            dirichlet: 0.0,
            natural: 0.0,
        });
    }
    let eps = samples.radius();
    let back: Vec<f64> = (0..5).map(|k| -(k as f64)).collect();
    let w1 = fd_weights(&back, 1);
    let w2 = fd_weights(&back, 2);
    let (mut d1, mut d2) = (0.0, 0.0);
    for k in 0..5 {
        let v = samples.values[n - 1 - k];
        d1 += w1[k] * v;
        d2 += w2[k] * v;
    }
    d1 /= samples.step;
    d2 /= samples.step * samples.step;
    let dirichlet = samples.values[n - 1].abs() / amp;
    let natural = if bond.beta.is_infinite() {
        d1.abs() * eps / amp
    } else {
        let d = spec.rigidity();
        let beta_eff = bond.effective(spec);
        let lap = d2 + d1 / eps;
        (beta_eff * d1 + d * lap).abs() / (amp * (beta_eff.abs() / eps + d / (eps * eps)))
    };
    Ok(BoundaryResiduals { dirichlet, natural })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub class: Stability,
    /// `β - D(1-σ)/r`.
    pub bond_margin: f64,
    pub annotation: Option<String>,
}

/// Stable when the effective bond is non-negative and the plate is not
/// compressed; compression leaves the question open.
pub fn stability_check(spec: &PlateSpec, bond: &BoundaryBond) -> StabilityReport {
    let bond_margin = bond.effective(spec);
    let class = if bond_margin >= 0.0 && spec.tension_q1 == 0.0 {
        Stability::Stable
    } else {
        Stability::Indeterminate
    };
    let annotation = if spec.tension_q1 > DESTRUCTION_LIMIT_Q1 {
        Some("above destruction limit".to_string())
    } else if spec.tension_q1 > 0.0 {
        Some("below destruction limit".to_string())
    } else {
        None
    };
    StabilityReport {
        class,
        bond_margin,
        annotation,
    }
}

/// Energy of a single standing mode, `½ (ρ H A / 2) (2πν)² a²`.
///
/// The modal mass `ρHA/2` is the mean square of a sinusoidal shape over the
/// area; the plain `½ ρ H A ω² a²` is twice as large.
pub fn mode_energy(nu: f64, amplitude: f64, area: f64, thickness: f64, density: f64) -> f64 {
    let omega = 2.0 * PI * nu;
    0.5 * (0.5 * density * thickness * area) * omega * omega * amplitude * amplitude
}

/// Quadrature of the plate Hamiltonian for a centrally symmetric field:
///
/// ```text
/// ½ ∫ [Hρ u_t² + D (Δu)² - Q1 H |∇u|²] dΩ + ½ ∮ [β - D(1-σ)/r] (∂u/∂n)² dΓ
/// ```
///
/// Trapezoidal in `r` with weight `2πr`; fourth-order finite differences.
/// The boundary term is dropped when `β` is infinite (clamped edge).
pub fn hamiltonian_energy(
    spec: &PlateSpec,
    bond: &BoundaryBond,
    displacement: &RadialSamples,
    velocity: &RadialSamples,
) -> Result<f64> {
    let n = displacement.values.len();
    if n < 64 {
        return Err(Error::InsufficientSamples { needed: 64, got: n });
    }
    if velocity.values.len() != n || (velocity.step - displacement.step).abs() > 1e-12 * displacement.step {
        return Err(Error::InvalidParameter(
            "velocity grid must match displacement grid".into(),
        ));
    }
    let h = displacement.step;
    let d = spec.rigidity();
    let q = spec.q();
    let mut total = 0.0;
    for i in 0..n {
        let r = i as f64 * h;
        let (slope, lap) = laplacian(displacement, i);
        let ut = velocity.values[i];
        let density = spec.thickness * spec.density * ut * ut + d * lap * lap - q * slope * slope;
        let weight = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        total += weight * density * 2.0 * PI * r;
    }
    let mut energy = 0.5 * total * h;
    if bond.beta.is_finite() {
        let radius = displacement.radius();
        let (slope, _) = derivatives(displacement, n - 1);
        energy += 0.5 * bond.effective(spec) * slope * slope * 2.0 * PI * radius;
    }
    Ok(energy)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_reproduces_textbook_stencils() {
        let w = fd_weights(&[-2.0, -1.0, 0.0, 1.0, 2.0], 1);
        let want = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
        for (a, b) in w.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
        let w = fd_weights(&[0.0, -1.0, -2.0, -3.0, -4.0], 1);
        let want = [25.0 / 12.0, -4.0, 3.0, -4.0 / 3.0, 0.25];
        for (a, b) in w.iter().zip(want) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn theta_vanishes_without_compression() {
        let spec = PlateSpec::new(17.28e10, 0.28, 3380.0, 3e4, 0.0).unwrap();
        assert_eq!(ThetaParam::from_omega(&spec, 1e-3).unwrap().theta, 0.0);
        assert!(ThetaParam::from_theta(&spec, 1.0).is_err());
    }

    #[test]
    fn stability_annotations() {
        let spec = PlateSpec::new(17.28e10, 0.28, 3380.0, 3e4, 0.0).unwrap();
        let strong = BoundaryBond {
            beta: 1e30,
            curvature_radius: 1e5,
        };
        assert_eq!(stability_check(&spec, &strong).class, Stability::Stable);
        let free = BoundaryBond {
            beta: 0.0,
            curvature_radius: 1e5,
        };
        assert_eq!(stability_check(&spec, &free).class, Stability::Indeterminate);
        let compressed = stability_check(&spec.with_tension(3e9), &strong);
        assert_eq!(compressed.class, Stability::Indeterminate);
        assert_eq!(compressed.annotation.as_deref(), Some("below destruction limit"));
    }
}
