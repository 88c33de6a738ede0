//! Real-order Bessel functions of the first kind `J_p` and the modified
//! Bessel functions `I_p`, with first derivatives.
//!
//! Evaluation strategy:
//!
//! * `J_p`: ascending power series for `z <= 12` (and whenever `p >= z`),
//!   otherwise the Hankel large-argument expansion for the fractional part of
//!   the order followed by forward recurrence, which is stable for `p < z`.
//! * `I_p`: ascending series for `z <= 15` (and whenever `p^2 >= z`), otherwise
//!   the exponentially scaled large-argument expansion.
//!
//! Both expansions are summed until the terms stop decreasing, which puts the
//! seam mismatch below `1e-10` for the orders used by the plate models.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest argument evaluated with the ascending series for `J_p`.
pub const J_SERIES_MAX: f64 = 12.0;
/// Largest argument evaluated with the ascending series for `I_p`.
pub const I_SERIES_MAX: f64 = 15.0;

/// Natural log of `f64::MAX`.
const LN_MAX: f64 = 709.782_712_893_384;

/// A Bessel-type function value and its derivative at `(order, arg)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub order: f64,
    pub arg: f64,
    pub value: f64,
    pub derivative: f64,
}

impl BesselEval {
    /// `derivative / value`, the logarithmic derivative used by every
    /// dispersion quotient.
    pub fn log_derivative(&self) -> f64 {
        self.derivative / self.value
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(x: f64) -> f64 {
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    a
}

/// `ln |Gamma(x)|`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        (PI / (PI * x).sin()).abs().ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let t = x + LANCZOS_G + 0.5;
        0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + lanczos_sum(x).ln()
    }
}

/// The gamma function (Lanczos approximation, relative error below `1e-13`
/// away from the poles).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else if x < 100.0 {
        let x = x - 1.0;
        let t = x + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * lanczos_sum(x)
    } else {
        ln_gamma(x).exp()
    }
}

/// `1 / Gamma(x)`, zero at the non-positive integers.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

fn check_domain(p: f64, z: f64) -> Result<()> {
    if !(p >= 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("order p = {p} must be finite and >= 0")));
    }
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("argument z = {z} must be finite and >= 0")));
    }
    Ok(())
}

/// Value and derivative at `z = 0` for `J_p` and `I_p` (identical there).
fn at_origin(p: f64) -> (f64, f64) {
    if p == 0.0 {
        (1.0, 0.0)
    } else if p == 1.0 {
        (0.0, 0.5)
    } else if p < 1.0 {
        (0.0, f64::INFINITY)
    } else {
        (0.0, 0.0)
    }
}

/// Ascending series `sum_k sign^k (z/2)^(2k+p) / (k! Gamma(k+p+1))` and its
/// termwise derivative. `sign = -1` gives `J_p`, `+1` gives `I_p`.
/// Returns `(log_lead, sum, dsum)` with value `exp(log_lead) * sum` and
/// derivative `exp(log_lead) * dsum / z`; the sums are rescaled so they never
/// overflow.
fn ascending_series(p: f64, z: f64, sign: f64) -> (f64, f64, f64) {
    let half = 0.5 * z;
    let q = sign * half * half;
    let mut log_lead = if p == 0.0 {
        0.0
    } else {
        p * half.ln() - ln_gamma(p + 1.0)
    };
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut dsum = p;
    let mut peak = 1.0_f64;
    for k in 1..2000 {
        let kf = k as f64;
        term *= q / (kf * (kf + p));
        sum += term;
        dsum += term * (2.0 * kf + p);
        peak = peak.max(term.abs());
        if kf > half && term.abs() * (2.0 * kf + p) < 1e-18 * peak {
            break;
        }
        if sum.abs() > 1e250 {
            let s = 1e250_f64;
            term /= s;
            sum /= s;
            dsum /= s;
            peak /= s;
            log_lead += s.ln();
        }
    }
    (log_lead, sum, dsum)
}

/// Hankel expansion terms `a_k(nu) / z^k`, returned as the alternating sums
/// `(P, Q)` for `J` and `sum (-1)^k a_k / z^k` for `I`.
fn hankel_sums(nu: f64, z: f64) -> (f64, f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut t = 1.0_f64;
    let (mut p_sum, mut q_sum, mut i_sum) = (1.0, 0.0, 1.0);
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        let next = t * (mu - odd * odd) / (kf * 8.0 * z);
        // asymptotic series: stop at the smallest term
        if next.abs() >= prev && kf > nu {
            break;
        }
        t = next;
        prev = t.abs();
        match k % 4 {
            1 => q_sum += t,
            2 => p_sum -= t,
            3 => q_sum -= t,
            _ => p_sum += t,
        }
        if k % 2 == 1 {
            i_sum -= t;
        } else {
            i_sum += t;
        }
        if t.abs() < 1e-17 {
            break;
        }
    }
    (p_sum, q_sum, i_sum)
}

fn j_hankel(nu: f64, z: f64) -> f64 {
    let (p, q, _) = hankel_sums(nu, z);
    let chi = z - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * z)).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn i_hankel_scaled(nu: f64, z: f64) -> f64 {
    let (_, _, s) = hankel_sums(nu, z);
    s / (2.0 * PI * z).sqrt()
}

/// Bessel function of the first kind `J_p(z)` and `J'_p(z)` for real
/// `p >= 0`, `z >= 0`.
pub fn bessel_j(p: f64, z: f64) -> Result<BesselEval> {
    check_domain(p, z)?;
    let (value, derivative) = if z == 0.0 {
        at_origin(p)
    } else if z <= J_SERIES_MAX || p >= z {
        let (log_lead, sum, dsum) = ascending_series(p, z, -1.0);
        let lead = log_lead.exp();
        (lead * sum, lead * dsum / z)
    } else {
        let n = p.floor();
        let nu0 = p - n;
        let mut prev = j_hankel(nu0, z);
        let mut cur = j_hankel(nu0 + 1.0, z);
        let mut nu = nu0 + 1.0;
        for _ in 0..n as usize {
            let next = 2.0 * nu / z * cur - prev;
            prev = cur;
            cur = next;
            nu += 1.0;
        }
        // prev = J_p, cur = J_{p+1}
        (prev, p / z * prev - cur)
    };
    Ok(BesselEval {
        order: p,
        arg: z,
        value,
        derivative,
    })
}

/// Exponentially scaled modified Bessel function: returns `e^{-z} I_p(z)` and
/// `e^{-z} I'_p(z)`.
pub fn bessel_i_scaled(p: f64, z: f64) -> Result<BesselEval> {
    check_domain(p, z)?;
    let (value, derivative) = if z == 0.0 {
        at_origin(p)
    } else if z <= I_SERIES_MAX || p * p >= z {
        let (log_lead, sum, dsum) = ascending_series(p, z, 1.0);
        let lead = (log_lead - z).exp();
        (lead * sum, lead * dsum / z)
    } else {
        let v = i_hankel_scaled(p, z);
        let v1 = i_hankel_scaled(p + 1.0, z);
        (v, v1 + p / z * v)
    };
    Ok(BesselEval {
        order: p,
        arg: z,
        value,
        derivative,
    })
}

/// Modified Bessel function of the first kind `I_p(z)` and `I'_p(z)`.
///
/// Signals [`Error::Overflow`] when the unscaled value is not representable;
/// use [`bessel_i_scaled`] for quotients at large arguments.
pub fn bessel_i(p: f64, z: f64) -> Result<BesselEval> {
    let scaled = bessel_i_scaled(p, z)?;
    if z == 0.0 {
        return Ok(scaled);
    }
    let log_magnitude = z + scaled.value.abs().ln().max(scaled.derivative.abs().ln());
    if log_magnitude >= LN_MAX {
        return Err(Error::Overflow { log_magnitude });
    }
    let e = z.exp();
    Ok(BesselEval {
        value: scaled.value * e,
        derivative: scaled.derivative * e,
        ..scaled
    })
}

/// Leading large-argument term of `J_p`:
/// `cos(z - p pi/2 - pi/4) / sqrt(pi z / 2)` and `-sin(...) / sqrt(pi z / 2)`.
///
/// This is the hand-calculation form with an `O(1/z)` error; see
/// [`asymptotic_j_is_valid`] for the range where it is meaningful.
pub fn asymptotic_j(p: f64, z: f64) -> BesselEval {
    let phase = z - 0.5 * p * PI - 0.25 * PI;
    let norm = (0.5 * PI * z).sqrt();
    BesselEval {
        order: p,
        arg: z,
        value: phase.cos() / norm,
        derivative: -phase.sin() / norm,
    }
}

/// True when the first neglected correction `|4p^2 - 1| / (8z)` of the
/// leading asymptotic term is at most 5% and `z >= 1`.
pub fn asymptotic_j_is_valid(p: f64, z: f64) -> bool {
    z >= 1.0 && (4.0 * p * p - 1.0).abs() / (8.0 * z) <= 0.05
}

fn singular_series(p: f64, z: f64, sign: f64) -> Result<BesselEval> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("singular order must lie in (0, 1), got {p}")));
    }
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("singular solutions need z > 0, got {z}")));
    }
    let half = 0.5 * z;
    let q = sign * half * half;
    let lead = half.powf(-p) * rgamma(1.0 - p);
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut dsum = -p;
    let mut peak = 1.0_f64;
    for k in 1..500 {
        let kf = k as f64;
        term *= q / (kf * (kf - p));
        sum += term;
        dsum += term * (2.0 * kf - p);
        peak = peak.max(term.abs());
        if kf > half && term.abs() < 1e-18 * peak {
            break;
        }
    }
    Ok(BesselEval {
        order: -p,
        arg: z,
        value: lead * sum,
        derivative: lead * dsum / z,
    })
}

/// `J_{-p}(z)` for `p` in `(0, 1)`. Sectorial defect basis only: these
/// solutions are square integrable but singular at the origin.
pub fn singular_j(p: f64, z: f64) -> Result<BesselEval> {
    singular_series(p, z, -1.0)
}

/// `I_{-p}(z)` for `p` in `(0, 1)`. Sectorial defect basis only.
pub fn singular_i(p: f64, z: f64) -> Result<BesselEval> {
    singular_series(p, z, 1.0)
}

/// The four radial solutions of the biharmonic Helmholtz operator on an
/// annulus. Only the regular pair is evaluated; the Hankel and Macdonald
/// members are named so callers can describe the annular basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnnularBasis {
    J,
    H,
    I,
    K,
}

impl AnnularBasis {
    pub fn evaluate(self, p: f64, z: f64) -> Result<BesselEval> {
        match self {
            AnnularBasis::J => bessel_j(p, z),
            AnnularBasis::I => bessel_i(p, z),
            AnnularBasis::H => Err(Error::Unsupported("Hankel H_p")),
            AnnularBasis::K => Err(Error::Unsupported("Macdonald K_p")),
        }
    }
}
