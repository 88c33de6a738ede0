//! Strict TOML run configuration. Unknown keys are rejected; all values are
//! SI (frequencies of the card in µHz as their key names say).

use serde::{Deserialize, Serialize};

use crate::beats::OscillatorSystem;
use crate::card::{CardParams, Noise, SynthMode};
use crate::error::{Error, Result};
use crate::plate::{BoundaryBond, CircularGeometry, PlateSpec};

/// Built-in profiles by name.
pub const PROFILES: [(&str, &str); 3] = [
    ("paper-2015", include_str!("../../../configs/paper-2015.toml")),
    ("twin", include_str!("../../../configs/twin.toml")),
    ("pulsation", include_str!("../../../configs/pulsation.toml")),
];

/// The compressed active zone and the system-level geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlateConfig {
    pub young_modulus: f64,
    pub poisson: f64,
    pub density: f64,
    /// Active-zone thickness `H_ε` (m).
    pub thickness: f64,
    /// Middle-plane compression `Q1` (Pa) of the active zone.
    #[serde(default)]
    pub tension_q1: f64,
    /// Active-zone radius `ε` (m).
    pub epsilon: f64,
    /// Complement outer radius `a` (m).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer_radius: Option<f64>,
    /// Boundary bond `β` (N); a clamped edge when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Target resonance frequency (Hz).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resonance_nu: Option<f64>,
}

/// Complement plate; missing material keys are taken from `[plate]`,
/// the compression defaults to zero.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplementConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub young_modulus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poisson: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thickness: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tension_q1: Option<f64>,
}

impl ComplementConfig {
    pub fn spec(&self, plate: &PlateConfig) -> Result<PlateSpec> {
        PlateSpec::new(
            self.young_modulus.unwrap_or(plate.young_modulus),
            self.poisson.unwrap_or(plate.poisson),
            self.density.unwrap_or(plate.density),
            self.thickness.unwrap_or(plate.thickness),
            self.tension_q1.unwrap_or(0.0),
        )
    }

    pub fn resolved(&self, plate: &PlateConfig) -> Self {
        ComplementConfig {
            young_modulus: Some(self.young_modulus.unwrap_or(plate.young_modulus)),
            poisson: Some(self.poisson.unwrap_or(plate.poisson)),
            density: Some(self.density.unwrap_or(plate.density)),
            thickness: Some(self.thickness.unwrap_or(plate.thickness)),
            tension_q1: Some(self.tension_q1.unwrap_or(0.0)),
        }
    }
}

impl PlateConfig {
    pub fn active(&self) -> Result<PlateSpec> {
        PlateSpec::new(
            self.young_modulus,
            self.poisson,
            self.density,
            self.thickness,
            self.tension_q1,
        )
    }

    pub fn geometry(&self) -> Result<Option<CircularGeometry>> {
        self.outer_radius
            .map(|a| CircularGeometry::new(self.epsilon, a))
            .transpose()
    }

    pub fn bond(&self) -> BoundaryBond {
        BoundaryBond {
            beta: self.beta.unwrap_or(f64::INFINITY),
            curvature_radius: self.epsilon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.active()?;
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!(
                "plate.epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        self.geometry()?;
        if let Some(nu) = self.resonance_nu {
            if !(nu > 0.0 && nu.is_finite()) {
                return Err(Error::Config(format!("plate.resonance_nu must be positive, got {nu}")));
            }
        }
        Ok(())
    }
}

/// Two-oscillator parametrization `(λ_m, λ_M, ε)`, mapped to the coupling
/// `b = ε √(mM)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairConfig {
    pub lambda_small: f64,
    pub lambda_large: f64,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeatsConfig {
    pub mass_small: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stiffness_small: Option<f64>,
    pub masses_large: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stiffnesses_large: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<Vec<f64>>,
    /// Alternative to the stiffness/coupling keys for a single pair.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairConfig>,
    #[serde(default = "one")]
    pub initial_energy: f64,
    /// Length of the energy series in beat periods.
    #[serde(default = "ten")]
    pub horizon_beats: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Relative detunings `d` of the large stiffness, `V = M λ⁰ (1 + d)`.
    #[serde(default = "default_detunings")]
    pub detunings: Vec<f64>,
}

fn one() -> f64 {
    1.0
}
fn ten() -> f64 {
    10.0
}
fn default_samples() -> usize {
    4001
}
fn default_detunings() -> Vec<f64> {
    (0..10).map(|i| 0.002 * i as f64).collect()
}

impl BeatsConfig {
    pub fn system(&self) -> Result<OscillatorSystem> {
        let explicit = (&self.stiffness_small, &self.stiffnesses_large, &self.coupling);
        match (&self.pair, explicit) {
            (Some(p), (None, None, None)) => {
                if self.masses_large.len() != 1 {
                    return Err(Error::Config(
                        "beats.pair needs exactly one entry in masses_large".into(),
                    ));
                }
                OscillatorSystem::from_pair(
                    self.mass_small,
                    p.lambda_small,
                    self.masses_large[0],
                    p.lambda_large,
                    p.eps,
                )
            }
            (None, (Some(v), Some(big_v), Some(b))) => {
                OscillatorSystem::new(self.mass_small, *v, self.masses_large.clone(), big_v.clone(), b.clone())
            }
            (Some(_), _) => Err(Error::Config(
                "beats: give either `pair` or stiffness_small/stiffnesses_large/coupling, not both".into(),
            )),
            _ => Err(Error::Config(
                "beats: stiffness_small, stiffnesses_large and coupling are required".into(),
            )),
        }
        .map_err(|e| match e {
            Error::InvalidParameter(m) => Error::Config(format!("beats: {m}")),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.system()?;
        if !(self.initial_energy > 0.0) || !(self.horizon_beats > 0.0) || self.samples < 2 {
            return Err(Error::Config(
                "beats: initial_energy and horizon_beats must be positive, samples >= 2".into(),
            ));
        }
        Ok(())
    }

    /// Canonical form: the coupling vector `b` and stiffnesses.
    pub fn resolved(&self) -> Result<Self> {
        let sys = self.system()?;
        Ok(BeatsConfig {
            stiffness_small: Some(sys.stiffness_small),
            stiffnesses_large: Some(sys.stiffnesses_large),
            coupling: Some(sys.coupling),
            pair: None,
            ..self.clone()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub duration_hours: f64,
    pub sample_rate_hz: f64,
    #[serde(default)]
    pub modes: Vec<SynthMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<Noise>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CardConfig {
    pub f_lo_uhz: f64,
    pub f_hi_uhz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bin_width_uhz: Option<f64>,
    #[serde(default = "twenty")]
    pub window_hours: f64,
    #[serde(default = "thirty")]
    pub stride_minutes: f64,
    #[serde(default = "pad")]
    pub pad_factor: usize,
    /// CSV record `(t_seconds, displacement_m)`; the `[synth]` section is
    /// used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
}

fn twenty() -> f64 {
    20.0
}
fn thirty() -> f64 {
    30.0
}
fn pad() -> usize {
    1
}

impl CardConfig {
    pub fn params(&self) -> CardParams {
        CardParams {
            f_lo_uhz: self.f_lo_uhz,
            f_hi_uhz: self.f_hi_uhz,
            bin_width_uhz: self.bin_width_uhz,
            window_hours: self.window_hours,
            stride_minutes: self.stride_minutes,
            pad_factor: self.pad_factor,
        }
    }
}

/// All sections of a run configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plate: Option<PlateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complement: Option<ComplementConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beats: Option<BeatsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub card: Option<CardConfig>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim().to_string()))
    }

    pub fn profile(name: &str) -> Result<Self> {
        let text = PROFILES
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| *t)
            .ok_or_else(|| {
                let names: Vec<&str> = PROFILES.iter().map(|(n, _)| *n).collect();
                Error::Config(format!("unknown profile `{name}` (available: {})", names.join(", ")))
            })?;
        Self::from_toml_str(text)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Sections present in `other` replace those of `self`.
    pub fn overlay(self, other: RunConfig) -> Self {
        RunConfig {
            complement: if other.plate.is_some() {
                other.complement
            } else {
                other.complement.or(self.complement)
            },
            plate: other.plate.or(self.plate),
            beats: other.beats.or(self.beats),
            synth: other.synth.or(self.synth),
            card: other.card.or(self.card),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(p) = &self.plate {
            p.validate().map_err(config_error)?;
            self.complement_spec().map_err(config_error)?;
        } else if self.complement.is_some() {
            return Err(Error::Config("[complement] requires a [plate] section".into()));
        }
        if let Some(b) = &self.beats {
            b.validate()?;
        }
        Ok(())
    }

    /// Copy with defaults and alternative parametrizations resolved.
    pub fn resolved(&self) -> Result<Self> {
        Ok(RunConfig {
            plate: self.plate.clone(),
            complement: self
                .plate
                .as_ref()
                .map(|p| self.complement.clone().unwrap_or_default().resolved(p)),
            beats: self.beats.as_ref().map(BeatsConfig::resolved).transpose()?,
            synth: self.synth.clone(),
            card: self.card.clone(),
        })
    }

    /// Complement plate of the `[plate]` system.
    pub fn complement_spec(&self) -> Result<PlateSpec> {
        let plate = self
            .plate
            .as_ref()
            .ok_or_else(|| Error::Config("a [plate] section is required".into()))?;
        self.complement.clone().unwrap_or_default().spec(plate)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }
}

fn config_error(e: Error) -> Error {
    match e {
        Error::InvalidParameter(m) => Error::Config(m),
        other => other,
    }
}
