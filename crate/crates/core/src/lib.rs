//! Numerical core for seismo-gravitational oscillation models.
//!
//! * [`specfun`]: real-order Bessel functions `J_p`, `I_p`.
//! * [`plate`]: compressed Kirchhoff plate, dispersion residuals, mode energy.
//! * [`resonance`]: root isolation and resonance tuning.
//! * [`beats`]: weakly coupled oscillators, normal modes, energy exchange.
//! * [`card`]: sliding-window band amplitudes ("time-spectral cards").
//! * [`config`]: strict TOML run configuration and built-in profiles.
//! * [`reference`]: recomputation of published hand values.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beats;
pub mod card;
pub mod config;
pub mod error;
pub mod plate;
pub mod reference;
pub mod resonance;
pub mod specfun;

pub use error::{Error, Result};
