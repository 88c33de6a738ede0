//! Time-spectral cards: band mean-square amplitudes of a displacement record
//! on a sliding system of windows, graded by ten equal isoline steps.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative jitter tolerated in sample times.
pub const SAMPLING_JITTER: f64 = 1e-9;
/// Number of isoline steps.
pub const ISOLINE_STEPS: usize = 10;

/// Uniformly sampled displacement record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignalSeries {
    /// Time of the first sample (s).
    pub t0: f64,
    /// Sampling step (s).
    pub dt: f64,
    /// Displacement (m).
    pub values: Vec<f64>,
}

impl SignalSeries {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite() && t0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sampling step must be positive, got {dt}"
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite sample at index {i}")));
        }
        Ok(SignalSeries { t0, dt, values })
    }

    /// Builds a series from explicit sample times, checking uniformity.
    pub fn from_samples(times: &[f64], values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() || times.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least two (time, value) pairs of equal count, got {} and {}",
                times.len(),
                values.len()
            )));
        }
        let n = times.len();
        let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
        let span = (times[n - 1] - times[0]).abs().max(times[0].abs());
        for (i, t) in times.iter().enumerate() {
            let want = times[0] + i as f64 * dt;
            if (t - want).abs() > SAMPLING_JITTER * span {
                return Err(Error::InvalidParameter(format!(
                    "non-uniform sampling at index {i}: t = {t}, expected {want}"
                )));
            }
        }
        Self::new(times[0], dt, values)
    }

    pub fn sample_rate(&self) -> f64 {
        1.0 / self.dt
    }

    pub fn nyquist(&self) -> f64 {
        0.5 / self.dt
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.values.len() as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |i| self.t0 + i as f64 * self.dt)
    }
}

/// A stationary mode `a cos(2π ν t + φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthMode {
    pub nu_uhz: f64,
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

impl SynthMode {
    /// Two equal-amplitude modes `center ± split/2`, beating at `split`.
    pub fn beat_pair(center_uhz: f64, split_uhz: f64, amplitude: f64) -> [SynthMode; 2] {
        [
            SynthMode {
                nu_uhz: center_uhz - 0.5 * split_uhz,
                amplitude,
                phase: 0.0,
            },
            SynthMode {
                nu_uhz: center_uhz + 0.5 * split_uhz,
                amplitude,
                phase: 0.0,
            },
        ]
    }
}

/// Gaussian measurement noise with a fixed seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Noise {
    pub std: f64,
    pub seed: u64,
}

/// Sum of cosines sampled on `[0, duration]` at `sample_rate_hz`.
pub fn synth_sgo(
    duration_hours: f64,
    modes: &[SynthMode],
    sample_rate_hz: f64,
    noise: Option<Noise>,
) -> Result<SignalSeries> {
    if !(duration_hours > 0.0 && duration_hours.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "duration must be positive, got {duration_hours} h"
        )));
    }
    if !(sample_rate_hz > 0.0 && sample_rate_hz.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "sample rate must be positive, got {sample_rate_hz}"
        )));
    }
    let max_hz = modes.iter().map(|m| m.nu_uhz.abs() * 1e-6).fold(0.0, f64::max);
    if sample_rate_hz < 4.0 * max_hz {
        return Err(Error::Aliasing {
            rate_hz: sample_rate_hz,
            max_hz,
        });
    }
    let dt = 1.0 / sample_rate_hz;
    let n = (duration_hours * 3600.0 * sample_rate_hz).round() as usize + 1;
    let mut values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 * dt;
            modes
                .iter()
                .map(|m| m.amplitude * (2.0 * PI * m.nu_uhz * 1e-6 * t + m.phase).cos())
                .sum()
        })
        .collect();
    if let Some(noise) = noise {
        let dist = Normal::new(0.0, noise.std)
            .map_err(|e| Error::InvalidParameter(format!("noise standard deviation: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
        for v in &mut values {
            *v += dist.sample(&mut rng);
        }
    }
    SignalSeries::new(0.0, dt, values)
}

/// Periodic Hann taper of length `n`.
fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect()
}

/// One-sided, taper-corrected power spectrum of a window: bin `k` at
/// frequency `k / (N dt)` carries its share of the mean square, so the
/// spectrum sums to `Σ (x - x̄)² w² / Σ w²`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSpectrum {
    pub df: f64,
    pub power: Vec<f64>,
}

impl WindowSpectrum {
    /// Spectrum of `values[start .. start + len]`, zero-padded to `pad * len`.
    pub fn compute(values: &[f64], dt: f64, pad: usize, planner: &mut FftPlanner<f64>) -> Self {
        let len = values.len();
        let n = len * pad.max(1);
        let mean = values.iter().sum::<f64>() / len as f64;
        let w = hann(len);
        let w2: f64 = w.iter().map(|x| x * x).sum();
        let mut buf: Vec<Complex<f64>> = values
            .iter()
            .zip(&w)
            .map(|(x, w)| Complex::new((x - mean) * w, 0.0))
            .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
            .take(n)
            .collect();
        planner.plan_fft_forward(n).process(&mut buf);
        let norm = 1.0 / (n as f64 * w2);
        let power = (0..=n / 2)
            .map(|k| {
                let edge = k == 0 || (n.is_multiple_of(2) && k == n / 2);
                buf[k].norm_sqr() * norm * if edge { 1.0 } else { 2.0 }
            })
            .collect();
        WindowSpectrum {
            df: 1.0 / (n as f64 * dt),
            power,
        }
    }

    /// Sum of the power in bins with frequency in `[lo, hi)` (Hz), or
    /// `[lo, hi]` when `closed`.
    pub fn band(&self, lo: f64, hi: f64, closed: bool) -> Option<f64> {
        let first = (lo / self.df - 1e-9).ceil().max(0.0) as usize;
        let mut acc = 0.0;
        let mut any = false;
        for k in first..self.power.len() {
            let f = k as f64 * self.df;
            let inside = if closed {
                f <= hi * (1.0 + 1e-12)
            } else {
                f < hi * (1.0 - 1e-12)
            };
            if !inside {
                break;
            }
            acc += self.power[k];
            any = true;
        }
        any.then_some(acc)
    }
}

fn window_indices(signal: &SignalSeries, start: f64, width: f64) -> Result<(usize, usize)> {
    let i0 = ((start - signal.t0) / signal.dt).round();
    let len = (width / signal.dt).round() as usize;
    let t_end = signal.t0 + signal.duration();
    if i0 < 0.0 || len < 2 || i0 as usize + len > signal.values.len() {
        return Err(Error::WindowOutOfRange {
            start,
            end: start + width,
            min: signal.t0,
            max: t_end,
        });
    }
    Ok((i0 as usize, len))
}

/// Mean-square amplitude of the band `[f_lo, f_hi]` µHz in the window
/// `[start, start + width]` s after mean removal and a Hann taper.
pub fn band_amplitude(signal: &SignalSeries, f_lo_uhz: f64, f_hi_uhz: f64, start: f64, width: f64) -> Result<f64> {
    if !(f_lo_uhz >= 0.0 && f_hi_uhz > f_lo_uhz && f_hi_uhz * 1e-6 <= signal.nyquist() * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!(
            "band [{f_lo_uhz}, {f_hi_uhz}] uHz must lie in [0, Nyquist = {}] uHz",
            signal.nyquist() * 1e6
        )));
    }
    let (i0, len) = window_indices(signal, start, width)?;
    let spec = WindowSpectrum::compute(&signal.values[i0..i0 + len], signal.dt, 1, &mut FftPlanner::new());
    spec.band(f_lo_uhz * 1e-6, f_hi_uhz * 1e-6, true)
        .ok_or(Error::EmptyBand {
            lo_uhz: f_lo_uhz,
            hi_uhz: f_hi_uhz,
        })
}

/// Card construction parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CardParams {
    pub f_lo_uhz: f64,
    pub f_hi_uhz: f64,
    /// Band width; when absent, one band per DFT bin of the (padded)
    /// window, centred on the bin frequency.
    #[serde(default)]
    pub bin_width_uhz: Option<f64>,
    #[serde(default = "default_window_hours")]
    pub window_hours: f64,
    #[serde(default = "default_stride_minutes")]
    pub stride_minutes: f64,
    /// Zero-padding factor: interpolates the spectrum, does not add
    /// resolution.
    #[serde(default = "default_pad")]
    pub pad_factor: usize,
}

fn default_window_hours() -> f64 {
    20.0
}
fn default_stride_minutes() -> f64 {
    30.0
}
fn default_pad() -> usize {
    1
}

impl CardParams {
    pub fn new(f_lo_uhz: f64, f_hi_uhz: f64) -> Self {
        CardParams {
            f_lo_uhz,
            f_hi_uhz,
            bin_width_uhz: None,
            window_hours: default_window_hours(),
            stride_minutes: default_stride_minutes(),
            pad_factor: default_pad(),
        }
    }
}

/// `A²` over windows × bands with isoline grading.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CardGrid {
    /// Window centres (h).
    pub window_centers_hours: Vec<f64>,
    /// Band edges `(lo, hi)` (µHz).
    pub bands_uhz: Vec<(f64, f64)>,
    /// `a2[band][window]` (m²); NaN marks a masked cell.
    pub a2: Vec<Vec<f64>>,
    pub masked: Vec<String>,
    /// Eleven boundaries, `A²_min + i δA²`.
    pub levels: Vec<f64>,
    pub step: f64,
    pub window_hours: f64,
    pub stride_minutes: f64,
    pub pad_factor: usize,
}

/// `ISOLINE_STEPS + 1` equally spaced levels spanning the finite values.
pub fn isoline_levels(values: impl Iterator<Item = f64>) -> (Vec<f64>, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (vec![0.0; ISOLINE_STEPS + 1], 0.0);
    }
    let step = (hi - lo) / ISOLINE_STEPS as f64;
    let levels = (0..=ISOLINE_STEPS)
        .map(|i| if i == ISOLINE_STEPS { hi } else { lo + i as f64 * step })
        .collect();
    (levels, step)
}

/// Sliding-window card over `[f_lo, f_hi]`.
pub fn build_card(signal: &SignalSeries, params: &CardParams) -> Result<CardGrid> {
    let width = params.window_hours * 3600.0;
    let stride = params.stride_minutes * 60.0;
    if !(width > 0.0 && stride > 0.0) {
        return Err(Error::InvalidParameter("window and stride must be positive".into()));
    }
    if !(params.f_lo_uhz >= 0.0 && params.f_hi_uhz > params.f_lo_uhz) {
        return Err(Error::InvalidParameter(format!(
            "empty band range [{}, {}] uHz",
            params.f_lo_uhz, params.f_hi_uhz
        )));
    }
    if params.f_hi_uhz * 1e-6 > signal.nyquist() * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "f_hi = {} uHz exceeds Nyquist {} uHz",
            params.f_hi_uhz,
            signal.nyquist() * 1e6
        )));
    }
    if signal.duration() < width * (1.0 - 1e-12) {
        return Err(Error::InsufficientSamples {
            needed: (width / signal.dt).round() as usize,
            got: signal.values.len(),
        });
    }
    let pad = params.pad_factor.max(1);
    let len = (width / signal.dt).round() as usize;
    let df_uhz = 1e6 / ((len * pad) as f64 * signal.dt);
    let bands: Vec<(f64, f64)> = match params.bin_width_uhz {
        // one band per DFT bin, centred on the bin frequency
        None => {
            let first = (params.f_lo_uhz / df_uhz - 1e-9).ceil() as usize;
            let last = (params.f_hi_uhz / df_uhz + 1e-9).floor() as usize;
            if last < first {
                return Err(Error::EmptyBand {
                    lo_uhz: params.f_lo_uhz,
                    hi_uhz: params.f_hi_uhz,
                });
            }
            (first..=last)
                .map(|k| (((k as f64) - 0.5).max(0.0) * df_uhz, (k as f64 + 0.5) * df_uhz))
                .collect()
        }
        Some(bin) => {
            if !(bin > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "bin width must be positive, got {bin}"
                )));
            }
            let n = ((params.f_hi_uhz - params.f_lo_uhz) / bin - 1e-9).ceil().max(1.0) as usize;
            (0..n)
                .map(|i| {
                    let lo = params.f_lo_uhz + i as f64 * bin;
                    (lo, (lo + bin).min(params.f_hi_uhz))
                })
                .collect()
        }
    };

    let stride_samples = stride / signal.dt;
    let mut starts = Vec::new();
    let mut j = 0usize;
    loop {
        let i0 = (j as f64 * stride_samples).round() as usize;
        if i0 + len > signal.values.len() {
            break;
        }
        starts.push(i0);
        j += 1;
    }

    let columns: Vec<Vec<Result<f64>>> = starts
        .par_iter()
        .map_init(FftPlanner::new, |planner, &i0| {
            let spec = WindowSpectrum::compute(&signal.values[i0..i0 + len], signal.dt, pad, planner);
            bands
                .iter()
                .enumerate()
                .map(|(b, &(lo, hi))| {
                    spec.band(lo * 1e-6, hi * 1e-6, b + 1 == bands.len())
                        .ok_or(Error::EmptyBand { lo_uhz: lo, hi_uhz: hi })
                })
                .collect()
        })
        .collect();

    let mut a2 = vec![vec![f64::NAN; starts.len()]; bands.len()];
    let mut masked = Vec::new();
    for (w, column) in columns.into_iter().enumerate() {
        for (b, cell) in column.into_iter().enumerate() {
            match cell {
                Ok(v) => a2[b][w] = v,
                Err(e) => {
                    if w == 0 {
                        masked.push(format!("band {b}: {e}"));
                    }
                }
            }
        }
    }
    let (levels, step) = isoline_levels(a2.iter().flatten().copied());
    let window_centers_hours = starts
        .iter()
        .map(|&i0| (signal.t0 + i0 as f64 * signal.dt + 0.5 * len as f64 * signal.dt) / 3600.0)
        .collect();
    Ok(CardGrid {
        window_centers_hours,
        bands_uhz: bands,
        a2,
        masked,
        levels,
        step,
        window_hours: params.window_hours,
        stride_minutes: params.stride_minutes,
        pad_factor: pad,
    })
}

impl CardGrid {
    /// Isoline class `0..=9` of a value (`None` for masked cells).
    pub fn level_index(&self, v: f64) -> Option<usize> {
        if !v.is_finite() {
            return None;
        }
        if self.step == 0.0 {
            return Some(0);
        }
        Some((((v - self.levels[0]) / self.step).floor().max(0.0) as usize).min(ISOLINE_STEPS - 1))
    }

    /// Grayscale heat map, dull grey for the lowest class to white for the
    /// highest; time runs left to right, frequency upwards.
    pub fn to_svg(&self) -> String {
        let (cw, ch) = (4.0, 12.0);
        let (left, top, bottom) = (70.0, 20.0, 40.0);
        let nw = self.window_centers_hours.len();
        let nb = self.bands_uhz.len();
        let width = left + cw * nw as f64 + 20.0;
        let height = top + ch * nb as f64 + bottom;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
        );
        let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#202020"/>"##);
        for (b, row) in self.a2.iter().enumerate() {
            let y = top + ch * (nb - 1 - b) as f64;
            for (w, &v) in row.iter().enumerate() {
                let x = left + cw * w as f64;
                let fill = match self.level_index(v) {
                    Some(l) => {
                        let g = 110 + (145 * l) / (ISOLINE_STEPS - 1);
                        format!("#{g:02x}{g:02x}{g:02x}")
                    }
                    None => "#800000".to_string(),
                };
                let _ = writeln!(s, r#"<rect x="{x}" y="{y}" width="{cw}" height="{ch}" fill="{fill}"/>"#);
            }
        }
        let axis_y = top + ch * nb as f64;
        let _ = writeln!(
            s,
            r#"<text x="{left}" y="{}" font-size="11" fill="white">time (h): {:.1} .. {:.1}</text>"#,
            axis_y + 16.0,
            self.window_centers_hours.first().copied().unwrap_or(0.0),
            self.window_centers_hours.last().copied().unwrap_or(0.0)
        );
        for (b, &(lo, hi)) in self.bands_uhz.iter().enumerate() {
            let y = top + ch * (nb - 1 - b) as f64 + 0.8 * ch;
            let _ = writeln!(
                s,
                r#"<text x="4" y="{y}" font-size="9" fill="white">{:.1}-{:.1} uHz</text>"#,
                lo, hi
            );
        }
        s.push_str("</svg>\n");
        s
    }
}
