use std::f64::consts::PI;
use std::path::Path;

use serde::Serialize;
use serde_json::json;
use sgo_core::beats::{
    self, beat_period, energy_series, first_order_pair, optimal_window, perturbed_spectrum, solve_cauchy, InitialState,
};
use sgo_core::card::{build_card, synth_sgo, SignalSeries};
use sgo_core::config::{PlateConfig, RunConfig};
use sgo_core::plate::{self, CircularGeometry, ThetaParam};
use sgo_core::reference::published_checks;
use sgo_core::resonance::{self, NU_BAND};
use sgo_core::specfun::{bessel_i, bessel_j};
use sgo_core::{Error, Result};

use crate::args::*;
use crate::output::{csv, JobResult};

pub fn execute(job: &Command, config: &RunConfig) -> Result<JobResult> {
    match job {
        Command::Dispersion(a) => dispersion(a, config),
        Command::Tune(a) => tune(a, config),
        Command::Scan(a) => scan(a, config),
        Command::Beats(_) => beats_run(config),
        Command::Transfer(a) => transfer(a, config),
        Command::Card(a) => card(a, config),
        Command::Synth(_) => synth(config),
        Command::DumpSpecfun(a) => dump_specfun(a),
        Command::Replay(_) => Err(Error::Config("replay cannot be nested".into())),
    }
}

fn plate_section(config: &RunConfig) -> Result<&PlateConfig> {
    config
        .plate
        .as_ref()
        .ok_or_else(|| Error::Config("a [plate] section is required (use --profile paper-2015 or --config)".into()))
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn lin_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn dispersion(args: &DispersionArgs, config: &RunConfig) -> Result<JobResult> {
    let p = plate_section(config)?;
    let active = p.active()?;
    let complement = config.complement_spec()?;
    if args.count == 0 || args.points < 2 {
        return Err(Error::Config("--count must be positive and --points at least 2".into()));
    }
    let modes = resonance::active_eigenfrequencies(&active, p.epsilon, args.count)?;
    let complement_modes = match p.outer_radius {
        Some(a) => {
            let all = resonance::complement_eigenfrequencies(&complement, a, 2.0 * PI * NU_BAND.1)?;
            Some(
                all.into_iter()
                    .take(args.count)
                    .map(|w| w / (2.0 * PI))
                    .collect::<Vec<_>>(),
            )
        }
        None => None,
    };
    let geometry = CircularGeometry {
        epsilon: p.epsilon,
        outer_radius: p.outer_radius.unwrap_or(f64::INFINITY),
    };
    let rows = log_grid(NU_BAND.0, NU_BAND.1, args.points).into_iter().map(|nu| {
        let omega = 2.0 * PI * nu;
        let theta = ThetaParam::from_omega(&active, omega).ok();
        let active_residual = theta
            .and_then(|t| plate::dispersion_residual_active(&active, &geometry, t).ok())
            .unwrap_or(f64::NAN);
        let complement_residual = p
            .outer_radius
            .map(|a| plate::dispersion_residual_complement(&complement, a, omega).unwrap_or(f64::NAN))
            .unwrap_or(f64::NAN);
        vec![
            nu,
            theta.map(|t| t.theta).unwrap_or(f64::NAN),
            active_residual,
            complement_residual,
        ]
    });
    let table = csv(&["nu_hz", "theta", "active_residual", "complement_residual"], rows);

    #[derive(Serialize)]
    struct Report<'a> {
        active: &'a sgo_core::plate::PlateSpec,
        complement: &'a sgo_core::plate::PlateSpec,
        epsilon: f64,
        outer_radius: Option<f64>,
        classical_ground_hz: f64,
        buckling_q1: f64,
        active_modes: Vec<resonance::ActiveMode>,
        complement_modes_hz: Option<Vec<f64>>,
        stability: sgo_core::plate::StabilityReport,
    }
    let report = Report {
        active: &active,
        complement: &complement,
        epsilon: p.epsilon,
        outer_radius: p.outer_radius,
        classical_ground_hz: resonance::classical_ground_omega(&active, p.epsilon) / (2.0 * PI),
        buckling_q1: active.buckling_q1(p.epsilon),
        active_modes: modes,
        complement_modes_hz: complement_modes,
        stability: plate::stability_check(&active, &p.bond()),
    };
    let mut out = JobResult::new(json!({
        "ground_hz": report.active_modes[0].nu_hz,
        "modes": report.active_modes.len(),
    }));
    out.add_json("dispersion.json", &report);
    out.add("dispersion.csv", table);
    Ok(out)
}

fn target(explicit: Option<f64>, p: &PlateConfig) -> Result<f64> {
    explicit
        .or(p.resonance_nu)
        .ok_or_else(|| Error::Config("target frequency required: --target-nu or plate.resonance_nu".into()))
}

fn tune(args: &TuneArgs, config: &RunConfig) -> Result<JobResult> {
    let p = plate_section(config)?;
    let active = p.active()?;
    let complement = config.complement_spec()?;
    let nu0 = target(args.target_nu, p)?;
    let mut report = match args.param {
        TunedParam::OuterRadius => resonance::tune_outer_radius(&complement, nu0, args.mode_l)?,
        TunedParam::Tension => resonance::tune_tension(&active, p.epsilon, nu0)?,
    };
    report.references = published_checks(&active, &complement, p.epsilon, nu0)?;
    let mut out = JobResult::new(serde_json::to_value(&report).unwrap_or_default());
    out.add_json("report.json", &report);
    Ok(out)
}

fn scan(args: &ScanArgs, config: &RunConfig) -> Result<JobResult> {
    let p = plate_section(config)?;
    let active = p.active()?;
    let complement = config.complement_spec()?;
    let grid = if args.q1.is_empty() {
        if args.q1_steps == 0 {
            return Err(Error::Config("--q1-steps must be positive".into()));
        }
        lin_grid(args.q1_min, args.q1_max, args.q1_steps)
    } else {
        args.q1.clone()
    };
    let (outer_radius, source) = match p.outer_radius {
        Some(a) => (a, "config"),
        None => {
            let nu0 = target(None, p)?;
            (
                resonance::tune_outer_radius(&complement, nu0, args.mode_l)?.tuned_value,
                "tuned",
            )
        }
    };
    let geometry = CircularGeometry::new(p.epsilon, outer_radius)?;
    let rows = resonance::resonance_scan(&active, &complement, &geometry, &grid)?;
    let references = match p.resonance_nu {
        Some(nu0) => published_checks(&active, &complement, p.epsilon, nu0)?,
        None => Vec::new(),
    };
    let table = csv(
        &["q1", "nu_eps_hz", "nu_c_hz", "mismatch", "flagged"],
        rows.iter().map(|r| {
            vec![
                r.q1,
                r.nu_eps_hz,
                r.nu_c_hz,
                r.mismatch,
                if r.flagged { 1.0 } else { 0.0 },
            ]
        }),
    );
    let failures: Vec<_> = rows
        .iter()
        .filter_map(|r| r.error.as_ref().map(|e| json!({ "q1": r.q1, "error": e })))
        .collect();
    let flagged = rows.iter().filter(|r| r.flagged).count();
    let report = json!({
        "outer_radius": outer_radius,
        "outer_radius_source": source,
        "mode_l": args.mode_l,
        "target_nu_hz": p.resonance_nu,
        "rows": rows.len(),
        "flagged_rows": flagged,
        "failures": failures,
        "references": references,
    });
    let mut out = JobResult::new(json!({ "rows": rows.len(), "flagged_rows": flagged, "outer_radius": outer_radius }));
    out.add("scan.csv", table);
    out.add_json("scan.json", &report);
    Ok(out)
}

fn beats_section(config: &RunConfig) -> Result<&sgo_core::config::BeatsConfig> {
    config
        .beats
        .as_ref()
        .ok_or_else(|| Error::Config("a [beats] section is required (use --profile twin or --config)".into()))
}

fn transfer_rows(config: &RunConfig, detunings: &[f64]) -> Result<Vec<(f64, f64)>> {
    let bc = beats_section(config)?;
    let sys = bc.system()?;
    if sys.mu() == 1 {
        beats::transfer_sweep(&sys, bc.initial_energy, detunings)
    } else {
        Ok(vec![(
            0.0,
            beats::transfer_coefficient(&sys, bc.initial_energy, None)?.k,
        )])
    }
}

fn beats_run(config: &RunConfig) -> Result<JobResult> {
    let bc = beats_section(config)?;
    let sys = bc.system()?;
    let spectrum = perturbed_spectrum(&sys)?;
    let initial = InitialState::small_excited(&sys, bc.initial_energy);
    let solution = solve_cauchy(&spectrum, &initial)?;
    let beat = beat_period(&spectrum);
    let unit = if beat.is_finite() {
        beat
    } else {
        2.0 * PI / spectrum.frequencies[0]
    };
    let series = energy_series(&solution, bc.horizon_beats * unit, bc.samples)?;
    let energy = csv(
        &["t", "e_small", "e_large", "e_total", "xi_re", "xi_im"],
        (0..series.t.len()).map(|i| {
            vec![
                series.t[i],
                series.e_small[i],
                series.e_large[i],
                series.e_total[i],
                series.xi[i].re,
                series.xi[i].im,
            ]
        }),
    );
    let transfer = transfer_rows(config, &bc.detunings)?;

    #[derive(Serialize)]
    struct Spectrum<'a> {
        system: &'a beats::OscillatorSystem,
        eigenvalues: &'a [f64],
        frequencies: &'a [f64],
        eigenvectors: &'a [Vec<f64>],
        normalizations: &'a [f64],
        orthonormality_defect: f64,
        beat_period: f64,
        initial_state: &'a InitialState,
        amplitudes: &'a [f64],
        phases: &'a [f64],
        first_order_pair: Option<(f64, f64)>,
        optimal_window: Option<beats::OptimalWindow>,
    }
    let detuned = sys.mu() == 1 && sys.lambda_small() != sys.poles()[0];
    let doc = Spectrum {
        system: &sys,
        eigenvalues: &spectrum.eigenvalues,
        frequencies: &spectrum.frequencies,
        eigenvectors: &spectrum.vectors,
        normalizations: &spectrum.normalization,
        orthonormality_defect: spectrum.orthonormality_defect(),
        beat_period: beat,
        initial_state: &initial,
        amplitudes: &solution.amplitudes,
        phases: &solution.phases,
        first_order_pair: if detuned { first_order_pair(&sys).ok() } else { None },
        optimal_window: optimal_window(&sys).ok(),
    };
    let mut out = JobResult::new(json!({
        "eigenvalues": spectrum.eigenvalues,
        "beat_period": beat,
        "k": transfer.first().map(|r| r.1),
    }));
    out.add_json("spectrum.json", &doc);
    out.add("energy.csv", energy);
    out.add(
        "transfer.csv",
        csv(&["detuning", "k"], transfer.iter().map(|&(d, k)| vec![d, k])),
    );
    Ok(out)
}

fn transfer(args: &TransferArgs, config: &RunConfig) -> Result<JobResult> {
    let bc = beats_section(config)?;
    let detunings = if args.detunings.is_empty() {
        bc.detunings.clone()
    } else {
        args.detunings.clone()
    };
    let rows = transfer_rows(config, &detunings)?;
    let mut out =
        JobResult::new(json!({ "points": rows.len(), "k_max": rows.iter().map(|r| r.1).fold(0.0, f64::max) }));
    out.add(
        "transfer.csv",
        csv(&["detuning", "k"], rows.iter().map(|&(d, k)| vec![d, k])),
    );
    Ok(out)
}

/// Reads a `(t_seconds, displacement_m)` CSV; a non-numeric first line is
/// taken as the header.
pub fn read_signal_csv(path: &Path) -> Result<SignalSeries> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let (mut times, mut values) = (Vec::new(), Vec::new());
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse().ok()).collect();
        match parsed {
            Some(v) if v.len() == 2 => {
                times.push(v[0]);
                values.push(v[1]);
            }
            None if n == 0 => continue,
            _ => {
                return Err(Error::Config(format!(
                    "{}:{}: expected two numeric columns t_seconds,displacement_m",
                    path.display(),
                    n + 1
                )))
            }
        }
    }
    SignalSeries::from_samples(&times, values).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn signal(config: &RunConfig) -> Result<SignalSeries> {
    if let Some(input) = config.card.as_ref().and_then(|c| c.input.as_ref()) {
        return read_signal_csv(Path::new(input));
    }
    let s = config
        .synth
        .as_ref()
        .ok_or_else(|| Error::Config("a [synth] section or card input file is required".into()))?;
    synth_sgo(s.duration_hours, &s.modes, s.sample_rate_hz, s.noise)
}

fn card(args: &CardArgs, config: &RunConfig) -> Result<JobResult> {
    let cc = config
        .card
        .as_ref()
        .ok_or_else(|| Error::Config("a [card] section is required".into()))?;
    let series = signal(config)?;
    let grid = build_card(&series, &cc.params())?;
    let mut header = vec!["f_lo_uhz".to_string(), "f_hi_uhz".to_string()];
    header.extend((0..grid.window_centers_hours.len()).map(|j| format!("w{j}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let table = csv(
        &header,
        grid.bands_uhz.iter().zip(&grid.a2).map(|(&(lo, hi), row)| {
            let mut r = vec![lo, hi];
            r.extend(row);
            r
        }),
    );
    let meta = json!({
        "window_centers_hours": grid.window_centers_hours,
        "bands_uhz": grid.bands_uhz,
        "isoline_levels": grid.levels,
        "isoline_step": grid.step,
        "window_hours": grid.window_hours,
        "stride_minutes": grid.stride_minutes,
        "pad_factor": grid.pad_factor,
        "masked": grid.masked,
        "signal": { "t0": series.t0, "dt": series.dt, "samples": series.values.len() },
        "cell_units": "m^2",
    });
    let mut out = JobResult::new(json!({
        "windows": grid.window_centers_hours.len(),
        "bands": grid.bands_uhz.len(),
        "isoline_step": grid.step,
    }));
    out.add("card.csv", table);
    out.add_json("card_meta.json", &meta);
    if !args.no_svg {
        out.add("card.svg", grid.to_svg());
    }
    Ok(out)
}

fn synth(config: &RunConfig) -> Result<JobResult> {
    let s = config
        .synth
        .as_ref()
        .ok_or_else(|| Error::Config("a [synth] section is required".into()))?;
    let series = synth_sgo(s.duration_hours, &s.modes, s.sample_rate_hz, s.noise)?;
    let table = csv(
        &["t_seconds", "displacement_m"],
        series.times().zip(&series.values).map(|(t, v)| vec![t, *v]),
    );
    let mut out = JobResult::new(json!({ "samples": series.values.len(), "dt": series.dt }));
    out.add("signal.csv", table);
    Ok(out)
}

fn dump_specfun(args: &DumpArgs) -> Result<JobResult> {
    if args.points < 2 || !(args.z_min > 0.0 && args.z_max > args.z_min) {
        return Err(Error::Config("need --points >= 2 and 0 < --z-min < --z-max".into()));
    }
    let mut rows = Vec::new();
    for &p in &args.orders {
        for z in lin_grid(args.z_min, args.z_max, args.points) {
            let j = bessel_j(p, z)?;
            let i = bessel_i(p, z)?;
            rows.push(vec![p, z, j.value, j.derivative, i.value, i.derivative]);
        }
    }
    let mut out = JobResult::new(json!({ "rows": rows.len() }));
    out.add("specfun.csv", csv(&["p", "z", "jp", "djp", "ip", "dip"], rows));
    Ok(out)
}
