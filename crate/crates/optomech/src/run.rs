//! Analyses behind the CLI subcommands.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use optomech_core::budget::{
    force_referred_psd, optimize_kappa, resonant_sql_reference, sql, sql_is_degenerate, SpectrumResult,
};
use optomech_core::schemes::{HomodyneAngle, SchemeMeta};
use optomech_core::{FrequencyGrid, Oscillator, Probe};
use serde_json::json;

use crate::config::{SchemeName, ScenarioConfig, SweepScale, SweepVariable};
use crate::envelope::{render, Column, EngineInfo, Envelope, Provenance, Table};
use crate::error::AppError;
use crate::io::write_atomic;
use crate::oracle::{detection_mc, mono::mono_spectra, oracle_spectra, DetectionSetup, OracleReport};
use crate::scenario::{band, Scenario};

/// Subcommands that produce output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Force-referred spectrum on the grid.
    Spectrum,
    /// Spectrum at one frequency over a parameter range.
    Sweep,
    /// Time-domain cross-check.
    Oracle,
    /// Monte Carlo detection threshold.
    Detect,
}

impl Command {
    /// Name used in file names and the envelope.
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Sweep => "sweep",
            Command::Oracle => "oracle",
            Command::Detect => "detect",
        }
    }
}

/// Analysis result before rendering.
#[derive(Debug, Clone)]
pub struct Outcome {
    /// Scalars.
    pub summary: serde_json::Value,
    /// Tables.
    pub tables: Vec<Table>,
    /// Non-fatal findings.
    pub warnings: Vec<String>,
}

/// Parses and validates a configuration file.
pub fn load(path: &Path) -> Result<Scenario, AppError> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::Io(format!("{}: {e}", path.display())))?;
    Scenario::resolve(ScenarioConfig::from_json(&text)?)
}

/// Runs `command`, returning the envelope and tables.
pub fn analyze(command: Command, sc: &Scenario) -> Result<Outcome, AppError> {
    match command {
        Command::Spectrum => run_spectrum(sc),
        Command::Sweep => run_sweep(sc),
        Command::Oracle => run_oracle(sc),
        Command::Detect => run_detect(sc),
    }
}

/// Runs `command` and renders the output files in memory.
pub fn execute(command: Command, sc: &Scenario) -> Result<Vec<(String, Vec<u8>)>, AppError> {
    let out = analyze(command, sc)?;
    let envelope = Envelope {
        engine: EngineInfo::current(),
        command: command.name(),
        config: sc.config.clone(),
        normalized: sc.normalized_echo(),
        provenance: Provenance { seed: sc.config.seed },
        warnings: out.warnings,
        summary: out.summary,
        tables: Vec::new(),
    };
    Ok(render(envelope, &out.tables, sc.config.output.format))
}

/// Runs `command` and writes its files into the configured directory.
pub fn run_to_disk(command: Command, sc: &Scenario) -> Result<Vec<PathBuf>, AppError> {
    let files = execute(command, sc)?;
    let dir = PathBuf::from(&sc.config.output.dir);
    let mut written = Vec::with_capacity(files.len());
    for (name, bytes) in files {
        let p = dir.join(name);
        write_atomic(&p, &bytes)?;
        written.push(p);
    }
    Ok(written)
}

fn per_gamma(osc: &Oscillator, w: f64) -> Option<f64> {
    (osc.gamma_m > 0.0).then(|| w / osc.gamma_m)
}

fn sql_reference(sc: &Scenario, osc: &Oscillator, w: f64) -> Result<f64, AppError> {
    Ok(match sc.config.scheme {
        SchemeName::Monochromatic => sql(osc, w)?,
        _ => resonant_sql_reference(osc, w),
    })
}

fn observable(sc: &Scenario) -> Option<&str> {
    sc.config.spectrum.as_ref().and_then(|s| s.observable.as_deref())
}

fn referred(sc: &Scenario, osc: &Oscillator, probe: &Probe, grid: Arc<FrequencyGrid>, angle: Option<HomodyneAngle>) -> Result<SpectrumResult, AppError> {
    let scheme = sc.build(osc, probe, grid, angle)?;
    let name = observable(sc).unwrap_or(scheme.signal_observable()).to_string();
    Ok(force_referred_psd(&scheme, &name)?)
}

/// Spectrum on the configured grid.
pub fn run_spectrum(sc: &Scenario) -> Result<Outcome, AppError> {
    let scheme = sc.scheme()?;
    let name = observable(sc).unwrap_or(scheme.signal_observable()).to_string();
    let r = force_referred_psd(&scheme, &name)?;
    let osc = &sc.osc;
    let mono = sc.config.scheme == SchemeName::Monochromatic;
    let mut columns = vec![
        Column::new("omega", "rad/s"),
        Column::new("omega/gamma", "1"),
        Column::new("total", "rad/s"),
        Column::new("shot", "rad/s"),
        Column::new("backaction", "rad/s"),
        Column::new("thermal", "rad/s"),
        Column::new("sql_reference", "rad/s"),
    ];
    if mono {
        columns.push(Column::new("psi", "rad"));
    }
    let mut table = Table::new("spectrum", columns);
    let mut warnings = Vec::new();
    let mut best: Option<(f64, f64)> = None;
    for j in r.grid.nonnegative_indices() {
        let w = r.grid.omega(j);
        if mono && sql_is_degenerate(osc, w) {
            warnings.push(format!("SQL reference vanishes at the undamped resonance omega = {w}"));
        }
        let mut row = vec![
            Some(w),
            per_gamma(osc, w),
            Some(r.total[j]),
            Some(r.shot[j]),
            Some(r.backaction[j]),
            Some(r.thermal[j]),
            Some(sql_reference(sc, osc, w)?),
        ];
        if mono {
            row.push(r.params.angles.as_ref().map(|a| a[j]));
        }
        if best.is_none_or(|(_, v)| r.total[j] < v) {
            best = Some((w, r.total[j]));
        }
        table.push(row);
    }
    let (argmin, min_total) = best.expect("grid is non-empty");
    let dc = match scheme.meta() {
        SchemeMeta::Toy(Some(s)) => Some(json!({
            "f_comp": [s.f_comp.re, s.f_comp.im],
            "f_comp_exact": [s.f_comp_exact.re, s.f_comp_exact.im],
            "d": [s.d.re, s.d.im],
            "d_uncompensated": s.d_uncompensated.map(|d| [d.re, d.im]),
            "reflected": s.reflected.map(|(p, m)| [p, m]),
        })),
        _ => None,
    };
    Ok(Outcome {
        summary: json!({
            "observable": name,
            "points": table.rows.len(),
            "argmin_omega": argmin,
            "min_total": min_total,
            "dc_state": dc,
        }),
        tables: vec![table],
        warnings,
    })
}

fn sweep_values(min: f64, max: f64, points: usize, scale: SweepScale) -> Vec<f64> {
    if points == 1 {
        return vec![min];
    }
    let t = |i: usize| i as f64 / (points - 1) as f64;
    (0..points)
        .map(|i| match scale {
            SweepScale::Linear => min + (max - min) * t(i),
            SweepScale::Log => (min.ln() + (max.ln() - min.ln()) * t(i)).exp(),
        })
        .map(|v| v.clamp(min, max))
        .collect()
}

fn variable_unit(v: SweepVariable) -> (&'static str, &'static str) {
    match v {
        SweepVariable::Kappa => ("kappa", "rad^3/s^3"),
        SweepVariable::Psi => ("psi", "rad"),
        SweepVariable::OmegaF0 => ("omega_f0", "rad/s"),
        SweepVariable::NThermal => ("n_thermal", "1"),
    }
}

/// Spectrum at one frequency over a range of one parameter.
pub fn run_sweep(sc: &Scenario) -> Result<Outcome, AppError> {
    let sw = sc.config.sweep.as_ref().ok_or_else(|| AppError::validation_at("sweep", "section required"))?;
    let values = sweep_values(sw.min, sw.max, sw.points, sw.scale);
    let (vname, vunit) = variable_unit(sw.variable);
    let mut table = Table::new(
        "sweep",
        vec![
            Column::new(vname, vunit),
            Column::new("omega_f0", "rad/s"),
            Column::new("total", "rad/s"),
            Column::new("shot", "rad/s"),
            Column::new("backaction", "rad/s"),
            Column::new("thermal", "rad/s"),
            Column::new("sql_reference", "rad/s"),
        ],
    );
    let mut argmin: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        let mut osc = sc.osc;
        let mut probe = Probe::new(sc.probe.kappa, sc.probe.mode)?;
        let mut angle = sc.angle;
        let mut w = sw.omega_f0.unwrap_or(0.0);
        match sw.variable {
            SweepVariable::Kappa => probe.kappa = v,
            SweepVariable::Psi => angle = Some(HomodyneAngle::Fixed(v)),
            SweepVariable::OmegaF0 => w = v,
            SweepVariable::NThermal => osc = Oscillator::new(osc.omega_m, osc.gamma_m, v)?,
        }
        let grid = Arc::new(FrequencyGrid::uniform(w, w, 1, band(sc.config.scheme))?);
        let r = referred(sc, &osc, &probe, grid, angle)?;
        let j = r.grid.index_of(w).expect("grid holds omega_f0");
        if argmin.is_none_or(|(_, best)| r.total[j] < best) {
            argmin = Some((i, r.total[j]));
        }
        table.push(vec![
            Some(v),
            Some(w),
            Some(r.total[j]),
            Some(r.shot[j]),
            Some(r.backaction[j]),
            Some(r.thermal[j]),
            Some(sql_reference(sc, &osc, w)?),
        ]);
    }
    let (imin, smin) = argmin.expect("sweep is non-empty");
    let mut warnings = Vec::new();
    let kappa_star = match (sc.config.scheme, sw.variable, sw.omega_f0) {
        (SchemeName::Monochromatic, SweepVariable::Kappa, Some(w)) => match optimize_kappa(&sc.osc, w) {
            Ok(k) => Some(k),
            Err(e) => {
                warnings.push(e.to_string());
                None
            }
        },
        _ => None,
    };
    Ok(Outcome {
        summary: json!({
            "variable": vname,
            "argmin_index": imin,
            "argmin_value": values[imin],
            "min_total": smin,
            "kappa_star": kappa_star,
        }),
        tables: vec![table],
        warnings,
    })
}

/// Time-domain oracle against the engine.
pub fn run_oracle(sc: &Scenario) -> Result<Outcome, AppError> {
    let cfg = sc.config.oracle.as_ref().ok_or_else(|| AppError::validation_at("oracle", "section required"))?;
    let report: OracleReport = match sc.config.scheme {
        SchemeName::Monochromatic => mono_spectra(&sc.osc, sc.probe.kappa, cfg, sc.config.seed)?,
        _ => oracle_spectra(&sc.rotating_setup()?, cfg, sc.config.seed)?,
    };
    let mut tables = Vec::with_capacity(report.channels.len());
    for ch in &report.channels {
        let mut t = Table::new(
            format!("psd_{}", ch.name),
            vec![
                Column::new("omega", "rad/s"),
                Column::new("omega/gamma", "1"),
                Column::new("analytic", "1/(rad/s)"),
                Column::new("empirical", "1/(rad/s)"),
                Column::new("std_err", "1/(rad/s)"),
                Column::new("relative_deviation", "1"),
            ],
        );
        for k in 0..ch.omega.len() {
            let (a, e) = (ch.analytic[k], ch.empirical[k]);
            t.push(vec![
                Some(ch.omega[k]),
                per_gamma(&sc.osc, ch.omega[k]),
                Some(a),
                Some(e),
                Some(ch.std_err[k]),
                Some(e / a - 1.0),
            ]);
        }
        tables.push(t);
    }
    let channels: Vec<_> = report.channels.iter().map(|c| json!({"name": c.name, "rms": c.rms})).collect();
    Ok(Outcome {
        summary: json!({
            "segments": report.segments,
            "effective_segments": report.effective_segments,
            "worst_rms": report.worst_rms,
            "channels": channels,
        }),
        tables,
        warnings: Vec::new(),
    })
}

/// Monte Carlo detection threshold for each observation time.
pub fn run_detect(sc: &Scenario) -> Result<Outcome, AppError> {
    let d = sc.config.detect.as_ref().ok_or_else(|| AppError::validation_at("detect", "section required"))?;
    let setup = sc.rotating_setup()?;
    let mut thresholds = Table::new(
        "thresholds",
        vec![
            Column::new("tau", "s"),
            Column::new("tau*gamma", "1"),
            Column::new("s_n", "rad/s"),
            Column::new("analytic_threshold", "rad/s"),
            Column::new("empirical_threshold", "rad/s"),
            Column::new("ratio", "1"),
            Column::new("noise_std", "rad/s"),
            Column::new("bracketed", "1"),
        ],
    );
    let mut snr = Table::new(
        "snr",
        vec![Column::new("tau", "s"), Column::new("amplitude", "rad/s"), Column::new("snr", "1")],
    );
    let mut warnings = Vec::new();
    let mut not_bracketed = Vec::new();
    for (i, &tau) in d.tau.iter().enumerate() {
        let rep = detection_mc(&DetectionSetup {
            setup,
            dt: d.dt,
            tau,
            burn_in: d.burn_in,
            offset: d.omega_f0,
            phase: d.phase,
            trials: d.trials,
            seed: sc.config.seed.wrapping_add(i as u64),
            amplitudes: d.amplitudes.clone(),
            snr: d.snr,
        })?;
        if !rep.bracketed {
            warnings.push(format!("threshold not bracketed at tau = {tau}"));
            not_bracketed.push(tau);
        }
        thresholds.push(vec![
            Some(tau),
            Some(tau * sc.osc.gamma_m),
            Some(rep.s_n),
            Some(rep.analytic_threshold),
            rep.empirical_threshold,
            rep.ratio,
            Some(rep.noise_std),
            Some(if rep.bracketed { 1.0 } else { 0.0 }),
        ]);
        for (a, s) in rep.amplitudes.iter().zip(&rep.snr) {
            snr.push(vec![Some(tau), Some(*a), Some(*s)]);
        }
    }
    Ok(Outcome {
        summary: json!({
            "snr_target": d.snr,
            "trials": d.trials,
            "threshold_not_bracketed": !not_bracketed.is_empty(),
            "unbracketed_tau": not_bracketed,
        }),
        tables: vec![thresholds, snr],
        warnings,
    })
}
