//! Empirical spectra of simulated records against the engine's predictions.

use std::sync::Arc;

use optomech_core::schemes::{build_four_probe, build_toy_dichromatic};
use optomech_core::{Band, FrequencyGrid, Probe, ProbeMode, SchemeInstance};
use rayon::prelude::*;
use serde::Serialize;

use super::process::postprocess_subtraction;
use super::simulate::{simulate, RotatingSetup, SimConfig};
use super::welch::Welch;
use super::{OracleConfig, OracleError};

/// One channel's analytic and empirical spectra over the compared bins.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelComparison {
    /// Observable name.
    pub name: String,
    /// Bin frequencies (rad/s).
    pub omega: Vec<f64>,
    /// Engine PSD.
    pub analytic: Vec<f64>,
    /// Welch estimate.
    pub empirical: Vec<f64>,
    /// Welch standard error.
    pub std_err: Vec<f64>,
    /// RMS of `empirical / analytic - 1`.
    pub rms: f64,
}

/// Result of a spectral oracle run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    /// Raw quadratures followed by the combined record.
    pub channels: Vec<ChannelComparison>,
    /// Welch segments per channel.
    pub segments: usize,
    /// Segments after the overlap correction.
    pub effective_segments: f64,
    /// Largest channel RMS.
    pub worst_rms: f64,
}

/// Builds the scheme whose observables the oracle records.
pub fn analytic_scheme(
    setup: &RotatingSetup,
    grid: Arc<FrequencyGrid>,
) -> Result<SchemeInstance, OracleError> {
    let probe = Probe::new(setup.kappa, setup.mode)?;
    Ok(match setup.mode {
        ProbeMode::FourProbe => build_four_probe(&setup.osc, &probe, grid)?,
        _ => build_toy_dichromatic(&setup.osc, &probe, grid)?,
    })
}

/// Runs `cfg.trajectories` noise-only trajectories and compares every
/// recorded quadrature and the post-processed record with the engine over the
/// central 80 % of `cfg.band`.
pub fn oracle_spectra(
    setup: &RotatingSetup,
    cfg: &OracleConfig,
    seed: u64,
) -> Result<OracleReport, OracleError> {
    cfg.validate()?;
    let sim = SimConfig {
        dt: cfg.dt,
        steps: cfg.steps(),
        burn_in: (cfg.burn_in / cfg.dt).round() as usize,
        seed,
        noise: true,
    };
    let per_traj: Vec<(Vec<String>, Vec<Welch>)> = (0..cfg.trajectories)
        .into_par_iter()
        .map(|t| {
            let rec = simulate(setup, &sim, t, None)?;
            let (cname, combined) = postprocess_subtraction(setup, &rec, None)?;
            let mut names = Vec::new();
            let mut accs = Vec::new();
            for (name, series) in rec.channels.iter().map(|(n, s)| (n.clone(), s)).chain([(cname, &combined)]) {
                let mut w = Welch::new(cfg.welch, cfg.dt)?;
                w.push(series);
                names.push(name);
                accs.push(w);
            }
            Ok((names, accs))
        })
        .collect::<Result<_, OracleError>>()?;

    let mut iter = per_traj.into_iter();
    let (names, mut total) = iter.next().expect("at least one trajectory");
    for (_, accs) in iter {
        for (a, b) in total.iter_mut().zip(&accs) {
            a.merge(b);
        }
    }

    let (lo, hi) = (cfg.band[0], cfg.band[1]);
    let (clo, chi) = (lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo));
    let first = total[0].finish()?;
    let bins: Vec<usize> = (0..first.omega.len())
        .filter(|&k| first.omega[k] >= clo && first.omega[k] <= chi && first.omega[k] > 0.0)
        .collect();
    if bins.is_empty() {
        return Err(OracleError::Config("no Welch bins inside the compared band".into()));
    }
    let positive: Vec<f64> = bins.iter().map(|&k| first.omega[k]).collect();
    let grid = Arc::new(FrequencyGrid::symmetric(&positive, false, Band::Baseband)?);
    let scheme = analytic_scheme(setup, grid.clone())?;

    let mut channels = Vec::new();
    for (name, acc) in names.iter().zip(&total) {
        let est = acc.finish()?;
        let psd = scheme.observable(name)?.psd()?;
        let analytic: Vec<f64> = positive
            .iter()
            .map(|&w| psd[grid.index_of(w).expect("on grid")])
            .collect();
        let empirical: Vec<f64> = bins.iter().map(|&k| est.psd[k]).collect();
        let std_err: Vec<f64> = bins.iter().map(|&k| est.std_err[k]).collect();
        let rms = (analytic
            .iter()
            .zip(&empirical)
            .map(|(a, e)| (e / a - 1.0).powi(2))
            .sum::<f64>()
            / analytic.len() as f64)
            .sqrt();
        channels.push(ChannelComparison {
            name: name.clone(),
            omega: positive.clone(),
            analytic,
            empirical,
            std_err,
            rms,
        });
    }
    Ok(OracleReport {
        worst_rms: channels.iter().map(|c| c.rms).fold(0.0, f64::max),
        segments: first.segments,
        effective_segments: first.effective_segments,
        channels,
    })
}
