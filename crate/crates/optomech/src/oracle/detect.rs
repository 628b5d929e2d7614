//! Monte Carlo realization of the detection threshold.
//!
//! A tone of amplitude `f0` at offset `W0` acts over the record of length
//! `tau`. Its amplitude is estimated by projecting the post-processed record
//! onto the noiseless response to a unit tone. Records are linear in the
//! force, so each trial's estimate at any `f0` is the noise-only projection
//! plus `f0`; the noise and signal draws use separate streams.

use std::sync::Arc;

use optomech_core::budget::{detection_threshold, scheme_spectrum, DetectionSpec};
use optomech_core::{Band, FrequencyGrid};
use rayon::prelude::*;
use serde::Serialize;

use super::compare::analytic_scheme;
use super::process::postprocess_subtraction;
use super::simulate::{simulate, RotatingSetup, SimConfig, Tone};
use super::OracleError;

/// Inputs of one detection experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionSetup {
    /// Scheme.
    pub setup: RotatingSetup,
    /// Step (s).
    pub dt: f64,
    /// Observation time (s).
    pub tau: f64,
    /// Settling time before the window (s).
    pub burn_in: f64,
    /// Signal offset from resonance (rad/s).
    pub offset: f64,
    /// Signal phase (rad).
    pub phase: f64,
    /// Independent trials.
    pub trials: u64,
    /// Master seed.
    pub seed: u64,
    /// Amplitudes at which the SNR is reported.
    pub amplitudes: Vec<f64>,
    /// SNR assigned to the threshold.
    pub snr: f64,
}

/// Outcome of a detection experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionReport {
    /// Observation time (s).
    pub tau: f64,
    /// Trials.
    pub trials: u64,
    /// Reported amplitudes.
    pub amplitudes: Vec<f64>,
    /// Empirical `mean / std` of the estimate at each amplitude.
    pub snr: Vec<f64>,
    /// Mean of the noise-only estimate.
    pub noise_mean: f64,
    /// Standard deviation of the noise-only estimate.
    pub noise_std: f64,
    /// Amplitude where the empirical SNR crosses the target, interpolated on the grid.
    pub empirical_threshold: Option<f64>,
    /// `snr * sqrt(S_n(W0) dw / 2 pi)`.
    pub analytic_threshold: f64,
    /// Engine `S_n(W0)`.
    pub s_n: f64,
    /// `empirical / analytic`.
    pub ratio: Option<f64>,
    /// False when the amplitude grid does not straddle the crossing.
    pub bracketed: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Runs the experiment.
pub fn detection_mc(d: &DetectionSetup) -> Result<DetectionReport, OracleError> {
    if d.trials < 2 {
        return Err(OracleError::Config("detection needs at least 2 trials".into()));
    }
    if !(d.tau > 0.0) || !(d.dt > 0.0) || d.tau < 10.0 * d.dt {
        return Err(OracleError::Config("tau must span at least 10 steps".into()));
    }
    let steps = (d.tau / d.dt).round() as usize;
    let base = SimConfig {
        dt: d.dt,
        steps,
        burn_in: (d.burn_in / d.dt).round() as usize,
        seed: d.seed,
        noise: true,
    };
    let unit = Tone {
        f0: 1.0,
        offset: d.offset,
        phase: d.phase,
    };
    let quiet = SimConfig { noise: false, ..base };
    let (_, template) = postprocess_subtraction(&d.setup, &simulate(&d.setup, &quiet, 0, Some(&unit))?, None)?;
    let norm = dot(&template, &template);
    if !(norm > 0.0) {
        return Err(OracleError::Config("signal leaves no trace in the record".into()));
    }

    let estimates: Vec<f64> = (0..d.trials)
        .into_par_iter()
        .map(|t| {
            let rec = simulate(&d.setup, &base, t, None)?;
            let (_, b) = postprocess_subtraction(&d.setup, &rec, None)?;
            Ok(dot(&b, &template) / norm)
        })
        .collect::<Result<_, OracleError>>()?;
    let n = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let std = (estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();

    let snr: Vec<f64> = d.amplitudes.iter().map(|f| (f + mean) / std).collect();
    let mut empirical = None;
    for i in 1..snr.len() {
        let (s0, s1) = (snr[i - 1] - d.snr, snr[i] - d.snr);
        if s0 == 0.0 {
            empirical = Some(d.amplitudes[i - 1]);
            break;
        }
        if s0 * s1 <= 0.0 && s1 != s0 {
            let x = s0 / (s0 - s1);
            empirical = Some(d.amplitudes[i - 1] + x * (d.amplitudes[i] - d.amplitudes[i - 1]));
            break;
        }
    }

    let grid = Arc::new(FrequencyGrid::symmetric(&[d.offset.abs()], d.offset == 0.0, Band::Baseband)?);
    let spec = scheme_spectrum(&analytic_scheme(&d.setup, grid.clone())?)?;
    let s_n = spec.total[grid.index_of(d.offset.abs()).expect("on grid")];
    let detection = DetectionSpec::new(0.0, d.offset, steps as f64 * d.dt)?;
    let analytic = detection_threshold(&detection, s_n, d.snr)?;
    Ok(DetectionReport {
        tau: steps as f64 * d.dt,
        trials: d.trials,
        amplitudes: d.amplitudes.clone(),
        snr,
        noise_mean: mean,
        noise_std: std,
        bracketed: empirical.is_some(),
        ratio: empirical.map(|e| e / analytic),
        empirical_threshold: empirical,
        analytic_threshold: analytic,
        s_n,
    })
}
