//! Lab-frame integration of the monochromatic readout.
//!
//! `x'' + 2 gamma x' + wM^2 x = sqrt(2 K wM) a_a(t) + 2 wM (f(t) + f_fl(t))`,
//! recorded as `b_a = a_a` and `b_phi = a_phi + sqrt(2) G x`. The bath force is
//! white with the coupling taken at `wM`, so agreement with the engine's
//! `|w|`-dependent bath holds near resonance or when thermal noise is small.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{Matrix2, SMatrix, Vector2};
use optomech_core::schemes::{build_monochromatic, tone::lab_force, HomodyneAngle};
use optomech_core::{Band, FrequencyGrid, Oscillator, Probe, ProbeMode};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::compare::{ChannelComparison, OracleReport};
use super::rng::stream;
use super::simulate::{HomodyneRecord, SimConfig, Tone};
use super::welch::Welch;
use super::{OracleConfig, OracleError};

/// Step-exact propagator with step-averaged position.
struct Propagator {
    phi: Matrix2<f64>,
    gamma_in: Vector2<f64>,
    mean_state: Vector2<f64>,
    mean_in: f64,
}

impl Propagator {
    fn new(osc: &Oscillator, dt: f64) -> Self {
        let a = Matrix2::new(0.0, 1.0, -osc.omega_m * osc.omega_m, -2.0 * osc.gamma_m);
        // exp([[A, I, 0], [0, 0, I], [0, 0, 0]] dt) carries the single and double integrals of e^{A s}.
        let mut m = SMatrix::<f64, 6, 6>::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&(a * dt));
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&(Matrix2::identity() * dt));
        m.fixed_view_mut::<2, 2>(2, 4).copy_from(&(Matrix2::identity() * dt));
        let e = m.exp();
        let e11: Matrix2<f64> = e.fixed_view::<2, 2>(0, 0).into();
        let e12: Matrix2<f64> = e.fixed_view::<2, 2>(0, 2).into();
        let e13: Matrix2<f64> = e.fixed_view::<2, 2>(0, 4).into();
        let b = Vector2::new(0.0, 1.0);
        Self {
            phi: e11,
            gamma_in: e12 * b,
            mean_state: Vector2::new(e12[(0, 0)], e12[(0, 1)]) / dt,
            mean_in: (e13 * b)[0] / dt,
        }
    }

    #[inline]
    fn step(&self, s: &mut Vector2<f64>, w: f64) -> f64 {
        let mean = self.mean_state.dot(s) + self.mean_in * w;
        *s = self.phi * *s + self.gamma_in * w;
        mean
    }
}

/// Integrates one lab-frame trajectory; the tone is `f0 cos(offset t + phase)`.
pub fn simulate_mono(
    osc: &Oscillator,
    kappa: f64,
    cfg: &SimConfig,
    trajectory: u64,
    signal: Option<&Tone>,
) -> Result<HomodyneRecord, OracleError> {
    let rate = osc.omega_m.max(osc.gamma_m);
    if !(cfg.dt > 0.0) || !(cfg.dt * rate < 0.1) {
        return Err(OracleError::Unstable { dt: cfg.dt, rate });
    }
    let g = (kappa / (4.0 * osc.omega_m)).sqrt();
    let drive = (2.0 * kappa * osc.omega_m).sqrt();
    let quad = (0.5 / cfg.dt).sqrt();
    let bath = (2.0 * osc.gamma_m * (osc.n_at_resonance() + 0.5) / cfg.dt).sqrt();
    let mut ra = stream(cfg.seed, trajectory, 0);
    let mut rp = stream(cfg.seed, trajectory, 1);
    let mut rb = stream(cfg.seed, trajectory, 2);
    let prop = Propagator::new(osc, cfg.dt);
    let mut s = Vector2::zeros();
    let mut b_a = Vec::with_capacity(cfg.steps);
    let mut b_phi = Vec::with_capacity(cfg.steps);
    for k in 0..cfg.burn_in + cfg.steps {
        let (aa, ap, ff) = if cfg.noise {
            let aa: f64 = StandardNormal.sample(&mut ra);
            let ap: f64 = StandardNormal.sample(&mut rp);
            let ff: f64 = StandardNormal.sample(&mut rb);
            (quad * aa, quad * ap, bath * ff)
        } else {
            (0.0, 0.0, 0.0)
        };
        let recording = k >= cfg.burn_in;
        let f = match (signal, recording) {
            (Some(t), true) => lab_force(t.f0, t.offset, t.phase, (k - cfg.burn_in) as f64 * cfg.dt + 0.5 * cfg.dt),
            _ => 0.0,
        };
        let x = prop.step(&mut s, drive * aa + 2.0 * osc.omega_m * (f + ff));
        if recording {
            b_a.push(aa);
            b_phi.push(ap + std::f64::consts::SQRT_2 * g * x);
        }
    }
    Ok(HomodyneRecord {
        dt: cfg.dt,
        trajectory,
        channels: vec![("b_a".into(), b_a), ("b_phi".into(), b_phi)],
        signal: signal.copied(),
    })
}

/// Welch spectra of `b_a` and `b_phi` against the engine over the central 80 % of the band.
pub fn mono_spectra(
    osc: &Oscillator,
    kappa: f64,
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
    let per: Vec<Vec<Welch>> = (0..cfg.trajectories)
        .into_par_iter()
        .map(|t| {
            let rec = simulate_mono(osc, kappa, &sim, t, None)?;
            rec.channels
                .iter()
                .map(|(_, x)| {
                    let mut w = Welch::new(cfg.welch, cfg.dt)?;
                    w.push(x);
                    Ok(w)
                })
                .collect::<Result<Vec<_>, OracleError>>()
        })
        .collect::<Result<_, _>>()?;
    let mut it = per.into_iter();
    let mut total = it.next().expect("trajectories >= 1");
    for accs in it {
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
    let grid = Arc::new(FrequencyGrid::symmetric(&positive, false, Band::Absolute)?);
    let probe = Probe::new(kappa, ProbeMode::Monochromatic)?;
    let scheme = build_monochromatic(osc, &probe, grid.clone(), HomodyneAngle::Fixed(PI / 2.0))?;
    let mut channels = Vec::new();
    for (name, acc) in ["b_a", "b_phi"].iter().zip(&total) {
        let est = acc.finish()?;
        let psd = scheme.observable(name)?.psd()?;
        let analytic: Vec<f64> = positive.iter().map(|&w| psd[grid.index_of(w).expect("on grid")]).collect();
        let empirical: Vec<f64> = bins.iter().map(|&k| est.psd[k]).collect();
        let rms = (analytic.iter().zip(&empirical).map(|(a, e)| (e / a - 1.0).powi(2)).sum::<f64>()
            / analytic.len() as f64)
            .sqrt();
        channels.push(ChannelComparison {
            name: name.to_string(),
            omega: positive.clone(),
            std_err: bins.iter().map(|&k| est.std_err[k]).collect(),
            analytic,
            empirical,
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
