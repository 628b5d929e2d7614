//! Rotating-frame integration of the toy and four-probe schemes.
//!
//! `d' = -gamma d + i [f(t) + sqrt(2 gamma) e(t) + G sum_l s_l (a_{l,+n} + a_{l,-n}^*)]`,
//! `b_{l,+n} = a_{l,+n} + i s_l G d`, `b_{l,-n} = a_{l,-n} + i s_l G d^*`, with
//! `s_l = (-1)^(l-1)`. Inputs are held over each step and the update is exact;
//! outputs use the step average of `d`.
//!
//! Per-step inputs are complex Gaussians with `E|a|^2 = (n + 1/2) / dt`, so a
//! recorded quadrature `Re b_+ +- Re b_-` of vacuum reads 1 in the single-sided
//! per-Hz convention.

use optomech_core::schemes::four_probe_names;
use optomech_core::schemes::tone::slow_amplitude;
use optomech_core::{Oscillator, ProbeMode, C64};
use serde::{Deserialize, Serialize};

use super::rng::{stream, ComplexWhite};
use super::OracleError;

/// Scheme parameters seen by the simulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatingSetup {
    /// Oscillator; the bath uses `n_T` at resonance.
    pub osc: Oscillator,
    /// Probe strength `K`.
    pub kappa: f64,
    /// Toy or four-probe.
    pub mode: ProbeMode,
}

impl RotatingSetup {
    /// Validated setup.
    pub fn new(osc: Oscillator, kappa: f64, mode: ProbeMode) -> Result<Self, OracleError> {
        if mode == ProbeMode::Monochromatic {
            return Err(OracleError::Unsupported(
                "the rotating-frame simulator covers the dichromatic schemes".into(),
            ));
        }
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(OracleError::Config("kappa must be finite and >= 0".into()));
        }
        Ok(Self { osc, kappa, mode })
    }

    /// `G = sqrt(K / (4 wM))`.
    pub fn coupling(&self) -> f64 {
        (self.kappa / (4.0 * self.osc.omega_m)).sqrt()
    }

    /// Recorded channel names, matching the builder observables.
    pub fn channel_names(&self) -> Vec<String> {
        match self.mode {
            ProbeMode::FourProbe => four_probe_names()
                .into_iter()
                .flat_map(|(_, _, p, m)| [p, m])
                .collect(),
            _ => vec!["beta_a_plus".into(), "beta_a_minus".into()],
        }
    }

    /// Port sign `s_l` of each sideband pair, in the order of [`Self::channel_names`].
    fn ports(&self) -> Vec<f64> {
        match self.mode {
            ProbeMode::FourProbe => four_probe_names()
                .into_iter()
                .map(|(l, _, _, _)| if l % 2 == 1 { 1.0 } else { -1.0 })
                .collect(),
            _ => vec![1.0],
        }
    }
}

/// Resonant tone `f0 cos((wM + offset) t + phase)`, active inside the record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tone {
    /// Amplitude.
    pub f0: f64,
    /// Offset from resonance (rad/s).
    pub offset: f64,
    /// Phase (rad).
    pub phase: f64,
}

/// Time grid of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Step (s).
    pub dt: f64,
    /// Recorded steps.
    pub steps: usize,
    /// Unrecorded steps run first from `d = 0`.
    pub burn_in: usize,
    /// Master seed.
    pub seed: u64,
    /// Include vacuum and thermal noise.
    pub noise: bool,
}

/// Step-exact response of `x' = -gamma x + u` with held inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleFilter {
    decay: f64,
    gain: f64,
    p: f64,
    q: f64,
}

impl PoleFilter {
    /// Filter for relaxation rate `gamma` and step `dt`.
    pub fn new(gamma: f64, dt: f64) -> Self {
        let x = gamma * dt;
        let decay = (-x).exp();
        // c1 = int_0^dt e^{-gamma s} ds, q = (dt - c1) / (gamma dt).
        let (c1, q) = if x < 1e-4 {
            (
                dt * (1.0 - x / 2.0 + x * x / 6.0),
                dt * (0.5 - x / 6.0 + x * x / 24.0),
            )
        } else {
            let c1 = -(-x).exp_m1() / gamma;
            (c1, (dt - c1) / (gamma * dt))
        };
        Self {
            decay,
            gain: c1,
            p: c1 / dt,
            q,
        }
    }

    /// Advances the state by one step under input `u` and returns the step average.
    #[inline]
    pub fn step<T>(&self, state: &mut T, u: T) -> T
    where
        T: Copy + core::ops::Mul<f64, Output = T> + core::ops::Add<Output = T>,
    {
        let mean = *state * self.p + u * self.q;
        *state = *state * self.decay + u * self.gain;
        mean
    }

    /// Step averages of the response to a real input sequence, from rest.
    pub fn apply(&self, input: &[f64]) -> Vec<f64> {
        let mut s = 0.0;
        input.iter().map(|&u| self.step(&mut s, u)).collect()
    }
}

/// Recorded quadratures of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct HomodyneRecord {
    /// Sample step (s).
    pub dt: f64,
    /// Trajectory index.
    pub trajectory: u64,
    /// Named real series.
    pub channels: Vec<(String, Vec<f64>)>,
    /// Injected tone.
    pub signal: Option<Tone>,
}

impl HomodyneRecord {
    /// Series by name.
    pub fn channel(&self, name: &str) -> Result<&[f64], OracleError> {
        self.channels
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
            .ok_or_else(|| OracleError::MissingChannel(name.into()))
    }
}

/// Integrates one trajectory.
pub fn simulate(
    setup: &RotatingSetup,
    cfg: &SimConfig,
    trajectory: u64,
    signal: Option<&Tone>,
) -> Result<HomodyneRecord, OracleError> {
    let osc = &setup.osc;
    if !(cfg.dt > 0.0) || !(cfg.dt * osc.gamma_m < 0.1) {
        return Err(OracleError::Unstable {
            dt: cfg.dt,
            rate: osc.gamma_m,
        });
    }
    let g = setup.coupling();
    let bath = (2.0 * osc.gamma_m).sqrt();
    let ports = setup.ports();
    let n_t = osc.n_at_resonance();
    let vac = 0.5 / cfg.dt;
    // Channels 0..2P are optical (up, down per pair), 2P is the bath.
    let mut optical: Vec<ComplexWhite> = (0..2 * ports.len() as u64)
        .map(|c| ComplexWhite::new(stream(cfg.seed, trajectory, c), vac))
        .collect();
    let mut thermal = ComplexWhite::new(
        stream(cfg.seed, trajectory, 2 * ports.len() as u64),
        (n_t + 0.5) / cfg.dt,
    );
    let filter = PoleFilter::new(osc.gamma_m, cfg.dt);

    let names = setup.channel_names();
    let mut out: Vec<Vec<f64>> = names.iter().map(|_| Vec::with_capacity(cfg.steps)).collect();
    let mut d = C64::new(0.0, 0.0);
    let mut a = vec![(C64::new(0.0, 0.0), C64::new(0.0, 0.0)); ports.len()];
    let zero = C64::new(0.0, 0.0);
    for k in 0..cfg.burn_in + cfg.steps {
        let mut drive = zero;
        if cfg.noise {
            for (idx, (pair, s)) in a.iter_mut().zip(&ports).enumerate() {
                let (ur, ui) = optical[2 * idx].draw();
                let (dr, di) = optical[2 * idx + 1].draw();
                *pair = (C64::new(ur, ui), C64::new(dr, di));
                drive += (pair.0 + pair.1.conj()) * (g * s);
            }
            let (er, ei) = thermal.draw();
            drive += C64::new(er, ei) * bath;
        }
        let recording = k >= cfg.burn_in;
        if let (Some(tone), true) = (signal, recording) {
            let t = (k - cfg.burn_in) as f64 * cfg.dt + 0.5 * cfg.dt;
            drive += slow_amplitude(tone.f0, tone.offset, tone.phase, t);
        }
        let mean = filter.step(&mut d, C64::new(0.0, 1.0) * drive);
        if recording {
            for (idx, s) in ports.iter().enumerate() {
                let ig = C64::new(0.0, g * s);
                let up = a[idx].0 + ig * mean;
                let down = a[idx].1 + ig * mean.conj();
                out[2 * idx].push(up.re + down.re);
                out[2 * idx + 1].push(up.re - down.re);
            }
        }
    }
    Ok(HomodyneRecord {
        dt: cfg.dt,
        trajectory,
        channels: names.into_iter().zip(out).collect(),
        signal: signal.copied(),
    })
}
