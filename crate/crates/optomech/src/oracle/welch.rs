//! Welch spectral estimator.
//!
//! Single-sided density per Hz with `fs = 1 / dt`: a real white sequence of
//! variance `s2` reads `2 s2 dt`. Bin `k` sits at `W_k = 2 pi k / (N dt)` rad/s.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::OracleError;

/// Taper applied to each segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    /// Periodic Hann.
    Hann,
    /// No taper.
    Rectangular,
}

impl Window {
    /// Window samples of length `n`.
    pub fn samples(self, n: usize) -> Vec<f64> {
        match self {
            Window::Hann => (0..n)
                .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
                .collect(),
            Window::Rectangular => vec![1.0; n],
        }
    }
}

/// Segmentation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WelchConfig {
    /// Samples per segment.
    pub segment_len: usize,
    /// Fractional overlap in `[0, 1)`.
    pub overlap: f64,
    /// Taper.
    pub window: Window,
}

impl WelchConfig {
    /// Hop between segment starts.
    pub fn step(&self) -> usize {
        ((self.segment_len as f64) * (1.0 - self.overlap)).round().max(1.0) as usize
    }

    /// Segments that fit in `len` samples.
    pub fn segments(&self, len: usize) -> usize {
        if len < self.segment_len {
            0
        } else {
            (len - self.segment_len) / self.step() + 1
        }
    }

    pub(crate) fn validate(&self) -> Result<(), OracleError> {
        if self.segment_len < 8 {
            return Err(OracleError::Config("segment_len must be >= 8".into()));
        }
        if !(0.0..1.0).contains(&self.overlap) {
            return Err(OracleError::Config("overlap must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

/// Averaged single-sided spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate {
    /// Bin frequencies (rad/s).
    pub omega: Vec<f64>,
    /// Density per Hz.
    pub psd: Vec<f64>,
    /// Standard error per bin.
    pub std_err: Vec<f64>,
    /// Segments averaged.
    pub segments: usize,
    /// Effective number of independent segments after the overlap correction.
    pub effective_segments: f64,
}

/// Accumulates periodograms from any number of records.
pub struct Welch {
    cfg: WelchConfig,
    dt: f64,
    window: Vec<f64>,
    fft: std::sync::Arc<dyn rustfft::Fft<f64>>,
    sum: Vec<f64>,
    segments: usize,
    inv_eff: f64,
    buf: Vec<Complex64>,
}

impl Welch {
    /// Empty accumulator.
    pub fn new(cfg: WelchConfig, dt: f64) -> Result<Self, OracleError> {
        cfg.validate()?;
        let fft = FftPlanner::new().plan_fft_forward(cfg.segment_len);
        Ok(Self {
            window: cfg.window.samples(cfg.segment_len),
            cfg,
            dt,
            fft,
            sum: vec![0.0; cfg.segment_len / 2 + 1],
            segments: 0,
            inv_eff: 0.0,
            buf: vec![Complex64::new(0.0, 0.0); cfg.segment_len],
        })
    }

    /// Variance inflation `1 + 2 sum_j (1 - j/M) rho(j)^2` for `m` overlapping segments.
    fn inflation(&self, m: usize) -> f64 {
        let n = self.cfg.segment_len;
        let step = self.cfg.step();
        let w2: f64 = self.window.iter().map(|w| w * w).sum();
        let mut f = 1.0;
        let mut j = 1;
        while j < m && j * step < n {
            let s = j * step;
            let rho: f64 = (0..n - s).map(|i| self.window[i] * self.window[i + s]).sum::<f64>() / w2;
            f += 2.0 * (1.0 - j as f64 / m as f64) * rho * rho;
            j += 1;
        }
        f
    }

    /// Adds every full segment of `x`.
    pub fn push(&mut self, x: &[f64]) {
        let n = self.cfg.segment_len;
        let m = self.cfg.segments(x.len());
        if m == 0 {
            return;
        }
        let w2: f64 = self.window.iter().map(|w| w * w).sum();
        let scale = self.dt / w2;
        for s in 0..m {
            let start = s * self.cfg.step();
            for (b, (v, w)) in self.buf.iter_mut().zip(x[start..start + n].iter().zip(&self.window)) {
                *b = Complex64::new(v * w, 0.0);
            }
            self.fft.process(&mut self.buf);
            for (k, acc) in self.sum.iter_mut().enumerate() {
                let one_sided = if k == 0 || 2 * k == n { 1.0 } else { 2.0 };
                *acc += one_sided * scale * self.buf[k].norm_sqr();
            }
        }
        // Variance of a mean over independent groups: sum of group variances.
        self.inv_eff += self.inflation(m) * m as f64;
        self.segments += m;
    }

    /// Folds another accumulator with the same configuration into this one.
    pub fn merge(&mut self, other: &Welch) {
        assert_eq!(self.cfg, other.cfg);
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        self.segments += other.segments;
        self.inv_eff += other.inv_eff;
    }

    /// Averaged estimate.
    pub fn finish(&self) -> Result<PsdEstimate, OracleError> {
        if self.segments == 0 {
            return Err(OracleError::TooShort {
                needed: self.cfg.segment_len,
            });
        }
        let m = self.segments as f64;
        let eff = m * m / self.inv_eff;
        let n = self.cfg.segment_len;
        let psd: Vec<f64> = self.sum.iter().map(|s| s / m).collect();
        Ok(PsdEstimate {
            omega: (0..psd.len())
                .map(|k| 2.0 * PI * k as f64 / (n as f64 * self.dt))
                .collect(),
            std_err: psd.iter().map(|p| p / eff.sqrt()).collect(),
            psd,
            segments: self.segments,
            effective_segments: eff,
        })
    }
}

/// One-shot estimate of a single record.
pub fn welch_psd(x: &[f64], dt: f64, cfg: WelchConfig) -> Result<PsdEstimate, OracleError> {
    let mut w = Welch::new(cfg, dt)?;
    w.push(x);
    w.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    fn cfg() -> WelchConfig {
        WelchConfig {
            segment_len: 256,
            overlap: 0.5,
            window: Window::Hann,
        }
    }

    #[test]
    fn white_noise_level() {
        let mut rng = super::super::rng::stream(3, 0, 0);
        let dt = 0.1;
        let x: Vec<f64> = (0..256 * 400).map(|_| StandardNormal.sample(&mut rng)).collect();
        let est = welch_psd(&x, dt, cfg()).unwrap();
        let level = 2.0 * dt;
        let inner = 1..est.psd.len() - 1;
        let within = inner
            .clone()
            .filter(|&k| (est.psd[k] - level).abs() <= 3.0 * est.std_err[k])
            .count();
        assert!(within as f64 >= 0.95 * inner.len() as f64);
    }

    #[test]
    fn sinusoid_power() {
        let n = 256;
        let dt = 0.5;
        let a = 1.7;
        let k0 = 20;
        let w = 2.0 * PI * k0 as f64 / (n as f64 * dt);
        let x: Vec<f64> = (0..n * 40).map(|i| a * (w * i as f64 * dt).cos()).collect();
        let est = welch_psd(&x, dt, cfg()).unwrap();
        let df = 1.0 / (n as f64 * dt);
        let power: f64 = est.psd[k0 - 3..=k0 + 3].iter().sum::<f64>() * df;
        assert!((power - a * a / 2.0).abs() < 1e-9, "{power}");
    }

    #[test]
    fn too_short_is_an_error() {
        assert!(matches!(welch_psd(&[0.0; 10], 1.0, cfg()), Err(OracleError::TooShort { .. })));
    }

    #[test]
    fn overlap_inflation() {
        let w = Welch::new(cfg(), 1.0).unwrap();
        assert_eq!(w.inflation(1), 1.0);
        // Hann at 50 %: rho = 1/6.
        let want = 1.0 + 2.0 * (1.0 - 1.0 / 1000.0) / 36.0;
        assert!((w.inflation(1000) - want).abs() < 1e-12);
    }
}
