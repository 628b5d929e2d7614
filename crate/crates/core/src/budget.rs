//! Force-referred spectra and sensitivity figures.
//!
//! `S_n(W) = psd(O) / (g^2 |s(W)|^2)` where `s` is the signal transfer of the
//! observable and `g^2` the scheme's force gain (see [`crate::convention`]).
//! The optical part of the noise is split into back action (the component
//! lying in the span of the scheme's mirror-drive directions) and shot (the
//! orthogonal remainder), both measured in the channel-weighted metric so the
//! split is exact.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{param, Error, Result};
use crate::form::LinearForm;
use crate::grid::{Band, FrequencyGrid};
use crate::mechanics::{susceptibility, thermal_occupation, Oscillator};
use crate::schemes::{build_monochromatic, HomodyneAngle, Probe, ProbeMode, SchemeInstance};
use crate::C64;
#[allow(unused_imports)] // inherent methods shadow it when std is linked
use num_traits::Float;

/// Parameters recorded alongside a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumParams {
    /// Scheme identifier.
    pub scheme: &'static str,
    /// Observable the spectrum refers to.
    pub observable: String,
    /// Probe strength `K`.
    pub kappa: f64,
    /// `gamma_M`.
    pub gamma_m: f64,
    /// `wM`.
    pub omega_m: f64,
    /// `n_T` at resonance.
    pub n_thermal: f64,
    /// Homodyne angle per grid point (monochromatic only).
    pub angles: Option<Vec<f64>>,
}

/// Single-sided force-referred spectrum with its decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// Grid the spectrum is sampled on.
    pub grid: Arc<FrequencyGrid>,
    /// `S_n`.
    pub total: Vec<f64>,
    /// Readout noise.
    pub shot: Vec<f64>,
    /// Noise entering through the mirror motion.
    pub backaction: Vec<f64>,
    /// Bath noise.
    pub thermal: Vec<f64>,
    /// Snapshot of the inputs.
    pub params: SpectrumParams,
}

/// Unreferred noise components of a quadrature at each grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// Readout part.
    pub shot: Vec<f64>,
    /// Back-action part.
    pub backaction: Vec<f64>,
    /// Bath part.
    pub thermal: Vec<f64>,
    /// Norm of the back-action coefficient vector (unweighted).
    pub backaction_amplitude: Vec<f64>,
}

fn coeffs(form: &LinearForm, j: usize, optical: &[usize]) -> Vec<C64> {
    let mut c = Vec::with_capacity(2 * optical.len());
    for &i in optical {
        c.push(form.u(j, i));
        c.push(form.v(j, i));
    }
    c
}

fn dot(w: &[f64], a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).zip(w).map(|((x, y), m)| x.conj() * y * *m).sum()
}

/// Splits the PSD of `form` into shot, back action and thermal parts.
///
/// `drive` lists the mirror-drive directions; they must live on the same grid
/// and basis as `form`.
pub fn decompose(form: &LinearForm, drive: &[LinearForm]) -> Result<Decomposition> {
    // Validates kind.
    form.psd()?;
    let basis = form.basis();
    for d in drive {
        if !Arc::ptr_eq(d.grid(), form.grid()) && **d.grid() != **form.grid() {
            return Err(Error::Structure("drive direction on a different grid".into()));
        }
        if !Arc::ptr_eq(d.basis(), basis) && **d.basis() != **basis {
            return Err(Error::Structure("drive direction on a different basis".into()));
        }
    }
    let optical: Vec<usize> = (0..basis.len())
        .filter(|&i| basis.channel(i).label.is_optical())
        .collect();
    let bath: Vec<usize> = (0..basis.len())
        .filter(|&i| !basis.channel(i).label.is_optical())
        .collect();
    let n = form.grid().len();
    let mut out = Decomposition {
        shot: vec![0.0; n],
        backaction: vec![0.0; n],
        thermal: vec![0.0; n],
        backaction_amplitude: vec![0.0; n],
    };
    for j in 0..n {
        let metric: Vec<f64> = optical
            .iter()
            .flat_map(|&i| {
                let w = 2.0 * basis.channel(i).stats.weight(j);
                [w, w]
            })
            .collect();
        let c = coeffs(form, j, &optical);
        // Gram-Schmidt on the drive directions at this point.
        let mut ortho: Vec<Vec<C64>> = Vec::new();
        for d in drive {
            let mut e = coeffs(d, j, &optical);
            for q in &ortho {
                let p = dot(&metric, q, &e);
                for (x, y) in e.iter_mut().zip(q) {
                    *x -= p * y;
                }
            }
            let nrm = dot(&metric, &e, &e).re.sqrt();
            if nrm > 1e-300 {
                for x in e.iter_mut() {
                    *x /= nrm;
                }
                ortho.push(e);
            }
        }
        let mut proj = vec![C64::new(0.0, 0.0); c.len()];
        for q in &ortho {
            let p = dot(&metric, q, &c);
            for (x, y) in proj.iter_mut().zip(q) {
                *x += p * y;
            }
        }
        let rest: Vec<C64> = c.iter().zip(&proj).map(|(a, b)| a - b).collect();
        out.backaction[j] = dot(&metric, &proj, &proj).re;
        out.shot[j] = dot(&metric, &rest, &rest).re;
        out.backaction_amplitude[j] = proj.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        out.thermal[j] = bath
            .iter()
            .map(|&i| {
                2.0 * (form.u(j, i).norm_sqr() + form.v(j, i).norm_sqr())
                    * basis.channel(i).stats.weight(j)
            })
            .sum();
    }
    Ok(out)
}

/// Force-referred spectrum of a named observable.
pub fn force_referred_psd(scheme: &SchemeInstance, name: &str) -> Result<SpectrumResult> {
    let form = scheme.observable(name)?;
    let total = form.psd()?;
    let parts = decompose(form, scheme.drive_directions())?;
    let gain = scheme.force_gain_sq();
    let s = form.signal_transfer();
    let grid = scheme.grid().clone();
    let mut denom = Vec::with_capacity(grid.len());
    for (j, sj) in s.iter().enumerate() {
        let d = gain * sj.norm_sqr();
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::SingularReferral { omega: grid.omega(j) });
        }
        denom.push(d);
    }
    let refer = |v: Vec<f64>| -> Vec<f64> { v.iter().zip(&denom).map(|(x, d)| x / d).collect() };
    let osc = scheme.oscillator();
    Ok(SpectrumResult {
        grid,
        total: refer(total),
        shot: refer(parts.shot),
        backaction: refer(parts.backaction),
        thermal: refer(parts.thermal),
        params: SpectrumParams {
            scheme: scheme.kind().name(),
            observable: name.into(),
            kappa: scheme.probe().kappa,
            gamma_m: osc.gamma_m,
            omega_m: osc.omega_m,
            n_thermal: osc.n_at_resonance(),
            angles: scheme.homodyne_angles().map(|a| a.to_vec()),
        },
    })
}

/// Force-referred spectrum of the scheme's default signal observable.
pub fn scheme_spectrum(scheme: &SchemeInstance) -> Result<SpectrumResult> {
    force_referred_psd(scheme, scheme.signal_observable())
}

fn occupation_at(osc: &Oscillator, omega: f64) -> f64 {
    if omega > 0.0 {
        thermal_occupation(osc, omega).unwrap_or(0.0)
    } else {
        0.0
    }
}

/// Optimum-power spectrum at `omega_f0`:
/// `2 gamma_M w (2 n_T + 1) / wM + |Z(w)| / wM`; at `gamma_M = 0` this is the force SQL.
pub fn sql(osc: &Oscillator, omega_f0: f64) -> Result<f64> {
    if !(omega_f0 >= 0.0) {
        return Err(param("omega_f0", "must be >= 0"));
    }
    let z = susceptibility(osc, omega_f0).norm();
    let thermal = 2.0 * osc.gamma_m * omega_f0 * (2.0 * occupation_at(osc, omega_f0) + 1.0);
    Ok((thermal + z) / osc.omega_m)
}

/// True when the SQL collapses to zero at an undamped resonance.
pub fn sql_is_degenerate(osc: &Oscillator, omega_f0: f64) -> bool {
    osc.gamma_m == 0.0 && susceptibility(osc, omega_f0).norm() == 0.0
}

/// Reference for the rotating-frame schemes: `|Z(wM + W)| / wM` with `gamma_M = 0`.
pub fn resonant_sql_reference(osc: &Oscillator, offset: f64) -> f64 {
    let w = osc.omega_m + offset;
    (osc.omega_m * osc.omega_m - w * w).abs() / osc.omega_m
}

/// Probe strength minimizing the phase-readout spectrum at `omega_f0`: `K* = |Z(omega_f0)|`.
pub fn optimize_kappa(osc: &Oscillator, omega_f0: f64) -> Result<f64> {
    let z = susceptibility(osc, omega_f0).norm();
    if !(z > 0.0) {
        return Err(Error::Degenerate(alloc::format!(
            "|Z| = 0 at omega = {omega_f0}, no finite optimum"
        )));
    }
    Ok(z)
}

/// Phase-readout `S_n(omega_f0)` assembled by the engine for each `K` in `kappas`.
pub fn kappa_sweep(osc: &Oscillator, omega_f0: f64, kappas: &[f64]) -> Result<Vec<f64>> {
    if !(omega_f0 > 0.0) {
        return Err(param("omega_f0", "must be > 0"));
    }
    let grid = Arc::new(FrequencyGrid::symmetric(&[omega_f0], false, Band::Absolute)?);
    let j = grid.index_of(omega_f0).expect("on grid");
    kappas
        .iter()
        .map(|&k| {
            let probe = Probe::new(k, ProbeMode::Monochromatic)?;
            let scheme =
                build_monochromatic(osc, &probe, grid.clone(), HomodyneAngle::PHASE)?;
            Ok(force_referred_psd(&scheme, "b_psi")?.total[j])
        })
        .collect()
}

/// Width of the band where the variational readout beats the SQL:
/// `|Z(omega_f0)|^2 / (2 omega_f0 K)`.
pub fn sub_sql_bandwidth(osc: &Oscillator, kappa: f64, omega_f0: f64) -> Result<f64> {
    if !(omega_f0 > 0.0) {
        return Err(param("omega_f0", "must be > 0"));
    }
    if !(kappa > 0.0) {
        return Err(param("kappa", "must be > 0"));
    }
    Ok(susceptibility(osc, omega_f0).norm_sqr() / (2.0 * omega_f0 * kappa))
}

/// Back-action-free monochromatic spectrum at `omega_f0`:
/// `2 gamma_M w (2 n_T + 1) / wM + |Z|^2 / (2 K wM)`.
///
/// The engine's `b_psi` at the optimal angle agrees exactly when `gamma_M = 0`;
/// for `gamma_M > 0` it carries an extra `2 K gamma_M^2 w^2 / (|Z|^2 wM)`.
pub fn variational_psd(osc: &Oscillator, kappa: f64, omega_f0: f64) -> Result<f64> {
    crate::schemes::optimal_homodyne_angle(osc, kappa, omega_f0)?;
    let z2 = susceptibility(osc, omega_f0).norm_sqr();
    let thermal = 2.0 * osc.gamma_m * omega_f0 * (2.0 * occupation_at(osc, omega_f0) + 1.0);
    Ok((thermal + z2 / (2.0 * kappa)) / osc.omega_m)
}

/// Signal of duration `tau` at `omega_f0` with amplitude `f_s0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionSpec {
    /// Force amplitude.
    pub f_s0: f64,
    /// Signal frequency (rad/s).
    pub omega_f0: f64,
    /// Observation time (s).
    pub tau: f64,
}

impl DetectionSpec {
    /// Validated spec.
    pub fn new(f_s0: f64, omega_f0: f64, tau: f64) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(param("tau", "must be finite and > 0"));
        }
        if !(f_s0 >= 0.0) {
            return Err(param("f_s0", "must be >= 0"));
        }
        Ok(Self { f_s0, omega_f0, tau })
    }

    /// Measurement bandwidth `2 pi / tau`.
    pub fn bandwidth(&self) -> f64 {
        2.0 * core::f64::consts::PI / self.tau
    }
}

/// SNR assigned to the threshold amplitude.
pub const DEFAULT_SNR: f64 = 1.0;

/// Minimal detectable amplitude `snr * sqrt(S_n dw / 2 pi)`.
pub fn detection_threshold(spec: &DetectionSpec, s_n: f64, snr: f64) -> Result<f64> {
    if !(s_n >= 0.0) || !s_n.is_finite() {
        return Err(param("s_n", "must be finite and >= 0"));
    }
    Ok(snr * (s_n * spec.bandwidth() / (2.0 * core::f64::consts::PI)).sqrt())
}

/// `f_s0 / threshold` at unit SNR.
pub fn snr(spec: &DetectionSpec, s_n: f64) -> Result<f64> {
    Ok(spec.f_s0 / detection_threshold(spec, s_n, DEFAULT_SNR)?)
}
