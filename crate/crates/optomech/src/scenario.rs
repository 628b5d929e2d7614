//! Turns a parsed configuration into engine objects, checking every section
//! before any computation starts.

use std::sync::Arc;

use optomech_core::physical::{PhysicalOscillator, PhysicalProbe};
use optomech_core::schemes::{build_four_probe, build_monochromatic, build_toy_dichromatic, DcDrive, HomodyneAngle};
use optomech_core::{Band, FrequencyGrid, Oscillator, Probe, ProbeMode, SchemeInstance, C64};

use crate::config::*;
use crate::envelope::NormalizedEcho;
use crate::error::AppError;
use crate::oracle::RotatingSetup;

/// Validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    /// Configuration as parsed.
    pub config: ScenarioConfig,
    /// Engine oscillator.
    pub osc: Oscillator,
    /// Engine probe (with DC amplitudes for SI toy inputs).
    pub probe: Probe,
    /// Frequency grid of the spectrum.
    pub grid: Arc<FrequencyGrid>,
    /// Homodyne angle (monochromatic only).
    pub angle: Option<HomodyneAngle>,
}

/// Engine mode of a scheme name.
pub fn probe_mode(s: SchemeName) -> ProbeMode {
    match s {
        SchemeName::Monochromatic => ProbeMode::Monochromatic,
        SchemeName::ToyDichromatic => ProbeMode::DichromaticToy,
        SchemeName::FourProbe => ProbeMode::FourProbe,
    }
}

/// Grid band of a scheme.
pub fn band(s: SchemeName) -> Band {
    match s {
        SchemeName::Monochromatic => Band::Absolute,
        _ => Band::Baseband,
    }
}

fn si_field(name: &str) -> &str {
    match name {
        "mass" => "mass_kg",
        "temperature" => "temperature_k",
        "wavelength" => "wavelength_m",
        "power" => "power_w",
        other => other,
    }
}

fn at_si(prefix: &str, e: optomech_core::Error) -> AppError {
    match e {
        optomech_core::Error::Parameter { name, reason } => {
            AppError::validation_at(format!("{prefix}.{}", si_field(name)), format!("invalid parameter: {reason}"))
        }
        other => AppError::from(other).at(prefix),
    }
}

impl Scenario {
    /// Checks the configuration; no analysis is run.
    pub fn resolve(config: ScenarioConfig) -> Result<Self, AppError> {
        let scheme = config.scheme;
        let mode = probe_mode(scheme);
        let mono = scheme == SchemeName::Monochromatic;

        let (osc, phys) = match &config.oscillator {
            OscillatorInput::Normalized(n) => (
                Oscillator::new(n.omega_m, n.gamma_m, n.n_thermal)
                    .map_err(|e| AppError::from(e).at("oscillator.normalized"))?,
                None,
            ),
            OscillatorInput::Si(s) => {
                let p = PhysicalOscillator::new(s.mass_kg, s.omega_m, s.gamma_m, s.temperature_k)
                    .map_err(|e| at_si("oscillator.si", e))?;
                let osc = match s.occupation {
                    OccupationModel::Resonant => p.normalized(),
                    OccupationModel::PerFrequency if mono => p.normalized_frequency_dependent(),
                    OccupationModel::PerFrequency => {
                        return Err(AppError::validation_at(
                            "oscillator.si.occupation",
                            "per_frequency occupation needs the monochromatic scheme",
                        ))
                    }
                };
                (osc, Some(p))
            }
        };

        let probe = match (&config.probe, &phys) {
            (ProbeInput::Kappa(k), _) => Probe::new(*k, mode).map_err(|e| AppError::from(e).at("probe"))?,
            (ProbeInput::Si(_), None) => {
                return Err(AppError::validation_at("probe.si", "an SI probe needs an SI oscillator (mass)"))
            }
            (ProbeInput::Si(s), Some(p)) => {
                let pp = PhysicalProbe::from_wavelength_power(s.wavelength_m, s.power_w, mode)
                    .map_err(|e| at_si("probe.si", e))?;
                let probe = pp.normalized(p);
                if scheme == SchemeName::ToyDichromatic {
                    let f_comp = config.feedback_force.map(|[re, im]| C64::new(re, im));
                    probe.with_dc(DcDrive { kx0: pp.kx0(p), amp_plus: pp.amplitude, amp_minus: pp.amplitude, f_comp })
                } else {
                    probe
                }
            }
        };
        if let Some(f) = config.feedback_force {
            if scheme != SchemeName::ToyDichromatic || phys.is_none() {
                return Err(AppError::validation_at(
                    "feedback_force",
                    "only meaningful for the toy scheme with SI inputs",
                ));
            }
            if !f.iter().all(|x| x.is_finite()) {
                return Err(AppError::validation_at("feedback_force", "must be finite"));
            }
        }

        let angle = match (mono, config.homodyne) {
            (true, None) => {
                return Err(AppError::validation_at("homodyne", "required for the monochromatic scheme"))
            }
            (true, Some(HomodyneInput::Phase)) => Some(HomodyneAngle::PHASE),
            (true, Some(HomodyneInput::Optimal)) => Some(HomodyneAngle::Optimal),
            (true, Some(HomodyneInput::Fixed(psi))) => {
                if !psi.is_finite() {
                    return Err(AppError::validation_at("homodyne.fixed", "must be finite"));
                }
                Some(HomodyneAngle::Fixed(psi))
            }
            (false, Some(_)) => {
                return Err(AppError::validation_at("homodyne", "only the monochromatic scheme has a homodyne angle"))
            }
            (false, None) => None,
        };

        let g = &config.grid;
        let grid = FrequencyGrid::uniform(g.min, g.max, g.points, band(scheme))
            .map_err(|e| match e {
                optomech_core::Error::Parameter { reason, .. } => AppError::validation_at("grid", reason),
                other => other.into(),
            })?;

        let s = Self { config, osc, probe, grid: Arc::new(grid), angle };
        s.check_sections()?;
        Ok(s)
    }

    fn check_sections(&self) -> Result<(), AppError> {
        let c = &self.config;
        let mono = c.scheme == SchemeName::Monochromatic;
        if let Some(sw) = &c.sweep {
            check_sweep(sw, mono).map_err(|e| e.at("sweep"))?;
        }
        if let Some(o) = &c.oracle {
            o.validate().map_err(|e| AppError::from(e).at("oracle"))?;
            self.check_step("oracle.dt", o.dt)?;
            if !mono {
                self.rotating_setup().map_err(|e| e.at("oracle"))?;
            }
        }
        if let Some(d) = &c.detect {
            if mono {
                return Err(AppError::validation_at("detect", "detection runs on the rotating-frame schemes"));
            }
            check_detect(d).map_err(|e| e.at("detect"))?;
            self.check_step("detect.dt", d.dt)?;
        }
        Ok(())
    }

    // the simulators need dt * rate < 0.1
    fn check_step(&self, path: &str, dt: f64) -> Result<(), AppError> {
        let rate = match self.config.scheme {
            SchemeName::Monochromatic => self.osc.omega_m.max(self.osc.gamma_m),
            _ => self.osc.gamma_m,
        };
        if dt * rate < 0.1 {
            Ok(())
        } else {
            Err(AppError::validation_at(path, format!("dt * rate = {} must be < 0.1", dt * rate)))
        }
    }

    /// Oracle setup of a rotating-frame scheme.
    pub fn rotating_setup(&self) -> Result<RotatingSetup, AppError> {
        Ok(RotatingSetup::new(self.osc, self.probe.kappa, self.probe.mode)?)
    }

    /// Builds the scheme on `grid` with the given parameters.
    pub fn build(
        &self,
        osc: &Oscillator,
        probe: &Probe,
        grid: Arc<FrequencyGrid>,
        angle: Option<HomodyneAngle>,
    ) -> Result<SchemeInstance, AppError> {
        Ok(match self.config.scheme {
            SchemeName::Monochromatic => {
                build_monochromatic(osc, probe, grid, angle.expect("checked in resolve"))?
            }
            SchemeName::ToyDichromatic => build_toy_dichromatic(osc, probe, grid)?,
            SchemeName::FourProbe => build_four_probe(osc, probe, grid)?,
        })
    }

    /// Builds the configured scheme on the configured grid.
    pub fn scheme(&self) -> Result<SchemeInstance, AppError> {
        self.build(&self.osc, &self.probe, self.grid.clone(), self.angle)
    }

    /// Engine parameters for the envelope.
    pub fn normalized_echo(&self) -> NormalizedEcho {
        let occupation = match self.osc.occupation {
            optomech_core::Occupation::Fixed(_) => "resonant",
            optomech_core::Occupation::Bath { .. } => "per_frequency",
        };
        NormalizedEcho {
            omega_m: self.osc.omega_m,
            gamma_m: self.osc.gamma_m,
            n_thermal: self.osc.n_at_resonance(),
            kappa: self.probe.kappa,
            occupation,
        }
    }
}

fn check_sweep(sw: &SweepSpec, mono: bool) -> Result<(), AppError> {
    if sw.points == 0 {
        return Err(AppError::validation_at("points", "must be >= 1"));
    }
    if !(sw.min.is_finite() && sw.max.is_finite()) || sw.max < sw.min {
        return Err(AppError::validation_at("max", "need finite bounds with min <= max"));
    }
    if sw.points > 1 && sw.max == sw.min {
        return Err(AppError::validation_at("max", "degenerate bounds: min == max with several points"));
    }
    if sw.scale == SweepScale::Log && !(sw.min > 0.0) {
        return Err(AppError::validation_at("min", "log spacing needs min > 0"));
    }
    let nonneg = matches!(sw.variable, SweepVariable::Kappa | SweepVariable::NThermal | SweepVariable::OmegaF0);
    if nonneg && sw.min < 0.0 {
        return Err(AppError::validation_at("min", "must be >= 0"));
    }
    if sw.variable == SweepVariable::Psi && !mono {
        return Err(AppError::validation_at("variable", "psi needs the monochromatic scheme"));
    }
    match (sw.variable, sw.omega_f0) {
        (SweepVariable::OmegaF0, Some(_)) => {
            Err(AppError::validation_at("omega_f0", "omega_f0 is the swept variable"))
        }
        (SweepVariable::OmegaF0, None) => Ok(()),
        (_, None) => Err(AppError::validation_at("omega_f0", "required")),
        (_, Some(w)) if !(w >= 0.0 && w.is_finite()) => {
            Err(AppError::validation_at("omega_f0", "must be finite and >= 0"))
        }
        _ => Ok(()),
    }
}

fn check_detect(d: &DetectSpec) -> Result<(), AppError> {
    if d.tau.is_empty() || !d.tau.iter().all(|&t| t > 0.0 && t.is_finite()) {
        return Err(AppError::validation_at("tau", "need at least one finite tau > 0"));
    }
    if d.amplitudes.is_empty() || !d.amplitudes.iter().all(|&a| a >= 0.0 && a.is_finite()) {
        return Err(AppError::validation_at("amplitudes", "need at least one finite amplitude >= 0"));
    }
    if d.amplitudes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(AppError::validation_at("amplitudes", "must be strictly increasing"));
    }
    if d.trials < 2 {
        return Err(AppError::validation_at("trials", "must be >= 2"));
    }
    if !(d.dt > 0.0 && d.dt.is_finite()) {
        return Err(AppError::validation_at("dt", "must be > 0"));
    }
    if let Some(&t) = d.tau.iter().find(|&&t| t < 10.0 * d.dt) {
        return Err(AppError::validation_at("tau", format!("tau = {t} spans fewer than 10 steps")));
    }
    if !(d.burn_in >= 0.0 && d.burn_in.is_finite()) {
        return Err(AppError::validation_at("burn_in", "must be >= 0"));
    }
    if !(d.snr > 0.0 && d.snr.is_finite()) {
        return Err(AppError::validation_at("snr", "must be > 0"));
    }
    if !(d.omega_f0.is_finite() && d.phase.is_finite()) {
        return Err(AppError::validation_at("omega_f0", "must be finite"));
    }
    Ok(())
}
