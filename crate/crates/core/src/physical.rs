//! SI front-end: converts physical oscillator/probe parameters into the
//! normalized set `(wM, gamma_M, K, n_T)` used by the engine.

use core::f64::consts::PI;

#[allow(unused_imports)] // inherent methods shadow it when std is linked
use num_traits::Float;

use crate::error::{param, Result};
use crate::mechanics::{bose, Occupation, Oscillator};
use crate::schemes::{Probe, ProbeMode};

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Mechanical oscillator in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalOscillator {
    /// Mass `m` (kg).
    pub mass: f64,
    /// Resonance `wM` (rad/s).
    pub omega_m: f64,
    /// Relaxation rate `gamma_M` (rad/s).
    pub gamma_m: f64,
    /// Bath temperature `T` (K).
    pub temperature: f64,
}

impl PhysicalOscillator {
    /// Validated constructor.
    pub fn new(mass: f64, omega_m: f64, gamma_m: f64, temperature: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(param("mass", "must be finite and > 0"));
        }
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return Err(param("temperature", "must be finite and >= 0"));
        }
        // reuse the normalized checks for wM and gamma_M
        Oscillator::new(omega_m, gamma_m, 0.0)?;
        Ok(Self {
            mass,
            omega_m,
            gamma_m,
            temperature,
        })
    }

    /// Zero-point scale `x0 = sqrt(hbar / (2 m wM))` (m).
    pub fn x0(&self) -> f64 {
        (HBAR / (2.0 * self.mass * self.omega_m)).sqrt()
    }

    /// `hbar / (k_B T)` (s); infinite at T = 0.
    pub fn hbar_over_kt(&self) -> f64 {
        if self.temperature == 0.0 {
            f64::INFINITY
        } else {
            HBAR / (BOLTZMANN * self.temperature)
        }
    }

    /// `n_T(w) = 1 / (exp(hbar w / k_B T) - 1)` for `w > 0`.
    pub fn thermal_occupation(&self, omega: f64) -> Result<f64> {
        if !(omega > 0.0) {
            return Err(param("omega", "thermal occupation needs omega > 0"));
        }
        Ok(bose(omega * self.hbar_over_kt()))
    }

    /// Normalized oscillator with `n_T` frozen at `wM`.
    pub fn normalized(&self) -> Oscillator {
        let n = self.thermal_occupation(self.omega_m).expect("omega_m > 0");
        Oscillator::new(self.omega_m, self.gamma_m, n).expect("validated on construction")
    }

    /// Normalized oscillator with frequency-dependent occupation.
    pub fn normalized_frequency_dependent(&self) -> Oscillator {
        Oscillator::with_occupation(
            self.omega_m,
            self.gamma_m,
            Occupation::Bath {
                hbar_over_kt: self.hbar_over_kt(),
            },
        )
        .expect("validated on construction")
    }
}

/// Optical probe in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalProbe {
    /// Carrier angular frequency `w0` (rad/s).
    pub omega_0: f64,
    /// Real field amplitude `A` (sqrt(photons / s)).
    pub amplitude: f64,
    /// Probe arrangement.
    pub mode: ProbeMode,
}

impl PhysicalProbe {
    /// Validated constructor.
    pub fn new(omega_0: f64, amplitude: f64, mode: ProbeMode) -> Result<Self> {
        if !(omega_0 > 0.0) || !omega_0.is_finite() {
            return Err(param("omega_0", "must be finite and > 0"));
        }
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(param("amplitude", "must be real, finite and >= 0"));
        }
        Ok(Self {
            omega_0,
            amplitude,
            mode,
        })
    }

    /// Probe from vacuum wavelength (m) and mean power per carrier (W).
    pub fn from_wavelength_power(wavelength: f64, power: f64, mode: ProbeMode) -> Result<Self> {
        if !(wavelength > 0.0) || !wavelength.is_finite() {
            return Err(param("wavelength", "must be finite and > 0"));
        }
        if !(power >= 0.0) || !power.is_finite() {
            return Err(param("power", "must be finite and >= 0"));
        }
        let omega_0 = 2.0 * PI * SPEED_OF_LIGHT / wavelength;
        Self::new(omega_0, (power / (HBAR * omega_0)).sqrt(), mode)
    }

    /// Wave number `k = w0 / c` (1/m).
    pub fn wavenumber(&self) -> f64 {
        self.omega_0 / SPEED_OF_LIGHT
    }

    /// Mean power `P0 = hbar w0 A^2` (W).
    pub fn power(&self) -> f64 {
        HBAR * self.omega_0 * self.amplitude * self.amplitude
    }

    /// Dichromatic carriers `w0 -+ wM / 2`.
    pub fn dichromatic_carriers(&self, osc: &PhysicalOscillator) -> (f64, f64) {
        (self.omega_0 - osc.omega_m / 2.0, self.omega_0 + osc.omega_m / 2.0)
    }

    /// Probe strength `K = 8 hbar k^2 A^2 / m`.
    pub fn kappa(&self, osc: &PhysicalOscillator) -> f64 {
        let k = self.wavenumber();
        8.0 * HBAR * k * k * self.amplitude * self.amplitude / osc.mass
    }

    /// Dimensionless coupling `k x0` per unit amplitude.
    pub fn kx0(&self, osc: &PhysicalOscillator) -> f64 {
        self.wavenumber() * osc.x0()
    }

    /// Static radiation-pressure shift `X = 2 P0 / (m c wM^2)` (m); monochromatic only.
    pub fn static_displacement(&self, osc: &PhysicalOscillator) -> Result<f64> {
        if self.mode != ProbeMode::Monochromatic {
            return Err(param("mode", "static displacement is defined for a monochromatic probe"));
        }
        Ok(2.0 * self.power() / (osc.mass * SPEED_OF_LIGHT * osc.omega_m * osc.omega_m))
    }

    /// Normalized probe.
    pub fn normalized(&self, osc: &PhysicalOscillator) -> Probe {
        Probe::new(self.kappa(osc), self.mode).expect("kappa of a valid probe is >= 0")
    }
}

/// Inverse of [`PhysicalProbe::kappa`]: the amplitude giving probe strength `kappa`.
pub fn amplitude_for_kappa(osc: &PhysicalOscillator, omega_0: f64, kappa: f64) -> Result<f64> {
    if !(kappa >= 0.0) {
        return Err(param("kappa", "must be >= 0"));
    }
    let k = omega_0 / SPEED_OF_LIGHT;
    Ok((kappa * osc.mass / (8.0 * HBAR * k * k)).sqrt())
}
