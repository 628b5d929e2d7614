//! Normalized mechanical oscillator and its response functions.

use crate::error::{param, Error, Result};
use crate::C64;
#[allow(unused_imports)] // inherent methods shadow it when std is linked
use num_traits::Float;

/// Thermal occupation of the mechanical bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Occupation {
    /// Constant `n_T` across the band (the default, evaluated at `wM`).
    Fixed(f64),
    /// Bose occupation `1 / (exp(w * hbar_over_kt) - 1)` evaluated per frequency.
    /// `hbar_over_kt = hbar / (k_B T)` in seconds; `f64::INFINITY` means T = 0.
    Bath {
        /// `hbar / (k_B T)` (s).
        hbar_over_kt: f64,
    },
}

/// Mechanical oscillator in normalized units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillator {
    /// Resonance angular frequency `wM` (rad/s).
    pub omega_m: f64,
    /// Amplitude relaxation rate `gamma_M` (rad/s).
    pub gamma_m: f64,
    /// Bath occupation.
    pub occupation: Occupation,
}

impl Oscillator {
    /// Validated oscillator with constant occupation `n_thermal`.
    pub fn new(omega_m: f64, gamma_m: f64, n_thermal: f64) -> Result<Self> {
        Self::with_occupation(omega_m, gamma_m, Occupation::Fixed(n_thermal))
    }

    /// Validated oscillator with an explicit occupation model.
    pub fn with_occupation(omega_m: f64, gamma_m: f64, occupation: Occupation) -> Result<Self> {
        if !(omega_m > 0.0) || !omega_m.is_finite() {
            return Err(param("omega_m", "must be finite and > 0"));
        }
        if !(gamma_m >= 0.0) || !gamma_m.is_finite() {
            return Err(param("gamma_m", "must be finite and >= 0"));
        }
        match occupation {
            Occupation::Fixed(n) if !(n >= 0.0) || !n.is_finite() => {
                return Err(param("n_thermal", "must be finite and >= 0"))
            }
            Occupation::Bath { hbar_over_kt } if !(hbar_over_kt > 0.0) => {
                return Err(param("hbar_over_kt", "must be > 0 (use infinity for T = 0)"))
            }
            _ => {}
        }
        Ok(Self {
            omega_m,
            gamma_m,
            occupation,
        })
    }

    /// `n_T` at the resonance frequency.
    pub fn n_at_resonance(&self) -> f64 {
        thermal_occupation(self, self.omega_m).expect("omega_m > 0")
    }
}

/// Mechanical susceptibility `Z(w) = wM^2 - w^2 - 2 i gamma_M w`.
pub fn susceptibility(osc: &Oscillator, omega: f64) -> C64 {
    C64::new(
        osc.omega_m * osc.omega_m - omega * omega,
        -2.0 * osc.gamma_m * omega,
    )
}

/// Rotating-frame response `1 / (gamma_M - i W)`.
pub fn rotating_susceptibility(osc: &Oscillator, omega: f64) -> Result<C64> {
    if osc.gamma_m == 0.0 && omega == 0.0 {
        return Err(Error::Pole { omega });
    }
    Ok(C64::new(1.0, 0.0) / C64::new(osc.gamma_m, -omega))
}

/// Bose occupation `1 / (exp(x) - 1)` for `x = hbar w / k_B T > 0`.
pub fn bose(x: f64) -> f64 {
    if x == f64::INFINITY {
        0.0
    } else {
        1.0 / x.exp_m1()
    }
}

/// Thermal occupation at frequency `omega > 0`.
pub fn thermal_occupation(osc: &Oscillator, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(param("omega", "thermal occupation needs omega > 0"));
    }
    Ok(match osc.occupation {
        Occupation::Fixed(n) => n,
        Occupation::Bath { hbar_over_kt } => bose(omega * hbar_over_kt),
    })
}

/// Bath coupling weight `2 gamma_M |w| / wM` of the fluctuation force `f_fl`.
pub fn bath_coupling_sq(osc: &Oscillator, omega: f64) -> f64 {
    2.0 * osc.gamma_m * omega.abs() / osc.omega_m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_examples() {
        let o = Oscillator::new(1.0, 0.01, 0.0).unwrap();
        assert_eq!(susceptibility(&o, 0.0), C64::new(1.0, 0.0));
        assert_eq!(susceptibility(&o, 1.0), C64::new(0.0, -0.02));
        let z = susceptibility(&o, 1.1);
        assert!((z - C64::new(-0.21, -0.022)).norm() < 1e-15);
        assert_eq!(susceptibility(&o, -1.1), z.conj());
    }

    #[test]
    fn rotating_examples() {
        let o = Oscillator::new(1.0, 1.0, 0.0).unwrap();
        assert_eq!(rotating_susceptibility(&o, 0.0).unwrap(), C64::new(1.0, 0.0));
        let o = Oscillator::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(rotating_susceptibility(&o, 1.0).unwrap(), C64::new(0.0, 1.0));
        assert!(matches!(rotating_susceptibility(&o, 0.0), Err(Error::Pole { .. })));
        let o = Oscillator::new(1.0, 0.01, 0.0).unwrap();
        let c = rotating_susceptibility(&o, 0.02).unwrap();
        assert!((c - C64::new(20.0, 40.0)).norm() < 1e-12);
    }

    #[test]
    fn occupation_examples() {
        let cold = Oscillator::with_occupation(1.0, 0.0, Occupation::Bath { hbar_over_kt: f64::INFINITY }).unwrap();
        assert_eq!(thermal_occupation(&cold, 2.0).unwrap(), 0.0);
        let o = Oscillator::with_occupation(1.0, 0.0, Occupation::Bath { hbar_over_kt: core::f64::consts::LN_2 }).unwrap();
        assert!((thermal_occupation(&o, 1.0).unwrap() - 1.0).abs() < 1e-14);
        let o = Oscillator::with_occupation(1.0, 0.0, Occupation::Bath { hbar_over_kt: 0.1 }).unwrap();
        assert!((thermal_occupation(&o, 1.0).unwrap() - 9.508_331_944_775_2).abs() < 1e-9);
        assert!(thermal_occupation(&o, 0.0).is_err());
        assert!(thermal_occupation(&o, -1.0).is_err());
    }

    #[test]
    fn invalid_parameters() {
        assert!(Oscillator::new(0.0, 0.0, 0.0).is_err());
        assert!(Oscillator::new(1.0, -0.1, 0.0).is_err());
        assert!(Oscillator::new(1.0, 0.1, -1.0).is_err());
        assert!(Oscillator::new(f64::NAN, 0.1, 0.0).is_err());
    }
}
