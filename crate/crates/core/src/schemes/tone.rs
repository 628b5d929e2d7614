//! Mapping between a real force tone and the amplitudes used by the builders.
//!
//! The oracle injects signals through these functions so that the simulated
//! and analytic paths use one definition.

use crate::C64;
#[allow(unused_imports)] // inherent methods shadow it when std is linked
use num_traits::Float;

/// Slow amplitude `f(t)` of the real force `f0 cos((wM + W0) t + phase)`,
/// defined by `f_real(t) = f(t) exp(-i wM t) + c.c.`:
/// `f(t) = f0 / 2 * exp(-i (W0 t + phase))`.
pub fn slow_amplitude(f0: f64, offset: f64, phase: f64, t: f64) -> C64 {
    let arg = -(offset * t + phase);
    C64::new(arg.cos(), arg.sin()) * (0.5 * f0)
}

/// Real lab-frame force `f0 cos(w t + phase)`.
pub fn lab_force(f0: f64, omega: f64, phase: f64, t: f64) -> f64 {
    f0 * (omega * t + phase).cos()
}
