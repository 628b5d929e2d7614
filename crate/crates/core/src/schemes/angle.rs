use core::f64::consts::FRAC_PI_2;

#[allow(unused_imports)] // inherent methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::mechanics::{susceptibility, Oscillator};

/// Homodyne angle selection for the monochromatic readout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HomodyneAngle {
    /// Same angle at every frequency.
    Fixed(f64),
    /// Pointwise extension of the variational condition: at each `|w|` the
    /// angle solving `cos psi + Re[K / Z(w)] sin psi = 0`.
    Optimal,
}

impl HomodyneAngle {
    /// Pure phase readout.
    pub const PHASE: HomodyneAngle = HomodyneAngle::Fixed(FRAC_PI_2);
}

/// Angle `psi` in `(-pi/2, pi/2)` with `cos psi + Re[K / Z(w_f0)] sin psi = 0`.
///
/// Fails with [`Error::NoCancellation`] when `Re[K / Z]` vanishes (a force at
/// the mechanical resonance) or `Z` itself vanishes.
pub fn optimal_homodyne_angle(osc: &Oscillator, kappa: f64, omega_f0: f64) -> Result<f64> {
    let z = susceptibility(osc, omega_f0);
    if z.norm_sqr() == 0.0 {
        return Err(Error::NoCancellation { omega: omega_f0 });
    }
    let r = (kappa / z).re;
    if r == 0.0 || !r.is_finite() {
        return Err(Error::NoCancellation { omega: omega_f0 });
    }
    // tan psi = -1/r. Of the two solutions psi and psi + pi (the same
    // quadrature up to sign) this branch stays near zero when |r| is large,
    // where the cancellation is most sensitive to the rounding of psi.
    Ok((-1.0 / r).atan())
}
