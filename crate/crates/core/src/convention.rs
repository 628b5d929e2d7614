//! Spectral-density conventions shared by every module.
//!
//! Input operators obey `[a(W), a^dag(W')] = 2 pi delta(W - W')`. A quadrature
//! of a vacuum input has symmetrized two-sided density 1/2 per channel; the
//! engine reports single-sided densities (per Hz, i.e. per `dW / 2 pi`), so a
//! vacuum quadrature reads exactly 1.
//!
//! Force referral divides by `|s|^2 * FORCE_GAIN_SQ` where `s` is the transfer
//! onto the force amplitude quadrature `f_a = (f(W) + f^dag(-W)) / sqrt 2` and
//! the gain converts `f_a` into the amplitude of a real force:
//!
//! * lab frame (monochromatic probe): the real force is Hermitian, so
//!   `f_a = sqrt 2 f` and the gain is 2;
//! * rotating frame (dichromatic probes): a real tone `f0 cos((wM + W) t)` has
//!   slow amplitude `f0/2 exp(-i W t)` on one sideband only, so `f_a = f / sqrt 2`
//!   and the gain is 1/2.

/// Symmetrized occupation weight of a vacuum channel.
pub const VACUUM_WEIGHT: f64 = 0.5;

/// Two-sided to single-sided conversion factor.
pub const SINGLE_SIDED: f64 = 2.0;

/// `|d f_a / d f|^2` for a Hermitian lab-frame force.
pub const LAB_FORCE_GAIN_SQ: f64 = 2.0;

/// `|d f_a / d f|^2` for a single-sideband real tone in the rotating frame.
pub const ROTATING_FORCE_GAIN_SQ: f64 = 0.5;

/// Symmetrized weight `n + 1/2` of a channel with mean occupation `n`.
#[inline]
pub fn occupation_weight(n: f64) -> f64 {
    n + VACUUM_WEIGHT
}
