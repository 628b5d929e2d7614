//! Frequency-domain engine for linearized optomechanical force measurement.
//!
//! Output observables of a measurement scheme are represented as
//! [`LinearForm`]s over independent input noise channels. Builders in
//! [`schemes`] construct the monochromatic phase/variational readout, the
//! dichromatic toy readout and the four-probe readout; [`budget`] refers the
//! resulting spectra to the input force and provides the SQL, optimum-power
//! and detection-threshold helpers.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![warn(missing_docs)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod budget;
pub mod channel;
pub mod convention;
mod error;
pub mod form;
pub mod grid;
pub mod mechanics;
pub mod physical;
pub mod schemes;

pub use channel::{ChannelBasis, ChannelLabel, ChannelStats, NoiseChannel};
pub use error::{Error, Result};
pub use form::{FormKind, JointMeasurement, LinearForm, Weight};
pub use grid::{Band, FrequencyGrid};
pub use mechanics::{Occupation, Oscillator};
pub use schemes::{Probe, ProbeMode, SchemeInstance, SchemeKind};

/// Complex scalar used throughout the engine.
pub type C64 = num_complex::Complex64;
