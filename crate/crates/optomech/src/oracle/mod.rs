//! Time-domain oracle: simulated homodyne records, Welch spectra and
//! Monte Carlo detection, used to check the frequency-domain engine.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod compare;
pub mod detect;
pub mod mono;
pub mod process;
pub mod rng;
pub mod simulate;
pub mod welch;

pub use compare::{oracle_spectra, ChannelComparison, OracleReport};
pub use detect::{detection_mc, DetectionReport, DetectionSetup};
pub use process::postprocess_subtraction;
pub use simulate::{simulate, HomodyneRecord, PoleFilter, RotatingSetup, SimConfig, Tone};
pub use welch::{welch_psd, PsdEstimate, Welch, WelchConfig, Window};

/// Oracle failures.
#[derive(Debug, Error)]
pub enum OracleError {
    /// Invalid oracle settings.
    #[error("oracle config: {0}")]
    Config(String),
    /// Step too large for the relaxation rate.
    #[error("step dt = {dt} too large for rate {rate} (need dt * rate < 0.1)")]
    Unstable {
        /// Step.
        dt: f64,
        /// Fastest rate.
        rate: f64,
    },
    /// Record shorter than one Welch segment, or fewer segments than required.
    #[error("record too short: need at least {needed} samples")]
    TooShort {
        /// Required samples.
        needed: usize,
    },
    /// Post-processing needs a channel that the record lacks.
    #[error("record has no channel {0}")]
    MissingChannel(String),
    /// Scheme or option not covered by this path.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// Engine error while forming the analytic prediction.
    #[error(transparent)]
    Engine(#[from] optomech_core::Error),
}

/// Settings of a spectral oracle run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    /// Step (s).
    pub dt: f64,
    /// Recorded duration per trajectory (s).
    pub duration: f64,
    /// Unrecorded settling time per trajectory (s).
    pub burn_in: f64,
    /// Independent trajectories, run in parallel.
    pub trajectories: u64,
    /// Welch segmentation.
    pub welch: WelchConfig,
    /// Lower and upper band edges of the comparison (rad/s).
    pub band: [f64; 2],
}

/// Welch segments required across all trajectories.
pub const MIN_SEGMENTS: usize = 20;

impl OracleConfig {
    /// Recorded steps per trajectory.
    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    /// Checks the invariants that do not depend on the scheme.
    pub fn validate(&self) -> Result<(), OracleError> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(OracleError::Config("dt must be > 0".into()));
        }
        if self.trajectories == 0 {
            return Err(OracleError::Config("trajectories must be >= 1".into()));
        }
        if !(self.burn_in >= 0.0) {
            return Err(OracleError::Config("burn_in must be >= 0".into()));
        }
        self.welch.validate()?;
        let segs = self.welch.segments(self.steps()) * self.trajectories as usize;
        if segs < MIN_SEGMENTS {
            return Err(OracleError::TooShort {
                needed: self.welch.segment_len + (MIN_SEGMENTS - 1) * self.welch.step(),
            });
        }
        let nyquist = std::f64::consts::PI / self.dt;
        if !(self.band[0] >= 0.0 && self.band[1] > self.band[0] && self.band[1] < nyquist) {
            return Err(OracleError::Config(format!(
                "band must satisfy 0 <= lo < hi < pi/dt = {nyquist}"
            )));
        }
        Ok(())
    }
}
