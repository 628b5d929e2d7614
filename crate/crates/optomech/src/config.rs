//! Scenario configuration (JSON).
//!
//! Unknown keys are rejected everywhere. Physical parameters have no
//! defaults; parse errors carry the path of the offending field.

use serde::{Deserialize, Serialize};

use crate::error::AppError;
use crate::oracle::OracleConfig;

/// Measurement scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    /// Single carrier, homodyne readout.
    Monochromatic,
    /// Dichromatic probe on one side of the mirror.
    ToyDichromatic,
    /// Dichromatic probes on both sides, two harmonics each.
    FourProbe,
}

/// Oscillator parameters in engine units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizedOscillator {
    /// `wM` (rad/s).
    pub omega_m: f64,
    /// `gamma_M` (rad/s).
    pub gamma_m: f64,
    /// `n_T`.
    pub n_thermal: f64,
}

/// How the SI front-end assigns the bath occupation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OccupationModel {
    /// Constant `n_T` evaluated at `wM`.
    Resonant,
    /// Bose occupation at each frequency (monochromatic scheme only).
    PerFrequency,
}

/// Oscillator parameters in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiOscillator {
    /// Mass (kg).
    pub mass_kg: f64,
    /// `wM` (rad/s).
    pub omega_m: f64,
    /// `gamma_M` (rad/s).
    pub gamma_m: f64,
    /// Bath temperature (K).
    pub temperature_k: f64,
    /// Occupation model.
    pub occupation: OccupationModel,
}

/// Oscillator input style.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum OscillatorInput {
    /// Engine units.
    Normalized(NormalizedOscillator),
    /// SI units.
    Si(SiOscillator),
}

/// Probe in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiProbe {
    /// Carrier wavelength (m).
    pub wavelength_m: f64,
    /// Power per carrier (W).
    pub power_w: f64,
}

/// Probe input style.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ProbeInput {
    /// Probe strength `K` (rad^3/s^3).
    Kappa(f64),
    /// SI carrier; requires an SI oscillator.
    Si(SiProbe),
}

/// Homodyne angle of the monochromatic readout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum HomodyneInput {
    /// Phase quadrature, `pi/2`.
    Phase,
    /// Fixed angle (rad).
    Fixed(f64),
    /// Back-action-cancelling angle at each frequency.
    Optimal,
}

/// Frequency grid; mirrored to negative frequencies internally.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Lowest frequency (rad/s, >= 0). Lab frequency for the monochromatic
    /// scheme, offset from resonance otherwise.
    pub min: f64,
    /// Highest frequency (rad/s).
    pub max: f64,
    /// Points on the non-negative half.
    pub points: usize,
}

/// Table format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    /// CSV files next to the envelope.
    Csv,
    /// Tables embedded in the envelope.
    Json,
}

/// Output location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Directory, created if missing.
    pub dir: String,
    /// Table format.
    pub format: OutputFormat,
}

/// Spectrum options.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    /// Observable to refer; the scheme's signal observable when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<String>,
}

/// Swept quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// Probe strength `K`.
    Kappa,
    /// Homodyne angle (monochromatic only).
    Psi,
    /// Evaluation frequency.
    OmegaF0,
    /// Bath occupation.
    NThermal,
}

/// Sweep spacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepScale {
    /// Even steps.
    Linear,
    /// Even ratios.
    Log,
}

/// Sweep options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Swept quantity.
    pub variable: SweepVariable,
    /// First value.
    pub min: f64,
    /// Last value.
    pub max: f64,
    /// Number of values.
    pub points: usize,
    /// Spacing.
    pub scale: SweepScale,
    /// Evaluation frequency (rad/s); required unless the frequency is swept.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_f0: Option<f64>,
}

/// Detection experiment options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectSpec {
    /// Signal offset from resonance (rad/s).
    pub omega_f0: f64,
    /// Signal phase (rad).
    pub phase: f64,
    /// Observation times (s).
    pub tau: Vec<f64>,
    /// Amplitudes at which the SNR is reported.
    pub amplitudes: Vec<f64>,
    /// Trials per observation time.
    pub trials: u64,
    /// Step (s).
    pub dt: f64,
    /// Settling time before each window (s).
    pub burn_in: f64,
    /// SNR assigned to the threshold.
    pub snr: f64,
}

/// A complete scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Scheme.
    pub scheme: SchemeName,
    /// Oscillator.
    pub oscillator: OscillatorInput,
    /// Probe.
    pub probe: ProbeInput,
    /// Readout angle; monochromatic only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homodyne: Option<HomodyneInput>,
    /// Applied feedback force `[re, im]` of the toy scheme (SI inputs); exact
    /// compensation when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feedback_force: Option<[f64; 2]>,
    /// Frequency grid.
    pub grid: GridSpec,
    /// Master seed.
    pub seed: u64,
    /// Output location.
    pub output: OutputSpec,
    /// Spectrum options.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSpec>,
    /// Sweep options.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    /// Oracle options.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleConfig>,
    /// Detection options.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detect: Option<DetectSpec>,
}

impl ScenarioConfig {
    /// Parses JSON, reporting the field path on failure.
    pub fn from_json(text: &str) -> Result<Self, AppError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            AppError::validation_at(path, e.into_inner().to_string())
        })
    }

    /// Canonical JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
