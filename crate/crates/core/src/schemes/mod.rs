//! Builders for the three probe arrangements.
//!
//! Each builder derives the output fields from the mirror response and the
//! input-output relation, then forms the measured quadratures from those
//! fields with [`LinearForm::quadrature`]. Nothing is copied from closed-form
//! spectra; the tests compare the results against them.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::channel::ChannelBasis;
use crate::error::{param, Error, Result};
use crate::form::{combine, LinearForm, Weight};
use crate::grid::FrequencyGrid;
use crate::mechanics::{rotating_susceptibility, Oscillator};
use crate::C64;
#[allow(unused_imports)] // inherent methods shadow it when std is linked
use num_traits::Float;

mod angle;
mod four_probe;
mod monochromatic;
pub mod tone;
mod toy;

pub use angle::{optimal_homodyne_angle, HomodyneAngle};
pub use four_probe::{build_four_probe, four_probe_names};
pub use monochromatic::build_monochromatic;
pub use toy::{build_toy_dichromatic, toy_dc_state, DcDrive, ToyDcState};

/// Arrangement of the optical probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeMode {
    /// One carrier at `w0`.
    Monochromatic,
    /// Two carriers `w0 -+ wM/2` on one side of the mirror, with classical feedback.
    DichromaticToy,
    /// Two dichromatic probes on opposite sides of the mirror.
    FourProbe,
}

impl ProbeMode {
    /// Stable identifier.
    pub fn name(&self) -> &'static str {
        match self {
            ProbeMode::Monochromatic => "monochromatic",
            ProbeMode::DichromaticToy => "toy_dichromatic",
            ProbeMode::FourProbe => "four_probe",
        }
    }
}

/// Kind of scheme a [`SchemeInstance`] was built for.
pub type SchemeKind = ProbeMode;

/// Normalized probe: strength `K = 8 hbar k^2 A^2 / m` per carrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    /// Probe strength `K` (rad^3/s^3).
    pub kappa: f64,
    /// Arrangement.
    pub mode: ProbeMode,
    /// Classical amplitudes for the DC bookkeeping of the toy scheme.
    pub dc: Option<DcDrive>,
}

impl Probe {
    /// Validated probe without DC bookkeeping.
    pub fn new(kappa: f64, mode: ProbeMode) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(param("kappa", "must be finite and >= 0"));
        }
        Ok(Self {
            kappa,
            mode,
            dc: None,
        })
    }

    /// Attaches classical amplitudes (toy scheme only).
    pub fn with_dc(mut self, dc: DcDrive) -> Self {
        self.dc = Some(dc);
        self
    }

    /// Optomechanical rate `G = 2 k x0 A = sqrt(K / (4 wM))`.
    pub fn coupling(&self, osc: &Oscillator) -> f64 {
        (self.kappa / (4.0 * osc.omega_m)).sqrt()
    }
}

/// Classical quantities attached to a scheme.
#[derive(Debug, Clone, PartialEq)]
pub enum SchemeMeta {
    /// Nothing beyond the static shift (computed by the SI front-end).
    None,
    /// Toy scheme, with the DC state when amplitudes were supplied.
    Toy(Option<ToyDcState>),
    /// Four-probe scheme: the steady amplitude vanishes by symmetry, no feedback.
    FourProbe {
        /// Steady mirror amplitude `D` (always zero).
        d: C64,
    },
}

/// A fully built measurement scheme.
#[derive(Debug, Clone)]
pub struct SchemeInstance {
    pub(crate) kind: SchemeKind,
    pub(crate) osc: Oscillator,
    pub(crate) probe: Probe,
    pub(crate) grid: Arc<FrequencyGrid>,
    pub(crate) basis: Arc<ChannelBasis>,
    pub(crate) fields: Vec<(String, LinearForm)>,
    pub(crate) observables: Vec<(String, LinearForm)>,
    pub(crate) drive: Vec<LinearForm>,
    pub(crate) backaction_record: Option<LinearForm>,
    pub(crate) signal_observable: &'static str,
    pub(crate) angles: Option<Vec<f64>>,
    pub(crate) meta: SchemeMeta,
}

impl SchemeInstance {
    /// Which builder produced this instance.
    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    /// Oscillator parameters.
    pub fn oscillator(&self) -> &Oscillator {
        &self.osc
    }

    /// Probe parameters.
    pub fn probe(&self) -> &Probe {
        &self.probe
    }

    /// Frequency grid.
    pub fn grid(&self) -> &Arc<FrequencyGrid> {
        &self.grid
    }

    /// Input channels.
    pub fn basis(&self) -> &Arc<ChannelBasis> {
        &self.basis
    }

    /// Output fields (annihilation-type families).
    pub fn fields(&self) -> &[(String, LinearForm)] {
        &self.fields
    }

    /// Measured quadratures and post-processed combinations.
    pub fn observables(&self) -> &[(String, LinearForm)] {
        &self.observables
    }

    /// Looks up an observable or field by name.
    pub fn observable(&self, name: &str) -> Result<&LinearForm> {
        self.observables
            .iter()
            .chain(&self.fields)
            .find(|(n, _)| n == name)
            .map(|(_, f)| f)
            .ok_or_else(|| Error::UnknownObservable(name.into()))
    }

    /// Name of the default signal-bearing observable.
    pub fn signal_observable(&self) -> &'static str {
        self.signal_observable
    }

    /// Input combinations that drive the mirror (the back-action directions).
    pub fn drive_directions(&self) -> &[LinearForm] {
        &self.drive
    }

    /// Homodyne angle per grid point (monochromatic scheme only).
    pub fn homodyne_angles(&self) -> Option<&[f64]> {
        self.angles.as_deref()
    }

    /// Classical bookkeeping.
    pub fn meta(&self) -> &SchemeMeta {
        &self.meta
    }

    /// `|d f_a / d f|^2` for the scheme's real-force signal.
    pub fn force_gain_sq(&self) -> f64 {
        match self.kind {
            ProbeMode::Monochromatic => crate::convention::LAB_FORCE_GAIN_SQ,
            _ => crate::convention::ROTATING_FORCE_GAIN_SQ,
        }
    }
}

/// The measured back-action record: `beta_a+` for the toy scheme and the signed
/// sum of the eight transparent quadratures for the four-probe scheme.
pub fn backaction_record(scheme: &SchemeInstance) -> Result<LinearForm> {
    scheme.backaction_record.clone().ok_or_else(|| {
        Error::Unsupported(
            "a monochromatic probe records back action and signal in non-commuting quadratures"
                .into(),
        )
    })
}

pub(crate) fn check_mode(probe: &Probe, expected: ProbeMode) -> Result<()> {
    if probe.mode != expected {
        return Err(Error::WrongMode {
            expected: expected.name(),
            found: probe.mode.name(),
        });
    }
    Ok(())
}

pub(crate) fn check_band(grid: &FrequencyGrid, band: crate::grid::Band) -> Result<()> {
    if grid.band() != band {
        return Err(Error::Contract(alloc::format!(
            "scheme needs a {band:?} grid, got {:?}",
            grid.band()
        )));
    }
    Ok(())
}

/// `scale / (gamma_M - i W)` as an exactly Hermitian weight.
pub(crate) fn rotating_weight(osc: &Oscillator, grid: &FrequencyGrid, scale: f64) -> Result<Weight> {
    for &w in grid.omegas() {
        rotating_susceptibility(osc, w)?;
    }
    Weight::hermitian(grid, |w| {
        rotating_susceptibility(osc, w).expect("checked above") * scale
    })
}

/// Output pair of one dichromatic port: fields `b_up = a_up + m_up`,
/// `b_down = a_down + m_down` and quadratures `beta_a+- = (q(b_up) +- q(b_down)) / sqrt(2)`.
///
/// `m_down` must be the adjoint reflection of `m_up`. The mirror parts are
/// combined before the vacuum inputs are added, so their cancellation in
/// `beta_a+` is exact rather than left at the rounding of the larger terms.
pub(crate) struct PortOutput {
    pub b_up: LinearForm,
    pub b_down: LinearForm,
    pub beta_plus: LinearForm,
    pub beta_minus: LinearForm,
}

pub(crate) fn port_output(
    a_up: LinearForm,
    a_down: LinearForm,
    m_up: LinearForm,
    m_down: LinearForm,
) -> Result<PortOutput> {
    let grid = a_up.grid().clone();
    let one = Weight::real(&grid, 1.0);
    let h = Weight::real(&grid, core::f64::consts::FRAC_1_SQRT_2);
    let mh = Weight::real(&grid, -core::f64::consts::FRAC_1_SQRT_2);
    let q = [
        m_up.quadrature(0.0),
        m_down.quadrature(0.0),
        a_up.quadrature(0.0),
        a_down.quadrature(0.0),
    ];
    let beta_plus = combine(&q, &[h.clone(), h.clone(), h.clone(), h.clone()])?;
    let beta_minus = combine(&q, &[h.clone(), mh.clone(), h, mh])?;
    Ok(PortOutput {
        b_up: combine(&[a_up, m_up], &[one.clone(), one.clone()])?,
        b_down: combine(&[a_down, m_down], &[one.clone(), one])?,
        beta_plus,
        beta_minus,
    })
}
