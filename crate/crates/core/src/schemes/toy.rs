use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;

use super::{check_band, check_mode, port_output, rotating_weight, Probe, ProbeMode, SchemeInstance, SchemeMeta};
use crate::channel::{ChannelBasis, ChannelLabel, ChannelStats, NoiseChannel};
use crate::error::{param, Error, Result};
use crate::form::{FormKind, JointMeasurement, LinearForm, Weight};
use crate::grid::{Band, FrequencyGrid};
use crate::mechanics::{rotating_susceptibility, Oscillator};
use crate::C64;
#[allow(unused_imports)] // inherent methods shadow it when std is linked
use num_traits::Float;

/// Classical carrier amplitudes of the dichromatic probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcDrive {
    /// Dimensionless `k x0`.
    pub kx0: f64,
    /// Amplitude `A_+` of the upper carrier (sqrt(photons/s)).
    pub amp_plus: f64,
    /// Amplitude `A_-` of the lower carrier (sqrt(photons/s)).
    pub amp_minus: f64,
    /// Applied resonant feedback force; `None` applies exact compensation.
    pub f_comp: Option<C64>,
}

/// Steady state of the toy scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyDcState {
    /// Applied feedback force `F_comp`.
    pub f_comp: C64,
    /// Force that exactly cancels the ponderomotive drive, `-2 i k x0 A_+ A_-`.
    pub f_comp_exact: C64,
    /// Steady mirror amplitude `D` under the applied feedback.
    pub d: C64,
    /// Steady amplitude without feedback, `2 i k x0 A_+ A_- / gamma_M` (None at gamma_M = 0).
    pub d_uncompensated: Option<C64>,
    /// Reflected carrier amplitudes `(B_+, B_-)` (None at gamma_M = 0).
    pub reflected: Option<(f64, f64)>,
}

/// Steady-state relations of the toy scheme:
/// `gamma_M D = 2 i k x0 A_+ A_- + F_comp` and
/// `B_+- = A_+- (1 -+ 4 k^2 x0^2 A_-+^2 / gamma_M)`.
pub fn toy_dc_state(osc: &Oscillator, drive: &DcDrive) -> Result<ToyDcState> {
    if !(drive.amp_plus >= 0.0 && drive.amp_minus >= 0.0) {
        return Err(param("amplitude", "carrier amplitudes must be real and >= 0"));
    }
    if !(drive.kx0 >= 0.0) || !drive.kx0.is_finite() {
        return Err(param("kx0", "must be finite and >= 0"));
    }
    let pond = C64::new(0.0, 2.0 * drive.kx0 * drive.amp_plus * drive.amp_minus);
    let f_comp = drive.f_comp.unwrap_or(-pond);
    let residual = pond + f_comp;
    let gamma = osc.gamma_m;
    let d = if gamma > 0.0 {
        residual / gamma
    } else if residual.norm() == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        return Err(Error::SingularDc(alloc::format!(
            "gamma_M = 0 with uncompensated drive {residual}"
        )));
    };
    let (d_uncompensated, reflected) = if gamma > 0.0 {
        let c = 4.0 * drive.kx0 * drive.kx0;
        (
            Some(pond / gamma),
            Some((
                drive.amp_plus * (1.0 - c * drive.amp_minus * drive.amp_minus / gamma),
                drive.amp_minus * (1.0 + c * drive.amp_plus * drive.amp_plus / gamma),
            )),
        )
    } else {
        (None, None)
    };
    Ok(ToyDcState {
        f_comp,
        f_comp_exact: -pond,
        d,
        d_uncompensated,
        reflected,
    })
}

/// Dichromatic probe at `w0 -+ wM/2` reflected from one side of the mirror,
/// in the frame rotating at `wM`.
///
/// Observables: `beta_a_plus`, `beta_a_minus`, `B_beta`; fields `b_plus`,
/// `b_minus`. Fluctuation forms use equal carrier amplitudes.
pub fn build_toy_dichromatic(
    osc: &Oscillator,
    probe: &Probe,
    grid: Arc<FrequencyGrid>,
) -> Result<SchemeInstance> {
    check_mode(probe, ProbeMode::DichromaticToy)?;
    check_band(&grid, Band::Baseband)?;
    let meta = SchemeMeta::Toy(probe.dc.as_ref().map(|d| toy_dc_state(osc, d)).transpose()?);

    let plus = ChannelLabel::Sideband { port: 1, half_offset: 1 };
    let minus = ChannelLabel::Sideband { port: 1, half_offset: -1 };
    let basis = Arc::new(ChannelBasis::new(vec![
        NoiseChannel { label: plus, stats: ChannelStats::Vacuum },
        NoiseChannel { label: minus, stats: ChannelStats::Vacuum },
        NoiseChannel { label: ChannelLabel::Bath, stats: ChannelStats::Thermal(osc.n_at_resonance()) },
    ])?);
    let (ip, im, ib) = (0, 1, 2);
    let g = probe.coupling(osc);
    let bath = (2.0 * osc.gamma_m).sqrt();

    // d(W) = chi [i G (a_+(W) + a_-^dag(-W)) + i (f + f_fl)],  f_fl = sqrt(2 gamma) e
    let mut d = LinearForm::zero(grid.clone(), basis.clone(), FormKind::Field);
    for (j, &w) in grid.omegas().iter().enumerate() {
        let ichi = C64::new(0.0, 1.0) * rotating_susceptibility(osc, w)?;
        d.set_u(j, ip, ichi * g);
        d.set_v(j, im, ichi * g);
        d.set_u(j, ib, ichi * bath);
        d.set_signal(j, ichi, C64::new(0.0, 0.0));
    }
    let d_dag = d.adjoint_reflect();

    let one = Weight::real(&grid, 1.0);
    let ig = Weight::constant(&grid, C64::new(0.0, g));
    let out = port_output(
        LinearForm::input(grid.clone(), basis.clone(), plus)?,
        LinearForm::input(grid.clone(), basis.clone(), minus)?,
        d.scaled(&ig)?,
        d_dag.scaled(&ig)?,
    )?;
    let (b_plus, b_minus, beta_plus, beta_minus) = (out.b_up, out.b_down, out.beta_plus, out.beta_minus);

    let joint = JointMeasurement::new(vec![beta_plus.clone(), beta_minus.clone()])?;
    // K / (2 wM) = 2 G^2, written through G so it rounds like the forward path.
    let subtract = rotating_weight(osc, &grid, 2.0 * g * g)?;
    let b_beta = joint.combine(&[subtract, one])?;

    let mut drive = LinearForm::zero(grid.clone(), basis.clone(), FormKind::Field);
    for j in 0..grid.len() {
        drive.set_u(j, ip, C64::new(1.0, 0.0));
        drive.set_v(j, im, C64::new(1.0, 0.0));
    }
    let drive_dag = drive.adjoint_reflect();

    Ok(SchemeInstance {
        kind: ProbeMode::DichromaticToy,
        osc: *osc,
        probe: *probe,
        grid,
        basis,
        fields: vec![(String::from("b_plus"), b_plus), (String::from("b_minus"), b_minus)],
        observables: vec![
            (String::from("beta_a_plus"), beta_plus.clone()),
            (String::from("beta_a_minus"), beta_minus),
            (String::from("B_beta"), b_beta),
        ],
        drive: vec![drive, drive_dag],
        backaction_record: Some(beta_plus),
        signal_observable: "B_beta",
        angles: None,
        meta,
    })
}
