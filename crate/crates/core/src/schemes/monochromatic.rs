use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use super::{check_band, check_mode, optimal_homodyne_angle, HomodyneAngle, Probe, ProbeMode, SchemeInstance, SchemeMeta};
use crate::channel::{ChannelBasis, ChannelLabel, ChannelStats, NoiseChannel};
use crate::error::{Error, Result};
use crate::form::{combine, FormKind, LinearForm, Weight};
use crate::grid::{Band, FrequencyGrid};
use crate::mechanics::{bath_coupling_sq, susceptibility, thermal_occupation, Occupation, Oscillator};
use crate::C64;
#[allow(unused_imports)] // inherent methods shadow it when std is linked
use num_traits::Float;

fn bath_stats(osc: &Oscillator, grid: &FrequencyGrid) -> Result<ChannelStats> {
    Ok(match osc.occupation {
        Occupation::Fixed(n) => ChannelStats::Thermal(n),
        Occupation::Bath { .. } => {
            // the bath coupling vanishes at w = 0, so the weight there is irrelevant
            let ns = grid
                .omegas()
                .iter()
                .map(|&w| if w == 0.0 { Ok(0.0) } else { thermal_occupation(osc, w.abs()) })
                .collect::<Result<Vec<_>>>()?;
            ChannelStats::ThermalProfile(ns)
        }
    })
}

/// Monochromatic probe reflected from the mirror, read out with a homodyne
/// detector at angle `psi`.
///
/// Observables: `b_a`, `b_phi`, `b_psi`; field: `b`. The signal is the real
/// lab-frame force, entering through the mirror coordinate `x(w)` with
/// `Z(w) x = sqrt(K wM) (a + a^dag(-w)) + 2 wM (f_s + f_fl)` and
/// `b = a + i G x`, `G = sqrt(K / (4 wM))`.
pub fn build_monochromatic(
    osc: &Oscillator,
    probe: &Probe,
    grid: Arc<FrequencyGrid>,
    psi: HomodyneAngle,
) -> Result<SchemeInstance> {
    check_mode(probe, ProbeMode::Monochromatic)?;
    check_band(&grid, Band::Absolute)?;
    let basis = Arc::new(ChannelBasis::new(vec![
        NoiseChannel {
            label: ChannelLabel::Carrier,
            stats: ChannelStats::Vacuum,
        },
        NoiseChannel {
            label: ChannelLabel::Bath,
            stats: bath_stats(osc, &grid)?,
        },
    ])?);
    let (carrier, bath) = (0, 1);

    let drive_sqrt = (probe.kappa * osc.omega_m).sqrt();
    let mut x = LinearForm::zero(grid.clone(), basis.clone(), FormKind::Quadrature);
    for (j, &w) in grid.omegas().iter().enumerate() {
        let z = susceptibility(osc, w);
        if z.norm_sqr() == 0.0 {
            return Err(Error::Pole { omega: w });
        }
        let inv = C64::new(1.0, 0.0) / z;
        x.set_u(j, carrier, inv * drive_sqrt);
        x.set_v(j, carrier, inv * drive_sqrt);
        // f_fl(w) = g e(w) for w > 0 and g e^dag(-w) for w < 0
        let th = inv * (2.0 * osc.omega_m * bath_coupling_sq(osc, w).sqrt());
        if w > 0.0 {
            x.set_u(j, bath, th);
        } else if w < 0.0 {
            x.set_v(j, bath, th);
        }
        // Hermitian force: f(w) = (f(w) + f^dag(-w)) / 2
        let s = inv * osc.omega_m;
        x.set_signal(j, s, s);
    }

    let a = LinearForm::input(grid.clone(), basis.clone(), ChannelLabel::Carrier)?;
    let g = probe.coupling(osc);
    let b = combine(
        &[a, x],
        &[
            Weight::real(&grid, 1.0),
            Weight::constant(&grid, C64::new(0.0, g)),
        ],
    )?;

    let angles: Vec<f64> = match psi {
        HomodyneAngle::Fixed(p) => vec![p; grid.len()],
        HomodyneAngle::Optimal => grid
            .omegas()
            .iter()
            .map(|&w| optimal_homodyne_angle(osc, probe.kappa, w.abs()))
            .collect::<Result<_>>()?,
    };
    let b_a = b.quadrature(0.0);
    let b_phi = b.quadrature(FRAC_PI_2);
    let b_psi = b.quadrature_per_point(&angles)?;

    let mut drive = LinearForm::zero(grid.clone(), basis.clone(), FormKind::Field);
    for j in 0..grid.len() {
        drive.set_u(j, carrier, C64::new(1.0, 0.0));
        drive.set_v(j, carrier, C64::new(1.0, 0.0));
    }

    Ok(SchemeInstance {
        kind: ProbeMode::Monochromatic,
        osc: *osc,
        probe: *probe,
        grid,
        basis,
        fields: vec![(String::from("b"), b)],
        observables: vec![
            (String::from("b_a"), b_a),
            (String::from("b_phi"), b_phi),
            (String::from("b_psi"), b_psi),
        ],
        drive: vec![drive],
        backaction_record: None,
        signal_observable: "b_psi",
        angles: Some(angles),
        meta: SchemeMeta::None,
    })
}
