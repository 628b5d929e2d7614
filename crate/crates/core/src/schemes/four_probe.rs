use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::{check_band, check_mode, port_output, rotating_weight, Probe, ProbeMode, SchemeInstance, SchemeMeta};
use crate::channel::{ChannelBasis, ChannelLabel, ChannelStats, NoiseChannel};
use crate::error::Result;
use crate::form::{combine, FormKind, JointMeasurement, LinearForm, Weight};
use crate::grid::{Band, FrequencyGrid};
use crate::mechanics::{rotating_susceptibility, Oscillator};
use crate::C64;
#[allow(unused_imports)] // inherent methods shadow it when std is linked
use num_traits::Float;

const PORTS: [u8; 2] = [1, 2];
const ORDERS: [i8; 2] = [1, 2];

/// `(-1)^(l-1)`.
fn port_sign(l: u8) -> f64 {
    if l % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

fn sideband(l: u8, n: i8, upper: bool) -> ChannelLabel {
    let off = 2 * n - 1;
    ChannelLabel::Sideband {
        port: l,
        half_offset: if upper { off } else { -off },
    }
}

/// Names of the four-probe quadratures in build order:
/// `(beta_a+,l,n, beta_a-,l,n)` for `l, n in {1, 2}`.
pub fn four_probe_names() -> Vec<(u8, i8, String, String)> {
    let mut out = Vec::new();
    for l in PORTS {
        for n in ORDERS {
            out.push((l, n, format!("beta_plus_{l}_{n}"), format!("beta_minus_{l}_{n}")));
        }
    }
    out
}

/// Two dichromatic probes on opposite sides of the mirror, with the sidebands
/// at `w0 -+ wM/2` and `w0 -+ 3 wM/2` on each side.
///
/// Observables: the eight quadratures `beta_plus_l_n`, `beta_minus_l_n` and the
/// back-action-free combination `B`; fields `b_l_{+,-}n`.
pub fn build_four_probe(
    osc: &Oscillator,
    probe: &Probe,
    grid: Arc<FrequencyGrid>,
) -> Result<SchemeInstance> {
    check_mode(probe, ProbeMode::FourProbe)?;
    check_band(&grid, Band::Baseband)?;

    let mut channels = Vec::new();
    for l in PORTS {
        for n in ORDERS {
            for upper in [true, false] {
                channels.push(NoiseChannel { label: sideband(l, n, upper), stats: ChannelStats::Vacuum });
            }
        }
    }
    channels.push(NoiseChannel { label: ChannelLabel::Bath, stats: ChannelStats::Thermal(osc.n_at_resonance()) });
    let basis = Arc::new(ChannelBasis::new(channels)?);
    let idx = |label| basis.index_of(label).expect("label in basis");
    let ib = idx(ChannelLabel::Bath);

    let g = probe.coupling(osc);
    let bath = (2.0 * osc.gamma_m).sqrt();

    // d(W) = chi [i (f + f_fl) + i G sum_{l,n} (-1)^(l-1) (a_{l,+n}(W) + a_{l,-n}^dag(-W))]
    let mut d = LinearForm::zero(grid.clone(), basis.clone(), FormKind::Field);
    let mut drive = LinearForm::zero(grid.clone(), basis.clone(), FormKind::Field);
    for (j, &w) in grid.omegas().iter().enumerate() {
        let ichi = C64::new(0.0, 1.0) * rotating_susceptibility(osc, w)?;
        for l in PORTS {
            let s = port_sign(l);
            for n in ORDERS {
                d.set_u(j, idx(sideband(l, n, true)), ichi * (g * s));
                d.set_v(j, idx(sideband(l, n, false)), ichi * (g * s));
                drive.set_u(j, idx(sideband(l, n, true)), C64::new(s, 0.0));
                drive.set_v(j, idx(sideband(l, n, false)), C64::new(s, 0.0));
            }
        }
        d.set_u(j, ib, ichi * bath);
        d.set_signal(j, ichi, C64::new(0.0, 0.0));
    }
    let d_dag = d.adjoint_reflect();
    let drive_dag = drive.adjoint_reflect();

    let mut fields = Vec::new();
    let mut observables = Vec::new();
    let mut betas_plus = Vec::new();
    let mut betas_minus = Vec::new();
    for (l, n, name_plus, name_minus) in four_probe_names() {
        let ig = Weight::constant(&grid, C64::new(0.0, g * port_sign(l)));
        let out = port_output(
            LinearForm::input(grid.clone(), basis.clone(), sideband(l, n, true))?,
            LinearForm::input(grid.clone(), basis.clone(), sideband(l, n, false))?,
            d.scaled(&ig)?,
            d_dag.scaled(&ig)?,
        )?;
        let (up, down, bp, bm) = (out.b_up, out.b_down, out.beta_plus, out.beta_minus);
        fields.push((format!("b_{l}_+{n}"), up));
        fields.push((format!("b_{l}_-{n}"), down));
        observables.push((name_plus, bp.clone()));
        observables.push((name_minus, bm.clone()));
        betas_plus.push((l, bp));
        betas_minus.push((l, bm));
    }

    // B = 1/2 sum (-1)^l beta_a-,l,n - (K / wM) chi sum (-1)^(l-1) beta_a+,l,n, K / wM = 4 G^2
    let record = combine(
        &betas_plus.iter().map(|(_, f)| f.clone()).collect::<Vec<_>>(),
        &betas_plus.iter().map(|(l, _)| Weight::real(&grid, port_sign(*l))).collect::<Vec<_>>(),
    )?;
    let mut forms = Vec::new();
    let mut weights = Vec::new();
    for (l, f) in &betas_minus {
        forms.push(f.clone());
        weights.push(Weight::real(&grid, -0.5 * port_sign(*l)));
    }
    for (l, f) in &betas_plus {
        forms.push(f.clone());
        weights.push(rotating_weight(osc, &grid, -4.0 * g * g * port_sign(*l))?);
    }
    let b = JointMeasurement::new(forms)?.combine(&weights)?;
    observables.push((String::from("B"), b));

    Ok(SchemeInstance {
        kind: ProbeMode::FourProbe,
        osc: *osc,
        probe: *probe,
        grid,
        basis,
        fields,
        observables,
        drive: vec![drive, drive_dag],
        backaction_record: Some(record),
        signal_observable: "B",
        angles: None,
        meta: SchemeMeta::FourProbe { d: C64::new(0.0, 0.0) },
    })
}
