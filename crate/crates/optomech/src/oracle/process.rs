//! Back-action subtraction on recorded quadratures.

use optomech_core::ProbeMode;

use super::simulate::{HomodyneRecord, PoleFilter, RotatingSetup};
use super::OracleError;

/// Combined back-action-free record.
///
/// Toy: `B_beta = beta_a- + w H[beta_a+]`; four-probe:
/// `B = 1/2 sum (-1)^l beta_a-,l,n - 2 w H[sum (-1)^(l-1) beta_a+,l,n]`. `H` is
/// the step-exact response `1 / (gamma_M - i W)` of the simulator and
/// `w = K / (2 wM)` cancels the back action. `weight` overrides `w`.
pub fn postprocess_subtraction(
    setup: &RotatingSetup,
    record: &HomodyneRecord,
    weight: Option<f64>,
) -> Result<(String, Vec<f64>), OracleError> {
    let w = weight.unwrap_or(setup.kappa / (2.0 * setup.osc.omega_m));
    let filter = PoleFilter::new(setup.osc.gamma_m, record.dt);
    match setup.mode {
        ProbeMode::DichromaticToy => {
            let plus = record.channel("beta_a_plus")?;
            let minus = record.channel("beta_a_minus")?;
            let h = filter.apply(plus);
            Ok((
                "B_beta".into(),
                minus.iter().zip(&h).map(|(m, p)| m + w * p).collect(),
            ))
        }
        ProbeMode::FourProbe => {
            let names = setup.channel_names();
            let len = record.channel(&names[0])?.len();
            let mut sum_minus = vec![0.0; len];
            let mut record_plus = vec![0.0; len];
            for (pair, (l, _, _, _)) in optomech_core::schemes::four_probe_names().iter().enumerate() {
                let s = if l % 2 == 1 { 1.0 } else { -1.0 };
                let p = record.channel(&names[2 * pair])?;
                let m = record.channel(&names[2 * pair + 1])?;
                for k in 0..len {
                    record_plus[k] += s * p[k];
                    sum_minus[k] -= 0.5 * s * m[k];
                }
            }
            let h = filter.apply(&record_plus);
            Ok((
                "B".into(),
                sum_minus.iter().zip(&h).map(|(m, p)| m - 2.0 * w * p).collect(),
            ))
        }
        ProbeMode::Monochromatic => Err(OracleError::Unsupported(
            "no back-action record in the monochromatic scheme".into(),
        )),
    }
}
