//! Observables as linear forms over input noise operators.
//!
//! At every grid frequency `W` a form is
//!
//! ```text
//! F(W) = sum_i u_i(W) a_i(W) + v_i(W) a_i^dag(-W) + sigma_u(W) f(W) + sigma_v(W) f^dag(-W)
//! ```
//!
//! where `a_i` are the channels of a [`ChannelBasis`] and `f` is the classical
//! signal force amplitude of the scheme's frame. A form is a quadrature
//! (self-adjoint family) when `u_i(W) = conj(v_i(-W))` for every channel and
//! for the signal pair.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use crate::channel::{ChannelBasis, ChannelLabel};
use crate::convention::SINGLE_SIDED;
use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::C64;
#[allow(unused_imports)] // inherent methods shadow it when std is linked
use num_traits::Float;

/// Tolerance (relative to the coefficient scale) under which two observables
/// are treated as commuting by [`JointMeasurement`].
pub const COMMUTATION_TOLERANCE: f64 = 1e-12;

/// Whether a form is an arbitrary operator family or a self-adjoint quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKind {
    /// Annihilation-type or otherwise non-Hermitian family (e.g. an output field `b(W)`).
    Field,
    /// Self-adjoint quadrature family.
    Quadrature,
}

/// A complex weight function sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    values: Vec<C64>,
}

impl Weight {
    /// Same complex value at every grid point.
    pub fn constant(grid: &FrequencyGrid, value: C64) -> Self {
        Self {
            values: vec![value; grid.len()],
        }
    }

    /// Real constant.
    pub fn real(grid: &FrequencyGrid, value: f64) -> Self {
        Self::constant(grid, C64::new(value, 0.0))
    }

    /// Arbitrary per-point values.
    pub fn from_fn(grid: &FrequencyGrid, f: impl Fn(f64) -> C64) -> Self {
        Self {
            values: grid.omegas().iter().map(|&w| f(w)).collect(),
        }
    }

    /// Weight satisfying `w(-W) = conj(w(W))` exactly: `f` is evaluated on the
    /// non-negative half and mirrored. At `W = 0` the imaginary part must be
    /// below 1e-12 of the magnitude and is zeroed.
    pub fn hermitian(grid: &FrequencyGrid, f: impl Fn(f64) -> C64) -> Result<Self> {
        let mut values = vec![C64::new(0.0, 0.0); grid.len()];
        for j in grid.nonnegative_indices() {
            let w = f(grid.omega(j));
            let p = grid.partner(j);
            if p == j {
                if w.im.abs() > 1e-12 * w.norm().max(f64::MIN_POSITIVE) {
                    return Err(Error::Contract(alloc::format!(
                        "hermitian weight is not real at zero frequency: {w}"
                    )));
                }
                values[j] = C64::new(w.re, 0.0);
            } else {
                values[j] = w;
                values[p] = w.conj();
            }
        }
        Ok(Self { values })
    }

    /// Value at grid point `j`.
    #[inline]
    pub fn at(&self, j: usize) -> C64 {
        self.values[j]
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True when there are no samples.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn is_hermitian_on(&self, grid: &FrequencyGrid) -> bool {
        (0..grid.len()).all(|j| self.values[grid.partner(j)] == self.values[j].conj())
    }
}

/// An observable as complex coefficients over input channels plus a signal pair.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm {
    grid: Arc<FrequencyGrid>,
    basis: Arc<ChannelBasis>,
    kind: FormKind,
    // Row-major [grid point][channel].
    u: Vec<C64>,
    v: Vec<C64>,
    sig_u: Vec<C64>,
    sig_v: Vec<C64>,
}

impl LinearForm {
    /// The zero form.
    pub fn zero(grid: Arc<FrequencyGrid>, basis: Arc<ChannelBasis>, kind: FormKind) -> Self {
        let n = grid.len();
        let m = basis.len();
        let z = C64::new(0.0, 0.0);
        Self {
            grid,
            basis,
            kind,
            u: vec![z; n * m],
            v: vec![z; n * m],
            sig_u: vec![z; n],
            sig_v: vec![z; n],
        }
    }

    /// The bare annihilation operator `a_label(W)`.
    pub fn input(
        grid: Arc<FrequencyGrid>,
        basis: Arc<ChannelBasis>,
        label: ChannelLabel,
    ) -> Result<Self> {
        let i = basis
            .index_of(label)
            .ok_or_else(|| Error::Structure(alloc::format!("channel {label:?} not in basis")))?;
        let mut f = Self::zero(grid, basis, FormKind::Field);
        for j in 0..f.grid.len() {
            f.set_u(j, i, C64::new(1.0, 0.0));
        }
        Ok(f)
    }

    /// The bare classical signal amplitude `f(W)` as a field.
    pub fn signal_input(grid: Arc<FrequencyGrid>, basis: Arc<ChannelBasis>) -> Self {
        let mut f = Self::zero(grid, basis, FormKind::Field);
        f.sig_u.iter_mut().for_each(|s| *s = C64::new(1.0, 0.0));
        f
    }

    /// Grid shared by all coefficients.
    pub fn grid(&self) -> &Arc<FrequencyGrid> {
        &self.grid
    }

    /// Channel basis.
    pub fn basis(&self) -> &Arc<ChannelBasis> {
        &self.basis
    }

    /// Field or quadrature.
    pub fn kind(&self) -> FormKind {
        self.kind
    }

    #[inline]
    fn idx(&self, j: usize, i: usize) -> usize {
        j * self.basis.len() + i
    }

    /// Coefficient of `a_i(W_j)`.
    #[inline]
    pub fn u(&self, j: usize, i: usize) -> C64 {
        self.u[self.idx(j, i)]
    }

    /// Coefficient of `a_i^dag(-W_j)`.
    #[inline]
    pub fn v(&self, j: usize, i: usize) -> C64 {
        self.v[self.idx(j, i)]
    }

    /// Coefficients `(sigma_u, sigma_v)` of `f(W_j)` and `f^dag(-W_j)`.
    #[inline]
    pub fn signal_pair(&self, j: usize) -> (C64, C64) {
        (self.sig_u[j], self.sig_v[j])
    }

    pub(crate) fn set_u(&mut self, j: usize, i: usize, c: C64) {
        let k = self.idx(j, i);
        self.u[k] = c;
    }

    pub(crate) fn set_v(&mut self, j: usize, i: usize, c: C64) {
        let k = self.idx(j, i);
        self.v[k] = c;
    }

    pub(crate) fn set_signal(&mut self, j: usize, su: C64, sv: C64) {
        self.sig_u[j] = su;
        self.sig_v[j] = sv;
    }

    fn check_compatible(&self, other: &LinearForm) -> Result<()> {
        if !(Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid) {
            return Err(Error::Structure("forms live on different grids".into()));
        }
        if !(Arc::ptr_eq(&self.basis, &other.basis) || self.basis == other.basis) {
            return Err(Error::Structure("forms use different channel bases".into()));
        }
        Ok(())
    }

    /// `F(-W)^dag` expressed on the same grid:
    /// `u'(W) = conj(v(-W))`, `v'(W) = conj(u(-W))`.
    pub fn adjoint_reflect(&self) -> LinearForm {
        let mut out = self.clone();
        let m = self.basis.len();
        for j in 0..self.grid.len() {
            let p = self.grid.partner(j);
            for i in 0..m {
                out.u[j * m + i] = self.v[p * m + i].conj();
                out.v[j * m + i] = self.u[p * m + i].conj();
            }
            out.sig_u[j] = self.sig_v[p].conj();
            out.sig_v[j] = self.sig_u[p].conj();
        }
        out
    }

    /// Homodyne quadrature `(e^{-i psi} F + e^{i psi} F^dag(-W)) / sqrt 2`.
    ///
    /// `psi = 0` gives the amplitude quadrature, `psi = pi/2` the phase quadrature.
    pub fn quadrature(&self, psi: f64) -> LinearForm {
        let angles = vec![psi; self.grid.len()];
        self.quadrature_per_point(&angles)
            .expect("constant angle is even in frequency")
    }

    /// Quadrature with a frequency-dependent angle; `angles` must be even in `W`.
    pub fn quadrature_per_point(&self, angles: &[f64]) -> Result<LinearForm> {
        let n = self.grid.len();
        if angles.len() != n {
            return Err(Error::Structure("angle count differs from grid size".into()));
        }
        if (0..n).any(|j| angles[j] != angles[self.grid.partner(j)]) {
            return Err(Error::Contract("homodyne angle must be even in frequency".into()));
        }
        let refl = self.adjoint_reflect();
        let m = self.basis.len();
        let mut out = self.clone();
        out.kind = FormKind::Quadrature;
        for (j, &psi) in angles.iter().enumerate() {
            let e = C64::new(psi.cos(), psi.sin()) * FRAC_1_SQRT_2;
            let em = e.conj();
            for i in 0..m {
                let k = j * m + i;
                out.u[k] = em * self.u[k] + e * refl.u[k];
                out.v[k] = em * self.v[k] + e * refl.v[k];
            }
            out.sig_u[j] = em * self.sig_u[j] + e * refl.sig_u[j];
            out.sig_v[j] = em * self.sig_v[j] + e * refl.sig_v[j];
        }
        Ok(out)
    }

    /// `c * self` for a complex weight function.
    pub fn scaled(&self, w: &Weight) -> Result<LinearForm> {
        combine(core::slice::from_ref(self), core::slice::from_ref(w))
    }

    /// Maximum violation of the self-adjoint pairing `u(W) = conj(v(-W))`,
    /// over channels and the signal pair.
    pub fn pairing_error(&self) -> f64 {
        let m = self.basis.len();
        let mut worst: f64 = 0.0;
        for j in 0..self.grid.len() {
            let p = self.grid.partner(j);
            for i in 0..m {
                worst = worst.max((self.u[j * m + i] - self.v[p * m + i].conj()).norm());
            }
            worst = worst.max((self.sig_u[j] - self.sig_v[p].conj()).norm());
        }
        worst
    }

    /// Commutator density `c(W)` with `[F1(W), F2^dag(W')] = 2 pi c(W) delta(W - W')`.
    pub fn commutator(&self, other: &LinearForm) -> Result<Vec<C64>> {
        self.check_compatible(other)?;
        let m = self.basis.len();
        Ok((0..self.grid.len())
            .map(|j| {
                (0..m).fold(C64::new(0.0, 0.0), |acc, i| {
                    let k = j * m + i;
                    acc + self.u[k] * other.u[k].conj() - self.v[k] * other.v[k].conj()
                })
            })
            .collect())
    }

    /// Single-sided symmetrized noise density of a quadrature (signal excluded).
    pub fn psd(&self) -> Result<Vec<f64>> {
        if self.kind != FormKind::Quadrature {
            return Err(Error::Contract(
                "PSD is only defined for quadrature (self-adjoint) forms".into(),
            ));
        }
        let m = self.basis.len();
        Ok((0..self.grid.len())
            .map(|j| {
                SINGLE_SIDED
                    * (0..m)
                        .map(|i| {
                            let k = j * m + i;
                            (self.u[k].norm_sqr() + self.v[k].norm_sqr())
                                * self.basis.channel(i).stats.weight(j)
                        })
                        .sum::<f64>()
            })
            .collect())
    }

    /// Transfer coefficient onto the force amplitude quadrature
    /// `f_a = (f(W) + f^dag(-W)) / sqrt 2`, i.e. `(sigma_u + sigma_v) / sqrt 2`.
    pub fn signal_transfer(&self) -> Vec<C64> {
        self.sig_u
            .iter()
            .zip(&self.sig_v)
            .map(|(a, b)| (a + b) * FRAC_1_SQRT_2)
            .collect()
    }

    /// Largest coefficient magnitude at grid point `j` (used for scaling tolerances).
    pub fn scale_at(&self, j: usize) -> f64 {
        let m = self.basis.len();
        (0..m)
            .map(|i| self.u[j * m + i].norm().max(self.v[j * m + i].norm()))
            .fold(0.0, f64::max)
    }

    /// Returns true when every coefficient is finite.
    pub fn is_finite(&self) -> bool {
        self.u
            .iter()
            .chain(&self.v)
            .chain(&self.sig_u)
            .chain(&self.sig_v)
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Coefficient-wise weighted sum `sum_k w_k(W) F_k(W)`, signal included.
///
/// The result is a quadrature when every input is a quadrature and every
/// weight satisfies `w(-W) = conj(w(W))`; otherwise it is a field.
pub fn combine(forms: &[LinearForm], weights: &[Weight]) -> Result<LinearForm> {
    let first = forms
        .first()
        .ok_or_else(|| Error::Contract("combine needs at least one form".into()))?;
    if forms.len() != weights.len() {
        return Err(Error::Structure(alloc::format!(
            "{} forms but {} weights",
            forms.len(),
            weights.len()
        )));
    }
    for f in &forms[1..] {
        first.check_compatible(f)?;
    }
    let n = first.grid.len();
    if weights.iter().any(|w| w.len() != n) {
        return Err(Error::Structure("weight length differs from grid size".into()));
    }
    let quadrature = forms.iter().all(|f| f.kind == FormKind::Quadrature)
        && weights.iter().all(|w| w.is_hermitian_on(&first.grid));
    let mut out = LinearForm::zero(
        first.grid.clone(),
        first.basis.clone(),
        if quadrature {
            FormKind::Quadrature
        } else {
            FormKind::Field
        },
    );
    let m = first.basis.len();
    for (f, w) in forms.iter().zip(weights) {
        for j in 0..n {
            let c = w.at(j);
            for i in 0..m {
                let k = j * m + i;
                out.u[k] += c * f.u[k];
                out.v[k] += c * f.v[k];
            }
            out.sig_u[j] += c * f.sig_u[j];
            out.sig_v[j] += c * f.sig_v[j];
        }
    }
    Ok(out)
}

/// A set of quadratures verified to commute pairwise at every grid point, so
/// they can be recorded simultaneously and post-processed jointly.
#[derive(Debug, Clone)]
pub struct JointMeasurement {
    forms: Vec<LinearForm>,
}

impl JointMeasurement {
    /// Fails unless all forms are quadratures and every pair commutes on the
    /// whole grid within [`COMMUTATION_TOLERANCE`].
    pub fn new(forms: Vec<LinearForm>) -> Result<Self> {
        if forms.is_empty() {
            return Err(Error::Contract("joint measurement needs at least one form".into()));
        }
        if forms.iter().any(|f| f.kind != FormKind::Quadrature) {
            return Err(Error::Contract("joint measurement needs quadratures".into()));
        }
        for a in 0..forms.len() {
            for b in (a + 1)..forms.len() {
                let c = forms[a].commutator(&forms[b])?;
                for (j, cj) in c.iter().enumerate() {
                    let scale = (forms[a].scale_at(j) * forms[b].scale_at(j)).max(1.0);
                    if cj.norm() > COMMUTATION_TOLERANCE * scale {
                        return Err(Error::Contract(alloc::format!(
                            "observables {a} and {b} do not commute at W = {} (|c| = {:e})",
                            forms[a].grid.omega(j),
                            cj.norm()
                        )));
                    }
                }
            }
        }
        Ok(Self { forms })
    }

    /// The recorded observables.
    pub fn forms(&self) -> &[LinearForm] {
        &self.forms
    }

    /// Post-processed linear combination of the simultaneously recorded forms.
    pub fn combine(&self, weights: &[Weight]) -> Result<LinearForm> {
        combine(&self.forms, weights)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{ChannelStats, NoiseChannel};
    use crate::grid::Band;

    fn setup(stats: ChannelStats) -> (Arc<FrequencyGrid>, Arc<ChannelBasis>) {
        let g = Arc::new(FrequencyGrid::uniform(0.0, 3.0, 4, Band::Absolute).unwrap());
        let b = Arc::new(
            ChannelBasis::new(vec![NoiseChannel {
                label: ChannelLabel::Carrier,
                stats,
            }])
            .unwrap(),
        );
        (g, b)
    }

    #[test]
    fn canonical_commutator_of_input() {
        let (g, b) = setup(ChannelStats::Vacuum);
        let a = LinearForm::input(g, b, ChannelLabel::Carrier).unwrap();
        assert!(a.commutator(&a).unwrap().iter().all(|c| *c == C64::new(1.0, 0.0)));
    }

    #[test]
    fn vacuum_quadrature_is_unit_psd() {
        let (g, b) = setup(ChannelStats::Vacuum);
        let a = LinearForm::input(g, b, ChannelLabel::Carrier).unwrap();
        let q = a.quadrature(0.0);
        assert_eq!(q.u(0, 0), C64::new(FRAC_1_SQRT_2, 0.0));
        for s in q.psd().unwrap() {
            assert!((s - 1.0).abs() < 1e-15);
        }
        // quadratures of the same kind commute with themselves
        assert!(q.commutator(&q).unwrap().iter().all(|c| c.norm() < 1e-16));
    }

    #[test]
    fn thermal_weighting() {
        let (g, b) = setup(ChannelStats::Thermal(3.0));
        let q = LinearForm::input(g, b, ChannelLabel::Carrier)
            .unwrap()
            .quadrature(0.3);
        for s in q.psd().unwrap() {
            assert!((s - 7.0).abs() < 1e-14);
        }
    }

    #[test]
    fn amplitude_and_phase_do_not_commute() {
        let (g, b) = setup(ChannelStats::Vacuum);
        let a = LinearForm::input(g, b, ChannelLabel::Carrier).unwrap();
        let c = a.quadrature(0.0).commutator(&a.quadrature(core::f64::consts::FRAC_PI_2)).unwrap();
        assert!(c.iter().all(|c| (c - C64::new(0.0, 1.0)).norm() < 1e-15));
        assert!(JointMeasurement::new(vec![
            a.quadrature(0.0),
            a.quadrature(core::f64::consts::FRAC_PI_2)
        ])
        .is_err());
    }

    #[test]
    fn psd_refuses_fields() {
        let (g, b) = setup(ChannelStats::Vacuum);
        let a = LinearForm::input(g, b, ChannelLabel::Carrier).unwrap();
        assert!(matches!(a.psd(), Err(Error::Contract(_))));
    }

    #[test]
    fn combine_identity_and_cancellation() {
        let (g, b) = setup(ChannelStats::Vacuum);
        let q = LinearForm::input(g.clone(), b, ChannelLabel::Carrier)
            .unwrap()
            .quadrature(0.7);
        let id = combine(core::slice::from_ref(&q), &[Weight::real(&g, 1.0)]).unwrap();
        assert_eq!(id, q);
        let zero = combine(
            &[q.clone(), q.clone()],
            &[Weight::real(&g, 1.0), Weight::real(&g, -1.0)],
        )
        .unwrap();
        assert!(zero.psd().unwrap().iter().all(|s| *s == 0.0));
        assert!(combine(&[], &[]).is_err());
        assert!(combine(core::slice::from_ref(&q), &[]).is_err());
    }

    #[test]
    fn non_hermitian_weight_demotes_to_field() {
        let (g, b) = setup(ChannelStats::Vacuum);
        let q = LinearForm::input(g.clone(), b, ChannelLabel::Carrier)
            .unwrap()
            .quadrature(0.0);
        let f = q.scaled(&Weight::from_fn(&g, |_| C64::new(1.0, 1.0))).unwrap();
        assert_eq!(f.kind(), FormKind::Field);
        let h = q
            .scaled(&Weight::hermitian(&g, |w| C64::new(1.0, w)).unwrap())
            .unwrap();
        assert_eq!(h.kind(), FormKind::Quadrature);
        assert_eq!(h.pairing_error(), 0.0);
    }

    #[test]
    fn hermitian_weight_rejects_complex_zero_point() {
        let (g, _) = setup(ChannelStats::Vacuum);
        assert!(Weight::hermitian(&g, |_| C64::new(1.0, 1.0)).is_err());
        let w = Weight::hermitian(&g, |_| C64::new(1.0, 1e-14)).unwrap();
        assert_eq!(w.at(g.len() / 2).im, 0.0);
    }

    #[test]
    fn mismatched_grids_are_structural_errors() {
        let (g, b) = setup(ChannelStats::Vacuum);
        let g2 = Arc::new(FrequencyGrid::uniform(0.0, 1.0, 4, Band::Absolute).unwrap());
        let a = LinearForm::input(g, b.clone(), ChannelLabel::Carrier).unwrap();
        let c = LinearForm::input(g2, b, ChannelLabel::Carrier).unwrap();
        assert!(matches!(a.commutator(&c), Err(Error::Structure(_))));
    }
}
