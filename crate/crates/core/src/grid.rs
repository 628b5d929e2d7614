//! Symmetric frequency grids with explicit `+W / -W` pairing.

use alloc::vec::Vec;

use crate::error::{param, Result};

/// Which physical frequency a grid sample denotes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    /// Absolute (lab-frame) Fourier frequency `w` of the mirror coordinate.
    Absolute,
    /// Offset `W` from the mechanical resonance (rotating frame).
    Baseband,
}

/// Ordered frequency samples, symmetric about zero.
///
/// Sample `j` and sample `len - 1 - j` are each other's negatives, so the
/// partner lookup is an index computation rather than a search.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    omegas: Vec<f64>,
    band: Band,
}

impl FrequencyGrid {
    /// Builds the grid `{-w_k} U {0?} U {w_k}` from strictly positive samples.
    pub fn symmetric(positive: &[f64], include_zero: bool, band: Band) -> Result<Self> {
        if positive.is_empty() && !include_zero {
            return Err(param("grid", "grid is empty"));
        }
        for w in positive.windows(2) {
            if !(w[1] > w[0]) {
                return Err(param("grid", "positive samples must be strictly increasing"));
            }
        }
        if let Some(&first) = positive.first() {
            if !(first > 0.0) || !positive.iter().all(|w| w.is_finite()) {
                return Err(param("grid", "positive samples must be finite and > 0"));
            }
        }
        let mut omegas = Vec::with_capacity(2 * positive.len() + 1);
        omegas.extend(positive.iter().rev().map(|w| -w));
        if include_zero {
            omegas.push(0.0);
        }
        omegas.extend_from_slice(positive);
        Ok(Self { omegas, band })
    }

    /// `points` uniformly spaced samples on `[min, max]` (with `min >= 0`) and
    /// their mirror images. A zero endpoint is kept once.
    pub fn uniform(min: f64, max: f64, points: usize, band: Band) -> Result<Self> {
        if points == 0 {
            return Err(param("grid.points", "grid is empty"));
        }
        if !(min >= 0.0) || !(max >= min) || !max.is_finite() {
            return Err(param("grid", "need 0 <= min <= max < inf"));
        }
        if points > 1 && max == min {
            return Err(param("grid", "min == max with more than one point"));
        }
        let step = if points > 1 {
            (max - min) / (points - 1) as f64
        } else {
            0.0
        };
        let samples: Vec<f64> = (0..points).map(|i| min + step * i as f64).collect();
        let include_zero = samples[0] == 0.0;
        let positive: Vec<f64> = samples.into_iter().filter(|&w| w > 0.0).collect();
        Self::symmetric(&positive, include_zero, band)
    }

    /// Number of samples (both signs).
    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    /// Always false for a constructed grid.
    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    /// Frequency of sample `j`.
    #[inline]
    pub fn omega(&self, j: usize) -> f64 {
        self.omegas[j]
    }

    /// All samples in increasing order.
    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    /// Index of `-omega(j)`.
    #[inline]
    pub fn partner(&self, j: usize) -> usize {
        self.omegas.len() - 1 - j
    }

    /// Physical meaning of the samples.
    pub fn band(&self) -> Band {
        self.band
    }

    /// Indices of the non-negative half, in increasing frequency.
    pub fn nonnegative_indices(&self) -> impl Iterator<Item = usize> + '_ {
        let start = self.omegas.len() / 2;
        start..self.omegas.len()
    }

    /// Index of a sample equal to `omega`, if present.
    pub fn index_of(&self, omega: f64) -> Option<usize> {
        self.omegas.iter().position(|&w| w == omega)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn partners_are_negatives() {
        let g = FrequencyGrid::uniform(0.0, 2.0, 5, Band::Baseband).unwrap();
        assert_eq!(g.len(), 9);
        for j in 0..g.len() {
            assert_eq!(g.omega(g.partner(j)), -g.omega(j));
        }
        assert_eq!(g.partner(4), 4);
        assert!(g.omegas().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn without_zero() {
        let g = FrequencyGrid::uniform(1.0, 2.0, 3, Band::Absolute).unwrap();
        assert_eq!(g.omegas(), &[-2.0, -1.5, -1.0, 1.0, 1.5, 2.0]);
        assert_eq!(g.nonnegative_indices().collect::<Vec<_>>(), vec![3, 4, 5]);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(FrequencyGrid::uniform(0.0, 1.0, 0, Band::Absolute).is_err());
        assert!(FrequencyGrid::uniform(-1.0, 1.0, 3, Band::Absolute).is_err());
        assert!(FrequencyGrid::uniform(2.0, 1.0, 3, Band::Absolute).is_err());
        assert!(FrequencyGrid::symmetric(&[1.0, 1.0], false, Band::Absolute).is_err());
        assert!(FrequencyGrid::symmetric(&[], false, Band::Absolute).is_err());
    }
}
