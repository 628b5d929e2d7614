//! Input noise channels and their statistics.

use alloc::vec::Vec;

use crate::convention::occupation_weight;
use crate::error::{param, Error, Result};

/// Identifies one input operator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChannelLabel {
    /// Fluctuations of a single monochromatic carrier.
    Carrier,
    /// Sideband fluctuations at `carrier + offset * wM / 2` entering through `port`.
    Sideband {
        /// Port index (1 = left side of the mirror, 2 = right side).
        port: u8,
        /// Offset in units of `wM / 2` (odd integer).
        half_offset: i8,
    },
    /// Mechanical bath operator `e_fl`.
    Bath,
}

impl ChannelLabel {
    /// True for every channel carried by the optical probe.
    pub fn is_optical(&self) -> bool {
        !matches!(self, ChannelLabel::Bath)
    }
}

/// Statistics of an input channel.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelStats {
    /// Vacuum (coherent-state) fluctuations.
    Vacuum,
    /// Thermal occupation `n >= 0`, constant across the grid.
    Thermal(f64),
    /// Thermal occupation sampled per grid point.
    ThermalProfile(Vec<f64>),
}

impl ChannelStats {
    /// Symmetrized weight `n + 1/2` at grid point `j`.
    #[inline]
    pub fn weight(&self, j: usize) -> f64 {
        match self {
            ChannelStats::Vacuum => occupation_weight(0.0),
            ChannelStats::Thermal(n) => occupation_weight(*n),
            ChannelStats::ThermalProfile(ns) => occupation_weight(ns[j]),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            ChannelStats::Vacuum => true,
            ChannelStats::Thermal(n) => n.is_finite() && *n >= 0.0,
            ChannelStats::ThermalProfile(ns) => ns.iter().all(|n| n.is_finite() && *n >= 0.0),
        };
        if ok {
            Ok(())
        } else {
            Err(param("n_thermal", "occupation must be finite and >= 0"))
        }
    }
}

/// One independent input channel.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseChannel {
    /// Channel identity.
    pub label: ChannelLabel,
    /// Statistics.
    pub stats: ChannelStats,
}

/// Ordered set of channels with unique labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelBasis {
    channels: Vec<NoiseChannel>,
}

impl ChannelBasis {
    /// Validates label uniqueness and statistics.
    pub fn new(channels: Vec<NoiseChannel>) -> Result<Self> {
        for (i, c) in channels.iter().enumerate() {
            c.stats.validate()?;
            if channels[..i].iter().any(|o| o.label == c.label) {
                return Err(Error::Contract(alloc::format!(
                    "duplicate channel label {:?}",
                    c.label
                )));
            }
        }
        Ok(Self { channels })
    }

    /// Number of channels.
    pub fn len(&self) -> usize {
        self.channels.len()
    }

    /// True when there are no channels.
    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    /// Channel `i`.
    pub fn channel(&self, i: usize) -> &NoiseChannel {
        &self.channels[i]
    }

    /// All channels.
    pub fn channels(&self) -> &[NoiseChannel] {
        &self.channels
    }

    /// Position of a label.
    pub fn index_of(&self, label: ChannelLabel) -> Option<usize> {
        self.channels.iter().position(|c| c.label == label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights() {
        assert_eq!(ChannelStats::Vacuum.weight(0), 0.5);
        assert_eq!(ChannelStats::Thermal(3.0).weight(0), 3.5);
        assert_eq!(ChannelStats::ThermalProfile(alloc::vec![1.0, 2.0]).weight(1), 2.5);
    }

    #[test]
    fn duplicate_labels_rejected() {
        let c = NoiseChannel {
            label: ChannelLabel::Carrier,
            stats: ChannelStats::Vacuum,
        };
        assert!(ChannelBasis::new(alloc::vec![c.clone(), c]).is_err());
    }

    #[test]
    fn negative_occupation_rejected() {
        let c = NoiseChannel {
            label: ChannelLabel::Bath,
            stats: ChannelStats::Thermal(-1.0),
        };
        assert!(ChannelBasis::new(alloc::vec![c]).is_err());
    }
}
