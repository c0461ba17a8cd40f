//! Distribution-quality functionals of point sets.

pub mod bernoulli;
mod discrepancy;
mod energy;
mod potential;
mod report;
mod spectral;
mod transport;
mod uniformity;

pub use bernoulli::BernoulliPotential;
pub use discrepancy::{extreme_discrepancy, interval_count_error, star_discrepancy};
pub use energy::{energy_spectral, energy_td, pair_energy, pair_energy_profile};
pub use potential::{potential_deriv_l2, sup_grid_error_bound, potential_l1_norm, potential_sup_norm, PotentialField};
pub use report::{Metric, DEFAULT_GRID, MetricEvaluator, MetricReport, MetricRow};
pub use spectral::{SpectralState, SpectralStateTd};
pub use transport::{w1_circle_exact, w2_circle_exact};
pub use uniformity::{diaphony, diaphony_exact, w2_proxy, w2_proxy_td, weyl_ratio};

use serde::{Deserialize, Serialize};

/// A truncated quantity with a bound on what the truncation left out:
/// the untruncated value lies within `tail_bound` of `value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub tail_bound: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, tail_bound: 0.0 }
    }

    /// For `value = sqrt(s)` where the truncated sum `s` misses at most
    /// `tail` (nonnegative terms).
    pub(crate) fn sqrt_of_sum(s: f64, tail: f64) -> Self {
        let value = s.max(0.0).sqrt();
        Self { value, tail_bound: (s.max(0.0) + tail).sqrt() - value }
    }
}
