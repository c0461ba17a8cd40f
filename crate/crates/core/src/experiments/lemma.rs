use serde::{Deserialize, Serialize};

use crate::diagnostics::{potential_l1_norm, BernoulliPotential, DEFAULT_GRID};
use crate::error::{Error, Result};
use crate::kernel::{Kernel1D, KernelVariant};
use crate::sequence::PointSet;

use super::scan::powers_of_two;

/// Exact norms of `f_m` for every prefix `m = 1..=n_max` of a Bernoulli2
/// potential: `(sup, l1, deriv_l2)`.
pub fn bernoulli_prefix_norms(points: &[f64], n_max: usize) -> Vec<(f64, f64, f64)> {
    let mut sorted: Vec<f64> = Vec::with_capacity(n_max);
    let mut out = Vec::with_capacity(n_max);
    for &x in &points[..n_max] {
        let pos = sorted.partition_point(|&p| p < x);
        sorted.insert(pos, x);
        let pot = BernoulliPotential::from_sorted(&sorted);
        out.push((pot.sup_norm(), pot.l1_norm(), pot.deriv_l2()));
    }
    out
}

/// `[n, min(2n, n_max)]` for `n = 1, 2, 4, ... < n_max`.
pub fn doubling_windows(n_max: usize) -> Vec<(usize, usize)> {
    powers_of_two(n_max).into_iter().filter(|&n| n < n_max).map(|n| (n, (2 * n).min(n_max))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: usize,
    pub hi: usize,
    /// First `m` in the window with `||f_m||_1 <= threshold`.
    pub witness: Option<usize>,
    pub witness_l1: Option<f64>,
    /// Smallest `||f_m||_1` over the window.
    pub min_l1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublingReport {
    pub n_max: usize,
    /// `2 f(0) + tolerance`.
    pub threshold: f64,
    pub windows: Vec<Window>,
    pub all_witnessed: bool,
}

impl DoublingReport {
    pub fn witnesses(&self) -> Vec<usize> {
        self.windows.iter().filter_map(|w| w.witness).collect()
    }
}

fn l1_profile(points: &PointSet, kernel: &Kernel1D, n_max: usize) -> Result<Vec<f64>> {
    let xs = points.require_1d()?;
    if n_max > xs.len() {
        return Err(Error::InvalidConfig(format!("n_max = {n_max} exceeds the {} available points", xs.len())));
    }
    if kernel.variant() == KernelVariant::Bernoulli2 {
        return Ok(bernoulli_prefix_norms(xs, n_max).into_iter().map(|t| t.1).collect());
    }
    (1..=n_max)
        .map(|m| {
            // The quadrature error estimate is added so the reported value
            // is an upper bound as far as the estimate goes.
            potential_l1_norm(&points.prefix(m), kernel, DEFAULT_GRID).map(|e| e.value + e.tail_bound)
        })
        .collect()
}

/// Checks that every doubling window `[n, 2n]` up to `n_max` contains an `m`
/// with `||f_m||_1 <= 2 f(0) + tol`.
pub fn doubling_window_l1_check(points: &PointSet, kernel: &Kernel1D, n_max: usize, tol: f64) -> Result<DoublingReport> {
    if n_max < 2 {
        return Err(Error::config("doubling check needs n_max >= 2"));
    }
    let f0 = kernel
        .value_at_zero()
        .ok_or_else(|| Error::Unsupported(format!("{} is unbounded at 0", kernel.name())))?;
    let threshold = 2.0 * f0 + tol;
    let l1 = l1_profile(points, kernel, n_max)?;
    let windows: Vec<Window> = doubling_windows(n_max)
        .into_iter()
        .map(|(lo, hi)| {
            let witness = (lo..=hi).find(|&m| l1[m - 1] <= threshold);
            Window {
                lo,
                hi,
                witness,
                witness_l1: witness.map(|m| l1[m - 1]),
                min_l1: l1[lo - 1..hi].iter().copied().fold(f64::INFINITY, f64::min),
            }
        })
        .collect();
    let all_witnessed = windows.iter().all(|w| w.witness.is_some());
    Ok(DoublingReport { n_max, threshold, windows, all_witnessed })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeRow {
    pub n: usize,
    pub sup_norm: f64,
    /// `min_{m <= n} sup_norm(m) / m^{1/3}`.
    pub envelope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub m: usize,
    pub sup_norm: f64,
    pub deriv_l2: f64,
    pub l1_norm: f64,
    /// `c_gn * deriv_l2^{2/3} * threshold^{1/3}`.
    pub bound: f64,
    pub holds: bool,
    /// `sup_norm / m^{1/3}`.
    pub scaled_sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub n_max: usize,
    pub c_gn: f64,
    pub rows: Vec<EnvelopeRow>,
    pub witnesses: Vec<WitnessCheck>,
    pub envelope_non_increasing: bool,
    pub all_bounds_hold: bool,
    /// Largest `sup_norm(m) / m^{1/3}` over the witnesses.
    pub max_scaled_sup_at_witnesses: f64,
}

/// Lower envelope of `sup_norm(m) / m^{1/3}` at power-of-two checkpoints and
/// the bound `sup <= c_gn deriv^{2/3} (2 f(0) + tol)^{1/3}` at each witness of
/// [`doubling_window_l1_check`].
pub fn theorem2_envelope(points: &PointSet, kernel: &Kernel1D, n_max: usize, c_gn: f64, tol: f64) -> Result<EnvelopeReport> {
    if kernel.two_sided_bounds().is_none() {
        return Err(Error::Unsupported(format!(
            "{} lacks two-sided bounds c1/k^2 <= hat f(k) <= c2/k^2",
            kernel.name()
        )));
    }
    if n_max == 0 {
        return Err(Error::config("envelope needs n_max >= 1"));
    }
    let xs = points.require_1d()?;
    if n_max > xs.len() {
        return Err(Error::InvalidConfig(format!("n_max = {n_max} exceeds the {} available points", xs.len())));
    }
    let norms = bernoulli_prefix_norms(xs, n_max);
    let mut running = f64::INFINITY;
    let envelope: Vec<f64> = norms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            running = running.min(t.0 / ((i + 1) as f64).cbrt());
            running
        })
        .collect();
    let rows: Vec<EnvelopeRow> = powers_of_two(n_max)
        .into_iter()
        .map(|n| EnvelopeRow { n, sup_norm: norms[n - 1].0, envelope: envelope[n - 1] })
        .collect();
    let envelope_non_increasing = rows.windows(2).all(|w| w[1].envelope <= w[0].envelope);

    let threshold = 2.0 * kernel.value_at_zero().expect("bounded kernel") + tol;
    let witnesses: Vec<WitnessCheck> = if n_max >= 2 {
        doubling_window_l1_check(points, kernel, n_max, tol)?
            .witnesses()
            .into_iter()
            .map(|m| {
                let (sup, l1, d) = norms[m - 1];
                let bound = c_gn * d.powf(2.0 / 3.0) * threshold.cbrt();
                WitnessCheck {
                    m,
                    sup_norm: sup,
                    deriv_l2: d,
                    l1_norm: l1,
                    bound,
                    holds: sup <= bound,
                    scaled_sup: sup / (m as f64).cbrt(),
                }
            })
            .collect()
    } else {
        Vec::new()
    };
    let all_bounds_hold = witnesses.iter().all(|w| w.holds);
    let max_scaled_sup_at_witnesses = witnesses.iter().map(|w| w.scaled_sup).fold(0.0, f64::max);
    Ok(EnvelopeReport { n_max, c_gn, rows, witnesses, envelope_non_increasing, all_bounds_hold, max_scaled_sup_at_witnesses })
}
