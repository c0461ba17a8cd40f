use crate::error::{Error, Result};
use crate::kernel::Kernel1D;
use crate::sequence::PointSet;

use super::spectral::{SpectralState, SpectralStateTd};
use super::Estimate;

/// `(2 sum_{k=1}^K |S_n(k)/n|^2 / k^2)^{1/2}`. Since `|S_n/n| <= 1` the
/// squared tail is at most `2/K`.
pub fn diaphony(state: &SpectralState) -> Estimate {
    if state.n() == 0 {
        return Estimate::exact(0.0);
    }
    let n2 = (state.n() as f64).powi(2);
    let s = 2.0 * state.positive().map(|(k, s)| s.norm_sqr() / n2 / (k * k) as f64).sum::<f64>();
    let tail = if state.k_max() == 0 { f64::INFINITY } else { 2.0 / state.k_max() as f64 };
    Estimate::sqrt_of_sum(s, tail)
}

/// Untruncated 1D diaphony from the identity
/// `sum_{k != 0} |S_n(k)/n|^2 / k^2 = 4 pi^2 min_c int_0^1 (F_n(x) - x - c)^2 dx`,
/// with `F_n` the empirical distribution function.
pub fn diaphony_exact(points: &PointSet) -> Result<f64> {
    let mut ys = points.require_1d()?.to_vec();
    if ys.is_empty() {
        return Err(Error::NoPoints);
    }
    ys.sort_by(f64::total_cmp);
    let n = ys.len() as f64;
    // Pieces (a, b, c) on which F_n - x = c - x.
    let mut pieces = Vec::with_capacity(ys.len() + 1);
    let mut a = 0.0;
    for (i, &y) in ys.iter().enumerate() {
        pieces.push((a, y, i as f64 / n));
        a = y;
    }
    pieces.push((a, 1.0, 1.0));
    let mean: f64 = pieces.iter().map(|&(a, b, c)| c * (b - a) - (b * b - a * a) / 2.0).sum();
    let var: f64 = pieces
        .iter()
        .map(|&(a, b, c)| {
            let c = c - mean;
            ((c - a).powi(3) - (c - b).powi(3)) / 3.0
        })
        .sum();
    Ok(2.0 * std::f64::consts::PI * var.max(0.0).sqrt())
}

/// Spectral transport proxy `(sum_{0<|k|<=K} |S_n(k)/n|^2 / k^2)^{1/2}` over
/// both signs of `k`. In 1D this equals [`diaphony`]; the one-sided sum over
/// `k >= 1` is smaller by `sqrt 2`.
pub fn w2_proxy(state: &SpectralState) -> Estimate {
    diaphony(state)
}

/// The proxy on `T^d`, summed over the full window `0 < |k|_inf <= K` with
/// `|k|^2` in the denominator. For `d >= 2` the omitted tail is not
/// summable for general measures, so the tail bound is `+inf`.
pub fn w2_proxy_td(state: &SpectralStateTd) -> Estimate {
    if state.n() == 0 {
        return Estimate::exact(0.0);
    }
    let n2 = (state.n() as f64).powi(2);
    let s = 2.0 * state.half().map(|(_, k2, s)| s.norm_sqr() / n2 / k2).sum::<f64>();
    Estimate { value: s.sqrt(), tail_bound: f64::INFINITY }
}

/// `max_k |S_n(k)| sqrt(hat f(k)) / sqrt(n f(0))`: the exponential sums
/// relative to the bound `|S_n(k)|/n <= sqrt(f(0)/hat f(k)) / sqrt n`.
pub fn weyl_ratio(state: &SpectralState, kernel: &Kernel1D) -> Result<f64> {
    let f0 = kernel
        .value_at_zero()
        .ok_or_else(|| Error::Unsupported(format!("{} is unbounded at 0", kernel.name())))?;
    if state.n() == 0 {
        return Ok(0.0);
    }
    let scale = (state.n() as f64 * f0).sqrt();
    let mut worst = 0.0f64;
    for (k, s) in state.positive() {
        let c = kernel.coefficient_unchecked(k);
        if c <= 0.0 {
            return Err(Error::InvalidKernel(format!("coefficient at k = {k} is not positive")));
        }
        worst = worst.max(s.norm() * c.sqrt() / scale);
    }
    Ok(worst)
}
