//! Reductions whose results do not depend on the rayon thread count.
//!
//! Sums are taken over fixed-size chunks, each chunk summed sequentially and
//! the partials combined left to right. Argmin ties are resolved on the
//! (value, index) total order, and flat indices are laid out so that a
//! smaller index is a lexicographically smaller coordinate.

use rayon::prelude::*;

const CHUNK: usize = 1024;

/// Deterministic parallel sum of `f(i)` for `i in 0..len`.
pub fn det_sum<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    if len <= CHUNK {
        return (0..len).map(&f).sum();
    }
    let chunks = len.div_ceil(CHUNK);
    let partials: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(len);
            (lo..hi).map(&f).sum::<f64>()
        })
        .collect();
    partials.iter().sum()
}

/// Smallest value in `values` and the smallest index whose value lies within
/// `tie_tol` of it. NaN entries are ignored; `+inf` is a valid (losing) value.
pub fn argmin_with_ties(values: &[f64], tie_tol: f64) -> Option<(usize, f64)> {
    argmin_tied(values, tie_tol, false)
}

/// As [`argmin_with_ties`], but the largest tied index wins when `last` is set.
pub fn argmin_tied(values: &[f64], tie_tol: f64, last: bool) -> Option<(usize, f64)> {
    let min = values
        .par_iter()
        .copied()
        .filter(|v| !v.is_nan())
        .reduce(|| f64::INFINITY, f64::min);
    if min.is_infinite() && values.iter().all(|v| v.is_nan() || v.is_infinite()) {
        return None;
    }
    let threshold = min + tie_tol;
    let idx = if last {
        values.par_iter().position_last(|&v| v <= threshold)?
    } else {
        values.par_iter().position_first(|&v| v <= threshold)?
    };
    Some((idx, values[idx]))
}
