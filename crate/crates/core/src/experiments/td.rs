use serde::{Deserialize, Serialize};

use crate::diagnostics::{energy_td, w2_proxy_td, SpectralStateTd};
use crate::error::{Error, Result};
use crate::kernel::{Kernel, KernelTd};
use crate::sequence::{greedy_extend_traced, PointSet, Provenance, SolverConfig};

use super::fit::{fit_growth, Fit, GrowthModel};
use super::scan::powers_of_two;

/// Checkpoint whose normalized proxy serves as the boundedness reference.
pub const TD_REFERENCE_N: usize = 8;

/// Allowed growth of the normalized proxy over its reference value.
pub const TD_BOUND_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TdRow {
    pub n: usize,
    pub proxy: f64,
    /// `proxy * n^{1/d}` for `d >= 3`, `proxy * sqrt(n / log n)` for `d = 2`.
    pub normalized: f64,
    /// `sum_{k != l} G(x_k - x_l)`.
    pub off_diagonal_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TdScalingReport {
    pub dim: usize,
    pub cutoff: usize,
    pub grid: usize,
    pub rows: Vec<TdRow>,
    pub fit: Option<Fit>,
    pub max_gate_value: f64,
    pub gate: f64,
    /// Every accepted point had potential at most the gate.
    pub gate_ok: bool,
    /// `off_diagonal_energy <= n * gate` at every checkpoint.
    pub energy_ok: bool,
    /// Normalized proxy at [`TD_REFERENCE_N`].
    pub reference: Option<f64>,
    /// Normalized proxy at most [`TD_BOUND_FACTOR`] times the reference at
    /// every later checkpoint.
    pub bounded: bool,
    pub generation_seconds: f64,
}

fn normalization(dim: usize, n: usize) -> Option<f64> {
    let n = n as f64;
    match dim {
        2 if n > 1.0 => Some((n / n.ln()).sqrt()),
        2 => None,
        d => Some(n.powf(1.0 / d as f64)),
    }
}

fn growth_model(dim: usize) -> GrowthModel {
    match dim {
        2 => GrowthModel::SqrtLogOverSqrtN,
        d => GrowthModel::Power { exponent: Some(-1.0 / d as f64) },
    }
}

/// Greedy run on `T^d` from one seed point over a `grid^d` lattice, with the
/// proxy, its normalization and the off-diagonal energy at powers of two.
pub fn td_scaling(kernel: &KernelTd, seed: &[f64], n_max: usize, grid: usize) -> Result<TdScalingReport> {
    let dim = kernel.dim();
    if !(2..=3).contains(&dim) {
        return Err(Error::InvalidConfig(format!("scaling runs need dim 2 or 3, got {dim}")));
    }
    if n_max == 0 {
        return Err(Error::InvalidConfig("n_max must be positive".into()));
    }
    let seeds = PointSet::new(dim, seed.to_vec(), Provenance::Imported { source: "seed".into() })?;
    let config = SolverConfig::grid(grid);
    let started = std::time::Instant::now();
    let trace = greedy_extend_traced(&seeds, &Kernel::Td(kernel.clone()), &config, n_max.saturating_sub(seeds.len()))?;
    let generation_seconds = started.elapsed().as_secs_f64();
    let gate = config.gate();

    let checkpoints = powers_of_two(trace.points.len());
    let mut state = SpectralStateTd::new(dim, kernel.cutoff());
    let mut rows = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    for (i, p) in trace.points.points().enumerate() {
        state.push(p)?;
        if next.peek() == Some(&&(i + 1)) {
            next.next();
            let n = i + 1;
            let proxy = w2_proxy_td(&state).value;
            let off_diagonal_energy = energy_td(&state, kernel)? - n as f64 * kernel.value_at_zero();
            rows.push(TdRow {
                n,
                proxy,
                normalized: normalization(dim, n).map_or(f64::NAN, |s| proxy * s),
                off_diagonal_energy,
            });
        }
    }

    let (ns, ys): (Vec<usize>, Vec<f64>) = rows.iter().filter(|r| r.n > 1).map(|r| (r.n, r.proxy)).unzip();
    let fit = fit_growth(growth_model(dim), &ns, &ys).ok();
    let reference = rows.iter().find(|r| r.n == TD_REFERENCE_N).map(|r| r.normalized);
    let bounded = reference.is_some_and(|r0| {
        rows.iter().filter(|r| r.n >= TD_REFERENCE_N).all(|r| r.normalized <= TD_BOUND_FACTOR * r0)
    });
    let max_gate_value = trace.max_gate_value();
    Ok(TdScalingReport {
        dim,
        cutoff: kernel.cutoff(),
        grid,
        energy_ok: rows.iter().all(|r| r.off_diagonal_energy <= r.n as f64 * gate),
        gate_ok: trace.gate_values.iter().all(|&v| v <= gate),
        rows,
        fit,
        max_gate_value,
        gate,
        reference,
        bounded,
        generation_seconds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_torus_runs_pass_their_checks() {
        let k = KernelTd::green(2, 8).unwrap();
        let r = td_scaling(&k, &[0.5, 0.5], 64, 32).unwrap();
        assert_eq!(r.rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![1, 2, 4, 8, 16, 32, 64]);
        assert!(r.gate_ok && r.energy_ok && r.bounded);
        assert!(r.fit.is_some());
        assert!(r.rows[0].normalized.is_nan());

        let k3 = KernelTd::green(3, 4).unwrap();
        let r3 = td_scaling(&k3, &[0.5, 0.5, 0.5], 32, 16).unwrap();
        assert!(r3.gate_ok && r3.energy_ok);
        // One point: proxy equals the lattice sum over the window.
        let lattice: f64 = (-4i32..=4)
            .flat_map(|a| (-4i32..=4).flat_map(move |b| (-4i32..=4).map(move |c| (a, b, c))))
            .filter(|&t| t != (0, 0, 0))
            .map(|(a, b, c)| 1.0 / (a * a + b * b + c * c) as f64)
            .sum();
        assert!((r3.rows[0].proxy - lattice.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_other_dimensions() {
        let k = KernelTd::green(4, 2).unwrap();
        assert!(td_scaling(&k, &[0.5; 4], 8, 8).is_err());
    }
}
